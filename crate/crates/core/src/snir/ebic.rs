use crate::error::{Error, Result};

/// `log(rss) + s_size * (log(mc_size) + 2 log(m_size)) / mc_size`.
pub fn ebic(rss: f64, s_size: usize, m_size: usize, mc_size: usize) -> Result<f64> {
    if !(rss > 0.0) {
        return Err(Error::DegenerateFit(rss));
    }
    if m_size == 0 || mc_size == 0 {
        return Err(Error::InvalidParameter(format!(
            "model-space sizes must be positive (m = {m_size}, mc = {mc_size})"
        )));
    }
    let penalty = (mc_size as f64).ln() + 2.0 * (m_size as f64).ln();
    Ok(rss.ln() + s_size as f64 * penalty / mc_size as f64)
}

/// 1-based step with the smallest EBIC; the earliest step wins ties.
/// Returns `None` on an empty trace.
pub fn argmin_step(trace: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &v) in trace.iter().enumerate() {
        match best {
            Some((_, b)) if !(v < b) => {}
            _ => best = Some((k, v)),
        }
    }
    best.map(|(k, _)| k + 1)
}
