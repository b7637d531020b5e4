use serde::{Deserialize, Serialize};

/// Selection and estimation accuracy, for one replication or averaged.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StudyMetrics {
    pub tpr: f64,
    pub fpr: f64,
    pub cfp: f64,
    pub err: f64,
}

/// Scores an estimated set against the truth. `rho_true` and `rho_hat` are
/// full-length coefficient vectors (zero off their supports). False
/// positives are all selected nodes outside `s1`, over `|M \ S1|`.
pub fn metrics(s1: &[usize], s_hat: &[usize], rho_true: &[f64], rho_hat: &[f64], m_size: usize) -> StudyMetrics {
    let hits = s_hat.iter().filter(|j| s1.contains(j)).count();
    let false_pos = s_hat.len() - hits;
    let tpr = if s1.is_empty() {
        1.0
    } else {
        hits as f64 / s1.len() as f64
    };
    let negatives = m_size.saturating_sub(s1.len());
    let fpr = if negatives == 0 {
        0.0
    } else {
        (false_pos as f64 / negatives as f64).min(1.0)
    };
    let exact = hits == s1.len() && false_pos == 0;
    StudyMetrics {
        tpr,
        fpr,
        cfp: if exact { 1.0 } else { 0.0 },
        err: l2_diff(rho_true, rho_hat),
    }
}

pub fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn linf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Componentwise mean; non-finite entries of a field are skipped.
pub fn average(ms: &[StudyMetrics]) -> StudyMetrics {
    let mean = |f: fn(&StudyMetrics) -> f64| {
        let vals: Vec<f64> = ms.iter().map(f).filter(|v| v.is_finite()).collect();
        if vals.is_empty() {
            f64::NAN
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };
    StudyMetrics {
        tpr: mean(|m| m.tpr),
        fpr: mean(|m| m.fpr),
        cfp: mean(|m| m.cfp),
        err: mean(|m| m.err),
    }
}
