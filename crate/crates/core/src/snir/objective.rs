use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;

/// Conditional objective `Q` and full objective `Q~` at given parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub q: f64,
    pub q_tilde: f64,
}

impl Objective {
    /// `(Q~ - Q) / Q`, the share of the objective due to the influential block.
    pub fn ratio(&self) -> f64 {
        (self.q_tilde - self.q) / self.q
    }
}

/// `Q = ||Y_(s^c) - A_(s^c,s) diag(rho) Y_(s)||^2` and
/// `Q~ = Q + ||H1 Y_(s) - mu 1||^2 + 2 sigma2 ln|det H1|` with
/// `H1 = I - A_(s,s) diag(rho)`.
pub fn full_objective(
    g: &DirectedGraph,
    y: &[f64],
    s: &[usize],
    mu: f64,
    rho: &[f64],
    sigma2: f64,
) -> Result<Objective> {
    let n = g.n();
    if y.len() != n || rho.len() != s.len() {
        return Err(Error::InvalidParameter("length mismatch between y, s and rho".into()));
    }
    let mut pos = vec![usize::MAX; n];
    for (k, &j) in s.iter().enumerate() {
        if j >= n || pos[j] != usize::MAX {
            return Err(Error::InvalidParameter(format!("bad selected node {j}")));
        }
        pos[j] = k;
    }
    let p = s.len();

    let mut fitted = vec![0.0; n];
    let mut h1 = DMatrix::<f64>::identity(p, p);
    for (b, &j) in s.iter().enumerate() {
        let c = rho[b] * y[j];
        for &i in g.in_neighbors(j) {
            fitted[i] += c;
            if pos[i] != usize::MAX {
                h1[(pos[i], b)] -= rho[b];
            }
        }
    }
    let q: f64 = (0..n)
        .filter(|&i| pos[i] == usize::MAX)
        .map(|i| (y[i] - fitted[i]).powi(2))
        .sum();

    let sv = h1.clone().singular_values();
    let smax = sv.iter().fold(0.0f64, |a, &v| a.max(v));
    let smin = sv.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    if p > 0 && !(smin > 1e-12 * smax) {
        return Err(Error::Singular("I - A_(s,s) diag(rho) is singular".into()));
    }
    let log_det = sv.iter().map(|v| v.ln()).sum::<f64>();
    let ys: Vec<f64> = s.iter().map(|&j| y[j]).collect();
    let marginal: f64 = (0..p)
        .map(|a| {
            let hy: f64 = (0..p).map(|b| h1[(a, b)] * ys[b]).sum();
            (hy - mu).powi(2)
        })
        .sum();
    Ok(Objective {
        q,
        q_tilde: q + marginal + 2.0 * sigma2 * log_det,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_block_adds_squared_influential_responses() {
        let g = DirectedGraph::from_edges(4, [(2, 0), (3, 1)]).unwrap();
        let y = [3.0, 4.0, 1.5, 2.0];
        let o = full_objective(&g, &y, &[0, 1], 0.0, &[0.5, 0.5], 1.0).unwrap();
        assert!(o.q.abs() < 1e-15);
        assert!((o.q_tilde - o.q - 25.0).abs() < 1e-12);
    }

    #[test]
    fn unit_two_cycle_is_singular() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let r = full_objective(&g, &[1.0, 1.0, 1.0], &[0, 1], 5.0, &[1.0, 1.0], 1.0);
        assert!(matches!(r, Err(Error::Singular(_))));
    }

    #[test]
    fn log_det_term_matches_two_by_two() {
        // H1 = [[1, -0.5], [-0.5, 1]], det = 0.75
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        let y = [10.0, 10.0, 0.0];
        let o = full_objective(&g, &y, &[0, 1], 5.0, &[0.5, 0.5], 2.0).unwrap();
        let expect = 0.0 + 0.0 + 2.0 * 2.0 * 0.75f64.ln();
        assert!((o.q_tilde - o.q - expect).abs() < 1e-12);
    }
}
