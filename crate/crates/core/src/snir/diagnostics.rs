use nalgebra::DMatrix;
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::screen::{floor_pow, top_by_in_degree};
use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;
use crate::seeding;

/// Observed spread of the smallest and largest eigenvalue over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRange {
    pub min_lo: f64,
    pub min_hi: f64,
    pub max_lo: f64,
    pub max_hi: f64,
}

impl EigenRange {
    fn new() -> Self {
        EigenRange {
            min_lo: f64::INFINITY,
            min_hi: f64::NEG_INFINITY,
            max_lo: f64::INFINITY,
            max_hi: f64::NEG_INFINITY,
        }
    }

    fn update(&mut self, lo: f64, hi: f64) {
        self.min_lo = self.min_lo.min(lo);
        self.min_hi = self.min_hi.max(lo);
        self.max_lo = self.max_lo.min(hi);
        self.max_hi = self.max_hi.max(hi);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    /// Eigenvalues of `n^-1 A_(S0,S)^T A_(S0,S)`.
    pub influence_gram: EigenRange,
    /// Eigenvalues of `B^-1/2 A_(M^c,S)^T A_(M^c,S) B^-1/2`, `B` the
    /// in-degree diagonal of `S`.
    pub candidate_gram: EigenRange,
    /// Range of `min_{j in M} in_degree(j) / n`.
    pub min_degree_ratio: (f64, f64),
}

/// Eigenvalue checks on random induced subgraphs of `subsample_n` nodes.
/// `S` is the `set_size` highest in-degree nodes of each subgraph and `M`
/// its top `n^(2/3)`.
pub fn condition_check(
    g: &DirectedGraph,
    set_size: usize,
    subsample_n: usize,
    reps: usize,
    seed: u64,
) -> Result<ConditionSummary> {
    if subsample_n > g.n() || subsample_n < 2 || set_size == 0 || set_size >= subsample_n || reps == 0
    {
        return Err(Error::InvalidParameter(format!(
            "need 0 < set_size < subsample_n <= N and reps > 0 (set_size {set_size}, subsample {subsample_n}, N {})",
            g.n()
        )));
    }
    let mut infl = EigenRange::new();
    let mut cand = EigenRange::new();
    let mut ratio = (f64::INFINITY, f64::NEG_INFINITY);
    for rep in 0..reps {
        let mut rng = seeding::rng(seeding::mix(seed, rep as u64));
        let mut nodes = sample(&mut rng, g.n(), subsample_n).into_vec();
        nodes.sort_unstable();
        let sub = g.induced(&nodes);
        let n = sub.n();
        let m_size = floor_pow(n, 2.0 / 3.0).clamp(set_size, n - 1);
        let m = top_by_in_degree(&sub, m_size);
        let s = &m[..set_size];

        let (lo, hi) = extreme_eigen(&gram(&sub, s, &nonmembers(n, s)), |_| 1.0 / n as f64);
        infl.update(lo, hi);
        let deg: Vec<f64> = s.iter().map(|&j| sub.in_degree_of(j) as f64).collect();
        let (lo, hi) = extreme_eigen(&gram(&sub, s, &nonmembers(n, &m)), |(a, b)| {
            let d = (deg[a] * deg[b]).sqrt();
            if d > 0.0 {
                1.0 / d
            } else {
                0.0
            }
        });
        cand.update(lo, hi);
        let md = m.iter().map(|&j| sub.in_degree_of(j)).min().unwrap_or(0) as f64 / n as f64;
        ratio = (ratio.0.min(md), ratio.1.max(md));
    }
    Ok(ConditionSummary {
        influence_gram: infl,
        candidate_gram: cand,
        min_degree_ratio: ratio,
    })
}

fn nonmembers(n: usize, set: &[usize]) -> Vec<bool> {
    let mut rows = vec![true; n];
    for &j in set {
        rows[j] = false;
    }
    rows
}

/// `A_(rows,S)^T A_(rows,S)`: shared follower counts within `rows`.
fn gram(g: &DirectedGraph, s: &[usize], rows: &[bool]) -> DMatrix<f64> {
    let p = s.len();
    let cols: Vec<Vec<usize>> = s
        .iter()
        .map(|&j| g.in_neighbors(j).iter().copied().filter(|&i| rows[i]).collect())
        .collect();
    let mut out = DMatrix::zeros(p, p);
    let mut mark = vec![false; g.n()];
    for a in 0..p {
        cols[a].iter().for_each(|&i| mark[i] = true);
        for b in a..p {
            let c = cols[b].iter().filter(|&&i| mark[i]).count() as f64;
            out[(a, b)] = c;
            out[(b, a)] = c;
        }
        cols[a].iter().for_each(|&i| mark[i] = false);
    }
    out
}

fn extreme_eigen(m: &DMatrix<f64>, scale: impl Fn((usize, usize)) -> f64) -> (f64, f64) {
    let scaled = DMatrix::from_fn(m.nrows(), m.ncols(), |a, b| m[(a, b)] * scale((a, b)));
    let ev = scaled.symmetric_eigenvalues();
    let lo = ev.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let hi = ev.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_has_zero_eigenvalues() {
        let s = condition_check(&DirectedGraph::empty(30), 3, 20, 4, 1).unwrap();
        assert_eq!(s.influence_gram.min_lo, 0.0);
        assert_eq!(s.influence_gram.max_hi, 0.0);
        assert_eq!(s.candidate_gram.max_hi, 0.0);
    }

    #[test]
    fn complete_graph_single_influencer() {
        let n = 9;
        let edges = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
        let g = DirectedGraph::from_edges(n, edges).unwrap();
        let s = condition_check(&g, 1, n, 1, 0).unwrap();
        let expect = (n - 1) as f64 / n as f64;
        assert!((s.influence_gram.min_lo - expect).abs() < 1e-12);
        assert!((s.influence_gram.max_hi - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_oversized_subsample() {
        assert!(condition_check(&DirectedGraph::empty(5), 1, 6, 1, 0).is_err());
    }
}
