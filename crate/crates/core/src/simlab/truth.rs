use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;
use crate::seeding::{self, Rng};
use crate::snir::{screen_candidates, top_by_in_degree, ScreenConfig};

/// Error standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Noise {
    Gaussian { sd: f64 },
    /// One standard deviation per node.
    PerNode { sd: Vec<f64> },
}

impl Noise {
    fn sd(&self, i: usize) -> f64 {
        match self {
            Noise::Gaussian { sd } => *sd,
            Noise::PerNode { sd } => sd[i],
        }
    }

    /// One draw per node, in index order.
    pub fn draw(&self, n: usize, rng: &mut Rng) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let z: f64 = StandardNormal.sample(rng);
                z * self.sd(i)
            })
            .collect()
    }
}

/// Ground truth for one synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSpec {
    pub s1: Vec<usize>,
    /// Coefficients aligned with `s1`.
    pub rho: Vec<f64>,
    /// Intercept of the influential rows.
    pub mu: f64,
    pub noise: Noise,
    /// Optional per-node additive term (e.g. a covariate effect); empty for none.
    #[serde(default)]
    pub shift: Vec<f64>,
}

impl TruthSpec {
    pub fn rho_full(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (&j, &r) in self.s1.iter().zip(&self.rho) {
            out[j] = r;
        }
        out
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.s1.len() != self.rho.len() {
            return Err(Error::InvalidParameter("s1 and rho differ in length".into()));
        }
        if let Some(&j) = self.s1.iter().find(|&&j| j >= n) {
            return Err(Error::InvalidParameter(format!("influential node {j} out of range")));
        }
        if !self.shift.is_empty() && self.shift.len() != n {
            return Err(Error::InvalidParameter("shift length differs from node count".into()));
        }
        if let Noise::PerNode { sd } = &self.noise {
            if sd.len() != n {
                return Err(Error::InvalidParameter("per-node noise length differs from node count".into()));
            }
        }
        Ok(())
    }
}

/// `A_(s1,s1) diag(rho)` as a dense matrix.
fn influence_block(g: &DirectedGraph, s1: &[usize], rho: &[f64]) -> DMatrix<f64> {
    let p = s1.len();
    let mut pos = vec![usize::MAX; g.n()];
    for (k, &j) in s1.iter().enumerate() {
        pos[j] = k;
    }
    let mut m = DMatrix::zeros(p, p);
    for (b, &j) in s1.iter().enumerate() {
        for &i in g.in_neighbors(j) {
            if pos[i] != usize::MAX {
                m[(pos[i], b)] = rho[b];
            }
        }
    }
    m
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Draws responses from the model: the influential block solves
/// `(I - A_(S1,S1) diag(rho)) Y_(S1) = mu + eps_(S1)`, and every other node
/// gets `A_(S0,S1) diag(rho) Y_(S1) + eps`.
pub fn gen_snir_data(g: &DirectedGraph, truth: &TruthSpec, seed: u64) -> Result<Vec<f64>> {
    let n = g.n();
    truth.check(n)?;
    let block = influence_block(g, &truth.s1, &truth.rho);
    let radius = spectral_radius(&block);
    // eigenvalues of a unit cycle can come back a few ulps below 1
    if radius >= 1.0 - 1e-10 {
        return Err(Error::UnstableTruth(radius));
    }
    let mut rng = seeding::rng(seed);
    let eps = truth.noise.draw(n, &mut rng);
    let shift = |i: usize| truth.shift.get(i).copied().unwrap_or(0.0);
    let p = truth.s1.len();
    let h1 = DMatrix::identity(p, p) - block;
    let rhs = DVector::from_iterator(p, truth.s1.iter().map(|&j| truth.mu + shift(j) + eps[j]));
    let ys1 = h1
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("I - A_(S1,S1) diag(rho)".into()))?;
    let vals: Vec<f64> = ys1.iter().copied().collect();
    Ok(propagate(g, &truth.s1, &truth.rho, &vals, |i| shift(i) + eps[i]))
}

/// Responses of the non-influential nodes given fixed influential values:
/// `Y_i = sum_j a_ij rho_j y_j + extra(i)` for `i` outside `s1`, and
/// `Y_j = y_s1[j]` on `s1`.
pub(crate) fn propagate(
    g: &DirectedGraph,
    s1: &[usize],
    rho: &[f64],
    y_s1: &[f64],
    extra: impl Fn(usize) -> f64,
) -> Vec<f64> {
    let n = g.n();
    let mut in_s1 = vec![false; n];
    s1.iter().for_each(|&j| in_s1[j] = true);
    let mut y: Vec<f64> = (0..n).map(|i| if in_s1[i] { 0.0 } else { extra(i) }).collect();
    for ((&j, &r), &v) in s1.iter().zip(rho).zip(y_s1) {
        for &i in g.in_neighbors(j) {
            if !in_s1[i] {
                y[i] += r * v;
            }
        }
    }
    for (&j, &v) in s1.iter().zip(y_s1) {
        y[j] = v;
    }
    y
}

/// Non-influential responses generated around fixed influential values,
/// for designs where `Y_(S1)` is taken from observed data.
pub fn gen_conditional(
    g: &DirectedGraph,
    s1: &[usize],
    rho: &[f64],
    y_s1: &[f64],
    noise: &Noise,
    seed: u64,
) -> Result<Vec<f64>> {
    if s1.len() != rho.len() || s1.len() != y_s1.len() {
        return Err(Error::InvalidParameter("s1, rho and y_s1 differ in length".into()));
    }
    let mut rng = seeding::rng(seed);
    let eps = noise.draw(g.n(), &mut rng);
    Ok(propagate(g, s1, rho, y_s1, |i| eps[i]))
}

/// How the influential set is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthMode {
    /// Uniformly at random from the screened candidate set.
    RandomFromM,
    /// Largest values of a reference response.
    TopResponse,
    /// Largest in-degrees.
    TopInDegree,
}

/// Picks an influential set; ties broken by ascending node index.
pub fn pick_truth(
    g: &DirectedGraph,
    mode: TruthMode,
    size: usize,
    seed: u64,
    y_ref: Option<&[f64]>,
    screen: &ScreenConfig,
) -> Result<Vec<usize>> {
    if size == 0 || size >= g.n() {
        return Err(Error::InvalidParameter(format!("influential set size {size} for {} nodes", g.n())));
    }
    match mode {
        TruthMode::RandomFromM => {
            let m = screen_candidates(g, screen)?;
            if size > m.len() {
                return Err(Error::InvalidParameter(format!(
                    "cannot draw {size} nodes from {} candidates",
                    m.len()
                )));
            }
            let mut m_sorted = m;
            m_sorted.sort_unstable();
            let mut rng = seeding::rng(seed);
            let mut out: Vec<usize> = sample(&mut rng, m_sorted.len(), size)
                .into_iter()
                .map(|k| m_sorted[k])
                .collect();
            out.sort_unstable();
            Ok(out)
        }
        TruthMode::TopResponse => {
            let y = y_ref.ok_or_else(|| Error::InvalidParameter("top-response mode needs a response".into()))?;
            if y.len() != g.n() {
                return Err(Error::InvalidParameter("reference response length differs from node count".into()));
            }
            Ok(top_by_value(y, size))
        }
        TruthMode::TopInDegree => {
            let mut out = top_by_in_degree(g, size);
            out.sort_unstable();
            Ok(out)
        }
    }
}

/// Indices of the `size` largest values (ascending index on ties), sorted.
pub fn top_by_value(v: &[f64], size: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    order.truncate(size);
    order.sort_unstable();
    order
}

/// Coefficient distribution for the influential set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RhoPlan {
    Uniform { lo: f64, hi: f64 },
    /// Two draws from `U(0.25, 0.5)`, the rest from `U(-1, -0.5)`, so
    /// followers of the influential nodes stay below them.
    SignMixed,
}

impl Default for RhoPlan {
    fn default() -> Self {
        RhoPlan::Uniform { lo: 0.5, hi: 1.0 }
    }
}

impl RhoPlan {
    pub fn draw(&self, size: usize, rng: &mut Rng) -> Result<Vec<f64>> {
        let uni = |lo: f64, hi: f64| {
            Uniform::new(lo, hi).map_err(|e| Error::InvalidParameter(format!("coefficient range: {e}")))
        };
        match *self {
            RhoPlan::Uniform { lo, hi } => {
                let d = uni(lo, hi)?;
                Ok((0..size).map(|_| d.sample(rng)).collect())
            }
            RhoPlan::SignMixed => {
                let pos = uni(0.25, 0.5)?;
                let neg = uni(-1.0, -0.5)?;
                Ok((0..size)
                    .map(|k| if k < 2 { pos.sample(rng) } else { neg.sample(rng) })
                    .collect())
            }
        }
    }
}

/// Per-node standard deviations drawn from `U(lo, hi)`.
pub fn heteroskedastic_sd(n: usize, lo: f64, hi: f64, rng: &mut Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_influencer_block_triangular() {
        let g = DirectedGraph::from_edges(5, [(1, 0), (2, 0), (3, 4)]).unwrap();
        let t = TruthSpec {
            s1: vec![0],
            rho: vec![0.5],
            mu: 5.0,
            noise: Noise::Gaussian { sd: 0.0 },
            shift: vec![],
        };
        let y = gen_snir_data(&g, &t, 1).unwrap();
        assert_eq!(y, vec![5.0, 2.5, 2.5, 0.0, 0.0]);
    }

    #[test]
    fn two_cycle_solves_linear_system() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 0), (2, 0)]).unwrap();
        let t = TruthSpec {
            s1: vec![0, 1],
            rho: vec![0.5, 0.5],
            mu: 5.0,
            noise: Noise::Gaussian { sd: 0.0 },
            shift: vec![],
        };
        let y = gen_snir_data(&g, &t, 1).unwrap();
        assert!((y[0] - 10.0).abs() < 1e-12 && (y[1] - 10.0).abs() < 1e-12);
        assert!((y[2] - 5.0).abs() < 1e-12);
        let bad = TruthSpec {
            rho: vec![1.0, 1.0],
            ..t
        };
        assert!(matches!(gen_snir_data(&g, &bad, 1), Err(Error::UnstableTruth(_))));
    }

    #[test]
    fn pick_modes() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (2, 1), (3, 2)]).unwrap();
        let cfg = ScreenConfig::fixed(2);
        assert_eq!(
            pick_truth(&g, TruthMode::TopInDegree, 1, 0, None, &cfg).unwrap(),
            vec![1]
        );
        let y = [1.0, 9.0, 3.0, 0.0];
        assert_eq!(
            pick_truth(&g, TruthMode::TopResponse, 1, 0, Some(&y), &cfg).unwrap(),
            vec![1]
        );
        let a = pick_truth(&g, TruthMode::RandomFromM, 1, 5, None, &cfg).unwrap();
        let b = pick_truth(&g, TruthMode::RandomFromM, 1, 5, None, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a[0] == 1 || a[0] == 2);
    }

    #[test]
    fn sign_mixed_ranges() {
        let mut rng = seeding::rng(3);
        let r = RhoPlan::SignMixed.draw(8, &mut rng).unwrap();
        assert!(r[..2].iter().all(|v| (0.25..0.5).contains(v)));
        assert!(r[2..].iter().all(|v| (-1.0..-0.5).contains(v)));
    }
}
