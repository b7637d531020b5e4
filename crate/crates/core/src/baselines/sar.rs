use log::warn;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::logdet::LogDet;
use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;
use crate::seeding;

/// Search interval for the scalar coefficient.
pub const RHO_BOUND: f64 = 0.999;
const GRID_POINTS: usize = 41;
const GOLDEN_TOL: f64 = 1e-6;
/// Estimates this close to the search bound are flagged.
const BOUNDARY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarFit {
    pub rho: f64,
    pub sigma2: f64,
    pub loglik: f64,
    pub r2: f64,
    pub adj_r2: f64,
    /// Estimate sits at the edge of the search interval.
    pub boundary: bool,
    /// Number of log-determinant evaluations.
    pub evaluations: usize,
}

/// Off-diagonal entries of the row-normalized adjacency,
/// `w_ij = a_ij / sum_j a_ij`; rows without followees stay zero.
pub fn row_normalized(g: &DirectedGraph) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::with_capacity(g.edge_count());
    for i in 0..g.n() {
        let nb = g.out_neighbors(i);
        let w = 1.0 / nb.len().max(1) as f64;
        out.extend(nb.iter().map(|&j| (i, j, w)));
    }
    out
}

fn spatial_lag(g: &DirectedGraph, y: &[f64]) -> Vec<f64> {
    (0..g.n())
        .map(|i| {
            let nb = g.out_neighbors(i);
            if nb.is_empty() {
                0.0
            } else {
                nb.iter().map(|&j| y[j]).sum::<f64>() / nb.len() as f64
            }
        })
        .collect()
}

/// Concentrated Gaussian log-likelihood of the SAR model with all
/// `rho`-free quantities precomputed.
pub struct SarObjective {
    n: usize,
    yy: f64,
    ywy: f64,
    wywy: f64,
    logdet: LogDet,
}

impl SarObjective {
    pub fn new(g: &DirectedGraph, y: &[f64]) -> Result<Self> {
        let n = g.n();
        if g.edge_count() == 0 {
            return Err(Error::NoNetwork);
        }
        if y.len() != n {
            return Err(Error::InvalidParameter(format!("{} responses for {n} nodes", y.len())));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("response is not finite".into()));
        }
        let wy = spatial_lag(g, y);
        Ok(SarObjective {
            n,
            yy: y.iter().map(|v| v * v).sum(),
            ywy: y.iter().zip(&wy).map(|(a, b)| a * b).sum(),
            wywy: wy.iter().map(|v| v * v).sum(),
            logdet: LogDet::new(n, &row_normalized(g)),
        })
    }

    /// `sigma^2(rho) = ||(I - rho W) Y||^2 / N`.
    pub fn sigma2(&self, rho: f64) -> f64 {
        ((self.yy - 2.0 * rho * self.ywy + rho * rho * self.wywy) / self.n as f64).max(0.0)
    }

    /// `-(N/2) log sigma^2(rho) + log |I - rho W|`.
    pub fn loglik(&self, rho: f64) -> f64 {
        -0.5 * self.n as f64 * self.sigma2(rho).ln() + self.logdet.eval(rho)
    }
}

/// Maximum-likelihood fit of `Y = rho W Y + eps` with row-normalized `W`.
///
/// A 41-point grid over `(-0.999, 0.999)` brackets the maximum, then
/// golden-section search narrows the bracket to `1e-6`.
pub fn sar_fit(g: &DirectedGraph, y: &[f64]) -> Result<SarFit> {
    let obj = SarObjective::new(g, y)?;
    let mut evals = 0usize;
    let mut f = |rho: f64| {
        evals += 1;
        obj.loglik(rho)
    };

    let step = 2.0 * RHO_BOUND / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|k| -RHO_BOUND + k as f64 * step).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| f(r)).collect();
    let finite: Vec<usize> = (0..GRID_POINTS).filter(|&k| !vals[k].is_nan() && vals[k] > f64::NEG_INFINITY).collect();
    if finite.len() < GRID_POINTS {
        warn!(
            "SAR log-likelihood is not finite at {} grid points; search interval shrunk",
            GRID_POINTS - finite.len()
        );
    }
    let Some(&best) = finite.iter().max_by(|&&a, &&b| vals[a].total_cmp(&vals[b]).then(b.cmp(&a))) else {
        return Err(Error::Singular("SAR log-likelihood is not finite anywhere on the grid".into()));
    };
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(GRID_POINTS - 1)];

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > GOLDEN_TOL {
        if fc == f64::NEG_INFINITY {
            warn!("SAR log-determinant not finite at rho = {c}; shrinking interval");
            lo = c;
        } else if fd == f64::NEG_INFINITY {
            warn!("SAR log-determinant not finite at rho = {d}; shrinking interval");
            hi = d;
        } else if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
            continue;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
            continue;
        }
        c = hi - ratio * (hi - lo);
        d = lo + ratio * (hi - lo);
        fc = f(c);
        fd = f(d);
    }
    let mut rho = 0.5 * (lo + hi);
    let mut loglik = f(rho);
    if vals[best] > loglik {
        rho = grid[best];
        loglik = vals[best];
    }
    let boundary = RHO_BOUND - rho.abs() < BOUNDARY_TOL;
    if boundary {
        warn!("SAR estimate rho = {rho} is at the search boundary");
    }

    let n = g.n() as f64;
    let sigma2 = obj.sigma2(rho);
    let mean = y.iter().sum::<f64>() / n;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let (r2, adj_r2) = if tss > 0.0 && n > 2.0 {
        let r2 = 1.0 - sigma2 * n / tss;
        (r2, 1.0 - (1.0 - r2) * (n - 1.0) / (n - 2.0))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SarFit {
        rho,
        sigma2,
        loglik,
        r2,
        adj_r2,
        boundary,
        evaluations: evals,
    })
}

/// Draws `Y = (I - rho W)^(-1) eps`, `eps ~ N(0, sd^2 I)`, by fixed-point
/// iteration (a contraction for `|rho| < 1`).
pub fn gen_sar_data(g: &DirectedGraph, rho: f64, sd: f64, seed: u64) -> Result<Vec<f64>> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidParameter(format!("|rho| = {} must be below 1", rho.abs())));
    }
    let normal = Normal::new(0.0, sd).map_err(|e| Error::InvalidParameter(format!("noise sd: {e}")))?;
    let mut rng = seeding::rng(seed);
    let eps: Vec<f64> = (0..g.n()).map(|_| normal.sample(&mut rng)).collect();
    let mut y = eps.clone();
    for _ in 0..100_000 {
        let lag = spatial_lag(g, &y);
        let next: Vec<f64> = eps.iter().zip(&lag).map(|(e, l)| e + rho * l).collect();
        let change = next.iter().zip(&y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = next.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        y = next;
        if change <= 1e-14 * scale {
            break;
        }
    }
    Ok(y)
}
