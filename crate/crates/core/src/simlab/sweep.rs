use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::truth::{gen_conditional, Noise};
use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;
use crate::seeding;
use crate::snir::{fit, screen_candidates, FitConfig, FitResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Coefficients given to the added influential node.
    pub grid: Vec<f64>,
    pub reps: usize,
    pub noise_sd: f64,
    pub seed: u64,
    #[serde(default)]
    pub fit: FitConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: (1..=12).map(|k| 0.025 * k as f64).collect(),
            reps: 100,
            noise_sd: 1.0,
            seed: 1,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub coef: f64,
    /// Share of replications in which the added node was selected.
    pub detection: f64,
}

/// Detection rate of one extra influential node as its coefficient grows.
///
/// Each replication keeps the base fit's selected nodes and coefficients,
/// adds one node drawn uniformly from the remaining candidates with the grid
/// coefficient, simulates the followers' responses around `y[S]`, refits,
/// and records whether the added node is selected.
pub fn snr_sweep(g: &DirectedGraph, y: &[f64], base: &FitResult, cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    if y.len() != g.n() {
        return Err(Error::InvalidParameter("response length differs from node count".into()));
    }
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let pool: Vec<usize> = {
        let mut m = screen_candidates(g, &cfg.fit.screen)?;
        m.sort_unstable();
        m.retain(|j| !base.selected.contains(j));
        m
    };
    if pool.is_empty() {
        return Err(Error::InvalidConfig("no candidate left to add".into()));
    }
    let noise = Noise::Gaussian { sd: cfg.noise_sd };
    cfg.grid
        .iter()
        .enumerate()
        .map(|(gi, &coef)| {
            let hits = (0..cfg.reps)
                .into_par_iter()
                .map(|rep| -> Result<usize> {
                    let seed = seeding::mix(seeding::mix(cfg.seed, gi as u64), rep as u64);
                    let mut rng = seeding::rng(seed);
                    let extra = pool[rng.random_range(0..pool.len())];
                    let mut s: Vec<usize> = base.selected.clone();
                    let mut rho = base.rho();
                    s.push(extra);
                    rho.push(coef);
                    let y_s: Vec<f64> = s.iter().map(|&j| y[j]).collect();
                    let yy = gen_conditional(g, &s, &rho, &y_s, &noise, seeding::mix(seed, 1))?;
                    let f = fit(g, &yy, &cfg.fit).map_err(|e| Error::Replication {
                        rep,
                        source: Box::new(e),
                    })?;
                    Ok(usize::from(f.selected.contains(&extra)))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .sum::<usize>();
            Ok(SweepPoint {
                coef,
                detection: hits as f64 / cfg.reps as f64,
            })
        })
        .collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}
