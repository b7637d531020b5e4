use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;

/// `⌊n^e⌋`, snapping to the nearest integer when `n^e` lands within
/// rounding error of it (so `1000^(2/3)` gives 100, not 99).
pub fn floor_pow(n: usize, e: f64) -> usize {
    let x = (n as f64).powf(e);
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// Size of the in-degree candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScreenSize {
    /// `|M| = ⌊N^gamma⌋`, gamma in (0, 1].
    Gamma(f64),
    /// Explicit `|M|`.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenConfig {
    pub size: ScreenSize,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        ScreenConfig {
            size: ScreenSize::Gamma(2.0 / 3.0),
        }
    }
}

impl ScreenConfig {
    pub fn gamma(gamma: f64) -> Self {
        ScreenConfig {
            size: ScreenSize::Gamma(gamma),
        }
    }

    pub fn fixed(m: usize) -> Self {
        ScreenConfig {
            size: ScreenSize::Fixed(m),
        }
    }

    pub fn resolve(&self, n: usize) -> Result<usize> {
        let m = match self.size {
            ScreenSize::Gamma(g) => {
                if !(g > 0.0 && g <= 1.0) {
                    return Err(Error::InvalidConfig(format!("gamma = {g} is not in (0, 1]")));
                }
                floor_pow(n, g)
            }
            ScreenSize::Fixed(m) => m,
        };
        if m == 0 || m >= n {
            return Err(Error::InvalidConfig(format!(
                "candidate set size {m} must be in 1..{n} for {n} nodes"
            )));
        }
        Ok(m)
    }
}

/// Candidate set `M`: the nodes of largest in-degree, ties broken by
/// ascending index. Returned in rank order.
pub fn screen_candidates(g: &DirectedGraph, cfg: &ScreenConfig) -> Result<Vec<usize>> {
    let m = cfg.resolve(g.n())?;
    Ok(top_by_in_degree(g, m))
}

pub(crate) fn top_by_in_degree(g: &DirectedGraph, m: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| g.in_degree_of(b).cmp(&g.in_degree_of(a)).then(a.cmp(&b)));
    order.truncate(m);
    order
}
