//! Designs where the influential responses are held at observed values and
//! only the followers' responses are simulated.

use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{average, metrics, StudyMetrics};
use super::truth::{gen_conditional, pick_truth, top_by_value, Noise, RhoPlan, TruthMode};
use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;
use crate::seeding;
use crate::snir::{cmle, fit, screen_candidates, top_by_in_degree, FitConfig};

/// Stand-in for an observed log-count response: `log1p(C_j)` with
/// `C_j ~ Poisson(exp(a + b log1p(d_j) + tau z_j))`, `d_j` the in-degree and
/// `z_j` standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSpec {
    pub a: f64,
    pub b: f64,
    pub tau: f64,
    pub seed: u64,
}

impl Default for SurrogateSpec {
    fn default() -> Self {
        SurrogateSpec {
            a: 0.0,
            b: 3.0,
            tau: 0.5,
            seed: 2275,
        }
    }
}

pub fn surrogate_response(g: &DirectedGraph, spec: &SurrogateSpec) -> Result<Vec<f64>> {
    let mut rng = seeding::rng(spec.seed);
    (0..g.n())
        .map(|j| {
            let z: f64 = StandardNormal.sample(&mut rng);
            let rate = (spec.a + spec.b * (g.in_degree_of(j) as f64).ln_1p() + spec.tau * z).exp();
            if rate <= 0.0 || !rate.is_finite() {
                return Err(Error::InvalidParameter(format!("surrogate rate {rate} for node {j}")));
            }
            let c: f64 = Poisson::new(rate)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?
                .sample(&mut rng);
            Ok(c.ln_1p())
        })
        .collect()
}

/// Which nodes are influential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Setting {
    /// Largest observed responses, with sign-mixed coefficients.
    TopResponse,
    /// Largest in-degrees.
    TopInDegree,
    /// Random members of the candidate set.
    RandomFromM,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::TopResponse, Setting::TopInDegree, Setting::RandomFromM];

    pub fn number(self) -> usize {
        match self {
            Setting::TopResponse => 1,
            Setting::TopInDegree => 2,
            Setting::RandomFromM => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsConfig {
    pub s1_size: usize,
    pub reps: usize,
    pub seed: u64,
    pub noise_sd: f64,
    #[serde(default)]
    pub fit: FitConfig,
}

impl Default for SettingsConfig {
    fn default() -> Self {
        SettingsConfig {
            s1_size: 8,
            reps: 100,
            seed: 1,
            noise_sd: 1.0,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingResult {
    pub setting: Setting,
    pub snir: StudyMetrics,
    pub response: StudyMetrics,
    pub topology: StudyMetrics,
}

/// Scores SNIR, the top-response rule and the top-in-degree rule on
/// `cfg.reps` datasets whose influential values are `y_obs[S1]`.
pub fn run_setting(g: &DirectedGraph, y_obs: &[f64], setting: Setting, cfg: &SettingsConfig) -> Result<SettingResult> {
    if y_obs.len() != g.n() {
        return Err(Error::InvalidParameter("observed response length differs from node count".into()));
    }
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let m_size = screen_candidates(g, &cfg.fit.screen)?.len();
    let n = g.n();
    let size = cfg.s1_size;
    let runs: Vec<[StudyMetrics; 3]> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| -> Result<[StudyMetrics; 3]> {
            let seed = seeding::mix(cfg.seed, rep as u64);
            let (mode, plan) = match setting {
                Setting::TopResponse => (TruthMode::TopResponse, RhoPlan::SignMixed),
                Setting::TopInDegree => (TruthMode::TopInDegree, RhoPlan::default()),
                Setting::RandomFromM => (TruthMode::RandomFromM, RhoPlan::default()),
            };
            let s1 = pick_truth(g, mode, size, seeding::mix(seed, 1), Some(y_obs), &cfg.fit.screen)?;
            let rho = plan.draw(size, &mut seeding::rng(seeding::mix(seed, 2)))?;
            let y_s1: Vec<f64> = s1.iter().map(|&j| y_obs[j]).collect();
            let noise = Noise::Gaussian { sd: cfg.noise_sd };
            let y = gen_conditional(g, &s1, &rho, &y_s1, &noise, seeding::mix(seed, 3))?;
            let mut truth = vec![0.0; n];
            for (&j, &r) in s1.iter().zip(&rho) {
                truth[j] = r;
            }
            let f = fit(g, &y, &cfg.fit).map_err(|e| Error::Replication {
                rep,
                source: Box::new(e),
            })?;
            let snir = metrics(&s1, &f.selected, &truth, &f.rho_full(n), m_size);
            let score_rule = |sel: Vec<usize>| {
                let est = match cmle(g, &y, &sel) {
                    Ok(c) => {
                        let mut v = vec![0.0; n];
                        c.coef.iter().for_each(|c| v[c.node] = c.rho);
                        v
                    }
                    Err(_) => vec![f64::NAN; n],
                };
                metrics(&s1, &sel, &truth, &est, m_size)
            };
            let response = score_rule(top_by_value(&y, size));
            let topology = score_rule(top_by_in_degree(g, size));
            Ok([snir, response, topology])
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| average(&runs.iter().map(|r| r[k]).collect::<Vec<_>>());
    Ok(SettingResult {
        setting,
        snir: col(0),
        response: col(1),
        topology: col(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::GeneratorSpec;

    #[test]
    fn surrogate_tracks_in_degree() {
        let g = GeneratorSpec::sbm(1500, 3).generate().unwrap();
        let y = surrogate_response(&g, &SurrogateSpec::default()).unwrap();
        assert!(y.iter().all(|v| v.is_finite() && *v >= 0.0));
        let top = top_by_in_degree(&g, 50);
        let mean_top = top.iter().map(|&j| y[j]).sum::<f64>() / 50.0;
        let mean_all = y.iter().sum::<f64>() / y.len() as f64;
        assert!(mean_top > mean_all + 1.0);
    }
}
