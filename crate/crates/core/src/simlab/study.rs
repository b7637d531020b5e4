use std::time::Instant;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{average, linf_diff, metrics, StudyMetrics};
use super::truth::{gen_snir_data, heteroskedastic_sd, pick_truth, Noise, RhoPlan, TruthMode, TruthSpec};
use crate::error::{Error, Result};
use crate::ext::fit_with_covariates;
use crate::netcore::{DirectedGraph, GeneratorSpec};
use crate::seeding;
use crate::snir::{fit, FitConfig, FitResult};

/// Failed replications are redrawn at most this many times.
pub const MAX_REDRAWS: usize = 5;

/// Exogenous covariates `Z_i ~ N(0, Sigma)`, `Sigma_kl = ar^|k-l|`, entering
/// the response as `Z beta`; profiled out before fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariatePlan {
    pub p: usize,
    pub ar: f64,
    pub beta: Vec<f64>,
}

impl CovariatePlan {
    pub fn ar(p: usize, ar: f64) -> Self {
        CovariatePlan {
            p,
            ar,
            beta: vec![1.0; p],
        }
    }

    pub fn draw(&self, n: usize, rng: &mut seeding::Rng) -> Result<DMatrix<f64>> {
        if self.beta.len() != self.p {
            return Err(Error::InvalidConfig("beta length differs from covariate count".into()));
        }
        let sigma = DMatrix::from_fn(self.p, self.p, |a, b| self.ar.powi((a as i32 - b as i32).abs()));
        let l = sigma
            .cholesky()
            .ok_or_else(|| Error::InvalidConfig(format!("AR({}) covariance is not positive definite", self.ar)))?
            .l();
        let mut z = DMatrix::zeros(n, self.p);
        for i in 0..n {
            let u = DVector::from_iterator(self.p, (0..self.p).map(|_| StandardNormal.sample(rng)));
            let row = &l * u;
            for k in 0..self.p {
                z[(i, k)] = row[k];
            }
        }
        Ok(z)
    }
}

/// How each replication's truth is drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthPlan {
    pub s1_size: usize,
    #[serde(default)]
    pub rho: RhoPlan,
    pub mu: f64,
    pub noise_sd: f64,
    /// Per-node standard deviations from `U(lo, hi)` instead of `noise_sd`.
    #[serde(default)]
    pub heteroskedastic: Option<(f64, f64)>,
    #[serde(default)]
    pub covariates: Option<CovariatePlan>,
}

impl TruthPlan {
    /// Coefficients from `U(0.5, 1)`, `mu = 5`, standard normal errors.
    pub fn standard(s1_size: usize) -> Self {
        TruthPlan {
            s1_size,
            rho: RhoPlan::default(),
            mu: 5.0,
            noise_sd: 1.0,
            heteroskedastic: None,
            covariates: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub generator: GeneratorSpec,
    pub truth: TruthPlan,
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub fit: FitConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub metrics: StudyMetrics,
    /// `max_j |rho_hat_j - rho_j|` over all nodes.
    pub err_inf: f64,
    /// Whether every influential node was selected.
    pub superset: bool,
    pub secs: f64,
    pub redraws: usize,
    pub s1: Vec<usize>,
    pub selected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub n: usize,
    pub s1_size: usize,
    pub metrics: StudyMetrics,
    pub secs_per_fit: f64,
    pub redraws: usize,
    pub reps: Vec<RepRecord>,
}

/// One results row: `N, TPR, FPR, CFP, Err, secs_per_fit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "TPR")]
    pub tpr: f64,
    #[serde(rename = "FPR")]
    pub fpr: f64,
    #[serde(rename = "CFP")]
    pub cfp: f64,
    #[serde(rename = "Err")]
    pub err: f64,
    pub secs_per_fit: f64,
}

impl StudyResult {
    pub fn row(&self) -> StudyRow {
        StudyRow {
            n: self.n,
            tpr: self.metrics.tpr,
            fpr: self.metrics.fpr,
            cfp: self.metrics.cfp,
            err: self.metrics.err,
            secs_per_fit: self.secs_per_fit,
        }
    }
}

/// A generated dataset with its truth.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: DirectedGraph,
    pub truth: TruthSpec,
    /// Observed response.
    pub y: Vec<f64>,
    /// Covariates to profile out before fitting.
    pub z: Option<DMatrix<f64>>,
}

impl Dataset {
    pub fn fit(&self, cfg: &FitConfig) -> Result<FitResult> {
        match &self.z {
            Some(z) => fit_with_covariates(&self.graph, &self.y, z, cfg),
            None => fit(&self.graph, &self.y, cfg),
        }
    }
}

/// Draws the network, truth and response for one attempt seed.
pub fn draw_dataset(generator: &GeneratorSpec, plan: &TruthPlan, screen_fit: &FitConfig, seed: u64) -> Result<Dataset> {
    let graph = generator.with_seed(seeding::mix(seed, 1)).generate()?;
    let n = graph.n();
    let s1 = pick_truth(
        &graph,
        TruthMode::RandomFromM,
        plan.s1_size,
        seeding::mix(seed, 2),
        None,
        &screen_fit.screen,
    )?;
    let rho = plan.rho.draw(s1.len(), &mut seeding::rng(seeding::mix(seed, 3)))?;
    let noise = match plan.heteroskedastic {
        Some((lo, hi)) => Noise::PerNode {
            sd: heteroskedastic_sd(n, lo, hi, &mut seeding::rng(seeding::mix(seed, 4))),
        },
        None => Noise::Gaussian { sd: plan.noise_sd },
    };
    let z = match &plan.covariates {
        Some(c) => Some(c.draw(n, &mut seeding::rng(seeding::mix(seed, 5)))?),
        None => None,
    };
    let shift = match (&z, &plan.covariates) {
        (Some(z), Some(c)) => (z * DVector::from_column_slice(&c.beta)).iter().copied().collect(),
        _ => Vec::new(),
    };
    let truth = TruthSpec {
        s1,
        rho,
        mu: plan.mu,
        noise,
        shift,
    };
    let y = gen_snir_data(&graph, &truth, seeding::mix(seed, 6))?;
    Ok(Dataset { graph, truth, y, z })
}

fn run_rep(cfg: &StudyConfig, rep: usize) -> Result<RepRecord> {
    let rep_seed = seeding::mix(cfg.seed, rep as u64);
    let mut last = None;
    for attempt in 0..=MAX_REDRAWS {
        let seed = seeding::mix(rep_seed, attempt as u64);
        let outcome = draw_dataset(&cfg.generator, &cfg.truth, &cfg.fit, seed).and_then(|d| {
            let start = Instant::now();
            let f = d.fit(&cfg.fit)?;
            let secs = start.elapsed().as_secs_f64();
            let n = d.graph.n();
            let truth_full = d.truth.rho_full(n);
            let hat_full = f.rho_full(n);
            Ok(RepRecord {
                metrics: metrics(&d.truth.s1, &f.selected, &truth_full, &hat_full, f.m_size),
                err_inf: linf_diff(&truth_full, &hat_full),
                superset: d.truth.s1.iter().all(|j| f.selected.contains(j)),
                secs,
                redraws: attempt,
                s1: d.truth.s1,
                selected: f.selected,
            })
        });
        match outcome {
            Ok(r) => return Ok(r),
            Err(e) => {
                warn!("replication {rep} attempt {attempt} failed: {e}");
                last = Some(e);
            }
        }
    }
    Err(Error::Replication {
        rep,
        source: Box::new(last.expect("at least one attempt")),
    })
}

/// Runs `reps` independent replications (in parallel) and averages them.
/// Replication `r` draws everything from `mix(seed, r)`.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyResult> {
    if cfg.reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let reps: Vec<RepRecord> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| run_rep(cfg, r))
        .collect::<Result<_>>()?;
    let ms: Vec<StudyMetrics> = reps.iter().map(|r| r.metrics).collect();
    Ok(StudyResult {
        n: cfg.generator.n,
        s1_size: cfg.truth.s1_size,
        metrics: average(&ms),
        secs_per_fit: reps.iter().map(|r| r.secs).sum::<f64>() / reps.len() as f64,
        redraws: reps.iter().map(|r| r.redraws).sum(),
        reps,
    })
}
