//! The SNIR estimator: in-degree screening, forward addition with EBIC,
//! conditional least-squares coefficients and their inference.

mod cmle;
mod design;
mod diagnostics;
mod ebic;
mod forward;
mod gof;
mod objective;
mod screen;

pub use cmle::{cmle, cmle_on_rows, normal_two_sided, CmleFit, Coefficient, RCOND_TOL};
pub use design::{DesignContext, RegressionDesign, SparseColumn, RANK_TOL};
pub use diagnostics::{condition_check, ConditionSummary, EigenRange};
pub use ebic::{argmin_step, ebic};
pub use forward::{forward_addition, select_model, PathStep, SelectionPath, PERFECT_FIT};
pub use gof::{r_squared, GoodnessOfFit};
pub use objective::{full_objective, Objective};
pub use screen::{floor_pow, screen_candidates, ScreenConfig, ScreenSize};

pub(crate) use gof::design_r_squared;
pub(crate) use screen::top_by_in_degree;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;

/// Exponent of the default number of forward-addition steps, `N^(5/9)`.
pub const K_EXPONENT: f64 = 5.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FitConfig {
    pub screen: ScreenConfig,
    /// Lower bound on the number of forward-addition steps; the default
    /// `floor(N^(5/9))` applies when larger.
    pub k: Option<usize>,
}

impl FitConfig {
    /// Number of forward-addition steps for `n` nodes, `m` candidates and
    /// `mc` observation rows.
    pub fn resolve_k(&self, n: usize, m: usize, mc: usize) -> usize {
        let base = floor_pow(n, K_EXPONENT).max(self.k.unwrap_or(0)).max(1);
        base.min(m).min(mc.saturating_sub(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Selected nodes in order of selection.
    pub selected: Vec<usize>,
    pub coef: Vec<Coefficient>,
    pub sigma2: f64,
    pub r2: f64,
    pub adj_r2: f64,
    pub path: SelectionPath,
    pub m_size: usize,
    pub k: usize,
}

impl FitResult {
    pub fn rho(&self) -> Vec<f64> {
        self.coef.iter().map(|c| c.rho).collect()
    }

    /// Coefficients embedded in a length-`n` vector, zero off the support.
    pub fn rho_full(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for c in &self.coef {
            out[c.node] = c.rho;
        }
        out
    }

    /// JSON report with node ids replaced by graph labels.
    pub fn report(&self, g: &DirectedGraph) -> Value {
        let label = |i: usize| g.label(i).into_owned();
        json!({
            "path": self.path.steps.iter().map(|s| json!({
                "step": s.step,
                "pick": label(s.pick),
                "rss": s.rss,
                "ebic": finite_or_null(s.ebic),
            })).collect::<Vec<_>>(),
            "k_star": self.path.k_star,
            "selected": self.selected.iter().map(|&j| label(j)).collect::<Vec<_>>(),
            "coef": self.coef.iter().map(|c| json!({
                "node": label(c.node),
                "rho": c.rho,
                "se": c.se,
                "t": finite_or_null(c.t),
                "p": c.p,
            })).collect::<Vec<_>>(),
            "r2": self.r2,
            "adj_r2": self.adj_r2,
            "sigma2": self.sigma2,
        })
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub(crate) fn check_response(y: &[f64], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("{} responses for {n} nodes", y.len())));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("response of node {i} is not finite")));
    }
    if y.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateResponse("response is identically zero".into()));
    }
    Ok(())
}

/// Screen, select by forward addition and EBIC, then estimate by CMLE.
pub fn fit(g: &DirectedGraph, y: &[f64], cfg: &FitConfig) -> Result<FitResult> {
    fit_adjusted(g, y, y, cfg)
}

/// [`fit`] with the regression targets taken from `y_adj` while the
/// influence columns `A[., j] * y[j]` keep the observed `y`. Used when an
/// additive term such as `Z beta` has been removed from the response.
pub fn fit_adjusted(g: &DirectedGraph, y: &[f64], y_adj: &[f64], cfg: &FitConfig) -> Result<FitResult> {
    let n = g.n();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 nodes, got {n}")));
    }
    check_response(y, n)?;
    check_response(y_adj, n)?;
    // Rows never include conditioning nodes and columns only read them, so
    // one merged vector serves both roles.
    let merged = |keep: &[usize]| {
        let mut v = y_adj.to_vec();
        keep.iter().for_each(|&j| v[j] = y[j]);
        v
    };
    let m = screen_candidates(g, &cfg.screen).map_err(|e| e.at("screen"))?;
    let ym = merged(&m);
    let ctx = DesignContext::new(g, &ym, &m).map_err(|e| e.at("design"))?;
    let k = cfg.resolve_k(n, ctx.m_size(), ctx.mc_size());
    let path = forward_addition(&ctx.design, k).map_err(|e| e.at("forward addition"))?;
    let selected = path.selected();
    let est = cmle(g, &merged(&selected), &selected).map_err(|e| e.at("cmle"))?;
    let gof = r_squared(&ctx, &selected).map_err(|e| e.at("goodness of fit"))?;
    Ok(FitResult {
        selected,
        coef: est.coef,
        sigma2: est.sigma2,
        r2: gof.r2,
        adj_r2: gof.adj_r2,
        path,
        m_size: ctx.m_size(),
        k,
    })
}

/// Forward addition and EBIC over the regression of `y[rows]` on the
/// influence columns of `candidates`, finished by CMLE on the nodes of
/// `pool` outside the selection (as [`fit`] does with all nodes).
/// `pool.len()` sets the default number of steps, `floor(n^(5/9))`.
pub fn fit_on_rows(
    g: &DirectedGraph,
    y: &[f64],
    rows: &[usize],
    candidates: &[usize],
    pool: &[usize],
    cfg: &FitConfig,
) -> Result<FitResult> {
    check_response(y, g.n())?;
    let design = RegressionDesign::build(g, y, rows, candidates);
    let m = design.columns.len();
    if m == 0 {
        return Err(Error::InvalidConfig("no candidate columns".into()));
    }
    let k = cfg.resolve_k(pool.len(), m, design.n_rows());
    let path = forward_addition(&design, k).map_err(|e| e.at("forward addition"))?;
    let selected = path.selected();
    let cmle_rows: Vec<usize> = pool.iter().copied().filter(|i| !selected.contains(i)).collect();
    let est = cmle_on_rows(g, y, &selected, &cmle_rows).map_err(|e| e.at("cmle"))?;
    let gof = design_r_squared(&design, &selected).map_err(|e| e.at("goodness of fit"))?;
    Ok(FitResult {
        selected,
        coef: est.coef,
        sigma2: est.sigma2,
        r2: gof.r2,
        adj_r2: gof.adj_r2,
        path,
        m_size: m,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star_instance() -> (DirectedGraph, Vec<f64>) {
        // node 0 has 6 followers, node 1 has 4, node 2 has 2; only node 0 is influential
        let mut e = Vec::new();
        for f in 3..9 {
            e.push((f, 0));
        }
        for f in 9..13 {
            e.push((f, 1));
        }
        for f in 13..15 {
            e.push((f, 2));
        }
        let g = DirectedGraph::from_edges(15, e).unwrap();
        let mut y = vec![0.0; 15];
        y[0] = 5.0;
        y[1] = 3.0;
        y[2] = 2.0;
        for f in 3..9 {
            y[f] = 2.5;
        }
        (g, y)
    }

    #[test]
    fn noiseless_single_influencer_fit() {
        let (g, y) = star_instance();
        let r = fit(&g, &y, &FitConfig::default()).unwrap();
        assert_eq!(r.selected, vec![0]);
        assert!((r.coef[0].rho - 0.5).abs() < 1e-12);
        assert!((r.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_response_is_degenerate() {
        let (g, _) = star_instance();
        let err = fit(&g, &vec![0.0; 15], &FitConfig::default()).unwrap_err();
        assert!(matches!(err.root(), Error::DegenerateResponse(_)));
    }

    #[test]
    fn report_uses_labels_and_sorted_keys() {
        let (g, y) = star_instance();
        let labels = (0..15).map(|i| format!("u{i}")).collect();
        let g = g.with_labels(labels).unwrap();
        let r = fit(&g, &y, &FitConfig::default()).unwrap();
        let v = r.report(&g);
        assert_eq!(v["selected"][0], "u0");
        assert_eq!(v["coef"][0]["node"], "u0");
        let text = serde_json::to_string(&v).unwrap();
        let keys: Vec<&str> = ["adj_r2", "coef", "k_star", "path", "r2", "selected", "sigma2"].to_vec();
        let mut last = 0;
        for k in keys {
            let at = text.find(&format!("\"{k}\":")).unwrap();
            assert!(at >= last, "{k} out of order");
            last = at;
        }
    }

    #[test]
    fn k_resolution() {
        let cfg = FitConfig::default();
        assert_eq!(cfg.resolve_k(2500, 184, 2316), 77);
        assert_eq!(cfg.resolve_k(2500, 50, 2450), 50);
        assert_eq!(cfg.resolve_k(15, 6, 4), 3);
        let cfg = FitConfig { k: Some(100), ..cfg };
        assert_eq!(cfg.resolve_k(2500, 184, 2316), 100);
    }
}
