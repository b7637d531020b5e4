use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::design::{axpy, dot, RegressionDesign, RANK_TOL};
use super::ebic::{argmin_step, ebic};
use crate::error::{Error, Result};

/// RSS at or below this fraction of the starting RSS counts as a perfect fit.
pub const PERFECT_FIT: f64 = 1e-20;

/// Relative score gap within which two candidates are treated as tied
/// (the lower column index then wins).
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub step: usize,
    /// Node id of the pick.
    pub pick: usize,
    pub rss: f64,
    /// `-inf` once the response is fit exactly.
    pub ebic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionPath {
    pub steps: Vec<PathStep>,
    /// RSS of the empty model.
    pub rss0: f64,
    /// 1-based step minimizing EBIC.
    pub k_star: usize,
    /// Set when the path stopped before `K` steps.
    pub truncated: Option<String>,
}

impl SelectionPath {
    pub fn picks(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.pick).collect()
    }

    pub fn selected(&self) -> Vec<usize> {
        self.steps[..self.k_star].iter().map(|s| s.pick).collect()
    }

    pub fn ebic_trace(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.ebic).collect()
    }
}

/// Earliest step attaining the minimum EBIC.
pub fn select_model(path: &SelectionPath) -> Result<usize> {
    argmin_step(&path.ebic_trace()).ok_or_else(|| Error::EmptyPath("selection path has no steps".into()))
}

struct Candidate {
    norm2: f64,
    /// Sum of squared projections onto the current basis.
    proj2: f64,
    /// Projection coefficients onto each basis vector, in basis order.
    coefs: Vec<f64>,
    active: bool,
}

/// Greedy forward addition over the design's columns.
///
/// Step `k` adds the column that most reduces the residual sum of squares,
/// i.e. maximizes `(r·x)^2 / ||x_perp||^2` where `x_perp` is the column
/// orthogonalized against the columns already chosen. Columns whose
/// orthogonal part falls below `RANK_TOL` of their norm are skipped.
/// EBIC uses `m_size` candidate columns and `n_rows()` observations.
pub fn forward_addition(design: &RegressionDesign, k_max: usize) -> Result<SelectionPath> {
    let m = design.columns.len();
    let len = design.n_rows();
    if k_max == 0 || k_max > m || k_max >= len {
        return Err(Error::InvalidConfig(format!(
            "K = {k_max} must satisfy 1 <= K <= |M| = {m} and K < |M^c| = {len}"
        )));
    }
    let mut r = design.target.clone();
    let rss0 = dot(&r, &r);
    if rss0 == 0.0 {
        return Err(Error::DegenerateResponse("response is zero on all non-candidate rows".into()));
    }
    let mut cands: Vec<Candidate> = design
        .columns
        .iter()
        .map(|c| {
            let norm2 = c.norm2();
            Candidate {
                norm2,
                proj2: 0.0,
                coefs: Vec::with_capacity(k_max),
                active: norm2 > 0.0,
            }
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k_max);
    let mut steps = Vec::with_capacity(k_max);
    let mut truncated = None;

    for step in 1..=k_max {
        let scores: Vec<Option<f64>> = cands
            .par_iter_mut()
            .zip(design.columns.par_iter())
            .map(|(cand, col)| {
                if !cand.active {
                    return None;
                }
                let mut resid = cand.norm2 - cand.proj2;
                if resid < 1e-8 * cand.norm2 {
                    // cancellation: recompute the orthogonal part explicitly
                    let mut v = col.to_dense(len);
                    for (q, &c) in basis.iter().zip(&cand.coefs) {
                        axpy(-c, q, &mut v);
                    }
                    resid = dot(&v, &v);
                }
                if resid <= RANK_TOL * RANK_TOL * cand.norm2 {
                    return None;
                }
                let rx = col.dot(&r);
                Some(rx * rx / resid)
            })
            .collect();

        let mut best: Option<(usize, f64)> = None;
        for (c, s) in scores.iter().enumerate() {
            if let Some(s) = *s {
                match best {
                    Some((_, b)) if s <= b * (1.0 + TIE_TOL) => {}
                    _ => best = Some((c, s)),
                }
            }
        }
        let Some((pick, _)) = best else {
            let msg = format!("all remaining candidates are rank deficient at step {step}");
            warn!("forward addition truncated: {msg}");
            truncated = Some(msg);
            break;
        };

        // new orthonormal direction, orthogonalized twice
        let mut v = design.columns[pick].to_dense(len);
        for _ in 0..2 {
            for q in &basis {
                let d = dot(q, &v);
                axpy(-d, q, &mut v);
            }
        }
        let nv = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= nv);
        let d = dot(&v, &r);
        axpy(-d, &v, &mut r);
        cands[pick].active = false;
        cands
            .par_iter_mut()
            .zip(design.columns.par_iter())
            .filter(|(c, _)| c.active)
            .for_each(|(cand, col)| {
                let c = col.dot(&v);
                cand.proj2 += c * c;
                cand.coefs.push(c);
            });
        basis.push(v);

        let rss = dot(&r, &r);
        let perfect = rss <= PERFECT_FIT * rss0;
        let e = if perfect {
            f64::NEG_INFINITY
        } else {
            ebic(rss, step, m, len)?
        };
        steps.push(PathStep {
            step,
            pick: design.nodes[pick],
            rss,
            ebic: e,
        });
        if perfect {
            if step < k_max {
                truncated = Some(format!("perfect fit reached at step {step}"));
            }
            break;
        }
    }

    if steps.is_empty() {
        return Err(Error::EmptyPath(
            truncated.unwrap_or_else(|| "no candidate could be selected".into()),
        ));
    }
    let k_star = argmin_step(&steps.iter().map(|s| s.ebic).collect::<Vec<_>>()).unwrap_or(1);
    Ok(SelectionPath {
        steps,
        rss0,
        k_star,
        truncated,
    })
}
