//! Extensions of the basic fit: covariate profiling, a two-period dynamic
//! model and aggregation of selections across candidate-set choices.

use std::collections::BTreeMap;

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;
use crate::snir::{fit_adjusted, fit_on_rows, FitConfig, FitResult};

/// Removes the least-squares projection of `y` onto the columns of `z`:
/// `y - Z (Z^T Z)^-1 Z^T y`.
pub fn profile_covariates(y: &[f64], z: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (n, p) = z.shape();
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("{} responses for {n} covariate rows", y.len())));
    }
    if p == 0 {
        return Ok(y.to_vec());
    }
    if p >= n {
        return Err(Error::SingularCovariates);
    }
    // thin QR: Q spans the column space when Z has full rank
    let qr = z.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|k| z.column(k).norm()).fold(0.0f64, f64::max);
    if (0..p).any(|k| !(r[(k, k)].abs() > 1e-10 * scale.max(f64::MIN_POSITIVE))) {
        return Err(Error::SingularCovariates);
    }
    let q = qr.q();
    let yv = DVector::from_column_slice(y);
    let mut out = yv.clone();
    for _ in 0..2 {
        let coef = q.transpose() * &out;
        out -= &q * coef;
    }
    Ok(out.iter().copied().collect())
}

/// Assignment of nodes to two posting periods.
/// Fit after profiling `z` out of the response. The influence columns keep
/// the observed `y[j]`, which is what enters the model as a regressor.
pub fn fit_with_covariates(g: &DirectedGraph, y: &[f64], z: &DMatrix<f64>, cfg: &FitConfig) -> Result<FitResult> {
    let y_star = profile_covariates(y, z)?;
    fit_adjusted(g, y, &y_star, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSplit {
    pub j1: Vec<usize>,
    pub j2: Vec<usize>,
    /// Candidates posting in period 1 (subset of `j1`).
    pub m1: Vec<usize>,
    /// Candidates posting in period 2 (subset of `j2`).
    pub m2: Vec<usize>,
}

impl PeriodSplit {
    /// Splits nodes by period label (1 or 2) and assigns each candidate in
    /// `candidates` to its own period.
    pub fn from_periods(periods: &[u8], candidates: &[usize]) -> Result<Self> {
        let mut split = PeriodSplit {
            j1: Vec::new(),
            j2: Vec::new(),
            m1: Vec::new(),
            m2: Vec::new(),
        };
        for (i, &p) in periods.iter().enumerate() {
            match p {
                1 => split.j1.push(i),
                2 => split.j2.push(i),
                other => {
                    return Err(Error::InvalidParameter(format!("node {i} has period {other}, expected 1 or 2")))
                }
            }
        }
        let mut cands = candidates.to_vec();
        cands.sort_unstable();
        cands.dedup();
        for j in cands {
            match periods.get(j) {
                Some(1) => split.m1.push(j),
                Some(2) => split.m2.push(j),
                _ => return Err(Error::InvalidParameter(format!("candidate {j} out of range"))),
            }
        }
        Ok(split)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![0u8; n];
        for (set, tag) in [(&self.j1, 1u8), (&self.j2, 2u8)] {
            for &i in set {
                if i >= n {
                    return Err(Error::InvalidParameter(format!("node {i} out of range")));
                }
                if seen[i] != 0 {
                    return Err(Error::InvalidParameter(format!("node {i} assigned to both periods")));
                }
                seen[i] = tag;
            }
        }
        if seen.contains(&0) {
            return Err(Error::InvalidParameter("periods do not cover every node".into()));
        }
        for (set, tag) in [(&self.m1, 1u8), (&self.m2, 2u8)] {
            if let Some(&j) = set.iter().find(|&&j| j >= n || seen[j] != tag) {
                return Err(Error::InvalidParameter(format!(
                    "candidate {j} does not belong to period {tag}"
                )));
            }
        }
        Ok(())
    }

    fn rows(j: &[usize], m: &[usize], n: usize) -> Vec<usize> {
        let mut cand = vec![false; n];
        m.iter().for_each(|&i| cand[i] = true);
        let mut rows: Vec<usize> = j.iter().copied().filter(|&i| !cand[i]).collect();
        rows.sort_unstable();
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicFit {
    /// `None` when the period has no candidates or no rows.
    pub period1: Option<FitResult>,
    pub period2: Option<FitResult>,
}

/// Two-period fit. Period 1 regresses the non-candidate period-1 nodes on
/// period-1 candidates; period 2 regresses the non-candidate period-2 nodes
/// on the candidates of both periods.
pub fn dynamic_fit(g: &DirectedGraph, y: &[f64], split: &PeriodSplit, cfg: &FitConfig) -> Result<DynamicFit> {
    let n = g.n();
    split.validate(n)?;
    let rows1 = PeriodSplit::rows(&split.j1, &split.m1, n);
    let rows2 = PeriodSplit::rows(&split.j2, &split.m2, n);
    let mut pool2: Vec<usize> = split.m1.iter().chain(&split.m2).copied().collect();
    pool2.sort_unstable();

    let run = |period: usize, rows: &[usize], cands: &[usize], pool: &[usize]| -> Result<Option<FitResult>> {
        if cands.is_empty() || rows.is_empty() {
            warn!("period {period} has no candidates or no observation rows; skipping");
            return Ok(None);
        }
        let stage = if period == 1 { "period 1" } else { "period 2" };
        fit_on_rows(g, y, rows, cands, pool, cfg).map(Some).map_err(|e| e.at(stage))
    };
    let (p1, p2) = rayon::join(
        || run(1, &rows1, &split.m1, &split.j1),
        || run(2, &rows2, &pool2, &split.j2),
    );
    Ok(DynamicFit {
        period1: p1?,
        period2: p2?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateRule {
    /// Nodes present in more than half of the sets.
    Majority,
    Union,
}

/// Combines selections, e.g. from several candidate-set sizes. The result
/// is sorted.
pub fn aggregate_sets<T: Ord + Clone>(sets: &[Vec<T>], rule: AggregateRule) -> Vec<T> {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for set in sets {
        let mut uniq = set.clone();
        uniq.sort();
        uniq.dedup();
        for v in uniq {
            *counts.entry(v).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, c)| match rule {
            AggregateRule::Union => true,
            AggregateRule::Majority => 2 * c > sets.len(),
        })
        .map(|(v, _)| v)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiling_on_ones_centers() {
        let y = [1.0, 2.0, 6.0];
        let z = DMatrix::from_element(3, 1, 1.0);
        let out = profile_covariates(&y, &z).unwrap();
        for (a, b) in out.iter().zip([-2.0, -1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spanned_response_profiles_to_zero() {
        let z = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = [3.0, 5.0, 7.0, 9.0];
        let out = profile_covariates(&y, &z).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rank_deficient_covariates() {
        let z = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert!(matches!(profile_covariates(&[1.0, 2.0, 3.0], &z), Err(Error::SingularCovariates)));
    }

    #[test]
    fn covariate_fit_keeps_observed_regressors() {
        use crate::netcore::GeneratorSpec;
        use crate::simlab::{draw_dataset, CovariatePlan, TruthPlan};
        let plan = TruthPlan {
            noise_sd: 1e-6,
            covariates: Some(CovariatePlan::ar(2, 0.5)),
            ..TruthPlan::standard(3)
        };
        let cfg = FitConfig::default();
        let d = draw_dataset(&GeneratorSpec::er(2000, 0), &plan, &cfg, 5).unwrap();
        let f = fit_with_covariates(&d.graph, &d.y, d.z.as_ref().unwrap(), &cfg).unwrap();
        let mut sel = f.selected.clone();
        sel.sort_unstable();
        let mut s1 = d.truth.s1.clone();
        s1.sort_unstable();
        assert_eq!(sel, s1);
        let truth = d.truth.rho_full(2000);
        for c in &f.coef {
            // beta-hat error is O(N^-1/2), so allow a loose tolerance
            assert!((c.rho - truth[c.node]).abs() < 0.05, "{} vs {}", c.rho, truth[c.node]);
        }
    }

    #[test]
    fn aggregate_examples() {
        let sets = vec![vec!['A', 'B'], vec!['A'], vec!['A', 'C']];
        assert_eq!(aggregate_sets(&sets, AggregateRule::Majority), vec!['A']);
        assert_eq!(aggregate_sets(&sets, AggregateRule::Union), vec!['A', 'B', 'C']);
        let one = vec![vec![3, 1]];
        assert_eq!(aggregate_sets(&one, AggregateRule::Majority), vec![1, 3]);
        assert_eq!(aggregate_sets(&one, AggregateRule::Union), vec![1, 3]);
    }

    #[test]
    fn split_validation() {
        let s = PeriodSplit::from_periods(&[1, 1, 2, 2], &[0, 2]).unwrap();
        assert_eq!(s.m1, vec![0]);
        assert_eq!(s.m2, vec![2]);
        assert!(s.validate(4).is_ok());
        let bad = PeriodSplit {
            j1: vec![0, 1],
            j2: vec![1, 2, 3],
            m1: vec![],
            m2: vec![],
        };
        assert!(bad.validate(4).is_err());
        assert!(PeriodSplit::from_periods(&[1, 3], &[]).is_err());
    }
}
