use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::rules::{select_by_rule, RuleKind, SelectionRule};
use crate::error::{Error, Result};
use crate::netcore::{follower_loss, DirectedGraph};
use crate::snir::{cmle, fit, FitConfig};

/// Share of the total response lost when `s` is removed: the responses of
/// `s` themselves plus the influence of `s` on everyone else,
/// `(sum_(j in s) Y_j + sum_(i not in s) sum_(j in s) a_ij rho_j Y_j) / sum_i Y_i`.
///
/// `rho` is aligned with `s`. Values outside `[0, 1]` are clipped.
pub fn response_loss(g: &DirectedGraph, y: &[f64], s: &[usize], rho: &[f64]) -> Result<f64> {
    let n = g.n();
    if s.is_empty() {
        return Err(Error::InvalidConfig("selected set is empty".into()));
    }
    if rho.len() != s.len() {
        return Err(Error::InvalidParameter(format!("{} coefficients for {} nodes", rho.len(), s.len())));
    }
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("{} responses for {n} nodes", y.len())));
    }
    let total: f64 = y.iter().sum();
    if total == 0.0 || !total.is_finite() {
        return Err(Error::DegenerateTotal);
    }
    let mut in_s = vec![false; n];
    for &j in s {
        if j >= n {
            return Err(Error::InvalidParameter(format!("node {j} out of range")));
        }
        in_s[j] = true;
    }
    let mut lost = 0.0;
    let mut seen = vec![false; n];
    for (&j, &r) in s.iter().zip(rho) {
        if std::mem::replace(&mut seen[j], true) {
            continue;
        }
        lost += y[j];
        let reach = g.in_neighbors(j).iter().filter(|&&i| !in_s[i]).count();
        lost += r * y[j] * reach as f64;
    }
    let share = lost / total;
    if !(0.0..=1.0).contains(&share) {
        warn!("response loss {share} outside [0, 1]; clipped");
    }
    Ok(share.clamp(0.0, 1.0))
}

/// CMLE coefficients for `s`, aligned with `s`. Nodes whose influence
/// column is zero or spanned by earlier ones get zero; the fitted values,
/// and so the response loss, do not depend on that choice.
pub fn identifiable_rho(g: &DirectedGraph, y: &[f64], s: &[usize]) -> Result<Vec<f64>> {
    let mut keep: Vec<usize> = s.to_vec();
    loop {
        if keep.is_empty() {
            return Ok(vec![0.0; s.len()]);
        }
        match cmle(g, y, &keep) {
            Ok(est) => {
                return Ok(s
                    .iter()
                    .map(|j| est.coef.iter().find(|c| c.node == *j).map_or(0.0, |c| c.rho))
                    .collect())
            }
            Err(Error::SingularDesign { node }) => keep.retain(|&j| j != node),
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodImpact {
    pub kind: RuleKind,
    pub selected: Vec<usize>,
    pub delta_r: f64,
    pub delta_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpactReport {
    pub size: usize,
    pub methods: Vec<MethodImpact>,
}

impl ImpactReport {
    pub fn get(&self, kind: RuleKind) -> Option<&MethodImpact> {
        self.methods.iter().find(|m| m.kind == kind)
    }

    /// `{"rule": {"selected": [labels], "delta_R": .., "delta_F": ..}}`.
    pub fn report(&self, g: &DirectedGraph) -> Value {
        let mut out = Map::new();
        for m in &self.methods {
            out.insert(
                m.kind.name().to_string(),
                json!({
                    "selected": m.selected.iter().map(|&j| g.label(j).into_owned()).collect::<Vec<_>>(),
                    "delta_R": m.delta_r,
                    "delta_F": m.delta_f,
                }),
            );
        }
        Value::Object(out)
    }
}

/// Runs all five selection rules at a common size and scores each set by
/// response loss (with its own CMLE coefficients) and follower loss.
///
/// `size` defaults to the size of the EBIC-selected SNIR set.
pub fn compare_methods(g: &DirectedGraph, y: &[f64], size: Option<usize>, cfg: &FitConfig) -> Result<ImpactReport> {
    if size == Some(0) {
        return Err(Error::InvalidConfig("selection size must be at least 1".into()));
    }
    let base = fit(g, y, cfg).map_err(|e| e.at("snir"))?;
    let size = size.unwrap_or(base.selected.len());
    let methods = RuleKind::ALL
        .par_iter()
        .map(|&kind| -> Result<MethodImpact> {
            let stage = kind.name();
            let (selected, rho) = if kind == RuleKind::Snir && size == base.selected.len() {
                (base.selected.clone(), base.rho())
            } else {
                let s = select_by_rule(g, y, SelectionRule { kind, size }, cfg).map_err(|e| e.at(stage))?;
                let rho = identifiable_rho(g, y, &s).map_err(|e| e.at(stage))?;
                (s, rho)
            };
            Ok(MethodImpact {
                kind,
                delta_r: response_loss(g, y, &selected, &rho).map_err(|e| e.at(stage))?,
                delta_f: follower_loss(g, &selected).map_err(|e| e.at(stage))?,
                selected,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpactReport { size, methods })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_set_loses_everything() {
        let g = DirectedGraph::from_edges(3, [(1, 0), (2, 0)]).unwrap();
        let y = [2.0, 1.0, 1.0];
        assert_eq!(response_loss(&g, &y, &[0, 1, 2], &[0.5, 0.1, 0.1]).unwrap(), 1.0);
    }

    #[test]
    fn single_influencer_closed_form() {
        // node 0 (Y = 5) followed by 1..=4 with Y = 2.5 each, node 5 isolated with Y = 1
        let g = DirectedGraph::from_edges(6, [(1, 0), (2, 0), (3, 0), (4, 0)]).unwrap();
        let y = [5.0, 2.5, 2.5, 2.5, 2.5, 1.0];
        let got = response_loss(&g, &y, &[0], &[0.5]).unwrap();
        assert!((got - (5.0 + 4.0 * 2.5) / 16.0).abs() < 1e-15);
    }

    #[test]
    fn zero_total_and_empty_set() {
        let g = DirectedGraph::from_edges(2, [(1, 0)]).unwrap();
        assert!(matches!(response_loss(&g, &[1.0, -1.0], &[0], &[0.1]), Err(Error::DegenerateTotal)));
        assert!(response_loss(&g, &[1.0, 1.0], &[], &[]).is_err());
    }

    #[test]
    fn unidentifiable_nodes_get_zero() {
        // node 2 has no followers outside the set, node 3 duplicates node 0
        let g = DirectedGraph::from_edges(9, [(4, 0), (5, 0), (4, 3), (5, 3), (6, 1)]).unwrap();
        let y = [2.0, 1.0, 3.0, 4.0, 1.0, 1.2, 0.7, 0.1, -0.2];
        let rho = identifiable_rho(&g, &y, &[0, 1, 2, 3]).unwrap();
        assert_eq!(rho[2], 0.0);
        assert_eq!(rho[3], 0.0);
        assert!((rho[0] - 1.1 / 2.0).abs() < 1e-12);
        assert!((rho[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn zero_size_is_a_config_error() {
        let g = DirectedGraph::from_edges(3, [(1, 0)]).unwrap();
        assert!(matches!(
            compare_methods(&g, &[1.0, 1.0, 1.0], Some(0), &FitConfig::default()),
            Err(Error::InvalidConfig(_))
        ));
    }
}
