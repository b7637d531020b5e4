use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netcore::{betweenness, harmonic, DirectedGraph};
use crate::snir::{fit, FitConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Snir,
    InDegree,
    Response,
    Betweenness,
    Harmonic,
}

impl RuleKind {
    pub const ALL: [RuleKind; 5] = [
        RuleKind::Snir,
        RuleKind::InDegree,
        RuleKind::Response,
        RuleKind::Betweenness,
        RuleKind::Harmonic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Snir => "snir",
            RuleKind::InDegree => "in_degree",
            RuleKind::Response => "response",
            RuleKind::Betweenness => "betweenness",
            RuleKind::Harmonic => "harmonic",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown rule '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRule {
    pub kind: RuleKind,
    pub size: usize,
}

/// Indices of the `size` largest scores, ties broken by ascending index,
/// in rank order.
pub fn top_by_score(score: &[f64], size: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..score.len()).collect();
    idx.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    idx.truncate(size);
    idx
}

/// Node set chosen by `rule`, in rank order.
///
/// The SNIR rule returns the first `size` forward-addition picks, which is
/// the EBIC-selected set when `size` equals its size.
pub fn select_by_rule(g: &DirectedGraph, y: &[f64], rule: SelectionRule, cfg: &FitConfig) -> Result<Vec<usize>> {
    let n = g.n();
    if rule.size == 0 || rule.size > n {
        return Err(Error::InvalidConfig(format!(
            "selection size {} must be in 1..={n}",
            rule.size
        )));
    }
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("{} responses for {n} nodes", y.len())));
    }
    let score: Vec<f64> = match rule.kind {
        RuleKind::Snir => {
            let f = fit(g, y, cfg)?;
            let picks = f.path.picks();
            if picks.len() < rule.size {
                return Err(Error::InvalidConfig(format!(
                    "selection path has {} steps, fewer than {}",
                    picks.len(),
                    rule.size
                )));
            }
            return Ok(picks[..rule.size].to_vec());
        }
        RuleKind::InDegree => g.in_degree().into_iter().map(|d| d as f64).collect(),
        RuleKind::Response => y.to_vec(),
        RuleKind::Betweenness => betweenness(g),
        RuleKind::Harmonic => harmonic(g),
    };
    Ok(top_by_score(&score, rule.size))
}
