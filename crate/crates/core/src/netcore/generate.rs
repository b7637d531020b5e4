use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::DirectedGraph;
use crate::error::{Error, Result};
use crate::seeding::{self, Rng};

/// Network family and its parameters. `None` fields take the size-dependent
/// defaults used by the synthetic studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GeneratorKind {
    /// Default edge probability `0.5 n^-0.8`.
    Er { p: Option<f64> },
    /// Defaults: 5 blocks, `p_in = n^-0.8`, `p_out = 0.5 n^-0.8`.
    Sbm {
        blocks: Option<usize>,
        p_in: Option<f64>,
        p_out: Option<f64>,
    },
    /// In-degrees from `P(k) ∝ k^-alpha` on `1..=max_degree` (default `n - 1`).
    #[serde(rename = "powerlaw")]
    PowerLaw {
        alpha: f64,
        max_degree: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn er(n: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Er { p: None },
            n,
            seed,
        }
    }

    pub fn sbm(n: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Sbm {
                blocks: None,
                p_in: None,
                p_out: None,
            },
            n,
            seed,
        }
    }

    pub fn powerlaw(n: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::PowerLaw {
                alpha: 2.5,
                max_degree: None,
            },
            n,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        GeneratorSpec { seed, ..self }
    }

    pub fn generate(&self) -> Result<DirectedGraph> {
        let n = self.n;
        let nf = n as f64;
        match self.kind {
            GeneratorKind::Er { p } => gen_er(n, p.unwrap_or(0.5 * nf.powf(-0.8)), self.seed),
            GeneratorKind::Sbm { blocks, p_in, p_out } => gen_sbm(
                n,
                blocks.unwrap_or(5),
                p_in.unwrap_or(nf.powf(-0.8)),
                p_out.unwrap_or(0.5 * nf.powf(-0.8)),
                self.seed,
            ),
            GeneratorKind::PowerLaw { alpha, max_degree } => {
                gen_powerlaw_capped(n, alpha, max_degree.unwrap_or(n.saturating_sub(1)), self.seed)
            }
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {p} is not in [0, 1]")))
    }
}

/// Calls `emit` for every slot in `0..total` that succeeds an independent
/// Bernoulli(p) trial, jumping between successes with geometric gaps.
fn bernoulli_slots(total: u64, p: f64, rng: &mut Rng, mut emit: impl FnMut(u64)) {
    if total == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(emit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut t: u64 = 0;
    let mut first = true;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / log_q).floor();
        let step = if first { gap } else { gap + 1.0 };
        first = false;
        if step >= (total - t) as f64 {
            return;
        }
        t += step as u64;
        if t >= total {
            return;
        }
        emit(t);
    }
}

/// Erdős–Rényi digraph: every ordered pair `(i, j)`, `i != j`, independently
/// with probability `p`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<DirectedGraph> {
    check_probability("p", p)?;
    let mut rng = seeding::rng(seed);
    let mut pairs = Vec::new();
    if n >= 2 {
        let row = (n - 1) as u64;
        bernoulli_slots(n as u64 * row, p, &mut rng, |t| {
            let i = (t / row) as usize;
            let jj = (t % row) as usize;
            let j = if jj >= i { jj + 1 } else { jj };
            pairs.push((i, j));
        });
    }
    DirectedGraph::from_edges(n, pairs)
}

pub fn gen_sbm(n: usize, blocks: usize, p_in: f64, p_out: f64, seed: u64) -> Result<DirectedGraph> {
    gen_sbm_with_blocks(n, blocks, p_in, p_out, seed).map(|(g, _)| g)
}

/// Stochastic block model with uniformly drawn block labels. Returns the
/// graph and the label of each node.
pub fn gen_sbm_with_blocks(
    n: usize,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(DirectedGraph, Vec<usize>)> {
    if blocks == 0 {
        return Err(Error::InvalidParameter("block count must be at least 1".into()));
    }
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    let mut rng = seeding::rng(seed);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..blocks)).collect();
    let mut members = vec![Vec::new(); blocks];
    for (v, &b) in labels.iter().enumerate() {
        members[b].push(v);
    }
    let mut pairs = Vec::new();
    for a in 0..blocks {
        for b in 0..blocks {
            let (ra, rb) = (&members[a], &members[b]);
            if a == b {
                if ra.len() < 2 {
                    continue;
                }
                let row = (ra.len() - 1) as u64;
                bernoulli_slots(ra.len() as u64 * row, p_in, &mut rng, |t| {
                    let i = (t / row) as usize;
                    let jj = (t % row) as usize;
                    let j = if jj >= i { jj + 1 } else { jj };
                    pairs.push((ra[i], ra[j]));
                });
            } else {
                let row = rb.len() as u64;
                bernoulli_slots(ra.len() as u64 * row, p_out, &mut rng, |t| {
                    pairs.push((ra[(t / row) as usize], rb[(t % row) as usize]));
                });
            }
        }
    }
    Ok((DirectedGraph::from_edges(n, pairs)?, labels))
}

/// Power-law in-degree network: node in-degrees are i.i.d. from
/// `P(k) ∝ k^-alpha` on `1..=n-1`, and each node's followers are a uniform
/// sample without replacement from the other nodes.
pub fn gen_powerlaw(n: usize, alpha: f64, seed: u64) -> Result<DirectedGraph> {
    gen_powerlaw_capped(n, alpha, n.saturating_sub(1), seed)
}

pub(crate) fn powerlaw_pmf(alpha: f64, max_degree: usize) -> Vec<f64> {
    let w: Vec<f64> = (1..=max_degree).map(|k| (k as f64).powf(-alpha)).collect();
    let c: f64 = w.iter().sum();
    w.into_iter().map(|x| x / c).collect()
}

fn gen_powerlaw_capped(n: usize, alpha: f64, max_degree: usize, seed: u64) -> Result<DirectedGraph> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 1")));
    }
    if n < 2 {
        return Ok(DirectedGraph::empty(n));
    }
    let cap = max_degree.clamp(1, n - 1);
    let pmf = powerlaw_pmf(alpha, cap);
    let mut cdf = Vec::with_capacity(cap);
    let mut acc = 0.0;
    for p in &pmf {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = seeding::rng(seed);
    let mut pairs = Vec::new();
    let mut swaps: HashMap<usize, usize> = HashMap::new();
    for target in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let k = cdf.partition_point(|&c| c <= u).min(cap - 1) + 1;
        // partial Fisher-Yates over the n-1 other nodes, swaps kept sparse
        swaps.clear();
        let pool = n - 1;
        for s in 0..k {
            let r = rng.random_range(s..pool);
            let picked = *swaps.get(&r).unwrap_or(&r);
            let at_s = *swaps.get(&s).unwrap_or(&s);
            swaps.insert(r, at_s);
            let follower = if picked >= target { picked + 1 } else { picked };
            pairs.push((follower, target));
        }
    }
    DirectedGraph::from_edges(n, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(3, 1.0, 1).unwrap().edge_count(), 6);
        assert_eq!(gen_er(3, 0.0, 1).unwrap().edge_count(), 0);
        assert!(gen_er(3, 1.5, 1).is_err());
    }

    #[test]
    fn er_edge_count_within_four_sd() {
        let n = 5000usize;
        let p = 0.5 * (n as f64).powf(-0.8);
        let g = gen_er(n, p, 11).unwrap();
        let trials = (n * (n - 1)) as f64;
        let (mean, sd) = (trials * p, (trials * p * (1.0 - p)).sqrt());
        assert!((g.edge_count() as f64 - mean).abs() < 4.0 * sd);
    }

    #[test]
    fn sbm_extremes() {
        assert_eq!(gen_sbm(4, 1, 1.0, 0.3, 2).unwrap().edge_count(), 12);
        // n=4, K=4 with singleton blocks is only guaranteed empty when labels
        // are distinct; p_in=1, p_out=0 leaves edges only inside blocks.
        let (g, labels) = gen_sbm_with_blocks(4, 4, 1.0, 0.0, 5).unwrap();
        for (i, j) in g.edges() {
            assert_eq!(labels[i], labels[j]);
        }
        let mut distinct = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() == 4 {
            assert_eq!(g.edge_count(), 0);
        }
    }

    #[test]
    fn sbm_stratum_rates_within_four_sd() {
        let n = 2500usize;
        let nf = n as f64;
        let (p_in, p_out) = (nf.powf(-0.8), 0.5 * nf.powf(-0.8));
        let (g, labels) = gen_sbm_with_blocks(n, 5, p_in, p_out, 21).unwrap();
        let mut sizes = [0f64; 5];
        for &b in &labels {
            sizes[b] += 1.0;
        }
        let within_pairs: f64 = sizes.iter().map(|s| s * (s - 1.0)).sum();
        let across_pairs = nf * (nf - 1.0) - within_pairs;
        let within = g.edges().filter(|&(i, j)| labels[i] == labels[j]).count() as f64;
        let across = g.edge_count() as f64 - within;
        for (obs, trials, p) in [(within, within_pairs, p_in), (across, across_pairs, p_out)] {
            let sd = (trials * p * (1.0 - p)).sqrt();
            assert!((obs - trials * p).abs() < 4.0 * sd, "{obs} vs {}", trials * p);
        }
    }

    #[test]
    fn powerlaw_two_nodes_is_two_cycle() {
        let g = gen_powerlaw(2, 2.5, 9).unwrap();
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert!(gen_powerlaw(10, 1.0, 9).is_err());
    }

    #[test]
    fn powerlaw_indegree_matches_column_counts() {
        let g = gen_powerlaw(100, 2.5, 4).unwrap();
        let mut col = vec![0usize; 100];
        for (_, j) in g.edges() {
            col[j] += 1;
        }
        assert_eq!(g.in_degree(), col);
        assert!(g.in_degree().iter().all(|&d| d >= 1));
    }

    #[test]
    fn generators_are_deterministic() {
        for spec in [
            GeneratorSpec::er(400, 3),
            GeneratorSpec::sbm(400, 3),
            GeneratorSpec::powerlaw(400, 3),
        ] {
            assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
            assert_ne!(spec.generate().unwrap(), spec.with_seed(4).generate().unwrap());
        }
    }

    #[test]
    fn spec_serializes_with_kind_tag() {
        let s = GeneratorSpec::sbm(100, 1);
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.contains("\"kind\":\"sbm\""));
        let back: GeneratorSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }
}
