//! Directed follower networks: storage, random generators, centralities and
//! follower-loss accounting.

mod centrality;
mod generate;
mod graph;
pub mod io;

pub use centrality::{betweenness, harmonic};
pub use generate::{gen_er, gen_powerlaw, gen_sbm, gen_sbm_with_blocks, GeneratorKind, GeneratorSpec};
pub use graph::DirectedGraph;

use crate::error::{Error, Result};

/// Fraction of all follow edges that point at a node in `nodes`.
///
/// Duplicate entries in `nodes` are counted once.
pub fn follower_loss(g: &DirectedGraph, nodes: &[usize]) -> Result<f64> {
    let total = g.edge_count();
    if total == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut seen = vec![false; g.n()];
    let mut lost = 0usize;
    for &j in nodes {
        if j >= g.n() {
            return Err(Error::InvalidParameter(format!("node {j} out of range")));
        }
        if !seen[j] {
            seen[j] = true;
            lost += g.in_degree_of(j);
        }
    }
    Ok(lost as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn follower_loss_examples() {
        // 0-based: edges (0,2), (1,2), (0,1)
        let g = DirectedGraph::from_edges(3, [(0, 2), (1, 2), (0, 1)]).unwrap();
        assert_eq!(follower_loss(&g, &[]).unwrap(), 0.0);
        assert_eq!(follower_loss(&g, &[0, 1, 2]).unwrap(), 1.0);
        assert!((follower_loss(&g, &[2]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((follower_loss(&g, &[2, 2]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn follower_loss_on_empty_graph_errors() {
        let g = DirectedGraph::empty(4);
        assert!(matches!(follower_loss(&g, &[1]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn follower_loss_is_monotone() {
        let g = gen_er(60, 0.1, 3).unwrap();
        let mut set = Vec::new();
        let mut last = 0.0;
        for j in (0..60).rev() {
            set.push(j);
            let v = follower_loss(&g, &set).unwrap();
            assert!(v >= last);
            last = v;
        }
        assert!((last - 1.0).abs() < 1e-12);
    }
}
