use std::borrow::Cow;

use crate::error::{Error, Result};

/// Immutable binary follower network without self-loops.
///
/// An edge `(i, j)` means node `i` follows node `j`. Both the out-neighbor
/// (row) and in-neighbor (follower, column) lists are stored in compressed
/// form with sorted neighbor indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    out_ptr: Vec<usize>,
    out_idx: Vec<usize>,
    in_ptr: Vec<usize>,
    in_idx: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl DirectedGraph {
    pub fn empty(n: usize) -> Self {
        DirectedGraph {
            n,
            out_ptr: vec![0; n + 1],
            out_idx: Vec::new(),
            in_ptr: vec![0; n + 1],
            in_idx: Vec::new(),
            labels: None,
        }
    }

    /// Builds a graph from ordered pairs. Duplicate pairs collapse to one
    /// edge; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidParameter(format!("self-loop at node {i}")));
            }
            pairs.push((i, j));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_sorted_unique(n, &pairs))
    }

    fn from_sorted_unique(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut out_ptr = vec![0usize; n + 1];
        let mut in_ptr = vec![0usize; n + 1];
        for &(i, j) in pairs {
            out_ptr[i + 1] += 1;
            in_ptr[j + 1] += 1;
        }
        for k in 0..n {
            out_ptr[k + 1] += out_ptr[k];
            in_ptr[k + 1] += in_ptr[k];
        }
        let out_idx = pairs.iter().map(|&(_, j)| j).collect();
        // pairs are sorted by (i, j), so followers of j arrive in ascending i
        let mut in_idx = vec![0usize; pairs.len()];
        let mut fill = in_ptr.clone();
        for &(i, j) in pairs {
            in_idx[fill[j]] = i;
            fill[j] += 1;
        }
        DirectedGraph {
            n,
            out_ptr,
            out_idx,
            in_ptr,
            in_idx,
            labels: None,
        }
    }

    /// Attaches external string labels (one per node).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_idx.len()
    }

    /// Nodes that `i` follows.
    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_idx[self.out_ptr[i]..self.out_ptr[i + 1]]
    }

    /// Followers of `j`.
    pub fn in_neighbors(&self, j: usize) -> &[usize] {
        &self.in_idx[self.in_ptr[j]..self.in_ptr[j + 1]]
    }

    pub fn in_degree_of(&self, j: usize) -> usize {
        self.in_ptr[j + 1] - self.in_ptr[j]
    }

    pub fn out_degree_of(&self, i: usize) -> usize {
        self.out_ptr[i + 1] - self.out_ptr[i]
    }

    pub fn in_degree(&self) -> Vec<usize> {
        (0..self.n).map(|j| self.in_degree_of(j)).collect()
    }

    pub fn out_degree(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.out_degree_of(i)).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out_neighbors(i).binary_search(&j).is_ok()
    }

    /// Edges in ascending `(follower, followee)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.out_neighbors(i).iter().map(move |&j| (i, j)))
    }

    /// Minimum in-degree over `nodes`, or `None` for an empty slice.
    pub fn min_in_degree(&self, nodes: &[usize]) -> Option<usize> {
        nodes.iter().map(|&j| self.in_degree_of(j)).min()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External label of node `i`, falling back to its index.
    pub fn label(&self, i: usize) -> Cow<'_, str> {
        match &self.labels {
            Some(l) => Cow::Borrowed(l[i].as_str()),
            None => Cow::Owned(i.to_string()),
        }
    }

    /// Subgraph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> DirectedGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &v) in nodes.iter().enumerate() {
            pos[v] = k;
        }
        let mut pairs = Vec::new();
        for (k, &v) in nodes.iter().enumerate() {
            for &w in self.out_neighbors(v) {
                if pos[w] != usize::MAX {
                    pairs.push((k, pos[w]));
                }
            }
        }
        pairs.sort_unstable();
        let mut sub = Self::from_sorted_unique(nodes.len(), &pairs);
        if let Some(l) = &self.labels {
            sub.labels = Some(nodes.iter().map(|&v| l[v].clone()).collect());
        }
        sub
    }
}
