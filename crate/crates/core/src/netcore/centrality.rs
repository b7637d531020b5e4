//! Path-based centralities on the follow graph, with edges read as arcs
//! `follower -> followee`.

use std::collections::VecDeque;

use super::DirectedGraph;

/// Directed, unweighted betweenness (Brandes accumulation).
///
/// Every ordered pair `(s, t)` with `s != t` contributes the fraction of
/// shortest `s -> t` paths passing through `v`; endpoints are excluded and
/// unreachable pairs contribute nothing. Values are not normalized.
pub fn betweenness(g: &DirectedGraph) -> Vec<f64> {
    let n = g.n();
    let mut score = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        order.clear();
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.out_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        // predecessors of w are the in-neighbors one level closer to s
        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in g.in_neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] * coeff;
                }
            }
            if w != s {
                score[w] += delta[w];
            }
        }
    }
    score
}

/// Harmonic centrality toward each node: `H(i) = Σ_{j≠i} 1 / d(j -> i)`,
/// with unreachable `j` contributing zero.
pub fn harmonic(g: &DirectedGraph) -> Vec<f64> {
    let n = g.n();
    let mut out = vec![0.0; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    for (i, h) in out.iter_mut().enumerate() {
        dist.fill(usize::MAX);
        dist[i] = 0;
        queue.push_back(i);
        while let Some(v) = queue.pop_front() {
            // walk edges backwards: u -> v becomes a step from v to u
            for &u in g.in_neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    *h += 1.0 / dist[u] as f64;
                    queue.push_back(u);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> DirectedGraph {
        DirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness(&path3()), vec![0.0, 1.0, 0.0]);
        let complete =
            DirectedGraph::from_edges(3, [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]).unwrap();
        assert_eq!(betweenness(&complete), vec![0.0; 3]);
        let disjoint = DirectedGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(betweenness(&disjoint), vec![0.0; 4]);
    }

    #[test]
    fn betweenness_splits_parallel_paths() {
        // 0 -> {1, 2} -> 3: each middle node carries half of the (0,3) pair
        let g = DirectedGraph::from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(betweenness(&g), vec![0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(harmonic(&path3()), vec![0.0, 1.0, 1.5]);
        assert_eq!(harmonic(&DirectedGraph::empty(3)), vec![0.0; 3]);
        let cycle = DirectedGraph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(harmonic(&cycle), vec![1.0, 1.0]);
    }
}
