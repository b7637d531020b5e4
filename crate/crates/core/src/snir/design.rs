use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;

/// Relative norm below which a column is treated as lying in the span of
/// the columns already selected.
pub const RANK_TOL: f64 = 1e-10;

/// Column `scale * 1_rows`: a follower indicator restricted to the row set,
/// scaled by the followee's response.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumn {
    /// Row positions (into the design's target vector), ascending.
    pub rows: Vec<usize>,
    pub scale: f64,
}

impl SparseColumn {
    pub fn norm2(&self) -> f64 {
        self.scale * self.scale * self.rows.len() as f64
    }

    pub fn dot(&self, v: &[f64]) -> f64 {
        self.scale * self.rows.iter().map(|&r| v[r]).sum::<f64>()
    }

    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &r in &self.rows {
            out[r] = self.scale;
        }
        out
    }
}

/// A regression of `target` on sparse influence columns, one per candidate
/// node. Candidates are kept in ascending node order.
#[derive(Debug, Clone)]
pub struct RegressionDesign {
    pub target: Vec<f64>,
    pub columns: Vec<SparseColumn>,
    /// Node id of each column.
    pub nodes: Vec<usize>,
}

impl RegressionDesign {
    /// Columns `A_(rows, j) * y_j` for each `j` in `candidates`, target `y_(rows)`.
    pub fn build(g: &DirectedGraph, y: &[f64], rows: &[usize], candidates: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; g.n()];
        for (k, &i) in rows.iter().enumerate() {
            pos[i] = k;
        }
        let mut nodes = candidates.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let columns = nodes
            .iter()
            .map(|&j| {
                let mut r: Vec<usize> = g
                    .in_neighbors(j)
                    .iter()
                    .filter_map(|&f| (pos[f] != usize::MAX).then_some(pos[f]))
                    .collect();
                r.sort_unstable();
                SparseColumn { rows: r, scale: y[j] }
            })
            .collect();
        RegressionDesign {
            target: rows.iter().map(|&i| y[i]).collect(),
            columns,
            nodes,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.target.len()
    }

    pub fn column_of(&self, node: usize) -> Option<usize> {
        self.nodes.binary_search(&node).ok()
    }

    pub fn columns_for(&self, nodes: &[usize]) -> Result<Vec<usize>> {
        nodes
            .iter()
            .map(|&j| {
                self.column_of(j)
                    .ok_or_else(|| Error::InvalidParameter(format!("node {j} is not a candidate")))
            })
            .collect()
    }

    /// Residual of the target after projecting onto the listed columns,
    /// by modified Gram-Schmidt with one reorthogonalization pass.
    pub fn residual(&self, cols: &[usize]) -> Result<Vec<f64>> {
        let len = self.n_rows();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
        for &c in cols {
            let col = &self.columns[c];
            let orig = col.norm2().sqrt();
            let mut v = col.to_dense(len);
            for _ in 0..2 {
                for q in &basis {
                    let d = dot(q, &v);
                    axpy(-d, q, &mut v);
                }
            }
            let nv = dot(&v, &v).sqrt();
            if orig == 0.0 || nv < RANK_TOL * orig {
                return Err(Error::SingularDesign {
                    node: self.nodes[c],
                });
            }
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
        let mut r = self.target.clone();
        for _ in 0..2 {
            for q in &basis {
                let d = dot(q, &r);
                axpy(-d, q, &mut r);
            }
        }
        Ok(r)
    }

    pub fn rss_of(&self, cols: &[usize]) -> Result<f64> {
        let r = self.residual(cols)?;
        Ok(dot(&r, &r))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Working-model context: candidate set `M`, its complement `M^c`, and the
/// conditional regression of `Y_(M^c)` on `A_(M^c, M) diag(Y_(M))`.
#[derive(Debug, Clone)]
pub struct DesignContext {
    /// Candidate nodes, ascending.
    pub candidates: Vec<usize>,
    /// Non-candidate nodes, ascending.
    pub complement: Vec<usize>,
    pub design: RegressionDesign,
}

impl DesignContext {
    pub fn new(g: &DirectedGraph, y: &[f64], candidates: &[usize]) -> Result<Self> {
        if y.len() != g.n() {
            return Err(Error::InvalidParameter(format!(
                "{} responses for {} nodes",
                y.len(),
                g.n()
            )));
        }
        let mut in_m = vec![false; g.n()];
        for &j in candidates {
            if j >= g.n() {
                return Err(Error::InvalidParameter(format!("candidate {j} out of range")));
            }
            in_m[j] = true;
        }
        let mut m: Vec<usize> = candidates.to_vec();
        m.sort_unstable();
        m.dedup();
        let mc: Vec<usize> = (0..g.n()).filter(|&i| !in_m[i]).collect();
        if mc.is_empty() {
            return Err(Error::InvalidConfig("candidate set covers every node".into()));
        }
        let design = RegressionDesign::build(g, y, &mc, &m);
        Ok(DesignContext {
            candidates: m,
            complement: mc,
            design,
        })
    }

    pub fn m_size(&self) -> usize {
        self.candidates.len()
    }

    pub fn mc_size(&self) -> usize {
        self.complement.len()
    }

    fn columns_for(&self, nodes: &[usize]) -> Result<Vec<usize>> {
        self.design.columns_for(nodes)
    }

    /// `RSS(S) = ||Y_(M^c) - P_S Y_(M^c)||^2`.
    pub fn rss(&self, nodes: &[usize]) -> Result<f64> {
        let cols = self.columns_for(nodes)?;
        self.design.rss_of(&cols)
    }

    pub fn residual(&self, nodes: &[usize]) -> Result<Vec<f64>> {
        let cols = self.columns_for(nodes)?;
        self.design.residual(&cols)
    }
}
