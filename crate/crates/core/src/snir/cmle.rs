use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::netcore::DirectedGraph;

/// Gram matrices with reciprocal condition number below this are singular.
pub const RCOND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub node: usize,
    pub rho: f64,
    pub se: f64,
    pub t: f64,
    pub p: f64,
}

/// Conditional least-squares fit of the non-selected rows on the influence
/// columns of the selected nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmleFit {
    pub coef: Vec<Coefficient>,
    pub sigma2: f64,
    pub rss: f64,
    pub n_rows: usize,
}

impl CmleFit {
    pub fn nodes(&self) -> Vec<usize> {
        self.coef.iter().map(|c| c.node).collect()
    }

    pub fn rho(&self) -> Vec<f64> {
        self.coef.iter().map(|c| c.rho).collect()
    }
}

/// Two-sided standard normal tail probability.
pub fn normal_two_sided(t: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    erfc(t.abs() / std::f64::consts::SQRT_2).clamp(0.0, 1.0)
}

/// CMLE on the rows outside `s`.
pub fn cmle(g: &DirectedGraph, y: &[f64], s: &[usize]) -> Result<CmleFit> {
    let mut in_s = vec![false; g.n()];
    for &j in s {
        if j < g.n() {
            in_s[j] = true;
        }
    }
    let rows: Vec<usize> = (0..g.n()).filter(|&i| !in_s[i]).collect();
    cmle_on_rows(g, y, s, &rows)
}

/// Regresses `y[rows]` on the columns `A[rows, j] * y[j]`, `j` in `s`
/// (no intercept). Coefficients are reported in the order of `s`.
pub fn cmle_on_rows(g: &DirectedGraph, y: &[f64], s: &[usize], rows: &[usize]) -> Result<CmleFit> {
    let n = g.n();
    if y.len() != n {
        return Err(Error::InvalidParameter(format!("{} responses for {n} nodes", y.len())));
    }
    if s.is_empty() {
        return Err(Error::InvalidParameter("selected set is empty".into()));
    }
    let mut seen = vec![false; n];
    for &j in s {
        if j >= n {
            return Err(Error::InvalidParameter(format!("node {j} out of range")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidParameter(format!("node {j} selected twice")));
        }
    }
    let p = s.len();
    if rows.len() <= p {
        return Err(Error::InsufficientRows {
            rows: rows.len(),
            cols: p,
        });
    }

    let mut is_row = vec![false; n];
    for &i in rows {
        is_row[i] = true;
    }
    // follower lists restricted to the row set
    let cols: Vec<Vec<usize>> = s
        .iter()
        .map(|&j| g.in_neighbors(j).iter().copied().filter(|&i| is_row[i]).collect())
        .collect();

    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut xty = DVector::<f64>::zeros(p);
    let mut mark = vec![false; n];
    for a in 0..p {
        for &i in &cols[a] {
            mark[i] = true;
        }
        let ya = y[s[a]];
        gram[(a, a)] = ya * ya * cols[a].len() as f64;
        xty[a] = ya * cols[a].iter().map(|&i| y[i]).sum::<f64>();
        for b in (a + 1)..p {
            let shared = cols[b].iter().filter(|&&i| mark[i]).count();
            let v = ya * y[s[b]] * shared as f64;
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
        for &i in &cols[a] {
            mark[i] = false;
        }
    }

    if rcond(&gram) < RCOND_TOL {
        let node = (1..=p)
            .find(|&k| rcond(&gram.view((0, 0), (k, k)).into_owned()) < RCOND_TOL)
            .map(|k| s[k - 1])
            .unwrap_or(s[p - 1]);
        return Err(Error::SingularDesign { node });
    }
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularDesign { node: s[p - 1] })?;
    let rho = chol.solve(&xty);
    let inv = chol.inverse();

    let mut fitted = vec![0.0; n];
    for a in 0..p {
        let c = rho[a] * y[s[a]];
        for &i in &cols[a] {
            fitted[i] += c;
        }
    }
    let rss: f64 = rows.iter().map(|&i| (y[i] - fitted[i]).powi(2)).sum();
    let sigma2 = rss / (rows.len() - p) as f64;

    let coef = (0..p)
        .map(|a| {
            let se = (sigma2 * inv[(a, a)]).max(0.0).sqrt();
            let t = if se > 0.0 {
                rho[a] / se
            } else if rho[a] == 0.0 {
                0.0
            } else {
                rho[a].signum() * f64::INFINITY
            };
            Coefficient {
                node: s[a],
                rho: rho[a],
                se,
                t,
                p: normal_two_sided(t),
            }
        })
        .collect();
    Ok(CmleFit {
        coef,
        sigma2,
        rss,
        n_rows: rows.len(),
    })
}

fn rcond(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let ev = m.clone().symmetric_eigenvalues();
    let max = ev.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let min = ev.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    if max == 0.0 {
        0.0
    } else {
        min.max(0.0) / max
    }
}
