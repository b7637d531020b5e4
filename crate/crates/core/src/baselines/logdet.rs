//! `log |det(I - rho W)|` for a sparse `W`, by Gaussian elimination in a
//! fill-reducing order computed once per pattern.
//!
//! Low-cost pivots (Markowitz count `r * c`) are eliminated on the sparse
//! structure; once the remaining active submatrix is dense enough it is
//! copied out and factored densely. The order is fixed symbolically, so
//! every evaluation replays the same list of updates with new values.
//! Row-stochastic `W` and `|rho| < 1` make `I - rho W` strictly diagonally
//! dominant, which survives symmetric elimination, so the fixed order
//! never meets a zero pivot in that range.

use std::collections::{BTreeSet, HashMap};

/// Remaining active density at which elimination switches to dense.
const DENSE_SWITCH: f64 = 0.25;
/// Below this many active nodes the dense switch is not worth checking.
const DENSE_MIN: usize = 64;

/// Sparse square matrix `W` given as `(row, col, value)` off-diagonal
/// entries; the diagonal of `W` must be zero.
#[derive(Debug, Clone)]
pub struct LogDet {
    n: usize,
    /// `(slot, w)` pairs: slot receives `-rho * w`.
    w_slots: Vec<(usize, f64)>,
    diag_slots: Vec<usize>,
    n_slots: usize,
    steps: Vec<Step>,
    /// Remaining nodes and, row-major, the slot of each kernel entry (or
    /// `usize::MAX` for a structural zero).
    kernel: Vec<usize>,
    kernel_slots: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Step {
    pivot: usize,
    /// Slots `(i, v)` below the pivot.
    col: Vec<usize>,
    /// Slots `(v, k)` right of the pivot.
    row: Vec<usize>,
    /// Row-major `col.len() x row.len()` target slots `(i, k)`.
    targets: Vec<usize>,
}

impl LogDet {
    pub fn new(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut slot: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = 0usize;
        let mut get = |slot: &mut HashMap<(usize, usize), usize>, key: (usize, usize)| -> usize {
            *slot.entry(key).or_insert_with(|| {
                next += 1;
                next - 1
            })
        };
        let diag_slots: Vec<usize> = (0..n).map(|i| get(&mut slot, (i, i))).collect();
        let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        let mut w_slots = Vec::with_capacity(entries.len());
        for &(i, j, w) in entries {
            assert!(i != j && i < n && j < n, "off-diagonal entry ({i}, {j}) out of range");
            w_slots.push((get(&mut slot, (i, j)), w));
            rows[i].insert(j);
            cols[j].insert(i);
        }

        let mut alive = vec![true; n];
        let mut n_alive = n;
        let mut nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut steps = Vec::new();
        loop {
            if n_alive == 0 {
                break;
            }
            if n_alive >= DENSE_MIN && (nnz + n_alive) as f64 >= DENSE_SWITCH * (n_alive * n_alive) as f64 {
                break;
            }
            // Markowitz pivot, lowest index on ties
            let mut best = (usize::MAX, usize::MAX);
            for v in 0..n {
                if alive[v] {
                    let cost = rows[v].len() * cols[v].len();
                    if cost < best.0 {
                        best = (cost, v);
                        if cost == 0 {
                            break;
                        }
                    }
                }
            }
            let v = best.1;
            let rv: Vec<usize> = rows[v].iter().copied().collect();
            let cv: Vec<usize> = cols[v].iter().copied().collect();
            let mut targets = Vec::with_capacity(rv.len() * cv.len());
            for &i in &cv {
                for &k in &rv {
                    if i == k {
                        targets.push(diag_slots[i]);
                    } else {
                        if rows[i].insert(k) {
                            cols[k].insert(i);
                            nnz += 1;
                        }
                        targets.push(get(&mut slot, (i, k)));
                    }
                }
            }
            steps.push(Step {
                pivot: diag_slots[v],
                col: cv.iter().map(|&i| slot[&(i, v)]).collect(),
                row: rv.iter().map(|&k| slot[&(v, k)]).collect(),
                targets,
            });
            for &i in &cv {
                rows[i].remove(&v);
            }
            for &k in &rv {
                cols[k].remove(&v);
            }
            nnz -= rv.len() + cv.len();
            rows[v].clear();
            cols[v].clear();
            alive[v] = false;
            n_alive -= 1;
        }

        let kernel: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let mut kernel_slots = Vec::with_capacity(kernel.len() * kernel.len());
        for &i in &kernel {
            for &k in &kernel {
                kernel_slots.push(if i == k {
                    diag_slots[i]
                } else {
                    slot.get(&(i, k)).copied().unwrap_or(usize::MAX)
                });
            }
        }
        LogDet {
            n,
            w_slots,
            diag_slots,
            n_slots: next,
            steps,
            kernel,
            kernel_slots,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of the block factored densely.
    pub fn kernel_size(&self) -> usize {
        self.kernel.len()
    }

    /// `log |det(I - rho W)|`; `-inf` if the matrix is singular.
    pub fn eval(&self, rho: f64) -> f64 {
        let mut a = vec![0.0; self.n_slots];
        for &d in &self.diag_slots {
            a[d] = 1.0;
        }
        for &(s, w) in &self.w_slots {
            a[s] -= rho * w;
        }
        let mut log_det = 0.0;
        for st in &self.steps {
            let p = a[st.pivot];
            if p == 0.0 || !p.is_finite() {
                return f64::NEG_INFINITY;
            }
            log_det += p.abs().ln();
            let width = st.row.len();
            for (ci, &cs) in st.col.iter().enumerate() {
                let l = a[cs] / p;
                if l == 0.0 {
                    continue;
                }
                let tg = &st.targets[ci * width..(ci + 1) * width];
                for (&rs, &ts) in st.row.iter().zip(tg) {
                    a[ts] -= l * a[rs];
                }
            }
        }
        let m = self.kernel.len();
        if m > 0 {
            let mut dense: Vec<f64> = self
                .kernel_slots
                .iter()
                .map(|&s| if s == usize::MAX { 0.0 } else { a[s] })
                .collect();
            log_det += dense_log_abs_det(&mut dense, m);
        }
        log_det
    }
}

/// `log |det|` of a row-major `m x m` matrix by LU with partial pivoting;
/// overwrites `a`.
pub fn dense_log_abs_det(a: &mut [f64], m: usize) -> f64 {
    let mut log_det = 0.0;
    for k in 0..m {
        let mut piv = k;
        let mut best = a[k * m + k].abs();
        for i in (k + 1)..m {
            let v = a[i * m + k].abs();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return f64::NEG_INFINITY;
        }
        if piv != k {
            for j in 0..m {
                a.swap(k * m + j, piv * m + j);
            }
        }
        let p = a[k * m + k];
        log_det += p.abs().ln();
        let (head, tail) = a.split_at_mut((k + 1) * m);
        let pivot_row = &head[k * m + k + 1..k * m + m];
        for row in tail.chunks_exact_mut(m) {
            let l = row[k] / p;
            if l != 0.0 {
                for (x, &u) in row[k + 1..].iter_mut().zip(pivot_row) {
                    *x -= l * u;
                }
            }
        }
    }
    log_det
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense_reference(n: usize, entries: &[(usize, usize, f64)], rho: f64) -> f64 {
        let mut m = DMatrix::<f64>::identity(n, n);
        for &(i, j, w) in entries {
            m[(i, j)] -= rho * w;
        }
        m.determinant().abs().ln()
    }

    #[test]
    fn triangular_pattern_has_zero_log_det() {
        let ld = LogDet::new(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(ld.eval(0.7), 0.0);
    }

    #[test]
    fn two_cycle() {
        // det [[1, -r], [-r, 1]] = 1 - r^2
        let ld = LogDet::new(2, &[(0, 1, 1.0), (1, 0, 1.0)]);
        assert!((ld.eval(0.5) - 0.75f64.ln()).abs() < 1e-15);
        assert_eq!(ld.eval(1.0), f64::NEG_INFINITY);
    }

    #[test]
    fn matches_dense_determinant_on_random_patterns() {
        use rand::Rng as _;
        let mut rng = crate::seeding::rng(9);
        for n in [5usize, 30, 120] {
            let mut entries = Vec::new();
            for i in 0..n {
                let mut row = Vec::new();
                for j in 0..n {
                    if i != j && rng.random::<f64>() < 4.0 / n as f64 {
                        row.push(j);
                    }
                }
                let w = 1.0 / row.len().max(1) as f64;
                entries.extend(row.into_iter().map(|j| (i, j, w)));
            }
            let ld = LogDet::new(n, &entries);
            for rho in [-0.9, -0.3, 0.0, 0.4, 0.95] {
                let a = ld.eval(rho);
                let b = dense_reference(n, &entries, rho);
                assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "n={n} rho={rho}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dense_kernel_alone() {
        let mut a: Vec<f64> = vec![2.0, 1.0, 1.0, 4.0, 3.0, 3.0, 8.0, 7.0, 9.0];
        let expect = DMatrix::from_row_slice(3, 3, &a).determinant().abs().ln();
        assert!((dense_log_abs_det(&mut a, 3) - expect).abs() < 1e-12);
    }
}
