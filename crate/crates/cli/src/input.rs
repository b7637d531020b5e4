//! Node-keyed tables: responses, covariates and period labels.
//!
//! Files are comma-separated (or whitespace-separated when a line has no
//! comma). The first column holds node ids matching the edge list; a first
//! row whose value cells are not numeric is treated as a header.

use std::collections::HashMap;
use std::path::Path;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use snirkit::netcore::io::{read_edge_list_file, LoadedNetwork};
use snirkit::DirectedGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MissingPolicy {
    /// A node without a value is an error.
    #[default]
    Error,
    /// Fill absent nodes with zero.
    Zero,
}

pub fn load_network(path: &Path) -> CliResult<LoadedNetwork> {
    read_edge_list_file(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone)]
struct Table {
    header: Option<Vec<String>>,
    /// `(line number, node id, value cells)`.
    rows: Vec<(usize, String, Vec<String>)>,
}

fn split_cells(line: &str) -> CliResult<Vec<String>> {
    if line.contains(',') {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(line.as_bytes());
        let rec = rdr
            .records()
            .next()
            .transpose()?
            .ok_or_else(|| CliError::Data("empty record".into()))?;
        Ok(rec.iter().map(str::to_string).collect())
    } else {
        Ok(line.split_whitespace().map(str::to_string).collect())
    }
}

fn read_table(path: &Path) -> CliResult<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut cells = split_cells(t)?;
        if cells.len() < 2 {
            return Err(CliError::Data(format!(
                "{} line {}: expected a node id and at least one value",
                path.display(),
                k + 1
            )));
        }
        let id = cells.remove(0);
        rows.push((k + 1, id, cells));
    }
    if rows.is_empty() {
        return Err(CliError::Data(format!("{}: no rows", path.display())));
    }
    let header = if rows[0].2.iter().any(|c| c.parse::<f64>().is_err()) {
        let (_, id, cells) = rows.remove(0);
        Some(std::iter::once(id).chain(cells).collect())
    } else {
        None
    };
    Ok(Table { header, rows })
}

impl Table {
    /// Index into the value cells for a column given by header name or by
    /// 1-based position counting the id column.
    fn value_column(&self, col: Option<&str>, path: &Path) -> CliResult<usize> {
        let Some(col) = col else { return Ok(0) };
        if let Some(h) = &self.header {
            if let Some(k) = h.iter().position(|c| c == col) {
                return if k == 0 {
                    Err(CliError::Usage(format!("column '{col}' is the node id column")))
                } else {
                    Ok(k - 1)
                };
            }
        }
        match col.parse::<usize>() {
            Ok(k) if k >= 2 => Ok(k - 2),
            _ => Err(CliError::Usage(format!("{}: no column '{col}'", path.display()))),
        }
    }

    /// One value per graph node; absent nodes are reported by id.
    fn align(&self, g: &DirectedGraph, path: &Path, cols: &[usize]) -> CliResult<(Vec<Option<Vec<f64>>>, usize)> {
        let index: HashMap<String, usize> = (0..g.n()).map(|i| (g.label(i).into_owned(), i)).collect();
        let mut out: Vec<Option<Vec<f64>>> = vec![None; g.n()];
        let mut unknown = 0usize;
        for (line, id, cells) in &self.rows {
            let vals = cols
                .iter()
                .map(|&c| {
                    let cell = cells.get(c).ok_or_else(|| {
                        CliError::Data(format!("{} line {line}: missing column {}", path.display(), c + 2))
                    })?;
                    cell.parse::<f64>().map_err(|_| {
                        CliError::Data(format!("{} line {line}: non-numeric value {cell:?}", path.display()))
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            match index.get(id) {
                Some(&i) => {
                    if out[i].is_some() {
                        return Err(CliError::Data(format!("{} line {line}: node {id} listed twice", path.display())));
                    }
                    out[i] = Some(vals);
                }
                None => unknown += 1,
            }
        }
        if unknown > 0 {
            warn!("{}: ignored {unknown} row(s) for nodes not in the network", path.display());
        }
        Ok((out, unknown))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Responses {
    pub values: Vec<f64>,
    /// Nodes filled by the missing-value policy.
    pub filled: usize,
    /// Rows naming nodes outside the network.
    pub unknown: usize,
}

pub fn load_responses(
    path: &Path,
    g: &DirectedGraph,
    column: Option<&str>,
    log1p: bool,
    missing: MissingPolicy,
) -> CliResult<Responses> {
    let t = read_table(path)?;
    let col = t.value_column(column, path)?;
    let (vals, unknown) = t.align(g, path, &[col])?;
    let mut filled = 0;
    let mut values = Vec::with_capacity(g.n());
    for (i, v) in vals.into_iter().enumerate() {
        let v = match (v, missing) {
            (Some(v), _) => v[0],
            (None, MissingPolicy::Zero) => {
                filled += 1;
                0.0
            }
            (None, MissingPolicy::Error) => {
                return Err(CliError::Data(format!(
                    "{}: no response for node {} (use --missing zero to fill)",
                    path.display(),
                    g.label(i)
                )))
            }
        };
        let v = if log1p {
            if v <= -1.0 {
                return Err(CliError::Data(format!("cannot take log1p of {v} for node {}", g.label(i))));
            }
            v.ln_1p()
        } else {
            v
        };
        values.push(v);
    }
    if filled > 0 {
        warn!("filled {filled} missing response(s) with zero");
    }
    Ok(Responses { values, filled, unknown })
}

/// `n x p` covariate matrix; every value column of the file is used.
pub fn load_covariates(path: &Path, g: &DirectedGraph) -> CliResult<DMatrix<f64>> {
    let t = read_table(path)?;
    let p = t.rows[0].2.len();
    let cols: Vec<usize> = (0..p).collect();
    let (vals, _) = t.align(g, path, &cols)?;
    let mut z = DMatrix::zeros(g.n(), p);
    for (i, v) in vals.into_iter().enumerate() {
        let v = v.ok_or_else(|| CliError::Data(format!("{}: no covariates for node {}", path.display(), g.label(i))))?;
        for (k, x) in v.into_iter().enumerate() {
            z[(i, k)] = x;
        }
    }
    Ok(z)
}

/// Period label (1 or 2) for every node.
pub fn load_periods(path: &Path, g: &DirectedGraph) -> CliResult<Vec<u8>> {
    let t = read_table(path)?;
    let (vals, _) = t.align(g, path, &[0])?;
    vals.into_iter()
        .enumerate()
        .map(|(i, v)| {
            let v = v.ok_or_else(|| CliError::Data(format!("{}: no period for node {}", path.display(), g.label(i))))?;
            match v[0] {
                x if x == 1.0 => Ok(1),
                x if x == 2.0 => Ok(2),
                x => Err(CliError::Data(format!("node {}: period {x} is not 1 or 2", g.label(i)))),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn graph() -> DirectedGraph {
        snirkit::netcore::io::read_edge_list("a b\nb c\n".as_bytes()).unwrap().graph
    }

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn aligned_by_label_with_header() {
        let f = file("node,reposts,likes\nc,3,30\na,1,10\nb,2,20\n");
        let r = load_responses(f.path(), &graph(), Some("likes"), false, MissingPolicy::Error).unwrap();
        assert_eq!(r.values, vec![10.0, 20.0, 30.0]);
        let r = load_responses(f.path(), &graph(), None, false, MissingPolicy::Error).unwrap();
        assert_eq!(r.values, vec![1.0, 2.0, 3.0]);
        let r = load_responses(f.path(), &graph(), Some("3"), false, MissingPolicy::Error).unwrap();
        assert_eq!(r.values, vec![10.0, 20.0, 30.0]);
    }

    #[test]
    fn missing_policy_and_log() {
        let f = file("a 0\nc 1\n");
        assert!(matches!(
            load_responses(f.path(), &graph(), None, false, MissingPolicy::Error),
            Err(CliError::Data(_))
        ));
        let r = load_responses(f.path(), &graph(), None, true, MissingPolicy::Zero).unwrap();
        assert_eq!(r.values, vec![0.0, 0.0, 2f64.ln()]);
        assert_eq!(r.filled, 1);
    }

    #[test]
    fn non_numeric_cell_is_a_data_error() {
        let f = file("a 1\nb x\nc 2\n");
        match load_responses(f.path(), &graph(), None, false, MissingPolicy::Zero) {
            Err(CliError::Data(m)) => assert!(m.contains("line 2"), "{m}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn periods_and_covariates() {
        let f = file("a,1\nb,2\nc,1\n");
        assert_eq!(load_periods(f.path(), &graph()).unwrap(), vec![1, 2, 1]);
        let f = file("id z1 z2\na 1 2\nb 3 4\nc 5 6\n");
        let z = load_covariates(f.path(), &graph()).unwrap();
        assert_eq!(z.shape(), (3, 2));
        assert_eq!(z[(2, 1)], 6.0);
    }
}
