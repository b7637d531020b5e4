//! Plain-text edge lists: one `SRC DST` pair per line, separated by
//! whitespace or a comma. A line holding a single id declares a node
//! without edges. Node ids are arbitrary strings mapped to dense indices in
//! order of first appearance; `#` lines are comments.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use log::warn;

use super::DirectedGraph;
use crate::error::{Error, Result};

/// A parsed edge list together with what was cleaned up on the way in.
#[derive(Debug, Clone)]
pub struct LoadedNetwork {
    pub graph: DirectedGraph,
    pub duplicate_edges: usize,
    pub self_loops: usize,
    pub header_skipped: bool,
}

const HEADER_WORDS: &[&str] = &[
    "src", "dst", "source", "target", "from", "to", "follower", "followee", "node", "u", "v",
];

fn split_line(line: &str) -> Option<(&str, Option<&str>)> {
    let mut parts = line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty());
    let a = parts.next()?;
    let b = parts.next();
    if parts.next().is_some() {
        return None;
    }
    Some((a, b))
}

fn is_numeric(tok: &str) -> bool {
    tok.parse::<f64>().is_ok()
}

fn looks_like_header(first: (&str, &str), second: Option<(&str, &str)>) -> bool {
    let named = [first.0, first.1]
        .iter()
        .all(|t| HEADER_WORDS.contains(&t.to_ascii_lowercase().as_str()));
    let numeric_below = second.is_some_and(|(a, b)| is_numeric(a) && is_numeric(b));
    let alpha_here = !is_numeric(first.0) && !is_numeric(first.1);
    named || (alpha_here && numeric_below)
}

fn intern<'a>(index: &mut HashMap<&'a str, usize>, labels: &mut Vec<String>, s: &'a str) -> usize {
    *index.entry(s).or_insert_with(|| {
        labels.push(s.to_string());
        labels.len() - 1
    })
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<LoadedNetwork> {
    let mut rows: Vec<(String, Option<String>)> = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (a, b) = split_line(t).ok_or_else(|| Error::Parse {
            line: k + 1,
            msg: format!("expected one or two node ids, got {t:?}"),
        })?;
        rows.push((a.to_string(), b.map(str::to_string)));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("edge list contains no nodes".into()));
    }
    fn pair(r: &(String, Option<String>)) -> Option<(&str, &str)> {
        r.1.as_deref().map(|b| (r.0.as_str(), b))
    }
    let header_skipped = match pair(&rows[0]) {
        Some(first) => looks_like_header(first, rows.get(1).and_then(pair)),
        None => false,
    };
    let body = if header_skipped { &rows[1..] } else { &rows[..] };
    if header_skipped {
        warn!("skipping header line {:?}", rows[0]);
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut pairs = Vec::with_capacity(body.len());
    let mut self_loops = 0usize;
    for (a, b) in body {
        let i = intern(&mut index, &mut labels, a);
        let Some(b) = b else { continue };
        let j = intern(&mut index, &mut labels, b);
        if i == j {
            self_loops += 1;
            continue;
        }
        pairs.push((i, j));
    }
    let raw = pairs.len();
    let n = labels.len();
    let graph = DirectedGraph::from_edges(n, pairs)?.with_labels(labels)?;
    let duplicate_edges = raw - graph.edge_count();
    if self_loops > 0 {
        warn!("dropped {self_loops} self-loop(s)");
    }
    if duplicate_edges > 0 {
        warn!("collapsed {duplicate_edges} duplicate edge(s)");
    }
    Ok(LoadedNetwork {
        graph,
        duplicate_edges,
        self_loops,
        header_skipped,
    })
}

pub fn read_edge_list_file(path: impl AsRef<std::path::Path>) -> Result<LoadedNetwork> {
    let f = std::fs::File::open(path)?;
    read_edge_list(std::io::BufReader::new(f))
}

/// Writes edges in ascending index order using node labels (or indices),
/// followed by one line per node without any edge.
pub fn write_edge_list<W: Write>(g: &DirectedGraph, mut w: W) -> Result<()> {
    for (i, j) in g.edges() {
        writeln!(w, "{} {}", g.label(i), g.label(j))?;
    }
    for i in 0..g.n() {
        if g.in_degree_of(i) == 0 && g.out_degree_of(i) == 0 {
            writeln!(w, "{}", g.label(i))?;
        }
    }
    w.flush()?;
    Ok(())
}
