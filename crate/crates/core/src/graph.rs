//! Undirected simple graphs and the edge-list / label file formats.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

/// An undirected simple graph stored as a strictly sorted list of `(i, j)`
/// pairs with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    /// Builds a graph from arbitrary pairs: orientation is normalized and
    /// duplicates collapsed. Self-loops and out-of-range ids are errors.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { n, edges })
    }

    /// Caller guarantees the edges are strictly sorted with `i < j < n`.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(i, j)| i < j && j < n));
        Self { n, edges }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_sorted_unchecked(n, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(i, j) in &self.edges {
            d[i] += 1;
            d[j] += 1;
        }
        d
    }

    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency_lists();
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// Subgraph induced by `vertices` (in the given order); vertex `k` of the
    /// result is `vertices[k]` of `self`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut local = HashMap::with_capacity(vertices.len());
        for (k, &v) in vertices.iter().enumerate() {
            local.insert(v, k);
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter_map(|&(i, j)| {
                let (a, b) = (*local.get(&i)?, *local.get(&j)?);
                Some((a.min(b), a.max(b)))
            })
            .collect();
        edges.sort_unstable();
        Graph::from_sorted_unchecked(vertices.len(), edges)
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch {
                left: perm.len(),
                right: self.n,
            });
        }
        Graph::from_edges(self.n, self.edges.iter().map(|&(i, j)| (perm[i], perm[j])))
    }

    /// Restricts the graph to its largest connected component (ties go to the
    /// component with the smallest vertex). Returns the kept original ids.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let comps = self.connected_components();
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(i, _)| i);
        match best {
            Some(i) => (self.induced_subgraph(&comps[i]), comps[i].clone()),
            None => (Graph::empty(0), Vec::new()),
        }
    }
}

/// Something the loader fixed up rather than rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadWarning {
    DuplicateEdge { line: usize, i: usize, j: usize },
    SelfLoop { line: usize, vertex: usize },
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub warnings: Vec<LoadWarning>,
}

/// Reads an edge list: `#` comments, an optional `# n=<count>` header, and
/// one whitespace-separated `i j` pair per line.
pub fn read_edge_list(path: impl AsRef<Path>, one_based: bool) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    parse_edge_list(file, &path.display().to_string(), one_based)
}

pub fn parse_edge_list(reader: impl Read, source: &str, one_based: bool) -> Result<LoadedGraph> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_string(),
        line,
        message,
    };
    let mut declared_n: Option<usize> = None;
    let mut pairs = Vec::new();
    let mut warnings = Vec::new();
    let mut max_id: Option<usize> = None;

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                let n = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(lineno, format!("bad vertex count header: {e}")))?;
                declared_n = Some(n);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(
                lineno,
                format!("expected two vertex ids, got {trimmed:?}"),
            ));
        };
        let parse_id = |s: &str| -> Result<usize> {
            let raw = s
                .parse::<usize>()
                .map_err(|e| parse_err(lineno, format!("bad vertex id {s:?}: {e}")))?;
            if one_based {
                raw.checked_sub(1)
                    .ok_or_else(|| parse_err(lineno, "vertex id 0 in a one-based file".into()))
            } else {
                Ok(raw)
            }
        };
        let (i, j) = (parse_id(a)?, parse_id(b)?);
        max_id = Some(max_id.map_or(i.max(j), |m| m.max(i).max(j)));
        pairs.push((lineno, i, j));
    }

    let n = match (declared_n, max_id) {
        (Some(n), Some(m)) if m >= n => {
            return Err(parse_err(
                0,
                format!("vertex id {m} exceeds declared vertex count {n}"),
            ))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };

    let mut seen = BTreeMap::new();
    for (line, i, j) in pairs {
        if i == j {
            warnings.push(LoadWarning::SelfLoop { line, vertex: i });
            continue;
        }
        let key = (i.min(j), i.max(j));
        if seen.insert(key, line).is_some() {
            warnings.push(LoadWarning::DuplicateEdge {
                line,
                i: key.0,
                j: key.1,
            });
        }
    }
    let graph = Graph::from_sorted_unchecked(n, seen.into_keys().collect());
    Ok(LoadedGraph { graph, warnings })
}

/// Serializes a graph in the edge-list format (0-based, with `# n=` header).
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("# n={}\n", g.n());
    for &(i, j) in g.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

pub fn write_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    std::fs::write(path, format_edge_list(g))?;
    Ok(())
}

/// Reads a label file with one `vertex label` pair per line (0-based ids,
/// `#` comments allowed). Every vertex in `0..n` must be labelled exactly once.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_labels(&text, &path.display().to_string())
}

pub fn parse_labels(text: &str, source: &str) -> Result<Vec<String>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_string(),
        line,
        message,
    };
    let mut entries = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(v), Some(label), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(
                lineno,
                format!("expected `vertex label`, got {trimmed:?}"),
            ));
        };
        let v = v
            .parse::<usize>()
            .map_err(|e| parse_err(lineno, format!("bad vertex id {v:?}: {e}")))?;
        if entries.insert(v, label.to_string()).is_some() {
            return Err(parse_err(lineno, format!("vertex {v} labelled twice")));
        }
    }
    let n = entries.len();
    if let Some((&last, _)) = entries.iter().next_back() {
        if last + 1 != n {
            return Err(parse_err(
                0,
                format!("labels must cover vertices 0..{n} without gaps (max id {last})"),
            ));
        }
    }
    Ok(entries.into_values().collect())
}

pub fn format_labels<L: std::fmt::Display>(labels: &[L]) -> String {
    let mut out = String::new();
    for (v, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "{v} {l}");
    }
    out
}
