//! Digraph representation, generators, condensation, and the BFS oracles the
//! rest of the toolkit is verified against.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitmat::BitMatrix;

/// Errors from parsing graph or source files and from the generator.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("empty input (expected header at line 1)")]
    EmptyInput,
    #[error("malformed line {line}: expected {expected}")]
    Malformed { line: usize, expected: &'static str },
    #[error("vertex id out of range at line {line}")]
    VertexOutOfRange { line: usize },
    #[error("unexpected end of input at line {line}: header declared {declared} edges, found {found}")]
    TruncatedInput { line: usize, declared: usize, found: usize },
    #[error("unexpected extra data at line {line}")]
    TrailingData { line: usize },
    #[error("density infeasible: requested {requested} edges but at most {max} are possible")]
    DensityInfeasible { requested: usize, max: usize },
    #[error("source id {id} out of range for n={n}")]
    SourceOutOfRange { id: usize, n: usize },
    #[error("duplicate source id {id}")]
    DuplicateSource { id: usize },
}

/// Immutable digraph with vertex ids `0..n`, stored in compressed row form.
///
/// Out-neighbor lists are sorted ascending with duplicates removed. Self-loops
/// may be stored but never matter for reachability: every vertex reaches
/// itself by the empty path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl DiGraph {
    /// Builds a graph from an edge iterator, dropping duplicate edges.
    ///
    /// Panics if an endpoint is `>= n`; callers that accept untrusted input
    /// validate first and report a proper error.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let dedup: BTreeSet<(usize, usize)> = edges.into_iter().collect();
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &dedup {
            assert!(u < n && v < n, "edge ({u},{v}) out of range for n={n}");
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        // BTreeSet iteration is sorted by (u,v), so each row comes out sorted.
        let targets = dedup.iter().map(|&(_, v)| v).collect();
        DiGraph { n, offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored edges after deduplication.
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    /// Sorted out-neighbors of `u`.
    pub fn out(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out(u).binary_search(&v).is_ok()
    }

    /// All edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out(u).iter().map(move |&v| (u, v)))
    }

    /// Union of this graph with `extra` edges; the receiver is not mutated.
    pub fn with_extra_edges(&self, extra: &[(usize, usize)]) -> DiGraph {
        DiGraph::from_edges(self.n, self.edges().chain(extra.iter().copied()))
    }

    /// Graph with every edge direction flipped.
    pub fn reversed(&self) -> DiGraph {
        let mut offsets = vec![0usize; self.n + 1];
        for &v in &self.targets {
            offsets[v + 1] += 1;
        }
        for i in 0..self.n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0usize; self.targets.len()];
        // Scanning sources in ascending order keeps each reversed row sorted.
        for (u, v) in self.edges() {
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        DiGraph { n: self.n, offsets, targets }
    }

    /// Edge-list text: header "n m" then one "u v" line per edge.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Parses the edge-list format: header line "n m", then exactly m lines "u v".
///
/// Blank lines and lines starting with '#' are skipped. Line numbers in errors
/// are 1-based over the raw input.
pub fn load_edge_list(text: &str) -> Result<DiGraph, GraphError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|&(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(GraphError::EmptyInput)?;
    let mut it = header.split_whitespace();
    let expected = "header \"n m\"";
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(GraphError::Malformed { line: header_line, expected })?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(GraphError::Malformed { line: header_line, expected })?;
    if it.next().is_some() {
        return Err(GraphError::Malformed { line: header_line, expected });
    }

    let mut edges = Vec::with_capacity(m);
    let mut last_line = header_line;
    for _ in 0..m {
        let (line, text) = lines.next().ok_or(GraphError::TruncatedInput {
            line: last_line + 1,
            declared: m,
            found: edges.len(),
        })?;
        last_line = line;
        let mut it = text.split_whitespace();
        let expected = "edge \"u v\"";
        let u: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(GraphError::Malformed { line, expected })?;
        let v: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(GraphError::Malformed { line, expected })?;
        if it.next().is_some() {
            return Err(GraphError::Malformed { line, expected });
        }
        if u >= n || v >= n {
            return Err(GraphError::VertexOutOfRange { line });
        }
        edges.push((u, v));
    }
    if let Some((line, _)) = lines.next() {
        return Err(GraphError::TrailingData { line });
    }
    Ok(DiGraph::from_edges(n, edges))
}

/// Generates a digraph with `round(n^mu)` distinct non-self-loop edges drawn
/// uniformly by a seeded PRNG.
///
/// With `dag` set, each sampled vertex pair is oriented from lower to higher
/// rank under a random permutation, so the result is acyclic. The same seed
/// always yields the same graph regardless of thread count.
pub fn gen_random(n: usize, mu: f64, seed: u64, dag: bool) -> Result<DiGraph, GraphError> {
    assert!(n >= 2, "generator needs n >= 2");
    assert!((1.0..=2.0).contains(&mu), "density exponent must be in [1,2]");
    let requested = (n as f64).powf(mu).round() as usize;
    // An acyclic orientation admits only one direction per vertex pair.
    let max = if dag { n * (n - 1) / 2 } else { n * (n - 1) };
    if requested > max {
        return Err(GraphError::DensityInfeasible { requested, max });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perm: Vec<usize> = {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        p
    };
    let mut edges = BTreeSet::new();
    while edges.len() < requested {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let e = if dag {
            if perm[u] < perm[v] {
                (u, v)
            } else {
                (v, u)
            }
        } else {
            (u, v)
        };
        edges.insert(e);
    }
    Ok(DiGraph::from_edges(n, edges))
}

/// Ordered set of distinct source vertices. The order fixes the row order of
/// every result matrix derived from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSet {
    ids: Vec<usize>,
}

impl SourceSet {
    pub fn new(ids: Vec<usize>, n: usize) -> Result<Self, GraphError> {
        let mut seen = vec![false; n];
        for &id in &ids {
            if id >= n {
                return Err(GraphError::SourceOutOfRange { id, n });
            }
            if seen[id] {
                return Err(GraphError::DuplicateSource { id });
            }
            seen[id] = true;
        }
        Ok(SourceSet { ids })
    }

    /// All vertices in ascending order.
    pub fn all(n: usize) -> Self {
        SourceSet { ids: (0..n).collect() }
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.ids.contains(&v)
    }

    /// Implied exponent σ = log_n |S|, or 0 when it is undefined (n ≤ 1 or
    /// an empty set).
    pub fn sigma(&self, n: usize) -> f64 {
        if n <= 1 || self.ids.is_empty() {
            return 0.0;
        }
        (self.ids.len() as f64).ln() / (n as f64).ln()
    }

    /// Parses the sources format: one vertex id per line, '#' comments and
    /// blank lines skipped.
    pub fn parse(text: &str, n: usize) -> Result<Self, GraphError> {
        let mut ids = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let id: usize = line
                .parse()
                .map_err(|_| GraphError::Malformed { line: i + 1, expected: "vertex id" })?;
            ids.push(id);
        }
        SourceSet::new(ids, n)
    }
}

/// Strongly connected components of a graph, contracted to a DAG.
///
/// Component ids are assigned in topological order: every DAG edge goes from a
/// lower id to a higher id, so `topo` is simply `0..component_count`.
#[derive(Debug, Clone)]
pub struct Condensation {
    scc_id: Vec<usize>,
    dag: DiGraph,
    topo: Vec<usize>,
}

impl Condensation {
    pub fn scc_id(&self) -> &[usize] {
        &self.scc_id
    }

    pub fn dag(&self) -> &DiGraph {
        &self.dag
    }

    pub fn topo(&self) -> &[usize] {
        &self.topo
    }

    pub fn component_count(&self) -> usize {
        self.dag.n()
    }

    /// Smallest original vertex in each component, a canonical representative.
    pub fn representatives(&self) -> Vec<usize> {
        let mut rep = vec![usize::MAX; self.component_count()];
        for (v, &c) in self.scc_id.iter().enumerate() {
            if v < rep[c] {
                rep[c] = v;
            }
        }
        rep
    }
}

/// Contracts strongly connected components (iterative Tarjan, safe for deep
/// graphs) and returns the condensation DAG.
pub fn scc_condense(g: &DiGraph) -> Condensation {
    let n = g.n();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut raw_id = vec![UNSET; n];
    let mut next_index = 0usize;
    let mut components = 0usize;

    // Explicit DFS frames: (vertex, position in its out-list).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < g.out(v).len() {
                let w = g.out(v)[*pos];
                *pos += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    // Tarjan pops components in reverse topological order.
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        raw_id[w] = components;
                        if w == v {
                            break;
                        }
                    }
                    components += 1;
                }
            }
        }
    }

    // Flip ids so that edges of the condensation run low -> high.
    let scc_id: Vec<usize> = raw_id.iter().map(|&r| components - 1 - r).collect();
    let dag_edges: BTreeSet<(usize, usize)> = g
        .edges()
        .filter(|&(u, v)| scc_id[u] != scc_id[v])
        .map(|(u, v)| (scc_id[u], scc_id[v]))
        .collect();
    debug_assert!(dag_edges.iter().all(|&(a, b)| a < b));
    let dag = DiGraph::from_edges(components, dag_edges);
    Condensation { scc_id, dag, topo: (0..components).collect() }
}

/// Per-source reachability rows over all vertices, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachResult {
    sources: SourceSet,
    rows: BitMatrix,
}

impl ReachResult {
    pub fn new(sources: SourceSet, rows: BitMatrix) -> Self {
        assert_eq!(sources.len(), rows.rows(), "one row per source");
        for (i, &s) in sources.ids().iter().enumerate() {
            debug_assert!(rows.get(i, s), "row {i} must mark its own source {s}");
        }
        ReachResult { sources, rows }
    }

    pub fn sources(&self) -> &SourceSet {
        &self.sources
    }

    pub fn rows(&self) -> &BitMatrix {
        &self.rows
    }

    pub fn reaches(&self, row: usize, v: usize) -> bool {
        self.rows.get(row, v)
    }

    /// Reached vertices of one row (by row index, not source id), ascending.
    pub fn row_vertices(&self, row: usize) -> Vec<usize> {
        self.rows.row_ones(row).collect()
    }

    /// Text form: one line "s: v1 v2 v3 ..." per source, targets ascending.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, &s) in self.sources.ids().iter().enumerate() {
            let _ = write!(out, "{s}:");
            for v in self.rows.row_ones(i) {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    /// Hex dump form: one line "s: <hex>" per source. Bytes are emitted in
    /// column order; bit j of the row is bit (j mod 8) of byte (j / 8).
    pub fn to_hex_text(&self) -> String {
        let mut out = String::new();
        for (i, &s) in self.sources.ids().iter().enumerate() {
            let _ = write!(out, "{s}:");
            out.push(' ');
            for byte in self.rows.row_bytes(i) {
                let _ = write!(out, "{byte:02x}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the plain text form back. Line order defines source order.
    pub fn from_text(text: &str, n: usize) -> Result<Self, GraphError> {
        let mut ids = Vec::new();
        let mut row_sets: Vec<Vec<usize>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let lineno = i + 1;
            let expected = "\"s: v1 v2 ...\"";
            let (src, rest) = line
                .split_once(':')
                .ok_or(GraphError::Malformed { line: lineno, expected })?;
            let s: usize = src
                .trim()
                .parse()
                .map_err(|_| GraphError::Malformed { line: lineno, expected })?;
            if s >= n {
                return Err(GraphError::VertexOutOfRange { line: lineno });
            }
            let mut vs = Vec::new();
            for tok in rest.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| GraphError::Malformed { line: lineno, expected })?;
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { line: lineno });
                }
                vs.push(v);
            }
            ids.push(s);
            row_sets.push(vs);
        }
        let sources = SourceSet::new(ids, n)?;
        let mut rows = BitMatrix::zeros(sources.len(), n);
        for (i, vs) in row_sets.iter().enumerate() {
            for &v in vs {
                rows.set(i, v);
            }
        }
        Ok(ReachResult { sources, rows })
    }
}

fn bfs_reach(g: &DiGraph, start: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut frontier = vec![start];
    while let Some(u) = frontier.pop() {
        for &v in g.out(u) {
            if !seen[v] {
                seen[v] = true;
                frontier.push(v);
            }
        }
    }
    seen
}

fn bfs_reach_bounded(g: &DiGraph, start: usize, d: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    let mut frontier = vec![start];
    for _ in 0..d {
        if frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.out(u) {
                if !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Exact reachability by one graph search per source. This is the ground
/// truth every other solver is checked against.
pub fn multi_source_reach(g: &DiGraph, s: &SourceSet) -> ReachResult {
    let rows =
        BitMatrix::from_parallel_rows(s.len(), g.n(), |i| bfs_reach(g, s.ids()[i]));
    ReachResult::new(s.clone(), rows)
}

/// Reachability restricted to dipaths with at most `d` edges; `d = 0` leaves
/// each source alone with itself.
pub fn bounded_hop_reach(g: &DiGraph, s: &SourceSet, d: usize) -> ReachResult {
    let rows =
        BitMatrix::from_parallel_rows(s.len(), g.n(), |i| bfs_reach_bounded(g, s.ids()[i], d));
    ReachResult::new(s.clone(), rows)
}
