//! Diameter-reducing shortcut sets: H ⊆ TC(G) such that every reachable pair
//! is connected by at most D hops in G ∪ H.
//!
//! Construction follows the sample-and-verify pipeline: cover the
//! condensation with few vertex-disjoint closure dipaths, sample paths and
//! vertices at rate ~ln n / D, add an edge from each sampled vertex to the
//! first vertex it reaches on each sampled path, then verify the hop bound
//! exhaustively. Verification failure doubles the sampling constants and
//! retries; exhausted retries fall back to inserting all closure edges, so a
//! returned set is always verified.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmat::{transitive_closure, BitMatrix};
use crate::graph::{
    bounded_hop_reach, scc_condense, Condensation, DiGraph, SourceSet,
};

/// Vertex-disjoint dipaths in the transitive closure: consecutive elements
/// are connected by reachability, not necessarily by single edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCollection {
    pub paths: Vec<Vec<usize>>,
    /// Asserts that no vertex appears on two paths.
    pub disjoint: bool,
}

impl PathCollection {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_vertices(&self) -> usize {
        self.paths.iter().map(Vec::len).sum()
    }
}

/// Extra edges targeted at a hop bound. `verified` means both halves of the
/// contract were checked: edges lie in TC(G) and the bound holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortcutSet {
    pub edges: Vec<(usize, usize)>,
    /// Hop bound this set was built for; 0 means not yet targeted.
    pub d_target: usize,
    pub verified: bool,
}

impl ShortcutSet {
    pub fn empty() -> Self {
        ShortcutSet { edges: Vec::new(), d_target: 0, verified: false }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edge-list text with a "# shortcut d=<D> verified=<bool>" header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# shortcut d={} verified={}\n", self.d_target, self.verified);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the `to_text` format. Lines other than the header and "u v"
    /// pairs are rejected.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty shortcut file")?;
        let rest = header
            .strip_prefix("# shortcut d=")
            .ok_or("missing \"# shortcut\" header")?;
        let (d_str, v_str) = rest
            .split_once(" verified=")
            .ok_or("malformed shortcut header")?;
        let d_target: usize = d_str.parse().map_err(|_| "bad d value in header")?;
        let verified: bool = v_str.trim().parse().map_err(|_| "bad verified flag in header")?;
        let mut edges = Vec::new();
        for (i, raw) in lines.enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let bad = || format!("malformed shortcut edge at line {}", i + 2);
            let u: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            let v: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
            if it.next().is_some() {
                return Err(bad());
            }
            edges.push((u, v));
        }
        Ok(ShortcutSet { edges, d_target, verified })
    }
}

/// Oversampling constants and retry budget for the Las-Vegas construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingParams {
    pub c_path: f64,
    pub c_vertex: f64,
    pub max_retries: usize,
    pub seed: u64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams { c_path: 4.0, c_vertex: 4.0, max_retries: 4, seed: 0 }
    }
}

impl SamplingParams {
    pub(crate) fn validate(&self) {
        assert!(self.c_path >= 1.0 && self.c_vertex >= 1.0, "sampling constants must be >= 1");
    }

    /// Copy with both constants doubled per retry attempt.
    pub(crate) fn scaled(&self, attempt: usize) -> SamplingParams {
        let factor = (1u64 << attempt.min(62)) as f64;
        SamplingParams {
            c_path: self.c_path * factor,
            c_vertex: self.c_vertex * factor,
            ..*self
        }
    }
}

/// Minimum vertex-disjoint path cover of the condensation's transitive
/// closure, mapped back to original vertices via each component's smallest
/// member.
///
/// `closure` must be the transitive closure of `cond.dag()`. The cover is
/// computed by maximum bipartite matching over the closure's non-reflexive
/// pairs: a matched pair (u,v) chains u before v, and the number of chains is
/// the component count minus the matching size.
pub fn path_cover(cond: &Condensation, closure: &BitMatrix) -> PathCollection {
    let c = cond.component_count();
    assert_eq!(closure.rows(), c, "closure must cover the condensation dag");

    // match_of_right[v] = left endpoint currently matched into v.
    let mut match_of_right: Vec<Option<usize>> = vec![None; c];
    let mut visited = vec![false; c];

    fn try_augment(
        u: usize,
        closure: &BitMatrix,
        visited: &mut [bool],
        match_of_right: &mut [Option<usize>],
    ) -> bool {
        for v in closure.row_ones(u) {
            if v == u || visited[v] {
                continue;
            }
            visited[v] = true;
            let free = match match_of_right[v] {
                None => true,
                Some(w) => try_augment(w, closure, visited, match_of_right),
            };
            if free {
                match_of_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    // Left vertices in ascending (topological) order keeps this deterministic.
    for u in 0..c {
        visited.iter_mut().for_each(|x| *x = false);
        try_augment(u, closure, &mut visited, &mut match_of_right);
    }

    let mut next: Vec<Option<usize>> = vec![None; c];
    let mut has_pred = vec![false; c];
    for v in 0..c {
        if let Some(u) = match_of_right[v] {
            next[u] = Some(v);
            has_pred[v] = true;
        }
    }

    let reps = cond.representatives();
    let mut paths = Vec::new();
    for (head, &covered) in has_pred.iter().enumerate() {
        if covered {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(head);
        while let Some(v) = cur {
            path.push(reps[v]);
            cur = next[v];
        }
        paths.push(path);
    }
    debug_assert_eq!(paths.iter().map(Vec::len).sum::<usize>(), c);
    // Disjointness makes head vertices unique, so this order is total.
    paths.sort_by_key(|p| p[0]);
    PathCollection { paths, disjoint: true }
}

/// Independently keeps each path with probability min(1, c_path·ln n / d) and
/// each vertex with probability min(1, c_vertex·ln n / d).
///
/// The PRNG draw order is fixed (paths in collection order, then vertices
/// ascending), so for one seed a larger constant keeps a superset.
pub fn sample_shortcut_candidates(
    p: &PathCollection,
    n: usize,
    d: usize,
    params: &SamplingParams,
) -> (PathCollection, SourceSet) {
    assert!(d >= 1, "hop target must be at least 1");
    params.validate();
    let ln_n = (n.max(2) as f64).ln();
    let p_path = (params.c_path * ln_n / d as f64).min(1.0);
    let p_vertex = (params.c_vertex * ln_n / d as f64).min(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let kept_paths: Vec<Vec<usize>> = p
        .paths
        .iter()
        .filter(|_| rng.random::<f64>() < p_path)
        .cloned()
        .collect();
    let kept_vertices: Vec<usize> =
        (0..n).filter(|_| rng.random::<f64>() < p_vertex).collect();

    let pprime = PathCollection { paths: kept_paths, disjoint: p.disjoint };
    let vprime = SourceSet::new(kept_vertices, n).expect("sampled vertices are valid");
    (pprime, vprime)
}

/// True when both sampling probabilities saturate at 1, i.e. retrying with
/// larger constants cannot change the sample.
pub(crate) fn sampling_saturated(n: usize, d: usize, params: &SamplingParams) -> bool {
    let ln_n = (n.max(2) as f64).ln();
    params.c_path * ln_n / d as f64 >= 1.0 && params.c_vertex * ln_n / d as f64 >= 1.0
}

/// For every sampled vertex v and sampled path p, the edge from v to the
/// first vertex of p (in path order) reachable from v. Self-pairs are
/// skipped; a vertex pointing at itself shortens nothing.
pub fn shortcut_edges(
    g: &DiGraph,
    pprime: &PathCollection,
    vprime: &SourceSet,
) -> ShortcutSet {
    shortcut_edges_with_closure(pprime, vprime, &transitive_closure(g))
}

fn shortcut_edges_with_closure(
    pprime: &PathCollection,
    vprime: &SourceSet,
    closure: &BitMatrix,
) -> ShortcutSet {
    let mut edges = std::collections::BTreeSet::new();
    for &v in vprime.ids() {
        for path in &pprime.paths {
            if let Some(&w) = path.iter().find(|&&w| closure.get(v, w)) {
                if w != v {
                    edges.insert((v, w));
                }
            }
        }
    }
    ShortcutSet { edges: edges.into_iter().collect(), d_target: 0, verified: false }
}

/// Outcome of a shortcut construction, with enough detail to report the
/// Las-Vegas behavior.
#[derive(Debug, Clone)]
pub struct BuildReport {
    pub shortcut: ShortcutSet,
    /// Attempts beyond the first (0 = first sample verified).
    pub retries: usize,
    pub fallback: bool,
    /// Requested d exceeded the ⌈√n⌉ ceiling and was reduced to it.
    pub clamped: bool,
    pub cover_size: usize,
    pub sampled_paths: usize,
    pub sampled_vertices: usize,
}

/// Builds a verified d-shortcut. Sampling failures retry with doubled
/// constants up to `params.max_retries`, after which all closure edges (minus
/// existing edges and self-pairs) are inserted; that fallback always
/// verifies, so the returned set is always verified.
pub fn build_d_shortcut(g: &DiGraph, d: usize, params: &SamplingParams) -> BuildReport {
    assert!(d >= 1, "hop target must be at least 1");
    params.validate();
    let n = g.n();
    let cap = ((n as f64).sqrt().ceil() as usize).max(1);
    let (d_eff, clamped) = if d > cap { (cap, true) } else { (d, false) };

    let closure = transitive_closure(g);
    let cond = scc_condense(g);
    let dag_closure = transitive_closure(cond.dag());
    let cover = path_cover(&cond, &dag_closure);

    let mut last_sampled;
    let mut attempt = 0usize;
    loop {
        let scaled = params.scaled(attempt);
        let (pp, vp) = sample_shortcut_candidates(&cover, n, d_eff, &scaled);
        last_sampled = (pp.len(), vp.len());
        let mut h = shortcut_edges_with_closure(&pp, &vp, &closure);
        h.d_target = d_eff;
        if verify_with_closure(g, &h, &closure) {
            h.verified = true;
            return BuildReport {
                shortcut: h,
                retries: attempt,
                fallback: false,
                clamped,
                cover_size: cover.len(),
                sampled_paths: pp.len(),
                sampled_vertices: vp.len(),
            };
        }
        if attempt >= params.max_retries || sampling_saturated(n, d_eff, &scaled) {
            break;
        }
        attempt += 1;
    }

    let h = ShortcutSet {
        edges: fallback_edges(g, &closure),
        d_target: d_eff,
        verified: true,
    };
    debug_assert!(verify_with_closure(g, &h, &closure));
    BuildReport {
        shortcut: h,
        retries: attempt,
        fallback: true,
        clamped,
        cover_size: cover.len(),
        sampled_paths: last_sampled.0,
        sampled_vertices: last_sampled.1,
    }
}

/// Deterministic fallback content: every non-reflexive closure pair not
/// already an edge. Diam(G ∪ H) = 1 on reachable pairs, so any hop target
/// >= 1 verifies.
pub(crate) fn fallback_edges(g: &DiGraph, closure: &BitMatrix) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..g.n() {
        for v in closure.row_ones(u) {
            if u != v && !g.has_edge(u, v) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Checks the full shortcut contract: every edge of `h` lies in TC(G), and
/// for every vertex u the d_target-hop closure of G ∪ H equals u's exact
/// reach set in G. The sweep over u runs in parallel inside the bounded
/// search.
pub fn verify_d_shortcut(g: &DiGraph, h: &ShortcutSet) -> bool {
    verify_with_closure(g, h, &transitive_closure(g))
}

pub(crate) fn verify_with_closure(g: &DiGraph, h: &ShortcutSet, closure: &BitMatrix) -> bool {
    let n = g.n();
    if h.edges.iter().any(|&(u, v)| u >= n || v >= n || !closure.get(u, v)) {
        return false;
    }
    let aug = g.with_extra_edges(&h.edges);
    let bounded = bounded_hop_reach(&aug, &SourceSet::all(n), h.d_target);
    bounded.rows() == closure
}
