//! Paths-direachability: for each source dipath p, find every vertex z
//! reachable from p within a hop budget together with v_p(z), the last vertex
//! on p that reaches z within that budget.
//!
//! One budget unit is one max-min product: the left matrix carries 1-based
//! sequence positions, the right matrix carries adjacency as ±∞, and taking
//! the row maximum against the previous positions extends every reach set by
//! one hop while keeping, per reached vertex, the witness that lies latest in
//! the sequence order. Re-sorting each sequence between steps (by label
//! position on p, then by a condensation-topological vertex order ζ) is what
//! makes "latest in sequence order" mean "latest on p".

use std::collections::{BTreeMap, HashMap};

use crate::bitmat::{add_identity, adjacency_matrix, bmm, restrict_rows, BitMatrix};
use crate::graph::{scc_condense, DiGraph, ReachResult, SourceSet};
use crate::maxmin::{maxmin_product, MaxMinMatrix, MaxMinValue};
use crate::shortcut::PathCollection;

/// One sequence element: a reached vertex and its current v_p label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeqElem {
    pub vertex: usize,
    /// Last vertex of the origin path known to reach `vertex` within the
    /// hops spent so far.
    pub label: usize,
}

/// Working state of the iterated one-hop step: one growing vertex sequence
/// per origin path, each element labeled with its v_p value.
///
/// The 1-based position of an element is its index plus one; vertices are
/// distinct within a sequence, so positions are strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSet {
    origin: Vec<Vec<usize>>,
    seqs: Vec<Vec<SeqElem>>,
}

impl SequenceSet {
    /// Budget-0 state: each sequence is its origin path, every vertex
    /// labeling itself.
    pub fn initial(paths: &PathCollection) -> SequenceSet {
        let origin = paths.paths.clone();
        let seqs = origin
            .iter()
            .map(|p| p.iter().map(|&v| SeqElem { vertex: v, label: v }).collect())
            .collect();
        SequenceSet { origin, seqs }
    }

    pub fn sequences(&self) -> &[Vec<SeqElem>] {
        &self.seqs
    }

    pub fn origin_paths(&self) -> &[Vec<usize>] {
        &self.origin
    }
}

/// Final per-path answer: reached vertices with their v_p labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PdrResult {
    /// For each input path, (z, v_p(z)) pairs sorted by z.
    pub per_path: Vec<Vec<(usize, usize)>>,
}

impl PdrResult {
    /// Text form: a "# path i" marker per path, then one "z v_p(z)" line per
    /// reached vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, entries) in self.per_path.iter().enumerate() {
            out.push_str(&format!("# path {i}\n"));
            for &(z, label) in entries {
                out.push_str(&format!("{z} {label}\n"));
            }
        }
        out
    }

    /// Label of z on path `path`, if reached.
    pub fn label_of(&self, path: usize, z: usize) -> Option<usize> {
        self.per_path[path]
            .binary_search_by_key(&z, |&(v, _)| v)
            .ok()
            .map(|i| self.per_path[path][i].1)
    }
}

/// Shared per-graph data for the step: the ζ vertex order and adjacency in
/// max-min form.
struct StepContext {
    /// zeta_rank[v] = position of v in the condensation-topological order,
    /// extended by vertex id inside each component.
    zeta_rank: Vec<usize>,
    adjacency: MaxMinMatrix,
}

impl StepContext {
    fn new(g: &DiGraph) -> StepContext {
        let n = g.n();
        let scc = scc_condense(g);
        let mut order: Vec<usize> = (0..n).collect();
        // Component ids are already topological; vertex id breaks ties.
        order.sort_by_key(|&v| (scc.scc_id()[v], v));
        let mut zeta_rank = vec![0usize; n];
        for (rank, &v) in order.iter().enumerate() {
            zeta_rank[v] = rank;
        }
        let mut adjacency = MaxMinMatrix::neg_inf(n, n);
        for (u, v) in g.edges() {
            adjacency.set(u, v, MaxMinValue::PosInf);
        }
        StepContext { zeta_rank, adjacency }
    }
}

fn step_with_context(g: &DiGraph, seqs: &SequenceSet, ctx: &StepContext) -> SequenceSet {
    let n = g.n();
    let q_count = seqs.seqs.len();
    let mut b = MaxMinMatrix::neg_inf(q_count, n);
    for (qi, q) in seqs.seqs.iter().enumerate() {
        for (idx, e) in q.iter().enumerate() {
            b.set(qi, e.vertex, MaxMinValue::Finite(idx as u64 + 1));
        }
    }
    let c = maxmin_product(&b, &ctx.adjacency);

    let mut new_seqs = Vec::with_capacity(q_count);
    for (qi, q) in seqs.seqs.iter().enumerate() {
        let pos_on_p: HashMap<usize, usize> = seqs.origin[qi]
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let mut next: Vec<SeqElem> = Vec::with_capacity(q.len());
        for z in 0..n {
            let cv = c.get(qi, z);
            let bv = b.get(qi, z);
            let best = cv.max(bv);
            let Some(j) = best.finite() else { continue };
            let witness = q[j as usize - 1];
            if cv > bv {
                // A one-hop witness later in q than z's own position (if
                // any); its label moves to z.
                debug_assert!(g.has_edge(witness.vertex, z));
                next.push(SeqElem { vertex: z, label: witness.label });
            } else {
                // z keeps its own entry. On a tie the product's maximum can
                // only have come through a self-loop at z: positions are
                // unique in q, so no other in-neighbor carries z's position.
                debug_assert_eq!(witness.vertex, z);
                debug_assert!(cv != bv || g.has_edge(z, z));
                next.push(SeqElem { vertex: z, label: witness.label });
            }
        }
        // The inter-step order: group by how late the label sits on p, then
        // ζ within a group. The next product's max then prefers witnesses
        // with later labels.
        next.sort_by_key(|e| (pos_on_p[&e.label], ctx.zeta_rank[e.vertex]));
        new_seqs.push(next);
    }
    SequenceSet { origin: seqs.origin.clone(), seqs: new_seqs }
}

/// One max-min hop: extends every sequence by the vertices reachable in one
/// more edge, updating v_p labels and restoring the inter-step order.
pub fn ohsdr_step(g: &DiGraph, seqs: &SequenceSet) -> SequenceSet {
    step_with_context(g, seqs, &StepContext::new(g))
}

/// Iterates the one-hop step `hops` times from the budget-0 state.
///
/// Each input path must be a dipath in TC(G): consecutive path vertices
/// connected by reachability. The result reports, per path and per reached
/// vertex z, the last path vertex that reaches z within the budget.
pub fn pdr_solve(g: &DiGraph, paths: &PathCollection, hops: usize) -> PdrResult {
    assert!(hops >= 1, "hop budget must be at least 1");
    let ctx = StepContext::new(g);
    let mut seqs = SequenceSet::initial(paths);
    for _ in 0..hops {
        seqs = step_with_context(g, &seqs, &ctx);
    }
    let per_path = seqs
        .seqs
        .iter()
        .map(|q| {
            let sorted: BTreeMap<usize, usize> =
                q.iter().map(|e| (e.vertex, e.label)).collect();
            sorted.into_iter().collect()
        })
        .collect();
    PdrResult { per_path }
}

/// Bounded-hop multi-source reachability as `hops` rectangular Boolean
/// products of the source-indicator rows with A+I.
pub fn dr_solve(g: &DiGraph, s: &SourceSet, hops: usize) -> ReachResult {
    let a = add_identity(&adjacency_matrix(g));
    let mut b = restrict_rows(&BitMatrix::identity(g.n()), s);
    for _ in 0..hops {
        let next = bmm(&b, &a);
        if next == b {
            break;
        }
        b = next;
    }
    ReachResult::new(s.clone(), b)
}
