//! Multi-source directed reachability via diameter-reducing shortcuts and
//! packed Boolean matrix products.
//!
//! The toolkit answers one question in several ways: given a digraph `G` and a
//! source set `S`, which vertices are reachable from each source? The
//! baselines are per-source BFS ([`graph::multi_source_reach`]) and transitive
//! closure by repeated squaring ([`bitmat::transitive_closure`]). The
//! interesting solvers first add a verified set of shortcut edges `H ⊆ TC(G)`
//! that brings the hop diameter of `G ∪ H` down to a target `D`
//! ([`shortcut::build_d_shortcut`]), then answer all sources at once with
//! `D − 1` rectangular Boolean products ([`solver::direach`]). The recursive
//! variant ([`recur::recur_direach`]) builds the shortcut itself through a
//! bounded-hop path-reachability subroutine ([`pdr::pdr_solve`]) instead of a
//! full closure, nesting the same trick `k` levels deep.
//!
//! All solvers are exact; randomized construction is wrapped in
//! verify-and-retry so an unverified shortcut set never escapes. The
//! [`planner`] module holds the numeric side: the rectangular
//! matrix-multiplication exponent table ω(σ), the derived cost curves g_k and
//! their μ-density variants, and the parameter choices (δ, D, feasibility
//! intervals) the solvers consume.

pub mod bitmat;
pub mod graph;
pub mod maxmin;
pub mod pdr;
pub mod planner;
pub mod recur;
pub mod shortcut;
pub mod solver;
