//! The two-step multi-source solver and the dispatch facade over all
//! algorithm variants.
//!
//! The two-step solver builds a verified D-shortcut H, forms A′ =
//! adjacency(G ∪ H) + I, restricts A′ to the source rows, and multiplies
//! D−1 times. The restriction of A′ (not A) means reflexive bits are present
//! from the first step, so D = 1 already yields the one-hop closure
//! including self. δ-selection picks D = n^δ from the planner's ω curve,
//! with a sparse variant when a density exponent is known.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::bitmat::{add_identity, adjacency_matrix, bmm, restrict_rows, transitive_closure};
use crate::graph::{multi_source_reach, DiGraph, ReachResult, SourceSet};
use crate::planner::Planner;
use crate::recur::{build_recursive_shortcut, RecurTrace};
use crate::shortcut::{build_d_shortcut, SamplingParams, ShortcutSet};

/// Smallest δ the selectors return. Keeps δ inside (0, ½] when the sparse
/// formula dips to or below zero; output correctness never depends on δ.
pub const MIN_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Per-source BFS.
    Naive,
    /// Full transitive closure by repeated squaring, then row restriction.
    Tc,
    /// Shortcut-then-product two-step solver.
    Direach,
    /// Recursive shortcut construction, then the same product sweep.
    Recur,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAlgorithm(pub String);

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown algorithm \"{}\" (expected naive, tc, direach, or recur)",
            self.0
        )
    }
}

impl std::error::Error for UnknownAlgorithm {}

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Algorithm::Naive),
            "tc" => Ok(Algorithm::Tc),
            "direach" => Ok(Algorithm::Direach),
            "recur" => Ok(Algorithm::Recur),
            other => Err(UnknownAlgorithm(other.to_string())),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Naive => "naive",
            Algorithm::Tc => "tc",
            Algorithm::Direach => "direach",
            Algorithm::Recur => "recur",
        })
    }
}

/// Everything `solve` needs beyond the instance itself.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub algorithm: Algorithm,
    /// Fixed δ ∈ (0, ½]; bypasses the planner-driven selection.
    pub delta_override: Option<f64>,
    /// Known density exponent μ ∈ [1, 2]; switches to the sparse δ formula.
    pub mu_hint: Option<f64>,
    /// Recursion depth, recur only. Capped at 8.
    pub k: usize,
    pub sampling: SamplingParams,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            algorithm: Algorithm::Direach,
            delta_override: None,
            mu_hint: None,
            k: 0,
            sampling: SamplingParams::default(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) {
        if let Some(d) = self.delta_override {
            assert!(d > 0.0 && d <= 0.5, "delta override must lie in (0, 0.5]");
        }
        if let Some(mu) = self.mu_hint {
            assert!((1.0..=2.0).contains(&mu), "mu hint must lie in [1, 2]");
        }
        assert!(self.k <= 8, "recursion depth capped at 8");
    }
}

/// Per-solve report: the parameters actually used and the shortcut
/// construction's Las-Vegas outcome.
#[derive(Debug, Clone)]
pub struct SolveStats {
    pub algorithm: Algorithm,
    pub sigma: f64,
    /// 0 for the baselines, which use no δ.
    pub delta: f64,
    /// Hop target D; 0 for the baselines.
    pub d: usize,
    pub h_edges: usize,
    pub retries: usize,
    pub fallback: bool,
    pub wall_ms: f64,
    /// Per-level breakdown, recur only.
    pub trace: Option<RecurTrace>,
    /// The shortcut actually used, kept for dump-style inspection.
    pub shortcut: Option<ShortcutSet>,
}

impl SolveStats {
    /// Single key=value line, trace and shortcut elided.
    pub fn summary(&self) -> String {
        format!(
            "algorithm={} sigma={:.6} delta={:.6} d={} h_edges={} retries={} fallback={} wall_ms={:.3}",
            self.algorithm,
            self.sigma,
            self.delta,
            self.d,
            self.h_edges,
            self.retries,
            self.fallback,
            self.wall_ms
        )
    }
}

fn clamp_delta(raw: f64) -> f64 {
    raw.clamp(MIN_DELTA, 0.5)
}

/// δ = 1 − ω(σ)/3, clamped into (0, ½].
pub fn choose_delta_dense(planner: &Planner, sigma: f64) -> f64 {
    assert!((0.0..=1.0).contains(&sigma), "sigma must lie in [0, 1]");
    clamp_delta(1.0 - planner.omega(sigma) / 3.0)
}

/// δ = (1 + μ − ω(σ))/3, clamped into (0, ½]. Coincides with the dense
/// formula at μ = 2.
pub fn choose_delta_sparse(planner: &Planner, sigma: f64, mu: f64) -> f64 {
    assert!((0.0..=1.0).contains(&sigma), "sigma must lie in [0, 1]");
    assert!((1.0..=2.0).contains(&mu), "mu must lie in [1, 2]");
    clamp_delta((1.0 + mu - planner.omega(sigma)) / 3.0)
}

/// D = max(1, round(n^δ)).
pub fn hops_for_delta(n: usize, delta: f64) -> usize {
    assert!(delta > 0.0 && delta <= 0.5, "delta must lie in (0, 0.5]");
    ((n as f64).powf(delta).round() as usize).max(1)
}

/// Product sweep against a caller-supplied shortcut: A′ = adjacency(G∪H)+I,
/// B⁽¹⁾ = A′ restricted to S rows, then D−1 products (short-circuiting on a
/// fixpoint).
///
/// Output equals exact reachability when `h` meets the d-shortcut contract
/// for this `d`; otherwise it is the d-hop closure of G ∪ H on S rows.
pub fn direach_with_shortcut(
    g: &DiGraph,
    s: &SourceSet,
    d: usize,
    h: &ShortcutSet,
) -> ReachResult {
    assert!(d >= 1, "hop target must be at least 1");
    let aug = g.with_extra_edges(&h.edges);
    let a_prime = add_identity(&adjacency_matrix(&aug));
    let mut b = restrict_rows(&a_prime, s);
    for _ in 1..d {
        let next = bmm(&b, &a_prime);
        if next == b {
            break;
        }
        b = next;
    }
    ReachResult::new(s.clone(), b)
}

/// The two-step solver: build a verified d-shortcut, then run the product
/// sweep. Always exact; the shortcut fallback guarantees the hop bound.
pub fn direach(g: &DiGraph, s: &SourceSet, d: usize, params: &SamplingParams) -> ReachResult {
    let report = build_d_shortcut(g, d, params);
    direach_with_shortcut(g, s, d, &report.shortcut)
}

/// Dispatches on `cfg.algorithm` and reports the parameters used.
pub fn solve(
    g: &DiGraph,
    s: &SourceSet,
    cfg: &SolveConfig,
    planner: &Planner,
) -> (ReachResult, SolveStats) {
    cfg.validate();
    let n = g.n();
    let sigma = s.sigma(n);
    let start = Instant::now();

    let chosen_delta = || {
        cfg.delta_override.unwrap_or_else(|| match cfg.mu_hint {
            Some(mu) => choose_delta_sparse(planner, sigma, mu),
            None => choose_delta_dense(planner, sigma),
        })
    };

    let mut stats = SolveStats {
        algorithm: cfg.algorithm,
        sigma,
        delta: 0.0,
        d: 0,
        h_edges: 0,
        retries: 0,
        fallback: false,
        wall_ms: 0.0,
        trace: None,
        shortcut: None,
    };

    let result = match cfg.algorithm {
        Algorithm::Naive => multi_source_reach(g, s),
        Algorithm::Tc => {
            let closure = transitive_closure(g);
            ReachResult::new(s.clone(), restrict_rows(&closure, s))
        }
        Algorithm::Direach => {
            let delta = chosen_delta();
            let d = hops_for_delta(n, delta);
            let report = build_d_shortcut(g, d, &cfg.sampling);
            let result = direach_with_shortcut(g, s, d, &report.shortcut);
            stats.delta = delta;
            stats.d = d;
            stats.h_edges = report.shortcut.len();
            stats.retries = report.retries;
            stats.fallback = report.fallback;
            stats.shortcut = Some(report.shortcut);
            result
        }
        Algorithm::Recur => {
            let delta = chosen_delta();
            let d = hops_for_delta(n, delta);
            let (h, levels) =
                build_recursive_shortcut(g, d, cfg.k, &cfg.sampling, planner);
            let result = direach_with_shortcut(g, s, d, &h);
            let trace = RecurTrace { levels };
            let top = &trace.levels[0];
            stats.delta = delta;
            stats.d = d;
            stats.h_edges = h.len();
            stats.retries = top.retries;
            stats.fallback = top.fallback;
            stats.shortcut = Some(h);
            stats.trace = Some(trace);
            result
        }
    };

    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    (result, stats)
}
