//! Recursive shortcut construction: depth k answers the sampled
//! vertices-to-paths first-reachable queries through the sequence solver on
//! the reversed graph, whose own hop budget is covered by a depth-(k−1)
//! shortcut. Depth 0 is the direct closure-query construction.
//!
//! The per-level hop budget D′ = n^{δ′} comes from balancing the previous
//! level's cost curve against ω(σ)+δ; δ′ shrinks as the sampled path count
//! grows. Every level keeps the sample-verify-retry-fallback discipline, so
//! the returned set is always verified and the final product sweep is exact
//! at every depth.

use crate::bitmat::transitive_closure;
use crate::graph::{scc_condense, DiGraph, ReachResult, SourceSet};
use crate::pdr::pdr_solve;
use crate::planner::Planner;
use crate::shortcut::{
    fallback_edges, path_cover, sample_shortcut_candidates, sampling_saturated,
    verify_with_closure, BuildReport, PathCollection, SamplingParams, ShortcutSet,
};
use crate::solver::{direach_with_shortcut, hops_for_delta};

use crate::shortcut::build_d_shortcut;

/// One construction level, top first. σ and δ are the values the level's
/// parent chose for it (the API caller fills the top entry); d, sample sizes,
/// retries and fallback describe the level's own final run.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub depth: usize,
    pub sigma: f64,
    pub delta: f64,
    pub d: usize,
    pub p_sampled: usize,
    pub v_sampled: usize,
    pub retries: usize,
    pub fallback: bool,
}

impl LevelStats {
    fn unreached(depth: usize) -> LevelStats {
        LevelStats {
            depth,
            sigma: 0.0,
            delta: 0.0,
            d: 0,
            p_sampled: 0,
            v_sampled: 0,
            retries: 0,
            fallback: false,
        }
    }
}

/// Per-level construction report, exactly k+1 entries, top level first.
/// Levels that never ran (sampling produced no paths before the level was
/// reached) report zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurTrace {
    pub levels: Vec<LevelStats>,
}

impl RecurTrace {
    /// One line per level, two spaces of indent per depth step.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, l) in self.levels.iter().enumerate() {
            out.push_str(&"  ".repeat(i));
            out.push_str(&format!(
                "level {}: sigma={:.6} delta={:.6} d={} paths={} vertices={} retries={} fallback={}\n",
                l.depth, l.sigma, l.delta, l.d, l.p_sampled, l.v_sampled, l.retries, l.fallback
            ));
        }
        out
    }
}

/// Balance δ at depth k: the δ ∈ (0, ½] where the depth-(k−1) cost curve at
/// path exponent 1−2δ meets ω(σ)+δ. Depth 0 balances against the plain
/// product bound 2+x, which closes to δ = 1 − ω(σ)/3.
///
/// The left side is non-increasing in δ and the right side increasing, and
/// the left exceeds the right at δ = 0, so the root exists and bisection
/// converges; the residual at the returned δ is below 1e-9.
pub fn choose_delta_recursive(planner: &Planner, sigma: f64, k: usize) -> f64 {
    assert!((0.0..=1.0).contains(&sigma), "sigma must lie in [0, 1]");
    let w = planner.omega(sigma);
    let lhs = |x: f64| {
        if k == 0 {
            2.0 + x
        } else {
            planner.gk(x, k - 1)
        }
    };
    let f = |delta: f64| lhs(1.0 - 2.0 * delta) - (w + delta);
    debug_assert!(f(0.0) > 0.0);
    if f(0.5) >= 0.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn depth0_levels(report: &BuildReport, n: usize) -> Vec<LevelStats> {
    let d = report.shortcut.d_target;
    let delta = if n > 1 { (d as f64).ln() / (n as f64).ln() } else { 0.0 };
    vec![LevelStats {
        depth: 0,
        sigma: 0.0,
        delta,
        d,
        p_sampled: report.sampled_paths,
        v_sampled: report.sampled_vertices,
        retries: report.retries,
        fallback: report.fallback,
    }]
}

/// Builds a verified d-shortcut with `depth` levels of recursion below the
/// top one. The top entry's σ is the caller's to fill (its δ defaults to the
/// realized ln d / ln n); every deeper entry carries the σ and δ its parent
/// chose.
pub fn build_recursive_shortcut(
    g: &DiGraph,
    d: usize,
    depth: usize,
    params: &SamplingParams,
    planner: &Planner,
) -> (ShortcutSet, Vec<LevelStats>) {
    assert!(d >= 1, "hop target must be at least 1");
    assert!(depth <= 8, "recursion depth capped at 8");
    params.validate();

    if depth == 0 {
        let report = build_d_shortcut(g, d, params);
        let levels = depth0_levels(&report, g.n());
        return (report.shortcut, levels);
    }

    let n = g.n();
    let cap = ((n as f64).sqrt().ceil() as usize).max(1);
    let d_eff = d.min(cap);
    let top_delta = if n > 1 { (d_eff as f64).ln() / (n as f64).ln() } else { 0.0 };

    let closure = transitive_closure(g);
    let cond = scc_condense(g);
    let dag_closure = transitive_closure(cond.dag());
    let cover = path_cover(&cond, &dag_closure);

    let mut last_sub: Option<Vec<LevelStats>> = None;
    let mut last_sampled;
    let mut attempt = 0usize;
    loop {
        let scaled = params.scaled(attempt);
        let (pp, vp) = sample_shortcut_candidates(&cover, n, d_eff, &scaled);
        last_sampled = (pp.len(), vp.len());

        let mut edges = std::collections::BTreeSet::new();
        let mut sub: Option<Vec<LevelStats>> = None;
        if !pp.is_empty() && !vp.ids().is_empty() {
            let sigma_inner = if n > 1 {
                (pp.len() as f64).ln() / (n as f64).ln()
            } else {
                0.0
            };
            let delta_inner = choose_delta_recursive(planner, sigma_inner, depth - 1);
            let d_inner = hops_for_delta(n, delta_inner);
            let (h_inner, mut sub_levels) =
                build_recursive_shortcut(g, d_inner, depth - 1, params, planner);
            sub_levels[0].sigma = sigma_inner;
            sub_levels[0].delta = delta_inner;

            // The inner shortcut is verified, so d_inner hops on the
            // reversed augmented graph see every reachable pair; the last
            // label on a reversed path is the first vertex of the forward
            // path the labeled vertex reaches.
            let rev = g.with_extra_edges(&h_inner.edges).reversed();
            let rev_paths = PathCollection {
                paths: pp
                    .paths
                    .iter()
                    .map(|p| p.iter().rev().copied().collect())
                    .collect(),
                disjoint: pp.disjoint,
            };
            let labels = pdr_solve(&rev, &rev_paths, d_inner);

            let mut in_vprime = vec![false; n];
            for &v in vp.ids() {
                in_vprime[v] = true;
            }
            for per_path in &labels.per_path {
                for &(z, w) in per_path {
                    if in_vprime[z] && w != z {
                        edges.insert((z, w));
                    }
                }
            }
            sub = Some(sub_levels);
        }
        if sub.is_some() {
            last_sub = sub;
        }

        let mut h = ShortcutSet {
            edges: edges.into_iter().collect(),
            d_target: d_eff,
            verified: false,
        };
        if verify_with_closure(g, &h, &closure) {
            h.verified = true;
            let mut levels = vec![LevelStats {
                depth,
                sigma: 0.0,
                delta: top_delta,
                d: d_eff,
                p_sampled: pp.len(),
                v_sampled: vp.len(),
                retries: attempt,
                fallback: false,
            }];
            levels.extend(
                last_sub.unwrap_or_else(|| (0..depth).rev().map(LevelStats::unreached).collect()),
            );
            debug_assert_eq!(levels.len(), depth + 1);
            return (h, levels);
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
    let mut levels = vec![LevelStats {
        depth,
        sigma: 0.0,
        delta: top_delta,
        d: d_eff,
        p_sampled: last_sampled.0,
        v_sampled: last_sampled.1,
        retries: attempt,
        fallback: true,
    }];
    levels.extend(
        last_sub.unwrap_or_else(|| (0..depth).rev().map(LevelStats::unreached).collect()),
    );
    debug_assert_eq!(levels.len(), depth + 1);
    (h, levels)
}

/// Depth-k solver: build the recursive shortcut, fill the top trace entry
/// with the source exponent, then run the product sweep. k = 0 is exactly
/// the direct two-step solver.
pub fn recur_direach(
    g: &DiGraph,
    s: &SourceSet,
    d: usize,
    k: usize,
    params: &SamplingParams,
    planner: &Planner,
) -> (ReachResult, RecurTrace) {
    let (h, mut levels) = build_recursive_shortcut(g, d, k, params, planner);
    levels[0].sigma = s.sigma(g.n());
    let result = direach_with_shortcut(g, s, d, &h);
    (result, RecurTrace { levels })
}
