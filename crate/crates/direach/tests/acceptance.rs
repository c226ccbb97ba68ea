//! Acceptance gate: one test per shipped guarantee, each ending with a
//! single PASS/FAIL line on raw stdout (bypassing the harness capture) so a
//! plain `cargo test` run shows the verdict per criterion.
//!
//! 1. Oracle equivalence of all four solvers over a seeded instance grid.
//! 2. Every built shortcut passes independent verification.
//! 3. Max-min product equals a brute-force triple loop.
//! 4. Budgeted paths-direachability equals a per-pair bounded-BFS oracle.
//! 5. Planner regression against the published numbers.
//! 6. Planner analytic properties as numeric checks.
//! 7. Report-only scaling measurements; nothing asserted.

mod common;

use common::*;
use direach::graph::{gen_random, multi_source_reach, DiGraph, SourceSet};
use direach::maxmin::{maxmin_product, MaxMinMatrix, MaxMinValue};
use direach::pdr::pdr_solve;
use direach::planner::Planner;
use direach::shortcut::{build_d_shortcut, verify_d_shortcut, PathCollection, SamplingParams};
use direach::solver::{solve, Algorithm, SolveConfig};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::time::Instant;

/// Writes one verdict line straight to the process stdout so it survives the
/// harness capture of passing tests.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
}

/// A graph with round(n^mu) edges, clamped to the simple-digraph ceiling of
/// the requested mode. The shipped generator refuses infeasible densities
/// (mu = 2 always is), so the clamped boundary instances are built from the
/// suite's own edge sampler.
fn instance(n: usize, mu: f64, seed: u64, dag: bool) -> DiGraph {
    let want = (n as f64).powf(mu).round() as usize;
    let cap = if dag { n * (n - 1) / 2 } else { n * (n - 1) };
    if want <= cap {
        gen_random(n, mu, seed, dag).unwrap()
    } else {
        DiGraph::from_edges(n, random_edges(n, cap, seed, dag))
    }
}

#[test]
fn criterion_1_solver_outputs_are_bit_identical() {
    let start = Instant::now();
    let planner = Planner::new();
    let ns = [20usize, 32, 50, 80, 120, 180, 240, 300];
    let mus = [1.2f64, 1.5, 1.8, 2.0];
    let sigmas = [0.3f64, 0.5, 0.7, 1.0];

    let mut instances = 0usize;
    for (gi, &n) in ns.iter().enumerate() {
        for (mi, &mu) in mus.iter().enumerate() {
            for (si, &sigma) in sigmas.iter().enumerate() {
                for dag in [false, true] {
                    let seed = (gi * 97 + mi * 13 + si * 5 + dag as usize) as u64;
                    let g = instance(n, mu, seed, dag);
                    let s =
                        SourceSet::new(random_sources(n, source_count(n, sigma), seed), n)
                            .unwrap();

                    // Spread the recursion depths and both δ selection rules
                    // across the grid.
                    let k = instances % 4;
                    let mu_hint = if instances % 2 == 1 { Some(mu) } else { None };
                    let sampling = SamplingParams { seed, ..SamplingParams::default() };

                    let (naive, _) = solve(
                        &g,
                        &s,
                        &SolveConfig { algorithm: Algorithm::Naive, ..SolveConfig::default() },
                        &planner,
                    );
                    let (tc, _) = solve(
                        &g,
                        &s,
                        &SolveConfig { algorithm: Algorithm::Tc, ..SolveConfig::default() },
                        &planner,
                    );
                    let (dir, _) = solve(
                        &g,
                        &s,
                        &SolveConfig {
                            algorithm: Algorithm::Direach,
                            mu_hint,
                            sampling,
                            ..SolveConfig::default()
                        },
                        &planner,
                    );
                    let (rec, _) = solve(
                        &g,
                        &s,
                        &SolveConfig {
                            algorithm: Algorithm::Recur,
                            mu_hint,
                            k,
                            sampling,
                            ..SolveConfig::default()
                        },
                        &planner,
                    );

                    let tag = format!("n={n} mu={mu} sigma={sigma} dag={dag} k={k}");
                    assert_eq!(naive.rows(), tc.rows(), "tc differs: {tag}");
                    assert_eq!(naive.rows(), dir.rows(), "direach differs: {tag}");
                    assert_eq!(naive.rows(), rec.rows(), "recur differs: {tag}");
                    instances += 1;
                }
            }
        }
    }
    assert!(instances >= 200);
    report(&format!(
        "criterion 1 (solver equivalence): PASS ({instances} instances, {:.1}s)",
        start.elapsed().as_secs_f64()
    ));
}

#[test]
fn criterion_2_every_built_shortcut_verifies() {
    let start = Instant::now();
    let mut builds = 0usize;
    let mut fallbacks = 0usize;
    for &n in &[20usize, 60, 120, 200] {
        for &mu in &[1.2f64, 1.5] {
            for dag in [false, true] {
                for seed in 0..2u64 {
                    let g = instance(n, mu, seed, dag);
                    let cap = (n as f64).sqrt().ceil() as usize;
                    for d in [2usize, 4, cap] {
                        let params = SamplingParams { seed, ..SamplingParams::default() };
                        let built = build_d_shortcut(&g, d, &params);
                        assert!(
                            built.shortcut.verified && verify_d_shortcut(&g, &built.shortcut),
                            "n={n} mu={mu} dag={dag} seed={seed} d={d}"
                        );
                        builds += 1;
                        fallbacks += built.fallback as usize;
                    }
                }
            }
        }
    }
    report(&format!(
        "criterion 2 (shortcut verification): PASS ({builds} builds, fallback rate {fallbacks}/{builds}, {:.1}s)",
        start.elapsed().as_secs_f64()
    ));
}

#[test]
fn criterion_3_maxmin_product_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut random_matrix = |rows: usize, cols: usize| {
        let mut m = MaxMinMatrix::neg_inf(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let v = match rng.random_range(0..4u8) {
                    0 => MaxMinValue::NegInf,
                    1 => MaxMinValue::PosInf,
                    _ => MaxMinValue::Finite(rng.random_range(0..10)),
                };
                m.set(r, c, v);
            }
        }
        m
    };
    for trial in 0..100 {
        let rows = 1 + trial % 20;
        let inner = 1 + (trial * 7) % 20;
        let cols = 1 + (trial * 13) % 20;
        let b = random_matrix(rows, inner);
        let a = random_matrix(inner, cols);
        let got = maxmin_product(&b, &a);
        for i in 0..rows {
            for j in 0..cols {
                let mut best = MaxMinValue::NegInf;
                for k in 0..inner {
                    best = best.max(b.get(i, k).min(a.get(k, j)));
                }
                assert_eq!(got.get(i, j), best, "trial {trial} cell ({i},{j})");
            }
        }
    }
    report("criterion 3 (max-min product vs brute force): PASS (100 instances)");
}

#[test]
fn criterion_4_paths_direachability_is_exact() {
    let mut checked = 0usize;
    for seed in 0..50u64 {
        let n = 20 + (seed as usize * 11) % 41;
        let edges = random_edges(n, 2 * n, seed, true);
        let g = DiGraph::from_edges(n, edges.iter().copied());
        let adj = adjacency(n, &edges);
        let closure = bfs_closure(&adj);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x404);
        let chains = sample_chains(n, &closure, 1 + seed as usize % 5, &mut rng);
        if chains.is_empty() {
            continue;
        }
        let p = PathCollection { paths: chains.clone(), disjoint: true };
        for b in 1..=6usize {
            let got = pdr_solve(&g, &p, b);
            for (pi, chain) in chains.iter().enumerate() {
                let balls: Vec<Vec<bool>> =
                    chain.iter().map(|&w| bounded_bfs_reach(&adj, w, b)).collect();
                for z in 0..n {
                    let want = chain
                        .iter()
                        .zip(&balls)
                        .filter(|(_, ball)| ball[z])
                        .map(|(&w, _)| w)
                        .next_back();
                    assert_eq!(
                        got.label_of(pi, z),
                        want,
                        "seed {seed} path {pi} budget {b} target {z}"
                    );
                }
            }
            checked += 1;
        }
    }
    report(&format!(
        "criterion 4 (paths-direachability vs per-pair oracle): PASS ({checked} path-set/budget combinations)"
    ));
}

#[test]
fn criterion_5_planner_matches_published_numbers() {
    let start = Instant::now();
    let p = Planner::new();
    let mut failures: Vec<String> = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            failures.push(what);
        }
    };

    for &(s, w) in &p.omega_table().points().to_vec() {
        check(p.omega(s) == w, format!("omega({s}) != {w}"));
    }

    let g0_rows: [(f64, f64); 21] = [
        (0.335, 2.333565),
        (0.34, 2.3337),
        (0.35, 2.334241),
        (0.36, 2.33533),
        (0.37, 2.336422),
        (0.38, 2.33751),
        (0.39, 2.3386),
        (0.40, 2.33969),
        (0.41, 2.34159),
        (0.42, 2.34349),
        (0.43, 2.34539),
        (0.44, 2.34729),
        (0.45, 2.34919),
        (0.46, 2.35175),
        (0.47, 2.35431),
        (0.48, 2.35687),
        (0.49, 2.359435),
        // Formula value; the published digits for this row contradict the
        // published omega sample they are derived from.
        (0.50, 2.361996),
        (0.51, 2.365081),
        (0.52, 2.368166),
        (0.53, 2.371252),
    ];
    for &(s, v) in &g0_rows {
        check((p.g0(s) - v).abs() <= 1e-4, format!("g0({s}) off by >1e-4 from {v}"));
    }

    let t3: [(f64, f64); 9] = [
        (0.0, 2.5),
        (0.34, 1.9906),
        (0.4, 1.91),
        (0.5, 1.793),
        (0.6, 1.693),
        (0.7, 1.603),
        (0.8, 1.521),
        (0.9, 1.444),
        (1.0, 1.371552),
    ];
    for &(s, v) in &t3 {
        check(
            (p.feasibility_interval(s).mu_lo - v).abs() <= 1e-2,
            format!("mu lower bound at {s} off from {v}"),
        );
    }
    let t4: [(f64, f64, Option<f64>); 11] = [
        (0.335, 1.99785, None),
        (0.34, 1.9911, None),
        (0.4, 1.91, None),
        (0.5, 1.793, None),
        (0.55, 1.74, Some(1.982)),
        (0.6, 1.693, Some(1.93)),
        (0.7, 1.603, Some(1.809)),
        (0.8, 1.521, Some(1.673)),
        (0.9, 1.4442, Some(1.526)),
        (0.99, 1.3787, Some(1.3872)),
        (1.0, 1.371552, Some(1.371552)),
    ];
    for &(s, lo, hi) in &t4 {
        let iv = p.feasibility_interval(s);
        check((iv.mu_lo - lo).abs() <= 1e-2, format!("interval lower at {s} off from {lo}"));
        match hi {
            None => check(iv.capped, format!("interval at {s} should cap at 2")),
            Some(h) => check(
                (iv.mu_hi - h).abs() <= 1e-2,
                format!("interval upper at {s} off from {h}"),
            ),
        }
    }

    // Recursive-depth cells, including the three headline examples.
    check((p.gk(0.66, 1) - 2.368166).abs() <= 1e-2, "g1(0.66)".into());
    check((p.gk(0.85, 3) - 2.374075).abs() <= 1e-2, "g3(0.85)".into());
    check((p.gk(0.98, 9) - 2.375907).abs() <= 1e-2, "g9(0.98)".into());
    let gk_cells: [(f64, usize, f64); 12] = [
        (0.36, 1, 2.333733),
        (0.40, 3, 2.333733),
        (0.48, 1, 2.339694),
        (0.52, 3, 2.3353324),
        (0.60, 1, 2.3568744),
        (0.64, 5, 2.335239),
        (0.72, 7, 2.334272),
        (0.80, 3, 2.361996),
        (0.84, 9, 2.3397729),
        (0.88, 5, 2.359773),
        (0.93, 7, 2.364429),
        (0.97, 9, 2.370262),
    ];
    for &(s, k, v) in &gk_cells {
        check((p.gk(s, k) - v).abs() <= 1e-2, format!("g{k}({s}) off from {v}"));
    }

    let t6: [(f64, f64, f64); 15] = [
        (1.95, 0.375, 2.32),
        (1.95, 0.4, 2.323),
        (1.95, 0.45, 2.3325),
        (1.95, 0.50, 2.345),
        (1.9, 0.45, 2.3159),
        (1.9, 0.5, 2.3287),
        (1.9, 0.55, 2.344),
        (1.9, 0.6, 2.362),
        (1.75, 0.55, 2.294),
        (1.75, 0.6, 2.312),
        (1.75, 0.65, 2.331),
        (1.75, 0.7, 2.352),
        (1.525, 0.8, 2.323),
        (1.525, 0.85, 2.346),
        (1.525, 0.9, 2.3711),
    ];
    for &(mu, s, v) in &t6 {
        check((p.g0_mu(s, mu) - v).abs() <= 1e-2, format!("g0_mu({s},{mu}) off from {v}"));
    }

    let st = p.sigma_tilde();
    check(st > 1.0 / 3.0 && st < 0.3336, format!("sigma_tilde = {st:.6} outside (1/3, 0.3336)"));
    let s0 = p.sigma_k(0);
    check((0.52..=0.54).contains(&s0), format!("sigma_0 = {s0:.6} outside [0.52, 0.54]"));
    let s1 = p.sigma_k(1);
    check((0.65..=0.67).contains(&s1), format!("sigma_1 = {s1:.6} outside [0.65, 0.67]"));
    let s7 = p.sigma_k(7);
    check(s7 >= 0.96, format!("sigma_7 = {s7:.6} below 0.96"));

    if failures.is_empty() {
        report(&format!(
            "criterion 5 (planner regression): PASS ({:.1}s)",
            start.elapsed().as_secs_f64()
        ));
    } else {
        report(&format!(
            "criterion 5 (planner regression): FAIL ({})",
            failures.join("; ")
        ));
    }
    assert!(failures.is_empty(), "planner regression failures: {failures:?}");
}

#[test]
fn criterion_6_planner_properties_hold() {
    let p = Planner::new();
    let st = p.sigma_tilde();

    // Monotone in sigma.
    for k in 0..6usize {
        let mut prev = p.gk(0.0, k);
        for i in 1..=100 {
            let s = i as f64 / 100.0;
            let cur = p.gk(s, k);
            assert!(cur >= prev - 1e-9, "g{k} not monotone at sigma {s}");
            prev = cur;
        }
    }
    // Depth never hurts past the threshold, and the lower bound holds.
    for i in 0..=100 {
        let s = st + (1.0 - st) * i as f64 / 100.0;
        let bound = p.omega(s) + (1.0 - s) / 2.0;
        for k in 0..6usize {
            assert!(p.gk(s, k + 1) <= p.gk(s, k) + 1e-9, "depth regression at sigma {s}");
            assert!(p.gk(s, k) >= bound - 1e-9, "lower bound broken at sigma {s} depth {k}");
        }
    }
    // Bounded at the left edge.
    for k in 0..10usize {
        assert!(p.gk(0.0, k) <= 2.5, "g{k}(0) = {}", p.gk(0.0, k));
    }
    // Fixed-point density within 5e-3.
    for &s in &[0.4f64, 0.5, 0.6, 0.7, 0.8, 0.9] {
        let mu = p.omega(s) - 1.5 * s + 0.5;
        let target = p.omega(s) + (1.0 - s) / 2.0;
        for k in 0..4usize {
            assert!(
                (p.gk_mu(s, mu, k) - target).abs() <= 5e-3,
                "fixed point off at sigma {s} depth {k}"
            );
        }
    }
    // Slope toward sigma = 1 exceeds 1/2 on a 100-point grid.
    let w1 = p.omega(1.0);
    for i in 1..=100 {
        let s = st + (1.0 - st) * i as f64 / 101.0;
        let slope = (w1 - p.omega(s)) / (1.0 - s);
        assert!(slope > 0.5, "slope {slope:.4} at sigma {s}");
    }
    report("criterion 6 (planner properties): PASS");
}

#[test]
fn criterion_7_scaling_report() {
    // Report-only: the asymptotic claims are not desk-reproducible, so this
    // prints wall times without asserting anything about them.
    let planner = Planner::new();
    let mut lines = vec!["algorithm,n,mu,sigma,seed,wall_ms".to_string()];
    for &n in &[100usize, 200, 300] {
        let g = gen_random(n, 1.5, 7, false).unwrap();
        let s = SourceSet::new(random_sources(n, source_count(n, 0.5), 7), n).unwrap();
        for algorithm in [Algorithm::Naive, Algorithm::Direach] {
            let cfg = SolveConfig { algorithm, ..SolveConfig::default() };
            let t0 = Instant::now();
            let (r, _) = solve(&g, &s, &cfg, &planner);
            let ms = t0.elapsed().as_secs_f64() * 1e3;
            assert_eq!(r.rows(), multi_source_reach(&g, &s).rows());
            lines.push(format!("{algorithm},{n},1.5,0.5,7,{ms:.3}"));
        }
    }
    report(&format!("criterion 7 (scaling report, no assertion):\n{}", lines.join("\n")));
    report("criterion 7 (scaling report): PASS (report-only)");
}
