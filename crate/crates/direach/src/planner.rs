//! Exponent arithmetic: the rectangular matrix-multiplication exponent ω(σ),
//! the derived cost curves g_k and their μ-density variants, feasibility
//! intervals, and the σ thresholds the solvers and tables are built on.
//!
//! Everything here is pure numerics over an interpolated ω table. The solver
//! modules consume single values (δ choices); the table emitters reproduce
//! the reference grids for regression testing.

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use thiserror::Error;

/// Largest σ with ω(σ) = 2 in the default table (the dual exponent α).
pub const DUAL_EXPONENT: f64 = 0.321334;

/// Default ω(σ) upper-bound samples on a uniform σ grid, plus the dual
/// exponent anchor. Piecewise-linear interpolation between them; constant 2
/// to the left of the first point.
const DEFAULT_SAMPLES: [(f64, f64); 17] = [
    (0.321334, 2.0),
    (0.33, 2.000100),
    (0.34, 2.000600),
    (0.35, 2.001363),
    (0.40, 2.009541),
    (0.45, 2.023788),
    (0.50, 2.042994),
    (0.55, 2.066134),
    (0.60, 2.092631),
    (0.65, 2.121734),
    (0.70, 2.153048),
    (0.75, 2.186210),
    (0.80, 2.220929),
    (0.85, 2.256984),
    (0.90, 2.294209),
    (0.95, 2.332440),
    (1.00, 2.371552),
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlannerError {
    #[error("omega table needs at least two sample points")]
    TooFewPoints,
    #[error("omega table sigma values must be strictly increasing within [0,1] and end at 1")]
    BadDomain,
    #[error("omega table values must start at 2 and be non-decreasing")]
    NotMonotone,
    #[error("omega table interpolant must be convex (chord slopes non-decreasing)")]
    NotConvex,
    #[error("malformed omega table line {line}: expected \"sigma omega\"")]
    MalformedConfig { line: usize },
}

/// Sample points of the ω(σ) upper bound with a piecewise-linear reading.
///
/// ω is constant 2 for σ at or below the first sample; by convexity the
/// chords between samples stay upper bounds, which is what makes the linear
/// reading sound for everything derived here.
#[derive(Debug, Clone)]
pub struct OmegaTable {
    points: Vec<(f64, f64)>,
}

impl Default for OmegaTable {
    fn default() -> Self {
        OmegaTable::from_points(DEFAULT_SAMPLES.to_vec()).expect("builtin table is valid")
    }
}

impl OmegaTable {
    /// Validates and adopts sample points: σ strictly increasing and ending
    /// at 1, values non-decreasing from exactly 2, convex chord slopes.
    pub fn from_points(mut points: Vec<(f64, f64)>) -> Result<Self, PlannerError> {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.len() < 2 {
            return Err(PlannerError::TooFewPoints);
        }
        let last = points[points.len() - 1].0;
        if points[0].0 < 0.0 || (last - 1.0).abs() > 1e-12 {
            return Err(PlannerError::BadDomain);
        }
        if points.windows(2).any(|w| w[1].0 - w[0].0 <= 0.0) {
            return Err(PlannerError::BadDomain);
        }
        if (points[0].1 - 2.0).abs() > 1e-12
            || points.windows(2).any(|w| w[1].1 < w[0].1)
        {
            return Err(PlannerError::NotMonotone);
        }
        let slope = |w: &[(f64, f64)]| (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        let slopes: Vec<f64> = points.windows(2).map(slope).collect();
        if slopes.windows(2).any(|s| s[1] < s[0] - 1e-12) {
            return Err(PlannerError::NotConvex);
        }
        Ok(OmegaTable { points })
    }

    /// Parses override text: one "sigma omega" pair per line, '#' comments
    /// and blank lines skipped.
    pub fn from_config_text(text: &str) -> Result<Self, PlannerError> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| {
                tok.and_then(|t| t.parse::<f64>().ok())
                    .ok_or(PlannerError::MalformedConfig { line: i + 1 })
            };
            let s = parse(it.next())?;
            let w = parse(it.next())?;
            if it.next().is_some() {
                return Err(PlannerError::MalformedConfig { line: i + 1 });
            }
            points.push((s, w));
        }
        OmegaTable::from_points(points)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Piecewise-linear ω(σ); exact at sample points.
    pub fn eval(&self, sigma: f64) -> f64 {
        assert!(
            (-1e-12..=1.0 + 1e-12).contains(&sigma),
            "sigma {sigma} outside [0,1]"
        );
        if sigma <= self.points[0].0 {
            return 2.0;
        }
        for w in self.points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if sigma <= x1 {
                return y0 + (y1 - y0) * (sigma - x0) / (x1 - x0);
            }
        }
        self.points[self.points.len() - 1].1
    }
}

/// Density exponents for which the depth-0 solver beats both the per-source
/// BFS bound (needs μ > mu_lo) and the square closure bound (needs μ < the
/// uncapped upper limit; `mu_hi` is that limit capped at 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityInterval {
    pub mu_lo: f64,
    pub mu_hi: f64,
    /// True when the upper bound exceeded 2 and was capped there, so the
    /// interval is right-closed at the maximum density.
    pub capped: bool,
}

impl FeasibilityInterval {
    pub fn is_empty(&self) -> bool {
        self.mu_lo >= self.mu_hi - 1e-12
    }
}

/// Identifiers for the regression tables the planner can regenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    /// Dense g₀ versus both baselines over small σ.
    T2,
    /// Lower density bound μ for which g₀ beats per-source BFS.
    T3,
    /// Full feasibility intervals I_σ.
    T4,
    /// Recursive dense curves g_k at selected depths.
    T5,
    /// μ-density curves g₀^(μ) versus baselines.
    T6,
}

impl FromStr for TableId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "T2" | "2" => Ok(TableId::T2),
            "T3" | "3" => Ok(TableId::T3),
            "T4" | "4" => Ok(TableId::T4),
            "T5" | "5" => Ok(TableId::T5),
            "T6" | "6" => Ok(TableId::T6),
            other => Err(format!("unknown table {other:?} (expected T2..T6)")),
        }
    }
}

/// Row sets of the regression tables.
const T2_SIGMAS: [f64; 21] = [
    0.335, 0.34, 0.35, 0.36, 0.37, 0.38, 0.39, 0.40, 0.41, 0.42, 0.43, 0.44, 0.45, 0.46,
    0.47, 0.48, 0.49, 0.50, 0.51, 0.52, 0.53,
];
const T3_SIGMAS: [f64; 9] = [0.0, 0.34, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
const T4_SIGMAS: [f64; 11] = [0.335, 0.34, 0.4, 0.5, 0.55, 0.6, 0.7, 0.8, 0.9, 0.99, 1.0];
const T5_SIGMAS: [f64; 23] = [
    0.34, 0.36, 0.40, 0.44, 0.48, 0.52, 0.54, 0.56, 0.60, 0.64, 0.66, 0.68, 0.72, 0.76,
    0.80, 0.84, 0.85, 0.88, 0.92, 0.93, 0.96, 0.97, 0.98,
];
const T5_DEPTHS: [usize; 6] = [0, 1, 3, 5, 7, 9];
const T6_ROWS: [(f64, f64); 15] = [
    (1.95, 0.375),
    (1.95, 0.4),
    (1.95, 0.45),
    (1.95, 0.5),
    (1.9, 0.45),
    (1.9, 0.5),
    (1.9, 0.55),
    (1.9, 0.6),
    (1.75, 0.55),
    (1.75, 0.6),
    (1.75, 0.65),
    (1.75, 0.7),
    (1.525, 0.8),
    (1.525, 0.85),
    (1.525, 0.9),
];

/// Cache key (depth, μ-bits) and the sampled curve it maps to.
type CurveCache = Mutex<HashMap<(usize, u64), Arc<Vec<f64>>>>;

/// Exponent planner: evaluates ω, the recursive curves, thresholds, and the
/// regression tables, caching each (depth, μ) curve it builds.
pub struct Planner {
    table: OmegaTable,
    step: f64,
    grid_len: usize,
    curves: CurveCache,
}

impl Default for Planner {
    fn default() -> Self {
        Planner::new()
    }
}

/// Sign-preserving bisection: assumes exactly one sign change of `f` in
/// [lo, hi] and narrows to it.
fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> f64, iters: usize) -> f64 {
    let lo_positive = f(lo) > 0.0;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Planner {
    pub fn new() -> Self {
        Planner::with_table(OmegaTable::default())
    }

    pub fn with_table(table: OmegaTable) -> Self {
        let step = 1e-4_f64;
        let grid_len = (1.0 / step).round() as usize + 1;
        Planner { table, step, grid_len, curves: Mutex::new(HashMap::new()) }
    }

    pub fn omega_table(&self) -> &OmegaTable {
        &self.table
    }

    /// ω(σ) by piecewise-linear interpolation.
    pub fn omega(&self, sigma: f64) -> f64 {
        self.table.eval(sigma)
    }

    /// ω(1), the square-product exponent the baselines pay.
    pub fn omega_square(&self) -> f64 {
        self.table.eval(1.0)
    }

    /// Dense depth-0 exponent g₀(σ) = 1 + (2/3)ω(σ).
    pub fn g0(&self, sigma: f64) -> f64 {
        self.g0_mu(sigma, 2.0)
    }

    /// Density-aware depth-0 exponent g₀^(μ)(σ) = (1 + μ + 2ω(σ))/3.
    pub fn g0_mu(&self, sigma: f64, mu: f64) -> f64 {
        assert!((1.0..=2.0).contains(&mu), "density exponent {mu} outside [1,2]");
        (1.0 + mu + 2.0 * self.omega(sigma)) / 3.0
    }

    /// Dense depth-k exponent g_k(σ).
    pub fn gk(&self, sigma: f64, k: usize) -> f64 {
        self.gk_mu(sigma, 2.0, k)
    }

    /// Density-aware depth-k exponent g_k^(μ)(σ), evaluated on the cached
    /// grid curve with linear interpolation between grid points.
    pub fn gk_mu(&self, sigma: f64, mu: f64, k: usize) -> f64 {
        let curve = self.curve(k, mu);
        self.eval_grid(&curve, sigma)
    }

    /// The σ grid values of the depth-k curve for density μ, building and
    /// caching all shallower levels as needed.
    pub fn curve(&self, k: usize, mu: f64) -> Arc<Vec<f64>> {
        assert!((1.0..=2.0).contains(&mu), "density exponent {mu} outside [1,2]");
        let mut cache = self.curves.lock().expect("planner cache poisoned");
        if let Some(c) = cache.get(&(k, mu.to_bits())) {
            return Arc::clone(c);
        }
        let mut have: Option<(usize, Arc<Vec<f64>>)> = None;
        for j in (0..k).rev() {
            if let Some(c) = cache.get(&(j, mu.to_bits())) {
                have = Some((j, Arc::clone(c)));
                break;
            }
        }
        let (mut level, mut cur) = match have {
            Some((j, c)) => (j, c),
            None => {
                let base: Vec<f64> = (0..self.grid_len)
                    .map(|i| self.g0_mu(i as f64 * self.step, mu))
                    .collect();
                let base = Arc::new(base);
                cache.insert((0, mu.to_bits()), Arc::clone(&base));
                (0, base)
            }
        };
        while level < k {
            let next = Arc::new(self.next_level(&cur));
            level += 1;
            cache.insert((level, mu.to_bits()), Arc::clone(&next));
            cur = next;
        }
        cur
    }

    /// One recursion level: at each grid σ, balance the previous curve at
    /// argument 1−2δ against ω(σ)+δ.
    ///
    /// The left side is non-increasing in δ and the right side strictly
    /// increasing, so the difference has at most one sign change; when no
    /// positive δ helps the value degenerates to ω(σ), and when even δ = ½
    /// keeps the left side on top the value is the previous curve at 0.
    fn next_level(&self, prev: &[f64]) -> Vec<f64> {
        (0..self.grid_len)
            .map(|i| {
                let w = self.table.eval(i as f64 * self.step);
                let f = |d: f64| self.eval_grid(prev, 1.0 - 2.0 * d) - (w + d);
                if f(0.0) <= 0.0 {
                    w
                } else if f(0.5) >= 0.0 {
                    self.eval_grid(prev, 0.0)
                } else {
                    // 60 halvings put the bracket far below the 1e-9 target.
                    w + bisect(0.0, 0.5, f, 60)
                }
            })
            .collect()
    }

    fn eval_grid(&self, vals: &[f64], x: f64) -> f64 {
        if x <= 0.0 {
            return vals[0];
        }
        if x >= 1.0 {
            return vals[vals.len() - 1];
        }
        let i = (x / self.step) as usize;
        if i >= vals.len() - 1 {
            return vals[vals.len() - 1];
        }
        let t = (x - i as f64 * self.step) / self.step;
        vals[i] * (1.0 - t) + vals[i + 1] * t
    }

    /// Feasibility interval I_σ of density exponents where the depth-0
    /// solver beats both baselines.
    pub fn feasibility_interval(&self, sigma: f64) -> FeasibilityInterval {
        let w = self.omega(sigma);
        let mu_lo = w + 0.5 - 1.5 * sigma;
        let raw_hi = 3.0 * self.omega_square() - 2.0 * w - 1.0;
        let capped = raw_hi >= 2.0;
        FeasibilityInterval { mu_lo, mu_hi: raw_hi.min(2.0), capped }
    }

    /// The σ where the dense depth-0 solver stops beating per-source BFS:
    /// root of ω(σ) = 1.5(1+σ).
    pub fn sigma_tilde(&self) -> f64 {
        bisect(1.0 / 3.0, 0.3336, |s| self.table.eval(s) - 1.5 * (1.0 + s), 80)
    }

    /// The σ where the depth-k dense curve meets ω(1): root of
    /// g_k(σ) = ω(1) over [σ̃, 1].
    pub fn sigma_k(&self, k: usize) -> f64 {
        let w1 = self.omega_square();
        let lo = self.sigma_tilde();
        debug_assert!(self.gk(lo, k) < w1 && self.gk(1.0, k) > w1);
        bisect(lo, 1.0, |s| self.gk(s, k) - w1, 80)
    }

    /// Regenerates one regression table as CSV.
    pub fn emit_table(&self, which: TableId) -> String {
        let mut out = String::new();
        match which {
            TableId::T2 => {
                out.push_str("sigma,g0,naive,square\n");
                let w1 = self.omega_square();
                for &s in &T2_SIGMAS {
                    out.push_str(&format!(
                        "{s},{:.6},{:.6},{w1:.6}\n",
                        self.g0(s),
                        2.0 + s
                    ));
                }
            }
            TableId::T3 => {
                out.push_str("sigma,mu_lower\n");
                for &s in &T3_SIGMAS {
                    out.push_str(&format!("{s},{:.6}\n", self.feasibility_interval(s).mu_lo));
                }
            }
            TableId::T4 => {
                out.push_str("sigma,mu_lower,mu_upper,empty\n");
                for &s in &T4_SIGMAS {
                    let iv = self.feasibility_interval(s);
                    out.push_str(&format!(
                        "{s},{:.6},{:.6},{}\n",
                        iv.mu_lo,
                        iv.mu_hi,
                        iv.is_empty()
                    ));
                }
            }
            TableId::T5 => {
                out.push_str("sigma,k0,k1,k3,k5,k7,k9\n");
                for &s in &T5_SIGMAS {
                    out.push_str(&format!("{s}"));
                    for &k in &T5_DEPTHS {
                        out.push_str(&format!(",{:.6}", self.gk(s, k)));
                    }
                    out.push('\n');
                }
            }
            TableId::T6 => {
                out.push_str("mu,sigma,g0mu,naive,square\n");
                let w1 = self.omega_square();
                for &(mu, s) in &T6_ROWS {
                    out.push_str(&format!(
                        "{mu},{s},{:.6},{:.6},{w1:.6}\n",
                        self.g0_mu(s, mu),
                        mu + s
                    ));
                }
            }
        }
        out
    }
}
