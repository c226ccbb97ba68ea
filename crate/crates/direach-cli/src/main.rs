//! Command-line front end: generate instances, solve them, check saved
//! results, query the cost planner, and time the solvers.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or IO error.
//! All randomness flows from the --seed flags; stats and traces go to stdout
//! as "#"-prefixed lines so result files stay machine-diffable.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use direach::graph::{gen_random, load_edge_list, multi_source_reach, ReachResult, SourceSet};
use direach::planner::{Planner, TableId};
use direach::shortcut::SamplingParams;
use direach::solver::{solve, Algorithm, SolveConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "direach",
    version,
    about = "Multi-source directed reachability toolkit"
)]
struct Cli {
    /// Worker threads for the matrix products (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and write its edge list.
    Gen(GenArgs),
    /// Solve an instance and print one reachability row per source.
    Solve(SolveArgs),
    /// Recompute an instance and diff a saved result against it.
    Verify(VerifyArgs),
    /// Query the cost planner: exponents, intervals, tables.
    Plan(PlanArgs),
    /// Time solvers over a size sweep and print CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Vertex count.
    #[arg(short)]
    n: usize,
    /// Density exponent; the instance gets round(n^mu) edges.
    #[arg(long)]
    mu: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Orient edges under a random permutation so the result is acyclic.
    #[arg(long)]
    dag: bool,
    /// Output path (stdout when absent).
    #[arg(short)]
    o: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Edge-list file ("n m" header, one "u v" line per edge).
    graph: PathBuf,
    /// Source-set file, one vertex id per line.
    sources: PathBuf,
    /// Solver: naive, tc, direach, or recur.
    #[arg(long, default_value_t = Algorithm::Direach)]
    algo: Algorithm,
    /// Recursion depth (recur only).
    #[arg(short, default_value_t = 0)]
    k: usize,
    /// Pin the hop exponent instead of consulting the planner; in (0, 0.5].
    #[arg(long)]
    delta: Option<f64>,
    /// Density hint in [1, 2]; switches hop selection to the sparse rule.
    #[arg(long)]
    mu: Option<f64>,
    /// Shortcut sampling seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print rows as hex bitmaps instead of vertex lists.
    #[arg(long)]
    hex: bool,
    /// Also write the shortcut that was used to this path.
    #[arg(long, value_name = "PATH")]
    dump_shortcut: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Edge-list file.
    graph: PathBuf,
    /// Source-set file.
    sources: PathBuf,
    /// Result file to check ("s: v1 v2 ..." rows; "#" lines ignored).
    result: PathBuf,
}

#[derive(Args)]
struct PlanArgs {
    /// g0 | gk | interval | sigma-tilde | sigma-k | table.
    what: String,
    /// Table name for `table`: T2, T3, T4, T5, or T6.
    name: Option<String>,
    /// Source-set exponent in [0, 1].
    #[arg(long)]
    sigma: Option<f64>,
    /// Density exponent in [1, 2] (dense formulas when absent).
    #[arg(long)]
    mu: Option<f64>,
    /// Recursion depth.
    #[arg(short, default_value_t = 0)]
    k: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated solvers to time; empty means header-only output.
    #[arg(long, default_value = "naive,direach")]
    suite: String,
    /// Comma-separated vertex counts; empty means header-only output.
    #[arg(long, default_value = "")]
    sizes: String,
    /// Density exponent for the generated instances.
    #[arg(long, default_value_t = 1.5)]
    mu: f64,
    /// Source-set exponent for the generated instances.
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Instance-stream seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Long flags that are also accepted with a single dash (`-mu 1.5`,
/// `-seed 7`), matching the loose convention of hand-typed invocations.
/// `-n`, `-k`, and `-o` stay genuine short flags.
const DASH_LONGS: &[&str] = &[
    "mu",
    "seed",
    "sigma",
    "delta",
    "algo",
    "dag",
    "hex",
    "suite",
    "sizes",
    "threads",
    "dump-shortcut",
];

fn normalize_args(args: impl Iterator<Item = String>) -> Vec<String> {
    args.map(|arg| {
        let Some(rest) = arg.strip_prefix('-') else { return arg };
        if rest.starts_with('-') {
            return arg;
        }
        let name = rest.split('=').next().unwrap_or(rest);
        if DASH_LONGS.contains(&name) {
            format!("-{arg}")
        } else {
            arg
        }
    })
    .collect()
}

fn main() -> ExitCode {
    // Dying quietly when the read end of a pipe closes matches the
    // surrounding Unix tools; the runtime default turns EPIPE into a panic.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse_from(normalize_args(std::env::args())) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; those are successes.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        // A second initialization in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot open {}", path.display()))
}

fn load_graph(path: &Path) -> Result<direach::graph::DiGraph> {
    load_edge_list(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_sources(path: &Path, n: usize) -> Result<SourceSet> {
    SourceSet::parse(&read_file(path)?, n).with_context(|| format!("in {}", path.display()))
}

fn cmd_gen(a: GenArgs) -> Result<u8> {
    let g = gen_random(a.n, a.mu, a.seed, a.dag)?;
    let text = g.to_edge_list_text();
    match &a.o {
        Some(path) => std::fs::write(path, &text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    eprintln!("# n={} m={}", g.n(), g.m());
    Ok(0)
}

fn cmd_solve(a: SolveArgs) -> Result<u8> {
    if let Some(d) = a.delta {
        if !(d > 0.0 && d <= 0.5) {
            bail!("--delta must lie in (0, 0.5]");
        }
    }
    if let Some(mu) = a.mu {
        if !(1.0..=2.0).contains(&mu) {
            bail!("--mu must lie in [1, 2]");
        }
    }
    if a.k > 8 {
        bail!("-k is capped at 8");
    }
    let g = load_graph(&a.graph)?;
    let s = load_sources(&a.sources, g.n())?;
    let cfg = SolveConfig {
        algorithm: a.algo,
        delta_override: a.delta,
        mu_hint: a.mu,
        k: a.k,
        sampling: SamplingParams { seed: a.seed, ..SamplingParams::default() },
    };
    let planner = Planner::new();
    let (result, stats) = solve(&g, &s, &cfg, &planner);
    println!("# {}", stats.summary());
    if let Some(trace) = &stats.trace {
        for line in trace.to_text().lines() {
            println!("# {line}");
        }
    }
    print!("{}", if a.hex { result.to_hex_text() } else { result.to_text() });
    if let Some(path) = &a.dump_shortcut {
        let Some(h) = &stats.shortcut else {
            bail!("algorithm {} builds no shortcut to dump", a.algo);
        };
        std::fs::write(path, h.to_text())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<u8> {
    let g = load_graph(&a.graph)?;
    let s = load_sources(&a.sources, g.n())?;
    let claimed = ReachResult::from_text(&read_file(&a.result)?, g.n())
        .with_context(|| format!("in {}", a.result.display()))?;
    if claimed.sources().ids() != s.ids() {
        bail!(
            "{} lists sources {:?}, expected {:?}",
            a.result.display(),
            claimed.sources().ids(),
            s.ids()
        );
    }
    let oracle = multi_source_reach(&g, &s);
    for (row, &src) in s.ids().iter().enumerate() {
        for v in 0..g.n() {
            let (got, want) = (claimed.reaches(row, v), oracle.reaches(row, v));
            if got != want {
                println!("mismatch at source {src} vertex {v}: file={got} oracle={want}");
                return Ok(1);
            }
        }
    }
    println!("OK");
    Ok(0)
}

fn require_sigma(a: &PlanArgs) -> Result<f64> {
    let Some(s) = a.sigma else {
        bail!("plan {} needs --sigma", a.what);
    };
    if !(0.0..=1.0).contains(&s) {
        bail!("--sigma must lie in [0, 1]");
    }
    Ok(s)
}

fn cmd_plan(a: PlanArgs) -> Result<u8> {
    if let Some(mu) = a.mu {
        if !(1.0..=2.0).contains(&mu) {
            bail!("--mu must lie in [1, 2]");
        }
    }
    let p = Planner::new();
    match a.what.as_str() {
        "g0" => {
            let s = require_sigma(&a)?;
            println!("{:.6}", p.g0_mu(s, a.mu.unwrap_or(2.0)));
        }
        "gk" => {
            let s = require_sigma(&a)?;
            println!("{:.6}", p.gk_mu(s, a.mu.unwrap_or(2.0), a.k));
        }
        "interval" => {
            let iv = p.feasibility_interval(require_sigma(&a)?);
            if iv.is_empty() {
                println!("empty");
            } else if iv.capped {
                println!("({:.3}, 2]", iv.mu_lo);
            } else {
                println!("({:.3}, {:.3})", iv.mu_lo, iv.mu_hi);
            }
        }
        "sigma-tilde" => println!("{:.6}", p.sigma_tilde()),
        "sigma-k" => println!("{:.6}", p.sigma_k(a.k)),
        "table" => {
            let Some(name) = &a.name else {
                bail!("plan table needs a name (T2, T3, T4, T5, or T6)");
            };
            let id = TableId::from_str(name).map_err(|e| anyhow::anyhow!(e))?;
            print!("{}", p.emit_table(id));
        }
        other => bail!("unknown plan target {other:?} (g0, gk, interval, sigma-tilde, sigma-k, table)"),
    }
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8> {
    fn parse_list(raw: &str) -> impl Iterator<Item = &str> {
        raw.split(',').map(str::trim).filter(|t| !t.is_empty())
    }
    let algorithms: Vec<Algorithm> = parse_list(&a.suite)
        .map(|t| Algorithm::from_str(t).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    let sizes: Vec<usize> = parse_list(&a.sizes)
        .map(|t| t.parse::<usize>().with_context(|| format!("bad size {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if !(0.0..=1.0).contains(&a.sigma) {
        bail!("--sigma must lie in [0, 1]");
    }

    println!("algorithm,n,mu,sigma,seed,wall_ms");
    let planner = Planner::new();
    for &n in &sizes {
        let g = gen_random(n, a.mu, a.seed, false)?;
        let count = ((n as f64).powf(a.sigma).round() as usize).clamp(1, n);
        let s = SourceSet::new((0..count).collect(), n).expect("ids below n are valid");
        for &algorithm in &algorithms {
            let cfg = SolveConfig {
                algorithm,
                sampling: SamplingParams { seed: a.seed, ..SamplingParams::default() },
                ..SolveConfig::default()
            };
            let (_, stats) = solve(&g, &s, &cfg, &planner);
            println!("{algorithm},{n},{},{},{},{:.3}", a.mu, a.sigma, a.seed, stats.wall_ms);
        }
    }
    Ok(0)
}
