//! Command-line front end for the Hamiltonian cycle solver suite.
//!
//! Exit codes for `solve`: 0 = Hamiltonian, 1 = not Hamiltonian,
//! 2 = timeout, 3 = error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hamtw::bench::{
    self, alpha_grid, bench_dir, prepare_instance, run_solver, stats_dir, stats_row_to_csv,
    tune_dir, Algorithm, ModeChoice, RunOutcome, SolverConfig, TuneMode, STATS_CSV_SCHEMA,
};
use hamtw::decomp::parse_td;
use hamtw::generator::{expected_params_report, generate, GenParams};
use hamtw::graph::{parse_graph, write_graph, GraphFormat};

#[derive(Parser)]
#[command(
    name = "hamtw",
    about = "Hamiltonian cycle solvers for graphs of bounded treewidth",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single instance.
    Solve(SolveArgs),
    /// Run algorithms over a directory of instances and emit CSV rows.
    Bench(BenchArgs),
    /// Sweep the Gaussian-elimination trigger policies over a suite.
    Tune(TuneArgs),
    /// Generate a random instance with a planted Hamiltonian cycle.
    Gen(GenArgs),
    /// Structural statistics for a directory of instances.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Naive,
    Rank4t,
    RankImproved,
    Cutcount,
    CutcountFast,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Naive => Algorithm::Naive,
            AlgoArg::Rank4t => Algorithm::Rank4t,
            AlgoArg::RankImproved => Algorithm::RankImproved,
            AlgoArg::Cutcount => Algorithm::CutCountNaiveJoin,
            AlgoArg::CutcountFast => Algorithm::CutCountFastJoin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Decision,
    Witness,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    PaceGr,
    TsplibHcp,
}

#[derive(Args)]
struct PolicyArgs {
    /// Threshold override `l=tau` for the rank-based reduce trigger
    /// (repeatable, e.g. `--tau 4=3 --tau 6=5`).
    #[arg(long = "tau", value_parser = parse_tau)]
    tau: Vec<(usize, usize)>,
    /// Multiplicative reduce trigger (states > alpha * 2^(l/2-1)).
    #[arg(long)]
    alpha: Option<f64>,
    /// Bag-size boundary between absolute and multiplicative triggers.
    #[arg(long)]
    width_switch: Option<usize>,
}

fn parse_tau(s: &str) -> Result<(usize, usize), String> {
    let (l, tau) = s
        .split_once('=')
        .ok_or_else(|| format!("expected l=tau, got `{s}`"))?;
    Ok((
        l.trim().parse().map_err(|e| format!("bad l: {e}"))?,
        tau.trim().parse().map_err(|e| format!("bad tau: {e}"))?,
    ))
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (.gr or .hcp).
    #[arg(long)]
    input: PathBuf,
    /// Tree decomposition file (.td); defaults to the min-fill heuristic.
    #[arg(long)]
    td: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[arg(long, value_enum, default_value = "naive")]
    algo: AlgoArg,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Timeout in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// Seed for randomized algorithms; defaults to system entropy.
    #[arg(long)]
    seed: Option<u64>,
    /// Write the cycle (one vertex per line) here when the answer is yes.
    #[arg(long)]
    witness_out: Option<PathBuf>,
    /// Refuse decompositions wider than this.
    #[arg(long)]
    width_cap: Option<u32>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .gr/.hcp instances with optional sibling .td files.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated algorithms (default: all).
    #[arg(long, value_delimiter = ',')]
    algos: Vec<String>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Timeout per run in seconds (default: 600 for decompositions of
    /// width at most 10, 1800 beyond).
    #[arg(long)]
    timeout: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    width_cap: Option<u32>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct TuneArgs {
    /// Directory of .gr/.hcp instances.
    #[arg(long)]
    input: PathBuf,
    /// What to sweep: per-l thresholds or the multiplicative trigger.
    #[arg(long, value_parser = ["tau", "alpha"])]
    mode: String,
    /// Timeout per run in seconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// CSV output path (stdout otherwise).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Row count; must be 2 modulo 4.
    #[arg(long)]
    a: u32,
    /// Column count.
    #[arg(long)]
    b: u32,
    /// Chord probability in (0, 1).
    #[arg(long)]
    p: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix: writes <prefix>.gr, <prefix>.td, <prefix>.cycle.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// Directory of .gr/.hcp instances.
    #[arg(long)]
    input: PathBuf,
    /// CSV output path (stdout otherwise).
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

fn entropy_seed() -> u64 {
    rand::random()
}

fn detect_format(path: &std::path::Path, arg: FormatArg) -> GraphFormat {
    match arg {
        FormatArg::PaceGr => GraphFormat::PaceGr,
        FormatArg::TsplibHcp => GraphFormat::TsplibHcp,
        FormatArg::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("hcp") => GraphFormat::TsplibHcp,
            _ => GraphFormat::PaceGr,
        },
    }
}

fn mode_choice(arg: ModeArg) -> ModeChoice {
    match arg {
        ModeArg::Auto => ModeChoice::Auto,
        ModeArg::Decision => ModeChoice::Decision,
        ModeArg::Witness => ModeChoice::Witness,
    }
}

fn cmd_solve(args: SolveArgs) -> ExitCode {
    let fail = |msg: String| {
        eprintln!("error: {msg}");
        ExitCode::from(3)
    };
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => return fail(format!("cannot read {}: {e}", args.input.display())),
    };
    let parsed = match parse_graph(&text, detect_format(&args.input, args.format)) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let td = match &args.td {
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()) {
            Ok(t) => match parse_td(&t) {
                Ok(td) => Some(td),
                Err(e) => return fail(e.to_string()),
            },
            Err(e) => return fail(e),
        },
        None => None,
    };
    let prep = match prepare_instance(&parsed.graph, td.as_ref(), args.width_cap) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let seed = args.seed.unwrap_or_else(entropy_seed);
    let mut cfg = SolverConfig::new(args.algo.into());
    cfg.mode = mode_choice(args.mode);
    cfg.seed = seed;
    cfg.timeout = args.timeout.map(Duration::from_secs);
    cfg.tau_overrides = args.policy.tau;
    cfg.alpha = args.policy.alpha;
    cfg.width_switch = args.policy.width_switch;
    cfg.want_cycle = args.witness_out.is_some();
    let result = run_solver(&prep, &cfg);
    println!(
        "instance={} algo={} mode={} width={} outcome={} wall_ms={} peak_table={} decision_calls={} seed={}",
        args.input.display(),
        cfg.algorithm.name(),
        result.mode,
        prep.width,
        result.outcome.label(),
        result.wall_ms,
        result.peak_table,
        result.decision_calls,
        seed
    );
    if matches!(result.outcome, RunOutcome::No)
        && matches!(
            cfg.algorithm,
            Algorithm::CutCountNaiveJoin | Algorithm::CutCountFastJoin
        )
    {
        eprintln!(
            "note: randomized answer; false-negative probability <= n/2^64 = {:.3e}",
            parsed.graph.vertex_count() as f64 / 2f64.powi(64)
        );
    }
    match result.outcome {
        RunOutcome::Yes => {
            if let (Some(path), Some(cycle)) = (&args.witness_out, &result.cycle) {
                let mut text = String::new();
                for v in cycle.vertices() {
                    text.push_str(&format!("{v}\n"));
                }
                if let Err(e) = std::fs::write(path, text) {
                    return fail(format!("cannot write {}: {e}", path.display()));
                }
            }
            ExitCode::SUCCESS
        }
        RunOutcome::No => ExitCode::from(1),
        RunOutcome::Timeout => ExitCode::from(2),
        RunOutcome::Error(e) => fail(e),
    }
}

fn cmd_bench(args: BenchArgs) -> ExitCode {
    let algorithms: Vec<Algorithm> = if args.algos.is_empty() {
        Algorithm::all().to_vec()
    } else {
        let mut out = Vec::new();
        for name in &args.algos {
            match Algorithm::from_name(name) {
                Some(a) => out.push(a),
                None => {
                    eprintln!("error: unknown algorithm `{name}`");
                    return ExitCode::from(3);
                }
            }
        }
        out
    };
    let mut cfg = SolverConfig::new(algorithms[0]);
    cfg.mode = mode_choice(args.mode);
    cfg.seed = args.seed.unwrap_or_else(entropy_seed);
    cfg.timeout = args.timeout.map(Duration::from_secs);
    cfg.tau_overrides = args.policy.tau;
    cfg.alpha = args.policy.alpha;
    cfg.width_switch = args.policy.width_switch;
    cfg.width_cap = args.width_cap;
    eprintln!(
        "bench: dir={} algos={} timeout={} seed={} workers={}",
        args.input.display(),
        algorithms
            .iter()
            .map(|a| a.name())
            .collect::<Vec<_>>()
            .join(","),
        args.timeout
            .map_or(String::from("auto"), |t| format!("{t}s")),
        cfg.seed,
        bench::worker_count()
    );
    match bench_dir(&args.input, &algorithms, &cfg, args.csv.as_deref()) {
        Ok(summary) => {
            for r in &summary.records {
                println!("{}", r.to_csv_row());
            }
            eprintln!(
                "common subset: {} instances decided by all algorithms",
                summary.common_count
            );
            for (name, total) in &summary.common_totals {
                eprintln!("  total wall_ms[{name}] = {total}");
            }
            if !summary.disagreements.is_empty() {
                eprintln!(
                    "FATAL: algorithms disagree on: {}",
                    summary.disagreements.join(", ")
                );
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn cmd_tune(args: TuneArgs) -> ExitCode {
    let mode = if args.mode == "tau" {
        TuneMode::Tau
    } else {
        TuneMode::Alpha
    };
    let rows = match tune_dir(
        &args.input,
        mode,
        args.timeout.map(Duration::from_secs),
    ) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let mut out = String::from("variant,l,tau,alpha,total_ms,decided,instances\n");
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.variant,
            r.l.map_or(String::from("-"), |v| v.to_string()),
            r.tau.map_or(String::from("-"), |v| v.to_string()),
            r.alpha.map_or(String::from("-"), |v| v.to_string()),
            r.total_ms,
            r.decided,
            r.instances
        ));
    }
    if mode == TuneMode::Alpha {
        debug_assert_eq!(rows.len(), alpha_grid().len() * 2);
    }
    match &args.csv {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{out}"),
    }
    ExitCode::SUCCESS
}

fn cmd_gen(args: GenArgs) -> ExitCode {
    let seed = args.seed.unwrap_or_else(entropy_seed);
    let params = GenParams {
        a: args.a,
        b: args.b,
        p: args.p,
        seed,
    };
    let inst = match generate(&params) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let report = expected_params_report(&params);
    let prefix = &args.out_prefix;
    let write = |ext: &str, content: String| -> Result<(), String> {
        let path = prefix.with_extension(ext);
        std::fs::write(&path, content).map_err(|e| format!("{}: {e}", path.display()))
    };
    let cycle_text = {
        let mut t = String::new();
        for v in inst.planted_cycle.vertices() {
            t.push_str(&format!("{v}\n"));
        }
        t
    };
    let result = write("gr", write_graph(&inst.graph, GraphFormat::PaceGr))
        .and_then(|_| write("td", hamtw::decomp::write_td(&inst.td)))
        .and_then(|_| write("cycle", cycle_text));
    if let Err(e) = result {
        eprintln!("error: cannot write {e}");
        return ExitCode::from(3);
    }
    println!(
        "generated n={} m={} (expected edges {:.1}, density {:.4}) width<={} seed={}",
        inst.graph.vertex_count(),
        inst.graph.edge_count(),
        report.expected_edges,
        report.expected_density,
        args.a,
        seed
    );
    ExitCode::SUCCESS
}

fn cmd_stats(args: StatsArgs) -> ExitCode {
    let rows = match stats_dir(&args.input) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    };
    let mut out = format!("{STATS_CSV_SCHEMA}\n");
    for row in &rows {
        match row {
            Ok(r) => out.push_str(&format!("{}\n", stats_row_to_csv(r))),
            Err(e) => eprintln!("warning: {e}"),
        }
    }
    match &args.csv {
        Some(path) => {
            if let Err(e) = std::fs::write(path, out) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{out}"),
    }
    ExitCode::SUCCESS
}
