//! Run harness: unified solver dispatch with wall-clock timeouts, CSV
//! reporting, directory benchmarks with cross-algorithm agreement checks,
//! and the threshold/alpha tuning sweeps.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::cutcount::{cc_decide, JoinKind};
use crate::decomp::{min_fill_td, parse_td, validate_td, TdCheck, TreeDecomposition};
use crate::dp::{solve_naive, Mode, SolveError, SolveOutcome, SolveStats};
use crate::extract::{cycle_from_edges, extract_self_reduce, CyclePath};
use crate::gf2p::FieldSpec;
use crate::graph::{parse_graph, Graph, GraphFormat};
use crate::nice::{make_nice, NiceDecomposition};
use crate::rank::{solve_rank, RankVariant, ReducePolicy};

/// Environment variable selecting the number of parallel workers for
/// directory benchmarks (default 1).
pub const WORKERS_ENV: &str = "HAMTW_WORKERS";

/// Default per-run timeout when none is given: 10 minutes for small-width
/// instances, 30 minutes for wide ones.
pub fn default_timeout_for(width: u32) -> Duration {
    if width as usize + 1 <= AUTO_WITNESS_MAX_BAG {
        Duration::from_secs(600)
    } else {
        Duration::from_secs(1800)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Naive,
    Rank4t,
    RankImproved,
    CutCountNaiveJoin,
    CutCountFastJoin,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Rank4t => "rank4t",
            Algorithm::RankImproved => "rank-improved",
            Algorithm::CutCountNaiveJoin => "cutcount-naive-join",
            Algorithm::CutCountFastJoin => "cutcount-fast-join",
        }
    }

    pub fn from_name(s: &str) -> Option<Algorithm> {
        Some(match s {
            "naive" => Algorithm::Naive,
            "rank4t" => Algorithm::Rank4t,
            "rank-improved" => Algorithm::RankImproved,
            "cutcount" | "cutcount-naive-join" => Algorithm::CutCountNaiveJoin,
            "cutcount-fast" | "cutcount-fast-join" => Algorithm::CutCountFastJoin,
            _ => return None,
        })
    }

    pub fn all() -> [Algorithm; 5] {
        [
            Algorithm::Naive,
            Algorithm::Rank4t,
            Algorithm::RankImproved,
            Algorithm::CutCountNaiveJoin,
            Algorithm::CutCountFastJoin,
        ]
    }

    fn is_cutcount(self) -> bool {
        matches!(
            self,
            Algorithm::CutCountNaiveJoin | Algorithm::CutCountFastJoin
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeChoice {
    /// Witness tables up to bag size 11, decision beyond.
    Auto,
    Decision,
    Witness,
}

/// Bag-size boundary of the automatic mode choice: storing witnesses pays
/// off for small widths, decision plus self-reducibility beyond.
pub const AUTO_WITNESS_MAX_BAG: usize = 11;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub mode: ModeChoice,
    pub seed: u64,
    pub timeout: Option<Duration>,
    /// Per-ℓ threshold overrides for the rank-based reduce trigger.
    pub tau_overrides: Vec<(usize, usize)>,
    pub alpha: Option<f64>,
    pub width_switch: Option<usize>,
    /// Reject decompositions wider than this before solving.
    pub width_cap: Option<u32>,
    /// Produce an explicit cycle (via witnesses or self-reducibility).
    pub want_cycle: bool,
}

impl SolverConfig {
    pub fn new(algorithm: Algorithm) -> SolverConfig {
        SolverConfig {
            algorithm,
            mode: ModeChoice::Auto,
            seed: 1,
            timeout: None,
            tau_overrides: Vec::new(),
            alpha: None,
            width_switch: None,
            width_cap: None,
            want_cycle: false,
        }
    }

    pub fn policy_for(&self, variant: RankVariant) -> ReducePolicy {
        let mut policy = ReducePolicy::default_for(variant);
        for &(l, tau) in &self.tau_overrides {
            policy.small_tw_thresholds.insert(l, tau);
        }
        if let Some(alpha) = self.alpha {
            policy.alpha = alpha;
        }
        if let Some(ws) = self.width_switch {
            policy.width_switch = ws;
        }
        policy
    }

    fn policy_string(&self) -> String {
        match self.algorithm {
            Algorithm::Rank4t | Algorithm::RankImproved => {
                let variant = if self.algorithm == Algorithm::Rank4t {
                    RankVariant::Cut4t
                } else {
                    RankVariant::Improved
                };
                let p = self.policy_for(variant);
                let taus: Vec<String> = p
                    .small_tw_thresholds
                    .iter()
                    .map(|(l, t)| format!("tau{l}:{t}"))
                    .collect();
                format!(
                    "{}|alpha:{}|switch:{}",
                    taus.join("|"),
                    p.alpha,
                    p.width_switch
                )
            }
            _ => String::from("-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Yes,
    No,
    Timeout,
    Error(String),
}

impl RunOutcome {
    pub fn label(&self) -> &str {
        match self {
            RunOutcome::Yes => "yes",
            RunOutcome::No => "no",
            RunOutcome::Timeout => "timeout",
            RunOutcome::Error(_) => "error",
        }
    }

    pub fn is_decided(&self) -> bool {
        matches!(self, RunOutcome::Yes | RunOutcome::No)
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub mode: String,
    pub outcome: RunOutcome,
    pub wall_ms: u64,
    pub peak_table: usize,
    pub decision_calls: u32,
    pub seed: u64,
    pub policy: String,
}

/// CSV schema; kept in a versioned header comment in every emitted file.
pub const CSV_SCHEMA: &str =
    "instance,algorithm,mode,outcome,wall_ms,peak_table,decision_calls,seed,policy";
pub const CSV_VERSION_COMMENT: &str = "# hamtw bench csv v1";

impl RunRecord {
    pub fn to_csv_row(&self) -> String {
        for field in [&self.instance, &self.policy] {
            debug_assert!(!field.contains(','), "CSV fields must stay comma-free");
        }
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.algorithm.name(),
            self.mode,
            self.outcome.label(),
            self.wall_ms,
            self.peak_table,
            self.decision_calls,
            self.seed,
            self.policy
        )
    }

    pub fn parse_csv_row(row: &str) -> Option<RunRecord> {
        let parts: Vec<&str> = row.split(',').collect();
        if parts.len() != 9 {
            return None;
        }
        Some(RunRecord {
            instance: parts[0].to_string(),
            algorithm: Algorithm::from_name(parts[1])?,
            mode: parts[2].to_string(),
            outcome: match parts[3] {
                "yes" => RunOutcome::Yes,
                "no" => RunOutcome::No,
                "timeout" => RunOutcome::Timeout,
                "error" => RunOutcome::Error(String::new()),
                _ => return None,
            },
            wall_ms: parts[4].parse().ok()?,
            peak_table: parts[5].parse().ok()?,
            decision_calls: parts[6].parse().ok()?,
            seed: parts[7].parse().ok()?,
            policy: parts[8].to_string(),
        })
    }
}

/// A parsed instance ready to solve: graph, nice decomposition, width.
#[derive(Debug)]
pub struct PreparedInstance {
    pub graph: Graph,
    pub nd: NiceDecomposition,
    pub width: u32,
}

/// Builds the nice decomposition from the supplied one, or from the
/// minimum fill-in heuristic when none is given. `width_cap` rejects
/// too-wide decompositions up front.
pub fn prepare_instance(
    g: &Graph,
    td: Option<&TreeDecomposition>,
    width_cap: Option<u32>,
) -> Result<PreparedInstance, String> {
    let owned;
    let td = match td {
        Some(td) => td,
        None => {
            owned = min_fill_td(g, 0);
            &owned
        }
    };
    let width = match validate_td(g, td) {
        TdCheck::Valid { width } => width,
        TdCheck::Violation(msg) => return Err(format!("invalid decomposition: {msg}")),
    };
    if let Some(cap) = width_cap {
        if width > cap {
            return Err(format!("decomposition width {width} exceeds cap {cap}"));
        }
    }
    let nd = make_nice(g, td).map_err(|e| e.to_string())?;
    Ok(PreparedInstance {
        graph: g.clone(),
        nd,
        width,
    })
}

/// Result of one solver run, plus the cycle when one was produced.
pub struct RunResult {
    pub outcome: RunOutcome,
    pub wall_ms: u64,
    pub peak_table: usize,
    pub decision_calls: u32,
    pub mode: String,
    pub policy: String,
    pub cycle: Option<CyclePath>,
}

fn decide_once(
    prep: &PreparedInstance,
    g: &Graph,
    cfg: &SolverConfig,
    mode: Mode,
    deadline: Option<Instant>,
    seed: u64,
    stats: &mut SolveStats,
) -> Result<SolveOutcome, SolveError> {
    match cfg.algorithm {
        Algorithm::Naive => solve_naive(g, &prep.nd, mode, deadline, stats),
        Algorithm::Rank4t => solve_rank(
            g,
            &prep.nd,
            RankVariant::Cut4t,
            &cfg.policy_for(RankVariant::Cut4t),
            mode,
            deadline,
            stats,
        ),
        Algorithm::RankImproved => solve_rank(
            g,
            &prep.nd,
            RankVariant::Improved,
            &cfg.policy_for(RankVariant::Improved),
            mode,
            deadline,
            stats,
        ),
        Algorithm::CutCountNaiveJoin | Algorithm::CutCountFastJoin => {
            let join = if cfg.algorithm == Algorithm::CutCountFastJoin {
                JoinKind::Fast
            } else {
                JoinKind::Naive
            };
            let report = cc_decide(
                g,
                &prep.nd,
                FieldSpec::gf64(),
                seed,
                join,
                deadline,
                stats,
            )?;
            Ok(if report.answer {
                SolveOutcome::Yes(None)
            } else {
                SolveOutcome::No
            })
        }
    }
}

/// Runs one (instance, algorithm) combination under the configured mode,
/// timeout, and policies.
pub fn run_solver(prep: &PreparedInstance, cfg: &SolverConfig) -> RunResult {
    let start = Instant::now();
    let deadline = cfg.timeout.map(|t| start + t);
    let effective_mode = match cfg.mode {
        ModeChoice::Decision => Mode::Decision,
        ModeChoice::Witness => Mode::Witness,
        ModeChoice::Auto => {
            if (prep.width as usize) < AUTO_WITNESS_MAX_BAG {
                Mode::Witness
            } else {
                Mode::Decision
            }
        }
    };
    // Cut&Count has no witness tables; cycles always go through
    // self-reducibility.
    let effective_mode = if cfg.algorithm.is_cutcount() {
        Mode::Decision
    } else {
        effective_mode
    };
    let mut stats = SolveStats::default();
    let mut calls = 1u32;
    let mode_label = match effective_mode {
        Mode::Decision => "decision",
        Mode::Witness => "witness",
    };
    let outcome = (|| -> Result<(RunOutcome, Option<CyclePath>), SolveError> {
        let first = decide_once(
            prep,
            &prep.graph,
            cfg,
            effective_mode,
            deadline,
            cfg.seed,
            &mut stats,
        )?;
        match first {
            SolveOutcome::No => Ok((RunOutcome::No, None)),
            SolveOutcome::Yes(witness_edges) => {
                if let Some(edges) = witness_edges {
                    let cycle = cycle_from_edges(prep.graph.vertex_count(), &edges)
                        .expect("witness edges form a spanning cycle");
                    debug_assert!(crate::extract::verify_cycle(&prep.graph, &cycle));
                    return Ok((RunOutcome::Yes, Some(cycle)));
                }
                if !cfg.want_cycle {
                    return Ok((RunOutcome::Yes, None));
                }
                // Decision-only answer but a cycle was requested: discover
                // it edge by edge; randomized deciders get fresh seeds.
                let mut sub_seed = cfg.seed;
                let mut sub_stats = SolveStats::default();
                let extraction = extract_self_reduce(&prep.graph, |g: &Graph| {
                    sub_seed += 1;
                    Ok(decide_once(
                        prep,
                        g,
                        cfg,
                        Mode::Decision,
                        deadline,
                        sub_seed,
                        &mut sub_stats,
                    )?
                    .is_yes())
                });
                stats.peak_table = stats.peak_table.max(sub_stats.peak_table);
                match extraction {
                    Ok(ext) => {
                        calls += ext.decision_calls;
                        Ok((RunOutcome::Yes, Some(ext.cycle)))
                    }
                    Err(crate::extract::ExtractError::Solve(e)) => Err(e),
                    Err(e) => Ok((RunOutcome::Error(e.to_string()), None)),
                }
            }
        }
    })();
    let (outcome, cycle) = match outcome {
        Ok((o, c)) => (o, c),
        Err(SolveError::Timeout) => (RunOutcome::Timeout, None),
        Err(e) => (RunOutcome::Error(e.to_string()), None),
    };
    let mut wall_ms = start.elapsed().as_millis() as u64;
    if outcome == RunOutcome::Timeout {
        wall_ms = wall_ms.max(cfg.timeout.map(|t| t.as_millis() as u64).unwrap_or(0));
    }
    RunResult {
        outcome,
        wall_ms,
        peak_table: stats.peak_table,
        decision_calls: calls,
        mode: mode_label.to_string(),
        policy: cfg.policy_string(),
        cycle,
    }
}

/// An instance discovered on disk: `.gr`/`.hcp` file plus optional
/// sibling `.td`.
#[derive(Debug, Clone)]
pub struct DiscoveredInstance {
    pub id: String,
    pub graph_path: PathBuf,
    pub td_path: Option<PathBuf>,
}

pub fn discover_instances(dir: &Path) -> std::io::Result<Vec<DiscoveredInstance>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        if ext == "gr" || ext == "hcp" {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("instance")
                .replace(',', "_");
            let td_path = path.with_extension("td");
            out.push(DiscoveredInstance {
                id,
                graph_path: path.clone(),
                td_path: td_path.exists().then_some(td_path),
            });
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

pub fn load_instance(inst: &DiscoveredInstance) -> Result<(Graph, Option<TreeDecomposition>), String> {
    let text = std::fs::read_to_string(&inst.graph_path).map_err(|e| e.to_string())?;
    let format = match inst.graph_path.extension().and_then(|e| e.to_str()) {
        Some("hcp") => GraphFormat::TsplibHcp,
        _ => GraphFormat::PaceGr,
    };
    let parsed = parse_graph(&text, format).map_err(|e| e.to_string())?;
    let td = match &inst.td_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| e.to_string())?;
            Some(parse_td(&text).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    Ok((parsed.graph, td))
}

#[derive(Debug)]
pub struct BenchSummary {
    pub records: Vec<RunRecord>,
    /// Per-algorithm total wall time over instances decided by every
    /// algorithm in the run.
    pub common_totals: BTreeMap<&'static str, u64>,
    pub common_count: usize,
    /// Instances on which two completed algorithms returned different
    /// answers; any entry is a hard failure of the suite.
    pub disagreements: Vec<String>,
}

pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Runs every (instance, algorithm) pair in the directory, streaming one
/// CSV row per run. Per-instance failures become `error` rows; the suite
/// always completes.
pub fn bench_dir(
    dir: &Path,
    algorithms: &[Algorithm],
    base_cfg: &SolverConfig,
    csv_out: Option<&Path>,
) -> Result<BenchSummary, String> {
    let instances = discover_instances(dir).map_err(|e| e.to_string())?;
    let writer: Option<Mutex<std::fs::File>> = match csv_out {
        Some(path) => {
            let mut f = std::fs::File::create(path).map_err(|e| e.to_string())?;
            writeln!(f, "{CSV_VERSION_COMMENT}").map_err(|e| e.to_string())?;
            writeln!(f, "{CSV_SCHEMA}").map_err(|e| e.to_string())?;
            Some(Mutex::new(f))
        }
        None => None,
    };

    let jobs: Vec<(usize, Algorithm)> = instances
        .iter()
        .enumerate()
        .flat_map(|(i, _)| algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let records: Mutex<Vec<RunRecord>> = Mutex::new(Vec::with_capacity(jobs.len()));

    let run_job = |&(idx, algorithm): &(usize, Algorithm)| {
        let inst = &instances[idx];
        let mut cfg = base_cfg.clone();
        cfg.algorithm = algorithm;
        let result = match load_instance(inst) {
            Ok((graph, td)) => match prepare_instance(&graph, td.as_ref(), cfg.width_cap) {
                Ok(prep) => {
                    if cfg.timeout.is_none() {
                        cfg.timeout = Some(default_timeout_for(prep.width));
                    }
                    run_solver(&prep, &cfg)
                }
                Err(e) => RunResult {
                    outcome: RunOutcome::Error(e),
                    wall_ms: 0,
                    peak_table: 0,
                    decision_calls: 0,
                    mode: "-".into(),
                    policy: cfg.policy_string(),
                    cycle: None,
                },
            },
            Err(e) => RunResult {
                outcome: RunOutcome::Error(e),
                wall_ms: 0,
                peak_table: 0,
                decision_calls: 0,
                mode: "-".into(),
                policy: cfg.policy_string(),
                cycle: None,
            },
        };
        let record = RunRecord {
            instance: inst.id.clone(),
            algorithm,
            mode: result.mode,
            outcome: result.outcome,
            wall_ms: result.wall_ms,
            peak_table: result.peak_table,
            decision_calls: result.decision_calls,
            seed: cfg.seed,
            policy: result.policy,
        };
        if let Some(w) = &writer {
            let mut f = w.lock().unwrap();
            let _ = writeln!(f, "{}", record.to_csv_row());
            let _ = f.flush();
        }
        records.lock().unwrap().push(record);
    };

    let workers = worker_count().min(jobs.len().max(1));
    if workers <= 1 {
        for job in &jobs {
            run_job(job);
        }
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= jobs.len() {
                        break;
                    }
                    run_job(&jobs[i]);
                });
            }
        });
    }

    let mut records = records.into_inner().unwrap();
    records.sort_by(|a, b| (a.instance.as_str(), a.algorithm.name())
        .cmp(&(b.instance.as_str(), b.algorithm.name())));
    Ok(summarize(records, algorithms))
}

fn summarize(records: Vec<RunRecord>, algorithms: &[Algorithm]) -> BenchSummary {
    let mut by_instance: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in &records {
        by_instance.entry(&r.instance).or_default().push(r);
    }
    let mut disagreements = Vec::new();
    let mut common_totals: BTreeMap<&'static str, u64> =
        algorithms.iter().map(|a| (a.name(), 0)).collect();
    let mut common_count = 0usize;
    for (instance, runs) in &by_instance {
        let decided: Vec<&&RunRecord> = runs.iter().filter(|r| r.outcome.is_decided()).collect();
        let yes = decided.iter().any(|r| r.outcome == RunOutcome::Yes);
        let no = decided.iter().any(|r| r.outcome == RunOutcome::No);
        if yes && no {
            disagreements.push(instance.to_string());
        }
        // Common subset: instances every requested algorithm decided.
        if decided.len() == algorithms.len() {
            common_count += 1;
            for r in decided {
                *common_totals.get_mut(r.algorithm.name()).unwrap() += r.wall_ms;
            }
        }
    }
    BenchSummary {
        records,
        common_totals,
        common_count,
        disagreements,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuneMode {
    /// Sweep the absolute per-ℓ thresholds, one ℓ at a time.
    Tau,
    /// Sweep the multiplicative trigger over {0.5, 1, 2, .., 1024}.
    Alpha,
}

#[derive(Debug, Clone)]
pub struct TuneRow {
    pub variant: &'static str,
    pub l: Option<usize>,
    pub tau: Option<usize>,
    pub alpha: Option<f64>,
    pub total_ms: u64,
    pub decided: usize,
    pub instances: usize,
}

pub fn tau_grid(l: usize) -> &'static [usize] {
    match l {
        4 => &[3, 4],
        6 => &[5, 7, 9, 11, 13, 15, 17],
        8 => &[9, 18, 36, 72, 144],
        _ => &[],
    }
}

pub fn alpha_grid() -> [f64; 12] {
    [
        0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0,
    ]
}

/// Runs the tuning sweep over the instances in `dir` for both rank-based
/// variants. Answers must be identical across all grid points (policies
/// affect running time only); a flip is reported as an error.
pub fn tune_dir(
    dir: &Path,
    mode: TuneMode,
    timeout: Option<Duration>,
) -> Result<Vec<TuneRow>, String> {
    let instances = discover_instances(dir).map_err(|e| e.to_string())?;
    let mut loaded = Vec::new();
    for inst in &instances {
        let (graph, td) = load_instance(inst)?;
        let prep = prepare_instance(&graph, td.as_ref(), None)?;
        loaded.push((inst.id.clone(), prep));
    }
    let mut rows = Vec::new();
    let mut reference_answers: BTreeMap<(&str, String), bool> = BTreeMap::new();
    let mut sweep = |cfg: &SolverConfig,
                     variant_name: &'static str,
                     l: Option<usize>,
                     tau: Option<usize>,
                     alpha: Option<f64>,
                     rows: &mut Vec<TuneRow>|
     -> Result<(), String> {
        let mut total_ms = 0;
        let mut decided = 0;
        for (id, prep) in &loaded {
            let result = run_solver(prep, cfg);
            total_ms += result.wall_ms;
            if result.outcome.is_decided() {
                decided += 1;
                let answer = result.outcome == RunOutcome::Yes;
                let key = (variant_name, id.clone());
                if let Some(prev) = reference_answers.get(&key) {
                    if *prev != answer {
                        return Err(format!(
                            "answer flip on {id} under {variant_name} tuning"
                        ));
                    }
                } else {
                    reference_answers.insert(key, answer);
                }
            }
        }
        rows.push(TuneRow {
            variant: variant_name,
            l,
            tau,
            alpha,
            total_ms,
            decided,
            instances: loaded.len(),
        });
        Ok(())
    };
    for (algorithm, variant_name) in [
        (Algorithm::Rank4t, "rank4t"),
        (Algorithm::RankImproved, "rank-improved"),
    ] {
        match mode {
            TuneMode::Tau => {
                for l in [4usize, 6, 8] {
                    for &tau in tau_grid(l) {
                        let mut cfg = SolverConfig::new(algorithm);
                        cfg.timeout = timeout;
                        cfg.tau_overrides = vec![(l, tau)];
                        sweep(&cfg, variant_name, Some(l), Some(tau), None, &mut rows)?;
                    }
                }
            }
            TuneMode::Alpha => {
                for alpha in alpha_grid() {
                    let mut cfg = SolverConfig::new(algorithm);
                    cfg.timeout = timeout;
                    cfg.alpha = Some(alpha);
                    // Multiplicative trigger everywhere for the alpha sweep.
                    cfg.width_switch = Some(0);
                    sweep(&cfg, variant_name, None, None, Some(alpha), &mut rows)?;
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct StatsRow {
    pub instance: String,
    pub stats: crate::graph::GraphStats,
    pub width: Option<u32>,
}

pub const STATS_CSV_SCHEMA: &str =
    "instance,n,m,min_deg,avg_deg,max_deg,girth,diameter,width";

/// Per-instance structural statistics plus decomposition width when a
/// `.td` is present. Failures are reported per row, never aborting.
pub fn stats_dir(dir: &Path) -> Result<Vec<Result<StatsRow, String>>, String> {
    let instances = discover_instances(dir).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for inst in &instances {
        rows.push(load_instance(inst).map(|(graph, td)| {
            let width = td.as_ref().and_then(|td| match validate_td(&graph, td) {
                TdCheck::Valid { width } => Some(width),
                TdCheck::Violation(_) => None,
            });
            StatsRow {
                instance: inst.id.clone(),
                stats: graph.stats(),
                width,
            }
        }));
    }
    Ok(rows)
}

pub fn stats_row_to_csv(row: &StatsRow) -> String {
    format!(
        "{},{},{},{},{:.3},{},{},{},{}",
        row.instance,
        row.stats.n,
        row.stats.m,
        row.stats.min_deg,
        row.stats.avg_deg,
        row.stats.max_deg,
        row.stats.girth,
        row.stats.diameter,
        row.width.map_or(String::from("-"), |w| w.to_string())
    )
}
