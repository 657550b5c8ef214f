use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use matchboost::corpus::{build_corpus, mixed_specs, GraphSpec};
use matchboost::dynamic::{static_from_weak, DynParams, Profile};
use matchboost::engine::{boost, EngineConfig};
use matchboost::experiment::{replay_trial, run_experiment, ExperimentConfig, Mode, RunReport};
use matchboost::oracle::{exact_mcm, oracle_by_name, weak_by_name};
use matchboost::problem1::{parse_stream, run_harness, HarnessParams};
use matchboost::Graph;
use serde_json::json;

#[derive(Parser)]
#[command(name = "matchboost", version, about = "Boost approximate matching oracles to (1+ε)-approximate maximum matchings")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a seeded graph corpus with exact matching numbers.
    Gen(GenArgs),
    /// Boost a matching oracle on a corpus or a single graph.
    Boost(RunArgs),
    /// Run the weak-oracle variant on a corpus or a single graph.
    Dynamic(RunArgs),
    /// Run update streams through the chunked weak-oracle harness.
    Problem1(Problem1Args),
    /// Boost with per-operation invariant checks and compare with the exact answer.
    Verify(RunArgs),
    /// Summarize a saved report, optionally replaying trials.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of mixed graphs.
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 60)]
    max_n: usize,
    /// Explicit graph spec as JSON, e.g. '{"kind":"path","n":6}'. Repeatable.
    #[arg(long)]
    spec: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write JSON graph documents instead of edge lists.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct Common {
    /// Comma-separated list of ε values.
    #[arg(long, value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_profile)]
    profile: Option<Profile>,
    /// Output directory for report.csv, report.json and config.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    /// Constant overrides, `key=value,...`.
    #[arg(long)]
    constants: Option<String>,
    /// Base configuration (JSON); flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fill wall-time columns.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Run on this graph file instead of a generated corpus.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    max_n: Option<usize>,
}

#[derive(Args)]
struct Problem1Args {
    #[command(flatten)]
    common: Common,
    /// Vertices of each generated stream, or of the given stream.
    #[arg(long)]
    n: Option<usize>,
    /// Length of each generated stream.
    #[arg(long)]
    updates: Option<usize>,
    /// Run this stream file instead of generated ones.
    #[arg(long)]
    stream: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// A report.json written by an earlier run, or its directory.
    #[arg(long)]
    input: PathBuf,
    /// Replay these trials (or every failing one with `--replay-failures`)
    /// and check they reproduce the stored rows.
    #[arg(long, value_delimiter = ',')]
    replay: Vec<usize>,
    #[arg(long)]
    replay_failures: bool,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    match s {
        "desk" => Ok(Profile::Desk),
        "paper-faithful" => Ok(Profile::PaperFaithful),
        _ => Err(format!("unknown profile `{s}` (desk | paper-faithful)")),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Boost(a) => run(Mode::Boost, a),
        Cmd::Dynamic(a) => run(Mode::Dynamic, a),
        Cmd::Verify(a) => run(Mode::Verify, a),
        Cmd::Problem1(a) => problem1(a),
        Cmd::Report(a) => report(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn gen(a: GenArgs) -> Result<bool> {
    let specs: Vec<GraphSpec> = if a.spec.is_empty() {
        mixed_specs(a.count, a.max_n, a.seed)
    } else {
        a.spec
            .iter()
            .map(|s| serde_json::from_str(s).with_context(|| format!("bad spec `{s}`")))
            .collect::<Result<_>>()?
    };
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut manifest = Vec::new();
    for e in build_corpus(&specs) {
        let ext = if a.json { "json" } else { "edges" };
        let file = format!("{:04}-{}.{ext}", e.id, e.spec.label());
        let body = if a.json { e.graph.to_json() } else { e.graph.to_edge_list() };
        fs::write(a.out.join(&file), body).with_context(|| format!("writing {file}"))?;
        manifest.push(json!({
            "id": e.id,
            "file": file,
            "spec": e.spec,
            "n": e.graph.vertex_count(),
            "m": e.graph.edge_count(),
            "mu": e.mu,
        }));
    }
    fs::write(a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    println!("wrote {} graphs to {}", manifest.len(), a.out.display());
    Ok(true)
}

fn base_config(c: &Common, mode: Mode) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => serde_json::from_str(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)
            .with_context(|| format!("parsing {}", p.display()))?,
        None => {
            let mut d = ExperimentConfig::default();
            if matches!(mode, Mode::Dynamic | Mode::Problem1) {
                d.oracle = "weak-exact".into();
            }
            d
        }
    };
    cfg.mode = mode;
    if !c.epsilon.is_empty() {
        cfg.epsilons = c.epsilon.clone();
    }
    if let Some(o) = &c.oracle {
        cfg.oracle = o.clone();
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(p) = c.profile {
        cfg.profile = p;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    if let Some(k) = &c.constants {
        cfg.constants.apply_overrides(k)?;
    }
    cfg.timing |= c.timing;
    Ok(cfg)
}

fn write_report(out: Option<&Path>, report: &RunReport) -> Result<()> {
    let Some(dir) = out else { return Ok(()) };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("report.csv"), report.to_csv()?)?;
    fs::write(dir.join("report.json"), report.to_json())?;
    fs::write(dir.join("config.json"), serde_json::to_string_pretty(&report.config)?)?;
    Ok(())
}

fn print_summary(report: &RunReport) {
    println!(
        "{:>8} {:>7} {:>9} {:>10} {:>10} {:>12} {:>12}",
        "epsilon", "trials", "failures", "min_ratio", "mean_ratio", "oracle_calls", "weak_calls"
    );
    for a in &report.aggregates {
        println!(
            "{:>8} {:>7} {:>9} {:>10.4} {:>10.4} {:>12.1} {:>12.1}",
            a.epsilon, a.trials, a.failures, a.min_ratio, a.mean_ratio, a.mean_oracle_calls, a.mean_weak_calls
        );
    }
    for r in report.rows.iter().filter(|r| !r.passed) {
        println!("FAIL trial {} {} eps={} matched={} mu={} {}", r.trial, r.graph, r.epsilon, r.matched, r.mu, r.error);
    }
}

fn run(mode: Mode, a: RunArgs) -> Result<bool> {
    let mut cfg = base_config(&a.common, mode)?;
    if let Some(path) = &a.graph {
        return run_single(mode, &cfg, path, a.common.out.as_deref());
    }
    if let Some(c) = a.count {
        cfg.corpus.count = c;
    }
    if let Some(n) = a.max_n {
        cfg.corpus.max_n = n;
    }
    let report = run_experiment(&cfg)?;
    write_report(a.common.out.as_deref(), &report)?;
    print_summary(&report);
    Ok(report.failures() == 0)
}

fn run_single(mode: Mode, cfg: &ExperimentConfig, path: &Path, out: Option<&Path>) -> Result<bool> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let g = Graph::load(&text).with_context(|| format!("parsing {}", path.display()))?;
    let ecfg = cfg.engine_config();
    let mu = exact_mcm(&g).len();
    let mut ok = true;
    for &eps in &cfg.epsilons {
        let (matching, line) = match mode {
            Mode::Dynamic => {
                let weak = weak_by_name(&cfg.oracle)?;
                let params = DynParams::for_profile(cfg.profile, eps, weak.lambda());
                let o = static_from_weak(&g, eps, weak, &params, &ecfg, cfg.seed)?;
                let line = json!({
                    "epsilon": eps,
                    "matched": o.matching.len(),
                    "initial": o.initial_size,
                    "weak_calls": o.initial_calls + o.weak.calls,
                    "weak_budget": o.weak_budget,
                    "fallback": o.fallback,
                    "precondition_warning": o.precondition_warning,
                });
                (o.matching, line)
            }
            _ => {
                let o = boost(&g, eps, oracle_by_name(&cfg.oracle, Some(cfg.seed))?, &ecfg)?;
                let line = json!({
                    "epsilon": eps,
                    "matched": o.matching.len(),
                    "initial": o.stats.initial_size,
                    "oracle_calls": o.oracle_stats.calls,
                    "mpc_rounds": o.rounds.mpc,
                    "congest_rounds": o.rounds.congest,
                    "phases": o.stats.phases_run,
                });
                (o.matching, line)
            }
        };
        let mut line = line;
        if mode == Mode::Verify {
            let bound = (mu as f64 / (1.0 + eps)).ceil() as usize;
            let pass = matching.is_valid_in(&g) && matching.len() >= bound;
            ok &= pass;
            line["mu"] = json!(mu);
            line["passed"] = json!(pass);
        }
        println!("{line}");
        if let Some(dir) = out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join(format!("matching-eps{eps}.edges")), matching.to_edge_list())?;
        }
    }
    Ok(ok)
}

fn problem1(a: Problem1Args) -> Result<bool> {
    let mut cfg = base_config(&a.common, Mode::Problem1)?;
    if let Some(n) = a.n {
        cfg.problem1.n = n;
    }
    if let Some(u) = a.updates {
        cfg.problem1.updates = u;
    }
    if let Some(path) = &a.stream {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let ups = parse_stream(&text)?;
        let ecfg = EngineConfig {
            constants: cfg.constants.clone(),
            ..EngineConfig::default()
        };
        let mut ok = true;
        for &eps in &cfg.epsilons {
            let mut hp = HarnessParams::new(eps, cfg.seed);
            hp.profile = cfg.profile;
            hp.timing = cfg.timing;
            let reports = run_harness(cfg.problem1.n, &ups, weak_by_name(&cfg.oracle)?, &hp, &ecfg)?;
            let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
            ok &= violations == 0;
            println!(
                "{}",
                json!({"epsilon": eps, "chunks": reports.len(), "violations": violations,
                       "dropped": reports.iter().map(|r| r.dropped).sum::<u64>()})
            );
            if let Some(dir) = &a.common.out {
                fs::create_dir_all(dir)?;
                fs::write(dir.join(format!("chunks-eps{eps}.json")), serde_json::to_string_pretty(&reports)?)?;
            }
        }
        return Ok(ok);
    }
    let report = run_experiment(&cfg)?;
    write_report(a.common.out.as_deref(), &report)?;
    print_summary(&report);
    Ok(report.failures() == 0)
}

fn report(a: ReportArgs) -> Result<bool> {
    let path = if a.input.is_dir() { a.input.join("report.json") } else { a.input.clone() };
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let rep: RunReport = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    print_summary(&rep);
    let mut ids = a.replay.clone();
    if a.replay_failures {
        ids.extend(rep.rows.iter().filter(|r| !r.passed).map(|r| r.trial));
    }
    let mut reproduced = true;
    for t in ids {
        let stored = rep
            .rows
            .iter()
            .find(|r| r.trial == t)
            .with_context(|| format!("trial {t} is not in the report"))?;
        let mut again = replay_trial(&rep.config, t)?;
        // Wall time is the one column allowed to differ.
        again.wall_ms = stored.wall_ms;
        let same = serde_json::to_string(stored)? == serde_json::to_string(&again)?;
        println!("replay trial {t}: {}", if same { "identical" } else { "DIFFERS" });
        reproduced &= same;
    }
    Ok(reproduced && rep.failures() == 0)
}
