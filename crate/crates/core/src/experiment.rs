//! Reproducible experiment runs: a serializable config, one row per trial,
//! CSV and JSON output.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{mixed_specs, CorpusEntry, GraphSpec};
use crate::dynamic::{static_from_weak, DynParams, Profile};
use crate::engine::{boost, EngineConfig};
use crate::error::{Error, Result};
use crate::oracle::{oracle_by_name, weak_by_name};
use crate::params::{Constants, Epsilon};
use crate::problem1::{random_stream, run_harness, ChunkReport, HarnessParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Boost,
    Dynamic,
    Problem1,
    /// Boost with the invariant checker after every operation.
    Verify,
}

/// Where the graphs come from: explicit specs, or a mixed corpus of
/// `count` graphs with at most `max_n` vertices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub count: usize,
    pub max_n: usize,
    pub specs: Vec<GraphSpec>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            count: 50,
            max_n: 60,
            specs: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Problem1Config {
    pub n: usize,
    pub updates: usize,
}

impl Default for Problem1Config {
    fn default() -> Self {
        Problem1Config { n: 256, updates: 320 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub epsilons: Vec<f64>,
    /// Matching oracle for boost/verify, weak oracle for dynamic/problem1.
    pub oracle: String,
    pub seed: u64,
    pub corpus: CorpusConfig,
    /// Repetitions of every (graph, ε) pair with different oracle seeds; in
    /// problem1 mode, the number of streams.
    pub trials: usize,
    pub constants: Constants,
    pub profile: Profile,
    pub problem1: Problem1Config,
    /// Fill the wall-time column. Off gives byte-identical reruns.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Boost,
            epsilons: vec![0.25],
            oracle: "greedy".into(),
            seed: 1,
            corpus: CorpusConfig::default(),
            trials: 1,
            constants: Constants::default(),
            profile: Profile::Desk,
            problem1: Problem1Config::default(),
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn specs(&self) -> Vec<GraphSpec> {
        if self.corpus.specs.is_empty() {
            mixed_specs(self.corpus.count, self.corpus.max_n, self.seed)
        } else {
            self.corpus.specs.clone()
        }
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            constants: self.constants.clone(),
            verify_ops: self.mode == Mode::Verify,
            ..EngineConfig::default()
        }
    }
}

/// One trial. Column order is the CSV order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub graph: String,
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
    pub mu: usize,
    pub matched: usize,
    pub ratio: f64,
    pub initial: usize,
    pub oracle_calls: u64,
    pub weak_calls: u64,
    pub mpc_rounds: u64,
    pub congest_rounds: u64,
    pub phases: usize,
    /// Contract violations (problem1) or component-cap violations (boost).
    pub violations: u64,
    /// The run's guarantee preconditions held.
    pub guaranteed: bool,
    pub passed: bool,
    pub error: String,
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub epsilon: f64,
    pub trials: usize,
    pub failures: usize,
    pub min_ratio: f64,
    pub mean_ratio: f64,
    pub mean_oracle_calls: f64,
    pub mean_weak_calls: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<Aggregate>,
    /// Per-chunk reports of problem1 mode, by trial.
    pub chunks: Vec<Vec<ChunkReport>>,
}

impl RunReport {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed).count()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `(graph index, ε index, repetition)` of a trial id.
fn decode(cfg: &ExperimentConfig, trial: usize) -> (usize, usize, usize) {
    let reps = cfg.trials.max(1);
    let per_graph = cfg.epsilons.len() * reps;
    let rest = trial % per_graph;
    (trial / per_graph, rest / reps, rest % reps)
}

pub fn trial_count(cfg: &ExperimentConfig) -> usize {
    match cfg.mode {
        Mode::Problem1 => cfg.trials.max(1) * cfg.epsilons.len(),
        _ => cfg.specs().len() * cfg.epsilons.len() * cfg.trials.max(1),
    }
}

/// Seed of one trial, derived from the config seed only.
pub fn trial_seed(cfg: &ExperimentConfig, trial: usize) -> u64 {
    let mut x = cfg.seed ^ (trial as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x ^= x >> 31;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^ (x >> 29)
}

/// Runs every trial, in parallel, rows ordered by trial id.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    for &e in &cfg.epsilons {
        Epsilon::new(e)?;
    }
    let specs = cfg.specs();
    let corpus: Vec<CorpusEntry> = match cfg.mode {
        Mode::Problem1 => Vec::new(),
        _ => specs.par_iter().enumerate().map(|(i, s)| CorpusEntry::new(i, s.clone())).collect(),
    };
    let results: Vec<(TrialRow, Option<Vec<ChunkReport>>)> = (0..trial_count(cfg))
        .into_par_iter()
        .map(|t| run_trial_with(cfg, &corpus, t))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut chunks = Vec::new();
    for (row, ch) in results {
        rows.push(row);
        if let Some(c) = ch {
            chunks.push(c);
        }
    }
    let aggregates = aggregate(cfg, &rows);
    Ok(RunReport {
        config: cfg.clone(),
        rows,
        aggregates,
        chunks,
    })
}

/// Re-runs one trial from the config alone.
pub fn replay_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRow> {
    if trial >= trial_count(cfg) {
        return Err(Error::Config(format!("trial {trial} out of range")));
    }
    let corpus = match cfg.mode {
        Mode::Problem1 => Vec::new(),
        _ => {
            let specs = cfg.specs();
            let (g, _, _) = decode(cfg, trial);
            // Only the one graph is needed; keep indices aligned.
            let mut c: Vec<CorpusEntry> = Vec::with_capacity(g + 1);
            for (i, s) in specs.iter().enumerate().take(g + 1) {
                c.push(if i == g {
                    CorpusEntry::new(i, s.clone())
                } else {
                    CorpusEntry {
                        id: i,
                        spec: s.clone(),
                        graph: crate::graph::Graph::new(0),
                        mu: 0,
                    }
                });
            }
            c
        }
    };
    Ok(run_trial_with(cfg, &corpus, trial).0)
}

fn failed_row(trial: usize, graph: String, epsilon: f64, err: &Error) -> TrialRow {
    TrialRow {
        trial,
        graph,
        epsilon,
        n: 0,
        m: 0,
        mu: 0,
        matched: 0,
        ratio: 0.0,
        initial: 0,
        oracle_calls: 0,
        weak_calls: 0,
        mpc_rounds: 0,
        congest_rounds: 0,
        phases: 0,
        violations: 0,
        guaranteed: false,
        passed: false,
        error: err.to_string(),
        wall_ms: None,
    }
}

fn run_trial_with(cfg: &ExperimentConfig, corpus: &[CorpusEntry], trial: usize) -> (TrialRow, Option<Vec<ChunkReport>>) {
    let start = Instant::now();
    let seed = trial_seed(cfg, trial);
    let (mut row, chunks) = match cfg.mode {
        Mode::Problem1 => {
            let eps = cfg.epsilons[trial / cfg.trials.max(1)];
            let label = format!("stream-n{}-u{}-t{trial}", cfg.problem1.n, cfg.problem1.updates);
            match problem1_trial(cfg, eps, seed) {
                Ok((r, c)) => (TrialRow { trial, graph: label, ..r }, Some(c)),
                Err(e) => (failed_row(trial, label, eps, &e), Some(Vec::new())),
            }
        }
        _ => {
            let (gi, ei, _) = decode(cfg, trial);
            let entry = &corpus[gi];
            let eps = cfg.epsilons[ei];
            let label = entry.spec.label();
            let r = match cfg.mode {
                Mode::Dynamic => dynamic_trial(cfg, entry, eps, seed),
                _ => boost_trial(cfg, entry, eps, seed),
            };
            match r {
                Ok(r) => (TrialRow { trial, graph: label, ..r }, None),
                Err(e) => (failed_row(trial, label, eps, &e), None),
            }
        }
    };
    row.wall_ms = cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    (row, chunks)
}

fn ratio(matched: usize, mu: usize) -> f64 {
    if mu == 0 { 1.0 } else { matched as f64 / mu as f64 }
}

fn meets_bound(matched: usize, mu: usize, eps: f64) -> bool {
    matched as f64 * (1.0 + eps) >= mu as f64 - 1e-9
}

fn boost_trial(cfg: &ExperimentConfig, entry: &CorpusEntry, eps: f64, seed: u64) -> Result<TrialRow> {
    let oracle = oracle_by_name(&cfg.oracle, Some(seed))?;
    let out = boost(&entry.graph, eps, oracle, &cfg.engine_config())?;
    let matched = out.matching.len();
    let valid = out.matching.is_valid_in(&entry.graph);
    Ok(TrialRow {
        trial: 0,
        graph: String::new(),
        epsilon: out.epsilon,
        n: entry.graph.vertex_count(),
        m: entry.graph.edge_count(),
        mu: entry.mu,
        matched,
        ratio: ratio(matched, entry.mu),
        initial: out.stats.initial_size,
        oracle_calls: out.oracle_stats.calls,
        weak_calls: 0,
        mpc_rounds: out.rounds.mpc,
        congest_rounds: out.rounds.congest,
        phases: out.stats.phases_run,
        violations: out.rounds.component_violations,
        guaranteed: true,
        passed: valid && meets_bound(matched, entry.mu, out.epsilon),
        error: if valid { String::new() } else { "output is not a matching".into() },
        wall_ms: None,
    })
}

fn dynamic_trial(cfg: &ExperimentConfig, entry: &CorpusEntry, eps: f64, seed: u64) -> Result<TrialRow> {
    let weak = weak_by_name(&cfg.oracle)?;
    let e = Epsilon::new(eps)?.value();
    let params = DynParams::for_profile(cfg.profile, e, weak.lambda());
    let out = static_from_weak(&entry.graph, e, weak, &params, &cfg.engine_config(), seed)?;
    let matched = out.matching.len();
    let n = entry.graph.vertex_count();
    let guaranteed = entry.mu as f64 >= params.t_const * e * n as f64;
    let within_budget = out.weak.calls as f64 <= out.weak_budget;
    let valid = out.matching.is_valid_in(&entry.graph);
    let ok_bound = meets_bound(matched, entry.mu, e);
    Ok(TrialRow {
        trial: 0,
        graph: String::new(),
        epsilon: e,
        n,
        m: entry.graph.edge_count(),
        mu: entry.mu,
        matched,
        ratio: ratio(matched, entry.mu),
        initial: out.initial_size,
        oracle_calls: 0,
        weak_calls: out.weak.calls,
        mpc_rounds: 0,
        congest_rounds: 0,
        phases: out.stats.phases_run,
        violations: 0,
        guaranteed,
        passed: valid && within_budget && (ok_bound || !guaranteed),
        error: if !valid {
            "output is not a matching".into()
        } else if !within_budget {
            format!("{} weak calls exceed budget {}", out.weak.calls, out.weak_budget)
        } else {
            String::new()
        },
        wall_ms: None,
    })
}

fn problem1_trial(cfg: &ExperimentConfig, eps: f64, seed: u64) -> Result<(TrialRow, Vec<ChunkReport>)> {
    let weak = weak_by_name(&cfg.oracle)?;
    let p = &cfg.problem1;
    let stream = random_stream(p.n, p.updates, seed);
    let mut hp = HarnessParams::new(Epsilon::new(eps)?.value(), seed);
    hp.profile = cfg.profile;
    let chunks = run_harness(p.n, &stream, weak, &hp, &cfg.engine_config())?;
    let violations: u64 = chunks.iter().map(|c| c.violations.len() as u64).sum();
    let last = chunks.last();
    let matched = last.map_or(0, |c| c.matching_size);
    let mu = last.map_or(0, |c| c.mu);
    let final_graph_edges = last.map_or(0, |c| c.graph_size);
    Ok((
        TrialRow {
            trial: 0,
            graph: String::new(),
            epsilon: hp.epsilon,
            n: p.n,
            m: final_graph_edges,
            mu,
            matched,
            ratio: ratio(matched, mu),
            initial: 0,
            oracle_calls: 0,
            weak_calls: chunks.iter().map(|c| c.weak_calls).sum(),
            mpc_rounds: 0,
            congest_rounds: 0,
            phases: chunks.len(),
            violations,
            guaranteed: true,
            passed: violations == 0,
            error: String::new(),
            wall_ms: None,
        },
        chunks,
    ))
}

fn aggregate(cfg: &ExperimentConfig, rows: &[TrialRow]) -> Vec<Aggregate> {
    cfg.epsilons
        .iter()
        .filter_map(|&e| {
            let e = Epsilon::new(e).ok()?.value();
            let rs: Vec<&TrialRow> = rows.iter().filter(|r| r.epsilon == e).collect();
            if rs.is_empty() {
                return None;
            }
            let k = rs.len() as f64;
            Some(Aggregate {
                epsilon: e,
                trials: rs.len(),
                failures: rs.iter().filter(|r| !r.passed).count(),
                min_ratio: rs.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min),
                mean_ratio: rs.iter().map(|r| r.ratio).sum::<f64>() / k,
                mean_oracle_calls: rs.iter().map(|r| r.oracle_calls as f64).sum::<f64>() / k,
                mean_weak_calls: rs.iter().map(|r| r.weak_calls as f64).sum::<f64>() / k,
            })
        })
        .collect()
}
