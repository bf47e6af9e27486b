//! Batch experiments: seeded trials, a method list run from the same start
//! profile, and CSV/JSON outputs.
//!
//! Two metric files are written. `metrics.csv` holds only values that are a
//! function of the configuration (overloads, rounds, evaluation counts), so
//! it is byte-identical across reruns and thread budgets. `timings.csv`
//! holds wall-clock measurements keyed by the same `(trial, method, kappa)`.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airspace::{compute_loads, ActionProfile, Scenario};
use crate::baselines::{centralized, fcfs};
use crate::dynamics::{run, AgentOrder, RunConfig, Solver, Trace};
use crate::error::ExperimentError;
use crate::ga::GaConfig;
use crate::game::Kappa;
use crate::oracle::NaiveLoads;
use crate::scenario::{self, PresetOverrides};
use crate::seed;

/// Environment variable holding the default thread budget.
pub const THREADS_ENV: &str = "DECONGEST_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScenarioSource {
    /// A named preset; each trial draws its own seed.
    Preset {
        name: String,
        #[serde(default)]
        flights: Option<usize>,
        #[serde(default)]
        capacity: Option<u32>,
    },
    /// One scenario shared by all trials.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    Dynamics { kappa: Kappa },
    Centralized,
    Fcfs,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Dynamics { .. } => "dynamics",
            Method::Centralized => "centralized",
            Method::Fcfs => "fcfs",
        }
    }

    pub fn kappa(&self) -> Option<Kappa> {
        match *self {
            Method::Dynamics { kappa } => Some(kappa),
            _ => None,
        }
    }

    /// File-name tag of the method's trace.
    pub fn tag(&self) -> String {
        match self.kappa() {
            Some(k) => format!("dynamics_k{}", k.to_string().replace('/', "over")),
            None => self.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: ScenarioSource,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default = "default_rounds")]
    pub max_rounds: usize,
    #[serde(default)]
    pub shuffle_agents: bool,
    /// Worker threads; falls back to `DECONGEST_THREADS`, then to rayon's
    /// default. Never changes results.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "yes")]
    pub write_traces: bool,
    #[serde(default = "yes")]
    pub write_occupancy: bool,
}

fn default_rounds() -> usize {
    1000
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(source: ScenarioSource, methods: Vec<Method>, trials: usize, base_seed: u64) -> Self {
        Self {
            source,
            methods,
            trials,
            base_seed,
            output_dir: None,
            ga: GaConfig::default(),
            max_rounds: default_rounds(),
            shuffle_agents: false,
            threads: None,
            write_traces: true,
            write_occupancy: true,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(ExperimentError::Config("method list is empty".into()));
        }
        if self.max_rounds == 0 {
            return Err(ExperimentError::Config("max_rounds must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(ExperimentError::Config("thread budget must be at least 1".into()));
        }
        self.ga.validate().map_err(|e| ExperimentError::Config(e.to_string()))?;
        if let ScenarioSource::Preset { name, .. } = &self.source {
            if !scenario::PRESETS.contains(&name.as_str()) {
                return Err(crate::error::ScenarioError::UnknownPreset(name.clone()).into());
            }
        }
        Ok(())
    }

    /// Explicit budget, else `DECONGEST_THREADS`, else `None`.
    pub fn thread_budget(&self) -> Option<usize> {
        self.threads.or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&n| n > 0)
        })
    }
}

mod na {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_f64(*x),
            None => s.serialize_str("NA"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let text = String::deserialize(d)?;
        if text == "NA" {
            return Ok(None);
        }
        text.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

/// One row of `metrics.csv`. Column order is the field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub trial: usize,
    pub method: String,
    /// Empty for baselines.
    pub kappa: Option<Kappa>,
    pub scenario_seed: u64,
    pub n: usize,
    pub m: usize,
    /// Uniform capacity, or the largest one when capacities differ.
    pub capacity: u32,
    pub initial_overload: u64,
    pub final_overload: u64,
    /// `100 (initial − final) / initial`, `NA` when the start is feasible.
    #[serde(with = "na")]
    pub reduction_pct: Option<f64>,
    pub rounds: usize,
    pub accepted_updates: usize,
    pub evaluations: u64,
    /// Evaluations spent until total overload first reached the centralized
    /// result of the same trial; empty if never or without a centralized
    /// run.
    pub evaluations_to_centralized: Option<u64>,
    pub terminal: String,
    /// The stored terminal profile was recounted by the naive counter and
    /// matched `final_overload`.
    pub recount_ok: bool,
}

impl MetricsRow {
    pub fn group(&self) -> String {
        format!("n={},m={},D={}", self.n, self.m, self.capacity)
    }
}

/// One row of `timings.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub trial: usize,
    pub method: String,
    pub kappa: Option<Kappa>,
    pub n: usize,
    pub m: usize,
    pub capacity: u32,
    pub total_seconds: f64,
    /// `total_seconds / m`.
    pub per_agent_seconds: f64,
    pub seconds_to_centralized: Option<f64>,
}

impl TimingRow {
    pub fn group(&self) -> String {
        format!("n={},m={},D={}", self.n, self.m, self.capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedRow {
    pub trial: usize,
    pub method: String,
    pub kappa: Option<Kappa>,
    pub group: String,
    pub total: f64,
    pub per_agent: f64,
    pub to_centralized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub metrics: Vec<MetricsRow>,
    pub timings: Vec<TimingRow>,
}

struct TrialOutput {
    metrics: Vec<MetricsRow>,
    timings: Vec<TimingRow>,
    traces: Vec<(String, Trace)>,
    occupancy: Vec<(String, ActionProfile)>,
    scenario: Scenario,
}

fn load_trial_scenario(config: &ExperimentConfig, scenario_seed: u64) -> Result<Scenario, ExperimentError> {
    Ok(match &config.source {
        ScenarioSource::Preset {
            name,
            flights,
            capacity,
        } => scenario::preset(
            name,
            scenario_seed,
            PresetOverrides {
                flights: *flights,
                capacity: *capacity,
            },
        )?,
        ScenarioSource::File { path } => scenario::load(path)?,
    })
}

fn uniform_capacity(s: &Scenario) -> u32 {
    s.sectors().iter().map(|x| x.capacity).max().unwrap_or(0)
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialOutput, ExperimentError> {
    let scenario_seed = seed::derive(config.base_seed, &[trial as u64, seed::label("scenario")]);
    let scenario = load_trial_scenario(config, scenario_seed)?;
    let x0 = ActionProfile::zeros(&scenario);
    let initial = compute_loads(&scenario, &x0)?.total_overload();
    let (n, m, capacity) = (scenario.num_flights(), scenario.num_sectors(), uniform_capacity(&scenario));

    struct Outcome {
        profile: ActionProfile,
        final_overload: u64,
        rounds: usize,
        accepted: usize,
        evaluations: u64,
        terminal: String,
        seconds: f64,
        trace: Option<Trace>,
    }

    let ga_for = |method: &Method| config.ga.with_seed(seed::derive(config.base_seed, &[trial as u64, seed::label(&method.tag())]));
    let execute = |method: &Method| -> Result<Outcome, ExperimentError> {
        let clock = Instant::now();
        Ok(match *method {
            Method::Dynamics { kappa } => {
                let ga = ga_for(method);
                let order = if config.shuffle_agents {
                    AgentOrder::SeededShufflePerRound { seed: ga.seed }
                } else {
                    AgentOrder::ById
                };
                let trace = run(
                    &scenario,
                    &x0,
                    &RunConfig {
                        kappa,
                        ga,
                        agent_order: order,
                        max_rounds: config.max_rounds,
                        solver: Solver::Ga,
                    },
                )?;
                Outcome {
                    profile: trace.terminal_profile.clone(),
                    final_overload: trace.final_overload(),
                    rounds: trace.rounds,
                    accepted: trace.accepted_steps().count(),
                    evaluations: trace.evaluations,
                    terminal: trace.terminal_label().to_string(),
                    seconds: clock.elapsed().as_secs_f64(),
                    trace: Some(trace),
                }
            }
            Method::Centralized => {
                let r = centralized(&scenario, &x0, &ga_for(method))?;
                Outcome {
                    final_overload: r.total_overload_after,
                    rounds: 1,
                    accepted: usize::from(r.profile != x0),
                    evaluations: r.evaluations,
                    terminal: if r.total_overload_after == 0 { "feasible" } else { "ga_budget" }.into(),
                    profile: r.profile,
                    seconds: clock.elapsed().as_secs_f64(),
                    trace: None,
                }
            }
            Method::Fcfs => {
                let r = fcfs(&scenario, &x0)?;
                Outcome {
                    final_overload: r.total_overload_after,
                    rounds: 1,
                    accepted: r.profile.indices().iter().filter(|&&a| a > 0).count(),
                    evaluations: 0,
                    // Overload spilled into bins the scan already passed is
                    // not listed in `stuck`.
                    terminal: match (r.total_overload_after, r.stuck.is_empty()) {
                        (0, _) => "feasible",
                        (_, false) => "stuck",
                        (_, true) => "behind_scan",
                    }
                    .into(),
                    profile: r.profile,
                    seconds: clock.elapsed().as_secs_f64(),
                    trace: None,
                }
            }
        })
    };

    // Centralized runs first so dynamics rows can report the time to reach
    // its level; rows keep the configured order.
    let mut outcomes: Vec<Option<Outcome>> = config.methods.iter().map(|_| None).collect();
    for (k, method) in config.methods.iter().enumerate() {
        if *method == Method::Centralized {
            outcomes[k] = Some(execute(method)?);
        }
    }
    let central_level = outcomes.iter().flatten().map(|o| o.final_overload).min();
    for (k, method) in config.methods.iter().enumerate() {
        if outcomes[k].is_none() {
            outcomes[k] = Some(execute(method)?);
        }
    }

    let mut out = TrialOutput {
        metrics: Vec::new(),
        timings: Vec::new(),
        traces: Vec::new(),
        occupancy: vec![("initial".into(), x0.clone())],
        scenario: scenario.clone(),
    };
    for (method, outcome) in config.methods.iter().zip(outcomes) {
        let o = outcome.expect("every method ran");
        let recount: u64 = NaiveLoads::count(&scenario, o.profile.indices()).overloads().iter().sum();
        let (mut evals_to, mut secs_to) = (None, None);
        if let (Some(level), Some(trace)) = (central_level, &o.trace) {
            if initial <= level {
                evals_to = Some(0);
                secs_to = Some(0.0);
            } else {
                let (mut evals, mut secs) = (0u64, 0.0);
                for step in &trace.steps {
                    evals += step.evaluations;
                    secs += step.elapsed_seconds;
                    if step.total_overload <= level {
                        evals_to = Some(evals);
                        secs_to = Some(secs);
                        break;
                    }
                }
            }
        }
        out.metrics.push(MetricsRow {
            trial,
            method: method.name().into(),
            kappa: method.kappa(),
            scenario_seed,
            n,
            m,
            capacity,
            initial_overload: initial,
            final_overload: o.final_overload,
            reduction_pct: (initial > 0).then(|| 100.0 * (initial - o.final_overload) as f64 / initial as f64),
            rounds: o.rounds,
            accepted_updates: o.accepted,
            evaluations: o.evaluations,
            evaluations_to_centralized: evals_to,
            terminal: o.terminal,
            recount_ok: recount == o.final_overload,
        });
        out.timings.push(TimingRow {
            trial,
            method: method.name().into(),
            kappa: method.kappa(),
            n,
            m,
            capacity,
            total_seconds: o.seconds,
            per_agent_seconds: o.seconds / m as f64,
            seconds_to_centralized: secs_to,
        });
        out.occupancy.push((method.tag(), o.profile));
        if let Some(trace) = o.trace {
            out.traces.push((method.tag(), trace));
        }
    }
    Ok(out)
}

fn output_err(path: &Path, e: impl ToString) -> ExperimentError {
    ExperimentError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| output_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| output_err(path, e))?;
    }
    w.flush().map_err(|e| output_err(path, e))
}

/// Writes `(method, sector, bin_start_minute, count)` for each profile.
fn write_occupancy(path: &Path, scenario: &Scenario, profiles: &[(String, ActionProfile)]) -> Result<(), ExperimentError> {
    let file = File::create(path).map_err(|e| output_err(path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["method", "sector", "bin_start_minute", "count"])
        .map_err(|e| output_err(path, e))?;
    for (label, profile) in profiles {
        let loads = compute_loads(scenario, profile)?;
        for s in scenario.sector_ids() {
            for (t, c) in loads.occupancy(s).iter().enumerate() {
                let start = t as u32 * scenario.bin_width();
                w.write_record([label.clone(), s.0.to_string(), start.to_string(), c.to_string()])
                    .map_err(|e| output_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| output_err(path, e))
}

fn write_outputs(config: &ExperimentConfig, dir: &Path, trials: &[TrialOutput]) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir).map_err(|e| output_err(dir, e))?;
    let metrics: Vec<&MetricsRow> = trials.iter().flat_map(|t| &t.metrics).collect();
    let timings: Vec<&TimingRow> = trials.iter().flat_map(|t| &t.timings).collect();
    write_rows(&dir.join("metrics.csv"), &metrics)?;
    write_rows(&dir.join("timings.csv"), &timings)?;
    let cfg_path = dir.join("config.json");
    let text = serde_json::to_string_pretty(config).map_err(|e| output_err(&cfg_path, e))?;
    fs::write(&cfg_path, text + "\n").map_err(|e| output_err(&cfg_path, e))?;
    for (k, t) in trials.iter().enumerate() {
        if config.write_traces {
            let traces = dir.join("traces");
            fs::create_dir_all(&traces).map_err(|e| output_err(&traces, e))?;
            for (tag, trace) in &t.traces {
                let path = traces.join(format!("trial{k}_{tag}.json"));
                let file = File::create(&path).map_err(|e| output_err(&path, e))?;
                let mut w = BufWriter::new(file);
                serde_json::to_writer(&mut w, trace).map_err(|e| output_err(&path, e))?;
                w.flush().map_err(|e| output_err(&path, e))?;
            }
        }
        if config.write_occupancy {
            let occ = dir.join("occupancy");
            fs::create_dir_all(&occ).map_err(|e| output_err(&occ, e))?;
            write_occupancy(&occ.join(format!("trial{k}.csv")), &t.scenario, &t.occupancy)?;
        }
    }
    Ok(())
}

/// Runs every trial (concurrently, up to the thread budget) and writes the
/// outputs when `output_dir` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    config.validate()?;
    if let Some(dir) = &config.output_dir {
        fs::create_dir_all(dir).map_err(|e| output_err(dir, e))?;
    }
    let work = || -> Result<Vec<TrialOutput>, ExperimentError> {
        (0..config.trials).into_par_iter().map(|k| run_trial(config, k)).collect()
    };
    let trials = match config.thread_budget() {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    if let Some(dir) = &config.output_dir {
        write_outputs(config, dir, &trials)?;
    }
    Ok(ExperimentOutput {
        metrics: trials.iter().flat_map(|t| t.metrics.clone()).collect(),
        timings: trials.iter().flat_map(|t| t.timings.clone()).collect(),
    })
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        (values[k / 2 - 1] + values[k / 2]) / 2.0
    }
}

/// Divides every time by the median `total_seconds` of the `reference`
/// method within its `(n, m, D)` group.
pub fn normalize_times(rows: &[TimingRow], reference: &str) -> Result<Vec<NormalizedRow>, ExperimentError> {
    let mut refs: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.method == reference) {
        refs.entry(r.group()).or_default().push(r.total_seconds);
    }
    let medians: BTreeMap<String, f64> = refs.into_iter().map(|(g, mut v)| (g, median(&mut v))).collect();
    rows.iter()
        .map(|r| {
            let group = r.group();
            let &scale = medians.get(&group).ok_or_else(|| ExperimentError::MissingReference {
                method: reference.to_string(),
                group: group.clone(),
            })?;
            Ok(NormalizedRow {
                trial: r.trial,
                method: r.method.clone(),
                kappa: r.kappa,
                group,
                total: r.total_seconds / scale,
                per_agent: r.per_agent_seconds / scale,
                to_centralized: r.seconds_to_centralized.map(|s| s / scale),
            })
        })
        .collect()
}

/// Reads a `timings.csv` back.
pub fn read_timings(path: &Path) -> Result<Vec<TimingRow>, ExperimentError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| output_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| output_err(path, e))).collect()
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>, ExperimentError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| output_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| output_err(path, e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timing(trial: usize, method: &str, n: usize, secs: f64) -> TimingRow {
        TimingRow {
            trial,
            method: method.into(),
            kappa: None,
            n,
            m: 4,
            capacity: 2,
            total_seconds: secs,
            per_agent_seconds: secs / 4.0,
            seconds_to_centralized: None,
        }
    }

    #[test]
    fn normalization_by_group_median() {
        let rows = vec![
            timing(0, "centralized", 10, 2.0),
            timing(1, "centralized", 10, 4.0),
            timing(2, "centralized", 10, 9.0),
            timing(0, "dynamics", 10, 8.0),
            timing(0, "centralized", 20, 1.0),
            timing(0, "fcfs", 20, 0.5),
        ];
        let out = normalize_times(&rows, "centralized").unwrap();
        let totals: Vec<f64> = out.iter().map(|r| r.total).collect();
        assert_eq!(totals, vec![0.5, 1.0, 2.25, 2.0, 1.0, 0.5]);
        assert_eq!(out[3].per_agent, 0.5);

        let err = normalize_times(&[timing(0, "fcfs", 30, 1.0)], "centralized").unwrap_err();
        assert!(err.to_string().contains("n=30"), "{err}");
    }

    #[test]
    fn reference_rows_alone_have_unit_median() {
        let rows: Vec<TimingRow> = [3.0, 1.0, 7.0, 5.0]
            .iter()
            .enumerate()
            .map(|(k, &s)| timing(k, "centralized", 10, s))
            .collect();
        let mut v: Vec<f64> = normalize_times(&rows, "centralized").unwrap().iter().map(|r| r.total).collect();
        assert!((median(&mut v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feasible_start_marks_reduction_undefined() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = scenario::tiny_one().with_uniform_capacity(2).unwrap();
        scenario::save(&s, &path).unwrap();
        let mut cfg = ExperimentConfig::new(ScenarioSource::File { path }, vec![Method::Fcfs], 1, 0);
        cfg.output_dir = Some(dir.path().join("out"));
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.metrics.len(), 1);
        let row = &out.metrics[0];
        assert_eq!((row.initial_overload, row.final_overload, row.reduction_pct), (0, 0, None));
        let text = fs::read_to_string(dir.path().join("out/metrics.csv")).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(",NA,"), "{text}");
        assert_eq!(read_metrics(&dir.path().join("out/metrics.csv")).unwrap(), out.metrics);
        let occ = fs::read_to_string(dir.path().join("out/occupancy/trial0.csv")).unwrap();
        assert!(occ.starts_with("method,sector,bin_start_minute,count\ninitial,0,0,2\n"), "{occ}");
    }

    #[test]
    fn rows_per_method_and_recount() {
        let methods = vec![
            Method::Dynamics { kappa: Kappa::ZERO },
            Method::Dynamics { kappa: Kappa::ONE },
            Method::Centralized,
            Method::Fcfs,
        ];
        let cfg = ExperimentConfig::new(
            ScenarioSource::Preset {
                name: "tiny-binned".into(),
                flights: None,
                capacity: None,
            },
            methods,
            3,
            11,
        );
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.metrics.len(), 12);
        assert!(out.metrics.iter().all(|r| r.recount_ok));
        assert!(out
            .timings
            .iter()
            .all(|t| (t.per_agent_seconds - t.total_seconds / t.m as f64).abs() < 1e-15));
        let again = run_experiment(&ExperimentConfig {
            threads: Some(1),
            ..cfg.clone()
        })
        .unwrap();
        assert_eq!(again.metrics, out.metrics);
    }

    #[test]
    fn config_errors() {
        let mut cfg = ExperimentConfig::new(
            ScenarioSource::Preset {
                name: "nowhere".into(),
                flights: None,
                capacity: None,
            },
            vec![Method::Fcfs],
            1,
            0,
        );
        assert!(matches!(run_experiment(&cfg), Err(ExperimentError::Scenario(_))));
        cfg.trials = 0;
        assert!(matches!(run_experiment(&cfg), Err(ExperimentError::Config(_))));
    }
}
