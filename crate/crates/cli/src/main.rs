use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use decongest_core::experiment::{normalize_times, read_timings, run_experiment, ExperimentConfig, Method, ScenarioSource};
use decongest_core::oracle::{self, Premise, VerifierReport};
use decongest_core::scaling::{self, SweepConfig};
use decongest_core::scenario::{self, Airspace, PresetOverrides, TinyMode};
use decongest_core::{GaConfig, Kappa, ScenarioDoc};

#[derive(Parser)]
#[command(name = "decongest", version, about = "Decentralized sector overload mitigation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a scenario file from a preset or a CSV flight table.
    Generate(GenerateArgs),
    /// Run an experiment batch and write metrics, timings, traces and
    /// occupancy series.
    Run(RunArgs),
    /// Run the brute-force oracle checks on tiny instances.
    Verify(VerifyArgs),
    /// Scalability sweep over flight counts.
    Bench(BenchArgs),
    /// Convert outputs: normalized timings or a scenario's flight table.
    Export(ExportArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, conflicts_with = "from_csv")]
    preset: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    flights: Option<usize>,
    #[arg(long)]
    capacity: Option<u32>,
    /// CSV flight table; needs `--airspace`.
    #[arg(long, requires = "airspace")]
    from_csv: Option<PathBuf>,
    /// JSON with `sectors`, `horizon`, `bin_width` and `action_set`.
    #[arg(long)]
    airspace: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct GaArgs {
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    crossover: Option<f64>,
    #[arg(long)]
    mutation: Option<f64>,
}

impl GaArgs {
    fn apply(&self, mut ga: GaConfig) -> GaConfig {
        if let Some(v) = self.population {
            ga.population_size = v;
        }
        if let Some(v) = self.generations {
            ga.max_generations = v;
        }
        if let Some(v) = self.crossover {
            ga.crossover_rate = v;
        }
        if let Some(v) = self.mutation {
            ga.mutation_rate = v;
        }
        ga
    }
}

#[derive(Args)]
struct RunArgs {
    /// Full experiment config as JSON; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "scenario")]
    preset: Option<String>,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    flights: Option<usize>,
    #[arg(long)]
    capacity: Option<u32>,
    /// Comma-separated κ values for the dynamics, e.g. `0,1e-6,0.5,1`.
    #[arg(long, value_delimiter = ',')]
    kappa: Vec<Kappa>,
    #[arg(long)]
    centralized: bool,
    #[arg(long)]
    fcfs: bool,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "DECONGEST_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    max_rounds: Option<usize>,
    #[arg(long)]
    shuffle: bool,
    #[arg(long)]
    no_traces: bool,
    #[command(flatten)]
    ga: GaArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Tiny instances per battery.
    #[arg(long, default_value_t = 100)]
    instances: u64,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "europe-like")]
    preset: String,
    #[arg(long, value_delimiter = ',', default_value = "10,100,1000,5000")]
    sizes: Vec<usize>,
    #[arg(long, default_value = "1")]
    kappa: Kappa,
    /// Monte Carlo trials per size; times are medians.
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "DECONGEST_THREADS")]
    threads: Option<usize>,
    #[command(flatten)]
    ga: GaArgs,
}

#[derive(Args)]
struct ExportArgs {
    /// Run directory containing `timings.csv`.
    #[arg(long, conflicts_with = "scenario")]
    run: Option<PathBuf>,
    #[arg(long, default_value = "centralized")]
    reference: String,
    /// Scenario file to flatten into the CSV flight table.
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn generate(a: GenerateArgs) -> Result<()> {
    let s = match (&a.preset, &a.from_csv) {
        (Some(name), _) => scenario::preset(
            name,
            a.seed,
            PresetOverrides {
                flights: a.flights,
                capacity: a.capacity,
            },
        )?,
        (None, Some(csv)) => {
            let path = a.airspace.as_ref().expect("clap enforces --airspace");
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc: ScenarioDoc = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let file = fs::File::open(csv).with_context(|| format!("opening {}", csv.display()))?;
            scenario::read_flights_csv(
                file,
                Airspace {
                    sectors: doc.sectors,
                    horizon: doc.horizon,
                    bin_width: doc.bin_width,
                    action_set: doc.action_set,
                },
            )?
        }
        (None, None) => bail!("pass --preset or --from-csv"),
    };
    scenario::save(&s, &a.out)?;
    let zero = decongest_core::compute_loads(&s, &decongest_core::ActionProfile::zeros(&s))?;
    println!(
        "wrote {}: {} sectors, {} flights, {} bins, peak occupancy {}, zero-delay overload {}",
        a.out.display(),
        s.num_sectors(),
        s.num_flights(),
        s.num_bins(),
        scenario::peak_occupancy(&s),
        zero.total_overload()
    );
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::new(
            ScenarioSource::Preset {
                name: "tiny-binned".into(),
                flights: None,
                capacity: None,
            },
            Vec::new(),
            1,
            0,
        ),
    };
    if let Some(name) = a.preset {
        cfg.source = ScenarioSource::Preset {
            name,
            flights: a.flights,
            capacity: a.capacity,
        };
    } else if let Some(path) = a.scenario {
        cfg.source = ScenarioSource::File { path };
    }
    let mut methods: Vec<Method> = a.kappa.iter().map(|&kappa| Method::Dynamics { kappa }).collect();
    if a.centralized {
        methods.push(Method::Centralized);
    }
    if a.fcfs {
        methods.push(Method::Fcfs);
    }
    if !methods.is_empty() {
        cfg.methods = methods;
    }
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.base_seed = a.seed.unwrap_or(cfg.base_seed);
    cfg.output_dir = a.out.or(cfg.output_dir);
    cfg.threads = a.threads.or(cfg.threads);
    cfg.max_rounds = a.max_rounds.unwrap_or(cfg.max_rounds);
    cfg.shuffle_agents |= a.shuffle;
    cfg.write_traces &= !a.no_traces;
    cfg.ga = a.ga.apply(cfg.ga);

    let clock = Instant::now();
    let out = run_experiment(&cfg)?;
    println!(
        "{:>5} {:<12} {:>10} {:>8} {:>8} {:>9} {:>7} {:<16}",
        "trial", "method", "kappa", "initial", "final", "reduct%", "rounds", "terminal"
    );
    for r in &out.metrics {
        println!(
            "{:>5} {:<12} {:>10} {:>8} {:>8} {:>9} {:>7} {:<16}",
            r.trial,
            r.method,
            r.kappa.map(|k| k.to_string()).unwrap_or_default(),
            r.initial_overload,
            r.final_overload,
            r.reduction_pct.map_or("NA".into(), |v| format!("{v:.1}")),
            r.rounds,
            r.terminal
        );
    }
    if let Some(dir) = &cfg.output_dir {
        println!("outputs in {}", dir.display());
    }
    println!("done in {:.1}s", clock.elapsed().as_secs_f64());
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let window = oracle::battery(TinyMode::SingleWindow, 0..a.instances);
    let binned = oracle::battery(TinyMode::Binned, 0..a.instances);
    let mut reports: Vec<VerifierReport> = Vec::new();
    for (num, den) in [(1, 4), (1, 2), (3, 4)] {
        let k = Kappa::ratio(num, den)?;
        reports.push(oracle::check_exact_potential(&window, k, Premise::FixedOverloadSet));
        reports.push(oracle::check_exact_potential(&binned, k, Premise::FixedResources));
    }
    reports.push(oracle::check_exact_potential(&window, Kappa::ONE, Premise::Unconditional));
    reports.push(oracle::check_exact_potential(&binned, Kappa::ONE, Premise::Unconditional));
    reports.push(oracle::check_feasible_minimizer(&window));
    reports.push(oracle::check_feasible_minimizer(&binned));
    reports.push(oracle::check_self_prioritization(&window));
    reports.push(oracle::check_load_agreement(&binned, Kappa::ratio(1, 2)?));
    let record = oracle::adjudicate_kappa_zero(&window);

    for r in &reports {
        println!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.summary());
    }
    println!(
        "kappa=0 claim: {:?} after {} deviations ({} violating)",
        record.verdict, record.deviations, record.violating_deviations
    );
    if let Some(path) = &a.json {
        let body = serde_json::json!({ "reports": reports, "kappa_zero": record });
        fs::write(path, serde_json::to_string_pretty(&body)? + "\n").with_context(|| format!("writing {}", path.display()))?;
        println!("report written to {}", path.display());
    }
    if reports.iter().any(|r| !r.passed) {
        bail!("oracle checks failed");
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let mut cfg = SweepConfig::new(&a.preset, a.sizes, a.kappa, a.trials);
    cfg.base_seed = a.seed;
    cfg.threads = a.threads;
    cfg.ga = a.ga.apply(cfg.ga);
    cfg.output_dir = a.out;
    let points = scaling::sweep(&cfg)?;
    println!(
        "{:>7} {:>8} {:>9} {:>14} {:>14}",
        "n", "resolved", "initial", "median_total_s", "median_agent_s"
    );
    for p in &points {
        println!(
            "{:>7} {:>8} {:>9} {:>14.4} {:>14.6}",
            p.n,
            format!("{}/{}", p.resolved_trials, p.trials),
            p.median_initial_overload,
            p.median_total_seconds,
            p.median_per_agent_seconds
        );
    }
    if let Some(slope) = scaling::last_decade_slope(&points) {
        println!("log-log slope over the last decade: {slope:.3}");
    }
    let all: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.median_total_seconds)).collect();
    if all.len() >= 2 {
        println!("log-log slope over all sizes: {:.3}", scaling::loglog_slope(&all));
    }
    Ok(())
}

fn export(a: ExportArgs) -> Result<()> {
    if let Some(dir) = &a.run {
        let rows = read_timings(&dir.join("timings.csv"))?;
        let normalized = normalize_times(&rows, &a.reference)?;
        let mut w = csv_writer(&a.out)?;
        for r in &normalized {
            w.serialize(r)?;
        }
        w.flush()?;
        println!("wrote {} normalized rows to {}", normalized.len(), a.out.display());
    } else if let Some(path) = &a.scenario {
        let s = scenario::load(path)?;
        let file = fs::File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
        scenario::write_flights_csv(&s, file)?;
        println!("wrote {} flights to {}", s.num_flights(), a.out.display());
    } else {
        bail!("pass --run or --scenario");
    }
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
        Command::Export(a) => export(a),
    }
}
