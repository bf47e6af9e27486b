//! Runtime against problem size.
//!
//! Each size runs as its own experiment, so its metrics CSV is the same
//! deterministic artifact a normal `run` writes. Every best response gets
//! the full generation budget (no stall stop); otherwise the number of GA
//! generations, not the problem size, dominates the measurement.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::ExperimentError;
use crate::experiment::{median, run_experiment, ExperimentConfig, Method, ScenarioSource};
use crate::ga::GaConfig;
use crate::game::Kappa;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub preset: String,
    pub sizes: Vec<usize>,
    pub kappa: Kappa,
    pub trials: usize,
    pub base_seed: u64,
    pub ga: GaConfig,
    pub threads: Option<usize>,
    /// Each size writes to `output_dir/n{size}`.
    pub output_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(preset: &str, sizes: Vec<usize>, kappa: Kappa, trials: usize) -> Self {
        Self {
            preset: preset.to_string(),
            sizes,
            kappa,
            trials,
            base_seed: 0,
            ga: GaConfig::default(),
            threads: None,
            output_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub resolved_trials: usize,
    pub median_initial_overload: f64,
    pub median_total_seconds: f64,
    /// Median of `total / m`.
    pub median_per_agent_seconds: f64,
}

/// `ga` with the stall stop disabled.
pub fn fixed_budget(ga: &GaConfig) -> GaConfig {
    GaConfig {
        stall_generations: ga.max_generations,
        ..ga.clone()
    }
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepPoint>, ExperimentError> {
    config
        .sizes
        .iter()
        .map(|&n| {
            let mut cfg = ExperimentConfig::new(
                ScenarioSource::Preset {
                    name: config.preset.clone(),
                    flights: Some(n),
                    capacity: None,
                },
                vec![Method::Dynamics { kappa: config.kappa }],
                config.trials,
                config.base_seed,
            );
            cfg.ga = fixed_budget(&config.ga);
            cfg.threads = config.threads;
            cfg.write_occupancy = false;
            cfg.output_dir = config.output_dir.as_ref().map(|d| d.join(format!("n{n}")));
            let out = run_experiment(&cfg)?;
            let pick = |f: &dyn Fn(usize) -> f64| median(&mut (0..out.metrics.len()).map(f).collect::<Vec<_>>());
            Ok(SweepPoint {
                n,
                m: out.metrics.first().map_or(0, |r| r.m),
                trials: out.metrics.len(),
                resolved_trials: out.metrics.iter().filter(|r| r.final_overload == 0).count(),
                median_initial_overload: pick(&|k| out.metrics[k].initial_overload as f64),
                median_total_seconds: pick(&|k| out.timings[k].total_seconds),
                median_per_agent_seconds: pick(&|k| out.timings[k].per_agent_seconds),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.max(1e-12).ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope over the sizes within a factor of ten of the largest one.
pub fn last_decade_slope(points: &[SweepPoint]) -> Option<f64> {
    let top = points.iter().map(|p| p.n).max()?;
    let span: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.n * 10 >= top)
        .map(|p| (p.n as f64, p.median_total_seconds))
        .collect();
    (span.len() >= 2).then(|| loglog_slope(&span))
}
