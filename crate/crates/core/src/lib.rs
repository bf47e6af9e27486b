//! Decentralized mitigation of airspace sector overload.
//!
//! Sectors are agents that choose ground delays for the flights they own.
//! Each sector minimises its own overload plus a `κ`-weighted share of the
//! others' overload. Sequential best responses, computed by a genetic
//! algorithm under a rule that forbids overloading a currently feasible
//! sector, drive the joint delay profile toward a restricted Nash
//! equilibrium. The crate also ships a centralized GA and an FCFS baseline,
//! a synthetic scenario generator and a brute-force oracle.

pub mod airspace;
pub mod baselines;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod ga;
pub mod game;
pub mod oracle;
pub mod scaling;
pub mod scenario;
pub mod seed;

pub use airspace::{
    ScenarioDoc,
    compute_loads, contribution, contribution_matrix, new_overload_set, total_overload, ActionProfile, Flight,
    FlightId, Footprint, LoadTable, Minutes, Scenario, Sector, SectorId, TrajectorySegment,
};
pub use baselines::{centralized, fcfs, BaselineMethod, BaselineResult, StuckCell};
pub use dynamics::{best_response, exhaustive_best_response, run, AgentOrder, RunConfig, Solver, TerminationReason, Trace, TraceStep};
pub use error::{ExperimentError, ModelError, ScenarioError};
pub use ga::{GaConfig, GaError, GaOutcome};
pub use game::{cost, deviation_delta, potential, self_prioritization_bound, DeviationDelta, Kappa, Scaled};
pub use experiment::{normalize_times, run_experiment, ExperimentConfig, Method, MetricsRow, ScenarioSource, TimingRow};
pub use oracle::{check_nash, enumerate_global_min, VerifierReport};
pub use scenario::{generate, preset, GenParams};
