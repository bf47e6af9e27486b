//! Brute-force oracle. Loads are recounted from scratch by a naive scanner
//! that shares no code with [`crate::airspace`], and every structural
//! property of the game is checked by full enumeration on tiny instances.
//!
//! | property | check |
//! |---|---|
//! | exact potential with the overloaded set fixed | [`check_exact_potential`] with [`Premise::FixedOverloadSet`] (one bin) or [`Premise::FixedResources`] |
//! | `κ = 1` potential without premise | [`check_exact_potential`] with [`Premise::Unconditional`] |
//! | `κ = 0` potential claim | [`adjudicate_kappa_zero`] |
//! | feasible profiles minimise `Φ` at `κ = 1` | [`check_feasible_minimizer`] |
//! | self-prioritization below `1/(n(m−1))` | [`check_self_prioritization`] |
//! | monotone overloaded set, termination, `Φ` descent | [`check_trace_invariants`] |
//! | terminal profiles are restricted equilibria | [`check_nash`] |

mod checks;
mod kappa_zero;
mod naive;
mod table;

pub use checks::{
    battery, best_unilateral_cost, check_exact_potential, check_feasible_minimizer, check_load_agreement, check_nash,
    check_self_prioritization, check_trace_invariants, creates_new_overload, enumerate_global_min, nash_violation,
    oracle_cost, GlobalMin, Instance, Objective, Premise, VerifierReport, Violation, ORACLE_CAP,
};
pub use kappa_zero::{adjudicate_kappa_zero, find_four_cycle, shrink, Counterexample, FourCycle, KappaZeroRecord, Verdict, CLAIM};
pub use naive::{cost_value, potential_value, NaiveLoads, Value};
