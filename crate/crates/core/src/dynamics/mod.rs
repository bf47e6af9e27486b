//! Sequential best-response dynamics over sectors.
//!
//! Each round visits every sector once. The visited sector proposes a best
//! response (GA or exhaustive) under the no-new-overload rule. The proposal
//! is accepted only if it strictly lowers the sector's cost. The run stops
//! as soon as total overload reaches zero, after a round with no accepted
//! update, or at the round safeguard.

mod best_response;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use best_response::{
    best_response, exhaustive_best_response, exhaustive_best_response_capped, BestResponse, BestResponseProblem,
    DEFAULT_EXHAUSTIVE_CAP,
};

use crate::airspace::{ActionProfile, Footprint, LoadTable, Scenario, SectorId};
use crate::error::ModelError;
use crate::ga::GaConfig;
use crate::game::{cost_from_loads, potential_from_loads, Kappa};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AgentOrder {
    ById,
    SeededShufflePerRound { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Solver {
    Ga,
    Exhaustive { cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub kappa: Kappa,
    pub ga: GaConfig,
    pub agent_order: AgentOrder,
    pub max_rounds: usize,
    pub solver: Solver,
}

impl RunConfig {
    pub fn new(kappa: Kappa) -> Self {
        Self {
            kappa,
            ga: GaConfig::default(),
            agent_order: AgentOrder::ById,
            max_rounds: 1000,
            solver: Solver::Ga,
        }
    }

    pub fn exhaustive(kappa: Kappa) -> Self {
        Self {
            solver: Solver::Exhaustive {
                cap: DEFAULT_EXHAUSTIVE_CAP,
            },
            ..Self::new(kappa)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    FeasibleFound,
    NoImprovementRound,
    StepLimit,
}

/// One agent visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub round: usize,
    /// Global visit counter, incremented after every visit.
    pub t: usize,
    pub agent: SectorId,
    pub accepted: bool,
    pub cost_before: f64,
    pub cost_after: f64,
    pub potential_before: f64,
    pub potential_after: f64,
    pub overloaded_before: BTreeSet<SectorId>,
    pub overloaded_after: BTreeSet<SectorId>,
    /// The set of overloaded `(sector, bin)` cells did not change.
    pub resources_fixed: bool,
    pub total_overload: u64,
    pub evaluations: u64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub kappa: Kappa,
    pub solver: Solver,
    pub initial_overload: u64,
    pub steps: Vec<TraceStep>,
    pub terminal_profile: ActionProfile,
    pub termination_reason: TerminationReason,
    pub rounds: usize,
    pub evaluations: u64,
    pub wall_seconds: f64,
}

impl Trace {
    pub fn final_overload(&self) -> u64 {
        self.steps.last().map_or(self.initial_overload, |s| s.total_overload)
    }

    pub fn accepted_steps(&self) -> impl Iterator<Item = &TraceStep> {
        self.steps.iter().filter(|s| s.accepted)
    }

    /// What the terminal profile is known to be. Only exhaustive runs earn
    /// the equilibrium label.
    pub fn terminal_label(&self) -> &'static str {
        match (self.termination_reason, self.solver) {
            (TerminationReason::FeasibleFound, _) => "feasible",
            (TerminationReason::StepLimit, _) => "step_limit",
            (TerminationReason::NoImprovementRound, Solver::Exhaustive { .. }) => "restricted_nash",
            (TerminationReason::NoImprovementRound, Solver::Ga) => "no_ga_improvement",
        }
    }

    /// Writes one CSV row per step. Sets are `;`-separated sector ids.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "round",
            "t",
            "agent",
            "accepted",
            "cost_before",
            "cost_after",
            "potential_before",
            "potential_after",
            "overloaded_before",
            "overloaded_after",
            "resources_fixed",
            "total_overload",
            "evaluations",
            "elapsed_seconds",
        ])?;
        let set = |s: &BTreeSet<SectorId>| s.iter().map(|x| x.0.to_string()).collect::<Vec<_>>().join(";");
        for s in &self.steps {
            w.write_record([
                s.round.to_string(),
                s.t.to_string(),
                s.agent.0.to_string(),
                s.accepted.to_string(),
                s.cost_before.to_string(),
                s.cost_after.to_string(),
                s.potential_before.to_string(),
                s.potential_after.to_string(),
                set(&s.overloaded_before),
                set(&s.overloaded_after),
                s.resources_fixed.to_string(),
                s.total_overload.to_string(),
                s.evaluations.to_string(),
                s.elapsed_seconds.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn visit_order(m: usize, order: AgentOrder, round: usize) -> Vec<SectorId> {
    let mut agents: Vec<SectorId> = (0..m as u32).map(SectorId).collect();
    if let AgentOrder::SeededShufflePerRound { seed } = order {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[round as u64]));
        agents.shuffle(&mut rng);
    }
    agents
}

/// Runs best-response dynamics from `x0`.
pub fn run(scenario: &Scenario, x0: &ActionProfile, config: &RunConfig) -> Result<Trace, ModelError> {
    x0.validate(scenario)?;
    if config.max_rounds == 0 {
        return Err(ModelError::Invalid {
            pointer: "/max_rounds".into(),
            reason: "at least one round is required".into(),
        });
    }
    config.ga.validate().map_err(|e| ModelError::Invalid {
        pointer: "/ga".into(),
        reason: e.to_string(),
    })?;
    let clock = Instant::now();
    let kappa = config.kappa;
    let footprint = Footprint::new(scenario);
    let mut loads = LoadTable::from_footprint(scenario, &footprint, x0);
    let mut x = x0.clone();
    let initial_overload = loads.total_overload();
    let mut steps = Vec::new();
    let mut evaluations = 0u64;
    let mut rounds = 0;
    let mut t = 0;
    let mut reason = None;

    if loads.is_feasible() {
        reason = Some(TerminationReason::FeasibleFound);
    }

    'rounds: while reason.is_none() && rounds < config.max_rounds {
        rounds += 1;
        let mut improved = false;
        for agent in visit_order(scenario.num_sectors(), config.agent_order, rounds) {
            let started = Instant::now();
            let cost_before = cost_from_loads(&loads, agent, kappa);
            let potential_before = potential_from_loads(&loads, kappa);
            let overloaded_before = loads.overloaded_sectors();
            let resources_before = loads.overloaded_resources();

            let problem = BestResponseProblem::new(scenario, &footprint, &x, &loads, agent, kappa);
            let proposal = match config.solver {
                Solver::Ga => {
                    let ga = config.ga.with_seed(seed::derive(config.ga.seed, &[rounds as u64, agent.0 as u64]));
                    problem.solve_ga(&ga)
                }
                Solver::Exhaustive { cap } => problem.solve_exhaustive(cap)?,
            };
            evaluations += proposal.evaluations;

            let accepted = proposal.cost < cost_before;
            if accepted {
                for (&f, &a) in scenario.flights_of(agent).iter().zip(&proposal.actions) {
                    loads.move_flight(scenario, &footprint, f, x.index(f), a);
                    x.set(f, a);
                }
                improved = true;
            }
            let cost_after = if accepted { proposal.cost } else { cost_before };
            steps.push(TraceStep {
                round: rounds,
                t,
                agent,
                accepted,
                cost_before: kappa.unscale(cost_before),
                cost_after: kappa.unscale(cost_after),
                potential_before: kappa.unscale(potential_before),
                potential_after: kappa.unscale(potential_from_loads(&loads, kappa)),
                overloaded_after: loads.overloaded_sectors(),
                overloaded_before,
                resources_fixed: loads.overloaded_resources() == resources_before,
                total_overload: loads.total_overload(),
                evaluations: proposal.evaluations,
                elapsed_seconds: started.elapsed().as_secs_f64(),
            });
            t += 1;
            if loads.is_feasible() {
                reason = Some(TerminationReason::FeasibleFound);
                break 'rounds;
            }
        }
        if !improved {
            reason = Some(TerminationReason::NoImprovementRound);
        }
    }

    Ok(Trace {
        kappa,
        solver: config.solver,
        initial_overload,
        steps,
        terminal_profile: x,
        termination_reason: reason.unwrap_or(TerminationReason::StepLimit),
        rounds,
        evaluations,
        wall_seconds: clock.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airspace::{compute_loads, new_overload_set, Flight, FlightId, Sector, TrajectorySegment};
    use crate::game::cost;
    use crate::scenario::presets::tiny_one;

    fn seg(sector: u32, entry: u32, exit: u32) -> TrajectorySegment {
        TrajectorySegment {
            sector: SectorId(sector),
            entry_offset: entry,
            exit_offset: exit,
        }
    }

    #[test]
    fn agent_without_flights_keeps_profile() {
        let s = tiny_one();
        let x = ActionProfile::zeros(&s);
        let br = best_response(&s, &x, SectorId(1), Kappa::ONE, &GaConfig::default()).unwrap();
        assert_eq!(br, x);
        assert_eq!(exhaustive_best_response(&s, &x, SectorId(1), Kappa::ONE).unwrap(), x);
    }

    #[test]
    fn tiny_one_best_response_reaches_zero_cost() {
        let s = tiny_one();
        let x = ActionProfile::zeros(&s);
        // Exhaustive oracle over {0,5}^2.
        let mut best = f64::INFINITY;
        let mut argmins = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let p = ActionProfile::from_indices(&s, vec![a, b]).unwrap();
                if !new_overload_set(&s, &x, &p).unwrap().is_empty() {
                    continue;
                }
                let j = cost(&s, &p, SectorId(0), Kappa::ZERO).unwrap();
                if j < best {
                    best = j;
                    argmins.clear();
                }
                if j == best {
                    argmins.push(vec![a, b]);
                }
            }
        }
        assert_eq!(best, 0.0);
        assert_eq!(argmins, vec![vec![0, 1], vec![1, 0]]);

        let ga = best_response(&s, &x, SectorId(0), Kappa::ZERO, &GaConfig::default()).unwrap();
        assert_eq!(cost(&s, &ga, SectorId(0), Kappa::ZERO).unwrap(), 0.0);
        let exact = exhaustive_best_response(&s, &x, SectorId(0), Kappa::ZERO).unwrap();
        assert_eq!(exact.indices(), &[0, 1]);
    }

    #[test]
    fn feasible_start_is_a_fixed_point() {
        let s = tiny_one();
        let x = ActionProfile::from_indices(&s, vec![1, 0]).unwrap();
        let br = best_response(&s, &x, SectorId(0), Kappa::ONE, &GaConfig::default()).unwrap();
        assert_eq!(br, x);
        // The exact solver breaks the zero-cost tie lexicographically.
        let exact = exhaustive_best_response(&s, &x, SectorId(0), Kappa::ONE).unwrap();
        assert_eq!(exact.indices(), &[0, 1]);
        assert_eq!(cost(&s, &exact, SectorId(0), Kappa::ONE).unwrap(), 0.0);
    }

    #[test]
    fn single_flight_tie_goes_to_zero_delay() {
        let s = Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 0,
                segments: vec![seg(0, 0, 5)],
            }],
            10,
            5,
            vec![0, 5],
        )
        .unwrap();
        let x = ActionProfile::from_indices(&s, vec![1]).unwrap();
        assert_eq!(exhaustive_best_response(&s, &x, SectorId(0), Kappa::ONE).unwrap().indices(), &[0]);
    }

    /// Sector 0's two flights both cross sector 1, which sits at capacity in
    /// bin 2. Moving one out of bin 0 of sector 0 is the unconstrained
    /// optimum for κ = 0 but would overload sector 1.
    fn restriction_instance() -> Scenario {
        let flights = vec![
            Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 0,
                segments: vec![seg(0, 0, 5), seg(1, 5, 10)],
            },
            Flight {
                id: FlightId(1),
                owner: SectorId(0),
                base_departure: 0,
                segments: vec![seg(0, 0, 5), seg(1, 5, 10)],
            },
            Flight {
                id: FlightId(2),
                owner: SectorId(1),
                base_departure: 10,
                segments: vec![seg(1, 0, 5)],
            },
            Flight {
                id: FlightId(3),
                owner: SectorId(1),
                base_departure: 10,
                segments: vec![seg(1, 0, 5)],
            },
        ];
        Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }, Sector { id: SectorId(1), capacity: 2 }],
            flights,
            25,
            5,
            vec![0, 5],
        )
        .unwrap()
    }

    #[test]
    fn restriction_blocks_unconstrained_argmin() {
        let s = restriction_instance();
        let x = ActionProfile::zeros(&s);
        let loads = compute_loads(&s, &x).unwrap();
        assert_eq!(loads.per_sector_overload(), &[1, 0]);
        // Unconstrained argmin over sector 0's flights at κ = 0.
        let mut unconstrained = None;
        for a in 0..2 {
            for b in 0..2 {
                let p = ActionProfile::from_indices(&s, vec![a, b, 0, 0]).unwrap();
                let j = cost(&s, &p, SectorId(0), Kappa::ZERO).unwrap();
                if unconstrained.as_ref().is_none_or(|(v, _)| j < *v) {
                    unconstrained = Some((j, p));
                }
            }
        }
        let (_, free) = unconstrained.unwrap();
        assert!(!new_overload_set(&s, &x, &free).unwrap().is_empty());

        let exact = exhaustive_best_response(&s, &x, SectorId(0), Kappa::ZERO).unwrap();
        assert_ne!(exact, free);
        assert!(new_overload_set(&s, &x, &exact).unwrap().is_empty());
    }

    #[test]
    fn exhaustive_refuses_oversized_space() {
        let s = tiny_one();
        let x = ActionProfile::zeros(&s);
        assert!(matches!(
            exhaustive_best_response_capped(&s, &x, SectorId(0), Kappa::ONE, 3),
            Err(ModelError::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn feasible_start_terminates_immediately() {
        let s = tiny_one();
        let x = ActionProfile::from_indices(&s, vec![0, 1]).unwrap();
        let trace = run(&s, &x, &RunConfig::new(Kappa::ONE)).unwrap();
        assert_eq!(trace.termination_reason, TerminationReason::FeasibleFound);
        assert_eq!(trace.accepted_steps().count(), 0);
        assert_eq!(trace.final_overload(), 0);
    }

    #[test]
    fn tiny_one_full_cooperation_resolves_overload() {
        let s = tiny_one();
        for config in [RunConfig::new(Kappa::ONE), RunConfig::exhaustive(Kappa::ONE)] {
            let trace = run(&s, &ActionProfile::zeros(&s), &config).unwrap();
            assert_eq!(trace.termination_reason, TerminationReason::FeasibleFound);
            assert_eq!(trace.final_overload(), 0);
            let loads = compute_loads(&s, &trace.terminal_profile).unwrap();
            assert_eq!(loads.total_overload(), trace.final_overload());
        }
    }

    #[test]
    fn trace_invariants_hold_on_restriction_instance() {
        let s = restriction_instance();
        for kappa in ["0", "1e-6", "0.5", "1"] {
            let config = RunConfig::exhaustive(kappa.parse().unwrap());
            let trace = run(&s, &ActionProfile::zeros(&s), &config).unwrap();
            assert_ne!(trace.termination_reason, TerminationReason::StepLimit);
            for step in trace.accepted_steps() {
                assert!(step.cost_after < step.cost_before);
                assert!(step.overloaded_after.is_subset(&step.overloaded_before));
            }
        }
    }

    #[test]
    fn shuffled_order_is_reproducible() {
        let s = restriction_instance();
        let mut config = RunConfig::new(Kappa::ONE);
        config.agent_order = AgentOrder::SeededShufflePerRound { seed: 9 };
        let a = run(&s, &ActionProfile::zeros(&s), &config).unwrap();
        let b = run(&s, &ActionProfile::zeros(&s), &config).unwrap();
        assert_eq!(a.terminal_profile, b.terminal_profile);
        assert_eq!(
            a.steps.iter().map(|s| s.agent).collect::<Vec<_>>(),
            b.steps.iter().map(|s| s.agent).collect::<Vec<_>>()
        );
    }

    #[test]
    fn trace_csv_has_one_row_per_step() {
        let s = tiny_one();
        let trace = run(&s, &ActionProfile::zeros(&s), &RunConfig::exhaustive(Kappa::ONE)).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), trace.steps.len() + 1);
        let json = serde_json::to_string(&trace).unwrap();
        let back: Trace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.terminal_profile, trace.terminal_profile);
    }
}
