use std::cell::RefCell;

use crate::airspace::{excess, ActionProfile, Footprint, LoadTable, Scenario, SectorId};
use crate::error::ModelError;
use crate::ga::{self, GaConfig};
use crate::game::{cost_from_loads, Kappa, Scaled};

/// Default cap on `p^{n_i}` for exhaustive best responses.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1 << 20;

#[derive(Default)]
struct Scratch {
    added: Vec<u32>,
    touched: Vec<u32>,
}

thread_local! {
    static SCRATCH: RefCell<Scratch> = RefCell::new(Scratch::default());
}

/// Sector `agent`'s best-response subproblem against a fixed profile `x`:
/// minimise `J_agent` over the agent's flights, subject to no sector that
/// is feasible under `x` becoming overloaded.
pub struct BestResponseProblem<'a> {
    scenario: &'a Scenario,
    footprint: &'a Footprint,
    agent: SectorId,
    kappa: Kappa,
    bins: usize,
    capacity: Vec<u32>,
    background: Vec<u32>,
    background_overload: Vec<u64>,
    protected: Vec<bool>,
    incumbent: Vec<usize>,
    incumbent_cost: Scaled,
}

impl<'a> BestResponseProblem<'a> {
    pub fn new(
        scenario: &'a Scenario,
        footprint: &'a Footprint,
        x: &ActionProfile,
        loads: &LoadTable,
        agent: SectorId,
        kappa: Kappa,
    ) -> Self {
        let bins = scenario.num_bins();
        let m = scenario.num_sectors();
        let capacity: Vec<u32> = scenario.sectors().iter().map(|s| s.capacity).collect();
        let mut background: Vec<u32> = (0..m)
            .flat_map(|s| loads.occupancy(SectorId(s as u32)).iter().copied())
            .collect();
        for &f in scenario.flights_of(agent) {
            for &c in footprint.cells(f, x.index(f)) {
                background[c as usize] -= 1;
            }
        }
        let background_overload = (0..m)
            .map(|s| {
                background[s * bins..(s + 1) * bins]
                    .iter()
                    .map(|&c| excess(c, capacity[s]))
                    .sum()
            })
            .collect();
        let protected = loads.per_sector_overload().iter().map(|&l| l == 0).collect();
        Self {
            scenario,
            footprint,
            agent,
            kappa,
            bins,
            capacity,
            background,
            background_overload,
            protected,
            incumbent: x.agent_actions(scenario, agent),
            incumbent_cost: cost_from_loads(loads, agent, kappa),
        }
    }

    pub fn agent(&self) -> SectorId {
        self.agent
    }

    pub fn incumbent(&self) -> &[usize] {
        &self.incumbent
    }

    pub fn incumbent_cost(&self) -> Scaled {
        self.incumbent_cost
    }

    pub fn arities(&self) -> Vec<usize> {
        vec![self.scenario.num_actions(); self.incumbent.len()]
    }

    /// Per-sector overloads when the agent plays `actions`.
    pub fn overloads(&self, actions: &[usize]) -> Vec<u64> {
        let mut overloads = self.background_overload.clone();
        SCRATCH.with(|cell| {
            let scratch = &mut *cell.borrow_mut();
            if scratch.added.len() < self.background.len() {
                scratch.added.resize(self.background.len(), 0);
            }
            scratch.touched.clear();
            for (&f, &a) in self.scenario.flights_of(self.agent).iter().zip(actions) {
                for &c in self.footprint.cells(f, a) {
                    let slot = &mut scratch.added[c as usize];
                    if *slot == 0 {
                        scratch.touched.push(c);
                    }
                    *slot += 1;
                }
            }
            for &c in &scratch.touched {
                let c = c as usize;
                let s = c / self.bins;
                let base = self.background[c];
                let extra = std::mem::take(&mut scratch.added[c]);
                overloads[s] += excess(base + extra, self.capacity[s]) - excess(base, self.capacity[s]);
            }
        });
        overloads
    }

    /// `J_agent` under `actions`, or `None` when `actions` would overload a
    /// currently feasible sector.
    pub fn evaluate(&self, actions: &[usize]) -> Option<Scaled> {
        let overloads = self.overloads(actions);
        if overloads.iter().zip(&self.protected).any(|(&l, &p)| p && l > 0) {
            return None;
        }
        let own = overloads[self.agent.index()];
        let total: u64 = overloads.iter().sum();
        Some(self.kappa.mix(own, total - own, 0))
    }

    pub fn solve_ga(&self, config: &GaConfig) -> BestResponse {
        if self.incumbent.is_empty() {
            return self.unchanged(0);
        }
        let outcome = ga::minimize(
            &self.arities(),
            |genes| self.evaluate(genes).map(|v| v.as_fitness()),
            &self.incumbent,
            config,
        )
        .expect("incumbent lies in the action space and the config was validated");
        let cost = self.evaluate(&outcome.best).expect("GA never returns an infeasible candidate");
        BestResponse {
            actions: outcome.best,
            cost,
            evaluations: outcome.evaluations,
        }
    }

    /// Exact constrained argmin; ties go to the lexicographically smallest
    /// delay vector.
    pub fn solve_exhaustive(&self, cap: u64) -> Result<BestResponse, ModelError> {
        let n = self.incumbent.len();
        let p = self.scenario.num_actions();
        let size = (p as f64).powi(n as i32);
        if size > cap as f64 {
            return Err(ModelError::SpaceTooLarge { size, cap });
        }
        let mut actions = vec![0usize; n];
        let mut best: Option<(Scaled, Vec<usize>)> = None;
        let mut evaluations = 0u64;
        loop {
            evaluations += 1;
            if let Some(v) = self.evaluate(&actions) {
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, actions.clone()));
                }
            }
            // Odometer in lexicographic order, last flight fastest.
            let mut k = n;
            loop {
                if k == 0 {
                    let (cost, actions) = best.expect("the incumbent is always feasible");
                    return Ok(BestResponse {
                        actions,
                        cost,
                        evaluations,
                    });
                }
                k -= 1;
                actions[k] += 1;
                if actions[k] < p {
                    break;
                }
                actions[k] = 0;
            }
        }
    }

    fn unchanged(&self, evaluations: u64) -> BestResponse {
        BestResponse {
            actions: self.incumbent.clone(),
            cost: self.incumbent_cost,
            evaluations,
        }
    }
}

/// A candidate action for one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct BestResponse {
    pub actions: Vec<usize>,
    pub cost: Scaled,
    pub evaluations: u64,
}

/// GA-approximated best response of `agent` to `x`. Only the agent's flights
/// change; the result never violates the no-new-overload rule and never
/// costs more than `x`.
pub fn best_response(
    scenario: &Scenario,
    x: &ActionProfile,
    agent: SectorId,
    kappa: Kappa,
    ga_config: &GaConfig,
) -> Result<ActionProfile, ModelError> {
    scenario.check_sector(agent)?;
    x.validate(scenario)?;
    let footprint = Footprint::new(scenario);
    let loads = LoadTable::from_footprint(scenario, &footprint, x);
    let problem = BestResponseProblem::new(scenario, &footprint, x, &loads, agent, kappa);
    let br = problem.solve_ga(ga_config);
    Ok(x.with_agent_actions(scenario, agent, &br.actions))
}

/// Exact best response by enumeration of `A^{n_agent}`.
pub fn exhaustive_best_response(
    scenario: &Scenario,
    x: &ActionProfile,
    agent: SectorId,
    kappa: Kappa,
) -> Result<ActionProfile, ModelError> {
    exhaustive_best_response_capped(scenario, x, agent, kappa, DEFAULT_EXHAUSTIVE_CAP)
}

pub fn exhaustive_best_response_capped(
    scenario: &Scenario,
    x: &ActionProfile,
    agent: SectorId,
    kappa: Kappa,
    cap: u64,
) -> Result<ActionProfile, ModelError> {
    scenario.check_sector(agent)?;
    x.validate(scenario)?;
    let footprint = Footprint::new(scenario);
    let loads = LoadTable::from_footprint(scenario, &footprint, x);
    let problem = BestResponseProblem::new(scenario, &footprint, x, &loads, agent, kappa);
    let br = problem.solve_exhaustive(cap)?;
    Ok(x.with_agent_actions(scenario, agent, &br.actions))
}
