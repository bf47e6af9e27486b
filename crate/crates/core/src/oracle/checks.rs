use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::naive::{cost_value, potential_value, NaiveLoads, Value};
use super::table::{space_size, ProfileTable};
use crate::airspace::{compute_loads, ActionProfile, Scenario, SectorId};
use crate::dynamics::{TerminationReason, Trace};
use crate::error::ModelError;
use crate::game::{potential_from_loads, Kappa, Scaled};
use crate::scenario::{tiny, TinyMode};

/// Joint-space cap for the exhaustive checks; `3^6 = 729` fits.
pub const ORACLE_CAP: u64 = 1 << 12;

/// Violations kept verbatim per report; the count is always exact.
const KEPT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub seed: Option<u64>,
    pub step: Option<usize>,
    pub agent: Option<u32>,
    pub profile: Vec<usize>,
    pub deviation: Vec<usize>,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierReport {
    pub check: String,
    pub instances: usize,
    pub deviations: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

impl VerifierReport {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            instances: 0,
            deviations: 0,
            violation_count: 0,
            violations: Vec::new(),
            passed: true,
        }
    }

    pub fn record(&mut self, v: Violation) {
        self.violation_count += 1;
        self.passed = false;
        if self.violations.len() < KEPT {
            self.violations.push(v);
        }
    }

    pub fn merge(mut self, other: VerifierReport) -> Self {
        self.instances += other.instances;
        self.deviations += other.deviations;
        self.violation_count += other.violation_count;
        self.passed &= other.passed;
        let room = KEPT.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
        self
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} instances, {} checks, {} violations",
            self.check, self.instances, self.deviations, self.violation_count
        )
    }
}

/// A seeded tiny scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub scenario: Scenario,
}

pub fn battery(mode: TinyMode, seeds: std::ops::Range<u64>) -> Vec<Instance> {
    seeds
        .map(|seed| Instance {
            seed,
            scenario: tiny(seed, mode),
        })
        .collect()
}

fn per_instance<F>(check: String, instances: &[Instance], body: F) -> VerifierReport
where
    F: Fn(&Instance, &ProfileTable, &mut VerifierReport) + Sync,
{
    let parts: Vec<VerifierReport> = instances
        .par_iter()
        .map(|inst| {
            let mut rep = VerifierReport::new(check.clone());
            rep.instances = 1;
            match ProfileTable::build(&inst.scenario, ORACLE_CAP) {
                Ok(table) => body(inst, &table, &mut rep),
                Err(e) => rep.record(Violation {
                    seed: Some(inst.seed),
                    step: None,
                    agent: None,
                    profile: vec![],
                    deviation: vec![],
                    observed: e.to_string(),
                }),
            }
            rep
        })
        .collect();
    parts.into_iter().fold(VerifierReport::new(check), VerifierReport::merge)
}

/// When a deviation is tested for the exact-potential identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Premise {
    /// Overloaded sector set unchanged.
    FixedOverloadSet,
    /// Overloaded `(sector, bin)` set unchanged.
    FixedResources,
    Unconditional,
}

/// Over every profile and every unilateral deviation meeting `premise`,
/// checks `ΔJ_i = ΔΦ`.
pub fn check_exact_potential(instances: &[Instance], kappa: Kappa, premise: Premise) -> VerifierReport {
    let name = format!("exact_potential(kappa={kappa}, premise={premise:?})");
    per_instance(name, instances, |inst, table, rep| {
        let s = &inst.scenario;
        let phi: Vec<Value> = table.rows.iter().map(|r| potential_value(r, kappa)).collect();
        let sectors: Vec<Vec<usize>> = table.rows.iter().map(|r| r.overloaded_sectors()).collect();
        let cells: Vec<Vec<(usize, usize)>> = table.rows.iter().map(|r| r.overloaded_cells()).collect();
        for x in 0..table.len() {
            for agent in s.sector_ids() {
                let cost_x = cost_value(&table.overloads[x], agent.index(), kappa);
                for y in table.deviations(s, x, agent) {
                    let holds = match premise {
                        Premise::FixedOverloadSet => sectors[x] == sectors[y],
                        Premise::FixedResources => cells[x] == cells[y],
                        Premise::Unconditional => true,
                    };
                    if y == x || !holds {
                        continue;
                    }
                    rep.deviations += 1;
                    let dj = cost_value(&table.overloads[y], agent.index(), kappa).minus(cost_x);
                    let dphi = phi[y].minus(phi[x]);
                    if !dj.same(dphi) {
                        rep.record(Violation {
                            seed: Some(inst.seed),
                            step: None,
                            agent: Some(agent.0),
                            profile: table.decode(x),
                            deviation: table.decode(y),
                            observed: format!("dJ = {dj}, dPhi = {dphi}"),
                        });
                    }
                }
            }
        }
    })
}

/// Differential test: the solver-side load tables, overloads and potential
/// agree with the naive counter on every profile.
pub fn check_load_agreement(instances: &[Instance], kappa: Kappa) -> VerifierReport {
    let name = format!("load_agreement(kappa={kappa})");
    per_instance(name, instances, |inst, table, rep| {
        let s = &inst.scenario;
        for x in 0..table.len() {
            rep.deviations += 1;
            let idx = table.decode(x);
            let profile = ActionProfile::from_indices(s, idx.clone()).expect("decoded profile fits");
            let core = compute_loads(s, &profile).expect("valid profile");
            let naive = &table.rows[x];
            let occ_ok = s.sector_ids().all(|k| core.occupancy(k) == naive.occupancy[k.index()].as_slice());
            let over_ok = core.per_sector_overload() == table.overloads[x].as_slice();
            let phi_ok = match (potential_from_loads(&core, kappa), potential_value(naive, kappa)) {
                (Scaled::Exact(a), Value::Exact { units, .. }) => a == units,
                (a, b) => (a.as_fitness() - b.to_f64()).abs() <= 1e-9,
            };
            if !(occ_ok && over_ok && phi_ok) {
                rep.record(Violation {
                    seed: Some(inst.seed),
                    step: None,
                    agent: None,
                    profile: idx,
                    deviation: vec![],
                    observed: format!("occupancy {occ_ok}, overloads {over_ok}, potential {phi_ok}"),
                });
            }
        }
    })
}

/// What [`enumerate_global_min`] minimises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    TotalOverload,
    Potential(Kappa),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMin {
    pub value: f64,
    pub argmins: Vec<ActionProfile>,
}

fn objective_values(table: &ProfileTable, objective: Objective) -> Vec<Value> {
    table
        .rows
        .iter()
        .zip(&table.overloads)
        .map(|(row, l)| match objective {
            Objective::TotalOverload => Value::Exact {
                units: l.iter().map(|&v| v as i128).sum(),
                den: 1,
            },
            Objective::Potential(k) => potential_value(row, k),
        })
        .collect()
}

fn argmin(values: &[Value]) -> (Value, Vec<usize>) {
    let mut best = values[0];
    for &v in &values[1..] {
        if v.below(best) {
            best = v;
        }
    }
    let set = (0..values.len()).filter(|&k| values[k].same(best)).collect();
    (best, set)
}

/// Exact minimum of `objective` over the full joint space, with every
/// minimiser in lexicographic order.
pub fn enumerate_global_min(scenario: &Scenario, objective: Objective, cap: u64) -> Result<GlobalMin, ModelError> {
    let table = ProfileTable::build(scenario, cap)?;
    let (value, set) = argmin(&objective_values(&table, objective));
    Ok(GlobalMin {
        value: value.to_f64(),
        argmins: set
            .into_iter()
            .map(|k| ActionProfile::from_indices(scenario, table.decode(k)).expect("decoded profile fits"))
            .collect(),
    })
}

/// Wherever the minimum total overload is 0, `Φ` at `κ = 1` must be 0 on
/// exactly the feasible profiles and nonnegative everywhere.
pub fn check_feasible_minimizer(instances: &[Instance]) -> VerifierReport {
    per_instance("feasible_is_global_minimizer".into(), instances, |inst, table, rep| {
        let (total_min, feasible) = argmin(&objective_values(table, Objective::TotalOverload));
        if total_min.to_f64() != 0.0 {
            return;
        }
        let phi = objective_values(table, Objective::Potential(Kappa::ONE));
        let (phi_min, phi_set) = argmin(&phi);
        rep.deviations += table.len() as u64;
        if phi_min.to_f64() != 0.0 || phi_set != feasible {
            rep.record(Violation {
                seed: Some(inst.seed),
                step: None,
                agent: None,
                profile: phi_set.first().map(|&k| table.decode(k)).unwrap_or_default(),
                deviation: vec![],
                observed: format!(
                    "min Phi = {phi_min}, |argmin Phi| = {}, |feasible| = {}",
                    phi_set.len(),
                    feasible.len()
                ),
            });
        }
    })
}

/// With `κ = 0.9 / (n (m − 1))`, no deviation may lower `J_i` while raising
/// `L_i`.
pub fn check_self_prioritization(instances: &[Instance]) -> VerifierReport {
    per_instance("self_prioritization".into(), instances, |inst, table, rep| {
        let s = &inst.scenario;
        let (n, m) = (s.num_flights() as u64, s.num_sectors() as u64);
        if n == 0 || m < 2 {
            return;
        }
        let kappa = Kappa::ratio(9, 10 * n * (m - 1)).expect("below one");
        for x in 0..table.len() {
            for agent in s.sector_ids() {
                let i = agent.index();
                let cost_x = cost_value(&table.overloads[x], i, kappa);
                for y in table.deviations(s, x, agent) {
                    if y == x {
                        continue;
                    }
                    rep.deviations += 1;
                    let dj = cost_value(&table.overloads[y], i, kappa).minus(cost_x);
                    let dl = table.overloads[y][i] as i64 - table.overloads[x][i] as i64;
                    if dj.is_negative() && dl > 0 {
                        rep.record(Violation {
                            seed: Some(inst.seed),
                            step: None,
                            agent: Some(agent.0),
                            profile: table.decode(x),
                            deviation: table.decode(y),
                            observed: format!("dJ = {dj}, dL_i = {dl}, kappa = {kappa}"),
                        });
                    }
                }
            }
        }
    })
}

/// `J_agent(profile)` from the naive counter.
pub fn oracle_cost(scenario: &Scenario, profile: &ActionProfile, agent: SectorId, kappa: Kappa) -> Value {
    cost_value(&NaiveLoads::count(scenario, profile.indices()).overloads(), agent.index(), kappa)
}

/// Whether moving from `x` to `y` overloads a sector that is feasible under
/// `x`.
pub fn creates_new_overload(scenario: &Scenario, x: &ActionProfile, y: &ActionProfile) -> bool {
    let before = NaiveLoads::count(scenario, x.indices()).overloads();
    let after = NaiveLoads::count(scenario, y.indices()).overloads();
    before.iter().zip(&after).any(|(&b, &a)| b == 0 && a > 0)
}

/// Calls `visit` with every profile reachable by `agent` alone, `x`
/// included, stopping early when it returns `true`.
fn for_each_unilateral(
    scenario: &Scenario,
    x: &ActionProfile,
    agent: SectorId,
    cap: u64,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<(), ModelError> {
    let flights: Vec<usize> = scenario.flights_of(agent).iter().map(|f| f.index()).collect();
    let p = scenario.num_actions();
    space_size(p, flights.len(), cap)?;
    let mut y = x.indices().to_vec();
    for &f in &flights {
        y[f] = 0;
    }
    loop {
        if visit(&y) {
            return Ok(());
        }
        let mut k = flights.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            y[flights[k]] += 1;
            if y[flights[k]] < p {
                break;
            }
            y[flights[k]] = 0;
        }
    }
}

/// Lowest `J_agent` over the agent's deviations from `x`; with
/// `restricted`, only deviations that overload no currently feasible
/// sector count.
pub fn best_unilateral_cost(
    scenario: &Scenario,
    x: &ActionProfile,
    agent: SectorId,
    kappa: Kappa,
    restricted: bool,
    cap: u64,
) -> Result<Value, ModelError> {
    x.validate(scenario)?;
    scenario.check_sector(agent)?;
    let before = NaiveLoads::count(scenario, x.indices()).overloads();
    let mut best = cost_value(&before, agent.index(), kappa);
    for_each_unilateral(scenario, x, agent, cap, |y| {
        let after = NaiveLoads::count(scenario, y).overloads();
        let blocked = restricted && before.iter().zip(&after).any(|(&b, &a)| b == 0 && a > 0);
        let c = cost_value(&after, agent.index(), kappa);
        if !blocked && c.below(best) {
            best = c;
        }
        false
    })?;
    Ok(best)
}

/// First agent (by id) with a strictly improving unilateral deviation, and
/// the lexicographically first such deviation.
pub fn nash_violation(
    scenario: &Scenario,
    profile: &ActionProfile,
    kappa: Kappa,
    restricted: bool,
    cap: u64,
) -> Result<Option<(SectorId, ActionProfile)>, ModelError> {
    profile.validate(scenario)?;
    let before = NaiveLoads::count(scenario, profile.indices()).overloads();
    for agent in scenario.sector_ids() {
        let current = cost_value(&before, agent.index(), kappa);
        let mut found = None;
        for_each_unilateral(scenario, profile, agent, cap, |y| {
            let after = NaiveLoads::count(scenario, y).overloads();
            if restricted && before.iter().zip(&after).any(|(&b, &a)| b == 0 && a > 0) {
                return false;
            }
            if cost_value(&after, agent.index(), kappa).below(current) {
                found = Some(y.to_vec());
                return true;
            }
            false
        })?;
        if let Some(y) = found {
            return Ok(Some((agent, ActionProfile::from_indices(scenario, y)?)));
        }
    }
    Ok(None)
}

/// True iff no agent can strictly lower its cost alone (among deviations
/// that create no new overload when `restricted`).
pub fn check_nash(
    scenario: &Scenario,
    profile: &ActionProfile,
    kappa: Kappa,
    restricted: bool,
) -> Result<bool, ModelError> {
    nash_violation(scenario, profile, kappa, restricted, ORACLE_CAP).map(|v| v.is_none())
}

/// Checks a dynamics trace: the overloaded set never grows and stays
/// consistent from step to step, rejected visits change nothing, the run
/// ended before the safeguard, and `Φ` strictly drops on accepted steps
/// whenever it is an exact potential for that step (`κ = 1`, or the
/// overloaded cells are unchanged).
pub fn check_trace_invariants(trace: &Trace) -> VerifierReport {
    let mut rep = VerifierReport::new(format!("trace_invariants(kappa={})", trace.kappa));
    rep.instances = 1;
    let note = |rep: &mut VerifierReport, step: Option<usize>, agent: Option<u32>, observed: String| {
        rep.record(Violation {
            seed: None,
            step,
            agent,
            profile: vec![],
            deviation: vec![],
            observed,
        })
    };
    if trace.termination_reason == TerminationReason::StepLimit {
        note(&mut rep, None, None, format!("stopped by the safeguard after {} rounds", trace.rounds));
    }
    let mut previous: Option<&BTreeSet<SectorId>> = None;
    for step in &trace.steps {
        rep.deviations += 1;
        let at = Some(step.t);
        let who = Some(step.agent.0);
        if let Some(prev) = previous {
            if prev != &step.overloaded_before {
                note(&mut rep, at, who, format!("set jumped from {prev:?} to {:?}", step.overloaded_before));
            }
        }
        if !step.overloaded_after.is_subset(&step.overloaded_before) {
            note(
                &mut rep,
                at,
                who,
                format!("overloaded set grew: {:?} -> {:?}", step.overloaded_before, step.overloaded_after),
            );
        }
        if !step.accepted && (step.overloaded_after != step.overloaded_before || step.cost_after != step.cost_before) {
            note(&mut rep, at, who, "rejected visit changed the state".into());
        }
        if step.accepted && (trace.kappa.is_one() || step.resources_fixed) && step.potential_after >= step.potential_before {
            note(
                &mut rep,
                at,
                who,
                format!("potential did not drop: {} -> {}", step.potential_before, step.potential_after),
            );
        }
        previous = Some(&step.overloaded_after);
    }
    rep
}
