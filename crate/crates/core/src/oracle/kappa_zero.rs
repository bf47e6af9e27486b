//! Adjudication of the claim that `Φ = Σ_i L_i` is an exact potential of
//! the `κ = 0` game for every unilateral deviation.
//!
//! At `κ = 0` the deviator's cost is its own overload, so the claim holds
//! for a deviation exactly when the other sectors' overloads sum to the
//! same value before and after it. The search scans the battery in seed
//! order, shrinks the first hit by greedy removal of flights and sectors,
//! and then looks for a four-cycle of unilateral moves whose cost changes
//! do not cancel, which rules out every exact potential at once.

use serde::{Deserialize, Serialize};

use super::checks::{Instance, ORACLE_CAP};
use super::table::ProfileTable;
use crate::airspace::{Flight, FlightId, Scenario, ScenarioDoc, SectorId};

pub const CLAIM: &str = "at kappa = 0, Phi = sum_i L_i satisfies dJ_i = dPhi for every unilateral deviation";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// No violation anywhere in the searched space.
    Certified,
    /// A counterexample was found and archived.
    ClaimDisputed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub scenario: Scenario,
    pub agent: SectorId,
    pub profile: Vec<usize>,
    pub deviation: Vec<usize>,
    /// `ΔJ_i = ΔL_i`.
    pub delta_cost: i64,
    /// `Δ Σ_j L_j`.
    pub delta_potential: i64,
    /// `Σ_{j≠i} ΔL_j`, nonzero by construction.
    pub others_delta: i64,
}

/// `x → x^a → x^{ab} → x^b → x` where agent `a` moves on the first and third
/// legs and agent `b` on the second and fourth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourCycle {
    pub scenario: Scenario,
    pub agents: (SectorId, SectorId),
    pub profiles: [Vec<usize>; 4],
    /// Sum of the movers' cost changes around the cycle; any exact
    /// potential would force it to zero.
    pub cost_sum: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaZeroRecord {
    pub claim: String,
    pub instances: usize,
    pub deviations: u64,
    pub violating_deviations: u64,
    pub verdict: Verdict,
    pub found_in_seed: Option<u64>,
    /// `(flights, sectors)` of the instance before shrinking.
    pub shrunk_from: Option<(usize, usize)>,
    pub counterexample: Option<Counterexample>,
    /// A shrunk non-cancelling four-cycle from the first battery instance
    /// that has one.
    pub no_exact_potential: Option<FourCycle>,
}

fn loads_i64(table: &ProfileTable, x: usize) -> Vec<i64> {
    table.overloads[x].iter().map(|&l| l as i64).collect()
}

/// Scans every deviation; returns the count of violations and the first
/// one in (profile, agent, deviation) order.
fn scan(scenario: &Scenario, table: &ProfileTable) -> (u64, u64, Option<Counterexample>) {
    let (mut checked, mut bad, mut first) = (0, 0, None);
    for x in 0..table.len() {
        let lx = loads_i64(table, x);
        for agent in scenario.sector_ids() {
            let i = agent.index();
            for y in table.deviations(scenario, x, agent) {
                if y == x {
                    continue;
                }
                checked += 1;
                let ly = loads_i64(table, y);
                let dj = ly[i] - lx[i];
                let dphi: i64 = ly.iter().sum::<i64>() - lx.iter().sum::<i64>();
                if dj != dphi {
                    bad += 1;
                    first.get_or_insert_with(|| Counterexample {
                        scenario: scenario.clone(),
                        agent,
                        profile: table.decode(x),
                        deviation: table.decode(y),
                        delta_cost: dj,
                        delta_potential: dphi,
                        others_delta: dphi - dj,
                    });
                }
            }
        }
    }
    (checked, bad, first)
}

fn first_violation(scenario: &Scenario) -> Option<Counterexample> {
    let table = ProfileTable::build(scenario, ORACLE_CAP).ok()?;
    scan(scenario, &table).2
}

fn rebuild(base: &Scenario, sectors: Vec<crate::airspace::Sector>, flights: Vec<Flight>) -> Option<Scenario> {
    let flights = flights
        .into_iter()
        .enumerate()
        .map(|(k, f)| Flight {
            id: FlightId(k as u32),
            ..f
        })
        .collect();
    Scenario::try_from(ScenarioDoc {
        sectors,
        flights,
        ..base.doc().clone()
    })
    .ok()
}

fn without_flight(s: &Scenario, drop: usize) -> Option<Scenario> {
    let flights = s
        .flights()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != drop)
        .map(|(_, f)| f.clone())
        .collect();
    rebuild(s, s.sectors().to_vec(), flights)
}

fn without_sector(s: &Scenario, drop: u32) -> Option<Scenario> {
    if s.num_sectors() < 2 {
        return None;
    }
    let shift = |id: SectorId| SectorId(if id.0 > drop { id.0 - 1 } else { id.0 });
    let sectors = s
        .sectors()
        .iter()
        .filter(|x| x.id.0 != drop)
        .map(|x| crate::airspace::Sector {
            id: shift(x.id),
            capacity: x.capacity,
        })
        .collect();
    let flights = s
        .flights()
        .iter()
        .filter(|f| f.owner.0 != drop)
        .map(|f| {
            let mut f = f.clone();
            f.owner = shift(f.owner);
            f.segments.retain(|seg| seg.sector.0 != drop);
            for seg in &mut f.segments {
                seg.sector = shift(seg.sector);
            }
            f
        })
        .filter(|f| !f.segments.is_empty())
        .collect();
    rebuild(s, sectors, flights)
}

/// Greedy shrink: repeatedly drop the first flight, then the first sector,
/// whose removal keeps some violation alive.
pub fn shrink(scenario: Scenario) -> Scenario {
    shrink_while(scenario, |s| first_violation(s).is_some())
}

fn shrink_while(mut scenario: Scenario, keep: impl Fn(&Scenario) -> bool) -> Scenario {
    loop {
        let smaller = (0..scenario.num_flights())
            .filter_map(|f| without_flight(&scenario, f))
            .chain((0..scenario.num_sectors() as u32).filter_map(|s| without_sector(&scenario, s)))
            .find(|cand| keep(cand));
        match smaller {
            Some(next) => scenario = next,
            None => return scenario,
        }
    }
}

/// First four-cycle of unilateral moves by two distinct agents whose cost
/// changes (at `κ = 0`, each mover's own overload) do not sum to zero.
pub fn find_four_cycle(scenario: &Scenario) -> Option<FourCycle> {
    let table = ProfileTable::build(scenario, ORACLE_CAP).ok()?;
    let l = |x: usize, s: SectorId| table.overloads[x][s.index()] as i64;
    for x in 0..table.len() {
        for a in scenario.sector_ids() {
            for b in scenario.sector_ids().filter(|&b| b > a) {
                for xa in table.deviations(scenario, x, a) {
                    for xb in table.deviations(scenario, x, b) {
                        if xa == x || xb == x {
                            continue;
                        }
                        // The two agents own disjoint digits, so the joint move
                        // is the sum of the two offsets.
                        let xab = xa + xb - x;
                        let sum = (l(xa, a) - l(x, a)) + (l(xab, b) - l(xa, b)) + (l(xb, a) - l(xab, a))
                            + (l(x, b) - l(xb, b));
                        if sum != 0 {
                            return Some(FourCycle {
                                scenario: scenario.clone(),
                                agents: (a, b),
                                profiles: [table.decode(x), table.decode(xa), table.decode(xab), table.decode(xb)],
                                cost_sum: sum,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Searches the whole battery and builds the adjudication record.
pub fn adjudicate_kappa_zero(instances: &[Instance]) -> KappaZeroRecord {
    let mut record = KappaZeroRecord {
        claim: CLAIM.to_string(),
        instances: 0,
        deviations: 0,
        violating_deviations: 0,
        verdict: Verdict::Certified,
        found_in_seed: None,
        shrunk_from: None,
        counterexample: None,
        no_exact_potential: None,
    };
    let mut first: Option<(u64, Scenario)> = None;
    let mut cycle: Option<Scenario> = None;
    for inst in instances {
        let Ok(table) = ProfileTable::build(&inst.scenario, ORACLE_CAP) else {
            continue;
        };
        record.instances += 1;
        let (checked, bad, hit) = scan(&inst.scenario, &table);
        record.deviations += checked;
        record.violating_deviations += bad;
        if first.is_none() && hit.is_some() {
            first = Some((inst.seed, inst.scenario.clone()));
        }
        if first.is_some() && cycle.is_none() && find_four_cycle(&inst.scenario).is_some() {
            cycle = Some(inst.scenario.clone());
        }
    }
    if let Some((seed, original)) = first {
        let small = shrink(original.clone());
        record.verdict = Verdict::ClaimDisputed;
        record.found_in_seed = Some(seed);
        record.shrunk_from = Some((original.num_flights(), original.num_sectors()));
        record.counterexample = first_violation(&small);
    }
    if let Some(s) = cycle {
        record.no_exact_potential = find_four_cycle(&shrink_while(s, |c| find_four_cycle(c).is_some()));
    }
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airspace::{Sector, TrajectorySegment};
    use crate::oracle::battery;
    use crate::scenario::{tiny_one, TinyMode};

    #[test]
    fn sector_local_instance_is_certified() {
        let s = tiny_one();
        let inst = vec![Instance { seed: 0, scenario: s }];
        let r = adjudicate_kappa_zero(&inst);
        assert_eq!(r.verdict, Verdict::Certified);
        assert!(r.counterexample.is_none());
        assert_eq!(r.deviations, 12);
    }

    #[test]
    fn crossing_flight_breaks_the_claim() {
        // Flight 0 of sector 0 also crosses sector 1, which is at capacity
        // because of flight 1.
        let seg = |s, a, b| TrajectorySegment {
            sector: SectorId(s),
            entry_offset: a,
            exit_offset: b,
        };
        let s = Scenario::new_clipped(
            vec![Sector { id: SectorId(0), capacity: 1 }, Sector { id: SectorId(1), capacity: 1 }],
            vec![
                Flight {
                    id: FlightId(0),
                    owner: SectorId(0),
                    base_departure: 10,
                    segments: vec![seg(0, 0, 5), seg(1, 5, 10)],
                },
                Flight {
                    id: FlightId(1),
                    owner: SectorId(1),
                    base_departure: 0,
                    segments: vec![seg(1, 0, 5)],
                },
            ],
            20,
            20,
            vec![0, 5],
        )
        .unwrap();
        let cex = first_violation(&s).unwrap();
        assert_ne!(cex.others_delta, 0);
        assert_eq!(cex.delta_potential - cex.delta_cost, cex.others_delta);
        let small = shrink(s.clone());
        assert!(small.num_flights() <= s.num_flights());
        assert!(first_violation(&small).is_some());
    }

    #[test]
    fn battery_record_is_consistent() {
        let r = adjudicate_kappa_zero(&battery(TinyMode::SingleWindow, 0..20));
        assert_eq!(r.verdict == Verdict::ClaimDisputed, r.counterexample.is_some());
        assert_eq!(r.violating_deviations > 0, r.counterexample.is_some());
        if let Some(cex) = &r.counterexample {
            assert_ne!(cex.others_delta, 0);
            let (n, m) = r.shrunk_from.unwrap();
            assert!(cex.scenario.num_flights() <= n && cex.scenario.num_sectors() <= m);
        }
    }
}
