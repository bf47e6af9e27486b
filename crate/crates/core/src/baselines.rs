//! Comparison methods: a centralized GA over the full joint profile and a
//! first-come-first-served delay heuristic.

use std::cell::RefCell;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::airspace::{excess, ActionProfile, FlightId, Footprint, LoadTable, Minutes, Scenario, SectorId};
use crate::error::ModelError;
use crate::ga::{self, GaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Centralized,
    Fcfs,
}

/// A cell FCFS could not clear because no flight present there had a
/// later delay option that moves it out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StuckCell {
    pub sector: SectorId,
    pub bin: usize,
    pub excess: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub method: BaselineMethod,
    pub profile: ActionProfile,
    pub total_overload_before: u64,
    pub total_overload_after: u64,
    /// Fitness evaluations (0 for FCFS).
    pub evaluations: u64,
    pub wall_seconds: f64,
    pub stuck: Vec<StuckCell>,
}

thread_local! {
    static OCCUPANCY: RefCell<(Vec<u32>, Vec<u32>)> = const { RefCell::new((Vec::new(), Vec::new())) };
}

fn joint_overload(scenario: &Scenario, footprint: &Footprint, capacity: &[u32], genes: &[usize]) -> u64 {
    let cells = scenario.num_sectors() * scenario.num_bins();
    let bins = scenario.num_bins();
    OCCUPANCY.with(|cell| {
        let (occ, touched) = &mut *cell.borrow_mut();
        if occ.len() < cells {
            occ.resize(cells, 0);
        }
        touched.clear();
        for (f, &a) in genes.iter().enumerate() {
            for &c in footprint.cells(FlightId(f as u32), a) {
                let slot = &mut occ[c as usize];
                if *slot == 0 {
                    touched.push(c);
                }
                *slot += 1;
            }
        }
        let mut total = 0;
        for &c in touched.iter() {
            let c = c as usize;
            total += excess(std::mem::take(&mut occ[c]), capacity[c / bins]);
        }
        total
    })
}

/// Minimises total overload over all of `A^n` with one GA run seeded at `x0`.
pub fn centralized(scenario: &Scenario, x0: &ActionProfile, ga_config: &GaConfig) -> Result<BaselineResult, ModelError> {
    x0.validate(scenario)?;
    let clock = Instant::now();
    let footprint = Footprint::new(scenario);
    let capacity: Vec<u32> = scenario.sectors().iter().map(|s| s.capacity).collect();
    let before = LoadTable::from_footprint(scenario, &footprint, x0).total_overload();
    let arities = vec![scenario.num_actions(); scenario.num_flights()];
    let outcome = ga::minimize(
        &arities,
        |genes| Some(joint_overload(scenario, &footprint, &capacity, genes) as f64),
        x0.indices(),
        ga_config,
    )
    .map_err(|e| ModelError::Invalid {
        pointer: "/ga".into(),
        reason: e.to_string(),
    })?;
    let profile = ActionProfile::from_indices(scenario, outcome.best)?;
    let after = LoadTable::from_footprint(scenario, &footprint, &profile).total_overload();
    Ok(BaselineResult {
        method: BaselineMethod::Centralized,
        profile,
        total_overload_before: before,
        total_overload_after: after,
        evaluations: outcome.evaluations,
        wall_seconds: clock.elapsed().as_secs_f64(),
        stuck: Vec::new(),
    })
}

/// Latest delayed entry into `sector` among the flight's stays that touch
/// `bin`.
fn entry_time(scenario: &Scenario, flight: FlightId, delay: Minutes, sector: SectorId, bin: usize) -> Minutes {
    let f = scenario.flight(flight);
    let width = scenario.bin_width();
    let (lo, hi) = (bin as Minutes * width, (bin as Minutes + 1) * width);
    f.segments
        .iter()
        .filter(|s| s.sector == sector)
        .map(|s| (f.base_departure + delay + s.entry_offset, f.base_departure + delay + s.exit_offset))
        .filter(|&(start, end)| start < hi && end > lo)
        .map(|(start, _)| start)
        .max()
        .unwrap_or(0)
}

/// First-come-first-served: bins are scanned in time order and, within a
/// bin, sectors by id until the bin is stable. While a cell is over
/// capacity, the most recent entrant (ties: larger flight id) that has a
/// later delay option clearing the cell receives the smallest such option.
pub fn fcfs(scenario: &Scenario, x0: &ActionProfile) -> Result<BaselineResult, ModelError> {
    x0.validate(scenario)?;
    let clock = Instant::now();
    let footprint = Footprint::new(scenario);
    let bins = scenario.num_bins();
    let mut loads = LoadTable::from_footprint(scenario, &footprint, x0);
    let before = loads.total_overload();
    let mut x = x0.clone();
    let mut stuck = Vec::new();

    for bin in 0..bins {
        loop {
            let mut changed = false;
            for sector in scenario.sector_ids() {
                let cell = (sector.index() * bins + bin) as u32;
                while loads.count(sector, bin) > scenario.capacity(sector) {
                    let mut present: Vec<(Minutes, FlightId)> = scenario
                        .flights()
                        .iter()
                        .filter(|f| footprint.cells(f.id, x.index(f.id)).binary_search(&cell).is_ok())
                        .map(|f| (entry_time(scenario, f.id, x.delay(scenario, f.id), sector, bin), f.id))
                        .collect();
                    present.sort_unstable_by(|a, b| b.cmp(a));
                    let fix = present.iter().find_map(|&(_, f)| {
                        (x.index(f) + 1..scenario.num_actions())
                            .find(|&a| footprint.cells(f, a).binary_search(&cell).is_err())
                            .map(|a| (f, a))
                    });
                    let Some((flight, action)) = fix else {
                        break;
                    };
                    loads.move_flight(scenario, &footprint, flight, x.index(flight), action);
                    x.set(flight, action);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for sector in scenario.sector_ids() {
            let over = loads.count(sector, bin).saturating_sub(scenario.capacity(sector));
            if over > 0 {
                stuck.push(StuckCell {
                    sector,
                    bin,
                    excess: over,
                });
            }
        }
    }

    Ok(BaselineResult {
        method: BaselineMethod::Fcfs,
        total_overload_before: before,
        total_overload_after: loads.total_overload(),
        profile: x,
        evaluations: 0,
        wall_seconds: clock.elapsed().as_secs_f64(),
        stuck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airspace::{compute_loads, Flight, Sector, TrajectorySegment};
    use crate::scenario::presets::tiny_one;

    fn stack(n: u32) -> Scenario {
        Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }],
            (0..n)
                .map(|k| Flight {
                    id: FlightId(k),
                    owner: SectorId(0),
                    base_departure: 0,
                    segments: vec![TrajectorySegment {
                        sector: SectorId(0),
                        entry_offset: 0,
                        exit_offset: 5,
                    }],
                })
                .collect(),
            15,
            5,
            vec![0, 5],
        )
        .unwrap()
    }

    #[test]
    fn fcfs_leaves_feasible_profile_alone() {
        let s = tiny_one();
        let x = ActionProfile::from_indices(&s, vec![0, 1]).unwrap();
        let r = fcfs(&s, &x).unwrap();
        assert_eq!(r.profile, x);
        assert_eq!(r.total_overload_after, 0);
    }

    #[test]
    fn fcfs_tiny_one_delays_larger_id() {
        let s = tiny_one();
        let r = fcfs(&s, &ActionProfile::zeros(&s)).unwrap();
        assert_eq!(r.profile.indices(), &[0, 1]);
        assert_eq!(r.total_overload_before, 1);
        assert_eq!(r.total_overload_after, 0);
        assert_eq!(compute_loads(&s, &r.profile).unwrap().total_overload(), 0);
    }

    #[test]
    fn fcfs_records_residual_when_options_run_out() {
        let s = stack(3);
        let r = fcfs(&s, &ActionProfile::zeros(&s)).unwrap();
        assert_eq!(r.profile.indices(), &[0, 1, 1]);
        assert_eq!(r.total_overload_after, 1);
        assert_eq!(
            r.stuck,
            vec![StuckCell {
                sector: SectorId(0),
                bin: 1,
                excess: 1
            }]
        );
        assert_eq!(compute_loads(&s, &r.profile).unwrap().total_overload(), r.total_overload_after);
    }

    #[test]
    fn fcfs_is_deterministic_and_only_adds_delay() {
        let s = stack(3);
        let x0 = ActionProfile::zeros(&s);
        let a = fcfs(&s, &x0).unwrap();
        let b = fcfs(&s, &x0).unwrap();
        assert_eq!(a.profile, b.profile);
        assert!(a.profile.indices().iter().zip(x0.indices()).all(|(n, o)| n >= o));
    }

    #[test]
    fn centralized_examples() {
        let s = tiny_one();
        let r = centralized(&s, &ActionProfile::zeros(&s), &GaConfig::default()).unwrap();
        assert_eq!(r.total_overload_after, 0);
        let feasible = ActionProfile::from_indices(&s, vec![1, 0]).unwrap();
        let r = centralized(&s, &feasible, &GaConfig::default()).unwrap();
        assert_eq!(r.total_overload_after, 0);
        assert_eq!(r.profile, feasible);
    }

    #[test]
    fn centralized_never_worse_than_start() {
        let s = stack(3);
        let x0 = ActionProfile::zeros(&s);
        for seed in 0..5 {
            let r = centralized(&s, &x0, &GaConfig::default().with_seed(seed)).unwrap();
            assert!(r.total_overload_after <= r.total_overload_before);
            assert_eq!(r.total_overload_after, 1);
        }
    }
}
