//! Airspace world model: sectors, flights and delay profiles, and the
//! occupancy counts, contributions `C_ji` and overloads `L_i` they induce.
//!
//! The horizon is cut into bins of `bin_width` minutes. A flight occupies
//! cell `(sector, bin)` when one of its delayed half-open stays in `sector`
//! intersects the half-open bin. `L_i` sums the per-bin excess over
//! capacity, so a scenario with a single bin reduces to
//! `L_i = max(0, Σ_j C_ji − D_i)`.

mod loads;
mod model;

pub use loads::{
    compute_loads, contribution, contribution_matrix, new_overload_set, total_overload, Footprint, LoadTable,
};
pub(crate) use loads::excess;
pub use model::{
    ActionProfile, Flight, FlightId, Minutes, Scenario, ScenarioDoc, Sector, SectorId, TrajectorySegment,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ModelError;
    use crate::scenario::presets::tiny_one;

    fn profile(s: &Scenario, idx: &[usize]) -> ActionProfile {
        ActionProfile::from_indices(s, idx.to_vec()).unwrap()
    }

    fn seg(sector: u32, entry: u32, exit: u32) -> TrajectorySegment {
        TrajectorySegment {
            sector: SectorId(sector),
            entry_offset: entry,
            exit_offset: exit,
        }
    }

    #[test]
    fn empty_flight_list_has_no_load() {
        let s = Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 3 }],
            vec![],
            60,
            15,
            vec![0, 5],
        )
        .unwrap();
        let loads = compute_loads(&s, &ActionProfile::zeros(&s)).unwrap();
        assert!(loads.occupancy(SectorId(0)).iter().all(|&c| c == 0));
        assert_eq!(loads.per_sector_overload(), &[0]);
        assert!(loads.overloaded_sectors().is_empty());
        assert_eq!(total_overload(&loads), 0);
    }

    #[test]
    fn tiny_one_loads() {
        let s = tiny_one();
        let loads = compute_loads(&s, &profile(&s, &[0, 0])).unwrap();
        assert_eq!(loads.occupancy(SectorId(0)), &[2, 0, 0]);
        assert_eq!(loads.overload(SectorId(0)), 1);
        assert_eq!(loads.overloaded_sectors().into_iter().collect::<Vec<_>>(), vec![SectorId(0)]);
        assert_eq!(total_overload(&loads), 1);

        let loads = compute_loads(&s, &profile(&s, &[0, 1])).unwrap();
        assert_eq!(loads.occupancy(SectorId(0)), &[1, 1, 0]);
        assert_eq!(loads.overload(SectorId(0)), 0);
        assert!(loads.overloaded_sectors().is_empty());
    }

    #[test]
    fn tiny_one_contributions() {
        let s = tiny_one();
        let x = profile(&s, &[0, 0]);
        assert_eq!(contribution(&s, &x, SectorId(0), SectorId(0)).unwrap(), 2);
        assert_eq!(contribution(&s, &x, SectorId(1), SectorId(0)).unwrap(), 0);
        assert!(matches!(
            contribution(&s, &x, SectorId(0), SectorId(9)),
            Err(ModelError::UnknownSector(9))
        ));
    }

    #[test]
    fn crossing_flight_contributes_to_foreign_sector() {
        let s = Scenario::new(
            vec![
                Sector { id: SectorId(0), capacity: 1 },
                Sector { id: SectorId(1), capacity: 1 },
            ],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 0,
                segments: vec![seg(0, 0, 10), seg(1, 10, 20)],
            }],
            40,
            10,
            vec![0, 10],
        )
        .unwrap();
        let x = ActionProfile::zeros(&s);
        assert!(contribution(&s, &x, SectorId(0), SectorId(1)).unwrap() > 0);
        assert_eq!(contribution(&s, &x, SectorId(1), SectorId(0)).unwrap(), 0);
    }

    #[test]
    fn exit_on_bin_boundary_does_not_spill() {
        let s = Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 3,
                segments: vec![seg(0, 0, 7)],
            }],
            20,
            5,
            vec![0, 5],
        )
        .unwrap();
        let loads = compute_loads(&s, &ActionProfile::zeros(&s)).unwrap();
        // [3, 10) touches bins 0 and 1 but not 2.
        assert_eq!(loads.occupancy(SectorId(0)), &[1, 1, 0, 0]);
    }

    #[test]
    fn revisiting_a_sector_counts_once_per_bin() {
        let s = Scenario::new(
            vec![
                Sector { id: SectorId(0), capacity: 1 },
                Sector { id: SectorId(1), capacity: 1 },
            ],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 0,
                segments: vec![seg(0, 0, 2), seg(1, 2, 3), seg(0, 3, 5)],
            }],
            10,
            10,
            vec![0],
        )
        .unwrap();
        let loads = compute_loads(&s, &ActionProfile::zeros(&s)).unwrap();
        assert_eq!(loads.count(SectorId(0), 0), 1);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let s = tiny_one();
        let bad = ActionProfile::zeros(&Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }],
            vec![],
            15,
            5,
            vec![0, 5],
        )
        .unwrap());
        assert_eq!(
            compute_loads(&s, &bad),
            Err(ModelError::ShapeMismatch { expected: 2, found: 0 })
        );
    }

    #[test]
    fn new_overload_set_examples() {
        let s = tiny_one();
        let feasible = profile(&s, &[0, 1]);
        assert!(new_overload_set(&s, &feasible, &feasible).unwrap().is_empty());
        let back = profile(&s, &[0, 0]);
        assert_eq!(
            new_overload_set(&s, &feasible, &back).unwrap().into_iter().collect::<Vec<_>>(),
            vec![SectorId(0)]
        );
    }

    #[test]
    fn multi_sector_deviation_is_rejected() {
        let s = Scenario::new(
            vec![
                Sector { id: SectorId(0), capacity: 1 },
                Sector { id: SectorId(1), capacity: 1 },
            ],
            vec![
                Flight {
                    id: FlightId(0),
                    owner: SectorId(0),
                    base_departure: 0,
                    segments: vec![seg(0, 0, 5)],
                },
                Flight {
                    id: FlightId(1),
                    owner: SectorId(1),
                    base_departure: 0,
                    segments: vec![seg(1, 0, 5)],
                },
            ],
            15,
            5,
            vec![0, 5],
        )
        .unwrap();
        let x = ActionProfile::zeros(&s);
        let both = profile(&s, &[1, 1]);
        assert!(matches!(
            new_overload_set(&s, &x, &both),
            Err(ModelError::NotUnilateral { .. })
        ));
    }

    #[test]
    fn single_window_matches_closed_form() {
        let s = Scenario::new(
            vec![
                Sector { id: SectorId(0), capacity: 1 },
                Sector { id: SectorId(1), capacity: 2 },
            ],
            (0..4)
                .map(|k| Flight {
                    id: FlightId(k),
                    owner: SectorId(k % 2),
                    base_departure: k,
                    segments: vec![seg(k % 2, 0, 3), seg(1 - k % 2, 3, 6)],
                })
                .collect(),
            20,
            20,
            vec![0, 5],
        )
        .unwrap();
        let x = ActionProfile::zeros(&s);
        let loads = compute_loads(&s, &x).unwrap();
        let c = contribution_matrix(&s, &x).unwrap();
        for i in s.sector_ids() {
            let inflow: u64 = (0..2).map(|j| c[j][i.index()]).sum();
            let expected = inflow.saturating_sub(s.capacity(i) as u64);
            assert_eq!(loads.overload(i), expected);
        }
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        let cap0 = Scenario::new(vec![Sector { id: SectorId(0), capacity: 0 }], vec![], 10, 5, vec![0]);
        assert!(matches!(cap0, Err(ModelError::Invalid { ref pointer, .. }) if pointer == "/sectors/0/capacity"));
        let bad_bin = Scenario::new(vec![Sector { id: SectorId(0), capacity: 1 }], vec![], 10, 3, vec![0]);
        assert!(matches!(bad_bin, Err(ModelError::Invalid { ref pointer, .. }) if pointer == "/bin_width"));
        let no_zero = Scenario::new(vec![Sector { id: SectorId(0), capacity: 1 }], vec![], 10, 5, vec![5]);
        assert!(no_zero.is_err());
        let overflow = Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 8,
                segments: vec![seg(0, 0, 5)],
            }],
            15,
            5,
            vec![0, 5],
        );
        assert!(matches!(overflow, Err(ModelError::Invalid { ref pointer, .. }) if pointer == "/flights/0/base_departure"));
        let overlapping = Scenario::new(
            vec![Sector { id: SectorId(0), capacity: 1 }, Sector { id: SectorId(1), capacity: 1 }],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 0,
                segments: vec![seg(0, 0, 5), seg(1, 4, 8)],
            }],
            15,
            5,
            vec![0],
        );
        assert!(overlapping.is_err());
    }

    #[test]
    fn clipped_scenario_drops_presence_past_horizon() {
        let s = Scenario::new_clipped(
            vec![Sector { id: SectorId(0), capacity: 1 }],
            vec![Flight {
                id: FlightId(0),
                owner: SectorId(0),
                base_departure: 8,
                segments: vec![seg(0, 0, 5)],
            }],
            10,
            10,
            vec![0, 5],
        )
        .unwrap();
        assert_eq!(compute_loads(&s, &profile(&s, &[0])).unwrap().count(SectorId(0), 0), 1);
        assert_eq!(compute_loads(&s, &profile(&s, &[1])).unwrap().count(SectorId(0), 0), 0);
    }
}
