//! Named scenarios: hand-built fixtures, oracle-sized random instances and
//! calibrated synthetic worlds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generate::{generate, Adjacency, CapacityRule, GenParams, Planting};
use crate::airspace::{Flight, FlightId, Minutes, Scenario, Sector, SectorId, TrajectorySegment};
use crate::error::ScenarioError;

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "tiny-one",
    "tiny-window",
    "tiny-binned",
    "brest-like",
    "brest-stress",
    "europe-like",
];

/// Two sectors with `D = 1`; two flights of sector 0 both sit in sector 0
/// during `[0, 5)`. Horizon 15 min in 5-min bins, delays `{0, 5}`.
pub fn tiny_one() -> Scenario {
    let flight = |k| Flight {
        id: FlightId(k),
        owner: SectorId(0),
        base_departure: 0,
        segments: vec![TrajectorySegment {
            sector: SectorId(0),
            entry_offset: 0,
            exit_offset: 5,
        }],
    };
    Scenario::new(
        vec![Sector { id: SectorId(0), capacity: 1 }, Sector { id: SectorId(1), capacity: 1 }],
        vec![flight(0), flight(1)],
        15,
        5,
        vec![0, 5],
    )
    .expect("fixture is valid")
}

/// Shape of an oracle-sized random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TinyMode {
    /// One 20-minute bin; presence after minute 20 is clipped, so a delay can
    /// move a flight out of the window.
    SingleWindow,
    /// Three 10-minute bins over a 30-minute horizon, no clipping.
    Binned,
}

/// Random instance with `m ∈ [2, 4]` sectors, `n ∈ [2, 6]` flights and
/// `p ∈ [2, 3]` delay options, small enough for full enumeration of `A^n`.
pub fn tiny(seed: u64, mode: TinyMode) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(2..=4u32);
    let n = rng.random_range(2..=6u32);
    let p = rng.random_range(2..=3usize);
    let actions: Vec<Minutes> = [0, 5, 10][..p].to_vec();
    let max_delay = *actions.last().unwrap();
    let (horizon, bin) = match mode {
        TinyMode::SingleWindow => (20, 20),
        TinyMode::Binned => (30, 10),
    };
    let sectors = (0..m)
        .map(|s| Sector {
            id: SectorId(s),
            capacity: rng.random_range(1..=2),
        })
        .collect();
    let flights = (0..n)
        .map(|k| {
            let length = rng.random_range(1..=3u32.min(m));
            let mut route = vec![rng.random_range(0..m)];
            while route.len() < length as usize {
                let s = rng.random_range(0..m);
                if !route.contains(&s) {
                    route.push(s);
                }
            }
            let segments: Vec<TrajectorySegment> = route
                .iter()
                .enumerate()
                .map(|(q, &s)| TrajectorySegment {
                    sector: SectorId(s),
                    entry_offset: 5 * q as Minutes,
                    exit_offset: 5 * (q as Minutes + 1),
                })
                .collect();
            let latest = match mode {
                TinyMode::SingleWindow => horizon - 5,
                TinyMode::Binned => horizon - 5 * length - max_delay,
            };
            let slot = rng.random_range(0..=latest / 5);
            Flight {
                id: FlightId(k),
                owner: SectorId(route[0]),
                base_departure: 5 * slot,
                segments,
            }
        })
        .collect();
    let build = match mode {
        TinyMode::SingleWindow => Scenario::new_clipped,
        TinyMode::Binned => Scenario::new,
    };
    build(sectors, flights, horizon, bin, actions).expect("tiny generator respects the model invariants")
}

/// Parameters of the regional preset: 28 sectors on a 4 × 7 grid, 1247
/// flights over one day in 5-minute bins, two sharp demand peaks and delays
/// of up to 30 minutes in 5-minute steps. Demand is planted one aircraft
/// below `capacity` and every flight is then pulled earlier, so a
/// zero-overload profile always exists.
pub fn brest_like_params(capacity: u32, seed: u64) -> GenParams {
    GenParams {
        sectors: 28,
        flights: 1247,
        horizon: 1440,
        bin_width: 5,
        capacity: CapacityRule::Uniform(capacity),
        route_length: (1, 6),
        transit_time: (5, 15),
        peaks: 2,
        peak_width: 40,
        background_share: 0.0,
        adjacency: Adjacency::Grid { columns: 7 },
        action_set: (0..=6).map(|k| 5 * k).collect(),
        seed,
        planted: Some(Planting {
            pull_share: 1.0,
            slack: 1,
        }),
    }
}

/// Capacity of the `brest-like` preset.
pub const BREST_CAPACITY: u32 = 8;
/// Capacity of the `brest-stress` preset.
pub const BREST_STRESS_CAPACITY: u32 = 7;

/// Parameters of the continental preset: 12 country-sized sectors on a
/// 3 × 4 grid with `n` flights and capacity at 85 % of the peak demand.
pub fn europe_like_params(flights: usize, seed: u64) -> GenParams {
    GenParams {
        sectors: 12,
        flights,
        horizon: 1440,
        bin_width: 10,
        capacity: CapacityRule::Headroom(0.85),
        route_length: (1, 4),
        transit_time: (20, 60),
        peaks: 2,
        peak_width: 120,
        background_share: 0.4,
        adjacency: Adjacency::Grid { columns: 4 },
        action_set: (0..=6).map(|k| 5 * k).collect(),
        seed,
        planted: None,
    }
}

/// Optional knobs applied on top of a named preset.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PresetOverrides {
    pub flights: Option<usize>,
    pub capacity: Option<u32>,
}

/// Builds the named preset. Fixed presets ignore `seed`.
pub fn preset(name: &str, seed: u64, overrides: PresetOverrides) -> Result<Scenario, ScenarioError> {
    let mut params = match name {
        "tiny-one" => return Ok(tiny_one()),
        "tiny-window" => return Ok(tiny(seed, TinyMode::SingleWindow)),
        "tiny-binned" => return Ok(tiny(seed, TinyMode::Binned)),
        "brest-like" => brest_like_params(BREST_CAPACITY, seed),
        "brest-stress" => brest_like_params(BREST_STRESS_CAPACITY, seed),
        "europe-like" => europe_like_params(1000, seed),
        other => return Err(ScenarioError::UnknownPreset(other.to_string())),
    };
    if let Some(n) = overrides.flights {
        params.flights = n;
    }
    if let Some(d) = overrides.capacity {
        params.capacity = CapacityRule::Uniform(d);
    }
    generate(&params)
}
