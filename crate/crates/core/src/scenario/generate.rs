use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::airspace::{compute_loads, ActionProfile, Flight, FlightId, Minutes, Scenario, Sector, SectorId, TrajectorySegment};
use crate::error::ScenarioError;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityRule {
    /// Same capacity `D` for every sector.
    Uniform(u32),
    /// `D = floor(ρ × peak zero-delay cell occupancy)`, at least 1.
    Headroom(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    Ring,
    /// Row-major grid with the given number of columns.
    Grid { columns: usize },
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub sectors: usize,
    pub flights: usize,
    pub horizon: Minutes,
    pub bin_width: Minutes,
    pub capacity: CapacityRule,
    /// Inclusive range of sectors crossed per flight.
    pub route_length: (usize, usize),
    /// Inclusive range of minutes spent in each sector.
    pub transit_time: (Minutes, Minutes),
    /// Number of Gaussian demand bumps, evenly spaced over the horizon.
    pub peaks: usize,
    /// Standard deviation of each bump, minutes.
    pub peak_width: Minutes,
    /// Share of departures drawn uniformly instead of from a bump.
    pub background_share: f64,
    pub adjacency: Adjacency,
    pub action_set: Vec<Minutes>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<Planting>,
}

/// Planted feasibility (uniform capacity only). Flights are first placed so
/// that no cell exceeds `D − slack`; `pull_share` of them is then moved
/// earlier by a nonzero option of the action set, so delaying them back by
/// that option is a zero-overload profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Planting {
    pub pull_share: f64,
    #[serde(default)]
    pub slack: u32,
}

fn gen_err(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Generation(msg.into())
}

impl GenParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.sectors == 0 {
            return Err(gen_err("sectors must be at least 1"));
        }
        let (rmin, rmax) = self.route_length;
        if rmin == 0 || rmin > rmax {
            return Err(gen_err(format!("route_length range [{rmin}, {rmax}] is empty or starts at 0")));
        }
        let (tmin, tmax) = self.transit_time;
        if tmin == 0 || tmin > tmax {
            return Err(gen_err(format!("transit_time range [{tmin}, {tmax}] is empty or starts at 0")));
        }
        if !(0.0..=1.0).contains(&self.background_share) {
            return Err(gen_err("background_share must lie in [0, 1]"));
        }
        match (self.planted, self.capacity) {
            (Some(p), _) if !(0.0..=1.0).contains(&p.pull_share) => {
                return Err(gen_err("planted.pull_share must lie in [0, 1]"))
            }
            (Some(_), CapacityRule::Headroom(_)) => return Err(gen_err("planting needs a uniform capacity")),
            (Some(p), CapacityRule::Uniform(d)) if p.slack >= d => {
                return Err(gen_err(format!("planted.slack {} leaves no room under capacity {d}", p.slack)))
            }
            _ => {}
        }
        if self.peaks > 0 && self.peak_width == 0 {
            return Err(gen_err("peak_width must be positive"));
        }
        match self.capacity {
            CapacityRule::Uniform(0) => return Err(gen_err("uniform capacity must be positive")),
            CapacityRule::Headroom(rho) if !(rho > 0.0 && rho <= 1.0) => {
                return Err(gen_err(format!("headroom fraction {rho} must lie in (0, 1]")))
            }
            _ => {}
        }
        if let Adjacency::Grid { columns } = self.adjacency {
            if columns == 0 {
                return Err(gen_err("grid needs at least one column"));
            }
        }
        let max_delay = self.action_set.last().copied().unwrap_or(0);
        let longest = rmax as u64 * tmax as u64 + max_delay as u64;
        if longest > self.horizon as u64 {
            return Err(gen_err(format!(
                "route_length.max × transit_time.max + max delay = {longest} min exceeds the horizon {} min",
                self.horizon
            )));
        }
        Ok(())
    }
}

fn neighbours(m: usize, adjacency: Adjacency) -> Vec<Vec<usize>> {
    (0..m)
        .map(|s| {
            let mut n: Vec<usize> = match adjacency {
                Adjacency::Complete => (0..m).filter(|&t| t != s).collect(),
                Adjacency::Ring => {
                    if m == 1 {
                        vec![]
                    } else {
                        vec![(s + m - 1) % m, (s + 1) % m]
                    }
                }
                Adjacency::Grid { columns } => {
                    let (r, c) = (s / columns, s % columns);
                    let mut v = Vec::new();
                    if c > 0 {
                        v.push(s - 1);
                    }
                    if c + 1 < columns && s + 1 < m {
                        v.push(s + 1);
                    }
                    if r > 0 {
                        v.push(s - columns);
                    }
                    if s + columns < m {
                        v.push(s + columns);
                    }
                    v
                }
            };
            n.sort_unstable();
            n.dedup();
            n
        })
        .collect()
}

struct Sampler {
    adjacency: Vec<Vec<usize>>,
    bumps: Vec<Normal<f64>>,
}

impl Sampler {
    fn new(params: &GenParams) -> Self {
        let width = params.peak_width.max(1) as f64;
        let bumps = (0..params.peaks)
            .map(|k| {
                let centre = params.horizon as f64 * (k as f64 + 1.0) / (params.peaks as f64 + 1.0);
                Normal::new(centre, width).expect("positive width")
            })
            .collect();
        Self {
            adjacency: neighbours(params.sectors, params.adjacency),
            bumps,
        }
    }

    fn segments(&self, params: &GenParams, rng: &mut ChaCha8Rng) -> Vec<TrajectorySegment> {
        let length = rng.random_range(params.route_length.0..=params.route_length.1);
        let mut route = vec![rng.random_range(0..params.sectors)];
        while route.len() < length {
            let here = *route.last().unwrap();
            let fresh: Vec<usize> = self.adjacency[here].iter().copied().filter(|s| !route.contains(s)).collect();
            let pool = if fresh.is_empty() { &self.adjacency[here] } else { &fresh };
            match pool.choose(rng) {
                Some(&next) => route.push(next),
                None => break,
            }
        }
        let mut offset = 0;
        route
            .iter()
            .map(|&s| {
                let stay = rng.random_range(params.transit_time.0..=params.transit_time.1);
                let seg = TrajectorySegment {
                    sector: SectorId(s as u32),
                    entry_offset: offset,
                    exit_offset: offset + stay,
                };
                offset += stay;
                seg
            })
            .collect()
    }

    fn departure(&self, params: &GenParams, duration: Minutes, rng: &mut ChaCha8Rng) -> Minutes {
        let max_delay = params.action_set.last().copied().unwrap_or(0);
        let latest = params.horizon - duration - max_delay;
        if self.bumps.is_empty() || rng.random::<f64>() < params.background_share {
            rng.random_range(0..=latest)
        } else {
            let bump = self.bumps[rng.random_range(0..self.bumps.len())];
            let t = bump.sample(rng).round();
            t.clamp(0.0, latest as f64) as Minutes
        }
    }
}

fn flight(k: usize, departure: Minutes, segments: Vec<TrajectorySegment>) -> Flight {
    Flight {
        id: FlightId(k as u32),
        owner: segments[0].sector,
        base_departure: departure,
        segments,
    }
}

fn draw_flights(params: &GenParams, rng: &mut ChaCha8Rng) -> Vec<Flight> {
    let sampler = Sampler::new(params);
    (0..params.flights)
        .map(|k| {
            let segments = sampler.segments(params, rng);
            let departure = sampler.departure(params, segments.last().unwrap().exit_offset, rng);
            flight(k, departure, segments)
        })
        .collect()
}

/// Cells `sector * bins + bin` touched by `segments` when departing at `t`.
fn cells(segments: &[TrajectorySegment], t: Minutes, width: Minutes, bins: usize) -> impl Iterator<Item = usize> + '_ {
    segments.iter().flat_map(move |seg| {
        let (start, end) = (t + seg.entry_offset, t + seg.exit_offset);
        let base = seg.sector.index() * bins;
        (start / width..=(end - 1) / width).map(move |b| base + b as usize)
    })
}

/// Places flights under capacity `d`, then pulls a share of them earlier.
/// Returns the flights and the delay index that restores the placement.
fn draw_planted(params: &GenParams, d: u32, share: f64, rng: &mut ChaCha8Rng) -> Option<(Vec<Flight>, Vec<usize>)> {
    const TRIES: usize = 256;
    let sampler = Sampler::new(params);
    let bins = params.horizon.div_ceil(params.bin_width) as usize;
    let mut occupancy = vec![0u32; params.sectors * bins];
    let mut flights = Vec::with_capacity(params.flights);
    let mut witness = Vec::with_capacity(params.flights);
    for k in 0..params.flights {
        let (segments, target) = (0..TRIES).find_map(|_| {
            let segments = sampler.segments(params, rng);
            let t = sampler.departure(params, segments.last().unwrap().exit_offset, rng);
            let mut touched: Vec<usize> = cells(&segments, t, params.bin_width, bins).collect();
            touched.sort_unstable();
            touched.dedup();
            if touched.iter().any(|&c| occupancy[c] >= d) {
                return None;
            }
            for c in touched {
                occupancy[c] += 1;
            }
            Some((segments, t))
        })?;
        let options: Vec<usize> = (1..params.action_set.len()).filter(|&a| params.action_set[a] <= target).collect();
        let pull = match options.choose(rng) {
            Some(&a) if rng.random::<f64>() < share => a,
            _ => 0,
        };
        flights.push(flight(k, target - params.action_set[pull], segments));
        witness.push(pull);
    }
    Some((flights, witness))
}

/// Peak zero-delay occupancy over all `(sector, bin)` cells.
pub fn peak_occupancy(scenario: &Scenario) -> u32 {
    let loads = compute_loads(scenario, &ActionProfile::zeros(scenario)).expect("zero profile fits");
    scenario
        .sector_ids()
        .flat_map(|s| loads.occupancy(s).to_vec())
        .max()
        .unwrap_or(0)
}

/// Draws a synthetic scenario. Flights follow random walks over the sector
/// adjacency, are owned by their first sector, and depart according to a
/// peaked demand profile. Deterministic in `params.seed`.
pub fn generate(params: &GenParams) -> Result<Scenario, ScenarioError> {
    generate_with_witness(params).map(|(s, _)| s)
}

/// As [`generate`]; with a planted schedule also returns the zero-overload
/// profile that undoes the pulls.
pub fn generate_with_witness(params: &GenParams) -> Result<(Scenario, Option<ActionProfile>), ScenarioError> {
    params.validate()?;
    const ATTEMPTS: u64 = 32;
    for attempt in 0..ATTEMPTS {
        let stream = if attempt == 0 {
            params.seed
        } else {
            seed::derive(params.seed, &[attempt])
        };
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        let placeholder = match params.capacity {
            CapacityRule::Uniform(d) => d,
            _ => 1,
        };
        let (flights, witness) = match (params.planted, params.capacity) {
            (Some(p), CapacityRule::Uniform(d)) => match draw_planted(params, d - p.slack, p.pull_share, &mut rng) {
                Some((flights, witness)) => (flights, Some(witness)),
                None => continue,
            },
            _ => (draw_flights(params, &mut rng), None),
        };
        let sectors = (0..params.sectors)
            .map(|s| Sector {
                id: SectorId(s as u32),
                capacity: placeholder,
            })
            .collect();
        let scenario = Scenario::new(sectors, flights, params.horizon, params.bin_width, params.action_set.clone())?;
        let witness = witness.map(|w| ActionProfile::from_indices(&scenario, w)).transpose()?;
        let CapacityRule::Headroom(rho) = params.capacity else {
            return Ok((scenario, witness));
        };
        let capacity = ((rho * peak_occupancy(&scenario) as f64 + 1e-9).floor() as u32).max(1);
        let scenario = scenario.with_uniform_capacity(capacity)?;
        if rho >= 1.0 || params.flights == 0 || !compute_loads(&scenario, &ActionProfile::zeros(&scenario))?.is_feasible() {
            return Ok((scenario, None));
        }
    }
    Err(gen_err(match params.capacity {
        CapacityRule::Uniform(d) => {
            let room = d - params.planted.map_or(0, |p| p.slack);
            format!("could not place {} flights under capacity {room} in {ATTEMPTS} attempts", params.flights)
        }
        rule => format!("{rule:?} produced no zero-delay overload in {ATTEMPTS} attempts"),
    }))
}
