//! Brute-force occupancy counting that shares no code with the load tables
//! used by the solvers.

use crate::airspace::{Minutes, Scenario};
use crate::game::Kappa;

/// Occupancy and own-flight counts per `(sector, bin)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveLoads {
    pub occupancy: Vec<Vec<u32>>,
    pub own: Vec<Vec<u32>>,
    pub capacity: Vec<u32>,
}

impl NaiveLoads {
    /// Counts by scanning every bin, sector and flight and testing each
    /// delayed stay against the bin interval.
    pub fn count(scenario: &Scenario, indices: &[usize]) -> Self {
        let m = scenario.num_sectors();
        let bins = scenario.num_bins();
        let w = scenario.bin_width();
        let delays: Vec<Minutes> = indices.iter().map(|&k| scenario.action_set()[k]).collect();
        let mut occupancy = vec![vec![0u32; bins]; m];
        let mut own = vec![vec![0u32; bins]; m];
        for (s, (occ_row, own_row)) in occupancy.iter_mut().zip(own.iter_mut()).enumerate() {
            for t in 0..bins {
                let (lo, hi) = (t as u64 * w as u64, (t as u64 + 1) * w as u64);
                for (f, flight) in scenario.flights().iter().enumerate() {
                    let start = flight.base_departure as u64 + delays[f] as u64;
                    let inside = flight.segments.iter().any(|seg| {
                        seg.sector.index() == s
                            && start + (seg.entry_offset as u64) < hi
                            && start + (seg.exit_offset as u64) > lo
                    });
                    if inside {
                        occ_row[t] += 1;
                        if flight.owner.index() == s {
                            own_row[t] += 1;
                        }
                    }
                }
            }
        }
        NaiveLoads {
            occupancy,
            own,
            capacity: scenario.sectors().iter().map(|x| x.capacity).collect(),
        }
    }

    pub fn overloads(&self) -> Vec<u64> {
        self.occupancy
            .iter()
            .zip(&self.capacity)
            .map(|(row, &d)| row.iter().map(|&c| c.saturating_sub(d) as u64).sum())
            .collect()
    }

    pub fn overloaded_sectors(&self) -> Vec<usize> {
        self.overloads()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(s, _)| s)
            .collect()
    }

    pub fn overloaded_cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for (s, row) in self.occupancy.iter().enumerate() {
            for (t, &c) in row.iter().enumerate() {
                if c > self.capacity[s] {
                    cells.push((s, t));
                }
            }
        }
        cells
    }

    /// Own-flight counts summed over overloaded cells.
    pub fn own_on_overloaded(&self) -> u64 {
        self.overloaded_cells()
            .iter()
            .map(|&(s, t)| self.own[s][t] as u64)
            .sum()
    }
}

/// Cost or potential in units of `1/den` when κ is a ratio, plain reals
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Exact { units: i128, den: u64 },
    Approx(f64),
}

impl Value {
    pub fn to_f64(self) -> f64 {
        match self {
            Value::Exact { units, den } => units as f64 / den as f64,
            Value::Approx(v) => v,
        }
    }

    pub fn minus(self, other: Value) -> Value {
        match (self, other) {
            (Value::Exact { units: a, den }, Value::Exact { units: b, den: d2 }) if den == d2 => {
                Value::Exact { units: a - b, den }
            }
            (a, b) => Value::Approx(a.to_f64() - b.to_f64()),
        }
    }

    pub fn same(self, other: Value) -> bool {
        match (self, other) {
            (Value::Exact { units: a, den }, Value::Exact { units: b, den: d2 }) if den == d2 => a == b,
            (a, b) => (a.to_f64() - b.to_f64()).abs() <= 1e-9,
        }
    }

    /// Strictly below `other`, with the same tolerance as [`Value::same`].
    pub fn below(self, other: Value) -> bool {
        !self.same(other) && self.to_f64() < other.to_f64()
    }

    pub fn is_negative(self) -> bool {
        self.below(self.minus(self))
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Value::Exact { units, den: 1 } => write!(f, "{units}"),
            Value::Exact { units, den } => write!(f, "{units}/{den}"),
            Value::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// `L_i + κ Σ_{j≠i} L_j`.
pub fn cost_value(overloads: &[u64], agent: usize, kappa: Kappa) -> Value {
    let own = overloads[agent] as i128;
    let others: i128 = overloads.iter().map(|&l| l as i128).sum::<i128>() - own;
    match kappa {
        Kappa::Ratio { num, den } => Value::Exact {
            units: den as i128 * own + num as i128 * others,
            den,
        },
        Kappa::Real(k) => Value::Approx(own as f64 + k * others as f64),
    }
}

/// `κ Σ L + (1 − κ) Σ_{overloaded cells} own count`.
pub fn potential_value(loads: &NaiveLoads, kappa: Kappa) -> Value {
    let total: i128 = loads.overloads().iter().map(|&l| l as i128).sum();
    let own = loads.own_on_overloaded() as i128;
    match kappa {
        Kappa::Ratio { num, den } => Value::Exact {
            units: num as i128 * total + (den - num) as i128 * own,
            den,
        },
        Kappa::Real(k) => Value::Approx(k * total as f64 + (1.0 - k) * own as f64),
    }
}
