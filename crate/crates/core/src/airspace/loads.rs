use std::collections::BTreeSet;

use super::model::{ActionProfile, FlightId, Scenario, SectorId};
use crate::error::ModelError;

/// Precomputed `(sector, bin)` cells occupied by every flight under every
/// delay option. Cells are flattened as `sector * bins + bin`, sorted and
/// deduplicated per `(flight, action)`.
#[derive(Debug, Clone)]
pub struct Footprint {
    bins: usize,
    actions: usize,
    offsets: Vec<u32>,
    cells: Vec<u32>,
}

impl Footprint {
    pub fn new(scenario: &Scenario) -> Self {
        let bins = scenario.num_bins();
        let width = scenario.bin_width();
        let horizon = scenario.horizon();
        let actions = scenario.num_actions();
        let mut offsets = Vec::with_capacity(scenario.num_flights() * actions + 1);
        let mut cells = Vec::new();
        let mut scratch: Vec<u32> = Vec::new();
        offsets.push(0);
        for flight in scenario.flights() {
            for &delay in scenario.action_set() {
                scratch.clear();
                let shift = flight.base_departure + delay;
                for seg in &flight.segments {
                    let start = shift + seg.entry_offset;
                    let end = (shift + seg.exit_offset).min(horizon);
                    if start >= end {
                        continue;
                    }
                    let base = seg.sector.0 * bins as u32;
                    for bin in start / width..=(end - 1) / width {
                        scratch.push(base + bin);
                    }
                }
                scratch.sort_unstable();
                scratch.dedup();
                cells.extend_from_slice(&scratch);
                offsets.push(cells.len() as u32);
            }
        }
        Self {
            bins,
            actions,
            offsets,
            cells,
        }
    }

    #[inline]
    pub fn cells(&self, flight: FlightId, action: usize) -> &[u32] {
        let k = flight.index() * self.actions + action;
        &self.cells[self.offsets[k] as usize..self.offsets[k + 1] as usize]
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    #[inline]
    pub fn split(&self, cell: u32) -> (SectorId, usize) {
        let c = cell as usize;
        (SectorId((c / self.bins) as u32), c % self.bins)
    }
}

#[inline]
pub(crate) fn excess(count: u32, capacity: u32) -> u64 {
    count.saturating_sub(capacity) as u64
}

/// Occupancy counts per `(sector, bin)` and the overloads derived from them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadTable {
    bins: usize,
    capacity: Vec<u32>,
    occupancy: Vec<u32>,
    own: Vec<u32>,
    overload: Vec<u64>,
    total: u64,
}

impl LoadTable {
    pub fn from_footprint(scenario: &Scenario, footprint: &Footprint, profile: &ActionProfile) -> Self {
        let m = scenario.num_sectors();
        let bins = scenario.num_bins();
        let mut occupancy = vec![0u32; m * bins];
        let mut own = vec![0u32; m * bins];
        for flight in scenario.flights() {
            let owner = flight.owner.0 as usize;
            for &cell in footprint.cells(flight.id, profile.index(flight.id)) {
                occupancy[cell as usize] += 1;
                if cell as usize / bins == owner {
                    own[cell as usize] += 1;
                }
            }
        }
        let capacity: Vec<u32> = scenario.sectors().iter().map(|s| s.capacity).collect();
        let overload: Vec<u64> = (0..m)
            .map(|s| {
                occupancy[s * bins..(s + 1) * bins]
                    .iter()
                    .map(|&c| excess(c, capacity[s]))
                    .sum()
            })
            .collect();
        let total = overload.iter().sum();
        Self {
            bins,
            capacity,
            occupancy,
            own,
            overload,
            total,
        }
    }

    pub fn num_sectors(&self) -> usize {
        self.capacity.len()
    }

    pub fn num_bins(&self) -> usize {
        self.bins
    }

    /// Occupancy series of one sector, one entry per bin.
    pub fn occupancy(&self, sector: SectorId) -> &[u32] {
        let s = sector.index();
        &self.occupancy[s * self.bins..(s + 1) * self.bins]
    }

    pub fn count(&self, sector: SectorId, bin: usize) -> u32 {
        self.occupancy[sector.index() * self.bins + bin]
    }

    /// Flights owned by `sector` present in its own cell `(sector, bin)`.
    pub fn own_count(&self, sector: SectorId, bin: usize) -> u32 {
        self.own[sector.index() * self.bins + bin]
    }

    /// `L_i`: summed per-bin excess of occupancy over capacity.
    pub fn overload(&self, sector: SectorId) -> u64 {
        self.overload[sector.index()]
    }

    pub fn per_sector_overload(&self) -> &[u64] {
        &self.overload
    }

    pub fn total_overload(&self) -> u64 {
        self.total
    }

    pub fn is_feasible(&self) -> bool {
        self.total == 0
    }

    /// `M_o`: sectors with positive overload.
    pub fn overloaded_sectors(&self) -> BTreeSet<SectorId> {
        self.overload
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 0)
            .map(|(s, _)| SectorId(s as u32))
            .collect()
    }

    /// `(sector, bin)` cells whose occupancy exceeds capacity.
    pub fn overloaded_resources(&self) -> BTreeSet<(SectorId, usize)> {
        self.occupancy
            .iter()
            .enumerate()
            .filter(|(c, &n)| n > self.capacity[c / self.bins])
            .map(|(c, _)| (SectorId((c / self.bins) as u32), c % self.bins))
            .collect()
    }

    /// Sum over overloaded cells of the owning sector's own contribution to
    /// that cell. With a single bin this is `Σ_{i ∈ M_o} C_ii`.
    pub fn own_contribution_on_overloaded(&self) -> u64 {
        self.occupancy
            .iter()
            .zip(&self.own)
            .enumerate()
            .filter(|(c, (&n, _))| n > self.capacity[c / self.bins])
            .map(|(_, (_, &o))| o as u64)
            .sum()
    }

    /// Re-times one flight in place. Bit-identical to recomputing from scratch.
    pub fn move_flight(
        &mut self,
        scenario: &Scenario,
        footprint: &Footprint,
        flight: FlightId,
        from: usize,
        to: usize,
    ) {
        if from == to {
            return;
        }
        let owner = scenario.flight(flight).owner.index();
        for &cell in footprint.cells(flight, from) {
            self.bump(cell as usize, owner, false);
        }
        for &cell in footprint.cells(flight, to) {
            self.bump(cell as usize, owner, true);
        }
    }

    fn bump(&mut self, cell: usize, owner: usize, add: bool) {
        let s = cell / self.bins;
        let cap = self.capacity[s];
        let before = excess(self.occupancy[cell], cap);
        if add {
            self.occupancy[cell] += 1;
        } else {
            self.occupancy[cell] -= 1;
        }
        if s == owner {
            if add {
                self.own[cell] += 1;
            } else {
                self.own[cell] -= 1;
            }
        }
        let after = excess(self.occupancy[cell], cap);
        self.overload[s] = self.overload[s] + after - before;
        self.total = self.total + after - before;
    }

    /// Delta path for a unilateral update: applies `after`'s delays for every
    /// flight of the deviating sector.
    pub fn apply_deviation(
        &mut self,
        scenario: &Scenario,
        footprint: &Footprint,
        before: &ActionProfile,
        after: &ActionProfile,
    ) -> Result<Option<SectorId>, ModelError> {
        let agent = before.deviator(scenario, after)?;
        if let Some(agent) = agent {
            for &f in scenario.flights_of(agent) {
                self.move_flight(scenario, footprint, f, before.index(f), after.index(f));
            }
        }
        Ok(agent)
    }
}

pub fn compute_loads(scenario: &Scenario, profile: &ActionProfile) -> Result<LoadTable, ModelError> {
    profile.validate(scenario)?;
    Ok(LoadTable::from_footprint(scenario, &Footprint::new(scenario), profile))
}

pub fn total_overload(loads: &LoadTable) -> u64 {
    loads.total_overload()
}

/// `C_ji`: aircraft-bins that flights owned by `from` spend in sector `to`.
pub fn contribution(
    scenario: &Scenario,
    profile: &ActionProfile,
    from: SectorId,
    to: SectorId,
) -> Result<u64, ModelError> {
    scenario.check_sector(from)?;
    scenario.check_sector(to)?;
    Ok(contribution_matrix(scenario, profile)?[from.index()][to.index()])
}

/// Full `C` matrix, indexed `[from][to]`.
pub fn contribution_matrix(scenario: &Scenario, profile: &ActionProfile) -> Result<Vec<Vec<u64>>, ModelError> {
    profile.validate(scenario)?;
    let footprint = Footprint::new(scenario);
    let m = scenario.num_sectors();
    let mut matrix = vec![vec![0u64; m]; m];
    for flight in scenario.flights() {
        let row = &mut matrix[flight.owner.index()];
        for &cell in footprint.cells(flight.id, profile.index(flight.id)) {
            row[footprint.split(cell).0.index()] += 1;
        }
    }
    Ok(matrix)
}

/// `M_f`: sectors feasible under `x` that become overloaded under `x_dev`.
pub fn new_overload_set(
    scenario: &Scenario,
    x: &ActionProfile,
    x_dev: &ActionProfile,
) -> Result<BTreeSet<SectorId>, ModelError> {
    x.deviator(scenario, x_dev)?;
    let footprint = Footprint::new(scenario);
    let before = LoadTable::from_footprint(scenario, &footprint, x);
    let after = LoadTable::from_footprint(scenario, &footprint, x_dev);
    Ok(newly_overloaded(&before, &after))
}

pub(crate) fn newly_overloaded(before: &LoadTable, after: &LoadTable) -> BTreeSet<SectorId> {
    before
        .per_sector_overload()
        .iter()
        .zip(after.per_sector_overload())
        .enumerate()
        .filter(|(_, (&b, &a))| b == 0 && a > 0)
        .map(|(s, _)| SectorId(s as u32))
        .collect()
}
