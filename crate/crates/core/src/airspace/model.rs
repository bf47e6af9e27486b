use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Time in whole minutes.
pub type Minutes = u32;

/// Dense, 0-based sector index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SectorId(pub u32);

/// Dense, 0-based flight index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FlightId(pub u32);

impl SectorId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FlightId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

impl fmt::Display for FlightId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.0)
    }
}

/// A flight's stay in one sector, as offsets from its (delayed) departure.
/// The stay covers the half-open interval `[entry, exit)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectorySegment {
    pub sector: SectorId,
    #[serde(rename = "entry")]
    pub entry_offset: Minutes,
    #[serde(rename = "exit")]
    pub exit_offset: Minutes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flight {
    pub id: FlightId,
    /// Sector controlling the departure; the only agent allowed to delay it.
    pub owner: SectorId,
    pub base_departure: Minutes,
    pub segments: Vec<TrajectorySegment>,
}

impl Flight {
    /// Offset of the last exit, i.e. the trajectory duration.
    pub fn duration(&self) -> Minutes {
        self.segments.iter().map(|s| s.exit_offset).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sector {
    pub id: SectorId,
    pub capacity: u32,
}

/// The on-disk scenario document. Deserializing it performs no validation;
/// [`Scenario::try_from`] does.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub sectors: Vec<Sector>,
    pub flights: Vec<Flight>,
    pub horizon: Minutes,
    pub bin_width: Minutes,
    pub action_set: Vec<Minutes>,
    /// Presence outside `[0, horizon)` is dropped instead of rejected.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub clip_at_horizon: bool,
}

/// Immutable, validated airspace world: sectors with capacities, flights with
/// rigid trajectories, a binned horizon and the shared delay menu.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioDoc", into = "ScenarioDoc")]
pub struct Scenario {
    doc: ScenarioDoc,
    owned: Vec<Vec<FlightId>>,
}

impl Scenario {
    pub fn new(
        sectors: Vec<Sector>,
        flights: Vec<Flight>,
        horizon: Minutes,
        bin_width: Minutes,
        action_set: Vec<Minutes>,
    ) -> Result<Self, ModelError> {
        Self::try_from(ScenarioDoc {
            sectors,
            flights,
            horizon,
            bin_width,
            action_set,
            clip_at_horizon: false,
        })
    }

    /// Builds a scenario whose presence is clipped to the horizon. Delays may
    /// then push a flight (partly) out of the observed window.
    pub fn new_clipped(
        sectors: Vec<Sector>,
        flights: Vec<Flight>,
        horizon: Minutes,
        bin_width: Minutes,
        action_set: Vec<Minutes>,
    ) -> Result<Self, ModelError> {
        Self::try_from(ScenarioDoc {
            sectors,
            flights,
            horizon,
            bin_width,
            action_set,
            clip_at_horizon: true,
        })
    }

    pub fn doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.doc.sectors
    }

    pub fn flights(&self) -> &[Flight] {
        &self.doc.flights
    }

    pub fn flight(&self, id: FlightId) -> &Flight {
        &self.doc.flights[id.index()]
    }

    pub fn num_sectors(&self) -> usize {
        self.doc.sectors.len()
    }

    pub fn num_flights(&self) -> usize {
        self.doc.flights.len()
    }

    pub fn sector_ids(&self) -> impl Iterator<Item = SectorId> + '_ {
        (0..self.doc.sectors.len() as u32).map(SectorId)
    }

    pub fn capacity(&self, sector: SectorId) -> u32 {
        self.doc.sectors[sector.index()].capacity
    }

    pub fn horizon(&self) -> Minutes {
        self.doc.horizon
    }

    pub fn bin_width(&self) -> Minutes {
        self.doc.bin_width
    }

    pub fn num_bins(&self) -> usize {
        (self.doc.horizon / self.doc.bin_width) as usize
    }

    pub fn action_set(&self) -> &[Minutes] {
        &self.doc.action_set
    }

    /// Number of delay options `p`.
    pub fn num_actions(&self) -> usize {
        self.doc.action_set.len()
    }

    pub fn max_delay(&self) -> Minutes {
        *self.doc.action_set.last().expect("validated non-empty")
    }

    pub fn is_single_window(&self) -> bool {
        self.doc.bin_width == self.doc.horizon
    }

    pub fn clip_at_horizon(&self) -> bool {
        self.doc.clip_at_horizon
    }

    /// Flights controlled by `sector`, ascending by id.
    pub fn flights_of(&self, sector: SectorId) -> &[FlightId] {
        &self.owned[sector.index()]
    }

    pub fn check_sector(&self, sector: SectorId) -> Result<(), ModelError> {
        if sector.index() < self.num_sectors() {
            Ok(())
        } else {
            Err(ModelError::UnknownSector(sector.0))
        }
    }

    /// Same world with every capacity replaced by `capacity`.
    pub fn with_uniform_capacity(&self, capacity: u32) -> Result<Self, ModelError> {
        let mut doc = self.doc.clone();
        for s in &mut doc.sectors {
            s.capacity = capacity;
        }
        Self::try_from(doc)
    }
}

impl From<Scenario> for ScenarioDoc {
    fn from(s: Scenario) -> Self {
        s.doc
    }
}

fn invalid(pointer: impl Into<String>, reason: impl Into<String>) -> ModelError {
    ModelError::Invalid {
        pointer: pointer.into(),
        reason: reason.into(),
    }
}

impl TryFrom<ScenarioDoc> for Scenario {
    type Error = ModelError;

    fn try_from(doc: ScenarioDoc) -> Result<Self, Self::Error> {
        if doc.sectors.is_empty() {
            return Err(invalid("/sectors", "at least one sector is required"));
        }
        for (k, s) in doc.sectors.iter().enumerate() {
            if s.id.index() != k {
                return Err(invalid(
                    format!("/sectors/{k}/id"),
                    format!("sector ids must be contiguous from 0, expected {k}, found {}", s.id.0),
                ));
            }
            if s.capacity == 0 {
                return Err(invalid(
                    format!("/sectors/{k}/capacity"),
                    "capacity must be a positive integer",
                ));
            }
        }
        if doc.horizon == 0 {
            return Err(invalid("/horizon", "horizon must be positive"));
        }
        if doc.bin_width == 0 || doc.horizon % doc.bin_width != 0 {
            return Err(invalid(
                "/bin_width",
                format!("bin width {} must be positive and divide the horizon {}", doc.bin_width, doc.horizon),
            ));
        }
        if doc.action_set.is_empty() || doc.action_set[0] != 0 {
            return Err(invalid("/action_set", "action set must start with the no-delay option 0"));
        }
        if let Some(k) = doc.action_set.windows(2).position(|w| w[0] >= w[1]) {
            return Err(invalid(
                format!("/action_set/{}", k + 1),
                "action set must be strictly increasing",
            ));
        }
        let max_delay = *doc.action_set.last().unwrap();
        let m = doc.sectors.len();
        let mut owned = vec![Vec::new(); m];
        for (k, f) in doc.flights.iter().enumerate() {
            if f.id.index() != k {
                return Err(invalid(
                    format!("/flights/{k}/id"),
                    format!("flight ids must be contiguous from 0, expected {k}, found {}", f.id.0),
                ));
            }
            if f.owner.index() >= m {
                return Err(invalid(format!("/flights/{k}/owner"), format!("unknown sector {}", f.owner.0)));
            }
            let mut prev_exit = 0;
            for (q, seg) in f.segments.iter().enumerate() {
                let at = format!("/flights/{k}/segments/{q}");
                if seg.sector.index() >= m {
                    return Err(invalid(format!("{at}/sector"), format!("unknown sector {}", seg.sector.0)));
                }
                if seg.exit_offset <= seg.entry_offset {
                    return Err(invalid(format!("{at}/exit"), "exit must be after entry"));
                }
                if q > 0 && seg.entry_offset < prev_exit {
                    return Err(invalid(
                        format!("{at}/entry"),
                        "segments must be sorted by entry and must not overlap",
                    ));
                }
                prev_exit = seg.exit_offset;
            }
            let latest = f.base_departure as u64 + f.duration() as u64 + max_delay as u64;
            if !doc.clip_at_horizon && latest > doc.horizon as u64 {
                return Err(invalid(
                    format!("/flights/{k}/base_departure"),
                    format!(
                        "presence ends at minute {latest} under the maximum delay, beyond the horizon {}",
                        doc.horizon
                    ),
                ));
            }
            owned[f.owner.index()].push(f.id);
        }
        Ok(Scenario { doc, owned })
    }
}

/// One delay choice (an index into the action set) per flight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionProfile {
    delay_index: Vec<usize>,
}

impl ActionProfile {
    /// The published schedule: no flight delayed.
    pub fn zeros(scenario: &Scenario) -> Self {
        Self {
            delay_index: vec![0; scenario.num_flights()],
        }
    }

    pub fn from_indices(scenario: &Scenario, delay_index: Vec<usize>) -> Result<Self, ModelError> {
        let profile = Self { delay_index };
        profile.validate(scenario)?;
        Ok(profile)
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<(), ModelError> {
        if self.delay_index.len() != scenario.num_flights() {
            return Err(ModelError::ShapeMismatch {
                expected: scenario.num_flights(),
                found: self.delay_index.len(),
            });
        }
        let p = scenario.num_actions();
        if let Some(f) = self.delay_index.iter().position(|&a| a >= p) {
            return Err(ModelError::ActionIndex {
                flight: f as u32,
                index: self.delay_index[f],
                options: p,
            });
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.delay_index
    }

    pub fn len(&self) -> usize {
        self.delay_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delay_index.is_empty()
    }

    pub fn index(&self, flight: FlightId) -> usize {
        self.delay_index[flight.index()]
    }

    pub fn delay(&self, scenario: &Scenario, flight: FlightId) -> Minutes {
        scenario.action_set()[self.index(flight)]
    }

    pub fn set(&mut self, flight: FlightId, index: usize) {
        self.delay_index[flight.index()] = index;
    }

    /// The sub-vector `x_i` of `agent`, ordered as [`Scenario::flights_of`].
    pub fn agent_actions(&self, scenario: &Scenario, agent: SectorId) -> Vec<usize> {
        scenario.flights_of(agent).iter().map(|f| self.index(*f)).collect()
    }

    /// Copy of this profile with `agent`'s flights set to `actions`.
    pub fn with_agent_actions(&self, scenario: &Scenario, agent: SectorId, actions: &[usize]) -> Self {
        let mut next = self.clone();
        for (f, &a) in scenario.flights_of(agent).iter().zip(actions) {
            next.set(*f, a);
        }
        next
    }

    /// The single sector whose flights differ between `self` and `other`.
    /// `Ok(None)` when the profiles are identical.
    pub fn deviator(&self, scenario: &Scenario, other: &ActionProfile) -> Result<Option<SectorId>, ModelError> {
        self.validate(scenario)?;
        other.validate(scenario)?;
        let mut movers: Vec<SectorId> = Vec::new();
        for (k, (a, b)) in self.delay_index.iter().zip(&other.delay_index).enumerate() {
            if a != b {
                let owner = scenario.flights()[k].owner;
                if !movers.contains(&owner) {
                    movers.push(owner);
                }
            }
        }
        match movers.len() {
            0 => Ok(None),
            1 => Ok(Some(movers[0])),
            _ => {
                movers.sort();
                Err(ModelError::NotUnilateral { sectors: movers })
            }
        }
    }
}
