use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;

use crate::airspace::{Flight, FlightId, Minutes, Scenario, ScenarioDoc, Sector, SectorId, TrajectorySegment};
use crate::error::{ModelError, ScenarioError};

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

fn lift(err: ModelError) -> ScenarioError {
    match err {
        ModelError::Invalid { pointer, reason } => ScenarioError::Parse { pointer, message: reason },
        other => ScenarioError::Model(other),
    }
}

/// Parses a scenario document. Both schema and model violations are
/// reported with the JSON pointer of the offending field.
pub fn from_json_str(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| ScenarioError::Parse {
        pointer: pointer(e.path()),
        message: e.inner().to_string(),
    })?;
    Scenario::try_from(doc).map_err(lift)
}

pub fn to_json_string(scenario: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(scenario).expect("scenario serialises");
    text.push('\n');
    text
}

pub fn load(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(&text)
}

pub fn save(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, to_json_string(scenario)).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row of the flat flight table: one segment per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightRow {
    pub flight_id: u32,
    pub owner_sector: u32,
    pub base_departure: Minutes,
    pub sector: u32,
    pub entry_offset: Minutes,
    pub exit_offset: Minutes,
}

/// Everything the flight table does not carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Airspace {
    pub sectors: Vec<Sector>,
    pub horizon: Minutes,
    pub bin_width: Minutes,
    pub action_set: Vec<Minutes>,
}

/// Builds a scenario from a CSV flight table with header
/// `flight_id,owner_sector,base_departure,sector,entry_offset,exit_offset`.
/// Rows of one flight may appear in any order; flight ids must be
/// contiguous from 0.
pub fn read_flights_csv(reader: impl Read, airspace: Airspace) -> Result<Scenario, ScenarioError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut flights: BTreeMap<u32, (usize, Flight)> = BTreeMap::new();
    for (k, record) in csv.deserialize::<FlightRow>().enumerate() {
        // Row numbers count the header as row 1.
        let row = k + 2;
        let r = record.map_err(|e| ScenarioError::Csv {
            row,
            message: e.to_string(),
        })?;
        let seg = TrajectorySegment {
            sector: SectorId(r.sector),
            entry_offset: r.entry_offset,
            exit_offset: r.exit_offset,
        };
        let (first_row, f) = flights.entry(r.flight_id).or_insert_with(|| {
            (
                row,
                Flight {
                    id: FlightId(r.flight_id),
                    owner: SectorId(r.owner_sector),
                    base_departure: r.base_departure,
                    segments: Vec::new(),
                },
            )
        });
        if f.owner.0 != r.owner_sector || f.base_departure != r.base_departure {
            return Err(ScenarioError::Csv {
                row,
                message: format!(
                    "flight {} disagrees with row {first_row} on owner_sector or base_departure",
                    r.flight_id
                ),
            });
        }
        f.segments.push(seg);
    }
    let flights: Vec<Flight> = flights
        .into_values()
        .map(|(_, mut f)| {
            f.segments.sort_by_key(|s| (s.entry_offset, s.exit_offset));
            f
        })
        .collect();
    Scenario::new(
        airspace.sectors,
        flights,
        airspace.horizon,
        airspace.bin_width,
        airspace.action_set,
    )
    .map_err(lift)
}

pub fn write_flights_csv(scenario: &Scenario, writer: impl Write) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(writer);
    for f in scenario.flights() {
        for s in &f.segments {
            out.serialize(FlightRow {
                flight_id: f.id.0,
                owner_sector: f.owner.0,
                base_departure: f.base_departure,
                sector: s.sector.0,
                entry_offset: s.entry_offset,
                exit_offset: s.exit_offset,
            })?;
        }
    }
    out.flush()?;
    Ok(())
}
