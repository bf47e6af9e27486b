//! Scenario construction: synthetic generation, named presets and file I/O.

mod generate;
mod io;
pub mod presets;

pub use generate::{generate, generate_with_witness, peak_occupancy, Adjacency, CapacityRule, GenParams, Planting};
pub use io::{from_json_str, load, read_flights_csv, save, to_json_string, write_flights_csv, Airspace, FlightRow};
pub use presets::{preset, tiny, tiny_one, PresetOverrides, TinyMode, BREST_CAPACITY, BREST_STRESS_CAPACITY, PRESETS};
