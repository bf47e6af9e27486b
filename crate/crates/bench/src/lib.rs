//! Shared workloads for the benchmarks.

use decongest_core::scenario::{preset, PresetOverrides};
use decongest_core::{compute_loads, ActionProfile, Scenario, SectorId};

/// A preset scenario and its zero-delay profile.
pub fn workload(name: &str, flights: Option<usize>, seed: u64) -> (Scenario, ActionProfile) {
    let s = preset(name, seed, PresetOverrides { flights, capacity: None }).expect("preset builds");
    let x = ActionProfile::zeros(&s);
    (s, x)
}

/// Sector with the largest overload under `x`.
pub fn busiest(s: &Scenario, x: &ActionProfile) -> SectorId {
    let loads = compute_loads(s, x).expect("valid profile");
    s.sector_ids().max_by_key(|&id| loads.overload(id)).expect("at least one sector")
}
