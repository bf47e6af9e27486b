mod common;

use common::{q, ratio, Ref};
use decongest_core::oracle::{battery, check_load_agreement};
use decongest_core::scenario::{
    from_json_str, generate, load, preset, read_flights_csv, save, tiny, to_json_string, write_flights_csv, Airspace,
    PresetOverrides, TinyMode,
};
use decongest_core::{
    compute_loads, contribution_matrix, cost, deviation_delta, potential, ActionProfile, Footprint, Kappa, LoadTable,
    Scenario, SectorId,
};
use proptest::prelude::*;

fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mode(binned: bool) -> TinyMode {
    if binned {
        TinyMode::Binned
    } else {
        TinyMode::SingleWindow
    }
}

/// A tiny scenario, a profile, an agent and that agent's new actions.
fn tiny_case() -> impl Strategy<Value = (Scenario, Vec<usize>, usize, Vec<usize>)> {
    (any::<u64>(), any::<bool>()).prop_flat_map(|(seed, binned)| {
        let s = tiny(seed, mode(binned));
        let (n, m, p) = (s.num_flights(), s.num_sectors(), s.num_actions());
        (Just(s), prop::collection::vec(0..p, n), 0..m, prop::collection::vec(0..p, n))
    })
}

fn deviate(s: &Scenario, x: &[usize], agent: usize, fresh: &[usize]) -> Vec<usize> {
    let mut y = x.to_vec();
    for f in s.flights_of(SectorId(agent as u32)) {
        y[f.index()] = fresh[f.index()];
    }
    y
}

fn profile(s: &Scenario, x: &[usize]) -> ActionProfile {
    ActionProfile::from_indices(s, x.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn loads_match_reference((s, x, _, _) in tiny_case()) {
        let loads = compute_loads(&s, &profile(&s, &x)).unwrap();
        let r = Ref::new(&s);
        let c = r.counts(&x);
        for sec in 0..s.num_sectors() {
            let id = SectorId(sec as u32);
            prop_assert_eq!(loads.overload(id) as i64, c.l[sec]);
            for t in 0..s.num_bins() {
                prop_assert_eq!(loads.count(id, t) as i64, c.occ[sec][t]);
                prop_assert_eq!(loads.own_count(id, t) as i64, c.own[sec][t]);
            }
        }
    }

    #[test]
    fn incremental_update_matches_recount((s, x, agent, fresh) in tiny_case()) {
        let y = deviate(&s, &x, agent, &fresh);
        let (px, py) = (profile(&s, &x), profile(&s, &y));
        let fp = Footprint::new(&s);
        let mut table = LoadTable::from_footprint(&s, &fp, &px);
        table.apply_deviation(&s, &fp, &px, &py).unwrap();
        prop_assert_eq!(table, LoadTable::from_footprint(&s, &fp, &py));
    }

    #[test]
    fn other_rows_of_contribution_are_invariant((s, x, agent, fresh) in tiny_case()) {
        let y = deviate(&s, &x, agent, &fresh);
        let (cx, cy) = (contribution_matrix(&s, &profile(&s, &x)).unwrap(), contribution_matrix(&s, &profile(&s, &y)).unwrap());
        for j in (0..s.num_sectors()).filter(|&j| j != agent) {
            prop_assert_eq!(&cx[j], &cy[j]);
        }
    }

    #[test]
    fn kappa_one_delta_is_exact((s, x, agent, fresh) in tiny_case()) {
        let y = deviate(&s, &x, agent, &fresh);
        let d = deviation_delta(&s, &profile(&s, &x), &profile(&s, &y), SectorId(agent as u32), Kappa::ONE).unwrap();
        prop_assert!(d.is_exact_potential());
        let r = Ref::new(&s);
        let k = q(Kappa::ONE);
        prop_assert_eq!(d.delta_cost as i128, r.cost(&y, agent, k) - r.cost(&x, agent, k));
    }

    #[test]
    fn float_cost_and_potential_track_reference((s, x, agent, _) in tiny_case(), num in 0u64..=8) {
        let k = ratio(num, 8);
        let r = Ref::new(&s);
        let px = profile(&s, &x);
        let got_j = cost(&s, &px, SectorId(agent as u32), k).unwrap();
        prop_assert!((got_j * q(k).den as f64 - r.cost(&x, agent, q(k)) as f64).abs() < 1e-9);
        let got_phi = potential(&s, &px, k).unwrap();
        prop_assert!((got_phi * q(k).den as f64 - r.potential(&x, q(k)) as f64).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), binned in any::<bool>()) {
        let s = tiny(seed, mode(binned));
        prop_assert_eq!(from_json_str(&to_json_string(&s)).unwrap(), s);
    }

    #[test]
    fn generator_is_seed_deterministic(seed in 0u64..1000) {
        let a = preset("europe-like", seed, PresetOverrides { flights: Some(40), capacity: None }).unwrap();
        let b = preset("europe-like", seed, PresetOverrides { flights: Some(40), capacity: None }).unwrap();
        prop_assert_eq!(to_json_string(&a), to_json_string(&b));
    }
}

#[test]
fn crate_counter_agrees_with_its_tables() {
    for inst in [battery(TinyMode::SingleWindow, 0..30), battery(TinyMode::Binned, 0..30)] {
        let rep = check_load_agreement(&inst, ratio(1, 3));
        assert!(rep.passed, "{}", rep.summary());
    }
}

#[test]
fn csv_fixture_matches_json_fixture() {
    let json = load(fixture("three_flights.json")).unwrap();
    let doc = json.doc();
    let airspace = Airspace {
        sectors: doc.sectors.clone(),
        horizon: doc.horizon,
        bin_width: doc.bin_width,
        action_set: doc.action_set.clone(),
    };
    let csv = read_flights_csv(std::fs::File::open(fixture("three_flights.csv")).unwrap(), airspace.clone()).unwrap();
    assert_eq!(csv, json);

    let mut out = Vec::new();
    write_flights_csv(&json, &mut out).unwrap();
    assert_eq!(read_flights_csv(out.as_slice(), airspace).unwrap(), json);

    // Sector 1 holds two flights in bins 1 and 2 against capacity 1.
    let loads = compute_loads(&json, &ActionProfile::zeros(&json)).unwrap();
    assert_eq!(loads.per_sector_overload(), &[0, 2, 0]);
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let s = generate(&decongest_core::scenario::presets::brest_like_params(8, 3)).unwrap();
    save(&s, &path).unwrap();
    assert_eq!(load(&path).unwrap(), s);
}

#[test]
fn kappa_zero_fixture_breaks_the_sum_of_overloads() {
    let s = load(fixture("kappa_zero_counterexample.json")).unwrap();
    let before = compute_loads(&s, &profile(&s, &[0, 0])).unwrap();
    let after = compute_loads(&s, &profile(&s, &[1, 0])).unwrap();
    let agent = SectorId(1);
    assert_eq!(after.overload(agent), before.overload(agent));
    assert_eq!(before.total_overload() - after.total_overload(), 1);
}
