use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use walkless::io::{lattice_to_csv, trace_to_json};
use walkless::linalg::hadamard2;
use walkless::random::random_allowed_state;
use walkless::{
    build_coin_set, run, Axis, CoinSpec, Graph, LatticeConfig, LatticeState, Mode, NoiseModel,
    StateSpace, WalkRun,
};

fn grover_walk(n: usize, steps: usize) -> WalkRun {
    let g = Graph::complete(n);
    let coins = build_coin_set(&g, &CoinSpec::default()).unwrap();
    let initial = random_allowed_state(&g, &mut ChaCha8Rng::seed_from_u64(17));
    WalkRun::new(g, coins, initial, steps, Mode::Lattice)
}

#[test]
fn traced_protocol_has_five_snapshots_and_reports_angle() {
    let cfg = LatticeConfig::new(4, 3).unwrap();
    let mut ls = LatticeState::load(&StateSpace::localized(4, 2, 1).unwrap(), &cfg);
    let t = ls
        .pair_interact_traced(Axis::Row, 2, 1, 3, &hadamard2())
        .unwrap();
    assert_eq!(t.steps.len(), 5);
    // shift of 2 key sites at spacing 3
    let want = 2.0 * std::f64::consts::PI * 6.0 / 785.0;
    assert!((t.theta - want).abs() < 1e-15);
    // visitor sits in |1> after the flip, and lands on the host after transport
    assert!(t.steps[0].spin_one_population() > 0.99);
    assert!((t.steps[1].amplitude(3, 6, 1).unwrap().norm() - 1.0).abs() < 1e-15);
    assert!(t.steps[4].spin_one_population() == 0.0);

    let json: serde_json::Value = serde_json::from_str(&trace_to_json(&t)).unwrap();
    assert_eq!(json["steps"].as_array().unwrap().len(), 5);
    let csv = lattice_to_csv(&ls);
    assert_eq!(csv.lines().next(), Some("x,y,spin,re,im"));
    assert_eq!(csv.lines().count(), 1 + 2 * cfg.extent() * cfg.extent());
}

#[test]
fn flip_over_rotation_perturbs_but_conserves() {
    let clean = grover_walk(4, 6);
    let mut noisy = clean.clone();
    noisy.noise = NoiseModel {
        rotation_error: 0.02,
        transport_leakage: 0.0,
    };
    let a = run(&clean).unwrap();
    let b = run(&noisy).unwrap();
    let dev = a.distributions[6].max_deviation(&b.distributions[6]);
    assert!(dev > 1e-6, "noise had no effect: {dev:e}");
    // stray amplitude can only be lost, never created
    for d in &b.distributions {
        assert!(d.total() <= 1.0 + 1e-12 && d.total() > 0.9);
    }
}

#[test]
fn transport_leakage_strays_into_buffer_sites() {
    let mut noisy = grover_walk(4, 2);
    noisy.noise = NoiseModel {
        rotation_error: 0.0,
        transport_leakage: 1e-3,
    };
    let out = run(&noisy).unwrap();
    let h = out.lattice_hygiene.unwrap();
    assert!(h.max_intermediate > 1e-6);
    let clean = run(&grover_walk(4, 2)).unwrap();
    assert!(out.distributions[2].max_deviation(&clean.distributions[2]) > 1e-6);
}

#[test]
fn spacing_one_has_no_intermediate_sites() {
    for spacing in [1, 2, 3] {
        let out = run(&grover_walk(4, 4).with_spacing(spacing)).unwrap();
        let h = out.lattice_hygiene.unwrap();
        assert_eq!(h.max_spin_one, 0.0);
        assert_eq!(h.max_intermediate, 0.0);
    }
}
