//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Run with `cargo test -p walkless --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use walkless::cost::Fraction;
use walkless::io::distributions_to_csv;
use walkless::linalg::C2;
use walkless::random::{random_allowed_state, random_graph, random_state, random_unitary};
use walkless::{
    build_coin_set, cost_report, csd_decompose, emit_schedule, run, verify_equivalence, Axis,
    CoinFamily, CoinSpec, LatticeConfig, LatticeState, Mode, NodeDistribution, WalkOutcome,
    WalkRun,
};

const EQUIVALENCE_TOL: f64 = 1e-10;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const COMPILED_TOL: f64 = 1e-9;
const PROTOCOL_TOL: f64 = 1e-12;
const LATTICE_TOL: f64 = 1e-9;
const HYGIENE_TOL: f64 = 1e-12;
const ISOLATION_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;
const CSV_TOL: f64 = 1e-9;

const EQUIVALENCE_BUDGET: Duration = Duration::from_secs(60);
const DECOMPOSITION_BUDGET: Duration = Duration::from_secs(120);

struct Verdict {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Norms and CSV row sums seen by every other criterion.
#[derive(Default)]
struct Conservation {
    max_norm_dev: f64,
    max_csv_dev: f64,
    states: usize,
    csv_rows: usize,
}

impl Conservation {
    fn observe(&mut self, out: &WalkOutcome) {
        for s in out.trajectory.as_deref().unwrap_or(&[]) {
            self.max_norm_dev = self.max_norm_dev.max((s.norm() - 1.0).abs());
            self.states += 1;
        }
        self.max_norm_dev = self.max_norm_dev.max((out.final_state.norm() - 1.0).abs());
        self.observe_csv(&out.distributions);
    }

    /// Parses the exported CSV back and sums each step's probabilities.
    fn observe_csv(&mut self, d: &[NodeDistribution]) {
        let csv = distributions_to_csv(d);
        let mut sums = vec![0.0; d.len()];
        for line in csv.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let step: usize = f[0].parse().unwrap();
            sums[step] += f[2].parse::<f64>().unwrap();
        }
        for s in sums {
            self.max_csv_dev = self.max_csv_dev.max((s - 1.0).abs());
            self.csv_rows += 1;
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `d_i = 2 * (largest power of two dividing i)` for `i = 1..N-1`.
fn ruler(n: usize) -> Vec<usize> {
    (1..n).map(|i| 2 << (i as u32).trailing_zeros()).collect()
}

fn mode_equivalence(cons: &mut Conservation) -> Verdict {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut error = None;
    let mut walks = 0;
    for n in [2, 4, 8, 16] {
        let mut r = rng(1000 + n as u64);
        for _ in 0..50 {
            let g = random_graph(n, 0.3, &mut r);
            let coins = build_coin_set(&g, &CoinSpec::uniform(CoinFamily::Grover)).unwrap();
            let initial = random_allowed_state(&g, &mut r);
            let walk = WalkRun::new(g, coins, initial, 20, Mode::Explicit).with_trajectory();
            match verify_equivalence(&walk, f64::INFINITY) {
                Ok(rep) => worst = worst.max(rep.max_deviation()),
                Err(e) => error = Some(e.to_string()),
            }
            for mode in [Mode::Explicit, Mode::Walkless] {
                cons.observe(&run(&walk.with_mode(mode)).unwrap());
            }
            walks += 1;
        }
    }
    let elapsed = started.elapsed();
    Verdict {
        id: 1,
        name: "explicit and walkless evolution agree",
        pass: error.is_none() && worst <= EQUIVALENCE_TOL && elapsed <= EQUIVALENCE_BUDGET,
        detail: match error {
            Some(e) => e,
            None => format!(
                "{walks} walks x 20 steps, max deviation {worst:.2e} (tol {EQUIVALENCE_TOL:.0e}), {:.1}s (budget {}s)",
                elapsed.as_secs_f64(),
                EQUIVALENCE_BUDGET.as_secs()
            ),
        },
    }
}

fn factor_structure() -> (Verdict, Verdict) {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut bad_structure = Vec::new();
    let mut bad_stages = Vec::new();
    let mut fixtures = 0;
    let mut stages_checked = 0;
    for n in [2, 4, 8, 16] {
        let mut r = rng(2000 + n as u64);
        let want = ruler(n);
        for i in 0..1000 {
            let u = random_unitary(n, &mut r);
            let p = csd_decompose(&u).unwrap();
            fixtures += 1;
            if p.factors.len() != n - 1 || p.d_sequence() != want {
                bad_structure.push(format!("N={n} #{i}: d = {:?}", p.d_sequence()));
            }
            let dev = (p.product() - &u)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            worst = worst.max(dev);

            let s = emit_schedule(&p);
            if s.stage_count() != n - 1 {
                bad_stages.push(format!("N={n} #{i}: {} stages", s.stage_count()));
            }
            for (k, (stage, &d)) in s.stages.iter().zip(&want).enumerate() {
                stages_checked += 1;
                let mut used = std::collections::BTreeSet::new();
                let uniform = stage.interval == d / 2
                    && stage.rotations.iter().all(|rot| rot.q == rot.p + d / 2);
                let disjoint = stage
                    .rotations
                    .iter()
                    .all(|rot| used.insert(rot.p) && used.insert(rot.q));
                let in_range = used.iter().all(|&x| (1..=n).contains(&x));
                if !(uniform && disjoint && in_range) {
                    bad_stages.push(format!("N={n} #{i} stage {}", k + 1));
                }
            }
        }
    }
    let elapsed = started.elapsed();
    let structure = Verdict {
        id: 2,
        name: "N-1 factors in ruler order reconstruct the unitary",
        pass: bad_structure.is_empty()
            && worst <= RECONSTRUCTION_TOL
            && elapsed <= DECOMPOSITION_BUDGET,
        detail: format!(
            "{fixtures} unitaries, {} structural mismatches{}, max reconstruction error {worst:.2e} (tol {RECONSTRUCTION_TOL:.0e}), {:.1}s (budget {}s)",
            bad_structure.len(),
            bad_structure.first().map(|s| format!(" (first: {s})")).unwrap_or_default(),
            elapsed.as_secs_f64(),
            DECOMPOSITION_BUDGET.as_secs()
        ),
    };
    let pairing = Verdict {
        id: 3,
        name: "every stage pairs disjoint indices at one interval",
        pass: bad_stages.is_empty(),
        detail: format!(
            "{stages_checked} stages checked, {} violations{}",
            bad_stages.len(),
            bad_stages
                .first()
                .map(|s| format!(" (first: {s})"))
                .unwrap_or_default()
        ),
    };
    (structure, pairing)
}

fn compiled_equivalence(cons: &mut Conservation) -> Verdict {
    let mut worst = 0.0f64;
    let mut walks = 0;
    for n in [2, 4, 8] {
        let mut r = rng(4000 + n as u64);
        for _ in 0..20 {
            let g = random_graph(n, 0.3, &mut r);
            let coins = build_coin_set(&g, &CoinSpec::uniform(CoinFamily::Grover)).unwrap();
            let initial = random_allowed_state(&g, &mut r);
            let walk = WalkRun::new(g, coins, initial, 10, Mode::Walkless).with_trajectory();
            let a = run(&walk).unwrap();
            let b = run(&walk.with_mode(Mode::Compiled)).unwrap();
            worst = worst.max(a.final_state.max_deviation(&b.final_state));
            cons.observe(&a);
            cons.observe(&b);
            walks += 1;
        }
    }
    Verdict {
        id: 4,
        name: "compiled and walkless evolution agree",
        pass: worst <= COMPILED_TOL,
        detail: format!(
            "{walks} walks x 10 steps, max final deviation {worst:.2e} (tol {COMPILED_TOL:.0e})"
        ),
    }
}

fn lattice_protocol(cons: &mut Conservation) -> Verdict {
    // pair protocol against a direct 2x2 multiply
    let mut r = rng(5000);
    let mut proto = 0.0f64;
    for _ in 0..1000 {
        let n = if r.random::<bool>() { 2 } else { 4 };
        let spacing = r.random_range(1..=3);
        let cfg = LatticeConfig::new(n, spacing).unwrap();
        let s = random_state(n, &mut r);
        let u4 = random_unitary(2, &mut r);
        let u = C2::new(u4[(0, 0)], u4[(0, 1)], u4[(1, 0)], u4[(1, 1)]);
        let line = r.random_range(1..=n);
        let p = r.random_range(1..=n);
        let q = (p + r.random_range(1..n) - 1) % n + 1;
        let row = r.random::<bool>();
        let axis = if row { Axis::Row } else { Axis::Column };
        let mut ls = LatticeState::load(&s, &cfg);
        ls.pair_interact(axis, line, p, q, &u).unwrap();
        let at = |k: usize| if row { (line, k) } else { (k, line) };
        let (ap, aq) = (s.amp(at(p).0, at(p).1), s.amp(at(q).0, at(q).1));
        let mut want = s.clone();
        want.set_amp(at(p).0, at(p).1, u[(0, 0)] * ap + u[(0, 1)] * aq);
        want.set_amp(at(q).0, at(q).1, u[(1, 0)] * ap + u[(1, 1)] * aq);
        proto = proto.max(ls.read_out().state.max_deviation(&want));
    }

    // end to end against walkless
    let mut dist = 0.0f64;
    let mut spin_one = 0.0f64;
    let mut intermediate = 0.0f64;
    let mut walks = 0;
    for n in [2, 4] {
        for spacing in [1, 2, 3] {
            let mut r = rng(5100 + 10 * n as u64 + spacing as u64);
            for _ in 0..10 {
                let g = random_graph(n, 0.3, &mut r);
                let coins = build_coin_set(&g, &CoinSpec::uniform(CoinFamily::Grover)).unwrap();
                let initial = random_allowed_state(&g, &mut r);
                let walk = WalkRun::new(g, coins, initial, 10, Mode::Walkless)
                    .with_spacing(spacing)
                    .with_trajectory();
                let a = run(&walk).unwrap();
                let b = run(&walk.with_mode(Mode::Lattice)).unwrap();
                for (x, y) in a.distributions.iter().zip(&b.distributions) {
                    dist = dist.max(x.max_deviation(y));
                }
                let h = b.lattice_hygiene.expect("lattice run");
                spin_one = spin_one.max(h.max_spin_one);
                intermediate = intermediate.max(h.max_intermediate);
                cons.observe(&a);
                cons.observe(&b);
                walks += 1;
            }
        }
    }
    Verdict {
        id: 5,
        name: "lattice protocol reproduces the abstract rotations",
        pass: proto <= PROTOCOL_TOL
            && dist <= LATTICE_TOL
            && spin_one <= HYGIENE_TOL
            && intermediate <= HYGIENE_TOL,
        detail: format!(
            "1000 pair cases max {proto:.2e} (tol {PROTOCOL_TOL:.0e}); {walks} walks max distribution deviation {dist:.2e} (tol {LATTICE_TOL:.0e}); |1> population {spin_one:.2e}, intermediate {intermediate:.2e} (tol {HYGIENE_TOL:.0e})"
        ),
    }
}

fn isolation(cons: &mut Conservation) -> Verdict {
    let mut worst = 0.0f64;
    let mut min_removed = 1.0f64;
    let mut r = rng(6000);
    for i in 0..50 {
        let n = [2, 4, 8, 16][i % 4];
        let g = random_graph(n, 0.3, &mut r);
        let complete = n * (n + 1) / 2;
        min_removed = min_removed.min(1.0 - g.edge_count() as f64 / complete as f64);
        let isolated = g.isolated_states();
        let coins = build_coin_set(&g, &CoinSpec::uniform(CoinFamily::Grover)).unwrap();
        let initial = random_allowed_state(&g, &mut r);
        let walk = WalkRun::new(g, coins, initial, 50, Mode::Explicit).with_trajectory();
        for mode in [
            Mode::Explicit,
            Mode::Walkless,
            Mode::Compiled,
            Mode::Lattice,
        ] {
            let out = run(&walk.with_mode(mode)).unwrap();
            for s in out.trajectory.as_deref().unwrap() {
                worst = worst.max(s.max_modulus_on(&isolated));
            }
            cons.observe(&out);
        }
    }
    Verdict {
        id: 6,
        name: "removed states stay unpopulated",
        pass: worst <= ISOLATION_TOL && min_removed >= 0.3,
        detail: format!(
            "50 graphs (min {:.0}% edges removed) x 50 steps x 4 modes, max removed-state amplitude {worst:.2e} (tol {ISOLATION_TOL:.0e})",
            100.0 * min_removed
        ),
    }
}

fn stage_counts() -> Verdict {
    let mut problems = Vec::new();
    match cost_report(4, 1) {
        Ok(r) => {
            if r.walkless_stages_per_step != 3 {
                problems.push(format!("N=4 walkless {}", r.walkless_stages_per_step));
            }
            if r.circuit_stages_per_step != (Fraction { num: 128, den: 1 }) {
                problems.push(format!("N=4 circuit {:?}", r.circuit_stages_per_step));
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let mut n = 2usize;
    let mut checked = 0;
    while n <= 1024 {
        match cost_report(n, 1) {
            Ok(r) => {
                // 4^m / (m/2) with m = 2 log2 N, evaluated here independently
                let m = 2 * n.trailing_zeros() as u128;
                let want = Fraction::new(2 * 4u128.pow(m as u32), m);
                if r.circuit_stages_per_step != r.circuit_stages_per_step_alt
                    || r.circuit_stages_per_step != want
                    || r.walkless_stages_per_step != (n - 1) as u64
                {
                    problems.push(format!("N={n}"));
                }
            }
            Err(e) => problems.push(format!("N={n}: {e}")),
        }
        checked += 1;
        n *= 2;
    }
    Verdict {
        id: 7,
        name: "stage-count formulas",
        pass: problems.is_empty(),
        detail: format!(
            "N=4: 3 vs 128; {checked} sizes up to 1024 checked, problems: {problems:?}"
        ),
    }
}

fn conservation(cons: &Conservation) -> Verdict {
    Verdict {
        id: 8,
        name: "norm and distribution conservation",
        pass: cons.max_norm_dev <= NORM_TOL && cons.max_csv_dev <= CSV_TOL && cons.states > 0,
        detail: format!(
            "{} states max |norm - 1| {:.2e} (tol {NORM_TOL:.0e}); {} CSV steps max |sum - 1| {:.2e} (tol {CSV_TOL:.0e})",
            cons.states, cons.max_norm_dev, cons.csv_rows, cons.max_csv_dev
        ),
    }
}

fn main() -> ExitCode {
    let mut cons = Conservation::default();
    let mut verdicts = vec![mode_equivalence(&mut cons)];
    let (structure, pairing) = factor_structure();
    verdicts.push(structure);
    verdicts.push(pairing);
    verdicts.push(compiled_equivalence(&mut cons));
    verdicts.push(lattice_protocol(&mut cons));
    verdicts.push(isolation(&mut cons));
    verdicts.push(stage_counts());
    verdicts.push(conservation(&cons));

    let mut failed = 0;
    for v in &verdicts {
        println!(
            "{} [{}] {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!(
        "{} of {} criteria passed",
        verdicts.len() - failed,
        verdicts.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
