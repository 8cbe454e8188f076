//! Walk evolution in four modes.
//!
//! * `Explicit`: coin on every row, then the translation `|j,k> -> |k,j>`.
//! * `Walkless`: no translation; odd steps apply the coins along rows,
//!   even steps along columns.
//! * `Compiled`: as `Walkless`, with every coin executed through its
//!   pulse schedule.
//! * `Lattice`: as `Compiled`, executed on the optical-lattice model.
//!
//! After `n` steps the walkless state equals the explicit state for even `n`
//! and its transpose for odd `n`.

use thiserror::Error;

use crate::coin::{CoinError, CoinSet};
use crate::csd::{compile_coin_set, compiled_coin_apply, CompiledCoins, CsdError, Orientation};
use crate::graph::Graph;
use crate::lattice::{Axis, LatticeConfig, LatticeError, LatticeState, NoiseModel};
use crate::linalg::{CMatrix, C64};
use crate::state::{NodeDistribution, StateSpace};

/// Amplitude bound for states that must stay empty.
pub const ISOLATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("initial state has amplitude on isolated state(s) {}", fmt_states(.0))]
    InitialAmplitudeOnIsolatedState(Vec<(usize, usize)>),
    #[error("walkless and explicit runs differ by {deviation:.3e} at step {step}")]
    EquivalenceViolation { step: usize, deviation: f64 },
    #[error("coin schedule is empty")]
    EmptyCoinSchedule,
    #[error(transparent)]
    Coin(#[from] CoinError),
    #[error(transparent)]
    Csd(#[from] CsdError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn fmt_states(s: &[(usize, usize)]) -> String {
    s.iter()
        .map(|(j, k)| format!("|{j},{k}>"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Explicit,
    Walkless,
    Compiled,
    Lattice,
}

impl Mode {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "explicit" => Some(Self::Explicit),
            "walkless" => Some(Self::Walkless),
            "compiled" => Some(Self::Compiled),
            "lattice" => Some(Self::Lattice),
            _ => None,
        }
    }
}

/// Coins used at each step. `PerStep(sets)` uses `sets[(i - 1) % len]` at
/// step `i`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoinSchedule {
    Fixed(CoinSet),
    PerStep(Vec<CoinSet>),
}

impl CoinSchedule {
    fn sets(&self) -> &[CoinSet] {
        match self {
            Self::Fixed(c) => std::slice::from_ref(c),
            Self::PerStep(v) => v,
        }
    }

    fn index_for_step(&self, step: usize) -> usize {
        (step - 1) % self.sets().len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkRun {
    pub graph: Graph,
    pub coins: CoinSchedule,
    pub initial: StateSpace,
    pub n_steps: usize,
    pub mode: Mode,
    /// Keep a full state snapshot per step (memory `N^2 (n + 1)`).
    pub record_trajectory: bool,
    /// Key-site spacing for `Mode::Lattice`.
    pub spacing: usize,
    pub noise: NoiseModel,
}

impl WalkRun {
    pub fn new(
        graph: Graph,
        coins: CoinSet,
        initial: StateSpace,
        n_steps: usize,
        mode: Mode,
    ) -> Self {
        Self {
            graph,
            coins: CoinSchedule::Fixed(coins),
            initial,
            n_steps,
            mode,
            record_trajectory: false,
            spacing: 2,
            noise: NoiseModel::default(),
        }
    }

    pub fn with_mode(&self, mode: Mode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn with_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn with_spacing(mut self, spacing: usize) -> Self {
        self.spacing = spacing;
        self
    }
}

/// Worst |1> and intermediate-site populations seen between lattice stages.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LatticeHygiene {
    pub max_spin_one: f64,
    pub max_intermediate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub final_state: StateSpace,
    /// Node distributions for steps `0..=n_steps`.
    pub distributions: Vec<NodeDistribution>,
    /// State snapshots for steps `0..=n_steps` when requested.
    pub trajectory: Option<Vec<StateSpace>>,
    pub coin_applications: usize,
    pub transpositions: usize,
    pub lattice_hygiene: Option<LatticeHygiene>,
}

fn check_dims(s: &StateSpace, c: &CoinSet) -> Result<(), WalkError> {
    if s.dim() != c.dim() {
        return Err(WalkError::DimensionMismatch {
            expected: s.dim(),
            found: c.dim(),
        });
    }
    Ok(())
}

/// `row j <- c_j * row j` for every node `j`.
pub fn apply_coins_horizontal(s: &StateSpace, c: &CoinSet) -> Result<StateSpace, WalkError> {
    check_dims(s, c)?;
    let n = s.dim();
    let a = s.matrix();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let coin = &c.coins()[j];
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..n {
                acc += coin[(k, m)] * a[(j, m)];
            }
            out[(j, k)] = acc;
        }
    }
    Ok(StateSpace::from_matrix(out).expect("square"))
}

/// `column j <- c_j * column j` for every node `j`.
pub fn apply_coins_vertical(s: &StateSpace, c: &CoinSet) -> Result<StateSpace, WalkError> {
    check_dims(s, c)?;
    let n = s.dim();
    let a = s.matrix();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        let col = c.coins()[j].clone() * a.column(j);
        out.set_column(j, &col);
    }
    Ok(StateSpace::from_matrix(out).expect("square"))
}

/// Coin on every row followed by the translation.
pub fn step_explicit(s: &StateSpace, c: &CoinSet) -> Result<StateSpace, WalkError> {
    Ok(apply_coins_horizontal(s, c)?.transpose())
}

fn check_initial(walk: &WalkRun) -> Result<(), WalkError> {
    let n = walk.graph.n_nodes();
    if walk.initial.dim() != n {
        return Err(WalkError::DimensionMismatch {
            expected: n,
            found: walk.initial.dim(),
        });
    }
    if walk.coins.sets().is_empty() {
        return Err(WalkError::EmptyCoinSchedule);
    }
    for set in walk.coins.sets() {
        if set.dim() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: set.dim(),
            });
        }
        set.validate()?;
    }
    let offending: Vec<_> = walk
        .graph
        .isolated_states()
        .into_iter()
        .filter(|&(j, k)| walk.initial.amp(j, k).norm() > ISOLATION_TOL)
        .collect();
    if !offending.is_empty() {
        return Err(WalkError::InitialAmplitudeOnIsolatedState(offending));
    }
    Ok(())
}

fn orientation_for_step(step: usize) -> Orientation {
    if step % 2 == 1 {
        Orientation::Horizontal
    } else {
        Orientation::Vertical
    }
}

/// Evolves `walk.initial` for `walk.n_steps` steps in `walk.mode`.
pub fn run(walk: &WalkRun) -> Result<WalkOutcome, WalkError> {
    check_initial(walk)?;
    let mut recorder = Recorder::new(&walk.initial, walk.record_trajectory);
    let mut coin_applications = 0;
    let mut transpositions = 0;
    let mut hygiene = None;
    let sets = walk.coins.sets();

    let final_state = match walk.mode {
        Mode::Explicit | Mode::Walkless => {
            let mut s = walk.initial.clone();
            for step in 1..=walk.n_steps {
                let c = &sets[walk.coins.index_for_step(step)];
                s = if walk.mode == Mode::Explicit {
                    transpositions += 1;
                    step_explicit(&s, c)?
                } else {
                    match orientation_for_step(step) {
                        Orientation::Horizontal => apply_coins_horizontal(&s, c)?,
                        Orientation::Vertical => apply_coins_vertical(&s, c)?,
                    }
                };
                coin_applications += 1;
                recorder.push(&s);
            }
            s
        }
        Mode::Compiled => {
            let compiled = compile_all(sets)?;
            let mut s = walk.initial.clone();
            for step in 1..=walk.n_steps {
                let c = &compiled[walk.coins.index_for_step(step)];
                s = compiled_coin_apply(&s, c, orientation_for_step(step))?;
                coin_applications += 1;
                recorder.push(&s);
            }
            s
        }
        Mode::Lattice => {
            let compiled = compile_all(sets)?;
            let cfg = LatticeConfig::new(walk.graph.n_nodes(), walk.spacing)?;
            let mut lattice = LatticeState::load(&walk.initial, &cfg);
            lattice.set_noise(walk.noise);
            let mut h = LatticeHygiene::default();
            let mut s = walk.initial.clone();
            for step in 1..=walk.n_steps {
                let c = &compiled[walk.coins.index_for_step(step)];
                let axis = match orientation_for_step(step) {
                    Orientation::Horizontal => Axis::Row,
                    Orientation::Vertical => Axis::Column,
                };
                for stage in 0..c.stage_count() {
                    let lines: Vec<_> = c
                        .schedules
                        .iter()
                        .enumerate()
                        .map(|(j, sched)| (j + 1, &sched.stages[stage]))
                        .collect();
                    lattice.execute_stage(axis, &lines)?;
                    h.max_spin_one = h.max_spin_one.max(lattice.spin_one_population());
                    h.max_intermediate = h.max_intermediate.max(lattice.intermediate_population());
                }
                coin_applications += 1;
                let readout = lattice.read_out();
                s = readout.state;
                recorder.push_with_distribution(&s, readout.distribution);
            }
            hygiene = Some(h);
            s
        }
    };

    let (distributions, trajectory) = recorder.finish();
    Ok(WalkOutcome {
        final_state,
        distributions,
        trajectory,
        coin_applications,
        transpositions,
        lattice_hygiene: hygiene,
    })
}

fn compile_all(sets: &[CoinSet]) -> Result<Vec<CompiledCoins>, WalkError> {
    sets.iter()
        .map(|c| compile_coin_set(c).map_err(WalkError::from))
        .collect()
}

struct Recorder {
    distributions: Vec<NodeDistribution>,
    trajectory: Option<Vec<StateSpace>>,
}

impl Recorder {
    fn new(initial: &StateSpace, keep: bool) -> Self {
        Self {
            distributions: vec![initial.node_distribution()],
            trajectory: keep.then(|| vec![initial.clone()]),
        }
    }

    fn push(&mut self, s: &StateSpace) {
        self.push_with_distribution(s, s.node_distribution());
    }

    fn push_with_distribution(&mut self, s: &StateSpace, d: NodeDistribution) {
        self.distributions.push(d);
        if let Some(t) = &mut self.trajectory {
            t.push(s.clone());
        }
    }

    fn finish(self) -> (Vec<NodeDistribution>, Option<Vec<StateSpace>>) {
        (self.distributions, self.trajectory)
    }
}

/// Per-step deviation between walkless and explicit evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    /// `deviations[n]` compares the states after `n` steps.
    pub deviations: Vec<f64>,
}

impl EquivalenceReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs explicit and walkless evolution side by side; walkless must equal
/// explicit at even steps and its transpose at odd steps, within `tol`.
pub fn verify_equivalence(walk: &WalkRun, tol: f64) -> Result<EquivalenceReport, WalkError> {
    let explicit = run(&walk.with_mode(Mode::Explicit).with_trajectory())?;
    let walkless = run(&walk.with_mode(Mode::Walkless).with_trajectory())?;
    let e = explicit.trajectory.expect("recorded");
    let w = walkless.trajectory.expect("recorded");
    let mut deviations = Vec::with_capacity(e.len());
    for (step, (es, ws)) in e.iter().zip(&w).enumerate() {
        let deviation = if step % 2 == 0 {
            ws.max_deviation(es)
        } else {
            ws.max_deviation(&es.transpose())
        };
        if deviation.is_nan() || deviation > tol {
            return Err(WalkError::EquivalenceViolation { step, deviation });
        }
        deviations.push(deviation);
    }
    Ok(EquivalenceReport { deviations })
}
