//! Coined quantum random walks on arbitrary undirected graphs, evolved
//! without a translation operator.
//!
//! The walker lives in an `N x N` amplitude array whose rows are nodes and
//! whose columns are coin states. Swapping `|j,k> -> |k,j>` is a transpose of
//! that array, so instead of transposing after every coin flip the walk
//! alternates between applying the coins along rows and along columns.
//! Arbitrary graphs are embedded in the complete graph by masking the coins
//! so that states belonging to missing edges are never touched.
//!
//! Each coin can further be compiled into `N - 1` structured factors
//! ([`csd`]) whose action is a sequence of stages of simultaneous pairwise
//! rotations at a uniform index interval, which in turn can be executed on a
//! model of a two-dimensional optical lattice ([`lattice`]).

pub mod coin;
pub mod cost;
pub mod csd;
pub mod error;
pub mod graph;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod random;
pub mod state;
pub mod walk;

pub use coin::{build_coin_set, masked_coin, named_coin, CoinFamily, CoinSet, CoinSpec};
pub use cost::{cost_report, CostReport};
pub use csd::{
    compile_coin_set, compiled_coin_apply, csd_decompose, emit_schedule, execute_schedule,
    CompiledCoins, CsdFactor, CsdProgram, FactorKind, Orientation, PulseSchedule, Rotation, Stage,
};
pub use error::Error;
pub use graph::{parse_graph, CoinDirections, Graph};
pub use lattice::{
    Axis, LatticeConfig, LatticeReadout, LatticeState, NoiseModel, PairProtocolTrace,
};
pub use linalg::{CMatrix, CVector, C64};
pub use state::{NodeDistribution, StateSpace};
pub use walk::{
    apply_coins_horizontal, apply_coins_vertical, run, step_explicit, verify_equivalence,
    CoinSchedule, EquivalenceReport, Mode, WalkOutcome, WalkRun,
};
