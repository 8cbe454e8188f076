//! Coin operators and the masking that embeds an arbitrary graph into the
//! complete graph.
//!
//! For node `j` with neighbor set `S_j`, the masked coin acts as a
//! `|S_j|`-dimensional unitary on the coordinates in `S_j` and as the
//! identity everywhere else. Rows and columns of non-neighbors are therefore
//! zero apart from a 1 on the diagonal, and a state `|j,k>` with `k` not in
//! `S_j` never exchanges amplitude with the rest of the walk.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::{is_power_of_two, unitarity_deviation, CMatrix, C64, ONE};

/// Unitarity tolerance for coins, `max |c^dagger c - I|`.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoinError {
    #[error("{family} coin has no {dim}-dimensional form")]
    DimensionUnsupported { family: String, dim: usize },
    #[error("custom coin is {found}x{found} but node needs {expected}x{expected}")]
    CustomDimensionMismatch { expected: usize, found: usize },
    #[error("coin matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("coin is not unitary: max |c^dagger c - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("coin set for {expected} nodes has {found} coins of matching size")]
    CountMismatch { expected: usize, found: usize },
    #[error("node {0} does not exist")]
    NodeOutOfRange(usize),
    #[error("coin construction failed at {} node(s): {}", .0.len(), describe_failures(.0))]
    Nodes(Vec<(usize, CoinError)>),
}

fn describe_failures(f: &[(usize, CoinError)]) -> String {
    f.iter()
        .map(|(j, e)| format!("node {j}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoinFamily {
    Hadamard,
    Grover,
    Dft,
    Custom(CMatrix),
}

impl CoinFamily {
    /// Wraps an explicit matrix after checking it is square and unitary.
    pub fn custom(m: CMatrix) -> Result<Self, CoinError> {
        if m.nrows() != m.ncols() {
            return Err(CoinError::NotSquare(m.nrows(), m.ncols()));
        }
        let deviation = unitarity_deviation(&m);
        if deviation > UNITARITY_TOL {
            return Err(CoinError::NotUnitary { deviation });
        }
        Ok(Self::Custom(m))
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hadamard" => Some(Self::Hadamard),
            "grover" => Some(Self::Grover),
            "dft" => Some(Self::Dft),
            _ => None,
        }
    }
}

impl fmt::Display for CoinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hadamard => f.write_str("hadamard"),
            Self::Grover => f.write_str("grover"),
            Self::Dft => f.write_str("dft"),
            Self::Custom(m) => write!(f, "custom({}x{})", m.nrows(), m.ncols()),
        }
    }
}

/// Which coin each node uses. Nodes without an override use `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSpec {
    pub default: CoinFamily,
    pub overrides: BTreeMap<usize, CoinFamily>,
}

impl Default for CoinSpec {
    fn default() -> Self {
        Self::uniform(CoinFamily::Grover)
    }
}

impl CoinSpec {
    pub fn uniform(family: CoinFamily) -> Self {
        Self {
            default: family,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, node: usize, family: CoinFamily) -> Self {
        self.overrides.insert(node, family);
        self
    }

    pub fn family_for(&self, node: usize) -> &CoinFamily {
        self.overrides.get(&node).unwrap_or(&self.default)
    }
}

/// The `dim`-dimensional coin of a family.
///
/// * Hadamard: `m`-fold tensor power of `[[1, 1], [1, -1]] / sqrt(2)`,
///   `dim = 2^m` (the 1-dimensional case is `[1]`).
/// * Grover: `2/dim * J - I`.
/// * DFT: `w^(a b) / sqrt(dim)` with `w = exp(2 pi i / dim)`.
pub fn named_coin(family: &CoinFamily, dim: usize) -> Result<CMatrix, CoinError> {
    if dim == 0 {
        return Ok(CMatrix::identity(0, 0));
    }
    match family {
        CoinFamily::Hadamard => {
            if !is_power_of_two(dim) {
                return Err(CoinError::DimensionUnsupported {
                    family: family.to_string(),
                    dim,
                });
            }
            let h = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, -ONE])
                * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut out = CMatrix::identity(1, 1);
            while out.nrows() < dim {
                out = out.kronecker(&h);
            }
            Ok(out)
        }
        CoinFamily::Grover => {
            let off = C64::new(2.0 / dim as f64, 0.0);
            Ok(CMatrix::from_fn(dim, dim, |a, b| {
                if a == b {
                    off - ONE
                } else {
                    off
                }
            }))
        }
        CoinFamily::Dft => {
            let scale = 1.0 / (dim as f64).sqrt();
            Ok(CMatrix::from_fn(dim, dim, |a, b| {
                // reduce the exponent first to keep the phase accurate
                let e = (a * b) % dim;
                let phase = 2.0 * std::f64::consts::PI * e as f64 / dim as f64;
                C64::from_polar(scale, phase)
            }))
        }
        CoinFamily::Custom(m) => {
            if m.nrows() != dim {
                return Err(CoinError::CustomDimensionMismatch {
                    expected: dim,
                    found: m.nrows(),
                });
            }
            Ok(m.clone())
        }
    }
}

/// The coin of node `j`: the family's `|S_j|`-dimensional unitary embedded at
/// the neighbor coordinates, identity elsewhere.
pub fn masked_coin(g: &Graph, j: usize, family: &CoinFamily) -> Result<CMatrix, CoinError> {
    let n = g.n_nodes();
    let dirs = g
        .coin_directions(j)
        .map_err(|_| CoinError::NodeOutOfRange(j))?;
    let active = named_coin(family, dirs.allowed.len())?;
    let mut coin = CMatrix::identity(n, n);
    for (a, &ka) in dirs.allowed.iter().enumerate() {
        for (b, &kb) in dirs.allowed.iter().enumerate() {
            coin[(ka - 1, kb - 1)] = active[(a, b)];
        }
    }
    Ok(coin)
}

/// One coin per node, `coins[j - 1]` acting on row (or column) `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSet {
    coins: Vec<CMatrix>,
}

impl CoinSet {
    /// Checks shapes and unitarity of every coin.
    pub fn new(coins: Vec<CMatrix>) -> Result<Self, CoinError> {
        let set = Self { coins };
        set.validate()?;
        Ok(set)
    }

    /// No checks; used to model corrupted inputs.
    pub fn new_unchecked(coins: Vec<CMatrix>) -> Self {
        Self { coins }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            coins: vec![CMatrix::identity(n, n); n],
        }
    }

    pub fn validate(&self) -> Result<(), CoinError> {
        let n = self.coins.len();
        let mut failures = Vec::new();
        for (idx, c) in self.coins.iter().enumerate() {
            if c.nrows() != n || c.ncols() != n {
                return Err(CoinError::CountMismatch {
                    expected: c.nrows(),
                    found: n,
                });
            }
            let deviation = unitarity_deviation(c);
            if deviation > UNITARITY_TOL {
                failures.push((idx + 1, CoinError::NotUnitary { deviation }));
            }
        }
        if failures.is_empty() {
            Ok(())
        } else {
            Err(CoinError::Nodes(failures))
        }
    }

    pub fn dim(&self) -> usize {
        self.coins.len()
    }

    /// Coin of node `j` (1-based).
    pub fn coin(&self, j: usize) -> &CMatrix {
        &self.coins[j - 1]
    }

    pub fn coins(&self) -> &[CMatrix] {
        &self.coins
    }
}

/// Builds every node's masked coin, collecting failures per node.
pub fn build_coin_set(g: &Graph, spec: &CoinSpec) -> Result<CoinSet, CoinError> {
    let mut coins = Vec::with_capacity(g.n_nodes());
    let mut failures = Vec::new();
    for j in 1..=g.n_nodes() {
        match masked_coin(g, j, spec.family_for(j)) {
            Ok(c) => coins.push(c),
            Err(e) => failures.push((j, e)),
        }
    }
    if !failures.is_empty() {
        return Err(CoinError::Nodes(failures));
    }
    CoinSet::new(coins)
}
