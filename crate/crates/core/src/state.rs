//! The walker's `N x N` amplitude array.

use thiserror::Error;

use crate::graph::Graph;
use crate::linalg::{CMatrix, C64, ONE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("state |{j},{k}> is outside a {n}x{n} state space")]
    IndexOutOfRange { n: usize, j: usize, k: usize },
    #[error("graph has no edges, so no state is allowed")]
    EmptyGraph,
    #[error("amplitude array must be square and non-empty, got {0}x{1}")]
    NotSquare(usize, usize),
}

/// Amplitudes `A[j][k]` of `|j,k>`: row `j` is the node, column `k` the coin
/// state. Public indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    amps: CMatrix,
}

/// `probs[j] = sum_k |A[j][k]|^2`, indexed from 0 for node 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDistribution {
    pub probs: Vec<f64>,
}

impl NodeDistribution {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Largest absolute difference between two distributions of equal length.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        assert_eq!(self.probs.len(), other.probs.len());
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl StateSpace {
    pub fn zeros(n: usize) -> Self {
        Self {
            amps: CMatrix::zeros(n, n),
        }
    }

    pub fn from_matrix(amps: CMatrix) -> Result<Self, StateError> {
        if amps.nrows() != amps.ncols() || amps.nrows() == 0 {
            return Err(StateError::NotSquare(amps.nrows(), amps.ncols()));
        }
        Ok(Self { amps })
    }

    /// All amplitude on `|j,k>`.
    pub fn localized(n: usize, j: usize, k: usize) -> Result<Self, StateError> {
        if j == 0 || k == 0 || j > n || k > n {
            return Err(StateError::IndexOutOfRange { n, j, k });
        }
        let mut s = Self::zeros(n);
        s.amps[(j - 1, k - 1)] = ONE;
        Ok(s)
    }

    /// Equal amplitude `1/sqrt(M)` on each of the `M` states allowed by `g`.
    pub fn uniform(g: &Graph) -> Result<Self, StateError> {
        let allowed = g.allowed_states();
        if allowed.is_empty() {
            return Err(StateError::EmptyGraph);
        }
        let a = C64::new(1.0 / (allowed.len() as f64).sqrt(), 0.0);
        let mut s = Self::zeros(g.n_nodes());
        for (j, k) in allowed {
            s.amps[(j - 1, k - 1)] = a;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amps.nrows()
    }

    /// Amplitude of `|j,k>` (1-based).
    pub fn amp(&self, j: usize, k: usize) -> C64 {
        self.amps[(j - 1, k - 1)]
    }

    pub fn set_amp(&mut self, j: usize, k: usize, value: C64) {
        self.amps[(j - 1, k - 1)] = value;
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.amps
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut CMatrix {
        &mut self.amps
    }

    /// The translation `|j,k> -> |k,j>`.
    pub fn transpose(&self) -> Self {
        Self {
            amps: self.amps.transpose(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn node_distribution(&self) -> NodeDistribution {
        let n = self.dim();
        let probs = (0..n)
            .map(|j| (0..n).map(|k| self.amps[(j, k)].norm_sqr()).sum())
            .collect();
        NodeDistribution { probs }
    }

    /// Largest amplitude difference against another state of equal size.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        crate::linalg::max_abs_diff(&self.amps, &other.amps)
    }

    /// Largest modulus over the listed (1-based) states.
    pub fn max_modulus_on(&self, states: &[(usize, usize)]) -> f64 {
        states
            .iter()
            .map(|&(j, k)| self.amp(j, k).norm())
            .fold(0.0, f64::max)
    }
}
