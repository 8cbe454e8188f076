use thiserror::Error;

use crate::coin::CoinError;
use crate::cost::CostError;
use crate::csd::CsdError;
use crate::graph::GraphError;
use crate::io::FormatError;
use crate::lattice::LatticeError;
use crate::state::StateError;
use crate::walk::WalkError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Coin(#[from] CoinError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Csd(#[from] CsdError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl Error {
    /// True when a numerical contract (unitarity, equivalence) was violated,
    /// as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        fn coin(e: &CoinError) -> bool {
            match e {
                CoinError::NotUnitary { .. } => true,
                CoinError::Nodes(f) => f.iter().any(|(_, e)| coin(e)),
                _ => false,
            }
        }
        match self {
            Error::Coin(e) => coin(e),
            Error::Walk(WalkError::EquivalenceViolation { .. }) => true,
            Error::Walk(WalkError::Coin(e)) => coin(e),
            Error::Walk(WalkError::Csd(CsdError::NotUnitary { .. })) => true,
            Error::Csd(CsdError::NotUnitary { .. }) => true,
            Error::Cost(CostError::FormulaMismatch(..)) => true,
            Error::Format(FormatError::Coin(e)) => coin(e),
            _ => false,
        }
    }
}
