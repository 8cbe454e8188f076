//! Seeded fixtures: Haar-random unitaries, random graphs and states.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::graph::Graph;
use crate::linalg::{CMatrix, C64};
use crate::state::StateSpace;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-distributed `n x n` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal moved into `Q`).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for a in 0..n {
            q[(a, c)] *= phase;
        }
    }
    q
}

/// Normalized `n x n` state with Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateSpace {
    let m = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let norm = m.norm();
    StateSpace::from_matrix(m / C64::new(norm, 0.0)).expect("square")
}

/// Normalized state supported only on the states allowed by `g`.
pub fn random_allowed_state<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> StateSpace {
    let n = g.n_nodes();
    let mut m = CMatrix::zeros(n, n);
    for (j, k) in g.allowed_states() {
        m[(j - 1, k - 1)] = gaussian(rng);
    }
    let norm = m.norm();
    StateSpace::from_matrix(m / C64::new(norm, 0.0)).expect("square")
}

/// Complete graph on `n` nodes with `ceil(removal_fraction * |E|)` edges
/// removed uniformly at random.
pub fn random_graph<R: Rng + ?Sized>(n: usize, removal_fraction: f64, rng: &mut R) -> Graph {
    let complete = Graph::complete(n);
    let mut edges: Vec<_> = complete.edges().collect();
    let remove = ((removal_fraction * edges.len() as f64).ceil() as usize).min(edges.len());
    edges.shuffle(rng);
    complete
        .without_edges(&edges[..remove])
        .expect("edges come from the graph")
}
