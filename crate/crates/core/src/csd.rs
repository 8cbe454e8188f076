//! Recursive cosine-sine decomposition of coins into pairwise-rotation
//! stages.
//!
//! A unitary `u` of size `2h` splits as
//!
//! ```text
//!     [ l0    ] [  C  S ] [ r0    ]
//! u = [    l1 ] [ -S  C ] [    r1 ]
//! ```
//!
//! with `C = diag(cos phi)`, `S = diag(sin phi)`. The middle factor only
//! couples coordinate `r` with `r + h`. Recursing into the block-diagonal
//! outer factors, and merging sibling blocks level by level, turns an
//! `N x N` coin into exactly `N - 1` factors whose block sizes follow the
//! binary ruler `2, 4, 2, 8, 2, 4, 2, ...`. A factor with block size `d`
//! pairs coordinates at the fixed interval `d / 2`, so it can be executed as
//! one stage of simultaneous, disjoint two-level rotations.
//!
//! Factors are listed in application order: `factors[0]` acts first and
//! `u = factors[N-2] * ... * factors[0]`.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::coin::CoinSet;
use crate::linalg::{
    canonical_basis, canonical_completion, cs_rotation, is_identity2, is_power_of_two, svd,
    unitarity_deviation, CMatrix, CVector, C2, C64,
};
use crate::state::StateSpace;

/// Inputs must satisfy `max |u^dagger u - I| <= UNITARITY_TOL`.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Rotations this close to the identity are left out of emitted schedules.
pub const IDENTITY_DROP_TOL: f64 = 1e-12;
/// Singular values closer than this are treated as one degenerate cluster.
const CLUSTER_TOL: f64 = 1e-13;
/// Sines at or below this leave the corresponding column of `l1` free.
const NULL_SINE_TOL: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsdError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("dimension {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("matrix is not unitary: max |u^dagger u - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("block size {d} is invalid for dimension {n}")]
    BadBlockSize { d: usize, n: usize },
    #[error("stage {stage} uses index {index} in more than one rotation")]
    IndexCollision { stage: usize, index: usize },
    #[error("expected a vector of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Content of one factor.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind {
    /// `d = 2`: one arbitrary 2x2 unitary per consecutive pair.
    General2 { blocks: Vec<C2> },
    /// `d > 2`: for each block, the angles `phi_1 .. phi_{d/2}`; the pair
    /// `(r, r + d/2)` is rotated by `[[cos, sin], [-sin, cos]]`.
    CosineSine { angles: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsdFactor {
    pub d: usize,
    pub kind: FactorKind,
}

impl CsdFactor {
    /// The block-diagonal `n x n` matrix of this factor.
    pub fn materialize(&self, n: usize) -> Result<CMatrix, CsdError> {
        let d = self.d;
        if d < 2 || !is_power_of_two(d) || !n.is_multiple_of(d) {
            return Err(CsdError::BadBlockSize { d, n });
        }
        let n_blocks = n / d;
        let mut m = CMatrix::zeros(n, n);
        match &self.kind {
            FactorKind::General2 { blocks } => {
                if d != 2 || blocks.len() != n_blocks {
                    return Err(CsdError::BadBlockSize { d, n });
                }
                for (k, b) in blocks.iter().enumerate() {
                    m.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(b);
                }
            }
            FactorKind::CosineSine { angles } => {
                let half = d / 2;
                if angles.len() != n_blocks || angles.iter().any(|a| a.len() != half) {
                    return Err(CsdError::BadBlockSize { d, n });
                }
                for (k, phis) in angles.iter().enumerate() {
                    for (r, &phi) in phis.iter().enumerate() {
                        let (p, q) = (k * d + r, k * d + r + half);
                        let rot = cs_rotation(phi);
                        m[(p, p)] = rot[(0, 0)];
                        m[(p, q)] = rot[(0, 1)];
                        m[(q, p)] = rot[(1, 0)];
                        m[(q, q)] = rot[(1, 1)];
                    }
                }
            }
        }
        Ok(m)
    }

    /// The pairwise rotations realizing this factor, 1-based.
    fn rotations(&self) -> Vec<Rotation> {
        match &self.kind {
            FactorKind::General2 { blocks } => blocks
                .iter()
                .enumerate()
                .map(|(k, b)| Rotation {
                    p: 2 * k + 1,
                    q: 2 * k + 2,
                    u: *b,
                })
                .collect(),
            FactorKind::CosineSine { angles } => {
                let half = self.d / 2;
                angles
                    .iter()
                    .enumerate()
                    .flat_map(|(k, phis)| {
                        phis.iter().enumerate().map(move |(r, &phi)| Rotation {
                            p: k * self.d + r + 1,
                            q: k * self.d + r + half + 1,
                            u: cs_rotation(phi),
                        })
                    })
                    .collect()
            }
        }
    }
}

/// A coin as an ordered product of `N - 1` structured factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CsdProgram {
    pub n: usize,
    pub factors: Vec<CsdFactor>,
}

impl CsdProgram {
    pub fn d_sequence(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.d).collect()
    }

    /// `factors[last] * ... * factors[0]`.
    pub fn product(&self) -> CMatrix {
        let mut acc = CMatrix::identity(self.n, self.n);
        for f in &self.factors {
            acc = f
                .materialize(self.n)
                .expect("program factors are well formed")
                * acc;
        }
        acc
    }
}

/// One two-level rotation: `u` acts on the amplitude pair `(a_p, a_q)`.
/// Indices are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    pub p: usize,
    pub q: usize,
    pub u: C2,
}

/// Rotations that are activated simultaneously; every pair is `interval`
/// apart and no index appears twice.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub interval: usize,
    pub rotations: Vec<Rotation>,
}

impl Stage {
    fn check_disjoint(&self, n: usize, stage: usize) -> Result<(), CsdError> {
        let mut used = vec![false; n + 1];
        for r in &self.rotations {
            for idx in [r.p, r.q] {
                if idx == 0 || idx > n {
                    return Err(CsdError::LengthMismatch {
                        expected: n,
                        found: idx,
                    });
                }
                if std::mem::replace(&mut used[idx], true) {
                    return Err(CsdError::IndexCollision { stage, index: idx });
                }
            }
        }
        Ok(())
    }

    fn apply_unchecked(&self, v: &mut [C64]) {
        for r in &self.rotations {
            let (a, b) = (v[r.p - 1], v[r.q - 1]);
            v[r.p - 1] = r.u[(0, 0)] * a + r.u[(0, 1)] * b;
            v[r.q - 1] = r.u[(1, 0)] * a + r.u[(1, 1)] * b;
        }
    }
}

/// Executable form of one coin: one stage per factor, in application order.
/// Stages whose rotations were all dropped as identities stay in the list
/// (empty), so `stages.len()` is always the factor count.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub n: usize,
    pub stages: Vec<Stage>,
}

impl PulseSchedule {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn intervals(&self) -> Vec<usize> {
        self.stages.iter().map(|s| s.interval).collect()
    }

    pub fn rotation_count(&self) -> usize {
        self.stages.iter().map(|s| s.rotations.len()).sum()
    }

    /// Indices touched by a rotation whose off-diagonal entries exceed `tol`.
    pub fn coupled_indices(&self, tol: f64) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for r in self.stages.iter().flat_map(|s| &s.rotations) {
            if r.u[(0, 1)].norm() > tol || r.u[(1, 0)].norm() > tol {
                out.insert(r.p);
                out.insert(r.q);
            }
        }
        out
    }

    /// Checks every stage for collisions and out-of-range indices.
    pub fn validate(&self) -> Result<(), CsdError> {
        for (i, s) in self.stages.iter().enumerate() {
            s.check_disjoint(self.n, i)?;
        }
        Ok(())
    }

    /// Applies the schedule to `v` in place.
    pub fn apply_in_place(&self, v: &mut [C64]) -> Result<(), CsdError> {
        if v.len() != self.n {
            return Err(CsdError::LengthMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        for (i, s) in self.stages.iter().enumerate() {
            s.check_disjoint(self.n, i)?;
            s.apply_unchecked(v);
        }
        Ok(())
    }
}

struct CsSplit {
    l0: CMatrix,
    l1: CMatrix,
    r0: CMatrix,
    r1: CMatrix,
    angles: Vec<f64>,
}

/// Places canonical vectors on the positions named by their pivots when
/// possible, so that coordinates untouched by the input stay untouched.
fn align(positions: &[usize], pivots: &[usize]) -> Vec<usize> {
    let mut slot: Vec<Option<usize>> = vec![None; positions.len()];
    let mut leftover = Vec::new();
    for (v, &piv) in pivots.iter().enumerate() {
        match positions.iter().position(|&p| p == piv) {
            Some(at) if slot[at].is_none() => slot[at] = Some(v),
            _ => leftover.push(v),
        }
    }
    let mut leftover = leftover.into_iter();
    slot.into_iter()
        .map(|s| s.unwrap_or_else(|| leftover.next().expect("counts match")))
        .collect()
}

/// One cosine-sine split of a `2h x 2h` unitary.
fn cs_split(u: &CMatrix) -> CsSplit {
    let h = u.nrows() / 2;
    let u00 = u.view((0, 0), (h, h)).into_owned();
    let u01 = u.view((0, h), (h, h)).into_owned();
    let u10 = u.view((h, 0), (h, h)).into_owned();
    let u11 = u.view((h, h), (h, h)).into_owned();

    // u00 = l0 C r0. Singular vectors are grouped into clusters of equal
    // cosines; inside a cluster they are only fixed up to a unitary mixing, so
    // each cluster is replaced by the canonical basis of its left subspace.
    let (su, sv, sv_t) = svd(&u00);
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&a, &b| sv[a].total_cmp(&sv[b]));

    // (left column, right row, cosine, pivot) per canonical vector
    let mut cand = Vec::with_capacity(h);
    let mut start = 0;
    while start < h {
        let c0 = sv[order[start]];
        let mut end = start + 1;
        while end < h && sv[order[end]] - c0 <= CLUSTER_TOL {
            end += 1;
        }
        let members = &order[start..end];
        let mut x = CMatrix::zeros(h, members.len());
        let mut y = CMatrix::zeros(members.len(), h);
        for (col, &i) in members.iter().enumerate() {
            x.set_column(col, &su.column(i));
            y.set_row(col, &sv_t.row(i));
        }
        let (b, pivots) = canonical_basis(&x);
        let rows = (x.adjoint() * &b).adjoint() * y;
        for (v, &piv) in pivots.iter().enumerate() {
            let ci = sv[members[v]];
            cand.push((b.column(v).into_owned(), rows.row(v).into_owned(), ci, piv));
        }
        start = end;
    }

    // Each vector sits at the position of its pivot when that is free, so
    // coordinates untouched by the input stay untouched.
    let positions: Vec<usize> = (0..h).collect();
    let pivots: Vec<usize> = cand.iter().map(|v| v.3).collect();
    let assignment = align(&positions, &pivots);
    let mut c = vec![0.0; h];
    let mut l0 = CMatrix::zeros(h, h);
    let mut r0 = CMatrix::zeros(h, h);
    for (pos, &v) in assignment.iter().enumerate() {
        l0.set_column(pos, &cand[v].0);
        r0.set_row(pos, &cand[v].1);
        c[pos] = cand[v].2;
    }

    // -u10 r0^dagger = l1 S. The columns are orthogonal; QR in order of
    // descending sine keeps R diagonal even when some sines vanish.
    let z = -(&u10 * r0.adjoint());
    let mut by_sine: Vec<usize> = (0..h).collect();
    by_sine.sort_by(|&a, &b| c[a].total_cmp(&c[b]));
    let mut zp = CMatrix::zeros(h, h);
    for (col, &j) in by_sine.iter().enumerate() {
        zp.set_column(col, &z.column(j));
    }
    let qr = zp.qr();
    let qp = qr.q();
    let rr = qr.r();
    let mut l1 = CMatrix::zeros(h, h);
    let mut s = vec![0.0; h];
    let mut free = Vec::new();
    for (col, &j) in by_sine.iter().enumerate() {
        let d = rr[(col, col)];
        let mag = d.norm();
        if mag > NULL_SINE_TOL {
            l1.set_column(j, &(qp.column(col) * (d / mag)));
            s[j] = mag;
        } else {
            free.push(j);
        }
    }
    if !free.is_empty() {
        free.sort_unstable();
        let fixed: Vec<usize> = (0..h).filter(|j| !free.contains(j)).collect();
        let mut basis = CMatrix::zeros(h, fixed.len());
        for (col, &j) in fixed.iter().enumerate() {
            basis.set_column(col, &l1.column(j));
        }
        let (comp, pivots) = canonical_completion(&basis, fixed.len());
        let assignment = align(&free, &pivots);
        for (slot, &v) in assignment.iter().enumerate() {
            l1.set_column(free[slot], &comp.column(v));
        }
    }

    // r1 from whichever of u01 = l0 S r1, u11 = l1 C r1 is better conditioned
    let a = l0.adjoint() * &u01;
    let b = l1.adjoint() * &u11;
    let mut r1 = CMatrix::zeros(h, h);
    for i in 0..h {
        if s[i] > c[i] {
            r1.set_row(i, &(a.row(i) / C64::new(s[i], 0.0)));
        } else {
            r1.set_row(i, &(b.row(i) / C64::new(c[i], 0.0)));
        }
    }

    let angles = c.iter().zip(&s).map(|(&ci, &si)| si.atan2(ci)).collect();
    CsSplit {
        l0,
        l1,
        r0,
        r1,
        angles,
    }
}

fn decompose_blocks(blocks: Vec<CMatrix>, out: &mut Vec<CsdFactor>) {
    let m = blocks[0].nrows();
    if m == 2 {
        let blocks = blocks
            .iter()
            .map(|b| b.fixed_view::<2, 2>(0, 0).into_owned())
            .collect();
        out.push(CsdFactor {
            d: 2,
            kind: FactorKind::General2 { blocks },
        });
        return;
    }
    let mut lefts = Vec::with_capacity(2 * blocks.len());
    let mut rights = Vec::with_capacity(2 * blocks.len());
    let mut angles = Vec::with_capacity(blocks.len());
    for b in &blocks {
        let split = cs_split(b);
        lefts.push(split.l0);
        lefts.push(split.l1);
        rights.push(split.r0);
        rights.push(split.r1);
        angles.push(split.angles);
    }
    decompose_blocks(rights, out);
    out.push(CsdFactor {
        d: m,
        kind: FactorKind::CosineSine { angles },
    });
    decompose_blocks(lefts, out);
}

/// Factors an `N x N` unitary into `N - 1` cosine-sine factors.
pub fn csd_decompose(u: &CMatrix) -> Result<CsdProgram, CsdError> {
    if u.nrows() != u.ncols() {
        return Err(CsdError::NotSquare(u.nrows(), u.ncols()));
    }
    let n = u.nrows();
    if n < 2 || !is_power_of_two(n) {
        return Err(CsdError::NotPowerOfTwo(n));
    }
    let deviation = unitarity_deviation(u);
    if deviation > UNITARITY_TOL {
        return Err(CsdError::NotUnitary { deviation });
    }
    let mut factors = Vec::with_capacity(n - 1);
    decompose_blocks(vec![u.clone()], &mut factors);
    Ok(CsdProgram { n, factors })
}

/// One stage per factor; rotations within `IDENTITY_DROP_TOL` of the
/// identity are omitted.
pub fn emit_schedule(p: &CsdProgram) -> PulseSchedule {
    let stages = p
        .factors
        .iter()
        .map(|f| Stage {
            interval: f.d / 2,
            rotations: f
                .rotations()
                .into_iter()
                .filter(|r| !is_identity2(&r.u, IDENTITY_DROP_TOL))
                .collect(),
        })
        .collect();
    PulseSchedule { n: p.n, stages }
}

/// Runs a schedule on a copy of `v`.
pub fn execute_schedule(v: &CVector, s: &PulseSchedule) -> Result<CVector, CsdError> {
    let mut out = v.clone();
    s.apply_in_place(out.as_mut_slice())?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Coin `j` acts on row `j` (node `j`'s coin states).
    Horizontal,
    /// Coin `j` acts on column `j`.
    Vertical,
}

/// Decompositions and schedules for every coin of a set.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledCoins {
    pub programs: Vec<CsdProgram>,
    pub schedules: Vec<PulseSchedule>,
}

impl CompiledCoins {
    pub fn dim(&self) -> usize {
        self.schedules.len()
    }

    /// Stage count shared by every coin (`N - 1`).
    pub fn stage_count(&self) -> usize {
        self.schedules.first().map_or(0, |s| s.stage_count())
    }
}

pub fn compile_coin_set(coins: &CoinSet) -> Result<CompiledCoins, CsdError> {
    let programs = coins
        .coins()
        .iter()
        .map(csd_decompose)
        .collect::<Result<Vec<_>, _>>()?;
    let schedules = programs.iter().map(emit_schedule).collect();
    Ok(CompiledCoins {
        programs,
        schedules,
    })
}

/// Applies every coin through its schedule, row-wise or column-wise.
pub fn compiled_coin_apply(
    s: &StateSpace,
    compiled: &CompiledCoins,
    orientation: Orientation,
) -> Result<StateSpace, CsdError> {
    let n = s.dim();
    if compiled.dim() != n {
        return Err(CsdError::LengthMismatch {
            expected: n,
            found: compiled.dim(),
        });
    }
    let mut out = s.clone();
    let m = out.matrix_mut();
    let mut line = vec![C64::new(0.0, 0.0); n];
    for (j, sched) in compiled.schedules.iter().enumerate() {
        for (k, slot) in line.iter_mut().enumerate() {
            *slot = match orientation {
                Orientation::Horizontal => m[(j, k)],
                Orientation::Vertical => m[(k, j)],
            };
        }
        sched.apply_in_place(&mut line)?;
        for (k, &v) in line.iter().enumerate() {
            match orientation {
                Orientation::Horizontal => m[(j, k)] = v,
                Orientation::Vertical => m[(k, j)] = v,
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard2, max_abs_diff, pauli_x, ONE, ZERO};
    use crate::random::random_unitary;
    use rand::SeedableRng;

    fn ruler(n: usize) -> Vec<usize> {
        if n == 2 {
            return vec![2];
        }
        let half = ruler(n / 2);
        let mut out = half.clone();
        out.push(n);
        out.extend(half);
        out
    }

    #[test]
    fn hadamard_base_case() {
        let h = CMatrix::from_row_slice(2, 2, hadamard2().as_slice()).transpose();
        let p = csd_decompose(&h).unwrap();
        assert_eq!(p.factors.len(), 1);
        assert_eq!(p.factors[0].d, 2);
        match &p.factors[0].kind {
            FactorKind::General2 { blocks } => {
                assert!(crate::linalg::max_abs_diff2(&blocks[0], &hadamard2()) < 1e-16)
            }
            other => panic!("unexpected {other:?}"),
        }
        let s = emit_schedule(&p);
        assert_eq!(s.stage_count(), 1);
        assert_eq!(s.stages[0].interval, 1);
        assert_eq!(
            (s.stages[0].rotations[0].p, s.stages[0].rotations[0].q),
            (1, 2)
        );
        let out = execute_schedule(&CVector::from_vec(vec![ONE, ZERO]), &s).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out[0] - C64::new(a, 0.0)).norm() < 1e-16);
        assert!((out[1] - C64::new(a, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn identity_decomposes_into_identities() {
        for n in [4, 8] {
            let p = csd_decompose(&CMatrix::identity(n, n)).unwrap();
            assert_eq!(p.factors.len(), n - 1);
            for f in &p.factors {
                let m = f.materialize(n).unwrap();
                assert!(max_abs_diff(&m, &CMatrix::identity(n, n)) < 1e-15);
            }
            assert_eq!(emit_schedule(&p).rotation_count(), 0);
        }
    }

    #[test]
    fn random_reconstruction_and_ruler() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for n in [2, 4, 8, 16] {
            for _ in 0..20 {
                let u = random_unitary(n, &mut rng);
                let p = csd_decompose(&u).unwrap();
                assert_eq!(p.d_sequence(), ruler(n));
                assert!(max_abs_diff(&p.product(), &u) < 1e-10);
                for f in &p.factors {
                    assert!(unitarity_deviation(&f.materialize(n).unwrap()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn materialize_examples() {
        let f = CsdFactor {
            d: 4,
            kind: FactorKind::CosineSine {
                angles: vec![vec![0.0, 0.0]],
            },
        };
        assert_eq!(f.materialize(4).unwrap(), CMatrix::identity(4, 4));

        let pi2 = std::f64::consts::FRAC_PI_2;
        let f = CsdFactor {
            d: 4,
            kind: FactorKind::CosineSine {
                angles: vec![vec![pi2, pi2]],
            },
        };
        let m = f.materialize(4).unwrap();
        let v = CVector::from_iterator(4, (1..=4).map(|x| C64::new(x as f64, 0.0)));
        let out = m * v;
        let want = [3.0, 4.0, -1.0, -2.0];
        for (o, w) in out.iter().zip(want) {
            assert!((o - C64::new(w, 0.0)).norm() < 1e-15);
        }

        let f = CsdFactor {
            d: 2,
            kind: FactorKind::General2 {
                blocks: vec![hadamard2(), hadamard2()],
            },
        };
        let m = f.materialize(4).unwrap();
        let h = CMatrix::from_row_slice(2, 2, hadamard2().transpose().as_slice());
        let mut want = CMatrix::zeros(4, 4);
        want.view_mut((0, 0), (2, 2)).copy_from(&h);
        want.view_mut((2, 2), (2, 2)).copy_from(&h);
        assert!(max_abs_diff(&m, &want) < 1e-16);

        let bad = CsdFactor {
            d: 8,
            kind: FactorKind::CosineSine {
                angles: vec![vec![0.0; 4]],
            },
        };
        assert_eq!(
            bad.materialize(4),
            Err(CsdError::BadBlockSize { d: 8, n: 4 })
        );
    }

    #[test]
    fn schedule_intervals() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(12);
        let p4 = csd_decompose(&random_unitary(4, &mut rng)).unwrap();
        assert_eq!(emit_schedule(&p4).intervals(), vec![1, 2, 1]);
        let p8 = csd_decompose(&random_unitary(8, &mut rng)).unwrap();
        assert_eq!(emit_schedule(&p8).intervals(), vec![1, 2, 1, 4, 1, 2, 1]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            csd_decompose(&CMatrix::identity(3, 3)),
            Err(CsdError::NotPowerOfTwo(3))
        );
        assert_eq!(
            csd_decompose(&CMatrix::zeros(2, 4)),
            Err(CsdError::NotSquare(2, 4))
        );
        let mut m = CMatrix::identity(4, 4);
        m[(0, 1)] = ONE;
        assert!(matches!(
            csd_decompose(&m),
            Err(CsdError::NotUnitary { .. })
        ));
    }

    #[test]
    fn collisions_are_caught() {
        let s = PulseSchedule {
            n: 4,
            stages: vec![Stage {
                interval: 1,
                rotations: vec![
                    Rotation {
                        p: 1,
                        q: 2,
                        u: pauli_x(),
                    },
                    Rotation {
                        p: 2,
                        q: 3,
                        u: pauli_x(),
                    },
                ],
            }],
        };
        let v = CVector::from_element(4, ONE);
        assert_eq!(
            execute_schedule(&v, &s),
            Err(CsdError::IndexCollision { stage: 0, index: 2 })
        );
        let empty = PulseSchedule {
            n: 4,
            stages: vec![],
        };
        assert_eq!(execute_schedule(&v, &empty).unwrap(), v);
        assert!(matches!(
            execute_schedule(&CVector::from_element(3, ONE), &empty),
            Err(CsdError::LengthMismatch { .. })
        ));
    }
}
