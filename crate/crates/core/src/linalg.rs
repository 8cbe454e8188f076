//! Small dense complex helpers shared by the coin, compiler and lattice code.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type C2 = Matrix2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `max |(U^dagger U - I)_ab|`. Returns infinity for non-square input.
/// Singular value decomposition `m = u diag(s) v_t`, values descending.
pub fn svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (r, c) = m.shape();
    let a = faer::Mat::<faer::c64>::from_fn(r, c, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let d = a.svd().expect("svd converges");
    let (fu, fs, fv) = (d.U(), d.S().column_vector(), d.V());
    let k = fs.nrows();
    let u = CMatrix::from_fn(r, k, |i, j| {
        let z = fu[(i, j)];
        C64::new(z.re, z.im)
    });
    let s = (0..k).map(|i| fs[i].re).collect();
    let v_t = CMatrix::from_fn(k, c, |i, j| {
        let z = fv[(j, i)];
        C64::new(z.re, -z.im)
    });
    (u, s, v_t)
}

pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let gram = u.adjoint() * u;
    let n = u.nrows();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            let target = if a == b { ONE } else { ZERO };
            worst = worst.max((gram[(a, b)] - target).norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - b`. Shapes must match.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff2(a: &C2, b: &C2) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn is_identity2(u: &C2, tol: f64) -> bool {
    max_abs_diff2(u, &C2::identity()) <= tol
}

pub fn is_power_of_two(n: usize) -> bool {
    n >= 1 && n.is_power_of_two()
}

/// The real rotation `[[c, s], [-s, c]]` used by the cosine-sine factors.
pub fn cs_rotation(phi: f64) -> C2 {
    let (s, c) = phi.sin_cos();
    C2::new(
        C64::new(c, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(c, 0.0),
    )
}

pub fn pauli_x() -> C2 {
    C2::new(ZERO, ONE, ONE, ZERO)
}

pub fn hadamard2() -> C2 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    C2::new(h, h, h, -h)
}

/// Orthonormal basis of the column span of the orthonormal `basis`, chosen
/// canonically: at every step the standard basis vector with the largest
/// residual after projection (lowest index on ties) is orthogonalized and
/// kept. The result does not depend on which basis of the subspace was
/// supplied, only on the subspace itself (up to rounding).
///
/// Returns the new basis together with the pivot index of each column. Each
/// returned column has a real positive entry at its pivot.
pub fn canonical_basis(basis: &CMatrix) -> (CMatrix, Vec<usize>) {
    let n = basis.nrows();
    let m = basis.ncols();
    let mut out = CMatrix::zeros(n, m);
    let mut pivots = Vec::with_capacity(m);
    for col in 0..m {
        let mut best: Option<(usize, CVector, f64)> = None;
        for i in 0..n {
            if pivots.contains(&i) {
                continue;
            }
            // P e_i = basis * conj(row i of basis)
            let mut r = CVector::zeros(n);
            for c in 0..m {
                let w = basis[(i, c)].conj();
                for a in 0..n {
                    r[a] += basis[(a, c)] * w;
                }
            }
            orthogonalize_against(&mut r, &out, col);
            orthogonalize_against(&mut r, &out, col);
            let norm = r.norm();
            if best.as_ref().is_none_or(|(_, _, b)| norm > *b) {
                best = Some((i, r, norm));
            }
        }
        let (i, r, norm) = best.expect("subspace dimension exceeds ambient dimension");
        let mut v = r / C64::new(norm, 0.0);
        // pin the phase of the pivot entry
        let phase = v[i] / v[i].norm();
        v /= phase;
        out.set_column(col, &v);
        pivots.push(i);
    }
    (out, pivots)
}

/// Orthonormal completion: `n - k` columns spanning the orthogonal
/// complement of the first `k` (orthonormal) columns of `basis`, chosen by
/// the same pivoting rule as [`canonical_basis`].
pub fn canonical_completion(basis: &CMatrix, k: usize) -> (CMatrix, Vec<usize>) {
    let n = basis.nrows();
    let mut out = CMatrix::zeros(n, n - k);
    let mut pivots = Vec::with_capacity(n - k);
    let fixed = basis.columns(0, k).into_owned();
    for col in 0..(n - k) {
        let mut best: Option<(usize, CVector, f64)> = None;
        for i in 0..n {
            if pivots.contains(&i) {
                continue;
            }
            let mut r = CVector::zeros(n);
            r[i] = ONE;
            for _ in 0..2 {
                orthogonalize_against(&mut r, &fixed, k);
                orthogonalize_against(&mut r, &out, col);
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(_, _, b)| norm > *b) {
                best = Some((i, r, norm));
            }
        }
        let (i, r, norm) = best.expect("completion exceeds ambient dimension");
        let mut v = r / C64::new(norm, 0.0);
        let phase = v[i] / v[i].norm();
        v /= phase;
        out.set_column(col, &v);
        pivots.push(i);
    }
    (out, pivots)
}

fn orthogonalize_against(r: &mut CVector, cols: &CMatrix, count: usize) {
    for c in 0..count {
        let q = cols.column(c);
        let proj = q.dotc(r);
        for a in 0..r.len() {
            r[a] -= q[a] * proj;
        }
    }
}
