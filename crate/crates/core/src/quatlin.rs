//! Quaternionic linear algebra in the `2n × 2n` complex picture.
//!
//! A quaternionic `n × n` matrix with columns `a_r ∈ ℍⁿ` is represented by the
//! complex matrix with column pairs `(a_r, j a_r)`, where `j` is [`j_map`] on
//! coefficient vectors. The polar factor `A (A*A)^{-1/2}` of such a matrix
//! keeps the pairing, so it is a point of `Sp(n) ⊂ U(2n)`; modulo the
//! diagonal torus (phases `(e^{iθ}, e^{−iθ})` on each pair) it is a point
//! of the flag manifold.

use crate::determinant::{det, CMatrix};
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Sign, WeylElement};
use crate::polys::{build_direction_table, build_p, j_map, CPoly};
use crate::C64;

const JACOBI_MAX_SWEEPS: usize = 30;
const JACOBI_REL_THRESHOLD: f64 = 1e-13;
const HERMITIAN_TOL: f64 = 1e-10;
const PD_RATIO: f64 = 1e-12;
/// `|det A|` floor for unit-column quaternionic matrices.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// Complex representation of the quaternionic matrix with columns `ps`.
pub fn quaternionize(ps: &[CPoly]) -> Result<CMatrix> {
    let n = ps.len();
    let mut cols = Vec::with_capacity(2 * n);
    for p in ps {
        if p.coeffs().len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: p.coeffs().len() });
        }
        cols.push(p.coeffs().to_vec());
        cols.push(j_map(p).coeffs().to_vec());
    }
    CMatrix::from_columns(&cols)
}

/// Eigenvalues and unitary eigenvectors (as columns) of a Hermitian matrix by
/// cyclic Jacobi rotations. Only the Hermitian part of `h` is used.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.dim();
    let mut a = CMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut q = CMatrix::identity(n);
    let threshold = JACOBI_REL_THRESHOLD * a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|ij| a[ij].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for r in p + 1..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), q)
}

/// One Jacobi rotation annihilating `a[p][r]`.
fn rotate(a: &mut CMatrix, q: &mut CMatrix, p: usize, r: usize) {
    let apr = a[(p, r)];
    let b = apr.norm();
    if b == 0.0 {
        return;
    }
    let e = apr / b;
    let tau = (a[(r, r)].re - a[(p, p)].re) / (2.0 * b);
    let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = a.dim();

    // A ← A·J with J_pp = c, J_pr = s, J_rp = −s·ē, J_rr = c·ē
    for i in 0..n {
        let (xp, xr) = (a[(i, p)], a[(i, r)]);
        a[(i, p)] = xp * c - xr * e.conj() * s;
        a[(i, r)] = xp * s + xr * e.conj() * c;
        let (yp, yr) = (q[(i, p)], q[(i, r)]);
        q[(i, p)] = yp * c - yr * e.conj() * s;
        q[(i, r)] = yp * s + yr * e.conj() * c;
    }
    // A ← J*·A
    for j in 0..n {
        let (xp, xr) = (a[(p, j)], a[(r, j)]);
        a[(p, j)] = xp * c - xr * e * s;
        a[(r, j)] = xp * s + xr * e * c;
    }
    a[(p, r)] = C64::new(0.0, 0.0);
    a[(r, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
}

/// `H^{−1/2}` for Hermitian positive-definite `H`.
pub fn hermitian_sqrt_inv(h: &CMatrix) -> Result<CMatrix> {
    let norm = h.frobenius_norm();
    let asym = h.sub(&h.adjoint()).frobenius_norm();
    if !(asym < HERMITIAN_TOL * norm) {
        return Err(Error::NotHermitian(if norm > 0.0 { asym / norm } else { f64::INFINITY }));
    }
    let (vals, q) = hermitian_eigen(h);
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > 0.0) || min <= PD_RATIO * max {
        return Err(Error::NotPositiveDefinite(min / max));
    }
    let n = h.dim();
    let scaled = CMatrix::from_fn(n, |i, j| q[(i, j)] / vals[j].sqrt());
    Ok(scaled.mul(&q.adjoint()))
}

/// The unitary polar factor `A (A*A)^{−1/2}`.
pub fn polar_factor(a: &CMatrix) -> Result<CMatrix> {
    let h = a.adjoint().mul(a);
    Ok(a.mul(&hermitian_sqrt_inv(&h)?))
}

/// A unitary `2n × 2n` matrix whose column pairs satisfy `c_{2r+1} = j c_{2r}`,
/// understood modulo the diagonal torus.
#[derive(Debug, Clone, PartialEq)]
pub struct FlagPoint {
    u: CMatrix,
}

impl FlagPoint {
    /// Wraps a matrix without checking the invariants; see the residual methods.
    pub fn from_matrix(u: CMatrix) -> Self {
        Self { u }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.u.dim() / 2
    }

    /// `‖U*U − I‖_F`
    pub fn unitarity_residual(&self) -> f64 {
        self.u.adjoint().mul(&self.u).sub(&CMatrix::identity(self.u.dim())).frobenius_norm()
    }

    /// Largest entry of `c_{2r+1} − j c_{2r}` over all pairs.
    pub fn pairing_residual(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|r| {
                let first = CPoly::from_coeffs(n, self.u.column(2 * r)).expect("square matrix");
                let partner = self.u.column(2 * r + 1);
                j_map(&first)
                    .coeffs()
                    .iter()
                    .zip(&partner)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// The flag of a configuration: the polar factor of the quaternionic matrix
/// whose columns are the unit-normalized `p_r`.
///
/// Normalizing each `p_r` makes the matrices of Weyl-related configurations
/// differ by a unitary right factor, which the polar factor carries through.
pub fn polar_flag(c: &Configuration) -> Result<FlagPoint> {
    let tbl = build_direction_table(c)?;
    let ps = (0..c.n())
        .map(|r| {
            let p = build_p(r, &tbl)?;
            Ok(p.scale(C64::new(1.0 / p.norm(), 0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let a = quaternionize(&ps)?;
    let ratio = det(&a).value.norm();
    if !(ratio >= SINGULAR_FLOOR) {
        return Err(Error::SingularConfiguration { ratio, points: c.to_arrays() });
    }
    Ok(FlagPoint { u: polar_factor(&a)? })
}

/// Largest column residual after the best per-pair torus phase (estimated
/// from the largest entry of `F`'s first column in each pair).
pub fn flag_distance(f: &FlagPoint, g: &FlagPoint) -> f64 {
    if f.u.dim() != g.u.dim() {
        return f64::INFINITY;
    }
    let dim = f.u.dim();
    let mut worst = 0.0f64;
    for r in 0..dim / 2 {
        let (a, b) = (2 * r, 2 * r + 1);
        let k = (0..dim).max_by(|&x, &y| f.u[(x, a)].norm().total_cmp(&f.u[(y, a)].norm())).unwrap();
        let ratio = g.u[(k, a)] / f.u[(k, a)];
        if !(ratio.norm() > 0.0 && ratio.norm().is_finite()) {
            return f64::INFINITY;
        }
        let phase = ratio / ratio.norm();
        for i in 0..dim {
            worst = worst
                .max((g.u[(i, a)] - phase * f.u[(i, a)]).norm())
                .max((g.u[(i, b)] - phase.conj() * f.u[(i, b)]).norm());
        }
    }
    worst
}

/// Equality in `Sp(n)/Tⁿ` up to `tol`.
pub fn flag_equal(f: &FlagPoint, g: &FlagPoint, tol: f64) -> bool {
    flag_distance(f, g) <= tol
}

/// A sign flip at `r` sends the pair `(c, jc)` to `(jc, −c)`; the permutation
/// then moves pair `r` to position `perm[r]`.
pub fn weyl_act_flag(w: &WeylElement, f: &FlagPoint) -> FlagPoint {
    let n = f.n();
    assert_eq!(w.n(), n, "Weyl element and flag sizes differ");
    let mut u = CMatrix::zeros(2 * n);
    for r in 0..n {
        let c = f.u.column(2 * r);
        let jc = f.u.column(2 * r + 1);
        let (first, second) = match w.signs()[r] {
            Sign::Plus => (c, jc),
            Sign::Minus => (jc, c.iter().map(|x| -x).collect()),
        };
        let k = w.perm()[r];
        u.set_column(2 * k, &first);
        u.set_column(2 * k + 1, &second);
    }
    FlagPoint { u }
}
