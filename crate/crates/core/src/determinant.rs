//! The coefficient matrix `M = (p_1, q_1, …, p_n, q_n)`, the normalizer `P`
//! and the determinant function `D = det(M)/P`.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Sign, Spinor};
use crate::polys::{build_direction_table, build_p, build_q, CPoly, DirectionTable};
use crate::C64;

/// Reports with a larger relative imaginary part are not trusted.
pub const REALITY_TOL: f64 = 1e-8;
/// Reports with a larger LU pivot ratio are not trusted.
pub const COND_LIMIT: f64 = 1e12;
/// Smallest admissible magnitude of a normalizer factor.
pub const NORMALIZER_FLOOR: f64 = 1e-13;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C64>(dim: usize, mut f: F) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let dim = cols.len();
        let mut m = Self::zeros(dim);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: col.len() });
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = *x;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[C64]) {
        for (i, x) in col.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, o.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, o.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, k: C64) -> CMatrix {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pivoting {
    #[default]
    Partial,
    /// Row and column pivoting; used to re-check suspicious results.
    Full,
}

/// Determinant together with the ratio of the largest to the smallest LU
/// pivot magnitude (infinite for a singular matrix).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuDeterminant {
    pub value: C64,
    pub cond_hint: f64,
}

pub fn det(m: &CMatrix) -> LuDeterminant {
    det_with(m, Pivoting::Partial)
}

pub fn det_with(m: &CMatrix, pivoting: Pivoting) -> LuDeterminant {
    let n = m.dim;
    if n == 0 {
        return LuDeterminant { value: C64::new(1.0, 0.0), cond_hint: 1.0 };
    }
    let mut a = m.clone();
    let mut value = C64::new(1.0, 0.0);
    let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
    for k in 0..n {
        let (pi, pj) = match pivoting {
            Pivoting::Partial => {
                let i = (k..n).max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm())).unwrap();
                (i, k)
            }
            Pivoting::Full => (k..n)
                .flat_map(|i| (k..n).map(move |j| (i, j)))
                .max_by(|&x, &y| a[x].norm().total_cmp(&a[y].norm()))
                .unwrap(),
        };
        if pi != k {
            for j in 0..n {
                a.data.swap(k * n + j, pi * n + j);
            }
            value = -value;
        }
        if pj != k {
            for i in 0..n {
                a.data.swap(i * n + k, i * n + pj);
            }
            value = -value;
        }
        let pivot = a[(k, k)];
        let mag = pivot.norm();
        pmax = pmax.max(mag);
        pmin = pmin.min(mag);
        if mag == 0.0 {
            return LuDeterminant { value: C64::new(0.0, 0.0), cond_hint: f64::INFINITY };
        }
        value *= pivot;
        for i in k + 1..n {
            let f = a[(i, k)] / pivot;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    LuDeterminant { value, cond_hint: pmax / pmin }
}

/// `det(a, b) = u_a v_b − v_a u_b`.
pub fn det2(a: &Spinor, b: &Spinor) -> C64 {
    a.u * b.v - a.v * b.u
}

/// `P = Π_r det(u⁻_r, u⁺_r) · Π_{r<s} (det(u⁻⁺_{rs}, u⁺⁻_{rs}) det(u⁻⁻_{rs}, u⁺⁺_{rs}))²`.
pub fn normalizer_p(tbl: &DirectionTable) -> Result<C64> {
    let n = tbl.n();
    let check = |f: C64| -> Result<C64> {
        let mag = f.norm();
        if mag < NORMALIZER_FLOOR || !mag.is_finite() {
            Err(Error::DegenerateNormalizer(mag))
        } else {
            Ok(f)
        }
    };
    let mut p = C64::new(1.0, 0.0);
    for r in 0..n {
        p *= check(det2(&tbl.u_minus(r), &tbl.u_plus(r)))?;
    }
    for r in 0..n {
        for s in r + 1..n {
            let a = check(det2(
                &tbl.lookup(r, s, Sign::Minus, Sign::Plus),
                &tbl.lookup(r, s, Sign::Plus, Sign::Minus),
            ))?;
            let b = check(det2(
                &tbl.lookup(r, s, Sign::Minus, Sign::Minus),
                &tbl.lookup(r, s, Sign::Plus, Sign::Plus),
            ))?;
            let ab = a * b;
            p *= ab * ab;
        }
    }
    Ok(p)
}

/// Column `2r` holds the coefficients of `p_r`, column `2r + 1` those of
/// `q_r` (0-based), rows ascending in the power of `t`.
pub fn assemble_m(ps: &[CPoly], qs: &[CPoly]) -> Result<CMatrix> {
    let n = ps.len();
    if qs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: qs.len() });
    }
    let mut cols = Vec::with_capacity(2 * n);
    for (p, q) in ps.iter().zip(qs) {
        for poly in [p, q] {
            if poly.coeffs().len() != 2 * n {
                return Err(Error::DimensionMismatch { expected: 2 * n, got: poly.coeffs().len() });
            }
            cols.push(poly.coeffs().to_vec());
        }
    }
    CMatrix::from_columns(&cols)
}

/// Outcome of evaluating `D` on one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminantReport {
    /// `Re(det(M)/P)`.
    pub d: f64,
    pub det_m: C64,
    pub p: C64,
    /// `|Im(det(M)/P)| / |det(M)/P|`
    pub im_residual: f64,
    pub cond_hint: f64,
    pub trusted: bool,
}

pub fn evaluate(c: &Configuration) -> Result<DeterminantReport> {
    evaluate_table(&build_direction_table(c)?, Pivoting::Partial)
}

/// Evaluates `D` from an explicit set of lifts; any nonzero lifts give the same value.
pub fn evaluate_table(tbl: &DirectionTable, pivoting: Pivoting) -> Result<DeterminantReport> {
    let n = tbl.n();
    let ps = (0..n).map(|r| build_p(r, tbl)).collect::<Result<Vec<_>>>()?;
    let qs = (0..n).map(|r| build_q(r, tbl)).collect::<Result<Vec<_>>>()?;
    let p = normalizer_p(tbl)?;
    let m = assemble_m(&ps, &qs)?;
    let lu = det_with(&m, pivoting);
    let ratio = lu.value / p;
    let im_residual = if ratio.norm() > 0.0 { ratio.im.abs() / ratio.norm() } else { f64::INFINITY };
    Ok(DeterminantReport {
        d: ratio.re,
        det_m: lu.value,
        p,
        im_residual,
        cond_hint: lu.cond_hint,
        trusted: im_residual < REALITY_TOL && lu.cond_hint < COND_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&CMatrix::identity(4)).value, c(1., 0.));
        let d = CMatrix::from_fn(4, |i, j| if i == j { c(i as f64 + 2.0, 0.) } else { c(0., 0.) });
        assert_eq!(det(&d).value, c(120., 0.));
        assert_eq!(det(&d).cond_hint, 2.5);
        let mut z = CMatrix::identity(3);
        z.set_column(1, &[c(0., 0.); 3]);
        assert_eq!(det(&z).value, c(0., 0.));
        assert!(det(&z).cond_hint.is_infinite());
    }

    #[test]
    fn pivoting_strategies_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for dim in [2, 5, 9] {
            let m = CMatrix::from_fn(dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let a = det_with(&m, Pivoting::Partial).value;
            let b = det_with(&m, Pivoting::Full).value;
            assert!((a - b).norm() < 1e-12 * a.norm());
        }
    }

    #[test]
    fn row_swap_flips_sign() {
        let m = CMatrix::from_fn(3, |i, j| c((i * 3 + j) as f64, (i + 2 * j) as f64 * 0.5 + 1.0));
        let mut swapped = m.clone();
        for j in 0..3 {
            let t = swapped[(0, j)];
            swapped[(0, j)] = swapped[(2, j)];
            swapped[(2, j)] = t;
        }
        assert!((det(&m).value + det(&swapped).value).norm() < 1e-12);
    }

    #[test]
    fn det2_examples() {
        let (one, zero) = (c(1., 0.), c(0., 0.));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(det2(&Spinor::new(one, zero), &Spinor::new(zero, one)), one);
        assert_eq!(det2(&Spinor::new(one, zero), &Spinor::new(one, zero)), zero);
        let d = det2(&Spinor::new(c(h, 0.), c(h, 0.)), &Spinor::new(c(h, 0.), c(-h, 0.)));
        assert!((d - c(-1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn polar_pair_factor() {
        use crate::geometry::{lift, Vec3};
        let up = lift(Vec3::new(0., 0., 1.)).unwrap();
        let down = lift(Vec3::new(0., 0., -1.)).unwrap();
        assert_eq!(det2(&up, &down), c(-1., 0.));
    }

    #[test]
    fn normalizer_scales_with_multiplicity() {
        let cfg = Configuration::from_arrays(&[[1., 0.2, 0.], [0.3, 1., -0.5]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        let base = normalizer_p(&tbl).unwrap();
        let lam = c(1.3, -0.4);

        let mut first = true;
        let scaled_single = tbl.map_spinors(|s| {
            if first {
                first = false;
                s.scale(lam)
            } else {
                s
            }
        });
        let ratio = normalizer_p(&scaled_single).unwrap() / base;
        assert!((ratio - lam).norm() < 1e-14);

        let target = tbl.lookup(0, 1, Sign::Plus, Sign::Plus);
        let scaled_pair = tbl.map_spinors(|s| if s == target { s.scale(lam) } else { s });
        let ratio = normalizer_p(&scaled_pair).unwrap() / base;
        assert!((ratio - lam * lam).norm() < 1e-14);
    }

    #[test]
    fn normalizer_rejects_degenerate_factor() {
        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [0., 1., 0.]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        let collapsed = tbl.map_spinors(|s| if s == tbl.u_plus(0) { tbl.u_minus(0) } else { s });
        assert!(matches!(normalizer_p(&collapsed), Err(Error::DegenerateNormalizer(_))));
    }

    #[test]
    fn random_phases_leave_d_unchanged() {
        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [0., 1., 0.]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let rephased = tbl.map_spinors(|s| s.scale(C64::from_polar(1.0, rng.random_range(0.0..6.3))));
        let a = evaluate_table(&tbl, Pivoting::Partial).unwrap();
        let b = evaluate_table(&rephased, Pivoting::Partial).unwrap();
        assert!((a.d - b.d).abs() < 1e-12 * a.d.abs());
        assert!((a.p - b.p).norm() > 1e-3, "phases should move P itself");
    }

    #[test]
    fn assembly_layout() {
        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [0.2, 0.9, 0.1], [-0.4, 0.3, 1.0]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        let ps: Vec<CPoly> = (0..3).map(|r| build_p(r, &tbl).unwrap()).collect();
        let qs: Vec<CPoly> = (0..3).map(|r| build_q(r, &tbl).unwrap()).collect();
        let m = assemble_m(&ps, &qs).unwrap();
        assert_eq!(m.column(2), ps[1].coeffs());
        assert_eq!(m.column(5), qs[2].coeffs());

        let mut swapped = ps.clone();
        swapped.swap(0, 2);
        let m2 = assemble_m(&swapped, &qs).unwrap();
        assert_eq!(m2.column(0), m.column(4));
        assert_eq!(m2.column(4), m.column(0));

        let mut zeroed = ps.clone();
        zeroed[1] = CPoly::zero(3);
        let mz = assemble_m(&zeroed, &qs).unwrap();
        assert_eq!(det(&mz).value, c(0., 0.));

        assert!(matches!(assemble_m(&ps[..2], &qs), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn n2_closed_form_values() {
        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [0., 1., 0.]]).unwrap();
        let rep = evaluate(&cfg).unwrap();
        assert!((rep.d - (3.0 + 2.0 * 2f64.sqrt()) / 4.0).abs() < 1e-12);
        assert!(rep.trusted);

        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [2., 0., 0.]]).unwrap();
        assert!((evaluate(&cfg).unwrap().d - 1.0).abs() < 1e-12);
    }
}
