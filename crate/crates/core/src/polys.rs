//! Polynomials of degree `≤ 2n − 1` as `2n` ascending coefficients, the
//! antilinear structure `j`, and the products of linear factors `p_r`, `q_r`.

use crate::error::{Error, Result};
use crate::geometry::{lift, Configuration, Sign, Spinor, Vec3};
use crate::C64;

/// A complex polynomial stored as exactly `2n` coefficients, `coeffs[k]`
/// multiplying `t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<C64>,
}

impl CPoly {
    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0); 2 * n] }
    }

    pub fn one(n: usize) -> Self {
        let mut p = Self::zero(n);
        p.coeffs[0] = C64::new(1.0, 0.0);
        p
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, got: coeffs.len() });
        }
        Ok(Self { coeffs })
    }

    /// Half the storage length.
    pub fn n(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != C64::new(0.0, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c)
    }
}

/// `u·t − v` in the `2n`-coefficient space.
pub fn linear_factor(s: &Spinor, n: usize) -> CPoly {
    let mut p = CPoly::zero(n);
    p.coeffs[0] = -s.v;
    p.coeffs[1] = s.u;
    p
}

/// Convolution of coefficient lists. Fails if the product would not fit
/// below degree `2n`.
pub fn poly_multiply(a: &CPoly, b: &CPoly) -> Result<CPoly> {
    if a.coeffs.len() != b.coeffs.len() {
        return Err(Error::DimensionMismatch { expected: a.coeffs.len(), got: b.coeffs.len() });
    }
    let len = a.coeffs.len();
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return Ok(CPoly { coeffs: vec![C64::new(0.0, 0.0); len] });
    };
    if da + db >= len {
        return Err(Error::DegreeOverflow { degree: da + db, bound: len - 1 });
    }
    let mut coeffs = vec![C64::new(0.0, 0.0); len];
    for (i, x) in a.coeffs[..=da].iter().enumerate() {
        for (k, y) in b.coeffs[..=db].iter().enumerate() {
            coeffs[i + k] += x * y;
        }
    }
    Ok(CPoly { coeffs })
}

/// The quaternionic structure: `a'_k = (−1)^{k+1}·conj(a_{2n−1−k})`.
pub fn j_map(p: &CPoly) -> CPoly {
    let len = p.coeffs.len();
    let coeffs = (0..len)
        .map(|k| {
            let c = p.coeffs[len - 1 - k].conj();
            if k % 2 == 0 {
                -c
            } else {
                c
            }
        })
        .collect();
    CPoly { coeffs }
}

/// Lifts of the four directions `±(x_r + x_s)`, `±(x_r − x_s)` for `r < s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLifts {
    /// `x_r + x_s`
    pub pp: Spinor,
    /// `−x_r − x_s`
    pub mm: Spinor,
    /// `x_r − x_s`
    pub pm: Spinor,
    /// `−x_r + x_s`
    pub mp: Spinor,
}

/// Spinor lifts of every direction `±x_r` and `±x_r ± x_s` of a configuration.
///
/// One spinor is stored per geometric direction, so the lift of
/// `σx_r + τx_s` is the same value whichever index order is queried.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionTable {
    n: usize,
    u_minus: Vec<Spinor>,
    u_plus: Vec<Spinor>,
    pairs: Vec<PairLifts>,
}

fn pair_index(n: usize, r: usize, s: usize) -> usize {
    debug_assert!(r < s && s < n);
    r * (2 * n - r - 1) / 2 + (s - r - 1)
}

fn lift_direction(d: Vec3) -> Result<Spinor> {
    lift(d.normalized())
}

pub fn build_direction_table(c: &Configuration) -> Result<DirectionTable> {
    let n = c.n();
    let x = c.points();
    let mut u_minus = Vec::with_capacity(n);
    let mut u_plus = Vec::with_capacity(n);
    for p in x {
        u_minus.push(lift_direction(-*p)?);
        u_plus.push(lift_direction(*p)?);
    }
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for r in 0..n {
        for s in r + 1..n {
            let sum = x[r] + x[s];
            let diff = x[r] - x[s];
            pairs.push(PairLifts {
                pp: lift_direction(sum)?,
                mm: lift_direction(-sum)?,
                pm: lift_direction(diff)?,
                mp: lift_direction(-diff)?,
            });
        }
    }
    Ok(DirectionTable { n, u_minus, u_plus, pairs })
}

impl DirectionTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Lift of `−x_r/‖x_r‖`.
    pub fn u_minus(&self, r: usize) -> Spinor {
        self.u_minus[r]
    }

    /// Lift of `x_r/‖x_r‖`.
    pub fn u_plus(&self, r: usize) -> Spinor {
        self.u_plus[r]
    }

    pub fn single(&self, r: usize, sign: Sign) -> Spinor {
        match sign {
            Sign::Plus => self.u_plus[r],
            Sign::Minus => self.u_minus[r],
        }
    }

    /// Lift of the normalized direction `σx_r + τx_s`, `r ≠ s`.
    pub fn lookup(&self, r: usize, s: usize, sigma: Sign, tau: Sign) -> Spinor {
        assert!(r != s, "pair lookup needs distinct indices");
        if r > s {
            return self.lookup(s, r, tau, sigma);
        }
        let pair = &self.pairs[pair_index(self.n, r, s)];
        match (sigma, tau) {
            (Sign::Plus, Sign::Plus) => pair.pp,
            (Sign::Minus, Sign::Minus) => pair.mm,
            (Sign::Plus, Sign::Minus) => pair.pm,
            (Sign::Minus, Sign::Plus) => pair.mp,
        }
    }

    /// Applies `f` to every stored spinor, in a fixed order (singles `−` then
    /// `+` by index, then pairs `pp, mm, pm, mp` by pair index). The result
    /// need not hold unit lifts; it exists for lift-independence checks.
    pub fn map_spinors<F: FnMut(Spinor) -> Spinor>(&self, mut f: F) -> DirectionTable {
        let u_minus = self.u_minus.iter().map(|s| f(*s)).collect();
        let u_plus = self.u_plus.iter().map(|s| f(*s)).collect();
        let pairs = self
            .pairs
            .iter()
            .map(|p| PairLifts { pp: f(p.pp), mm: f(p.mm), pm: f(p.pm), mp: f(p.mp) })
            .collect();
        DirectionTable { n: self.n, u_minus, u_plus, pairs }
    }

    fn product(&self, r: usize, outer: Sign) -> Result<CPoly> {
        let n = self.n;
        let mut acc = linear_factor(&self.single(r, outer), n);
        for tau in [Sign::Plus, Sign::Minus] {
            for s in (0..n).filter(|&s| s != r) {
                acc = poly_multiply(&acc, &linear_factor(&self.lookup(r, s, outer, tau), n))?;
            }
        }
        Ok(acc)
    }
}

/// `p_r(t) = (u⁻_r t − v⁻_r) Π_{s≠r} (u⁻⁺_{rs} t − v⁻⁺_{rs}) Π_{s≠r} (u⁻⁻_{rs} t − v⁻⁻_{rs})`,
/// accumulated left to right.
pub fn build_p(r: usize, tbl: &DirectionTable) -> Result<CPoly> {
    tbl.product(r, Sign::Minus)
}

/// `q_r(t) = (u⁺_r t − v⁺_r) Π_{s≠r} (u⁺⁺_{rs} t − v⁺⁺_{rs}) Π_{s≠r} (u⁺⁻_{rs} t − v⁺⁻_{rs})`.
pub fn build_q(r: usize, tbl: &DirectionTable) -> Result<CPoly> {
    tbl.product(r, Sign::Plus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{stereographic, Extended};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn poly(n: usize, coeffs: &[C64]) -> CPoly {
        CPoly::from_coeffs(n, coeffs.to_vec()).unwrap()
    }

    fn close(a: &CPoly, b: &CPoly, tol: f64) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> CPoly {
        let coeffs = (0..2 * n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        CPoly::from_coeffs(n, coeffs).unwrap()
    }

    fn random_config(rng: &mut ChaCha8Rng, n: usize) -> Configuration {
        loop {
            let pts: Vec<Vec3> = (0..n)
                .map(|_| Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(cfg) = Configuration::new(pts) {
                if cfg.min_wall_distance() > 1e-2 {
                    return cfg;
                }
            }
        }
    }

    #[test]
    fn linear_factor_examples() {
        let z = c(0., 0.);
        assert_eq!(linear_factor(&Spinor::new(c(1., 0.), z), 2).coeffs(), &[z, c(1., 0.), z, z]);
        assert_eq!(linear_factor(&Spinor::new(z, c(1., 0.)), 2).coeffs(), &[c(-1., 0.), z, z, z]);
        let s = Spinor::new(c(H, 0.), c(H, 0.));
        assert_eq!(linear_factor(&s, 2).coeffs(), &[c(-H, 0.), c(H, 0.), z, z]);
    }

    #[test]
    fn multiply_examples() {
        let z = c(0., 0.);
        let t = poly(2, &[z, c(1., 0.), z, z]);
        assert_eq!(poly_multiply(&t, &t).unwrap().coeffs(), &[z, z, c(1., 0.), z]);
        let a = poly(2, &[c(1., 0.), c(1., 0.), z, z]);
        let b = poly(2, &[c(-1., 0.), c(1., 0.), z, z]);
        assert_eq!(poly_multiply(&a, &b).unwrap().coeffs(), &[c(-1., 0.), z, c(1., 0.), z]);

        let (ra, rb) = (c(0.3, -0.2), c(-1.1, 0.5));
        let fa = poly(2, &[-ra, c(1., 0.), z, z]);
        let fb = poly(2, &[-rb, c(1., 0.), z, z]);
        let prod = poly_multiply(&fa, &fb).unwrap();
        assert!(close(&prod, &poly(2, &[ra * rb, -(ra + rb), c(1., 0.), z]), 1e-15));
    }

    #[test]
    fn multiply_overflow() {
        let z = c(0., 0.);
        let t2 = poly(2, &[z, z, c(1., 0.), z]);
        assert_eq!(
            poly_multiply(&t2, &t2),
            Err(Error::DegreeOverflow { degree: 4, bound: 3 })
        );
        assert!(poly_multiply(&CPoly::zero(2), &t2).unwrap().degree().is_none());
    }

    #[test]
    fn j_map_examples() {
        let (a0, a1) = (c(0.4, 1.5), c(-2.0, 0.25));
        let jp = j_map(&poly(1, &[a0, a1]));
        assert_eq!(jp.coeffs(), &[-a1.conj(), a0.conj()]);

        let (a, b) = (c(0.6, 0.8), c(-0.28, 0.96));
        let one = c(1., 0.);
        let p = poly(2, &[a * b, a * b - a - b, one - a - b, one]);
        let expected = [-one, one - a.conj() - b.conj(), a.conj() + b.conj() - a.conj() * b.conj(), a.conj() * b.conj()];
        assert!(close(&j_map(&p), &poly(2, &expected), 1e-15));
    }

    #[test]
    fn j_squares_to_minus_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let p = random_poly(&mut rng, n);
            assert!(close(&j_map(&j_map(&p)), &p.scale(c(-1., 0.)), 1e-15));
        }
    }

    #[test]
    fn direction_table_examples() {
        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [0., 1., 0.]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        let expected = lift(Vec3::new(-1., 1., 0.).normalized()).unwrap();
        assert_eq!(tbl.lookup(0, 1, Sign::Minus, Sign::Plus), expected);
        assert_eq!(tbl.lookup(1, 0, Sign::Plus, Sign::Minus), expected);
        let up = tbl.u_plus(0);
        assert!((up.u - H).norm() < 1e-15 && (up.v - H).norm() < 1e-15);

        let cfg = Configuration::from_arrays(&[[0., 0., 2.], [1., 0., 0.]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        assert_eq!(tbl.u_plus(0), Spinor::new(c(0., 0.), c(1., 0.)));
    }

    #[test]
    fn table_spinors_are_unit_and_project_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = random_config(&mut rng, 4);
        let tbl = build_direction_table(&cfg).unwrap();
        let x = cfg.points();
        let check = |s: Spinor, d: Vec3| {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            match (s.hopf(), stereographic(d.normalized()).unwrap()) {
                (Extended::Finite(a), Extended::Finite(b)) => assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm())),
                (a, b) => assert_eq!(a, b),
            }
        };
        for r in 0..4 {
            check(tbl.u_minus(r), -x[r]);
            check(tbl.u_plus(r), x[r]);
            for s in (0..4).filter(|&s| s != r) {
                for sg in [Sign::Plus, Sign::Minus] {
                    for tg in [Sign::Plus, Sign::Minus] {
                        check(tbl.lookup(r, s, sg, tg), x[r] * sg.value() + x[s] * tg.value());
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_n2_first_column() {
        // x₁ = 1, x₂ = z in the xy-plane
        let z = c(0.4, 1.3);
        let cfg = Configuration::from_arrays(&[[1., 0., 0.], [z.re, z.im, 0.]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        let p = build_p(0, &tbl).unwrap();
        let a = (z - 1.0) / (z - 1.0).norm();
        let b = -(z + 1.0) / (z + 1.0).norm();
        let one = c(1., 0.);
        let lead = p.coeffs()[3];
        let monic = p.scale(lead.inv());
        assert!(close(&monic, &poly(2, &[a * b, a * b - a - b, one - a - b, one]), 1e-14));
    }

    #[test]
    fn north_pole_factor_drops_degree() {
        let cfg = Configuration::from_arrays(&[[0., 0., 1.], [2., 0., 0.]]).unwrap();
        let tbl = build_direction_table(&cfg).unwrap();
        assert_eq!(linear_factor(&tbl.u_plus(0), 2).coeffs()[0], c(-1., 0.));
        assert_eq!(build_q(0, &tbl).unwrap().degree(), Some(2));
        assert_eq!(build_p(0, &tbl).unwrap().degree(), Some(3));
    }

    /// Weierstrass iteration for the roots of a polynomial with nonzero leading coefficient.
    fn roots(p: &CPoly, deg: usize) -> Vec<C64> {
        let lead = p.coeffs()[deg];
        let monic: Vec<C64> = p.coeffs()[..=deg].iter().map(|x| x / lead).collect();
        let eval = |t: C64| monic.iter().rev().fold(c(0., 0.), |acc, x| acc * t + x);
        let radius = 1.0 + monic[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mut z: Vec<C64> = (0..deg)
            .map(|k| C64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
            .collect();
        for _ in 0..500 {
            for i in 0..deg {
                let denom = (0..deg).filter(|&k| k != i).fold(c(1., 0.), |acc, k| acc * (z[i] - z[k]));
                let step = eval(z[i]) / denom;
                z[i] -= step;
            }
        }
        z
    }

    /// Distance on the Riemann sphere.
    fn chordal(a: Extended, b: Extended) -> f64 {
        match (a, b) {
            (Extended::Finite(a), Extended::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
            }
            (Extended::Finite(a), Extended::Infinity) | (Extended::Infinity, Extended::Finite(a)) => {
                2.0 / (1.0 + a.norm_sqr()).sqrt()
            }
            _ => 0.0,
        }
    }

    fn assert_root_multiset(found: Vec<C64>, mut expected: Vec<Extended>) {
        for w in found {
            let (i, d) = expected
                .iter()
                .enumerate()
                .map(|(i, e)| (i, chordal(Extended::Finite(w), *e)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < 1e-8, "root {w} unmatched (distance {d})");
            expected.swap_remove(i);
        }
    }

    #[test]
    fn roots_match_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=4 {
            for _ in 0..5 {
                let cfg = random_config(&mut rng, n);
                let tbl = build_direction_table(&cfg).unwrap();
                let x = cfg.points();
                for r in 0..n {
                    let p = build_p(r, &tbl).unwrap();
                    let mut dirs = vec![-x[r]];
                    dirs.extend((0..n).filter(|&s| s != r).map(|s| x[s] - x[r]));
                    dirs.extend((0..n).filter(|&s| s != r).map(|s| -x[s] - x[r]));
                    let expected: Vec<Extended> =
                        dirs.iter().map(|d| stereographic(d.normalized()).unwrap()).collect();
                    assert_root_multiset(roots(&p, 2 * n - 1), expected.clone());

                    // antipodes −1/conj(w)
                    let q = build_q(r, &tbl).unwrap();
                    let antipodes = expected
                        .iter()
                        .map(|e| match e {
                            Extended::Finite(w) if w.norm() > 0.0 => Extended::Finite(-w.conj().inv()),
                            Extended::Finite(_) => Extended::Infinity,
                            Extended::Infinity => Extended::Finite(c(0., 0.)),
                        })
                        .collect();
                    assert_root_multiset(roots(&q, 2 * n - 1), antipodes);
                }
            }
        }
    }

    #[test]
    fn q_is_proportional_to_j_of_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for n in 2..=5 {
            let cfg = random_config(&mut rng, n);
            let tbl = build_direction_table(&cfg).unwrap();
            for r in 0..n {
                let q = build_q(r, &tbl).unwrap();
                let jp = j_map(&build_p(r, &tbl).unwrap());
                let scale = q.norm() * jp.norm();
                let (a, b) = (q.coeffs(), jp.coeffs());
                for i in 0..2 * n {
                    for k in i + 1..2 * n {
                        assert!((a[i] * b[k] - a[k] * b[i]).norm() < 1e-10 * scale);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn j_map_is_antilinear(seed in 0u64..10_000, re in -3.0f64..3.0, im in -3.0f64..3.0, n in 1usize..4) {
            let p = random_poly(&mut ChaCha8Rng::seed_from_u64(seed), n);
            let lam = c(re, im);
            let lhs = j_map(&p.scale(lam));
            let rhs = j_map(&p).scale(lam.conj());
            prop_assert!(close(&lhs, &rhs, 1e-13 * (1.0 + lam.norm()) * (1.0 + p.norm())));
        }

        #[test]
        fn j_map_is_an_involution_up_to_sign(seed in 0u64..10_000, n in 1usize..5) {
            let p = random_poly(&mut ChaCha8Rng::seed_from_u64(seed), n);
            prop_assert!(close(&j_map(&j_map(&p)), &p.scale(c(-1., 0.)), 1e-15));
        }
    }
}
