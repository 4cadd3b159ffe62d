//! Points in ℝ³, the wall-free configuration space, the Weyl group action on
//! it, stereographic projection and Hopf lifts.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// Default wall-proximity tolerance, relative to the RMS point norm.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Accepted deviation of `‖p‖` from 1 for inputs of [`stereographic`] and [`lift`].
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y).hypot(self.z)
    }

    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

/// A sign in `{+1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// An ordered list of `n ≥ 2` points avoiding the origin and the walls
/// `x_r = ±x_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<Vec3>,
    tol: f64,
}

/// Checks the wall constraints and builds a [`Configuration`].
///
/// `tol` is relative to the RMS norm of the points, so validation commutes
/// with scaling. Reported walls name the vanishing combination `x_r + sign·x_s`.
pub fn validate_configuration(points: &[Vec3], tol: f64) -> Result<Configuration> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if let Some(r) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::NonFinite(r));
    }
    let threshold = tol * rms_norm(points);
    for (r, p) in points.iter().enumerate() {
        if p.norm() <= threshold {
            return Err(Error::OriginPoint(r));
        }
    }
    for r in 0..n {
        for s in r + 1..n {
            if (points[r] - points[s]).norm() <= threshold {
                return Err(Error::WallViolation { r, s, sign: Sign::Minus });
            }
            if (points[r] + points[s]).norm() <= threshold {
                return Err(Error::WallViolation { r, s, sign: Sign::Plus });
            }
        }
    }
    Ok(Configuration { points: points.to_vec(), tol })
}

fn rms_norm(points: &[Vec3]) -> f64 {
    let sum: f64 = points.iter().map(|p| p.dot(*p)).sum();
    (sum / points.len() as f64).sqrt()
}

impl Configuration {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        validate_configuration(&points, DEFAULT_TOL)
    }

    pub fn from_arrays(points: &[[f64; 3]]) -> Result<Self> {
        let pts: Vec<Vec3> = points.iter().copied().map(Vec3::from_array).collect();
        validate_configuration(&pts, DEFAULT_TOL)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn to_arrays(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(|p| p.to_array()).collect()
    }

    pub fn rms_norm(&self) -> f64 {
        rms_norm(&self.points)
    }

    /// Smallest of `‖x_r‖`, `‖x_r − x_s‖`, `‖x_r + x_s‖` divided by the RMS norm.
    pub fn min_wall_distance(&self) -> f64 {
        relative_wall_distances(&self.points)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        let pts: Vec<Vec3> = self.points.iter().map(|p| *p * k).collect();
        validate_configuration(&pts, self.tol)
    }

    pub fn rotated(&self, rot: &Rotation) -> Result<Self> {
        let pts: Vec<Vec3> = self.points.iter().map(|p| rot.apply(*p)).collect();
        validate_configuration(&pts, self.tol)
    }

    pub fn translated(&self, t: Vec3) -> Result<Self> {
        let pts: Vec<Vec3> = self.points.iter().map(|p| *p + t).collect();
        validate_configuration(&pts, self.tol)
    }
}

/// All wall distances `‖x_r‖`, `‖x_r ∓ x_s‖` relative to the RMS norm.
pub fn relative_wall_distances(points: &[Vec3]) -> Vec<f64> {
    let rms = rms_norm(points);
    let n = points.len();
    let mut out = Vec::with_capacity(n * n);
    for (r, p) in points.iter().enumerate() {
        out.push(p.norm() / rms);
        for q in &points[r + 1..] {
            out.push((*p - *q).norm() / rms);
            out.push((*p + *q).norm() / rms);
        }
    }
    out
}

/// An element of `(ℤ/2)ⁿ ⋊ Σₙ`: point `r` is multiplied by `signs[r]` and
/// moved to position `perm[r]` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    signs: Vec<Sign>,
    perm: Vec<usize>,
}

impl WeylElement {
    pub fn new(signs: Vec<Sign>, perm: Vec<usize>) -> Result<Self> {
        if signs.len() != perm.len() {
            return Err(Error::DimensionMismatch { expected: signs.len(), got: perm.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidPermutation(perm));
            }
            seen[p] = true;
        }
        Ok(Self { signs, perm })
    }

    pub fn identity(n: usize) -> Self {
        Self { signs: vec![Sign::Plus; n], perm: (0..n).collect() }
    }

    pub fn sign_flip(n: usize, r: usize) -> Self {
        let mut w = Self::identity(n);
        w.signs[r] = Sign::Minus;
        w
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut w = Self::identity(n);
        w.perm.swap(a, b);
        w
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let signs = (0..n)
            .map(|_| if rng.random::<bool>() { Sign::Plus } else { Sign::Minus })
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        Self { signs, perm }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// The product `self · other` (act by `other` first).
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let perm = other.perm.iter().map(|&q| self.perm[q]).collect();
        let signs = other
            .perm
            .iter()
            .zip(&other.signs)
            .map(|(&q, &s)| self.signs[q].times(s))
            .collect();
        WeylElement { signs, perm }
    }
}

/// Acts on a configuration: position `perm[r]` receives `signs[r]·x_r`.
pub fn weyl_act_config(w: &WeylElement, c: &Configuration) -> Configuration {
    assert_eq!(w.n(), c.n(), "Weyl element and configuration sizes differ");
    let mut points = vec![Vec3::default(); c.n()];
    for (r, p) in c.points.iter().enumerate() {
        points[w.perm[r]] = *p * w.signs[r].value();
    }
    Configuration { points, tol: c.tol }
}

/// A proper rotation of ℝ³ as a row-major 3×3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Rotation {
    pub fn about_axis(axis: Vec3, angle: f64) -> Self {
        let a = axis.normalized();
        let (h, w) = (angle / 2.0).sin_cos();
        Self::from_quaternion(w, a.x * h, a.y * h, a.z * h)
    }

    /// Haar-uniform rotation from a normalized Gaussian quaternion.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self::from_quaternion(q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm)
    }

    fn from_quaternion(w: f64, x: f64, y: f64, z: f64) -> Self {
        Rotation([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        )
    }
}

/// A point of `ℂ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(C64),
    Infinity,
}

/// Stereographic projection from the north pole: `(x + iy)/(1 − z)`.
pub fn stereographic(p: Vec3) -> Result<Extended> {
    check_unit(p)?;
    if (1.0 - p.z).abs() <= 1e-12 {
        return Ok(Extended::Infinity);
    }
    Ok(Extended::Finite(C64::new(p.x, p.y) / (1.0 - p.z)))
}

/// A nonzero pair `(u, v)` in `ℂ²`; its Hopf image is `v/u ∈ ℂP¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub u: C64,
    pub v: C64,
}

impl Spinor {
    pub fn new(u: C64, v: C64) -> Self {
        Self { u, v }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self { u: self.u * k, v: self.v * k }
    }

    pub fn hopf(&self) -> Extended {
        if self.u == C64::new(0.0, 0.0) {
            Extended::Infinity
        } else {
            Extended::Finite(self.v / self.u)
        }
    }
}

/// Unit spinor lifting the unit vector `p` through the Hopf map.
///
/// Two branches keep both `1 − z` and `1 + z` away from cancellation; `u`
/// vanishes exactly at the north pole.
pub fn lift(p: Vec3) -> Result<Spinor> {
    check_unit(p)?;
    let Vec3 { x, y, z } = p;
    let s = if z <= 0.0 {
        let d = (2.0 * (1.0 - z)).sqrt();
        Spinor::new(C64::new(((1.0 - z) / 2.0).sqrt(), 0.0), C64::new(x, y) / d)
    } else {
        let d = (2.0 * (1.0 + z)).sqrt();
        Spinor::new(C64::new(x, -y) / d, C64::new(((1.0 + z) / 2.0).sqrt(), 0.0))
    };
    let k = 1.0 / s.norm_sqr().sqrt();
    Ok(Spinor::new(s.u * k, s.v * k))
}

fn check_unit(p: Vec3) -> Result<()> {
    let norm = p.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::NotUnit(norm));
    }
    Ok(())
}
