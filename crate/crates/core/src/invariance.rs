//! Randomized checks of the symmetries of `D` and of the flag map.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::determinant::{evaluate, evaluate_table, Pivoting};
use crate::error::Result;
use crate::geometry::{weyl_act_config, Configuration, Rotation, Vec3, WeylElement};
use crate::polys::build_direction_table;
use crate::quatlin::{flag_distance, polar_flag, weyl_act_flag};
use crate::C64;

pub const SYMMETRY_TOL: f64 = 1e-9;
pub const REALITY_TOL: f64 = 1e-8;
pub const EQUIVARIANCE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Weyl,
    Scaling,
    Rotation,
    LiftIndependence,
    Reality,
    FlagEquivariance,
    /// `D` is not translation invariant; reported, never failing.
    Translation,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Weyl,
        Family::Scaling,
        Family::Rotation,
        Family::LiftIndependence,
        Family::Reality,
        Family::FlagEquivariance,
        Family::Translation,
    ];

    pub fn tolerance(self) -> f64 {
        match self {
            Family::Reality => REALITY_TOL,
            Family::FlagEquivariance => EQUIVARIANCE_TOL,
            Family::Translation => f64::INFINITY,
            _ => SYMMETRY_TOL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Weyl => "weyl",
            Family::Scaling => "scaling",
            Family::Rotation => "rotation",
            Family::LiftIndependence => "lift-independence",
            Family::Reality => "reality",
            Family::FlagEquivariance => "flag-equivariance",
            Family::Translation => "translation",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    ExpectedVariant,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedVariant => "EXPECTED-VARIANT",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyResult {
    pub family: Family,
    pub trials: usize,
    pub max_residual: f64,
    /// Transform attaining `max_residual`.
    pub witness: String,
}

impl FamilyResult {
    pub fn status(&self) -> Status {
        if self.family == Family::Translation {
            Status::ExpectedVariant
        } else if self.max_residual < self.family.tolerance() {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// One randomized trial of `family` on `c`: the residual and a description
/// of the transform used.
pub fn trial<R: Rng + ?Sized>(family: Family, c: &Configuration, rng: &mut R) -> Result<(f64, String)> {
    let d = || evaluate(c).map(|r| r.d);
    Ok(match family {
        Family::Weyl => {
            let w = WeylElement::random(rng, c.n());
            let moved = evaluate(&weyl_act_config(&w, c))?.d;
            (relative(moved, d()?), format!("signs {:?} perm {:?}", w.signs(), w.perm()))
        }
        Family::Scaling => {
            let k = rng.random_range(-3.0f64..3.0).exp();
            (relative(evaluate(&c.scaled(k)?)?.d, d()?), format!("scale {k:e}"))
        }
        Family::Rotation => {
            let rot = Rotation::random(rng);
            (relative(evaluate(&c.rotated(&rot)?)?.d, d()?), format!("rotation {:?}", rot.0))
        }
        Family::LiftIndependence => {
            let tbl = build_direction_table(c)?;
            let mut factors = Vec::new();
            let rescaled = tbl.map_spinors(|s| {
                let f = C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU));
                factors.push(f);
                s.scale(f)
            });
            let moved = evaluate_table(&rescaled, Pivoting::Partial)?.d;
            (relative(moved, d()?), format!("{} random lift factors", factors.len()))
        }
        Family::Reality => {
            let w = WeylElement::random(rng, c.n());
            let rot = Rotation::random(rng);
            let moved = weyl_act_config(&w, c).rotated(&rot)?;
            (evaluate(&moved)?.im_residual, format!("signs {:?} perm {:?} rotation {:?}", w.signs(), w.perm(), rot.0))
        }
        Family::FlagEquivariance => {
            let w = WeylElement::random(rng, c.n());
            let lhs = polar_flag(&weyl_act_config(&w, c))?;
            let rhs = weyl_act_flag(&w, &polar_flag(c)?);
            (flag_distance(&lhs, &rhs), format!("signs {:?} perm {:?}", w.signs(), w.perm()))
        }
        Family::Translation => {
            let scale = 0.5 * c.rms_norm();
            let t = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal))
                .normalized()
                * scale;
            match c.translated(t) {
                Ok(moved) => (relative(evaluate(&moved)?.d, d()?), format!("translation {:?}", t.to_array())),
                Err(_) => (0.0, format!("translation {:?} hits a wall", t.to_array())),
            }
        }
    })
}

/// Runs `trials` randomized checks of every family. Empty for `trials == 0`.
pub fn run_checks(c: &Configuration, trials: usize, seed: u64) -> Result<Vec<FamilyResult>> {
    if trials == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Family::ALL
        .iter()
        .map(|&family| {
            let mut worst = FamilyResult { family, trials, max_residual: 0.0, witness: String::new() };
            for _ in 0..trials {
                let (res, witness) = trial(family, c, &mut rng)?;
                if !(res <= worst.max_residual) || worst.witness.is_empty() {
                    worst.max_residual = res;
                    worst.witness = witness;
                }
            }
            Ok(worst)
        })
        .collect()
}
