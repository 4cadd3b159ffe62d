use thiserror::Error;

use crate::geometry::Sign;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the construction. Point indices are stored 0-based and
/// displayed 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a configuration needs at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("point {} has a non-finite coordinate", .0 + 1)]
    NonFinite(usize),

    #[error("point {} lies at the origin (wall x_r ≠ 0)", .0 + 1)]
    OriginPoint(usize),

    /// `x_r + sign·x_s` vanishes (to the validation tolerance).
    #[error("points {} and {} violate the wall {}", .r + 1, .s + 1, wall_name(*.sign))]
    WallViolation { r: usize, s: usize, sign: Sign },

    #[error("vector norm {0} is not 1 within tolerance")]
    NotUnit(f64),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("product degree {degree} exceeds the bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("normalizer factor has magnitude {0:e}; configuration is too close to a wall")]
    DegenerateNormalizer(f64),

    #[error("matrix is not Hermitian (relative asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive definite (eigenvalue ratio {0:e})")]
    NotPositiveDefinite(f64),

    /// The quaternionic matrix of the polynomials is singular: a
    /// counterexample to linear independence. Carries the full point dump.
    #[error("singular quaternionic matrix (normalized |det| = {ratio:e}) at configuration {points:?}")]
    SingularConfiguration { ratio: f64, points: Vec<[f64; 3]> },

    #[error("invalid sampling spec: {0}")]
    InvalidSpec(String),

    #[error("no wall-guarded sample after {0} redraws")]
    RejectionOverflow(usize),

    #[error("closed-form input lies on a wall (|z-1| = {minus:e}, |z+1| = {plus:e})")]
    WallInput { minus: f64, plus: f64 },
}

fn wall_name(sign: Sign) -> &'static str {
    match sign {
        Sign::Plus => "x_r ≠ −x_s",
        Sign::Minus => "x_r ≠ x_s",
    }
}
