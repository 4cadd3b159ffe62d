//! Symplectic Berry–Robbins construction for configurations of points in ℝ³.
//!
//! Given `n` points off the walls `x_r = 0`, `x_r = ±x_s`, every point and
//! every pairwise sum/difference direction is lifted through the Hopf map to
//! a spinor. Products of the resulting linear factors give `2n` polynomials of
//! degree `≤ 2n − 1`; their coefficient matrix `M`, divided by a normalizer
//! `P` built from 2×2 determinants of the lifts, yields a real, lift
//! independent determinant `D`. The same polynomials, read as quaternionic
//! column vectors and pushed through the polar decomposition, give a point of
//! the flag manifold `Sp(n)/Tⁿ` equivariantly for the Weyl group
//! `(ℤ/2)ⁿ ⋊ Σₙ`.
//!
//! Modules, bottom-up:
//!
//! * [`geometry`]: configurations, Weyl elements, stereographic projection, spinor lifts.
//! * [`polys`]: coefficient-vector polynomials, the structure map `j`, the `p_r`/`q_r` builders.
//! * [`determinant`]: complex matrices, LU determinants, the normalizer and `D`.
//! * [`quatlin`]: Hermitian Jacobi eigensolver, polar factor, flag points and their Weyl action.
//! * [`search`]: sampling, Monte Carlo surveys, minimization of `D`, the closed-form `n = 2` oracle.
//! * [`simplex`]: the Nelder–Mead minimizer behind [`search::minimize_d`].
//! * [`invariance`]: randomized invariance checks shared by the CLI and the test suites.
//! * [`cli`]: config/report file formats and the command implementations.

pub mod cli;
pub mod determinant;
pub mod error;
pub mod geometry;
pub mod invariance;
pub mod polys;
pub mod quatlin;
pub mod search;
pub mod simplex;

pub use determinant::{evaluate, CMatrix, DeterminantReport, Pivoting};
pub use error::{Error, Result};
pub use geometry::{lift, stereographic, validate_configuration, Configuration, Sign, Spinor, Vec3, WeylElement};
pub use polys::{build_direction_table, build_p, build_q, j_map, CPoly, DirectionTable};
pub use quatlin::{flag_equal, polar_flag, weyl_act_flag, FlagPoint};
pub use search::{minimize_d, monte_carlo, oracle_n2, reduce_n2, sample_config, MinimizeOptions, SampleSpec, SearchReport};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
