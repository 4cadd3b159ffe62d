//! Evidence gathering for `D ≥ 1`: seeded sampling of configurations, Monte
//! Carlo surveys, counterexample hunting by Nelder–Mead, and the closed form
//! for two points.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::determinant::{evaluate, evaluate_table, DeterminantReport, Pivoting};
use crate::error::{Error, Result};
use crate::geometry::{relative_wall_distances, validate_configuration, Configuration, Vec3, DEFAULT_TOL};
use crate::polys::build_direction_table;
use crate::simplex::nelder_mead;
use crate::C64;

/// Draws allowed per sample before giving up.
pub const MAX_REDRAWS: usize = 10_000;
/// `D` below `1 − VIOLATION_SLACK` counts as a violation.
pub const VIOLATION_SLACK: f64 = 1e-9;
/// Upper edges of the histogram bins; the first bin holds `D < 1`, the last `D ≥ 10`.
pub const HISTOGRAM_EDGES: [f64; 10] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const MAX_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// i.i.d. standard normal coordinates
    Gaussian,
    UnitSphere,
    /// uniform direction, radius uniform in `[r_min, r_max]`
    Shell { r_min: f64, r_max: f64 },
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Gaussian => f.write_str("gaussian"),
            Distribution::UnitSphere => f.write_str("sphere"),
            Distribution::Shell { r_min, r_max } => write!(f, "shell:{r_min}:{r_max}"),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "sphere" => Ok(Distribution::UnitSphere),
            _ => {
                let bad = || Error::InvalidSpec(format!("unknown distribution {s:?}"));
                let rest = s.strip_prefix("shell:").ok_or_else(bad)?;
                let (a, b) = rest.split_once(':').ok_or_else(bad)?;
                let r_min: f64 = a.parse().map_err(|_| bad())?;
                let r_max: f64 = b.parse().map_err(|_| bad())?;
                if !(r_min > 0.0 && r_max >= r_min && r_max.is_finite()) {
                    return Err(Error::InvalidSpec(format!("shell radii must satisfy 0 < r_min ≤ r_max, got {s:?}")));
                }
                Ok(Distribution::Shell { r_min, r_max })
            }
        }
    }
}

impl Distribution {
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        let g = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        match *self {
            Distribution::Gaussian => g,
            Distribution::UnitSphere => g.normalized(),
            Distribution::Shell { r_min, r_max } => {
                let radius = if r_max > r_min { rng.random_range(r_min..r_max) } else { r_min };
                g.normalized() * radius
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub distribution: Distribution,
    /// Minimum wall distance relative to the RMS norm.
    pub wall_guard: f64,
}

impl SampleSpec {
    pub fn new(n: usize, count: usize, seed: u64) -> Self {
        Self { n, count, seed, distribution: Distribution::Gaussian, wall_guard: 1e-4 }
    }

    pub fn with_distribution(mut self, distribution: Distribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn with_wall_guard(mut self, wall_guard: f64) -> Self {
        self.wall_guard = wall_guard;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_N).contains(&self.n) {
            return Err(Error::InvalidSpec(format!("n must lie in [2, {MAX_N}], got {}", self.n)));
        }
        if self.count == 0 {
            return Err(Error::InvalidSpec("count must be at least 1".into()));
        }
        if !(self.wall_guard > 0.0) {
            return Err(Error::InvalidSpec(format!("wall_guard must be positive, got {}", self.wall_guard)));
        }
        Ok(())
    }
}

fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The `index`-th configuration of a spec, normalized to RMS norm 1.
pub fn sample_config(spec: &SampleSpec, index: u64) -> Result<Configuration> {
    sample_config_counted(spec, index).map(|(c, _)| c)
}

/// Like [`sample_config`], also returning the number of rejected draws.
pub fn sample_config_counted(spec: &SampleSpec, index: u64) -> Result<(Configuration, usize)> {
    spec.validate()?;
    let mut rng = sample_rng(spec.seed, index);
    for rejected in 0..MAX_REDRAWS {
        let raw: Vec<Vec3> = (0..spec.n).map(|_| spec.distribution.draw(&mut rng)).collect();
        let rms = (raw.iter().map(|p| p.dot(*p)).sum::<f64>() / spec.n as f64).sqrt();
        let pts: Vec<Vec3> = raw.iter().map(|p| *p * (1.0 / rms)).collect();
        let guarded = relative_wall_distances(&pts).into_iter().all(|d| d >= spec.wall_guard);
        if guarded {
            if let Ok(c) = validate_configuration(&pts, DEFAULT_TOL) {
                return Ok((c, rejected));
            }
        }
    }
    Err(Error::RejectionOverflow(MAX_REDRAWS))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationReason {
    BelowOne,
    Untrusted,
    EvaluationError(String),
}

impl fmt::Display for ViolationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationReason::BelowOne => f.write_str("D below 1"),
            ViolationReason::Untrusted => f.write_str("untrusted report"),
            ViolationReason::EvaluationError(e) => write!(f, "evaluation error: {e}"),
        }
    }
}

/// Independent re-evaluations of a suspicious sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recheck {
    /// `D` with full-pivoting LU.
    pub full_pivot_d: Option<f64>,
    /// `D` from randomly rescaled lifts.
    pub rephased_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub index: u64,
    pub config: Configuration,
    pub report: Option<DeterminantReport>,
    pub reason: ViolationReason,
    pub recheck: Recheck,
}

/// Per-sample outcome kept for tabular output.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub index: u64,
    pub config: Option<Configuration>,
    pub result: std::result::Result<DeterminantReport, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub spec: SampleSpec,
    pub evaluated: usize,
    pub rejected: usize,
    pub min_d: f64,
    pub argmin: Option<Configuration>,
    pub mean_d: f64,
    pub max_d: f64,
    pub violations: Vec<Violation>,
    /// Counts per bin, see [`HISTOGRAM_EDGES`].
    pub histogram: Vec<u64>,
    pub records: Vec<SampleRecord>,
}

impl SearchReport {
    pub fn attempts(&self) -> usize {
        self.evaluated + self.rejected
    }
}

fn histogram_bin(d: f64) -> usize {
    HISTOGRAM_EDGES.iter().position(|&edge| d < edge).unwrap_or(HISTOGRAM_EDGES.len())
}

/// Recomputes `D` along two independent paths.
pub fn recheck(c: &Configuration, seed: u64) -> Recheck {
    let Ok(tbl) = build_direction_table(c) else {
        return Recheck { full_pivot_d: None, rephased_d: None };
    };
    let full_pivot_d = evaluate_table(&tbl, Pivoting::Full).ok().map(|r| r.d);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let rescaled = tbl.map_spinors(|s| {
        s.scale(C64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..std::f64::consts::TAU)))
    });
    let rephased_d = evaluate_table(&rescaled, Pivoting::Partial).ok().map(|r| r.d);
    Recheck { full_pivot_d, rephased_d }
}

/// Evaluates `D` on `spec.count` seeded samples. Every sample below
/// `1 − VIOLATION_SLACK`, untrusted, or failing to evaluate is kept in
/// `violations`. Results do not depend on the thread count.
pub fn monte_carlo(spec: &SampleSpec) -> Result<SearchReport> {
    spec.validate()?;
    let outcomes: Vec<(SampleRecord, usize)> = (0..spec.count as u64)
        .into_par_iter()
        .map(|index| match sample_config_counted(spec, index) {
            Ok((c, rejected)) => {
                let result = evaluate(&c);
                (SampleRecord { index, config: Some(c), result }, rejected)
            }
            Err(e) => (SampleRecord { index, config: None, result: Err(e) }, MAX_REDRAWS),
        })
        .collect();

    let mut report = SearchReport {
        spec: spec.clone(),
        evaluated: 0,
        rejected: 0,
        min_d: f64::NAN,
        argmin: None,
        mean_d: f64::NAN,
        max_d: f64::NAN,
        violations: Vec::new(),
        histogram: vec![0; HISTOGRAM_EDGES.len() + 1],
        records: Vec::with_capacity(spec.count),
    };
    let (mut sum, mut ok) = (0.0, 0usize);
    for (record, rejected) in outcomes {
        report.rejected += rejected;
        if let Some(c) = &record.config {
            report.evaluated += 1;
            let violation = match &record.result {
                Ok(rep) => {
                    sum += rep.d;
                    ok += 1;
                    if !(report.min_d <= rep.d) {
                        report.min_d = rep.d;
                        report.argmin = Some(c.clone());
                    }
                    if !(report.max_d >= rep.d) {
                        report.max_d = rep.d;
                    }
                    report.histogram[histogram_bin(rep.d)] += 1;
                    if rep.d < 1.0 - VIOLATION_SLACK {
                        Some(ViolationReason::BelowOne)
                    } else if !rep.trusted {
                        Some(ViolationReason::Untrusted)
                    } else {
                        None
                    }
                }
                Err(e) => Some(ViolationReason::EvaluationError(e.to_string())),
            };
            if let Some(reason) = violation {
                report.violations.push(Violation {
                    index: record.index,
                    config: c.clone(),
                    report: record.result.as_ref().ok().copied(),
                    reason,
                    recheck: recheck(c, spec.seed ^ record.index.rotate_left(32)),
                });
            }
        }
        report.records.push(record);
    }
    if ok > 0 {
        report.mean_d = (sum / ok as f64).clamp(report.min_d, report.max_d);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Initial simplex edge relative to the RMS norm of the start.
    pub simplex_scale: f64,
    pub ftol: f64,
    pub wall_penalty_weight: f64,
    pub restarts: usize,
    /// Hard wall guard (relative); the soft penalty starts at `PENALTY_MARGIN` times this.
    pub wall_guard: f64,
    pub seed: u64,
}

/// Ratio of the soft penalty onset to the hard guard.
pub const PENALTY_MARGIN: f64 = 10.0;

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            simplex_scale: 0.1,
            ftol: 1e-12,
            wall_penalty_weight: 1e6,
            restarts: 5,
            wall_guard: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimized {
    pub config: Configuration,
    pub d: f64,
    pub evaluations: usize,
}

fn flatten(c: &Configuration) -> Vec<f64> {
    c.points().iter().flat_map(|p| p.to_array()).collect()
}

fn unflatten(x: &[f64]) -> Vec<Vec3> {
    x.chunks_exact(3).map(|p| Vec3::new(p[0], p[1], p[2])).collect()
}

/// Penalized objective; `+∞` inside the hard guard or where `D` fails.
fn objective(x: &[f64], opts: &MinimizeOptions) -> f64 {
    if x.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let pts = unflatten(x);
    let dists = relative_wall_distances(&pts);
    if dists.iter().any(|&d| !(d >= opts.wall_guard)) {
        return f64::INFINITY;
    }
    let Ok(c) = validate_configuration(&pts, DEFAULT_TOL) else {
        return f64::INFINITY;
    };
    let Ok(rep) = evaluate(&c) else {
        return f64::INFINITY;
    };
    let soft = PENALTY_MARGIN * opts.wall_guard;
    let penalty: f64 = dists.iter().map(|&d| (soft - d).max(0.0).powi(2)).sum();
    rep.d + opts.wall_penalty_weight * penalty
}

/// Hunts for small `D` near `c0` with Nelder–Mead on the `3n` coordinates,
/// restarting `opts.restarts` times from random perturbations of the best
/// point so far. Never returns a configuration inside the wall guard unless
/// `c0` already was one.
pub fn minimize_d(c0: &Configuration, opts: &MinimizeOptions) -> Result<Minimized> {
    let d0 = evaluate(c0)?.d;
    let x0 = flatten(c0);
    let mut best_x = x0.clone();
    let mut best_f = objective(&x0, opts);
    let mut evaluations = 1;
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);

    for round in 0..=opts.restarts {
        let scale = opts.simplex_scale * relative_scale(&best_x);
        let start: Vec<f64> = if round == 0 {
            best_x.clone()
        } else {
            best_x.iter().map(|v| v + scale * rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let out = nelder_mead(|x| objective(x, opts), &start, scale, opts.max_iter, opts.ftol);
        evaluations += out.evaluations;
        if out.f < best_f {
            best_f = out.f;
            best_x = out.x;
        }
    }

    let candidate = validate_configuration(&unflatten(&best_x), DEFAULT_TOL)?;
    let d = evaluate(&candidate)?.d;
    // the penalty can trade a little D for wall distance; never end above the start
    if d > d0 && c0.min_wall_distance() >= opts.wall_guard {
        return Ok(Minimized { config: c0.clone(), d: d0, evaluations });
    }
    Ok(Minimized { config: candidate, d, evaluations })
}

fn relative_scale(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / (x.len() / 3).max(1) as f64).sqrt()
}

/// Central finite-difference gradient of `D` with respect to the `3n`
/// coordinates.
pub fn fd_gradient(c: &Configuration, h: f64) -> Result<Vec<f64>> {
    let x = flatten(c);
    let eval_at = |x: &[f64]| -> Result<f64> {
        let cfg = validate_configuration(&unflatten(x), c.tol())?;
        Ok(evaluate(&cfg)?.d)
    };
    (0..x.len())
        .map(|i| {
            let mut up = x.clone();
            let mut down = x.clone();
            up[i] += h;
            down[i] -= h;
            Ok((eval_at(&up)? - eval_at(&down)?) / (2.0 * h))
        })
        .collect()
}

fn n2_moduli(r: f64, theta: f64) -> (f64, f64) {
    let cos = theta.cos();
    let minus = (r * r - 2.0 * r * cos + 1.0).max(0.0).sqrt();
    let plus = (r * r + 2.0 * r * cos + 1.0).max(0.0).sqrt();
    (minus, plus)
}

/// Closed form of `D` for two points with `x₂/x₁ ↦ z = r e^{iθ}`:
///
/// `4D = 2 + (1+r)(1−cosθ)/|z−1| + (1+r)(1+cosθ)/|z+1| + 2r(1−cosθ)(1+cosθ)/(|z−1||z+1|)`.
pub fn oracle_n2(r: f64, theta: f64) -> Result<f64> {
    let (minus, plus) = n2_moduli(r, theta);
    if !(minus >= 1e-12 && plus >= 1e-12) || !(r > 0.0) {
        return Err(Error::WallInput { minus, plus });
    }
    let cos = theta.cos();
    let four_d = 2.0
        + (1.0 + r) * (1.0 - cos) / minus
        + (1.0 + r) * (1.0 + cos) / plus
        + 2.0 * r * (1.0 - cos) * (1.0 + cos) / (minus * plus);
    Ok(four_d / 4.0)
}

/// The lower bound `1 + r sin²θ / (2|z−1||z+1|)` for two points.
pub fn n2_lower_bound(r: f64, theta: f64) -> f64 {
    let (minus, plus) = n2_moduli(r, theta);
    1.0 + r * theta.sin().powi(2) / (2.0 * minus * plus)
}

/// `r = ‖x₂‖/‖x₁‖` and the angle between the two points in `[0, π]`.
pub fn reduce_n2(c: &Configuration) -> (f64, f64) {
    assert_eq!(c.n(), 2, "reduce_n2 needs exactly two points");
    let (a, b) = (c.points()[0], c.points()[1]);
    (b.norm() / a.norm(), a.cross(b).norm().atan2(a.dot(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn oracle_examples() {
        assert!((oracle_n2(1.0, FRAC_PI_2).unwrap() - (3.0 + 2.0 * 2f64.sqrt()) / 4.0).abs() < 1e-15);
        assert_eq!(oracle_n2(2.0, 0.0).unwrap(), 1.0);
        // (3 + 3√3/2)/4, evaluated with 30-digit arithmetic
        assert!((oracle_n2(1.0, 2.0 * PI / 3.0).unwrap() - 1.399_519_052_838_33).abs() < 1e-12);
        assert!(matches!(oracle_n2(1.0, 0.0), Err(Error::WallInput { .. })));
        assert!(matches!(oracle_n2(1.0, PI), Err(Error::WallInput { .. })));
    }

    #[test]
    fn reduce_examples() {
        let check = |pts: &[[f64; 3]], r: f64, t: f64| {
            let (rr, tt) = reduce_n2(&Configuration::from_arrays(pts).unwrap());
            assert!((rr - r).abs() < 1e-15 && (tt - t).abs() < 1e-15, "{rr} {tt}");
        };
        check(&[[1., 0., 0.], [0., 1., 0.]], 1.0, FRAC_PI_2);
        check(&[[2., 0., 0.], [0., 0., 6.]], 3.0, FRAC_PI_2);
        check(&[[0., 1., 0.], [0., -3., 0.]], 3.0, PI);
    }

    #[test]
    fn distribution_parsing() {
        assert_eq!("gaussian".parse::<Distribution>().unwrap(), Distribution::Gaussian);
        assert_eq!("sphere".parse::<Distribution>().unwrap(), Distribution::UnitSphere);
        assert_eq!(
            "shell:0.5:2".parse::<Distribution>().unwrap(),
            Distribution::Shell { r_min: 0.5, r_max: 2.0 }
        );
        for bad in ["", "cube", "shell:2", "shell:2:1", "shell:0:1", "shell:a:b"] {
            assert!(bad.parse::<Distribution>().is_err(), "{bad}");
        }
        let d = Distribution::Shell { r_min: 0.5, r_max: 2.0 };
        assert_eq!(d.to_string().parse::<Distribution>().unwrap(), d);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = SampleSpec::new(4, 10, 99);
        assert_eq!(sample_config(&spec, 3).unwrap(), sample_config(&spec, 3).unwrap());
        assert_ne!(sample_config(&spec, 3).unwrap().points(), sample_config(&spec, 4).unwrap().points());
        let c = sample_config(&spec, 0).unwrap();
        assert!((c.rms_norm() - 1.0).abs() < 1e-14);
        assert!(c.min_wall_distance() >= spec.wall_guard);
    }

    #[test]
    fn shells_and_spheres_sample() {
        for dist in [Distribution::UnitSphere, Distribution::Shell { r_min: 0.2, r_max: 3.0 }] {
            let spec = SampleSpec::new(5, 4, 1).with_distribution(dist);
            let rep = monte_carlo(&spec).unwrap();
            assert_eq!(rep.evaluated, 4);
            assert!(rep.violations.is_empty());
        }
    }

    #[test]
    fn impossible_guard_overflows() {
        let spec = SampleSpec::new(10, 1, 0).with_distribution(Distribution::UnitSphere).with_wall_guard(0.9);
        assert_eq!(sample_config(&spec, 0), Err(Error::RejectionOverflow(MAX_REDRAWS)));
        let rep = monte_carlo(&spec).unwrap();
        assert_eq!((rep.evaluated, rep.rejected), (0, MAX_REDRAWS));
        assert!(rep.min_d.is_nan() && rep.argmin.is_none());
    }

    #[test]
    fn spec_validation() {
        assert!(SampleSpec::new(1, 1, 0).validate().is_err());
        assert!(SampleSpec::new(17, 1, 0).validate().is_err());
        assert!(SampleSpec::new(3, 0, 0).validate().is_err());
        assert!(SampleSpec::new(3, 1, 0).with_wall_guard(0.0).validate().is_err());
    }

    #[test]
    fn single_sample_report() {
        let rep = monte_carlo(&SampleSpec::new(3, 1, 5)).unwrap();
        assert_eq!(rep.min_d, rep.mean_d);
        assert_eq!(rep.mean_d, rep.max_d);
        assert_eq!(rep.histogram.iter().sum::<u64>(), 1);
    }

    #[test]
    fn monte_carlo_n2_respects_bound() {
        let rep = monte_carlo(&SampleSpec::new(2, 2000, 17)).unwrap();
        assert!(rep.violations.is_empty());
        assert!(rep.min_d >= 1.0 - VIOLATION_SLACK);
        assert!(rep.min_d <= rep.mean_d && rep.mean_d <= rep.max_d);
        assert_eq!(rep.attempts(), rep.evaluated + rep.rejected);
        assert_eq!(rep.histogram.iter().sum::<u64>() as usize, rep.evaluated);
        assert_eq!(rep.histogram[0], 0);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let spec = SampleSpec::new(4, 64, 3);
        let (a, b) = (monte_carlo(&spec).unwrap(), monte_carlo(&spec).unwrap());
        assert_eq!((a.min_d, a.mean_d, a.max_d, a.rejected), (b.min_d, b.mean_d, b.max_d, b.rejected));
        assert_eq!(a.histogram, b.histogram);
        assert_eq!(a.argmin, b.argmin);
    }

    #[test]
    fn recheck_agrees_with_direct_evaluation() {
        let c = sample_config(&SampleSpec::new(4, 1, 8), 0).unwrap();
        let d = evaluate(&c).unwrap().d;
        let rc = recheck(&c, 1);
        assert!((rc.full_pivot_d.unwrap() - d).abs() < 1e-10 * d);
        assert!((rc.rephased_d.unwrap() - d).abs() < 1e-9 * d);
    }

    #[test]
    fn histogram_bins() {
        assert_eq!(histogram_bin(0.5), 0);
        assert_eq!(histogram_bin(1.0), 1);
        assert_eq!(histogram_bin(9.99), 9);
        assert_eq!(histogram_bin(10.0), 10);
        assert_eq!(histogram_bin(1e30), 10);
    }

    #[test]
    fn minimize_two_points_reaches_collinear() {
        let c0 = Configuration::from_arrays(&[[1.0, 0.2, -0.3], [0.1, 0.8, 0.5]]).unwrap();
        let out = minimize_d(&c0, &MinimizeOptions::default()).unwrap();
        assert!(out.d < 1.0 + 1e-6, "{}", out.d);
        let (_, theta) = reduce_n2(&out.config);
        assert!(theta.sin() < 1e-3);
        assert!(out.config.min_wall_distance() >= 1e-4);
    }

    #[test]
    fn minimize_stays_at_collinear_start() {
        let c0 = Configuration::from_arrays(&[[1., 0., 0.], [2., 0., 0.]]).unwrap();
        let opts = MinimizeOptions { restarts: 1, ..Default::default() };
        let out = minimize_d(&c0, &opts).unwrap();
        assert!((out.d - 1.0).abs() <= opts.ftol + 1e-12);
    }

    #[test]
    fn minimize_three_points_stays_above_one() {
        let c0 = sample_config(&SampleSpec::new(3, 1, 4), 0).unwrap();
        let d0 = evaluate(&c0).unwrap().d;
        let out = minimize_d(&c0, &MinimizeOptions { max_iter: 800, ..Default::default() }).unwrap();
        assert!(out.d <= d0 + 1e-12);
        assert!(out.d >= 1.0 - 1e-6, "{}", out.d);
    }

    #[test]
    fn fd_gradient_vanishes_at_collinear_minimum() {
        let c = Configuration::from_arrays(&[[1., 0., 0.], [2.5, 0., 0.]]).unwrap();
        let g = fd_gradient(&c, 1e-5).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-5), "{g:?}");
        let c = Configuration::from_arrays(&[[1., 0., 0.], [0.3, 1.1, 0.]]).unwrap();
        assert!(fd_gradient(&c, 1e-6).unwrap().iter().any(|v| v.abs() > 1e-3));
    }
}
