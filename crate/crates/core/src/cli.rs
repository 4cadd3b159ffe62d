//! Configuration and report files, and the command implementations behind
//! the `sympbr` binary.
//!
//! Exit codes are a stable contract: `0` ok, `2` bad input, `3` degenerate
//! normalizer, `4` invariance failure, `5` conjecture violation (including a
//! singular quaternionic matrix).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::determinant::evaluate;
use crate::error::Error;
use crate::geometry::{validate_configuration, Configuration, Vec3, DEFAULT_TOL};
use crate::invariance::{run_checks, Status};
use crate::quatlin::polar_flag;
use crate::search::{
    minimize_d, monte_carlo, oracle_n2, Distribution, MinimizeOptions, SampleSpec, SearchReport, HISTOGRAM_EDGES,
    VIOLATION_SLACK,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_INVARIANCE: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;

/// Number of lowest samples handed to the minimizer by `search --minimize`.
pub const MINIMIZE_FROM: usize = 5;

/// A float written with 17 significant digits, so that re-reading it is
/// exact. Non-finite values are written as `null` and read back as NaN.
#[derive(Debug, Clone, Copy)]
pub struct Real(pub f64);

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.0.to_bits() == o.0.to_bits() || (self.0.is_nan() && o.0.is_nan())
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(format_real(self.0)).map_err(S::Error::custom)?.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

/// Input document: `{"n": 2, "points": [[1,0,0],[0,1,0]], "tol": 1e-9}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: usize,
    pub points: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| format!("cannot parse configuration: {e}"))?;
        if cfg.points.len() != cfg.n {
            return Err(format!("n = {} but {} points given", cfg.n, cfg.points.len()));
        }
        Ok(cfg)
    }

    pub fn to_configuration(&self, tol_override: Option<f64>) -> Result<Configuration, Error> {
        let pts: Vec<Vec3> = self.points.iter().copied().map(Vec3::from_array).collect();
        validate_configuration(&pts, tol_override.or(self.tol).unwrap_or(DEFAULT_TOL))
    }
}

fn real_points(c: &Configuration) -> Vec<[Real; 3]> {
    c.points().iter().map(|p| p.to_array().map(Real)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagResiduals {
    pub unitarity_residual: Real,
    pub pairing_residual: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeRecord {
    pub input_digest: String,
    pub n: usize,
    pub points: Vec<[Real; 3]>,
    #[serde(rename = "D")]
    pub d: Real,
    pub im_residual: Real,
    pub cond_hint: Real,
    pub trusted: bool,
    /// `[re, im]`
    #[serde(rename = "P")]
    pub p: [Real; 2],
    #[serde(rename = "det_M")]
    pub det_m: [Real; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag_map: Option<FlagResiduals>,
    pub timing_ms: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub family: String,
    pub trials: usize,
    pub max_residual: Real,
    pub tolerance: Real,
    pub status: String,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRecord {
    pub input_digest: String,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub residuals: Vec<ResidualRow>,
    pub timing_ms: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecRecord {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub distribution: String,
    pub wall_guard: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub index: u64,
    pub reason: String,
    #[serde(rename = "D")]
    pub d: Real,
    pub im_residual: Real,
    pub cond_hint: Real,
    pub recheck_full_pivot_d: Real,
    pub recheck_rephased_d: Real,
    pub points: Vec<[Real; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizedRecord {
    pub start_index: u64,
    pub start_d: Real,
    pub final_d: Real,
    pub evaluations: usize,
    pub points: Vec<[Real; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// Bin upper edges; the last bin is open.
    pub edges: Vec<Real>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub spec: SpecRecord,
    pub evaluated: usize,
    pub rejected: usize,
    #[serde(rename = "min_D")]
    pub min_d: Real,
    #[serde(rename = "mean_D")]
    pub mean_d: Real,
    #[serde(rename = "max_D")]
    pub max_d: Real,
    pub argmin: Option<Vec<[Real; 3]>>,
    pub histogram: Histogram,
    pub violations: Vec<ViolationRecord>,
    #[serde(default)]
    pub minimized: Vec<MinimizedRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    pub timing_ms: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Record {
    Compute(ComputeRecord),
    Verify(VerifyRecord),
    Search(SearchRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub records: Vec<Record>,
}

impl ReportFile {
    pub fn new(records: Vec<Record>) -> Self {
        Self { tool: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into(), records }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// What a command produced: exit code and the text for stdout/stderr.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn input_error(msg: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {}\n", msg.into()) }
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::DegenerateNormalizer(_) => EXIT_DEGENERATE,
        Error::SingularConfiguration { .. } => EXIT_VIOLATION,
        _ => EXIT_INPUT,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    Outcome { code: exit_code_for(e), stdout: String::new(), stderr: format!("error: {e}\n") }
}

fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn elapsed_ms(start: Instant) -> Real {
    Real(start.elapsed().as_secs_f64() * 1e3)
}

fn load(path: &Path, tol: Option<f64>) -> Result<(Configuration, String), Outcome> {
    let bytes = std::fs::read(path).map_err(|e| Outcome::input_error(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Outcome::input_error("configuration is not UTF-8"))?;
    let file = ConfigFile::parse(&text).map_err(Outcome::input_error)?;
    let c = file.to_configuration(tol).map_err(|e| error_outcome(&e))?;
    Ok((c, digest(&bytes)))
}

/// Writes the report to `out` (or returns it as stdout text).
fn emit(report: &ReportFile, out: Option<&Path>, mut outcome: Outcome) -> Outcome {
    let json = report.to_json();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, json + "\n") {
                return Outcome::input_error(format!("cannot write {}: {e}", path.display()));
            }
        }
        None => outcome.stdout.push_str(&(json + "\n")),
    }
    outcome
}

pub fn cmd_compute(input: &Path, tol: Option<f64>, flag_map: bool, out: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let (c, input_digest) = match load(input, tol) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let rep = match evaluate(&c) {
        Ok(r) => r,
        Err(e) => return error_outcome(&e),
    };
    let flag = if flag_map {
        match polar_flag(&c) {
            Ok(f) => Some(FlagResiduals {
                unitarity_residual: Real(f.unitarity_residual()),
                pairing_residual: Real(f.pairing_residual()),
            }),
            Err(e) => return error_outcome(&e),
        }
    } else {
        None
    };
    let record = ComputeRecord {
        input_digest,
        n: c.n(),
        points: real_points(&c),
        d: Real(rep.d),
        im_residual: Real(rep.im_residual),
        cond_hint: Real(rep.cond_hint),
        trusted: rep.trusted,
        p: [Real(rep.p.re), Real(rep.p.im)],
        det_m: [Real(rep.det_m.re), Real(rep.det_m.im)],
        flag_map: flag,
        timing_ms: elapsed_ms(start),
    };
    emit(&ReportFile::new(vec![Record::Compute(record)]), out, Outcome::default())
}

pub fn cmd_verify(input: &Path, tol: Option<f64>, trials: usize, seed: u64, out: Option<&Path>) -> Outcome {
    let start = Instant::now();
    let (c, input_digest) = match load(input, tol) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let results = match run_checks(&c, trials, seed) {
        Ok(r) => r,
        Err(e) => return error_outcome(&e),
    };
    let mut outcome = Outcome::default();
    for r in &results {
        let status = r.status();
        let _ = writeln!(
            outcome.stderr,
            "{:<18} {:<16} max residual {:.3e} (tol {:.0e})",
            r.family.name(),
            status,
            r.max_residual,
            r.family.tolerance()
        );
        if status == Status::Fail {
            outcome.code = EXIT_INVARIANCE;
            let _ = writeln!(outcome.stderr, "  witness: {}", r.witness);
        }
    }
    let residuals = results
        .iter()
        .map(|r| ResidualRow {
            family: r.family.name().into(),
            trials: r.trials,
            max_residual: Real(r.max_residual),
            tolerance: Real(r.family.tolerance()),
            status: r.status().to_string(),
            witness: r.witness.clone(),
        })
        .collect();
    let record = VerifyRecord { input_digest, n: c.n(), trials, seed, residuals, timing_ms: elapsed_ms(start) };
    emit(&ReportFile::new(vec![Record::Verify(record)]), out, outcome)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchArgs {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub distribution: String,
    pub minimize: bool,
    pub out: Option<PathBuf>,
}

/// CSV of per-sample results: index, D, im_residual, cond_hint, then
/// `x1,y1,z1,…`.
pub fn search_csv(report: &SearchReport) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["index".to_string(), "D".into(), "im_residual".into(), "cond_hint".into()];
    for k in 1..=report.spec.n {
        header.extend([format!("x{k}"), format!("y{k}"), format!("z{k}")]);
    }
    w.write_record(&header).expect("in-memory write");
    for rec in &report.records {
        let (d, im, cond) = match &rec.result {
            Ok(r) => (r.d, r.im_residual, r.cond_hint),
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        };
        let mut row = vec![rec.index.to_string(), format_real(d), format_real(im), format_real(cond)];
        match &rec.config {
            Some(c) => row.extend(c.points().iter().flat_map(|p| p.to_array()).map(format_real)),
            None => row.extend(std::iter::repeat_n(String::new(), 3 * report.spec.n)),
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn cmd_search(args: &SearchArgs) -> Outcome {
    let start = Instant::now();
    let distribution: Distribution = match args.distribution.parse() {
        Ok(d) => d,
        Err(e) => return error_outcome(&e),
    };
    let spec = SampleSpec::new(args.n, args.count, args.seed).with_distribution(distribution);
    let report = match monte_carlo(&spec) {
        Ok(r) => r,
        Err(e) => return error_outcome(&e),
    };

    let mut violations: Vec<ViolationRecord> = report
        .violations
        .iter()
        .map(|v| ViolationRecord {
            index: v.index,
            reason: v.reason.to_string(),
            d: Real(v.report.map_or(f64::NAN, |r| r.d)),
            im_residual: Real(v.report.map_or(f64::NAN, |r| r.im_residual)),
            cond_hint: Real(v.report.map_or(f64::NAN, |r| r.cond_hint)),
            recheck_full_pivot_d: Real(v.recheck.full_pivot_d.unwrap_or(f64::NAN)),
            recheck_rephased_d: Real(v.recheck.rephased_d.unwrap_or(f64::NAN)),
            points: real_points(&v.config),
        })
        .collect();

    let mut minimized = Vec::new();
    if args.minimize {
        let mut ranked: Vec<(u64, f64, &Configuration)> = report
            .records
            .iter()
            .filter_map(|r| match (&r.config, &r.result) {
                (Some(c), Ok(rep)) => Some((r.index, rep.d, c)),
                _ => None,
            })
            .collect();
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        for (index, d0, c) in ranked.into_iter().take(MINIMIZE_FROM) {
            let opts = MinimizeOptions { seed: args.seed ^ index, ..Default::default() };
            match minimize_d(c, &opts) {
                Ok(m) => {
                    if m.d < 1.0 - VIOLATION_SLACK {
                        let rep = evaluate(&m.config).ok();
                        let rc = crate::search::recheck(&m.config, opts.seed);
                        violations.push(ViolationRecord {
                            index,
                            reason: "minimized D below 1".into(),
                            d: Real(m.d),
                            im_residual: Real(rep.map_or(f64::NAN, |r| r.im_residual)),
                            cond_hint: Real(rep.map_or(f64::NAN, |r| r.cond_hint)),
                            recheck_full_pivot_d: Real(rc.full_pivot_d.unwrap_or(f64::NAN)),
                            recheck_rephased_d: Real(rc.rephased_d.unwrap_or(f64::NAN)),
                            points: real_points(&m.config),
                        });
                    }
                    minimized.push(MinimizedRecord {
                        start_index: index,
                        start_d: Real(d0),
                        final_d: Real(m.d),
                        evaluations: m.evaluations,
                        points: real_points(&m.config),
                    });
                }
                Err(e) => {
                    return Outcome {
                        code: exit_code_for(&e),
                        stdout: String::new(),
                        stderr: format!("error: minimization from sample {index} failed: {e}\n"),
                    }
                }
            }
        }
    }

    let csv_path = args.out.as_ref().map(|p| p.with_extension("csv"));
    if let Some(path) = &csv_path {
        if let Err(e) = std::fs::write(path, search_csv(&report)) {
            return Outcome::input_error(format!("cannot write {}: {e}", path.display()));
        }
    }

    let mut outcome = Outcome::default();
    let _ = writeln!(
        outcome.stderr,
        "n={} count={} seed={} distribution={}: evaluated {} rejected {} min D {:.12} mean D {:.6e} max D {:.6e}",
        spec.n, spec.count, spec.seed, spec.distribution, report.evaluated, report.rejected, report.min_d, report.mean_d, report.max_d
    );
    for m in &minimized {
        let _ = writeln!(outcome.stderr, "minimized from sample {}: {:.12} -> {:.12}", m.start_index, m.start_d.0, m.final_d.0);
    }
    if !violations.is_empty() {
        outcome.code = EXIT_VIOLATION;
        for v in &violations {
            let pts: Vec<[f64; 3]> = v.points.iter().map(|p| p.map(|r| r.0)).collect();
            let _ = writeln!(outcome.stderr, "VIOLATION sample {} ({}): D = {:e} at {:?}", v.index, v.reason, v.d.0, pts);
        }
    }

    let record = SearchRecord {
        spec: SpecRecord {
            n: spec.n,
            count: spec.count,
            seed: spec.seed,
            distribution: spec.distribution.to_string(),
            wall_guard: Real(spec.wall_guard),
        },
        evaluated: report.evaluated,
        rejected: report.rejected,
        min_d: Real(report.min_d),
        mean_d: Real(report.mean_d),
        max_d: Real(report.max_d),
        argmin: report.argmin.as_ref().map(real_points),
        histogram: Histogram { edges: HISTOGRAM_EDGES.iter().copied().map(Real).collect(), counts: report.histogram.clone() },
        violations,
        minimized,
        csv: csv_path.map(|p| p.display().to_string()),
        timing_ms: elapsed_ms(start),
    };
    emit(&ReportFile::new(vec![Record::Search(record)]), args.out.as_deref(), outcome)
}

pub fn cmd_oracle(r: f64, theta: f64) -> Outcome {
    match oracle_n2(r, theta) {
        Ok(d) => Outcome { code: EXIT_OK, stdout: format!("{d:.15}\n"), stderr: String::new() },
        Err(e) => error_outcome(&e),
    }
}
