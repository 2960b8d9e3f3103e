//! `mcbound` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 enumeration guard
//! exceeded, 3 comparison found a violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::bound::{
    tail_lower_bound, tail_lower_bound_auto, tail_lower_bound_logdomain,
    tail_lower_bound_logdomain_auto, BoundCurve, BoundPoint, Representation,
};
use crate::ensemble::{EnsembleParams, WeightPmf, DEFAULT_ENUMERATION_GUARD};
use crate::error::{Error, Result};
use crate::montecarlo::{
    compare_curves, report, run_simulation, ComparisonReport, ComparisonRow, EmpiricalCurve,
    SimulationConfig, DEFAULT_CONFIDENCE,
};
use crate::numeric::{sig15_f64, sig15_rational};
use crate::oracle::ensemble_summary;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Relative agreement floor for the exact vs log-domain cross-check.
pub const CROSS_CHECK_FLOOR: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "mcbound",
    version,
    about = "Min-cut capacity bounds for weighted random graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower bound on Pr[λ(G) ≥ δ] from the closed-form expectations.
    Bound(BoundArgs),
    /// Monte Carlo estimate of Pr[λ(G) ≥ δ].
    Simulate(SimulateArgs),
    /// Exact tail and cut spectra by full enumeration (small ensembles only).
    Exact(ExactArgs),
    /// Gap table between a bound file and an empirical file.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    /// Number of vertices.
    #[arg(long)]
    pub k: usize,
    /// Number of edges.
    #[arg(long)]
    pub n: usize,
    /// Edge-weight pmf over 1..q, e.g. 0.1,0.2,0.4,0.2,0.1 or 1/2,1/2.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: String,
}

impl EnsembleArgs {
    fn params(&self) -> Result<EnsembleParams> {
        EnsembleParams::new(self.k, self.n, WeightPmf::parse(&self.mu)?)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Json
    }

    fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepresentationArg {
    Exact,
    Log,
    Both,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Largest δ; defaults to twice the first δ with a non-positive bound.
    #[arg(long)]
    pub delta_max: Option<u64>,
    #[arg(long, value_enum, default_value_t = RepresentationArg::Exact)]
    pub representation: RepresentationArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 10_000)]
    pub instances: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Caps the reported δ range, which otherwise ends at the first δ with
    /// no instance at or above it.
    #[arg(long)]
    pub delta_max: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Largest δ for the tail; defaults to q·n + 1.
    #[arg(long)]
    pub delta_max: Option<u64>,
    /// Maximum number of (edge set, weight assignment) configurations.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_GUARD)]
    pub guard: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// JSON written by `bound`.
    pub bound_file: PathBuf,
    /// JSON written by `simulate` (or by `bound`, compared as a point curve).
    pub empirical_file: PathBuf,
    /// Inclusive δ range for the max-gap summary, `LO..HI`.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(u64, u64)>,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_window(s: &str) -> std::result::Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: u64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower end in {s:?}"))?;
    let hi: u64 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad upper end in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty window {s:?}"));
    }
    Ok((lo, hi))
}

/// Parameters and outputs of one invocation, embedded in every JSON file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub code_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationArg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(subcommand: &str) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            ..Self::default()
        }
    }

    fn with_ensemble(mut self, params: &EnsembleParams) -> Self {
        self.k = Some(params.k);
        self.n = Some(params.n);
        self.mu = Some(params.pmf.to_string());
        self
    }

    fn params(&self, path: &Path) -> Result<EnsembleParams> {
        let malformed = |reason: &str| Error::MalformedFile {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        let (k, n, mu) = match (self.k, self.n, &self.mu) {
            (Some(k), Some(n), Some(mu)) => (k, n, mu),
            _ => return Err(malformed("manifest lacks k, n or mu")),
        };
        EnsembleParams::new(k, n, WeightPmf::parse(mu)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundPointRecord {
    pub delta: u64,
    pub raw: String,
    pub clamped: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_exact: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CrossCheck {
    pub max_relative_disagreement: String,
    pub floor: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundFile {
    pub kind: String,
    pub manifest: RunManifest,
    pub representation: String,
    pub points: Vec<BoundPointRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_points: Option<Vec<BoundPointRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EmpiricalPointRecord {
    pub delta: u64,
    pub successes: u64,
    pub empirical: String,
    pub ci_low: String,
    pub ci_high: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EmpiricalFile {
    pub kind: String,
    pub manifest: RunManifest,
    pub instances: u64,
    pub seed: u64,
    pub confidence: String,
    pub histogram: BTreeMap<u64, u64>,
    pub points: Vec<EmpiricalPointRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExactValue {
    pub value: String,
    pub exact: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExactFile {
    pub kind: String,
    pub manifest: RunManifest,
    /// `δ ↦ Pr[λ(G) ≥ δ]`
    pub tail: BTreeMap<u64, ExactValue>,
    /// `w ↦ E[B_w(G)]`
    pub expected_b: BTreeMap<u64, ExactValue>,
    /// `"u,v,w" ↦ E[A_{u,v,w}(G)]`, non-zero cells only.
    pub expected_a: Vec<(String, ExactValue)>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub delta: u64,
    pub clamped_bound: String,
    pub empirical: String,
    pub gap: String,
    pub violation: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComparisonFile {
    pub kind: String,
    pub manifest: RunManifest,
    pub bound_manifest: RunManifest,
    pub empirical_manifest: RunManifest,
    pub window: (u64, u64),
    pub max_gap: Option<(u64, String)>,
    pub any_violation: bool,
    pub rows: Vec<ComparisonRecord>,
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::GuardExceeded { .. } => EXIT_GUARD,
                _ => EXIT_USAGE,
            }
        }
    }
}

pub fn execute(command: &Command) -> Result<i32> {
    match command {
        Command::Bound(args) => cmd_bound(args).map(|_| EXIT_OK),
        Command::Simulate(args) => cmd_simulate(args).map(|_| EXIT_OK),
        Command::Exact(args) => cmd_exact(args).map(|_| EXIT_OK),
        Command::Compare(args) => cmd_compare(args).map(|rep| {
            if rep.any_violation() {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }),
    }
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<(String, String)>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Self {
        Self {
            dir,
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn names(&self, json_name: &str) -> Vec<String> {
        self.files
            .iter()
            .map(|(n, _)| n.clone())
            .chain(std::iter::once(json_name.to_string()))
            .collect()
    }

    fn write(self, json: Option<(&str, String)>) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(self.dir)?;
        let mut written = Vec::new();
        for (name, contents) in self
            .files
            .into_iter()
            .chain(json.map(|(n, c)| (n.to_string(), c)))
        {
            let path = self.dir.join(&name);
            fs::write(&path, contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn clamp_exact(r: &BigRational) -> BigRational {
    if r.is_negative() {
        BigRational::from_integer(0.into())
    } else {
        r.clone()
    }
}

fn bound_records(curve: &BoundCurve) -> Vec<BoundPointRecord> {
    curve
        .points
        .iter()
        .map(|p| match &p.exact {
            Some(r) => BoundPointRecord {
                delta: p.delta,
                raw: sig15_rational(r),
                clamped: sig15_rational(&clamp_exact(r)),
                raw_exact: Some(format!("{}/{}", r.numer(), r.denom())),
            },
            None => BoundPointRecord {
                delta: p.delta,
                raw: sig15_f64(p.raw),
                clamped: sig15_f64(p.clamped()),
                raw_exact: None,
            },
        })
        .collect()
}

fn bound_csv(records: &[BoundPointRecord]) -> String {
    let mut s = String::from("delta,raw,clamped\n");
    for r in records {
        let _ = writeln!(s, "{},{},{}", r.delta, r.raw, r.clamped);
    }
    s
}

/// Writes the bound curve; returns the primary curve.
pub fn cmd_bound(args: &BoundArgs) -> Result<BoundCurve> {
    let params = args.ensemble.params()?;
    let exact = |p: &EnsembleParams| match args.delta_max {
        Some(d) => tail_lower_bound(p, d),
        None => tail_lower_bound_auto(p),
    };
    let log = |p: &EnsembleParams, d: Option<u64>| match d {
        Some(d) => tail_lower_bound_logdomain(p, d),
        None => tail_lower_bound_logdomain_auto(p),
    };
    let (primary, secondary) = match args.representation {
        RepresentationArg::Exact => (exact(&params), None),
        RepresentationArg::Log => (log(&params, args.delta_max), None),
        RepresentationArg::Both => {
            let e = exact(&params);
            let l = log(&params, Some(e.delta_max()));
            (e, Some(l))
        }
    };
    let cross = secondary
        .as_ref()
        .map(|l| l.max_relative_disagreement(&primary, CROSS_CHECK_FLOOR));

    let records = bound_records(&primary);
    let log_records = secondary.as_ref().map(bound_records);
    let mut out = Outputs::new(&args.output.out_dir);
    if args.output.format.csv() {
        out.add("bound.csv", bound_csv(&records));
        if let Some(l) = &log_records {
            out.add("bound_log.csv", bound_csv(l));
        }
    }
    let json_name = "bound.json";
    let mut manifest = RunManifest::new("bound").with_ensemble(&params);
    manifest.delta_max = Some(primary.delta_max());
    manifest.representation = Some(args.representation);
    manifest.outputs = if args.output.format.json() {
        out.names(json_name)
    } else {
        out.files.iter().map(|(n, _)| n.clone()).collect()
    };
    let json = if args.output.format.json() {
        let file = BoundFile {
            kind: "bound".into(),
            manifest,
            representation: primary.representation.as_str().into(),
            points: records,
            log_points: log_records,
            cross_check: cross.map(|c| CrossCheck {
                max_relative_disagreement: sig15_f64(c),
                floor: sig15_f64(CROSS_CHECK_FLOOR),
            }),
        };
        Some((json_name, to_json(&file)?))
    } else {
        None
    };
    let written = out.write(json)?;
    println!(
        "bound: k={} n={} mu={} delta 0..={} ({})",
        params.k,
        params.n,
        params.pmf,
        primary.delta_max(),
        primary.representation.as_str()
    );
    if let Some(c) = cross {
        println!(
            "exact vs log-domain max relative disagreement: {}",
            sig15_f64(c)
        );
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(primary)
}

fn empirical_records(curve: &EmpiricalCurve) -> Vec<EmpiricalPointRecord> {
    curve
        .points
        .iter()
        .map(|p| EmpiricalPointRecord {
            delta: p.delta,
            successes: p.successes,
            empirical: sig15_f64(p.estimate),
            ci_low: sig15_f64(p.ci_low),
            ci_high: sig15_f64(p.ci_high),
        })
        .collect()
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<EmpiricalCurve> {
    let params = args.ensemble.params()?;
    let config = SimulationConfig {
        params: params.clone(),
        instances: args.instances,
        master_seed: args.seed,
        delta_max: args.delta_max,
        workers: args.workers,
    };
    let curve = run_simulation(&config)?;
    let records = empirical_records(&curve);

    let mut out = Outputs::new(&args.output.out_dir);
    if args.output.format.csv() {
        let mut s = String::from("delta,empirical,ci_low,ci_high\n");
        for r in &records {
            let _ = writeln!(s, "{},{},{},{}", r.delta, r.empirical, r.ci_low, r.ci_high);
        }
        out.add("empirical.csv", s);
        let mut h = String::from("lambda,count\n");
        for (l, c) in &curve.histogram {
            let _ = writeln!(h, "{l},{c}");
        }
        out.add("histogram.csv", h);
    }
    let json_name = "empirical.json";
    // worker count is left out so the files do not depend on it
    let mut manifest = RunManifest::new("simulate").with_ensemble(&params);
    manifest.instances = Some(args.instances);
    manifest.seed = Some(args.seed);
    manifest.delta_max = args.delta_max;
    manifest.outputs = if args.output.format.json() {
        out.names(json_name)
    } else {
        out.files.iter().map(|(n, _)| n.clone()).collect()
    };
    let json = if args.output.format.json() {
        let file = EmpiricalFile {
            kind: "empirical".into(),
            manifest,
            instances: curve.instances,
            seed: curve.master_seed,
            confidence: sig15_f64(curve.confidence),
            histogram: curve.histogram.clone(),
            points: records,
        };
        Some((json_name, to_json(&file)?))
    } else {
        None
    };
    let written = out.write(json)?;
    println!(
        "simulate: k={} n={} mu={} instances={} seed={} delta 0..={}",
        params.k,
        params.n,
        params.pmf,
        args.instances,
        args.seed,
        curve.points.len() - 1
    );
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(curve)
}

fn exact_value(r: &BigRational) -> ExactValue {
    ExactValue {
        value: sig15_rational(r),
        exact: format!("{}/{}", r.numer(), r.denom()),
    }
}

pub fn cmd_exact(args: &ExactArgs) -> Result<ExactFile> {
    let params = args.ensemble.params()?;
    let summary = ensemble_summary(&params, args.guard)?;
    let delta_max = args
        .delta_max
        .unwrap_or(params.q() as u64 * params.n as u64 + 1);
    let max_w = params.q() as u64 * params.n as u64;

    let tail: BTreeMap<u64, ExactValue> = (0..=delta_max)
        .map(|d| (d, exact_value(&summary.tail(d))))
        .collect();
    let expected_b: BTreeMap<u64, ExactValue> = (0..=max_w)
        .map(|w| (w, exact_value(&summary.expected_b(w))))
        .collect();
    let expected_a: Vec<(String, ExactValue)> = summary
        .expected_a
        .iter()
        .map(|((u, v, w), r)| (format!("{u},{v},{w}"), exact_value(r)))
        .collect();

    let mut out = Outputs::new(&args.output.out_dir);
    if args.output.format.csv() {
        let mut s = String::from("delta,probability,exact\n");
        for (d, v) in &tail {
            let _ = writeln!(s, "{d},{},{}", v.value, v.exact);
        }
        out.add("exact_tail.csv", s);
        let mut s = String::from("w,expected,exact\n");
        for (w, v) in &expected_b {
            let _ = writeln!(s, "{w},{},{}", v.value, v.exact);
        }
        out.add("exact_bw.csv", s);
        let mut s = String::from("u,v,w,expected,exact\n");
        for (cell, v) in &expected_a {
            let _ = writeln!(s, "{cell},{},{}", v.value, v.exact);
        }
        out.add("exact_a.csv", s);
    }
    let json_name = "exact.json";
    let mut manifest = RunManifest::new("exact").with_ensemble(&params);
    manifest.delta_max = Some(delta_max);
    manifest.guard = Some(args.guard);
    manifest.outputs = if args.output.format.json() {
        out.names(json_name)
    } else {
        out.files.iter().map(|(n, _)| n.clone()).collect()
    };
    let file = ExactFile {
        kind: "exact".into(),
        manifest,
        tail,
        expected_b,
        expected_a,
    };
    let json = if args.output.format.json() {
        Some((json_name, to_json(&file)?))
    } else {
        None
    };
    let written = out.write(json)?;
    println!(
        "exact: k={} n={} mu={} ({} configurations)",
        params.k,
        params.n,
        params.pmf,
        params.configuration_count()
    );
    for (d, v) in &file.tail {
        if *d >= 1 {
            println!("Pr[lambda >= {d}] = {}", v.exact_display());
        }
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(file)
}

impl ExactValue {
    fn exact_display(&self) -> String {
        self.exact
            .strip_suffix("/1")
            .unwrap_or(&self.exact)
            .to_string()
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::MalformedFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn from_value<T: for<'de> Deserialize<'de>>(path: &Path, v: serde_json::Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::MalformedFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn parse_f64(path: &Path, s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::MalformedFile {
        path: path.display().to_string(),
        reason: format!("not a number: {s:?}"),
    })
}

fn load_bound(path: &Path) -> Result<(BoundFile, BoundCurve)> {
    let file: BoundFile = from_value(path, read_json(path)?)?;
    if file.kind != "bound" {
        return Err(Error::MalformedFile {
            path: path.display().to_string(),
            reason: format!("expected a bound file, found kind {:?}", file.kind),
        });
    }
    let params = file.manifest.params(path)?;
    let points = file
        .points
        .iter()
        .map(|r| {
            Ok(BoundPoint {
                delta: r.delta,
                raw: parse_f64(path, &r.raw)?,
                exact: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let representation = if file.representation == "log" {
        Representation::LogDomain
    } else {
        Representation::Exact
    };
    let curve = BoundCurve {
        params,
        representation,
        points,
    };
    Ok((file, curve))
}

fn manifest_differences(a: &RunManifest, b: &RunManifest) -> Vec<String> {
    let mut diffs = Vec::new();
    if a.k != b.k {
        diffs.push(format!("k ({:?} vs {:?})", a.k, b.k));
    }
    if a.n != b.n {
        diffs.push(format!("n ({:?} vs {:?})", a.n, b.n));
    }
    if a.mu != b.mu {
        diffs.push(format!("mu ({:?} vs {:?})", a.mu, b.mu));
    }
    diffs
}

pub fn cmd_compare(args: &CompareArgs) -> Result<ComparisonReport> {
    let (bound_file, bound) = load_bound(&args.bound_file)?;
    let other = read_json(&args.empirical_file)?;
    let kind = other
        .get("kind")
        .and_then(|k| k.as_str())
        .unwrap_or("")
        .to_string();
    let window = args.window.unwrap_or((1, bound.delta_max()));

    let (other_manifest, rep) = match kind.as_str() {
        "empirical" => {
            let file: EmpiricalFile = from_value(&args.empirical_file, other)?;
            let diffs = manifest_differences(&bound_file.manifest, &file.manifest);
            if !diffs.is_empty() {
                return Err(Error::Mismatch(format!(
                    "manifests differ in {}",
                    diffs.join(", ")
                )));
            }
            let emp = EmpiricalCurve::from_histogram(
                file.manifest.params(&args.empirical_file)?,
                file.seed,
                file.histogram.clone(),
                file.manifest.delta_max,
                DEFAULT_CONFIDENCE,
            );
            if emp.instances != file.instances {
                return Err(Error::MalformedFile {
                    path: args.empirical_file.display().to_string(),
                    reason: "histogram does not sum to the instance count".into(),
                });
            }
            (file.manifest, compare_curves(&bound, &emp, window)?)
        }
        "bound" => {
            // a bound file read as a point curve with a zero-width interval
            let (file, as_emp) = load_bound(&args.empirical_file)?;
            let diffs = manifest_differences(&bound_file.manifest, &file.manifest);
            if !diffs.is_empty() {
                return Err(Error::Mismatch(format!(
                    "manifests differ in {}",
                    diffs.join(", ")
                )));
            }
            let rows = bound
                .points
                .iter()
                .map(|b| {
                    let e = as_emp.point(b.delta).map_or(0.0, |p| p.clamped());
                    ComparisonRow {
                        delta: b.delta,
                        clamped_bound: b.clamped(),
                        empirical: e,
                        ci_high: e,
                        gap: e - b.clamped(),
                        violation: b.clamped() > e,
                    }
                })
                .collect();
            (file.manifest, report(rows, window))
        }
        other => {
            return Err(Error::MalformedFile {
                path: args.empirical_file.display().to_string(),
                reason: format!("expected an empirical or bound file, found kind {other:?}"),
            })
        }
    };

    let records: Vec<ComparisonRecord> = rep
        .rows
        .iter()
        .map(|r| ComparisonRecord {
            delta: r.delta,
            clamped_bound: sig15_f64(r.clamped_bound),
            empirical: sig15_f64(r.empirical),
            gap: sig15_f64(r.gap),
            violation: r.violation,
        })
        .collect();
    let mut out = Outputs::new(&args.output.out_dir);
    if args.output.format.csv() {
        let mut s = String::from("delta,clamped_bound,empirical,gap,violation\n");
        for r in &records {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.delta, r.clamped_bound, r.empirical, r.gap, r.violation
            );
        }
        out.add("compare.csv", s);
    }
    let json_name = "compare.json";
    let mut manifest = RunManifest::new("compare");
    manifest.k = bound_file.manifest.k;
    manifest.n = bound_file.manifest.n;
    manifest.mu = bound_file.manifest.mu.clone();
    manifest.window = Some(format!("{}..{}", window.0, window.1));
    manifest.inputs = vec![
        args.bound_file.display().to_string(),
        args.empirical_file.display().to_string(),
    ];
    manifest.outputs = if args.output.format.json() {
        out.names(json_name)
    } else {
        out.files.iter().map(|(n, _)| n.clone()).collect()
    };
    let json = if args.output.format.json() {
        let file = ComparisonFile {
            kind: "comparison".into(),
            manifest,
            bound_manifest: bound_file.manifest,
            empirical_manifest: other_manifest,
            window,
            max_gap: rep.max_gap.map(|(d, g)| (d, sig15_f64(g))),
            any_violation: rep.any_violation(),
            rows: records,
        };
        Some((json_name, to_json(&file)?))
    } else {
        None
    };
    let written = out.write(json)?;

    println!(
        "{:>6} {:>18} {:>18} {:>18}  violation",
        "delta", "bound", "empirical", "gap"
    );
    for r in &rep.rows {
        println!(
            "{:>6} {:>18} {:>18} {:>18}  {}",
            r.delta,
            sig15_f64(r.clamped_bound),
            sig15_f64(r.empirical),
            sig15_f64(r.gap),
            r.violation
        );
    }
    if let Some((d, g)) = rep.max_gap {
        println!(
            "max gap over delta {}..{}: {} at delta {}",
            window.0,
            window.1,
            sig15_f64(g),
            d
        );
    }
    if rep.any_violation() {
        println!("VIOLATION: bound exceeds the empirical upper confidence limit");
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert_eq!(parse_window("1..4"), Ok((1, 4)));
        assert_eq!(parse_window("1..=15"), Ok((1, 15)));
        assert!(parse_window("4..1").is_err());
        assert!(parse_window("3").is_err());
    }

    #[test]
    fn usage_errors_map_to_exit_one() {
        assert_eq!(run(["mcbound", "bound", "--k", "3"]), EXIT_USAGE);
        assert_eq!(run(["mcbound", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["mcbound", "--help"]), EXIT_OK);
    }

    #[test]
    fn manifest_differences_are_listed() {
        let a = RunManifest {
            k: Some(3),
            n: Some(3),
            mu: Some("1".into()),
            ..RunManifest::default()
        };
        let b = RunManifest {
            n: Some(2),
            mu: Some("0.5,0.5".into()),
            ..a.clone()
        };
        let diffs = manifest_differences(&a, &b);
        assert_eq!(diffs.len(), 2);
        assert!(diffs[0].starts_with("n ") && diffs[1].starts_with("mu "));
    }
}
