//! Command-line front end. Each subcommand reads a JSON config (plus
//! `--set key=value` overrides), runs one analysis and writes a JSON report
//! that embeds the resolved config and seed, with an optional CSV series.
//!
//! Exit codes: 0 success, 1 analysis failure, 2 input or config error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cone::{
    construct_reference_cone, reference_graph, validate_cone_structure, ConeKind, CurveCone, CurveKind,
    ValidationParams,
};
use crate::error::Error;
use crate::ff::{projection_audit, skeleton_project, DyadicCube, FfParams};
use crate::fit::{
    beta_fit, biholder_certificate, classify_point, CertificateParams, ClassifyThresholds, ConeFamily, FitBudget,
    PointLabel,
};
use crate::geometry::{random_rotation, Frame, LocalWindow, SphericalGraph, Vec3};
use crate::harmonic::{great_circle_verdict, harmonic_test, BoundaryCurve, CurveSpec, HarmonicParams, QuadRule};
use crate::measure::{
    density_profile, monotonicity_audit, read_csv_points, read_obj, write_csv_points, write_obj, GaugeFunction,
    SampledSet,
};
use crate::steiner::shortest_network;
use crate::synth::{self, Wiggle};
use crate::trace::{tangent_certificate, trace, TraceParams};

/// Environment variable supplying the seed when neither `--seed` nor the
/// config sets one.
pub const SEED_ENV: &str = "FILMGEOM_SEED";
pub const DEFAULT_SEED: u64 = 7;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ANALYSIS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "filmgeom",
    version,
    about = "Analyses of sampled soap-film-like sets and minimal cones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON config file; missing entries take their defaults.
    #[arg(short, long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Config override `KEY=VALUE`; VALUE is JSON or a bare string, dotted
    /// keys reach nested entries (e.g. `budget.starts=4`).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub sets: Vec<String>,
    /// Input file: OBJ triangles, CSV points `x,y,z[,w]`, graph or curve JSON.
    #[arg(short, long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(short, long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// CSV series path.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Seed; defaults to the config entry `seed`, then $FILMGEOM_SEED, then 7.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density ratios on a radius grid and the monotonicity audit.
    Density(Common),
    /// Beta number of the data in a ball against a cone family.
    Fit(Common),
    /// P/Y/T labels of points from their densities.
    Classify(Common),
    /// Finite-sample biHölder ball certificate.
    Certify(Common),
    /// Multiscale trace of a line or propeller and its tangent certificate.
    Trace(Common),
    /// Shortest network through one to three points.
    Steiner(Common),
    /// Harmonic-extension test of a boundary curve or of an arc sample.
    Harmonic(Common),
    /// Radial projection onto the 2-skeleton of a dyadic cube, with audit.
    FfProject(Common),
    /// Structural check of a spherical graph as the link of a minimal cone.
    ValidateCone(Common),
    /// Writes a synthetic fixture.
    Synth {
        #[command(flatten)]
        common: Common,
        /// Output data file: `.obj` (fan samples only), `.csv` or `.json` (graphs).
        #[arg(long, value_name = "FILE")]
        data: Option<PathBuf>,
    },
}

/// Failure categories mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Analysis(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Analysis(_) => EXIT_ANALYSIS,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Analysis(m) => write!(f, "analysis failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter { .. }
            | Error::InvalidInput(_)
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::MalformedGraph(_)
            | Error::InvalidArc(_) => Failure::Input(e.to_string()),
            _ => Failure::Analysis(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input_err(m: impl Into<String>) -> Failure {
    Failure::Input(m.into())
}

/// Parses `args` and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(Status::Pass) => EXIT_OK,
        Ok(Status::Fail(why)) => {
            eprintln!("analysis failure: {why}");
            EXIT_ANALYSIS
        }
        Err(f) => {
            eprintln!("{f}");
            f.code()
        }
    }
}

enum Status {
    Pass,
    Fail(String),
}

fn dispatch(cmd: &Command) -> Outcome<Status> {
    match cmd {
        Command::Density(c) => execute(c, "density", density),
        Command::Fit(c) => execute(c, "fit", fit),
        Command::Classify(c) => execute(c, "classify", classify),
        Command::Certify(c) => execute(c, "certify", certify),
        Command::Trace(c) => execute(c, "trace", trace_cmd),
        Command::Steiner(c) => execute(c, "steiner", steiner),
        Command::Harmonic(c) => execute(c, "harmonic", harmonic),
        Command::FfProject(c) => execute(c, "ff-project", ff_project),
        Command::ValidateCone(c) => execute(c, "validate-cone", validate_cone),
        Command::Synth { common, data } => {
            let mut c = common.clone();
            if let Some(d) = data {
                c.sets.push(format!("data={}", Value::String(d.display().to_string())));
            }
            execute(&c, "synth", synth_cmd)
        }
    }
}

/// What a command hands back: its result document, an optional CSV body
/// and whether the analysis succeeded.
struct Produced {
    result: Value,
    csv: Option<String>,
    failure: Option<String>,
}

impl Produced {
    fn new<R: Serialize>(result: &R) -> Outcome<Self> {
        Ok(Produced {
            result: serde_json::to_value(result).map_err(|e| Failure::Analysis(e.to_string()))?,
            csv: None,
            failure: None,
        })
    }

    fn csv(mut self, body: String) -> Self {
        self.csv = Some(body);
        self
    }

    fn fail_if(mut self, cond: bool, why: impl Into<String>) -> Self {
        if cond {
            self.failure = Some(why.into());
        }
        self
    }
}

#[derive(Serialize)]
struct Report<'a, C> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a C,
    status: &'static str,
    result: Value,
}

fn execute<C, F>(common: &Common, name: &str, body: F) -> Outcome<Status>
where
    C: Serialize + DeserializeOwned + Default,
    F: FnOnce(&mut C, u64) -> Outcome<Produced>,
{
    let mut doc = load_config(common.config.as_deref())?;
    for s in &common.sets {
        apply_override(&mut doc, s)?;
    }
    if let Some(p) = &common.input {
        doc.insert("input".into(), Value::String(p.display().to_string()));
    }
    let config_seed = match doc.remove("seed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| input_err(format!("config entry `seed` must be a nonnegative integer, got {v}")))?,
        ),
    };
    let seed = resolve_seed(common.seed, config_seed)?;
    let mut cfg: C = serde_json::from_value(Value::Object(doc)).map_err(|e| input_err(format!("config: {e}")))?;
    let produced = body(&mut cfg, seed)?;
    let report = Report {
        tool: "filmgeom",
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        seed,
        config: &cfg,
        status: if produced.failure.is_some() { "fail" } else { "pass" },
        result: produced.result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Analysis(e.to_string()))?;
    text.push('\n');
    match &common.out {
        Some(p) => write_file(p, text.as_bytes())?,
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| input_err(format!("stdout: {e}")))?;
        }
    }
    if let (Some(p), Some(body)) = (&common.csv, &produced.csv) {
        write_file(p, body.as_bytes())?;
    }
    Ok(match produced.failure {
        Some(why) => Status::Fail(why),
        None => Status::Pass,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome<()> {
    std::fs::write(path, bytes).map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))
}

fn load_config(path: Option<&Path>) -> Outcome<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text =
        std::fs::read_to_string(path).map_err(|e| input_err(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(|e| input_err(format!("config {}: {e}", path.display())))? {
        Value::Object(m) => Ok(m),
        _ => Err(input_err(format!("config {} must be a JSON object", path.display()))),
    }
}

fn apply_override(doc: &mut Map<String, Value>, spec: &str) -> Outcome<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| input_err(format!("override `{spec}` is not KEY=VALUE")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(input_err(format!("override key `{key}` has an empty component")));
    }
    let mut node = doc;
    for p in &parts[..parts.len() - 1] {
        let entry = node.entry(p.to_string()).or_insert_with(|| Value::Object(Map::new()));
        node = entry
            .as_object_mut()
            .ok_or_else(|| input_err(format!("override key `{key}`: `{p}` is not an object")))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Outcome<u64> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| input_err(format!("${SEED_ENV} must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn require_input(input: &Option<PathBuf>) -> Outcome<&Path> {
    input
        .as_deref()
        .ok_or_else(|| input_err("no input file: pass --input or set `input` in the config"))
}

fn open(path: &Path) -> Outcome<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| input_err(format!("cannot open {}: {e}", path.display())))
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// OBJ files give triangle samples; anything else is read as CSV points.
fn load_set(input: &Option<PathBuf>, gap: Option<f64>) -> Outcome<SampledSet> {
    let path = require_input(input)?;
    let r = open(path)?;
    let set = if extension(path) == "obj" {
        read_obj(r, gap)
    } else {
        read_csv_points(r, gap)
    };
    set.map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn positive(name: &str, v: f64) -> Outcome<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(input_err(format!("`{name}` must be positive, got {v}")))
    }
}

/// Radius grid shared by `density` and `classify`: explicit `radii`, or
/// `count` geometrically spaced radii from `r_min` to `r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadiusGrid {
    pub radii: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
}

impl Default for RadiusGrid {
    fn default() -> Self {
        RadiusGrid {
            radii: Vec::new(),
            r_min: 0.05,
            r_max: 0.9,
            count: 12,
        }
    }
}

impl RadiusGrid {
    fn resolve(&mut self) -> Outcome<Vec<f64>> {
        if self.radii.is_empty() {
            positive("grid.r_min", self.r_min)?;
            if !(self.r_max > self.r_min && self.r_max.is_finite()) || self.count < 2 {
                return Err(input_err("grid needs r_max > r_min and count >= 2"));
            }
            let q = (self.r_max / self.r_min).powf(1.0 / (self.count - 1) as f64);
            self.radii = (0..self.count).map(|i| self.r_min * q.powi(i as i32)).collect();
            *self.radii.last_mut().unwrap() = self.r_max;
        }
        Ok(self.radii.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub input: Option<PathBuf>,
    pub gap: Option<f64>,
    pub center: Vec3,
    pub grid: RadiusGrid,
    pub gauge: GaugeFunction,
    pub lambda: f64,
    pub slack: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            input: None,
            gap: None,
            center: Vec3::zeros(),
            grid: RadiusGrid::default(),
            gauge: GaugeFunction::Zero,
            lambda: 1.0,
            slack: 1e-3,
        }
    }
}

fn density(cfg: &mut DensityConfig, _seed: u64) -> Outcome<Produced> {
    let e = load_set(&cfg.input, cfg.gap)?;
    let radii = cfg.grid.resolve()?;
    let profile = density_profile(&e, cfg.center, &radii, &cfg.gauge, cfg.lambda)?;
    let audit = monotonicity_audit(&profile, cfg.slack)?;
    let mut csv = Vec::new();
    profile.write_csv(&mut csv).map_err(Error::Io)?;
    let passed = audit.passed();
    let n = audit.violations.len();
    #[derive(Serialize)]
    struct Out<'a> {
        gap: f64,
        corrected: Vec<f64>,
        profile: &'a crate::measure::DensityProfile,
        audit: crate::measure::MonotonicityAudit,
    }
    Ok(Produced::new(&Out {
        gap: e.gap(),
        corrected: profile.corrected(),
        profile: &profile,
        audit,
    })?
    .csv(String::from_utf8_lossy(&csv).into_owned())
    .fail_if(!passed, format!("{n} monotonicity violation(s)")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub input: Option<PathBuf>,
    pub gap: Option<f64>,
    pub center: Vec3,
    pub radius: f64,
    pub family: ConeFamily,
    pub budget: FitBudget,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            input: None,
            gap: None,
            center: Vec3::zeros(),
            radius: 1.0,
            family: ConeFamily::PlanesYT,
            budget: FitBudget::default(),
        }
    }
}

fn fit(cfg: &mut FitConfig, seed: u64) -> Outcome<Produced> {
    cfg.budget.seed = seed;
    positive("radius", cfg.radius)?;
    let e = load_set(&cfg.input, cfg.gap)?;
    let rep = beta_fit(&e, &LocalWindow::new(cfg.center, cfg.radius)?, cfg.family, &cfg.budget)?;
    let certified = rep.certified;
    Ok(Produced::new(&rep.to_json())?.fail_if(
        !certified,
        "the winning local search did not converge within its budget",
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    pub input: Option<PathBuf>,
    pub gap: Option<f64>,
    pub points: Vec<Vec3>,
    pub grid: RadiusGrid,
    pub gauge: GaugeFunction,
    pub lambda: f64,
    pub thresholds: ClassifyThresholds,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            input: None,
            gap: None,
            points: vec![Vec3::zeros()],
            grid: RadiusGrid::default(),
            gauge: GaugeFunction::Zero,
            lambda: 1.0,
            thresholds: ClassifyThresholds::default(),
        }
    }
}

fn classify(cfg: &mut ClassifyConfig, _seed: u64) -> Outcome<Produced> {
    if cfg.points.is_empty() {
        return Err(input_err("`points` is empty"));
    }
    let e = load_set(&cfg.input, cfg.gap)?;
    let radii = cfg.grid.resolve()?;
    #[derive(Serialize)]
    struct Entry {
        point: Vec3,
        label: Option<PointLabel>,
        error: Option<String>,
    }
    let mut out = Vec::new();
    let mut csv = String::from("x,y,z,label,theta,radius\n");
    for &x in &cfg.points {
        match classify_point(&e, x, &cfg.gauge, cfg.lambda, &radii, &cfg.thresholds) {
            Ok(l) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    x.x, x.y, x.z, l.label, l.theta_estimate, l.radius
                );
                out.push(Entry {
                    point: x,
                    label: Some(l),
                    error: None,
                });
            }
            Err(err @ Error::ClassificationUnavailable(_)) => {
                let _ = writeln!(csv, "{},{},{},,,", x.x, x.y, x.z);
                out.push(Entry {
                    point: x,
                    label: None,
                    error: Some(err.to_string()),
                });
            }
            Err(err) => return Err(err.into()),
        }
    }
    let missing = out.iter().filter(|o| o.label.is_none()).count();
    Ok(Produced::new(&out)?
        .csv(csv)
        .fail_if(missing > 0, format!("{missing} point(s) could not be classified")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    pub input: Option<PathBuf>,
    pub gap: Option<f64>,
    pub center: Vec3,
    pub r: f64,
    pub eps: f64,
    /// Empty means `[r / 2, r]`.
    pub scales: Vec<f64>,
    pub params: CertificateParams,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            input: None,
            gap: None,
            center: Vec3::zeros(),
            r: 0.5,
            eps: 0.05,
            scales: Vec::new(),
            params: CertificateParams::default(),
        }
    }
}

fn certify(cfg: &mut CertifyConfig, seed: u64) -> Outcome<Produced> {
    cfg.params.budget.seed = seed;
    positive("r", cfg.r)?;
    if cfg.scales.is_empty() {
        cfg.scales = vec![cfg.r / 2.0, cfg.r];
    }
    let e = load_set(&cfg.input, cfg.gap)?;
    let rep = biholder_certificate(&e, cfg.center, cfg.r, cfg.eps, &cfg.scales, &cfg.params)?;
    let mut csv = String::from("x,y,z,scale,beta,kind,certified\n");
    for f in &rep.fits {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            f.center.x, f.center.y, f.center.z, f.scale, f.beta, f.kind, f.certified
        );
    }
    let why = if rep.centered {
        format!("largest beta {:.3e} exceeds eps {:.3e}", rep.max_beta, rep.eps)
    } else {
        format!("top-scale cone is {:.3e} away from the center", rep.center_offset)
    };
    let passed = rep.passed;
    Ok(Produced::new(&rep)?.csv(csv).fail_if(!passed, why))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub input: Option<PathBuf>,
    pub gap: Option<f64>,
    pub center: Vec3,
    pub radius: f64,
    pub params: TraceParams,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            input: None,
            gap: None,
            center: Vec3::zeros(),
            radius: 1.0,
            params: TraceParams::default(),
        }
    }
}

fn trace_cmd(cfg: &mut TraceConfig, seed: u64) -> Outcome<Produced> {
    cfg.params.budget.seed = seed;
    positive("radius", cfg.radius)?;
    let e = load_set(&cfg.input, cfg.gap)?;
    let res = trace(&e, &LocalWindow::new(cfg.center, cfg.radius)?, &cfg.params)?;
    let cert = tangent_certificate(&res);
    let csv = res.tangent_csv();
    let partial = res.partial;
    #[derive(Serialize)]
    struct Out {
        trace: crate::trace::TraceResult,
        certificate: crate::trace::TangentCertificate,
    }
    Ok(Produced::new(&Out {
        trace: res,
        certificate: cert,
    })?
    .csv(csv)
    .fail_if(partial, "a branch stopped before the window boundary"))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteinerConfig {
    /// Points read from `input` (CSV) when empty.
    pub points: Vec<Vec3>,
    pub input: Option<PathBuf>,
    /// Defaults to the smallest ball about the centroid holding the points.
    pub ball: Option<LocalWindow>,
}

fn steiner(cfg: &mut SteinerConfig, _seed: u64) -> Outcome<Produced> {
    if cfg.points.is_empty() {
        let e = load_set(&cfg.input, Some(1.0))?;
        cfg.points = e.points().to_vec();
    }
    if cfg.points.is_empty() || cfg.points.len() > 3 {
        return Err(input_err(format!("need 1 to 3 points, got {}", cfg.points.len())));
    }
    let ball = match cfg.ball {
        Some(b) => b,
        None => {
            let c = cfg.points.iter().sum::<Vec3>() / cfg.points.len() as f64;
            let r = cfg.points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
            let b = LocalWindow::new(c, if r > 0.0 { r } else { 1.0 })?;
            cfg.ball = Some(b);
            b
        }
    };
    let net = shortest_network(&cfg.points, &ball)?;
    let mut csv = String::from("x0,y0,z0,x1,y1,z1\n");
    for [a, b] in &net.edges {
        let (p, q) = (net.nodes[*a], net.nodes[*b]);
        let _ = writeln!(csv, "{},{},{},{},{},{}", p.x, p.y, p.z, q.x, q.y, q.z);
    }
    #[derive(Serialize)]
    struct Out<'a> {
        network: &'a crate::steiner::Network1D,
        stationarity_residual: f64,
    }
    Produced::new(&Out {
        network: &net,
        stationarity_residual: net.stationarity_residual(),
    })
    .map(|p| p.csv(csv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarmonicConfig {
    /// Curve JSON (`{"T", "t", "f"}` or `{"T", "sines"}`) or a CSV of
    /// ordered sphere points `x,y,z`.
    pub input: Option<PathBuf>,
    /// Inline curve, used when there is no input file.
    pub curve: Option<CurveSpec>,
    pub k_max: usize,
    pub quad: QuadRule,
    pub tol: f64,
    /// Intervals of the CSV series.
    pub series_points: usize,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        let p = HarmonicParams::default();
        HarmonicConfig {
            input: None,
            curve: None,
            k_max: p.k_max,
            quad: p.quad,
            tol: p.tol,
            series_points: 200,
        }
    }
}

fn harmonic(cfg: &mut HarmonicConfig, _seed: u64) -> Outcome<Produced> {
    let params = HarmonicParams {
        k_max: cfg.k_max,
        quad: cfg.quad,
        tol: cfg.tol,
    };
    params.validate()?;
    let arc_csv = cfg.input.as_deref().is_some_and(|p| extension(p) != "json");
    let (result, curve, report) = if arc_csv {
        let path = require_input(&cfg.input)?;
        let e = read_csv_points(open(path)?, Some(1.0)).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
        let (gc, curve) = great_circle_verdict(e.points(), cfg.tol, &params)?;
        let report = gc.harmonic.clone();
        (
            serde_json::json!({ "source": "arc-samples", "great_circle": gc }),
            curve,
            report,
        )
    } else {
        let spec = match (&cfg.input, &cfg.curve) {
            (Some(p), _) => {
                serde_json::from_reader(open(p)?).map_err(|e| input_err(format!("{}: {e}", p.display())))?
            }
            (None, Some(c)) => c.clone(),
            (None, None) => return Err(input_err("no curve: pass --input or set `curve` in the config")),
        };
        let curve = BoundaryCurve::from_spec(&spec)?;
        let report = harmonic_test(&curve, &params)?;
        (
            serde_json::json!({ "source": "curve", "report": report }),
            curve,
            report,
        )
    };
    let csv = report.series_csv(&curve, cfg.series_points);
    Produced::new(&result).map(|p| p.csv(csv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CubeConfig {
    pub corner: Vec3,
    pub side: f64,
    pub level: u32,
}

impl Default for CubeConfig {
    fn default() -> Self {
        CubeConfig {
            corner: Vec3::zeros(),
            side: 1.0,
            level: 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FfConfig {
    pub input: Option<PathBuf>,
    pub gap: Option<f64>,
    pub cube: CubeConfig,
    pub params: FfParams,
    /// Optional CSV of the projected points.
    pub image: Option<PathBuf>,
}

fn ff_project(cfg: &mut FfConfig, seed: u64) -> Outcome<Produced> {
    cfg.params.seed = seed;
    let cube = DyadicCube::new(cfg.cube.corner, cfg.cube.side, cfg.cube.level)?;
    let f = load_set(&cfg.input, cfg.gap)?;
    let (map, image) = skeleton_project(&f, &cube, &cfg.params)?;
    let audit = projection_audit(&map, &f, &image)?;
    if let Some(p) = &cfg.image {
        let mut buf = Vec::new();
        write_csv_points(&image, &mut buf)?;
        write_file(p, &buf)?;
    }
    let mut csv = String::from("i,j,k,points,moved,weight,image_weight,inflation,saturated,clearance\n");
    for s in &audit.subcubes {
        let [i, j, k] = s.index;
        let _ = writeln!(
            csv,
            "{i},{j},{k},{},{},{},{},{},{},{}",
            s.points, s.moved, s.weight, s.image_weight, s.inflation, s.saturated, s.clearance
        );
    }
    let passed = audit.passed();
    #[derive(Serialize)]
    struct Out<'a> {
        map: &'a crate::ff::ProjectionMap,
        audit: &'a crate::ff::ProjectionAudit,
    }
    Ok(Produced::new(&Out {
        map: &map,
        audit: &audit,
    })?
    .csv(csv)
    .fail_if(!passed, "projection audit failed"))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub input: Option<PathBuf>,
    /// Override the graph's own separation and length thresholds.
    pub eta0: Option<f64>,
    pub l0: Option<f64>,
    pub params: ValidationParams,
}

fn validate_cone(cfg: &mut ValidateConfig, _seed: u64) -> Outcome<Produced> {
    let path = require_input(&cfg.input)?;
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))?;
    let mut g = SphericalGraph::from_json_str(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    if cfg.eta0.is_some() || cfg.l0.is_some() {
        let doc = g.to_json();
        g = SphericalGraph::new(
            g.arcs().to_vec(),
            cfg.eta0.unwrap_or(doc.eta0),
            cfg.l0.unwrap_or(doc.l0),
        )?;
    }
    let rep = validate_cone_structure(&g, &cfg.params)?;
    let valid = rep.is_valid;
    let n = rep.violations.len();
    Ok(Produced::new(&rep)?.fail_if(!valid, format!("{n} structural violation(s)")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    Plane,
    Y,
    T,
    Line,
    Propeller,
    AnnularHole,
    Slit,
    PlaneGraph,
    YGraph,
    TGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    /// Exact triangle fan.
    Fan,
    /// Weighted lattice points.
    Points,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub kind: SynthKind,
    pub mode: SynthMode,
    pub data: Option<PathBuf>,
    pub apex: Vec3,
    /// Rotation as a scaled axis (radians); ignored with `random_rotation`.
    pub rotation: Vec3,
    pub random_rotation: bool,
    pub radius: f64,
    pub gap: f64,
    /// Wiggle amplitude of propeller branches.
    pub wiggle: Option<f64>,
    /// Uniform displacement of point samples in `[-noise, noise]^3`.
    pub noise: f64,
    /// Hole radii `[inner, hole_outer]` of the annular-hole plane.
    pub hole: [f64; 2],
    /// Strip width of the slit plane.
    pub slit_width: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            kind: SynthKind::Y,
            mode: SynthMode::Fan,
            data: None,
            apex: Vec3::zeros(),
            rotation: Vec3::zeros(),
            random_rotation: false,
            radius: 1.0,
            gap: 0.01,
            wiggle: None,
            noise: 0.0,
            hole: [0.3, 0.5],
            slit_width: 0.1,
        }
    }
}

fn perturb(set: SampledSet, noise: f64, rng: &mut ChaCha8Rng) -> Outcome<SampledSet> {
    if noise == 0.0 {
        return Ok(set);
    }
    let Some(w) = set.weights() else {
        return Err(input_err("`noise` needs mode `points`"));
    };
    let pts = set
        .points()
        .iter()
        .map(|p| p + Vec3::from_fn(|_, _| rng.gen_range(-noise..=noise)))
        .collect();
    Ok(SampledSet::from_points(pts, w.to_vec(), set.gap())?)
}

fn synth_cmd(cfg: &mut SynthConfig, seed: u64) -> Outcome<Produced> {
    let path = cfg
        .data
        .clone()
        .ok_or_else(|| input_err("no data path: pass --data or set `data` in the config"))?;
    if !(cfg.noise >= 0.0 && cfg.noise.is_finite()) {
        return Err(input_err(format!("`noise` must be nonnegative, got {}", cfg.noise)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = if cfg.random_rotation {
        random_rotation(&mut rng)
    } else {
        Frame::from_scaled_axis(cfg.rotation)
    };
    let ext = extension(&path);
    let graph = match cfg.kind {
        SynthKind::PlaneGraph => Some(ConeKind::Plane),
        SynthKind::YGraph => Some(ConeKind::Y),
        SynthKind::TGraph => Some(ConeKind::T),
        _ => None,
    };
    if let Some(kind) = graph {
        if ext != "json" {
            return Err(input_err("graph fixtures are written as .json"));
        }
        let g = reference_graph(kind).rotated(&frame);
        write_file(&path, format!("{}\n", g.to_json_string()).as_bytes())?;
        return Produced::new(&serde_json::json!({
            "data": path,
            "arcs": g.arcs().len(),
            "total_length": g.total_length(),
        }));
    }
    let (gap, radius) = (cfg.gap, cfg.radius);
    let points = cfg.mode == SynthMode::Points;
    let set = match cfg.kind {
        SynthKind::Plane | SynthKind::Y | SynthKind::T => {
            let kind = match cfg.kind {
                SynthKind::Plane => ConeKind::Plane,
                SynthKind::Y => ConeKind::Y,
                _ => ConeKind::T,
            };
            let cone = construct_reference_cone(kind, cfg.apex, frame);
            if points {
                synth::cone_points(&cone, radius, gap)?
            } else {
                synth::cone_fan(&cone, radius, gap)?
            }
        }
        SynthKind::Line => synth::line_points(cfg.apex, frame * Vec3::x(), radius, gap)?,
        SynthKind::Propeller => {
            let cone = CurveCone::new(CurveKind::Propeller, cfg.apex, frame);
            synth::propeller_points(&cone, radius, gap, cfg.wiggle.map(Wiggle::new))?
        }
        SynthKind::AnnularHole => synth::plane_with_annular_hole(cfg.hole[0], cfg.hole[1], radius, 64, gap)?,
        SynthKind::Slit => synth::plane_with_slit(radius, cfg.slit_width, gap)?,
        _ => unreachable!("graph kinds handled above"),
    };
    let set = perturb(set, cfg.noise, &mut rng)?;
    let mut buf = Vec::new();
    match ext.as_str() {
        "obj" => write_obj(&set, &mut buf)?,
        "csv" | "txt" if set.weights().is_some() => write_csv_points(&set, &mut buf)?,
        "csv" | "txt" => {
            return Err(input_err(
                "triangle fixtures are written as .obj; use mode `points` for CSV",
            ))
        }
        _ => return Err(input_err("point fixtures are written as .obj or .csv")),
    }
    write_file(&path, &buf)?;
    Produced::new(&serde_json::json!({
        "data": path,
        "points": set.len(),
        "gap": set.gap(),
        "total_measure": set.total_measure(),
        "mode": set.mode(),
    }))
}
