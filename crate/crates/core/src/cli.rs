//! Command-line front end. Every subcommand prints a one-line summary; with
//! `--out DIR` it also writes its tables and a `manifest.json` recording the
//! command, the full parameter set, the tool version and sha256 hashes of the
//! configuration and of every output file.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 malformed
//! command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::approximation::{approximate_weak_solution, singular_supersolution, IterationConfig};
use crate::bounds::{check_corollary, evaluate_bounds, DEFAULT_THETAS};
use crate::continuation::{a_grid, trace_branch, Branch, TraceConfig};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::nonlinearity::{certify_hypotheses, NonlinearitySpec, SampleConfig};
use crate::profiles::{RadialGrid, RadialProfile};
use crate::shooting::{shoot, shoot_at_lambda, shoot_on_grid, ShootConfig};
use crate::singular::{make_singular, SingularKind, SobolevSpace};
use crate::stability::{assemble, assemble_singular, principal_eigenvalue, singular_semistable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "radlab", version, about = "Radial solutions of -Δu = λ f(u) on the unit ball")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Growth class and hypothesis constants of a nonlinearity
    Classify(ClassifyArgs),
    /// One radial solution with prescribed center value
    Shoot(ShootArgs),
    /// Solution branch over a range of center values
    Branch(BranchArgs),
    /// Principal eigenvalue of the linearization
    Stability(StabilityArgs),
    /// Explicit singular solutions
    Singular(SingularArgs),
    /// Truncation and monotone iteration
    Approximate(ApproximateArgs),
    /// A priori bound ratios along a branch
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyName {
    Power,
    Exp,
    Logpower,
    Dlog,
    Const,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SingularName {
    Exp,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
struct FamilyArgs {
    /// Space dimension N ≥ 3
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: u32,
    #[arg(long, value_enum, default_value = "power")]
    family: FamilyName,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Multiplicative parameter λ where a fixed λ is needed
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct OutputArgs {
    /// Output directory
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
struct GridArgs {
    #[arg(long = "grid-n", default_value_t = 2000)]
    grid_n: usize,
    #[arg(long = "grid-gamma", default_value_t = 2.0)]
    grid_gamma: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SweepArgs {
    #[arg(long = "a-min", default_value_t = 1.0)]
    a_min: f64,
    #[arg(long = "a-max", default_value_t = 10.0)]
    a_max: f64,
    #[arg(long = "a-count", default_value_t = 10)]
    a_count: usize,
    #[arg(long = "log-spaced")]
    log_spaced: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ShootArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    /// Center value u(0)
    #[arg(long)]
    a: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct BranchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    /// Also compute μ₁ at every point
    #[arg(long = "with-stability")]
    with_stability: bool,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct StabilityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    /// Analyse an explicit singular solution instead of a shot solution
    #[arg(long, value_enum)]
    singular: Option<SingularName>,
    /// Center value of the shot solution
    #[arg(long)]
    a: Option<f64>,
    /// Cutoff radius of singular potentials
    #[arg(long, default_value_t = 1e-4)]
    rmin: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct SingularArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: u32,
    #[arg(long, value_enum)]
    kind: SingularName,
    #[arg(long)]
    p: Option<f64>,
    /// Residual over 10⁴ log-spaced radii in [10⁻⁸, 1]
    #[arg(long = "check-residual")]
    check_residual: bool,
    /// First node of the sampled profile
    #[arg(long, default_value_t = 1e-6)]
    rmin: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ApproximateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    /// Truncation levels, comma separated, strictly decreasing
    #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3])]
    eps: Vec<f64>,
    /// Use an explicit singular solution (and its own f, λ) as supersolution
    #[arg(long, value_enum)]
    singular: Option<SingularName>,
    #[arg(long, default_value_t = 1e-6)]
    rmin: f64,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    #[serde(flatten)]
    sweep: SweepArgs,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_THETAS)]
    theta: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub version: String,
    /// sha256 of the canonical JSON of command, params and version.
    pub config_hash: String,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    fn new(command: &str, params: &impl Serialize) -> Result<Self> {
        let params: BTreeMap<String, Value> = match serde_json::to_value(params)? {
            Value::Object(map) => map.into_iter().collect(),
            other => BTreeMap::from([("value".to_string(), other)]),
        };
        let version = env!("CARGO_PKG_VERSION").to_string();
        let canonical = serde_json::to_string(&(command, &params, &version))?;
        Ok(RunManifest { command: command.to_string(), params, version, config_hash: sha256_hex(canonical.as_bytes()), outputs: Vec::new() })
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files and writes them with the manifest.
struct Outputs {
    dir: Option<PathBuf>,
    manifest: RunManifest,
}

impl Outputs {
    fn new(dir: Option<&Path>, command: &str, params: &impl Serialize) -> Result<Self> {
        if let Some(d) = dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Outputs { dir: dir.map(Path::to_path_buf), manifest: RunManifest::new(command, params)? })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = &self.dir {
            std::fs::write(dir.join(name), contents)?;
            self.manifest
                .outputs
                .push(OutputEntry { file: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        }
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn write_profile(&mut self, stem: &str, profile: &RadialProfile, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write(&format!("{stem}.csv"), &profile.to_csv()),
            Format::Json => {
                let value = serde_json::json!({ "r": profile.r(), "u": profile.u(), "du": profile.du() });
                self.write_json(&format!("{stem}.json"), &value)
            }
        }
    }

    fn finish(mut self) -> Result<()> {
        if let Some(dir) = self.dir.take() {
            let mut text = serde_json::to_string_pretty(&self.manifest)?;
            text.push('\n');
            std::fs::write(dir.join("manifest.json"), text)?;
        }
        Ok(())
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(summary) => {
            let _ = writeln!(out, "{summary}");
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error [{}]: {e}", e.tag());
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

fn dispatch(command: Command) -> Result<String> {
    match command {
        Command::Classify(a) => classify(&a),
        Command::Shoot(a) => shoot_cmd(&a),
        Command::Branch(a) => branch_cmd(&a),
        Command::Stability(a) => stability_cmd(&a),
        Command::Singular(a) => singular_cmd(&a),
        Command::Approximate(a) => approximate_cmd(&a),
        Command::Bounds(a) => bounds_cmd(&a),
    }
}

fn dimension(n: u32) -> Result<Dimension> {
    Dimension::new(n)
}

fn require(value: Option<f64>, flag: &str, family: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Domain(format!("--{flag} is required for --family {family}")))
}

/// Unit-scale nonlinearity from the family flags.
fn unit_spec(f: &FamilyArgs) -> Result<NonlinearitySpec> {
    let dim = dimension(f.n)?;
    match f.family {
        FamilyName::Power => NonlinearitySpec::power(require(f.p, "p", "power")?),
        FamilyName::Exp => Ok(NonlinearitySpec::exponential()),
        FamilyName::Logpower => NonlinearitySpec::log_corrected(require(f.beta, "beta", "logpower")?, dim),
        FamilyName::Dlog => NonlinearitySpec::double_log_corrected(require(f.beta, "beta", "dlog")?, dim),
        FamilyName::Const => NonlinearitySpec::constant(require(f.c, "c", "const")?),
    }
}

fn shoot_config(grid: &GridArgs) -> ShootConfig {
    ShootConfig { grid_n: grid.grid_n, grid_gamma: grid.grid_gamma, ..ShootConfig::default() }
}

fn classify(args: &ClassifyArgs) -> Result<String> {
    let dim = dimension(args.family.n)?;
    let spec = unit_spec(&args.family)?;
    let report = certify_hypotheses(&spec, dim, &SampleConfig::default());
    let mut outputs = Outputs::new(args.output.out.as_deref(), "classify", args)?;
    outputs.write_json("classify.json", &report)?;
    outputs.finish()?;
    Ok(format!(
        "{:?} {spec} N={dim} c0={} h4={} h5={} ({})",
        report.subcritical_verdict, report.c0_estimate, report.h4_holds_sampled, report.h5_holds_sampled, report.note
    ))
}

#[derive(Serialize)]
struct ShotSummary<'a> {
    a: f64,
    lambda: f64,
    first_zero: f64,
    stats: &'a crate::shooting::IntegratorStats,
}

fn shoot_cmd(args: &ShootArgs) -> Result<String> {
    let dim = dimension(args.family.n)?;
    let spec = unit_spec(&args.family)?;
    let shot = shoot(&spec, args.a, dim, &shoot_config(&args.grid))?;
    let mut outputs = Outputs::new(args.output.out.as_deref(), "shoot", args)?;
    outputs.write_profile("profile", &shot.profile, args.output.format)?;
    outputs.write_json(
        "shot.json",
        &ShotSummary { a: shot.a, lambda: shot.lambda, first_zero: shot.first_zero, stats: &shot.stats },
    )?;
    outputs.finish()?;
    Ok(format!("a={} lambda={} first_zero={} sup={}", shot.a, shot.lambda, shot.first_zero, shot.profile.norm_sup()))
}

#[derive(Serialize)]
struct BranchRow {
    a: f64,
    lambda: f64,
    sup_norm: f64,
    l2star_norm: f64,
    f_norm: f64,
    mu1: Option<f64>,
}

fn branch_rows(branch: &Branch) -> Vec<BranchRow> {
    branch
        .points
        .iter()
        .map(|p| BranchRow {
            a: p.a,
            lambda: p.lambda,
            sup_norm: p.sup_norm,
            l2star_norm: p.l2star_norm,
            f_norm: p.f_norm,
            mu1: p.mu1,
        })
        .collect()
}

fn sweep(dim: Dimension, family: &FamilyArgs, sweep: &SweepArgs, grid: &GridArgs, stability: bool) -> Result<Branch> {
    let spec = unit_spec(family)?;
    let a = a_grid(sweep.a_min, sweep.a_max, sweep.a_count, sweep.log_spaced)?;
    let cfg = TraceConfig { shoot: shoot_config(grid), with_stability: stability, ..TraceConfig::default() };
    trace_branch(&spec, dim, &a, &cfg)
}

fn branch_cmd(args: &BranchArgs) -> Result<String> {
    let dim = dimension(args.family.n)?;
    let branch = sweep(dim, &args.family, &args.sweep, &args.grid, args.with_stability)?;
    let summary = branch.summary();
    let mut outputs = Outputs::new(args.output.out.as_deref(), "branch", args)?;
    match args.output.format {
        Format::Csv => outputs.write("branch.csv", &branch.to_csv())?,
        Format::Json => outputs.write_json("branch.json", &branch_rows(&branch))?,
    }
    outputs.write_json("branch_summary.json", &summary)?;
    outputs.finish()?;
    Ok(format!(
        "{} points, {} failed, {} turning points, asymptote_estimate={}",
        branch.points.len(),
        branch.failures.len(),
        summary.turning_points.len(),
        summary.asymptote_estimate
    ))
}

fn stability_cmd(args: &StabilityArgs) -> Result<String> {
    let dim = dimension(args.family.n)?;
    let mut outputs = Outputs::new(args.output.out.as_deref(), "stability", args)?;
    let summary = if let Some(kind) = args.singular {
        let sol = make_singular(singular_kind(kind, args.family.p)?, dim)?;
        let grid = RadialGrid::graded(dim, args.grid.grid_n, args.grid.grid_gamma)?;
        let pair = principal_eigenvalue(&assemble_singular(&sol, &grid, args.rmin)?)?;
        outputs.write_profile("eigenvector", &pair.eigenvector, args.output.format)?;
        let (verdict, line) = match kind {
            SingularName::Power => {
                let v = singular_semistable(args.family.p.unwrap_or(f64::NAN), dim)?;
                let line = format!(
                    "semistable={} threshold_p={} lambda={} potential_coeff={} hardy_lhs={}",
                    v.semistable, v.threshold_p, v.lambda, v.potential_coeff, v.hardy_lhs
                );
                (serde_json::to_value(v)?, line)
            }
            SingularName::Exp => {
                let semistable = crate::stability::exp_singular_semistable(dim);
                let value = serde_json::json!({
                    "semistable": semistable,
                    "lambda": sol.lambda(),
                    "potential_coeff": sol.potential_coefficient(),
                    "hardy_lhs": dim.hardy_constant(),
                });
                (value, format!("semistable={semistable} lambda={}", sol.lambda()))
            }
        };
        outputs.write_json(
            "stability.json",
            &serde_json::json!({ "algebraic": verdict, "mu1": pair.mu1, "iterations": pair.iterations, "rmin": args.rmin }),
        )?;
        format!("{line} mu1={}", pair.mu1)
    } else {
        let a = args.a.ok_or_else(|| Error::Domain("stability needs --singular or --a".into()))?;
        let spec = unit_spec(&args.family)?;
        let shot = shoot(&spec, a, dim, &shoot_config(&args.grid))?;
        let pair = principal_eigenvalue(&assemble(&shot.profile, &spec, shot.lambda, 0.0)?)?;
        outputs.write_profile("eigenvector", &pair.eigenvector, args.output.format)?;
        outputs.write_json(
            "stability.json",
            &serde_json::json!({
                "a": a, "lambda": shot.lambda, "mu1": pair.mu1,
                "iterations": pair.iterations, "semistable": pair.is_semistable(),
            }),
        )?;
        format!("a={a} lambda={} mu1={} semistable={}", shot.lambda, pair.mu1, pair.is_semistable())
    };
    outputs.finish()?;
    Ok(summary)
}

fn singular_kind(kind: SingularName, p: Option<f64>) -> Result<SingularKind> {
    Ok(match kind {
        SingularName::Exp => SingularKind::ExpLog,
        SingularName::Power => SingularKind::PowerTail {
            p: p.ok_or_else(|| Error::Domain("--p is required for the power singular solution".into()))?,
        },
    })
}

fn singular_cmd(args: &SingularArgs) -> Result<String> {
    let dim = dimension(args.n)?;
    let sol = make_singular(singular_kind(args.kind, args.p)?, dim)?;
    let residual = if args.check_residual {
        let samples: Vec<f64> = (0..10_000).map(|i| 10f64.powf(-8.0 + 8.0 * i as f64 / 9999.0)).collect();
        Some(sol.residual(&samples)?)
    } else {
        None
    };
    let membership: BTreeMap<&str, _> = [
        ("H10", sol.sobolev_membership(SobolevSpace::H10)),
        ("W1_N_over_Nm1", sol.sobolev_membership(SobolevSpace::W1NOverNm1)),
        ("L2star", sol.sobolev_membership(SobolevSpace::L2Star)),
    ]
    .into_iter()
    .collect();
    let profile = sol.profile(RadialGrid::geometric(dim, args.grid.grid_n, args.rmin)?)?;
    let mut outputs = Outputs::new(args.output.out.as_deref(), "singular", args)?;
    outputs.write_profile("profile", &profile, args.output.format)?;
    outputs.write_json(
        "singular.json",
        &serde_json::json!({
            "kind": sol.kind(), "N": dim, "lambda": sol.lambda(),
            "max_residual": residual, "membership": membership, "origin_excluded": true,
        }),
    )?;
    outputs.finish()?;
    let mut line = format!("lambda={}", sol.lambda());
    if let Some(r) = residual {
        line.push_str(&format!(" max_residual={r:e}"));
    }
    for (name, m) in &membership {
        line.push_str(&format!(" {name}={}", m.member));
    }
    Ok(line)
}

fn approximate_cmd(args: &ApproximateArgs) -> Result<String> {
    let dim = dimension(args.family.n)?;
    let (spec, supersolution, target) = match args.singular {
        Some(kind) => {
            let sol = make_singular(singular_kind(kind, args.family.p)?, dim)?;
            let sup = singular_supersolution(&sol, args.grid.grid_n, args.rmin)?;
            (sol.nonlinearity().with_scale(sol.lambda())?, sup, None)
        }
        None => {
            let unit = unit_spec(&args.family)?;
            let cfg = shoot_config(&args.grid);
            let minimal = shoot_at_lambda(&unit, args.family.lambda, dim, &cfg)?;
            let grid = RadialGrid::graded(dim, args.grid.grid_n, args.grid.grid_gamma)?;
            let star = shoot_on_grid(&unit, minimal.a, grid, &cfg)?.profile;
            (unit.with_scale(args.family.lambda)?, star.clone(), Some(star))
        }
    };
    let run = approximate_weak_solution(&spec, &supersolution, &args.eps, target.as_ref(), &IterationConfig::default())?;
    let mut outputs = Outputs::new(args.output.out.as_deref(), "approximate", args)?;
    outputs.write_json(
        "approximation.json",
        &serde_json::json!({
            "runs": run.report(),
            "supersolution_sup": run.supersolution_sup,
            "supersolution_h1": run.supersolution_h1,
        }),
    )?;
    for (i, r) in run.runs.iter().enumerate() {
        outputs.write_profile(&format!("u_min_{i}"), &r.outcome.u_min, args.output.format)?;
    }
    if let Some(limit) = &run.limit {
        outputs.write_profile("limit", limit, args.output.format)?;
    }
    outputs.finish()?;
    let last = run.runs.last().expect("non-empty schedule");
    let mut line = format!("eps={} sup={} h1={} iterations={}", last.eps, last.sup_norm, last.h1_seminorm, last.outcome.iterations_min);
    if let Some(d) = last.sup_diff_to_target {
        line.push_str(&format!(" sup_diff_to_target={d:e}"));
    }
    Ok(line)
}

fn bounds_cmd(args: &BoundsArgs) -> Result<String> {
    let dim = dimension(args.family.n)?;
    let branch = sweep(dim, &args.family, &args.sweep, &args.grid, false)?;
    let report = evaluate_bounds(&branch, &args.theta)?;
    let corollary = check_corollary(&branch)?;
    let mut outputs = Outputs::new(args.output.out.as_deref(), "bounds", args)?;
    match args.output.format {
        Format::Csv => outputs.write("bounds.csv", &report.to_csv())?,
        Format::Json => outputs.write_json("bounds.json", &report)?,
    }
    outputs.write_json("bounds_summary.json", &serde_json::json!({ "summary": report.summary, "corollary": corollary }))?;
    outputs.finish()?;
    let mut line = format!("{} points, {} skipped", report.points.len(), report.skipped.len());
    for s in &report.summary {
        line.push_str(&format!(" theta={}: max/median={:.4}", s.theta, s.max_over_median));
    }
    line.push_str(&format!(" corollary_consistent={}", corollary.consistent));
    Ok(line)
}
