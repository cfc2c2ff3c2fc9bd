use std::f64::consts::PI;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spherecurve::classification::{classify_component, StatusTag};
use spherecurve::curve_model::make_circle_n;
use spherecurve::good_bands::{band_from_condensed, central_curve, collapse_condensed, contract_band, retract_to_good};
use spherecurve::grafting::{graft_antipodal_circles, graft_simplex_step, graft_until_resolved, GraftRecord};
use spherecurve::homotopy_engine::{
    add_loops, bend_k_equator, bent_equator, neither_example, shrink_condensed, spread_loops, validate_path,
    HomotopyPath, Provenance,
};
use spherecurve::io::{
    classification_json, curve_from_value, curve_to_json, path_to_jsonl, to_json_string, tolerance_from_str,
    validation_json, KappaJson,
};
use spherecurve::{AdmissibleCurve, CurvatureBounds, Error as CoreError, ToleranceProfile};

#[derive(Parser, Debug)]
#[command(name = "spherecurve", version, about = "Spherical curves with bounded geodesic curvature")]
struct Cli {
    /// JSON file overriding fields of the default tolerance profile.
    #[arg(long, global = true)]
    tol_profile: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "SPHERECURVE_SEED")]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a curve.
    Gen(GenArgs),
    /// Classify a curve into its component.
    Classify {
        input: PathBuf,
        /// Exit with status 3 on borderline curves.
        #[arg(long)]
        strict: bool,
    },
    /// Bending of the k-equator.
    Bend {
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        kappa1: Option<f64>,
    },
    /// Add loops at one point, or spread them along the curve.
    Loops(LoopArgs),
    /// Homotopy of a condensed curve to a circle traversed ν times.
    Shrink {
        input: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Graft circle arcs into a curve.
    Graft(GraftArgs),
    /// Good-band profiles and central curve of a condensed curve.
    Bands(BandArgs),
    /// Validate a JSONL path.
    Validate {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        kappa1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        kappa2: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Circle,
    BendingFrame,
    NeitherExample,
}

#[derive(Args, Debug)]
struct GenArgs {
    kind: GenKind,
    #[arg(long, default_value_t = PI / 2.0)]
    rho: f64,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Bending parameter in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    #[arg(long, allow_hyphen_values = true)]
    kappa1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa2: Option<String>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct LoopArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    t0: f64,
    #[arg(long, default_value_t = 1)]
    count: u32,
    #[arg(long, default_value_t = 0.1)]
    rho_small: f64,
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    /// Spread `count` loops of radius `--rho1` along the whole curve instead.
    #[arg(long)]
    spread: bool,
    #[arg(long, default_value_t = 0.1)]
    rho1: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraftMode {
    Antipodal,
    Simplex,
    Auto,
}

#[derive(Args, Debug)]
struct GraftArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = GraftMode::Auto)]
    mode: GraftMode,
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    #[arg(long, default_value_t = 50.0)]
    budget: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BandFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct BandArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = BandFormat::Csv)]
    format: BandFormat,
    /// Contraction parameter applied before the retraction.
    #[arg(long, default_value_t = 0.0)]
    contract: f64,
    /// Emit the collapse path as JSONL instead of the profiles.
    #[arg(long)]
    collapse: bool,
    #[arg(long)]
    steps: Option<usize>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Parse(anyhow::Error),
    Borderline,
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Other(e.into())
    }
}

fn parse_kappa(s: &Option<String>, default: f64) -> anyhow::Result<f64> {
    match s {
        None => Ok(default),
        Some(t) => match t.parse::<f64>() {
            Ok(x) => Ok(x),
            Err(_) => KappaJson::Sentinel(t.clone()).to_f64().map_err(Into::into),
        },
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Parse(e.into()))?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(Failure::Parse)
}

fn read_curve(path: &Path, tol: &ToleranceProfile) -> Result<AdmissibleCurve, Failure> {
    let text = read_text(path)?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let value: Value = serde_json::from_str(text.trim())
        .or_else(|_| serde_json::from_str(first))
        .map_err(|e| Failure::Parse(anyhow!("{}: {e}", path.display())))?;
    curve_from_value(&value, tol).map_err(|e| match e {
        CoreError::InvalidInput(_) => Failure::Parse(e.into()),
        other => Failure::Other(other.into()),
    })
}

fn load_tolerance(cli: &Cli) -> Result<ToleranceProfile, Failure> {
    let mut tol = match &cli.tol_profile {
        Some(p) => tolerance_from_str(&read_text(p)?).map_err(|e| Failure::Parse(e.into()))?,
        None => ToleranceProfile::default(),
    };
    if let Some(seed) = cli.seed {
        tol.seed = seed;
    }
    Ok(tol)
}

fn graft_line(curve: &AdmissibleCurve, record: Option<&GraftRecord>, extra: Value) -> String {
    let mut v = serde_json::to_value(curve_to_json(curve)).expect("curve JSON");
    if let Some(r) = record {
        v["graft"] = serde_json::to_value(r).expect("record JSON");
    }
    if let Value::Object(m) = extra {
        for (k, x) in m {
            v[k] = x;
        }
    }
    to_json_string(&v) + "\n"
}

fn path_output(path: &HomotopyPath, tol: &ToleranceProfile) -> (String, bool) {
    let report = validate_path(path, &path.bounds, tol);
    (path_to_jsonl(path, &report), report.pass)
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let tol = load_tolerance(cli)?;
    match &cli.command {
        Command::Gen(a) => {
            let curve = match a.kind {
                GenKind::Circle => {
                    let b = CurvatureBounds::new(
                        parse_kappa(&a.kappa1, f64::NEG_INFINITY)?,
                        parse_kappa(&a.kappa2, f64::INFINITY)?,
                    )?;
                    make_circle_n(a.rho, a.k, b, a.n.unwrap_or(tol.grid_n))?
                }
                GenKind::BendingFrame => {
                    let k1 = parse_kappa(&a.kappa1, 1.01 * (PI / (2.0 * a.k as f64 + 2.0)).tan())?;
                    let b = CurvatureBounds::new(-k1.abs(), k1.abs())?;
                    if !(0.0..=1.0).contains(&a.s) {
                        return Err(Failure::Parse(anyhow!("bending parameter {} outside [0, 1]", a.s)));
                    }
                    bent_equator(a.k, a.s * PI, b, a.n.unwrap_or(64))?
                }
                GenKind::NeitherExample => neither_example()?,
            };
            Ok((to_json_string(&curve_to_json(&curve)) + "\n", true))
        }
        Command::Classify { input, strict } => {
            let curve = read_curve(input, &tol)?;
            let report = classify_component(&curve, &tol)?;
            let borderline = report.label.diagnostics.borderline || report.status.tag == StatusTag::Borderline;
            let text = to_json_string(&classification_json(&report)) + "\n";
            if *strict && borderline {
                emit(cli, &text)?;
                return Err(Failure::Borderline);
            }
            Ok((text, true))
        }
        Command::Bend { k, steps, kappa1 } => {
            let k1 = kappa1.unwrap_or(1.01 * (PI / (2.0 * *k as f64 + 2.0)).tan());
            let path = bend_k_equator(*k, steps.unwrap_or(tol.path_steps), k1, &tol)?;
            Ok(path_output(&path, &tol))
        }
        Command::Loops(a) => {
            let curve = read_curve(&a.input, &tol)?;
            let out = if a.spread {
                spread_loops(&curve, a.count, a.rho1)?
            } else {
                add_loops(&curve, a.t0, a.count, a.rho_small, a.eps)?
            };
            let extra = json!({
                "tot_before": curve.total_curvature(),
                "tot_after": out.total_curvature(),
                "parity_before": curve.lift_parity()?.sign(),
                "parity_after": out.lift_parity()?.sign(),
            });
            Ok((graft_line(&out, None, extra), true))
        }
        Command::Shrink { input, steps } => {
            let curve = read_curve(input, &tol)?;
            let steps = steps.unwrap_or(tol.path_steps);
            let kappa0 = spherecurve::classification::reduce_to_k0(&curve)?.1;
            let path = if kappa0 >= 0.0 {
                shrink_condensed(&curve, steps, &tol)?
            } else {
                collapse_condensed(&curve, steps, &tol)?
            };
            Ok(path_output(&path, &tol))
        }
        Command::Graft(a) => graft(a, &tol),
        Command::Bands(a) => bands(a, &tol),
        Command::Validate { input, kappa1, kappa2 } => {
            let text = read_text(input)?;
            let mut curves = Vec::new();
            let mut s_values = Vec::new();
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let v: Value =
                    serde_json::from_str(line).map_err(|e| Failure::Parse(anyhow!("line {}: {e}", i + 1)))?;
                if v.get("v_hat").is_none() && v.get("gamma").is_none() {
                    continue;
                }
                s_values.push(v.get("s").and_then(Value::as_f64).unwrap_or(curves.len() as f64));
                curves.push(curve_from_value(&v, &tol).map_err(|e| Failure::Parse(e.into()))?);
            }
            if curves.is_empty() {
                return Err(Failure::Parse(anyhow!("no curves in {}", input.display())));
            }
            let first = curves[0].bounds();
            let bounds = CurvatureBounds::new(parse_kappa(kappa1, first.kappa1)?, parse_kappa(kappa2, first.kappa2)?)?;
            let path = HomotopyPath { bounds, s_values, curves, provenance: Provenance::Custom };
            let report = validate_path(&path, &bounds, &tol);
            Ok((to_json_string(&validation_json(&report)) + "\n", report.pass))
        }
    }
}

fn graft(a: &GraftArgs, tol: &ToleranceProfile) -> Result<(String, bool), Failure> {
    let curve = read_curve(&a.input, tol)?;
    let mut out = graft_line(&curve, None, json!({"step": 0}));
    match a.mode {
        GraftMode::Antipodal | GraftMode::Simplex => {
            let (next, record) = match a.mode {
                GraftMode::Antipodal => graft_antipodal_circles(&curve, a.step, tol)?,
                _ => graft_simplex_step(&curve, a.step, tol)?,
            };
            let tot = next.total_curvature() - curve.total_curvature();
            out += &graft_line(&next, Some(&record), json!({"step": 1, "tot_increment": tot}));
            out += &(to_json_string(&json!({"report": "graft", "frame_residual": record.frame_residual})) + "\n");
        }
        GraftMode::Auto => {
            let o = graft_until_resolved(&curve, a.step, a.budget, tol)?;
            for (i, r) in o.records.iter().enumerate() {
                if i + 1 == o.records.len() {
                    out += &graft_line(&o.curve, Some(r), json!({"step": i + 1}));
                } else {
                    out += &(to_json_string(&json!({"step": i + 1, "graft": r})) + "\n");
                }
            }
            let status = serde_json::to_value(o.status).expect("status tag");
            out += &(to_json_string(&json!({
                "report": "graft",
                "status": status,
                "accumulated": o.accumulated,
                "grafts": o.records.len(),
                "bound": o.bound,
                "tot": o.curve.total_curvature(),
            })) + "\n");
        }
    }
    Ok((out, true))
}

fn bands(a: &BandArgs, tol: &ToleranceProfile) -> Result<(String, bool), Failure> {
    let curve = read_curve(&a.input, tol)?;
    if a.collapse {
        let path = collapse_condensed(&curve, a.steps.unwrap_or(tol.path_steps), tol)?;
        return Ok(path_output(&path, tol));
    }
    let band = band_from_condensed(&curve, tol)?;
    let report = retract_to_good(&contract_band(&band, a.contract), tol)?;
    let good = &report.good;
    let central = central_curve(good, CurvatureBounds::unbounded())?;
    let b = &good.band;
    match a.format {
        BandFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["k", "lambda", "theta_plus", "theta_minus"]).map_err(anyhow::Error::from)?;
            for k in 0..b.k() {
                w.write_record(&[
                    k.to_string(),
                    format!("{:.16e}", b.longitude(k)),
                    format!("{:.16e}", b.theta_plus[k]),
                    format!("{:.16e}", b.theta_minus[k]),
                ])
                .map_err(anyhow::Error::from)?;
            }
            let bytes = w.into_inner().map_err(|e| anyhow!("{e}"))?;
            Ok((String::from_utf8(bytes).map_err(anyhow::Error::from)?, true))
        }
        BandFormat::Json => {
            let v = json!({
                "nu": b.nu,
                "width": b.width,
                "lambda": (0..b.k()).map(|k| b.longitude(k)).collect::<Vec<_>>(),
                "theta_plus": b.theta_plus,
                "theta_minus": b.theta_minus,
                "defect": good.defect,
                "iterations": report.iterations,
                "monotone": report.monotone,
                "central": curve_to_json(&central.curve),
                "central_rho": [central.rho_min, central.rho_max],
                "central_margin": central.margin,
                "track_clearance": central.track_clearance,
                "lipschitz": central.lipschitz,
            });
            Ok((to_json_string(&v) + "\n", true))
        }
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((text, pass)) => {
            if let Err(e) = emit(&cli, &text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: validation failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Parse(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Borderline) => {
            eprintln!("error: borderline classification");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
