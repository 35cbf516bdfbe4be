mod input;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use symcar::caratheodory::{
    car_metric, classify, extremal_omegas, extremality_check, Config, Diagnostics, ExtremalSet, ExtremalityReport,
    ScalarMap, TangentKind,
};
use symcar::families::FamilyMember;
use symcar::symdisc::{make_tangent, GTangent, TangentSpec};
use symcar::verify::{run_suite, CheckReport, Suite};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] symcar::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Lib(symcar::Error::InvalidParameter(_)) => 2,
            CliError::Lib(symcar::Error::Precondition(_)) => 4,
            CliError::Lib(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Carathéodory metric, extremal problems and realizations on the symmetrized bidisc.
///
/// Tangents and family specs are JSON, given inline, as `@path`, or `-` for
/// stdin. Complex entries may be `[re, im]` or `"re,im"`.
#[derive(Debug, Parser)]
#[command(name = "symcar", version)]
struct Cli {
    /// Angles sampled on the circle.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Relative spread below which the profile counts as constant.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON config file; flags above take precedence.
    #[arg(long, global = true, env = "SYMCAR_CONFIG", hide_env_values = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric value, extremal angles and tangent type.
    Car { tangent: String },
    /// Objective sampled over the circle.
    Sweep { tangent: String },
    /// Evaluate a family member and test it against a tangent.
    Extremal {
        spec: String,
        /// Point of C^2 as "re,im;re,im" or JSON. Repeatable.
        #[arg(long = "at")]
        at: Vec<String>,
        /// Tangent for the extremality test. Balanced members default to their own
        /// tangent, royal members to the royal tangent at the origin.
        #[arg(long)]
        tangent: Option<String>,
    },
    /// Run the built-in checks.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: symcar::Error| e.to_string())
}

impl Cli {
    fn config(&self) -> Result<Config, CliError> {
        let mut cfg = match &self.config {
            Some(path) => input::load_config(path)?,
            None => Config::default(),
        };
        if let Some(g) = self.grid {
            cfg.grid_size = g;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

struct Outcome {
    body: String,
    failed: bool,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, failed: false }
    }
}

fn no_csv(cmd: &str) -> CliError {
    CliError::Usage(format!("--format csv is not available for {cmd}"))
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.16e},{:.16e}", z.re, z.im)
}

fn fmt_set(set: &ExtremalSet) -> String {
    match set {
        ExtremalSet::All => "all".into(),
        ExtremalSet::Finite(ws) => ws.iter().map(|&w| format!("({})", fmt_c(w))).collect::<Vec<_>>().join(" "),
    }
}

#[derive(Serialize)]
struct CarReport {
    tangent: GTangent,
    car: f64,
    extremal: ExtremalSet,
    kind: TangentKind,
    diagnostics: Diagnostics,
}

fn cmd_car(tangent: &str, format: Format, cfg: &Config) -> Result<Outcome, CliError> {
    let delta = input::parse_tangent(&input::read_source(tangent)?)?;
    let car = car_metric(&delta, cfg)?;
    let extremal = extremal_omegas(&car.profile, cfg);
    let ty = classify(&delta, cfg)?;
    let report = CarReport { tangent: delta, car: car.value, extremal, kind: ty.kind, diagnostics: ty.diagnostics };
    let body = match format {
        Format::Json => output::to_json(&report),
        Format::Csv => return Err(no_csv("car")),
        Format::Text => {
            let d = &report.diagnostics;
            let mut s = String::new();
            let _ = writeln!(s, "car       {:.16e}", report.car);
            let _ = writeln!(s, "extremal  {}", fmt_set(&report.extremal));
            let _ = writeln!(s, "kind      {:?}", report.kind);
            let _ = writeln!(s, "royal     point {:.3e} direction {:.3e}", d.royal_point_defect, d.royal_direction_defect);
            let _ = writeln!(s, "flat      beta ({}) defect {:.3e}", fmt_c(d.beta), d.flat_defect);
            if let Some(k) = d.normalized_curvature {
                let _ = writeln!(s, "f''/f     {k:.6e}");
            }
            if let Some(m) = d.tie_margin {
                let _ = writeln!(s, "tie       {m:.6e}");
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

fn cmd_sweep(tangent: &str, format: Format, cfg: &Config) -> Result<Outcome, CliError> {
    let delta = input::parse_tangent(&input::read_source(tangent)?)?;
    let car = car_metric(&delta, cfg)?;
    let body = match format {
        Format::Json => output::to_json(&car),
        Format::Csv | Format::Text => car.profile.to_csv(),
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct Evaluation {
    point: [Complex64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<Complex64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Extremality {
    tangent: GTangent,
    report: ExtremalityReport,
}

#[derive(Serialize)]
struct ExtremalReport {
    member: FamilyMember,
    evaluations: Vec<Evaluation>,
    /// Absent for bidisc members, which live on `D^2`.
    extremality: Option<Extremality>,
}

fn cmd_extremal(spec: &str, at: &[String], tangent: Option<&str>, format: Format, cfg: &Config) -> Result<Outcome, CliError> {
    let spec = input::parse_family(&input::read_source(spec)?)?;
    let member = spec.instantiate(cfg)?;
    let points = at.iter().map(|p| input::parse_point(p)).collect::<Result<Vec<_>, _>>()?;
    let evaluations = points
        .into_iter()
        .map(|point| match member.eval(point) {
            Ok(v) => Evaluation { point, value: Some(v), error: None },
            Err(e) => Evaluation { point, value: None, error: Some(e.to_string()) },
        })
        .collect();
    let target = match (tangent, &member) {
        (Some(_), FamilyMember::Bidisc(_)) => {
            return Err(CliError::Usage("bidisc members are maps on D^2; --tangent does not apply".into()));
        }
        (Some(t), _) => Some(input::parse_tangent(&input::read_source(t)?)?),
        (None, FamilyMember::Balanced(b)) => Some(b.delta),
        (None, FamilyMember::Royal(_)) => {
            Some(make_tangent(&TangentSpec::Royal { z: Complex64::new(0.0, 0.0), c: Complex64::new(1.0, 0.0) })?)
        }
        (None, FamilyMember::Bidisc(_)) => None,
    };
    let extremality = match target {
        Some(delta) => Some(Extremality { tangent: delta, report: extremality_check(&member, &delta, cfg)? }),
        None => None,
    };
    let report = ExtremalReport { member, evaluations, extremality };
    let body = match format {
        Format::Json => output::to_json(&report),
        Format::Csv => return Err(no_csv("extremal")),
        Format::Text => {
            let mut s = String::new();
            if let FamilyMember::Balanced(b) = &report.member {
                let _ = writeln!(s, "omega1    ({})", fmt_c(b.omega1));
                let _ = writeln!(s, "omega2    ({})", fmt_c(b.omega2));
                let _ = writeln!(s, "alignment {:.3e}", b.alignment_error);
                if b.t == 1.0 {
                    let _ = writeln!(s, "reduces   m1 o Phi_omega1");
                } else if b.t == 0.0 {
                    let _ = writeln!(s, "reduces   m2 o Phi_omega2");
                }
            }
            for e in &report.evaluations {
                let at = format!("({}) ({})", fmt_c(e.point[0]), fmt_c(e.point[1]));
                match (&e.value, &e.error) {
                    (Some(v), _) => {
                        let _ = writeln!(s, "F {at} = {}", fmt_c(*v));
                    }
                    (_, Some(err)) => {
                        let _ = writeln!(s, "F {at}: {err}");
                    }
                    _ => {}
                }
            }
            if let Some(x) = &report.extremality {
                let r = &x.report;
                let _ = writeln!(
                    s,
                    "extremal  {} (car {:.16e}, length {:.16e}, gap {:.3e})",
                    r.is_extremal, r.car, r.pushforward_length, r.gap
                );
            }
            s
        }
    };
    Ok(Outcome::ok(body))
}

#[derive(Serialize)]
struct VerifyReport {
    suite: Suite,
    passed: bool,
    checks: Vec<CheckReport>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_verify(suite: Suite, format: Format, cfg: &Config) -> Result<Outcome, CliError> {
    let checks = run_suite(suite, cfg);
    let passed = checks.iter().all(|c| c.passed);
    let body = match format {
        Format::Json => output::to_json(&VerifyReport { suite, passed, checks }),
        Format::Csv => {
            let mut s = String::from("id,name,passed,detail\n");
            for c in &checks {
                let _ = writeln!(s, "{},{},{},{}", c.id, csv_field(&c.name), c.passed, csv_field(&c.detail));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &checks {
                let _ = writeln!(s, "{c}");
            }
            let n = checks.iter().filter(|c| c.passed).count();
            let _ = writeln!(s, "{n}/{} passed", checks.len());
            s
        }
    };
    Ok(Outcome { body, failed: !passed })
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cli.config()?;
    match &cli.command {
        Command::Car { tangent } => cmd_car(tangent, cli.format, &cfg),
        Command::Sweep { tangent } => cmd_sweep(tangent, cli.format, &cfg),
        Command::Extremal { spec, at, tangent } => cmd_extremal(spec, at, tangent.as_deref(), cli.format, &cfg),
        Command::Verify { suite } => cmd_verify(*suite, cli.format, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("symcar: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.body),
        None => {
            print!("{}", outcome.body);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("symcar: {e}");
        return ExitCode::from(2);
    }
    if outcome.failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
