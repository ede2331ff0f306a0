//! Command-line surface.
//!
//! Subcommands: `critical-speed`, `classify`, `sweep`, `figures`, `verify`.
//! Exit codes: 0 success, 1 usage/configuration, 2 model validation,
//! 3 solver inconsistency or oracle failure. The env var
//! `BIFRONT_TOL_OVERRIDE` scales all solver tolerances by one factor.
//! Every run is deterministic given its arguments.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::limits;
use crate::model::{ConvectionSpec, ModelSpec, ReactionSpec};
use crate::oracle;
use crate::profile::{self, DEFAULT_GRID_POINTS, DEFAULT_WINDOW};
use crate::reduction::{integrate_backward, FrontProblem};
use crate::speed::{self, SpeedError, SpeedSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "bifront",
    version,
    about = "Traveling fronts for reaction-convection equations with relativistic diffusion: \
             critical speeds, profiles, and vanishing-diffusion limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the critical speed c*_ε by certified bisection
    CriticalSpeed(CriticalSpeedArgs),
    /// Classify the ε→0 regime and report the limit analysis
    Classify(ClassifyArgs),
    /// Critical speeds and profile distances along a decreasing ε list
    Sweep(SweepArgs),
    /// Emit the plot-ready CSV data behind the reference figure set
    Figures(FiguresArgs),
    /// Run the oracle certifications and write the certification file
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Builtin model family (currently: fisher-burgers)
    #[arg(long, conflicts_with = "model_file")]
    model: Option<String>,
    /// Reaction strength k of the builtin family
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Convection strength α of the builtin family (h = α·u²)
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// JSON model file: {"f": {"family": ...}, "h": {"family": ...}}
    #[arg(long)]
    model_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CriticalSpeedArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Diffusion parameter ε
    #[arg(long)]
    eps: f64,
    /// Bisection tolerance on c
    #[arg(long, default_value_t = speed::DEFAULT_TOL_C)]
    tol_c: f64,
    /// Also reconstruct the critical profile and write it as z,v,dv CSV
    #[arg(long)]
    with_profile: Option<PathBuf>,
    /// Output format: json or csv
    #[arg(long, default_value = "json")]
    format: String,
    /// Output path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Strictly decreasing comma-separated ε list, e.g. 2e-3,1e-3,5e-4
    #[arg(long)]
    eps_list: String,
    /// z window for the profile-distance column, e.g. -0.4,0.4
    #[arg(long, default_value = "-0.4,0.4")]
    z_window: String,
    #[arg(long, default_value_t = speed::DEFAULT_TOL_C)]
    tol_c: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FiguresArgs {
    /// Directory for the per-panel CSV files and summary JSONs
    #[arg(long)]
    out_dir: PathBuf,
    /// Restrict to one figure: fig1, fig2, fig3 or fig4
    #[arg(long)]
    only: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Where to write the certification records
    #[arg(long, default_value = "certifications.json")]
    output: PathBuf,
}

/// Parse argv and run; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args())
}

/// Testable entry point.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let tol_scale = match tol_override() {
        Ok(s) => s,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_USAGE;
        }
    };

    match cli.command {
        Command::CriticalSpeed(args) => cmd_critical_speed(args, tol_scale),
        Command::Classify(args) => cmd_classify(args),
        Command::Sweep(args) => cmd_sweep(args, tol_scale),
        Command::Figures(args) => cmd_figures(args, tol_scale),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn tol_override() -> Result<f64, String> {
    match std::env::var("BIFRONT_TOL_OVERRIDE") {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0 && v.is_finite())
            .ok_or_else(|| format!("BIFRONT_TOL_OVERRIDE must be a positive real, got {s:?}")),
        Err(_) => Ok(1.0),
    }
}

fn speed_settings(tol_scale: f64) -> SpeedSettings {
    let mut s = SpeedSettings::default();
    s.reduction.tol = s.reduction.tol.scaled(tol_scale);
    s
}

fn build_model(args: &ModelArgs) -> Result<ModelSpec, (i32, String)> {
    if let Some(path) = &args.model_file {
        let text = fs::read_to_string(path)
            .map_err(|e| (EXIT_USAGE, format!("cannot read {}: {e}", path.display())))?;
        return ModelSpec::from_json_str(&text).map_err(|e| (EXIT_VALIDATION, e.to_string()));
    }
    match args.model.as_deref() {
        Some("fisher-burgers") => {
            let alpha = args.alpha.ok_or((
                EXIT_USAGE,
                "--model fisher-burgers requires --alpha".to_string(),
            ))?;
            if !args.k.is_finite() || args.k <= 0.0 {
                return Err((EXIT_USAGE, format!("--k must be positive, got {}", args.k)));
            }
            Ok(ModelSpec::new(
                ReactionSpec::Logistic { k: args.k },
                ConvectionSpec::Quadratic { alpha },
            )
            .map_err(|e| (EXIT_VALIDATION, e.to_string()))?)
        }
        Some(other) => Err((
            EXIT_USAGE,
            format!("unknown --model {other:?}; use fisher-burgers or --model-file"),
        )),
        None => Err((EXIT_USAGE, "one of --model or --model-file is required".to_string())),
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), (i32, String)> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| (EXIT_USAGE, format!("cannot write {}: {e}", path.display()))),
        None => {
            if text.ends_with('\n') {
                print!("{text}");
            } else {
                println!("{text}");
            }
            Ok(())
        }
    }
}

fn speed_error_exit(e: &SpeedError) -> i32 {
    match e {
        SpeedError::InvalidModel(_) => EXIT_VALIDATION,
        SpeedError::InvalidEpsilon(_) | SpeedError::InvalidEpsList => EXIT_USAGE,
        _ => EXIT_SOLVER,
    }
}

fn cmd_critical_speed(args: CriticalSpeedArgs, tol_scale: f64) -> i32 {
    let model = match build_model(&args.model) {
        Ok(m) => m,
        Err((code, msg)) => {
            eprintln!("{msg}");
            return code;
        }
    };
    let settings = speed_settings(tol_scale);
    let result = match speed::critical_speed(&model, args.eps, args.tol_c * tol_scale, &settings) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return speed_error_exit(&e);
        }
    };

    if let Some(profile_path) = &args.with_profile {
        let problem = match FrontProblem::new(&model, args.eps, result.bracket.1) {
            Ok(p) => p,
            Err(e) => {
                eprintln!("{e}");
                return EXIT_SOLVER;
            }
        };
        let prof = integrate_backward(&problem, settings.reduction.v_min, &settings.reduction)
            .map_err(|e| e.to_string())
            .and_then(|traj| {
                profile::reconstruct(&traj, &problem, DEFAULT_WINDOW, DEFAULT_GRID_POINTS)
                    .map_err(|e| e.to_string())
            });
        match prof {
            Ok(p) => {
                if let Err(e) = fs::write(profile_path, p.to_csv()) {
                    eprintln!("cannot write {}: {e}", profile_path.display());
                    return EXIT_USAGE;
                }
            }
            Err(msg) => {
                eprintln!("profile reconstruction failed: {msg}");
                return EXIT_SOLVER;
            }
        }
    }

    let text = match args.format.as_str() {
        "json" => result.to_json(&model),
        "csv" => format!(
            "c_star,lower_bound,upper_bound,iterations,epsilon\n{:.12e},{:.12e},{:.12e},{},{:.6e}\n",
            result.c_star, result.bounds.lower, result.bounds.upper, result.iterations, args.eps
        ),
        other => {
            eprintln!("unknown --format {other:?}; use json or csv");
            return EXIT_USAGE;
        }
    };
    match emit(&args.output, &text) {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            eprintln!("{msg}");
            code
        }
    }
}

fn cmd_classify(args: ClassifyArgs) -> i32 {
    let model = match build_model(&args.model) {
        Ok(m) => m,
        Err((code, msg)) => {
            eprintln!("{msg}");
            return code;
        }
    };
    let report = model.validate();
    if !report.is_valid() {
        eprintln!("{report}");
        return EXIT_VALIDATION;
    }
    let analysis = match limits::analyze(&model) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_SOLVER;
        }
    };

    #[derive(Serialize)]
    struct ClassifyOut<'a> {
        model_digest: String,
        #[serde(flatten)]
        analysis: &'a limits::LimitAnalysis,
        theorem_hypotheses_satisfied: bool,
        note: &'a str,
    }
    let out = ClassifyOut {
        model_digest: model.digest(),
        analysis: &analysis,
        theorem_hypotheses_satisfied: analysis.regime.regime != limits::Regime::Unclassified,
        note: if analysis.regime.regime == limits::Regime::Unclassified {
            "theorem hypotheses not satisfied; c_bar is only the integral lower bound"
        } else {
            ""
        },
    };
    let text = serde_json::to_string_pretty(&out).expect("classify serialization cannot fail");
    match emit(&args.output, &text) {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            eprintln!("{msg}");
            code
        }
    }
}

/// Parse a strictly decreasing comma-separated ε list.
pub fn parse_eps_list(s: &str) -> Result<Vec<f64>, String> {
    let list: Result<Vec<f64>, _> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let list = list.map_err(|e| format!("cannot parse --eps-list {s:?}: {e}"))?;
    if list.is_empty() || list.iter().any(|&e| !e.is_finite() || e <= 0.0) {
        return Err(format!("--eps-list must contain positive reals, got {s:?}"));
    }
    if list.windows(2).any(|w| w[0] <= w[1]) {
        return Err(format!("--eps-list must be strictly decreasing, got {s:?}"));
    }
    Ok(list)
}

/// Parse a `lo,hi` z window with lo < hi.
pub fn parse_z_window(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("--z-window must be lo,hi — got {s:?}"));
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|e| format!("bad z window: {e}"))?;
    let hi = parts[1].trim().parse::<f64>().map_err(|e| format!("bad z window: {e}"))?;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(format!("--z-window must satisfy lo < hi, got {s:?}"));
    }
    Ok((lo, hi))
}

fn cmd_sweep(args: SweepArgs, tol_scale: f64) -> i32 {
    let model = match build_model(&args.model) {
        Ok(m) => m,
        Err((code, msg)) => {
            eprintln!("{msg}");
            return code;
        }
    };
    let eps_list = match parse_eps_list(&args.eps_list) {
        Ok(l) => l,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_USAGE;
        }
    };
    let z_window = match parse_z_window(&args.z_window) {
        Ok(w) => w,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_USAGE;
        }
    };
    let report = model.validate();
    if !report.is_valid() {
        eprintln!("{report}");
        return EXIT_VALIDATION;
    }

    let settings = speed_settings(tol_scale);
    let limit = limits::analyze(&model).ok().and_then(|a| a.limit_profile);

    let mut out = String::from("epsilon,c_star,sup_distance,monotone_ok,error\n");
    let mut prev_c: Option<f64> = None;
    for &eps in &eps_list {
        match speed::critical_speed(&model, eps, args.tol_c * tol_scale, &settings) {
            Ok(r) => {
                let monotone_ok = prev_c.map(|p| p >= r.c_star - args.tol_c).unwrap_or(true);
                prev_c = Some(r.c_star);
                let dist = match &limit {
                    Some(lp) => {
                        let problem = FrontProblem::new(&model, eps, r.bracket.1)
                            .expect("epsilon validated");
                        integrate_backward(&problem, settings.reduction.v_min, &settings.reduction)
                            .ok()
                            .and_then(|traj| {
                                profile::reconstruct(
                                    &traj,
                                    &problem,
                                    DEFAULT_WINDOW,
                                    DEFAULT_GRID_POINTS,
                                )
                                .ok()
                            })
                            .map(|p| limits::profile_distance(&p, lp, z_window, 801))
                    }
                    None => None,
                };
                let dist_str =
                    dist.map(|d| format!("{d:.6e}")).unwrap_or_else(|| "nan".to_string());
                out.push_str(&format!(
                    "{eps:.6e},{:.12e},{dist_str},{monotone_ok},\n",
                    r.c_star
                ));
            }
            Err(e) => {
                out.push_str(&format!("{eps:.6e},nan,nan,false,\"{e}\"\n"));
            }
        }
    }
    match emit(&args.output, &out) {
        Ok(()) => EXIT_OK,
        Err((code, msg)) => {
            eprintln!("{msg}");
            code
        }
    }
}

#[derive(Serialize)]
struct PanelSummary {
    panel: String,
    epsilon: f64,
    c_star: Option<f64>,
    c_bar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn figure_models() -> Vec<(&'static str, ModelSpec, Vec<f64>)> {
    let fb = |alpha: f64| ModelSpec::fisher_burgers(1.0, alpha);
    vec![
        ("fig1_alpha_1", fb(1.0), vec![2e-3]),
        ("fig1_alpha_0.5", fb(0.5), vec![2e-3]),
        ("fig1_alpha_0.05", fb(0.05), vec![2e-3]),
        ("fig1_alpha_-0.05", fb(-0.05), vec![2e-3]),
        ("fig1_alpha_-1over6", fb(-1.0 / 6.0), vec![2e-3]),
        ("fig1_alpha_-0.5", fb(-0.5), vec![2e-3]),
        ("fig2_alpha_1", fb(1.0), vec![2e-3, 2e-4]),
        (
            "fig3_sqrt_convection",
            ModelSpec::new(
                ReactionSpec::Logistic { k: 1.0 },
                ConvectionSpec::Power { q: 1.5, coef: 1.0 },
            )
            .expect("builtin"),
            vec![0.01, 0.002],
        ),
        (
            "fig4_degenerate_reaction",
            ModelSpec::new(
                ReactionSpec::PowerLogistic { p: 2.0, k: 1.0 },
                ConvectionSpec::Quadratic { alpha: 1.0 },
            )
            .expect("builtin"),
            vec![0.1, 0.01],
        ),
    ]
}

fn cmd_figures(args: FiguresArgs, tol_scale: f64) -> i32 {
    if let Err(e) = fs::create_dir_all(&args.out_dir) {
        eprintln!("cannot create {}: {e}", args.out_dir.display());
        return EXIT_USAGE;
    }
    let settings = speed_settings(tol_scale);
    let filter = args.only.as_deref();
    let mut summaries: Vec<PanelSummary> = Vec::new();

    for (name, model, eps_values) in figure_models() {
        if let Some(f) = filter {
            if !name.starts_with(f) {
                continue;
            }
        }
        let c_bar = limits::limit_speed(&model).ok().map(|l| l.c_bar);
        // the gray reference curve: piecewise limit profile, where defined
        if let Ok(analysis) = limits::analyze(&model) {
            if let Some(lp) = &analysis.limit_profile {
                let path = args.out_dir.join(format!("{name}_limit.csv"));
                let _ = fs::write(path, lp.to_csv(-4.0, 4.0, 1601));
            }
        }
        for eps in eps_values {
            let panel = format!("{name}_eps_{eps:e}");
            match run_panel(&model, eps, &settings, &args.out_dir, &panel) {
                Ok(c_star) => summaries.push(PanelSummary {
                    panel,
                    epsilon: eps,
                    c_star: Some(c_star),
                    c_bar,
                    error: None,
                }),
                Err(msg) => summaries.push(PanelSummary {
                    panel,
                    epsilon: eps,
                    c_star: None,
                    c_bar,
                    error: Some(msg),
                }),
            }
        }
    }

    let summary_path = args.out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summaries).expect("summary serialization");
    if let Err(e) = fs::write(&summary_path, text) {
        eprintln!("cannot write {}: {e}", summary_path.display());
        return EXIT_USAGE;
    }
    EXIT_OK
}

fn run_panel(
    model: &ModelSpec,
    eps: f64,
    settings: &SpeedSettings,
    out_dir: &Path,
    panel: &str,
) -> Result<f64, String> {
    let r = speed::critical_speed(model, eps, speed::DEFAULT_TOL_C, settings)
        .map_err(|e| e.to_string())?;
    let problem = FrontProblem::new(model, eps, r.bracket.1).map_err(|e| e.to_string())?;
    let traj = integrate_backward(&problem, settings.reduction.v_min, &settings.reduction)
        .map_err(|e| e.to_string())?;
    let prof = profile::reconstruct(&traj, &problem, DEFAULT_WINDOW, DEFAULT_GRID_POINTS)
        .map_err(|e| e.to_string())?;
    fs::write(out_dir.join(format!("{panel}.csv")), prof.to_csv()).map_err(|e| e.to_string())?;
    Ok(r.c_star)
}

fn cmd_verify(args: VerifyArgs) -> i32 {
    let checks = oracle::verify_certifications();
    let records: Vec<&oracle::CertRecord> = checks.iter().map(|c| &c.record).collect();
    let text = serde_json::to_string_pretty(&records).expect("record serialization");
    if let Err(e) = fs::write(&args.output, text) {
        eprintln!("cannot write {}: {e}", args.output.display());
        return EXIT_USAGE;
    }

    let mut all_ok = true;
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {} oracle={:.12e} computed={:.12e} tol={:.1e} [{}]",
            c.record.quantity_id, c.record.value, c.computed, c.record.tolerance, c.record.method
        );
        all_ok &= c.pass;
    }
    println!(
        "certifications: {}/{} passed; records written to {}",
        checks.iter().filter(|c| c.pass).count(),
        checks.len(),
        args.output.display()
    );
    if all_ok {
        EXIT_OK
    } else {
        EXIT_SOLVER
    }
}
