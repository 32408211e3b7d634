//! Command-line front end for `bffkit`: Bayes factor functions for tables
//! of replicated studies, plus an on-demand oracle check.

pub mod config;
pub mod curve_file;
pub mod error;
pub mod format;
pub mod input;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use bffkit::evidence::{bff_curve, bff_point, DEFAULT_R_MAX};
use bffkit::{EffectGrid64, LinearModelScale, RPolicy64, StudySet64};
use bffkit_oracle::equivalence::{run_equivalence, EquivalenceConfig, OracleFamily, DEFAULT_SEED, DEFAULT_TUPLES};
use bffkit_oracle::rates::{rate_harness, RateConfig, RateFamily, MIN_REPLICATES};

pub use config::Config;
pub use error::{CliError, Result};

use crate::curve_file::CurveRows;
use crate::format::fmt_num;

/// Magnitude of the offset added to closed forms by `--inject-fault`.
const FAULT: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "bffkit", version, about = "Bayes factor functions for replicated studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Combined log Bayes factor at one effect size.
    Point(PointArgs),
    /// Bayes factor function over an effect-size grid, written as CSV.
    Curve(CurveArgs),
    /// Compare closed forms against quadrature, optionally with rate checks.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Fixed prior shape r.
    #[arg(long, conflicts_with = "mmap")]
    pub r: Option<f64>,
    /// Choose r by marginal maximum a posteriori at each effect size.
    #[arg(long)]
    pub mmap: bool,
    /// Upper bound for r under --mmap.
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Denominator for linear-model F designs: as_printed or two_denominator.
    #[arg(long)]
    pub linear_model_scale: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: f64,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega_step: Option<f64>,
    #[command(flatten)]
    pub policy: PolicyArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated log Bayes factor levels.
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Comma-separated families: z, t, chisq, f, or z_one, z_two, t_one, t_two.
    #[arg(long)]
    pub families: Option<String>,
    #[arg(long)]
    pub tuples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also run the sample-size rate harness.
    #[arg(long)]
    pub rates: bool,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

/// Text for stdout and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

pub fn run(cli: &Cli, config: &Config) -> Result<Output> {
    match &cli.command {
        Command::Point(a) => cmd_point(a, config),
        Command::Curve(a) => cmd_curve(a, config),
        Command::Validate(a) => cmd_validate(a, config),
    }
}

fn resolve_policy(args: &PolicyArgs, config: &Config) -> Result<RPolicy64> {
    let r_max = args.r_max.or(config.r_max).unwrap_or(DEFAULT_R_MAX);
    if !(r_max.is_finite() && r_max >= 1.0) {
        return Err(CliError::usage(format!("--r-max must be >= 1, got {r_max}")));
    }
    let fixed = |r: f64| {
        if r.is_finite() && r >= 1.0 {
            Ok(RPolicy64::Fixed(r))
        } else {
            Err(CliError::usage(format!("--r must be >= 1, got {r}")))
        }
    };
    if let Some(r) = args.r {
        return fixed(r);
    }
    if args.mmap || config.mmap == Some(true) {
        return Ok(RPolicy64::Mmap { r_max });
    }
    fixed(config.r.unwrap_or(config::DEFAULT_R))
}

fn load(file: &std::path::Path, args: &PolicyArgs, config: &Config) -> Result<StudySet64> {
    let scale = match args.linear_model_scale.as_deref().or(config.linear_model_scale.as_deref()) {
        None | Some("as_printed") => LinearModelScale::AsPrinted,
        Some("two_denominator") => LinearModelScale::TwoDenominator,
        Some(other) => return Err(CliError::usage(format!("unknown linear model scale '{other}'"))),
    };
    Ok(input::load_studies(file)?.with_linear_model_scale(scale))
}

fn policy_line(policy: &RPolicy64) -> String {
    match policy {
        RPolicy64::Fixed(r) => format!("policy=fixed r={}", fmt_num(*r)),
        RPolicy64::Mmap { r_max } => format!("policy=mmap r_max={}", fmt_num(*r_max)),
    }
}

pub fn cmd_point(args: &PointArgs, config: &Config) -> Result<Output> {
    if !(args.omega.is_finite() && args.omega > 0.0) {
        return Err(CliError::usage(format!("--omega must be > 0, got {}", args.omega)));
    }
    let policy = resolve_policy(&args.policy, config)?;
    let set = load(&args.file, &args.policy, config)?;
    let p = bff_point(&set, args.omega, policy)?;
    let mut out = String::new();
    let _ = writeln!(out, "{}", policy_line(&policy));
    let _ = writeln!(out, "omega={}", fmt_num(p.omega));
    let _ = writeln!(out, "r_star={}", fmt_num(p.r_star));
    let _ = writeln!(out, "log_bf10={}", fmt_num(p.log_bf10));
    if let Some(lp) = p.log_prior_r {
        let _ = writeln!(out, "log_prior_r={}", fmt_num(lp));
        let _ = writeln!(out, "objective={}", fmt_num(p.curve_value()));
        let _ = writeln!(out, "at_boundary={}", p.at_boundary);
    }
    for (i, v) in p.per_study_log_bf.iter().enumerate() {
        let _ = writeln!(out, "study_{}={}", i + 1, fmt_num(*v));
    }
    Ok(Output::ok(out))
}

pub fn parse_levels(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::usage(format!("bad level '{s}'")))
        })
        .collect()
}

pub fn cmd_curve(args: &CurveArgs, config: &Config) -> Result<Output> {
    let min = args.omega_min.or(config.omega_min).unwrap_or(config::DEFAULT_OMEGA_MIN);
    let max = args.omega_max.or(config.omega_max).unwrap_or(config::DEFAULT_OMEGA_MAX);
    let step = args.omega_step.or(config.omega_step).unwrap_or(config::DEFAULT_OMEGA_STEP);
    if !(min > 0.0 && min <= max && step > 0.0) {
        return Err(CliError::usage(format!(
            "grid needs 0 < omega-min <= omega-max and omega-step > 0 (got {min}, {max}, {step})"
        )));
    }
    let grid = EffectGrid64::range(min, max, step).map_err(|e| CliError::usage(e.to_string()))?;
    let levels = match &args.levels {
        Some(text) => parse_levels(text)?,
        None => config.levels.clone().unwrap_or_else(|| config::DEFAULT_LEVELS.to_vec()),
    };
    let policy = resolve_policy(&args.policy, config)?;
    let set = load(&args.file, &args.policy, config)?;
    let curve = bff_curve(&set, &grid, policy)?;
    let rows = CurveRows::from_curve(&curve);
    let summary = curve_file::summarize(&rows, &levels).expect("grid is non-empty");
    let extra = vec![
        policy_line(&policy),
        format!("at_boundary={}", curve.any_at_boundary()),
    ];
    curve_file::write(&args.out, &curve_file::render(&rows, &summary, &extra))?;
    let mut out = curve_file::render_summary(&summary);
    for line in extra {
        let _ = writeln!(out, "{line}");
    }
    Ok(Output::ok(out))
}

fn families(args: &ValidateArgs, config: &Config) -> Result<Vec<OracleFamily>> {
    let tokens: Vec<String> = match (&args.families, &config.families) {
        (Some(text), _) => text.split(',').map(str::to_owned).collect(),
        (None, Some(list)) => list.clone(),
        (None, None) => return Ok(OracleFamily::ALL.to_vec()),
    };
    let mut out = Vec::new();
    for t in tokens {
        for f in OracleFamily::parse(&t).map_err(|e| CliError::usage(e.to_string()))? {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    Ok(out)
}

fn rate_family(f: OracleFamily) -> RateFamily {
    match f {
        OracleFamily::ZOne | OracleFamily::ZTwo => RateFamily::Z,
        OracleFamily::TOne | OracleFamily::TTwo => RateFamily::T,
        OracleFamily::ChiSq => RateFamily::ChiSq { k: 2.0 },
        OracleFamily::F => RateFamily::F { k: 2.0 },
    }
}

pub fn cmd_validate(args: &ValidateArgs, config: &Config) -> Result<Output> {
    let families = families(args, config)?;
    let cfg = EquivalenceConfig {
        tuples: args.tuples.or(config.tuples).unwrap_or(DEFAULT_TUPLES),
        seed: args.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        fault: if args.inject_fault { FAULT } else { 0.0 },
        ..EquivalenceConfig::default()
    };
    if cfg.tuples == 0 {
        return Err(CliError::usage("--tuples must be positive"));
    }
    let mut out = String::from("check,family,count,observed,tolerance,status\n");
    let mut all_pass = true;
    let status = |ok: bool| if ok { "PASS" } else { "FAIL" };
    for rep in run_equivalence(&families, &cfg)? {
        all_pass &= rep.passed();
        let _ = writeln!(
            out,
            "equivalence,{},{},{:.3e},{:e},{}",
            rep.family.name(),
            rep.records.len(),
            rep.max_rel_err(),
            rep.tolerance,
            status(rep.passed())
        );
    }
    if args.rates {
        let mut seen = Vec::new();
        for f in &families {
            let family = rate_family(*f);
            if seen.contains(&family) {
                continue;
            }
            seen.push(family);
            let rep = rate_harness(&RateConfig {
                family,
                r: 1.0,
                beta: 1.0,
                gamma: 0.3,
                n_grid: vec![100, 1000, 10_000],
                replicates: MIN_REPLICATES,
                seed: cfg.seed,
            })?;
            let h0 = rep.null_slope_within(0.5);
            let h1 = rep.alt_decreasing && rep.alt_super_logarithmic;
            all_pass &= h0 && h1;
            let _ = writeln!(
                out,
                "rate_null_slope,{},{},{:.4},{:.4}+-0.5,{}",
                family.name(),
                rep.config.replicates,
                rep.null_slope_ln_n,
                rep.null_target(),
                status(h0)
            );
            let _ = writeln!(
                out,
                "rate_alt_decrease,{},{},{:.4e},super_log,{}",
                family.name(),
                rep.config.replicates,
                rep.alt_slope_n,
                status(h1)
            );
        }
    }
    let _ = writeln!(out, "overall,all,{},,,{}", families.len(), status(all_pass));
    Ok(Output {
        stdout: out,
        code: if all_pass { 0 } else { 1 },
    })
}
