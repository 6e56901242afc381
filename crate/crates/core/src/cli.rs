//! Command-line front end. Every command writes to caller-supplied streams and
//! returns an [`ExitStatus`], so the binary is a thin wrapper and the commands
//! can be driven in-process.

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attack::CollectiveAttack;
use crate::error::Error;
use crate::keyrate::{key_rate_bound, KeyRateReport};
use crate::scenario::{noise_threshold, sweep, symmetric_stats, Scenario, ScenarioParams};
use crate::simulator::{estimate_statistics, qber, run_protocol, ProtocolConfig};
use crate::statsfile;
use crate::validation::audit;

/// Stream of the attack RNG for `random:dE`, kept away from the streams the
/// simulator uses for its chunks.
const ATTACK_STREAM: u64 = u64::MAX;
/// Scale applied to the forward unitary by the hidden `--corrupt` hook.
const CORRUPTION_SCALE: f64 = 1.01;
/// Strength range of the near-identity attacks drawn by `validate`.
const WEAK_STRENGTH: (f64, f64) = (0.02, 0.6);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    InputError = 1,
    NonPositiveRate = 2,
    Abort = 3,
    ValidationFailure = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sqkd",
    version,
    about = "Key-rate bounds for semi-quantum key distribution"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Key-rate bound from channel statistics.
    Rate(RateArgs),
    /// Largest noise level with a positive rate in a symmetric scenario.
    Threshold(ThresholdArgs),
    /// Key rate on a grid of noise levels, written as CSV.
    Sweep(SweepArgs),
    /// Monte Carlo run of the protocol against a fixed attack.
    Simulate(SimulateArgs),
    /// Soundness checks of the bound against random attacks.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Statistics file with `key = value` lines.
    #[arg(
        long,
        conflicts_with = "symmetric",
        required_unless_present = "symmetric"
    )]
    pub stats: Option<PathBuf>,
    /// Flip probabilities `Qf,Qr,Qx` of a symmetric attack.
    #[arg(long, value_parser = parse_triple)]
    pub symmetric: Option<ScenarioParams>,
    /// Rescale each Z-basis block of the stats file to sum to one.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub scenario: Scenario,
    /// `Qx / Q`.
    #[arg(long, default_value_t = 1.0)]
    pub qx_ratio: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scenario: Scenario,
    #[arg(long, default_value_t = 1.0)]
    pub qx_ratio: f64,
    #[arg(long, default_value_t = 0.1)]
    pub qmax: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `identity`, `zmeasure`, `symmetric:Qf,Qr` or `random:dE`.
    #[arg(long)]
    pub attack: AttackSpec,
    #[arg(long, default_value_t = 1_000_000)]
    pub iterations: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0.5)]
    pub prob_z: f64,
    #[arg(long, default_value_t = 0.5)]
    pub prob_measure: f64,
    /// Where to write the estimated statistics.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 100)]
    pub attacks: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    pub ancilla_dims: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace attack number N with a non-unitary one.
    #[arg(long, hide = true)]
    pub corrupt: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AttackSpec {
    Identity,
    ZMeasure,
    Symmetric { qf: f64, qr: f64 },
    Random { ancilla_dim: usize },
}

impl AttackSpec {
    pub fn build(self, seed: u64) -> crate::Result<CollectiveAttack> {
        match self {
            AttackSpec::Identity => Ok(CollectiveAttack::identity(1)),
            AttackSpec::ZMeasure => Ok(CollectiveAttack::z_measure()),
            AttackSpec::Symmetric { qf, qr } => CollectiveAttack::symmetric(qf, qr),
            AttackSpec::Random { ancilla_dim } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(ATTACK_STREAM);
                CollectiveAttack::haar_random(ancilla_dim, &mut rng)
            }
        }
    }
}

impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "unknown attack '{s}' (expected identity, zmeasure, symmetric:Qf,Qr or random:dE)"
            ))
        };
        match s.split_once(':') {
            None if s == "identity" => Ok(AttackSpec::Identity),
            None if s == "zmeasure" => Ok(AttackSpec::ZMeasure),
            Some(("symmetric", rest)) => {
                let (qf, qr) = rest.split_once(',').ok_or_else(bad)?;
                Ok(AttackSpec::Symmetric {
                    qf: qf.trim().parse().map_err(|_| bad())?,
                    qr: qr.trim().parse().map_err(|_| bad())?,
                })
            }
            Some(("random", d)) => Ok(AttackSpec::Random {
                ancilla_dim: d.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl std::fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttackSpec::Identity => f.write_str("identity"),
            AttackSpec::ZMeasure => f.write_str("zmeasure"),
            AttackSpec::Symmetric { qf, qr } => write!(f, "symmetric:{qf},{qr}"),
            AttackSpec::Random { ancilla_dim } => write!(f, "random:{ancilla_dim}"),
        }
    }
}

fn parse_triple(s: &str) -> std::result::Result<ScenarioParams, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [qf, qr, qx] = parts[..] else {
        return Err(format!("expected Qf,Qr,Qx, got '{s}'"));
    };
    let num = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| format!("'{v}' is not a number"))
    };
    ScenarioParams::new(num(qf)?, num(qr)?, num(qx)?).map_err(|e| e.to_string())
}

/// Decimal notation with at least `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i64;
    if !(-5..15).contains(&exponent) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i64 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn report_lines(r: &KeyRateReport) -> Vec<(&'static str, String)> {
    let f = |x: f64| format_significant(x, 12);
    vec![
        ("b", f(r.b)),
        ("cal_b", f(r.cal_b)),
        ("lambda_tilde", f(r.lambda_tilde)),
        ("lambda_clamped", r.lambda_clamped.to_string()),
        ("s_bec", f(r.s_bec)),
        ("s_ec_upper", f(r.s_ec_upper)),
        ("p_a0", f(r.p_a0)),
        ("p_b0_a0", f(r.joint[0])),
        ("p_b0_a1", f(r.joint[1])),
        ("p_b1_a0", f(r.joint[2])),
        ("p_b1_a1", f(r.joint[3])),
        ("h_b_given_a", f(r.h_b_given_a)),
        ("rate", f(r.rate)),
    ]
}

fn input_error(err: &mut dyn Write, e: impl std::fmt::Display) -> ExitStatus {
    let _ = writeln!(err, "error: {e}");
    ExitStatus::InputError
}

fn abort(err: &mut dyn Write, p000: f64) -> ExitStatus {
    let _ = writeln!(err, "abort: p000 = {p000} leaves no correct key bits");
    ExitStatus::Abort
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli, out, err),
        Err(e) => {
            let rendered = e.render();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                ExitStatus::InputError
            } else {
                let _ = write!(out, "{rendered}");
                ExitStatus::Success
            }
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    match cli.command {
        Command::Rate(a) => cmd_rate(&a, out, err),
        Command::Threshold(a) => cmd_threshold(&a, out, err),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Validate(a) => cmd_validate(&a, out, err),
    }
}

pub fn cmd_rate(args: &RateArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let stats = match (&args.stats, args.symmetric) {
        (Some(path), _) => match statsfile::read(path, args.normalize) {
            Ok(s) => s,
            Err(e) => return input_error(err, e),
        },
        (None, Some(params)) => symmetric_stats(params),
        (None, None) => return input_error(err, "one of --stats or --symmetric is required"),
    };
    let report = match key_rate_bound(&stats) {
        Ok(r) => r,
        Err(Error::TooMuchNoise { p000 }) => return abort(err, p000),
        Err(e) => return input_error(err, e),
    };
    for (key, value) in report_lines(&report) {
        let _ = writeln!(out, "{key} = {value}");
    }
    if report.lambda_clamped {
        let _ = writeln!(
            err,
            "warning: lambda_tilde clamped to 1; no attack yields these statistics"
        );
    }
    if report.rate > 0.0 {
        ExitStatus::Success
    } else {
        ExitStatus::NonPositiveRate
    }
}

pub fn cmd_threshold(args: &ThresholdArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    match noise_threshold(args.scenario, args.qx_ratio) {
        Ok(q) => {
            let _ = writeln!(out, "{q:.6}");
            ExitStatus::Success
        }
        Err(e) => input_error(err, e),
    }
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let points = match sweep(args.scenario, args.qx_ratio, args.qmax, args.steps) {
        Ok(p) => p,
        Err(Error::TooMuchNoise { p000 }) => return abort(err, p000),
        Err(e) => return input_error(err, e),
    };
    let mut csv = String::from("Q,rate\n");
    for p in &points {
        csv.push_str(&format_significant(p.q, 9));
        csv.push(',');
        csv.push_str(&format_significant(p.rate, 9));
        csv.push('\n');
    }
    if let Err(e) = std::fs::write(&args.out, csv) {
        return input_error(err, format!("cannot write {}: {e}", args.out.display()));
    }
    let _ = writeln!(
        out,
        "wrote {} points to {}",
        points.len(),
        args.out.display()
    );
    ExitStatus::Success
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    let attack = match args.attack.build(args.seed) {
        Ok(a) => a,
        Err(e) => return input_error(err, e),
    };
    let config = ProtocolConfig {
        iterations: args.iterations,
        prob_z_basis: args.prob_z,
        prob_measure_resend: args.prob_measure,
        seed: args.seed,
        workers: args.workers,
    };
    let (tally, keys) = match run_protocol(&attack, &config) {
        Ok(r) => r,
        Err(e) => return input_error(err, e),
    };
    let estimate = match estimate_statistics(&tally) {
        Ok(e) => e,
        Err(e) => return input_error(err, e),
    };
    let header = format!(
        "estimated by sqkd {}\nattack {}, iterations {}, seed {}, prob_z {}, prob_measure {}",
        env!("CARGO_PKG_VERSION"),
        args.attack,
        args.iterations,
        args.seed,
        args.prob_z,
        args.prob_measure
    );
    if let Err(e) = statsfile::write(&args.out, &estimate.stats, &header) {
        return input_error(err, e);
    }

    let analytic = attack.statistics();
    let f = |x: f64| format_significant(x, 9);
    let _ = writeln!(
        out,
        "{:<14} {:>16} {:>16} {:>16}",
        "statistic", "empirical", "std error", "analytic"
    );
    for (n, key) in statsfile::KEYS.iter().enumerate() {
        let _ = writeln!(
            out,
            "{key:<14} {:>16} {:>16} {:>16}",
            f(estimate.stats.to_array()[n]),
            f(estimate.errors.to_array()[n]),
            f(analytic.to_array()[n])
        );
    }
    match qber(&keys) {
        Ok(q) => {
            let _ = writeln!(out, "raw key length {}, qber {}", keys.len(), f(q));
        }
        Err(e) => return input_error(err, e),
    }
    let analytic_rate = key_rate_bound(&analytic).map(|r| r.rate);
    let status = match key_rate_bound(&estimate.stats) {
        Ok(r) => {
            let se = estimate.rate_standard_error().unwrap_or(f64::NAN);
            let _ = writeln!(out, "rate bound {} +/- {}", f(r.rate), f(se));
            ExitStatus::Success
        }
        Err(Error::TooMuchNoise { p000 }) => {
            let _ = writeln!(out, "rate bound: abort (p000 = {p000})");
            ExitStatus::Success
        }
        Err(e) => return input_error(err, e),
    };
    match analytic_rate {
        Ok(r) => {
            let _ = writeln!(out, "analytic rate bound {}", f(r));
        }
        Err(_) => {
            let _ = writeln!(out, "analytic rate bound: abort");
        }
    }
    let _ = writeln!(out, "statistics written to {}", args.out.display());
    status
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus {
    if args.attacks == 0 {
        return input_error(err, "--attacks must be at least 1");
    }
    if args.ancilla_dims.is_empty() {
        return input_error(err, "--ancilla-dims must not be empty");
    }

    let identity = match audit(&CollectiveAttack::identity(args.ancilla_dims[0])) {
        Ok(a) => a,
        Err(e) => return input_error(err, e),
    };
    let identity_slack = identity.slack().unwrap_or(f64::NAN);
    let _ = writeln!(out, "identity attack: slack {identity_slack:e}");
    let mut failed =
        !identity.violations().is_empty() || identity_slack.is_nan() || identity_slack.abs() > 1e-9;

    let mut worst: Option<(f64, u64)> = None;
    let mut positive = 0usize;
    for n in 0..args.attacks {
        let seed = args.seed.wrapping_add(n as u64);
        let dim = args.ancilla_dims[n % args.ancilla_dims.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let attack = if n % 2 == 0 {
            let strength = rng.random_range(WEAK_STRENGTH.0..WEAK_STRENGTH.1);
            CollectiveAttack::weak_random(dim, strength, &mut rng)
        } else {
            CollectiveAttack::haar_random(dim, &mut rng)
        };
        let mut attack = match attack {
            Ok(a) => a,
            Err(e) => return input_error(err, e),
        };
        if args.corrupt == Some(n) {
            attack = CollectiveAttack::new_unchecked(
                attack.forward().scale(CORRUPTION_SCALE),
                attack.reverse().clone(),
                dim,
            );
        }
        let violations = match audit(&attack) {
            Ok(a) => {
                if let Some(slack) = a.slack() {
                    if worst.is_none_or(|(w, _)| slack < w) {
                        worst = Some((slack, seed));
                    }
                    if a.bound.is_some_and(|b| b > 0.0) {
                        positive += 1;
                    }
                }
                a.violations()
            }
            Err(e) => vec![e.to_string()],
        };
        for v in &violations {
            let _ = writeln!(err, "violation: attack {n} (seed {seed}, d_E = {dim}): {v}");
        }
        failed |= !violations.is_empty();
    }

    let _ = writeln!(out, "attacks checked: {}", args.attacks);
    let _ = writeln!(out, "attacks with positive bound: {positive}");
    if let Some((slack, seed)) = worst {
        let _ = writeln!(out, "worst slack: {slack:e} (seed {seed})");
    }
    if failed {
        let _ = writeln!(out, "FAIL");
        ExitStatus::ValidationFailure
    } else {
        let _ = writeln!(out, "PASS");
        ExitStatus::Success
    }
}
