use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sconvex::campaign::{self, CampaignConfig, SRange, TrialDescriptor, TrialRecord};
use sconvex::certification::{self, CertificationVerdict, FunctionClass, Resolution};
use sconvex::{
    special, Case, Exponents, FunctionSpec, InequalityId, InequalityReport, Interval, Registry,
    Tolerances, Verdict,
};

mod exit {
    pub const OK: u8 = 0;
    pub const ERROR: u8 = 1;
    pub const VIOLATED: u8 = 2;
    pub const INCONCLUSIVE: u8 = 3;
}

#[derive(Parser)]
#[command(
    name = "sconvex",
    version,
    about = "Check Hadamard-type inequalities for convex and s-convex functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one inequality on a pair of function specs.
    Check(CheckArgs),
    /// Search for a violation of convexity or s-convexity.
    Certify(CertifyArgs),
    /// Run a seeded falsification campaign.
    Falsify(FalsifyArgs),
    /// Print β(u, v).
    Beta(BetaArgs),
    /// Re-evaluate a trial recorded by a campaign.
    Replay(ReplayArgs),
    /// Parse a function spec and print it back in canonical form.
    Echo(EchoArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// hh (both halves), hh_left, hh_right, t1, t2, t3 or c29
    #[arg(long)]
    ineq: String,
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: Option<PathBuf>,
    /// Interval as `a,b`
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Interval,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    /// Quadrature tolerance per term
    #[arg(long, default_value_t = sconvex::quadrature::DEFAULT_TOL)]
    tol: f64,
    /// Certify class membership before evaluating
    #[arg(long)]
    certify: bool,
    #[arg(long, value_parser = parse_resolution)]
    resolution: Option<Resolution>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Interval,
    /// Check s-convexity with this s instead of convexity
    #[arg(long)]
    s: Option<f64>,
    /// `t_points,pair_samples`
    #[arg(long, value_parser = parse_resolution)]
    resolution: Option<Resolution>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long)]
    ineq: String,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    interval: Interval,
    /// `lo,hi` inside (0, 1]
    #[arg(long, value_parser = parse_pair)]
    s_range: Option<(f64, f64)>,
    #[arg(long)]
    complexity: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-trial `index,s1,s2,slack,verdict` rows
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    u: f64,
    #[arg(long, allow_hyphen_values = true)]
    v: f64,
}

#[derive(Args)]
struct ReplayArgs {
    /// A trial descriptor, or a violation record containing one
    #[arg(long)]
    trial: PathBuf,
}

#[derive(Args)]
struct EchoArgs {
    #[arg(long)]
    f: PathBuf,
}

/// A failure reported on standard error with exit code 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `lo,hi`, got `{text}`"))?;
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

fn parse_interval(text: &str) -> Result<Interval, String> {
    let (a, b) = parse_pair(text)?;
    Interval::new(a, b).map_err(|e| e.to_string())
}

fn parse_resolution(text: &str) -> Result<Resolution, String> {
    let (t, p) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `t_points,pair_samples`, got `{text}`"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("`{s}`: {e}"));
    Ok(Resolution::new(parse(t)?, parse(p)?))
}

fn read_spec(path: &Path) -> Result<FunctionSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    FunctionSpec::from_json(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn verdict_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Holds => exit::OK,
        Verdict::Violated => exit::VIOLATED,
        Verdict::Inconclusive => exit::INCONCLUSIVE,
    }
}

/// Violated outranks inconclusive, which outranks holds.
fn worst_code(reports: &[InequalityReport]) -> u8 {
    let rank = |c: u8| match c {
        exit::VIOLATED => 2,
        exit::INCONCLUSIVE => 1,
        _ => 0,
    };
    reports
        .iter()
        .map(|r| verdict_code(r.verdict))
        .max_by_key(|&c| rank(c))
        .unwrap_or(exit::OK)
}

fn exponents_for(args: &CheckArgs, id: InequalityId) -> Result<Exponents, Failure> {
    match id {
        InequalityId::T2 => {
            let s = args.s.ok_or_else(|| Failure("t2 requires --s".into()))?;
            Ok(Exponents::Single { s })
        }
        InequalityId::T3 => match (args.s1, args.s2) {
            (Some(s1), Some(s2)) => Ok(Exponents::Pair { s1, s2 }),
            _ => Err(Failure("t3 requires --s1 and --s2".into())),
        },
        _ => Ok(Exponents::None),
    }
}

fn certify_one(
    spec: &FunctionSpec,
    class: FunctionClass,
    interval: &Interval,
    resolution: Resolution,
    seed: u64,
) -> Result<Option<CertificationVerdict>, Failure> {
    let verdict = certification::check_class(spec, class, interval, resolution, seed)?;
    Ok((!verdict.passed()).then_some(verdict))
}

fn cmd_check(args: CheckArgs) -> Outcome {
    let registry = Registry::standard();
    let ids: Vec<InequalityId> = if args.ineq == "hh" {
        vec![InequalityId::HhLeft, InequalityId::HhRight]
    } else {
        vec![args.ineq.parse()?]
    };
    let f = read_spec(&args.f)?;
    let g = args.g.as_deref().map(read_spec).transpose()?;
    let tolerances = Tolerances::with_quadrature(args.tol);

    let mut reports = Vec::new();
    for id in ids {
        let entry = registry.by_id(id)?;
        if entry.uses_g() && g.is_none() {
            return Err(Failure(format!("{id} requires --g")));
        }
        let exponents = exponents_for(&args, id)?;
        if args.certify {
            let (class_f, class_g) = entry.classes(&exponents)?;
            let resolution = args.resolution.unwrap_or_default();
            if let Some(v) = certify_one(&f, class_f, &args.interval, resolution, args.seed)? {
                eprintln!(
                    "f is not a member of its required class on {}",
                    args.interval
                );
                print_json(&v)?;
                return Ok(exit::VIOLATED);
            }
            if let (Some(class), Some(g)) = (class_g, g.as_ref()) {
                if let Some(v) = certify_one(g, class, &args.interval, resolution, args.seed)? {
                    eprintln!(
                        "g is not a member of its required class on {}",
                        args.interval
                    );
                    print_json(&v)?;
                    return Ok(exit::VIOLATED);
                }
            }
        }
        reports.push(entry.evaluate(&Case {
            f: &f,
            g: g.as_ref().filter(|_| entry.uses_g()),
            exponents,
            interval: args.interval,
            tolerances,
        })?);
    }
    if reports.len() == 1 {
        print_json(&reports[0])?;
    } else {
        print_json(&reports)?;
    }
    Ok(worst_code(&reports))
}

fn cmd_certify(args: CertifyArgs) -> Outcome {
    let f = read_spec(&args.f)?;
    let class = match args.s {
        Some(s) => FunctionClass::SConvex { s },
        None => FunctionClass::Convex,
    };
    let verdict = certification::check_class(
        &f,
        class,
        &args.interval,
        args.resolution.unwrap_or_default(),
        args.seed,
    )?;
    print_json(&verdict)?;
    Ok(if verdict.passed() {
        exit::OK
    } else {
        exit::VIOLATED
    })
}

fn cmd_falsify(args: FalsifyArgs) -> Outcome {
    let id: InequalityId = args.ineq.parse()?;
    let mut config = CampaignConfig::new(id, args.samples, args.seed, args.interval);
    if let Some((lo, hi)) = args.s_range {
        config.s_range = SRange::new(lo, hi)?;
    }
    if let Some(k) = args.complexity {
        config.complexity = k;
    }
    if let Some(tol) = args.tol {
        config.tolerances.quadrature = tol;
    }
    let outcome = campaign::run_campaign(&config)?;
    let json = serde_json::to_string_pretty(&outcome.report)?;
    match &args.out {
        Some(path) => {
            fs::write(path, json + "\n").map_err(|e| Failure(format!("{}: {e}", path.display())))?
        }
        None => println!("{json}"),
    }
    if let Some(path) = &args.csv {
        fs::write(path, outcome.to_csv())
            .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    }
    let r = &outcome.report;
    eprintln!(
        "{} trials, {} violations, {} inconclusive, min slack {:e}",
        r.samples_run,
        r.violations.len(),
        r.inconclusive_count,
        r.min_slack
    );
    Ok(if r.violations.is_empty() {
        exit::OK
    } else {
        exit::VIOLATED
    })
}

fn cmd_beta(args: BetaArgs) -> Outcome {
    let value = special::beta_fn(special::BetaArgs::new(args.u, args.v)?)?;
    println!("{value}");
    Ok(exit::OK)
}

fn cmd_replay(args: ReplayArgs) -> Outcome {
    let text = fs::read_to_string(&args.trial)
        .map_err(|e| Failure(format!("{}: {e}", args.trial.display())))?;
    let trial: TrialDescriptor = match serde_json::from_str::<TrialRecord>(&text) {
        Ok(record) => record.trial,
        Err(_) => serde_json::from_str(&text)?,
    };
    let report = campaign::replay(&trial)?;
    print_json(&report)?;
    Ok(verdict_code(report.verdict))
}

fn cmd_echo(args: EchoArgs) -> Outcome {
    println!("{}", read_spec(&args.f)?.render_pretty());
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(exit::OK);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(exit::ERROR);
        }
    };
    let outcome = match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Falsify(a) => cmd_falsify(a),
        Command::Beta(a) => cmd_beta(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Echo(a) => cmd_echo(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(exit::ERROR)
        }
    }
}
