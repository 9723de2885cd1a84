//! `stein-hn`: exact random-walk laws, half-normal distances and Stein
//! bound certification from the command line.
//!
//! Exit status: 0 on success, 1 when a bound or identity check fails,
//! 2 on a usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use halfnormal_stein::discrete_stein::{make_spec, verify_characterization};
use halfnormal_stein::distances::{
    auxiliary_bounds, rate_table, sweep, DistanceReport, Metric, ScaledLaw,
};
use halfnormal_stein::mc_oracle::empirical_check;
use halfnormal_stein::srw_laws::pmf_for;
use halfnormal_stein::stein_core::{
    verify_lemma_bounds, BoundKind, BoundReport, Grid, SteinSolution, TestFunction,
};
use halfnormal_stein::{distances, Error, Statistic};

#[derive(Parser)]
#[command(
    name = "stein-hn",
    version,
    about = "Stein's method for the half-normal limit of simple random walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Exact law of a statistic.
    Pmf(LawArgs),
    /// Kolmogorov and Wasserstein distances to the half-normal.
    Distance(DistanceArgs),
    /// Distances against their closed-form bounds.
    CheckBounds(LawArgs),
    /// sqrt(n)-scaled distances, mass at zero and mean gap.
    RateTable(LawArgs),
    /// Discrete Stein characterization: basis residuals and pmf recovery.
    SteinVerify(LawArgs),
    /// Tabulate the Stein solution f_h, its derivative and the equation residual.
    SteinSolution(SolutionArgs),
    /// Certify the bounds on Stein solutions and the auxiliary-variable lemma.
    VerifyLemmas(LemmaArgs),
    /// Monte Carlo check of the exact law.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct LawArgs {
    /// returns, max, halfmax or signchanges.
    #[arg(long)]
    stat: String,
    /// Walk length: a single value or start:end:step.
    #[arg(long, conflicts_with = "m")]
    n: Option<String>,
    /// Half-length parameter m (n = 2m, or 2m + 1 for sign changes).
    #[arg(long)]
    m: Option<String>,
}

#[derive(Args)]
struct DistanceArgs {
    #[command(flatten)]
    law: LawArgs,
    /// K, W or both.
    #[arg(long, default_value = "both")]
    metric: String,
}

#[derive(Args)]
struct SolutionArgs {
    /// identity, min1, or indicator (with --z).
    #[arg(long, default_value = "identity")]
    h: String,
    #[arg(long)]
    z: Option<f64>,
    /// lo:hi:points.
    #[arg(long, default_value = "0:5:51")]
    grid: String,
}

#[derive(Args)]
struct LemmaArgs {
    /// lo:hi:points for the Stein-solution grid.
    #[arg(long, default_value = "0:8:161")]
    grid: String,
    /// Even walk lengths for the auxiliary-variable lemma (single or start:end:step).
    #[arg(long, default_value = "2:256:2")]
    n: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    stat: String,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Runtime(String),
    /// The reader went away (e.g. `| head`); not an error.
    ClosedPipe,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parity { .. } | Error::UnknownStatistic(_) | Error::Domain(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::ClosedPipe;
        }
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(threads) = std::env::var("STEIN_HN_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global();
            }
            _ => {
                eprintln!("error: STEIN_HN_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let result = match &cli.out {
        Some(path) => File::create(path)
            .map_err(Failure::from)
            .and_then(|f| run(&cli, &mut BufWriter::new(f))),
        None => run(&cli, &mut BufWriter::new(io::stdout().lock())),
    };
    ExitCode::from(exit_code(&result))
}

/// 0 success, 1 failed check or runtime error, 2 usage error.
fn exit_code(result: &Outcome) -> u8 {
    match result {
        Ok(true) | Err(Failure::ClosedPipe) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let ok = match &cli.command {
        Command::Pmf(args) => cmd_pmf(args, cli.format, out)?,
        Command::Distance(args) => cmd_distance(args, cli.format, out)?,
        Command::CheckBounds(args) => cmd_check_bounds(args, cli.format, out)?,
        Command::RateTable(args) => cmd_rate_table(args, cli.format, out)?,
        Command::SteinVerify(args) => cmd_stein_verify(args, cli.format, out)?,
        Command::SteinSolution(args) => cmd_stein_solution(args, cli.format, out)?,
        Command::VerifyLemmas(args) => cmd_verify_lemmas(args, cli.format, out)?,
        Command::Simulate(args) => cmd_simulate(args, cli.format, out)?,
    };
    out.flush()?;
    Ok(ok)
}

fn parse_stat(s: &str) -> Result<Statistic, Failure> {
    Ok(Statistic::from_str(s)?)
}

/// `a` or `a:b:step`, inclusive.
fn parse_range(s: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Usage(format!("invalid range {s:?}; expected N or start:end:step"));
    let parts: Vec<u64> = s
        .split(':')
        .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [n] => Ok(vec![*n]),
        [a, b, step] if *step > 0 && a <= b => Ok((*a..=*b).step_by(*step as usize).collect()),
        _ => Err(bad()),
    }
}

fn parse_grid(s: &str) -> Result<Grid, Failure> {
    let bad = || Failure::Usage(format!("invalid grid {s:?}; expected lo:hi:points"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, points] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let points: usize = points.parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi && points >= 2) {
        return Err(bad());
    }
    Ok(Grid::new(lo, hi, points))
}

/// Walk lengths from `--n` or `--m`, parity-checked.
fn walk_lengths(stat: Statistic, args: &LawArgs) -> Result<Vec<u64>, Failure> {
    let ns = match (&args.n, &args.m) {
        (Some(n), None) => parse_range(n)?,
        (None, Some(m)) => parse_range(m)?
            .into_iter()
            .map(|m| stat.n_for_m(m))
            .collect(),
        _ => return Err(Failure::Usage("give exactly one of --n or --m".into())),
    };
    for &n in &ns {
        stat.m_for_n(n)?;
    }
    Ok(ns)
}

/// Fixed-point for moderate magnitudes, scientific otherwise; always `.` decimal.
fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct PmfOutput {
    statistic: Statistic,
    n: u64,
    support: Vec<i64>,
    mass: Vec<String>,
    mass_f64: Vec<f64>,
    cdf_f64: Vec<f64>,
}

fn cmd_pmf(args: &LawArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let stat = parse_stat(&args.stat)?;
    let ns = walk_lengths(stat, args)?;
    let mut outputs = Vec::with_capacity(ns.len());
    for n in ns {
        let pmf = pmf_for(stat, n)?;
        outputs.push(PmfOutput {
            statistic: stat,
            n,
            support: pmf.support().collect(),
            mass: pmf.masses().iter().map(ToString::to_string).collect(),
            mass_f64: pmf.mass_f64(),
            cdf_f64: pmf.cdf_f64(),
        });
    }
    match format {
        Format::Json if outputs.len() == 1 => write_json(out, &outputs[0])?,
        Format::Json => write_json(out, &outputs)?,
        Format::Csv => {
            writeln!(out, "n,k,mass,mass_f64,cdf_f64")?;
            for o in &outputs {
                for i in 0..o.support.len() {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        o.n,
                        o.support[i],
                        o.mass[i],
                        num(o.mass_f64[i]),
                        num(o.cdf_f64[i])
                    )?;
                }
            }
        }
        Format::Pretty => {
            for o in &outputs {
                writeln!(out, "{} n={}", o.statistic, o.n)?;
                writeln!(out, "{:>6}  {:>24}  {:>24}", "k", "P(X = k)", "P(X <= k)")?;
                for i in 0..o.support.len() {
                    writeln!(
                        out,
                        "{:>6}  {:>24}  {:>24}",
                        o.support[i],
                        num(o.mass_f64[i]),
                        num(o.cdf_f64[i])
                    )?;
                }
                if o.support.len() <= 8 {
                    writeln!(out, "exact: {}", o.mass.join(", "))?;
                }
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct DistanceRow {
    n: u64,
    #[serde(rename = "d_K", skip_serializing_if = "Option::is_none")]
    d_k: Option<f64>,
    #[serde(rename = "d_W", skip_serializing_if = "Option::is_none")]
    d_w: Option<f64>,
}

fn cmd_distance(args: &DistanceArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let stat = parse_stat(&args.law.stat)?;
    let metrics: Vec<Metric> = match args.metric.to_ascii_lowercase().as_str() {
        "both" => Metric::BOTH.to_vec(),
        other => vec![Metric::from_str(other)?],
    };
    let ns = walk_lengths(stat, &args.law)?;
    let rows: Vec<DistanceRow> = ns
        .iter()
        .map(|&n| {
            let law = ScaledLaw::for_statistic(stat, n)?;
            Ok(DistanceRow {
                n,
                d_k: metrics
                    .contains(&Metric::Kolmogorov)
                    .then(|| distances::kolmogorov_exact(&law)),
                d_w: metrics
                    .contains(&Metric::Wasserstein)
                    .then(|| distances::wasserstein_exact(&law)),
            })
        })
        .collect::<Result<_, Error>>()?;
    match format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv | Format::Pretty => {
            let sep = if format == Format::Csv { "," } else { "  " };
            let mut header = vec!["n"];
            for m in &metrics {
                header.push(match m {
                    Metric::Kolmogorov => "d_K",
                    Metric::Wasserstein => "d_W",
                });
            }
            writeln!(out, "{}", header.join(sep))?;
            for r in &rows {
                let mut fields = vec![r.n.to_string()];
                fields.extend(r.d_k.map(num));
                fields.extend(r.d_w.map(num));
                writeln!(out, "{}", fields.join(sep))?;
            }
        }
    }
    Ok(true)
}

fn cmd_check_bounds(args: &LawArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let stat = parse_stat(&args.stat)?;
    let ns = walk_lengths(stat, args)?;
    let reports: Vec<DistanceReport> = sweep(stat, &ns)?;
    let ok = reports.iter().all(DistanceReport::passed);
    match format {
        Format::Json => write_json(out, &reports)?,
        Format::Csv => {
            writeln!(out, "n,d_K,d_W,bound_K,bound_W,margin_K,margin_W")?;
            for r in &reports {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.n,
                    num(r.kolmogorov),
                    num(r.wasserstein),
                    num(r.bound_k),
                    num(r.bound_w),
                    num(r.margin_k),
                    num(r.margin_w)
                )?;
            }
        }
        Format::Pretty => {
            for r in &reports {
                writeln!(
                    out,
                    "{} n={}: d_K={} <= {} ({})  d_W={} <= {} ({})",
                    stat,
                    r.n,
                    num(r.kolmogorov),
                    num(r.bound_k),
                    verdict(r.margin_k >= 0.0),
                    num(r.wasserstein),
                    num(r.bound_w),
                    verdict(r.margin_w >= 0.0)
                )?;
            }
            let min_k = reports
                .iter()
                .map(|r| r.margin_k)
                .fold(f64::INFINITY, f64::min);
            let min_w = reports
                .iter()
                .map(|r| r.margin_w)
                .fold(f64::INFINITY, f64::min);
            writeln!(
                out,
                "{} of {} passed; smallest margins K={} W={}",
                reports.iter().filter(|r| r.passed()).count(),
                reports.len(),
                num(min_k),
                num(min_w)
            )?;
        }
    }
    Ok(ok)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn cmd_rate_table(args: &LawArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let stat = parse_stat(&args.stat)?;
    let ns = walk_lengths(stat, args)?;
    let rows = rate_table(stat, &ns)?;
    match format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv | Format::Pretty => {
            let sep = if format == Format::Csv { "," } else { "  " };
            writeln!(
                out,
                "{}",
                ["n", "sqrtn_d_K", "sqrtn_d_W", "sqrtn_P0", "sqrtn_mean_gap"].join(sep)
            )?;
            for r in &rows {
                writeln!(
                    out,
                    "{}",
                    [
                        r.n.to_string(),
                        num(r.sqrtn_d_k),
                        num(r.sqrtn_d_w),
                        num(r.sqrtn_p0),
                        num(r.sqrtn_mean_gap)
                    ]
                    .join(sep)
                )?;
            }
        }
    }
    Ok(true)
}

fn cmd_stein_verify(args: &LawArgs, format: Format, out: &mut dyn Write) -> Outcome {
    // The maximum is characterized through N_n = ceil(M_n / 2).
    let stat = match parse_stat(&args.stat)? {
        Statistic::Max => Statistic::HalfMax,
        s => s,
    };
    let ms: Vec<u64> = match (&args.m, &args.n) {
        (Some(m), None) => parse_range(m)?,
        (None, Some(n)) => parse_range(n)?
            .into_iter()
            .map(|n| stat.m_for_n(n))
            .collect::<Result<_, _>>()?,
        _ => return Err(Failure::Usage("give exactly one of --n or --m".into())),
    };
    let mut reports = Vec::with_capacity(ms.len());
    for m in ms {
        reports.push((m, verify_characterization(&make_spec(stat, m)?)));
    }
    let ok = reports.iter().all(|(_, r)| r.passed());
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                m: u64,
                #[serde(flatten)]
                report: &'a halfnormal_stein::discrete_stein::CharacterizationReport,
            }
            let rows: Vec<Row> = reports
                .iter()
                .map(|(m, report)| Row { m: *m, report })
                .collect();
            write_json(out, &rows)?;
        }
        Format::Csv => {
            writeln!(out, "m,basis,nonzero_residuals,recovered")?;
            for (m, r) in &reports {
                writeln!(
                    out,
                    "{},{},{},{}",
                    m,
                    r.basis_size,
                    r.nonzero_residuals.len(),
                    r.recovered_exactly
                )?;
            }
        }
        Format::Pretty => {
            for (m, r) in &reports {
                if reports.len() > 1 {
                    write!(out, "{stat} m={m}: ")?;
                }
                if r.nonzero_residuals.is_empty() {
                    write!(out, "residual 0 for {} basis functions", r.basis_size)?;
                } else {
                    write!(
                        out,
                        "nonzero residual for {} of {} basis functions (first at j={}: {})",
                        r.nonzero_residuals.len(),
                        r.basis_size,
                        r.nonzero_residuals[0].0,
                        r.nonzero_residuals[0].1
                    )?;
                }
                if r.recovered_exactly {
                    writeln!(out, "; pmf recovered exactly")?;
                } else {
                    writeln!(out, "; pmf NOT recovered")?;
                }
            }
        }
    }
    Ok(ok)
}

fn test_function(name: &str, z: Option<f64>) -> Result<TestFunction, Failure> {
    match name {
        "identity" | "x" => Ok(TestFunction::identity()),
        "min1" | "min" => Ok(TestFunction::min_one()),
        "indicator" => {
            let z = z.ok_or_else(|| Failure::Usage("--h indicator needs --z".into()))?;
            Ok(TestFunction::indicator(z)?)
        }
        other => Err(Failure::Usage(format!(
            "unknown test function {other:?} (identity, min1, indicator)"
        ))),
    }
}

#[derive(Serialize)]
struct SolutionRow {
    x: f64,
    f: f64,
    f_prime: f64,
    residual: f64,
}

fn cmd_stein_solution(args: &SolutionArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let h = test_function(&args.h, args.z)?;
    let grid = parse_grid(&args.grid)?;
    let solution = SteinSolution::new(h);
    let rows: Vec<SolutionRow> = grid
        .values()
        .into_iter()
        .filter(|&x| x >= 0.0)
        .map(|x| SolutionRow {
            x,
            f: solution.value(x),
            f_prime: solution.derivative(x),
            residual: solution.residual(x),
        })
        .collect();
    match format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv | Format::Pretty => {
            let sep = if format == Format::Csv { "," } else { "  " };
            if format == Format::Pretty {
                writeln!(
                    out,
                    "h = {}, mu(h) = {}",
                    solution.test_function().label(),
                    num(solution.mu())
                )?;
            }
            writeln!(out, "{}", ["x", "f", "f_prime", "residual"].join(sep))?;
            for r in &rows {
                writeln!(
                    out,
                    "{}",
                    [num(r.x), num(r.f), num(r.f_prime), num(r.residual)].join(sep)
                )?;
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct LemmaOutput {
    stein_bounds: Vec<BoundReport>,
    auxiliary: Vec<distances::AuxiliaryReport>,
}

fn cmd_verify_lemmas(args: &LemmaArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let grid = parse_grid(&args.grid)?;
    let ns = parse_range(&args.n)?;
    for &n in &ns {
        Statistic::Max.m_for_n(n)?;
    }
    let mut stein_bounds = verify_lemma_bounds(BoundKind::Indicator, grid);
    stein_bounds.extend(verify_lemma_bounds(BoundKind::Lipschitz, grid));
    let auxiliary = ns
        .iter()
        .map(|&n| auxiliary_bounds(n / 2))
        .collect::<Result<Vec<_>, _>>()?;
    let ok = stein_bounds.iter().all(BoundReport::passed)
        && auxiliary.iter().all(distances::AuxiliaryReport::passed);
    let result = LemmaOutput {
        stein_bounds,
        auxiliary,
    };
    match format {
        Format::Json => write_json(out, &result)?,
        Format::Csv => {
            writeln!(out, "group,check,observed,bound,margin,passed")?;
            for report in &result.stein_bounds {
                for c in &report.checks {
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        report.kind,
                        c.name.replace(',', ";"),
                        num(c.observed),
                        num(c.bound),
                        num(c.margin),
                        c.passed
                    )?;
                }
            }
            for a in &result.auxiliary {
                for c in &a.checks {
                    writeln!(
                        out,
                        "aux n={},{},{},{},{},{}",
                        a.n,
                        c.name.replace(',', ";"),
                        num(c.observed),
                        num(c.bound),
                        num(c.margin),
                        c.passed
                    )?;
                }
            }
        }
        Format::Pretty => {
            for report in &result.stein_bounds {
                writeln!(out, "[{}]", report.kind)?;
                for c in &report.checks {
                    writeln!(
                        out,
                        "  {:<48} observed {:<24} bound {:<24} {}",
                        c.name,
                        num(c.observed),
                        num(c.bound),
                        verdict(c.passed)
                    )?;
                }
                for (name, value) in &report.observations {
                    writeln!(out, "  {name} = {}", num(*value))?;
                }
            }
            let failed: Vec<_> = result.auxiliary.iter().filter(|a| !a.passed()).collect();
            writeln!(
                out,
                "[auxiliary] {} walk lengths, {} failed; P(2N_n <= 2k) = P(M_n <= 2k) {}",
                result.auxiliary.len(),
                failed.len(),
                if result.auxiliary.iter().all(|a| a.even_cdf_agreement) {
                    "for all k"
                } else {
                    "FAILS"
                }
            )?;
            for a in failed {
                writeln!(out, "  n={} failed", a.n)?;
            }
        }
    }
    Ok(ok)
}

fn cmd_simulate(args: &SimulateArgs, format: Format, out: &mut dyn Write) -> Outcome {
    let stat = parse_stat(&args.stat)?;
    stat.m_for_n(args.n)?;
    let report = empirical_check(stat, args.n, args.trials, args.seed)?;
    match format {
        Format::Json => write_json(out, &report)?,
        Format::Csv => {
            writeln!(
                out,
                "n,trials,seed,max_deviation,dkw_threshold,allowed,passed"
            )?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                report.n,
                report.trials,
                report.seed,
                num(report.max_deviation),
                num(report.dkw_threshold),
                num(report.allowed),
                report.passed
            )?;
        }
        Format::Pretty => {
            writeln!(
                out,
                "{} n={} trials={} seed={}: max CDF deviation {} (DKW radius {}, allowed {}) {}",
                stat,
                report.n,
                report.trials,
                report.seed,
                num(report.max_deviation),
                num(report.dkw_threshold),
                num(report.allowed),
                verdict(report.passed)
            )?;
        }
    }
    Ok(report.passed)
}
