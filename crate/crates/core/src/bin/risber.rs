use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use risber::ber_exact::QuadratureSpec;
use risber::phase_stats::GcqSpec;
use risber::specfun::Tolerance;
use risber::sweep::{self, run_sweep, Method, Sweep, SweepRequest};
use risber::validate::{run_validate, write_report, Level};
use risber::{Error, RisConfig};

/// Worker-count override; defaults to the available parallelism.
const THREADS_ENV: &str = "RISBER_THREADS";

const EXIT_VALIDATION: u8 = 1;
const EXIT_ARGUMENT: u8 = 2;
const EXIT_ALL_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "risber", version, about = "BER of RIS-assisted BPSK links with quantized phase shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER over an SNR grid.
    Sweep(SweepArgs),
    /// BER at a single SNR.
    Point(SweepArgs),
    /// Figure 1: N = 5, L = 2, 3, 4.
    Fig1(FigArgs),
    /// Figure 2: exact vs asymptotic BER for several N and L.
    Fig2(FigArgs),
    /// Run the self-checks and write a report.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(short = 'N', long)]
    elements: usize,
    #[arg(short = 'L', long)]
    levels: u32,
    /// `start:stop:step` in dB, or a single value.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: String,
    /// asym, exact_chf, exact_chf_gcq, mc_bit or mc_semi; repeatable.
    /// Defaults to exact_chf.
    #[arg(long = "method", value_parser = parse_method)]
    methods: Vec<Method>,
    #[command(flatten)]
    common: CommonArgs,
    /// Nodes of the Gauss-Chebyshev rule.
    #[arg(long, default_value_t = 20)]
    gcq_nodes: usize,
    /// Relative tolerance of the inversion integral.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CommonArgs {
    /// Monte Carlo samples per point.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path, or '-' for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct FigArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
    level: LevelArg,
    /// Report path, or '-' for stdout.
    #[arg(long, default_value = "-")]
    out: String,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("invalid SNR value '{p}' in '{s}'")))
    };
    match parts.as_slice() {
        [v] => {
            let v = num(v)?;
            Ok((v, v, 1.0))
        }
        [a, b, h] => Ok((num(a)?, num(b)?, num(h)?)),
        _ => Err(Error::Config(format!("--snr-db expects start:stop:step or a value, got '{s}'"))),
    }
}

fn build_request(args: &SweepArgs, single: bool) -> Result<SweepRequest, Error> {
    let config = RisConfig::new(args.elements, args.levels)?;
    let (start, stop, step) = parse_range(&args.snr_db)?;
    if single && start != stop {
        return Err(Error::Config("point takes a single --snr-db value".into()));
    }
    let mut quad = QuadratureSpec {
        gcq: GcqSpec::new(args.gcq_nodes)?,
        ..QuadratureSpec::default()
    };
    if let Some(rel) = args.tol {
        quad.tol = Tolerance::new(quad.tol.abs_tol, rel)?;
    }
    let mut req = SweepRequest::new(config, start, stop, step);
    if !args.methods.is_empty() {
        req = req.with_methods(args.methods.iter().copied());
    }
    req.n_samples = args.common.samples;
    req.seed = args.common.seed;
    req.quad = quad;
    req.validate()?;
    Ok(req)
}

fn open_output(path: &str) -> io::Result<Box<dyn Write>> {
    Ok(if path == "-" {
        Box::new(BufWriter::new(io::stdout().lock()))
    } else {
        Box::new(BufWriter::new(File::create(PathBuf::from(path))?))
    })
}

fn report_failures(sweep: &Sweep) {
    for f in &sweep.failures {
        eprintln!("warning: {} at {} dB failed: {}", f.method, f.rho_db, f.message);
    }
}

fn run_requests(reqs: &[SweepRequest], out: &str) -> Result<ExitCode, Error> {
    let mut merged = Sweep::default();
    for req in reqs {
        let s = run_sweep(req)?;
        merged.points.extend(s.points);
        merged.failures.extend(s.failures);
    }
    report_failures(&merged);
    sweep::write_csv(&merged.points, open_output(out)?)?;
    if merged.all_failed() {
        return Ok(ExitCode::from(EXIT_ALL_FAILED));
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Sweep(args) => run_requests(&[build_request(&args, false)?], &args.common.out),
        Command::Point(args) => run_requests(&[build_request(&args, true)?], &args.common.out),
        Command::Fig1(args) => run_requests(
            &sweep::fig1_requests(args.common.samples, args.common.seed),
            &args.common.out,
        ),
        Command::Fig2(args) => run_requests(&sweep::fig2_requests(), &args.common.out),
        Command::Validate(args) => {
            let level = match args.level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let checks = run_validate(level);
            write_report(&checks, open_output(&args.out)?)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            eprintln!("{} checks, {failed} failed", checks.len());
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .expect("global pool is configured once");
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got '{v}'");
                return ExitCode::from(EXIT_ARGUMENT);
            }
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::Domain(_) | Error::Regime(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ARGUMENT)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
