//! `sipotts`: verification harness for the superintegrable τ₂ chain.

mod report;
mod suite;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use sipotts_core::divided::divided_power_sector;
use sipotts_core::drinfeld::lambda_coefficients;
use sipotts_core::sl2::{drinfeld_roots, embed_tau2, spectrum, DEFAULT_TOL};
use sipotts_core::{BigRational, CheckedI64, CheckedRational, Error, GenLabel, LatticeConfig, OperatorCache, Sector};

use report::Report;
use suite::{exact, with_n, RunConfig};

#[derive(Parser)]
#[command(name = "sipotts", version, about = "Exact checks of the loop-algebra structure of the superintegrable τ₂(t) chiral Potts chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Lattice {
    /// Number of spin states
    #[arg(long = "N")]
    n: usize,
    /// Chain length
    #[arg(long = "L")]
    l: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    lattice: Lattice,
    /// Spin-shift label Q (repeatable or comma separated)
    #[arg(long = "Q", value_delimiter = ',', default_value = "0")]
    q: Vec<usize>,
    /// Seed for sampled states
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled charge-0 states
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Relative tolerance for the numerical stage
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Spectral parameter sample, e.g. 0.5 or 0.3+0.2i (repeatable)
    #[arg(long = "t", value_parser = parse_complex)]
    t: Vec<Complex64>,
    /// Directory for cached operators
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks and emit a JSON report
    Verify {
        /// Check ids (repeatable or comma separated), or "all"
        #[arg(long = "check", value_delimiter = ',', default_value = "all")]
        check: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Build the base generators and store them in the cache
    Gen {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value = "sipotts-cache")]
        cache_dir: PathBuf,
    },
    /// Print the Drinfeld polynomial coefficients and roots
    Drinfeld {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Dense spectrum of τ₂(t)|_Q on the charge-0 sector as CSV
    Spectrum {
        #[command(flatten)]
        lattice: Lattice,
        #[arg(long = "Q", value_delimiter = ',', default_value = "0")]
        q: Vec<usize>,
        #[arg(long = "t", value_parser = parse_complex, default_value = "0.5")]
        t: Vec<Complex64>,
        /// Relative width of an eigenvalue cluster
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split the loop generators into r copies of sl₂ and check them
    Decompose {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Pretty-print a stored JSON report
    Report { path: PathBuf },
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    s.trim().parse::<Complex64>().map_err(|e| format!("'{s}' is not a complex number: {e}"))
}

/// A message and the process exit status that goes with it.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::NotMultiple { .. } => Failure(2, e.to_string()),
            e => Failure(1, e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(1, e.to_string())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    quiet_overflow_panics();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify { check, run } => verify(run, check),
        Command::Gen { lattice, cache_dir } => gen(lattice, cache_dir),
        Command::Drinfeld { lattice, tol } => drinfeld(lattice, tol),
        Command::Spectrum { lattice, q, t, tol, out } => spectrum_csv(lattice, q, t, tol, out),
        Command::Decompose { run } => {
            let ids = ["loop.extend", "drinfeld.roots", "sl2.relations", "sl2.nilpotency", "sl2.reconstruction", "sl2.eigenspace", "sl2.eigenvectors"];
            verify(run, ids.iter().map(|s| s.to_string()).collect())
        }
        Command::Report { path } => show_report(path),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

/// Overflow panics from 64-bit arithmetic are caught and retried, so they
/// are not printed.
fn quiet_overflow_panics() {
    let default = std::panic::take_hook();
    std::panic::set_hook(Box::new(move |info| {
        let msg = info
            .payload()
            .downcast_ref::<String>()
            .map(String::as_str)
            .or_else(|| info.payload().downcast_ref::<&str>().copied())
            .unwrap_or("");
        if !msg.contains("integer overflow") {
            default(info);
        }
    }));
}

fn verify(run: RunArgs, check: Vec<String>) -> Result<ExitCode, Failure> {
    let selected = suite::resolve(&check).map_err(|m| Failure(2, m))?;
    let rc = RunConfig {
        n: run.lattice.n,
        l: run.lattice.l,
        q: run.q,
        checks: check,
        seed: run.seed,
        samples: run.samples,
        tol: run.tol,
        t: run.t,
        cache_dir: run.cache_dir,
        workers: run.workers,
    };
    let lat = rc.lattice()?;
    if let Some(&q) = rc.q.iter().find(|&&q| q >= lat.n) {
        return Err(Failure(2, format!("Q={q} must be below N={}", lat.n)));
    }
    let start = Instant::now();
    let checks = suite::run(&rc, &selected)?;
    let config = serde_json::to_value(&rc).map_err(|e| Failure(1, e.to_string()))?;
    let report = Report::new(config, checks, start.elapsed().as_secs_f64() * 1e3);
    match &run.out {
        Some(path) => {
            std::fs::write(path, report.to_json())?;
            print!("{}", report.render());
        }
        None => print!("{}", report.to_json()),
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn gen(lattice: Lattice, cache_dir: PathBuf) -> Result<ExitCode, Failure> {
    fn build<const N: usize>(lat: &LatticeConfig, cache: &OperatorCache) -> Result<(), Error> {
        lat.require_multiple()?;
        let sector = Sector::new(lat, 0);
        for label in GenLabel::ALL {
            let (op, outcome) = exact(
                label.name(),
                || cache.get_or_build(lat, label.name(), || divided_power_sector::<CheckedRational, N>(label, 1, &sector)).map(|(op, o)| (op.nnz(), o)),
                || cache.get_or_build(lat, label.name(), || divided_power_sector::<BigRational, N>(label, 1, &sector)).map(|(op, o)| (op.nnz(), o)),
            )?;
            println!("{:<12} {:>8} nonzeros  {:?}  {}", label.name(), op, outcome, cache.path(lat, label.name()).display());
        }
        Ok(())
    }
    let lat = LatticeConfig::new(lattice.n, lattice.l, 0)?;
    let cache = OperatorCache::new(cache_dir);
    with_n!(lat.n, build::<_>(&lat, &cache))?;
    Ok(ExitCode::SUCCESS)
}

fn drinfeld(lattice: Lattice, tol: f64) -> Result<ExitCode, Failure> {
    let lat = LatticeConfig::new(lattice.n, lattice.l, 0)?;
    let data = lambda_coefficients(&lat)?;
    let lambdas: Vec<String> = data.lambdas.iter().map(i64::to_string).collect();
    println!("N={} L={} r={}", lat.n, lat.l, data.r);
    println!("Lambda: {}", lambdas.join(" "));
    let roots = drinfeld_roots(&data, tol)?;
    for (m, z) in roots.roots.iter().enumerate() {
        println!("z_{} = {:.12} {:+.12}i", m + 1, z.re, z.im);
    }
    println!("separation {:.3e}  residual {:.3e}", roots.separation, roots.residual);
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CsvRow {
    t_re: f64,
    t_im: f64,
    #[serde(rename = "Q")]
    q: usize,
    eigenvalue_re: f64,
    eigenvalue_im: f64,
    multiplicity: usize,
}

fn spectrum_csv(lattice: Lattice, qs: Vec<usize>, ts: Vec<Complex64>, tol: f64, out: Option<PathBuf>) -> Result<ExitCode, Failure> {
    fn rows<const N: usize>(lat: &LatticeConfig, qs: &[usize], ts: &[Complex64], tol: f64) -> Result<Vec<CsvRow>, Error> {
        let mut rows = Vec::new();
        for &q in qs {
            let cfg = lat.with_q(q)?;
            let tau = exact("spectrum", || embed_tau2::<CheckedI64, N>(&cfg), || embed_tau2::<BigRational, N>(&cfg))?;
            for &t in ts {
                let s = spectrum(&tau, &cfg, t, tol, DEFAULT_TOL)?;
                log::info!("t={t} Q={q}: ground eigenvalue {} has multiplicity {}", s.target, s.target_multiplicity);
                rows.extend(s.rows.into_iter().map(|r| CsvRow {
                    t_re: r.t.re,
                    t_im: r.t.im,
                    q: r.q,
                    eigenvalue_re: r.eigenvalue.re,
                    eigenvalue_im: r.eigenvalue.im,
                    multiplicity: r.multiplicity,
                }));
            }
        }
        Ok(rows)
    }
    let lat = LatticeConfig::new(lattice.n, lattice.l, 0)?;
    let rows = with_n!(lat.n, rows::<_>(&lat, &qs, &ts, tol))?;
    let sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in &rows {
        w.serialize(row).map_err(|e| Failure(1, e.to_string()))?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn show_report(path: PathBuf) -> Result<ExitCode, Failure> {
    let report = Report::load(&path).map_err(|m| Failure(1, m))?;
    println!("{} {}  schema {}  config {}", report.tool, report.version, report.schema, report.config);
    print!("{}", report.render());
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
