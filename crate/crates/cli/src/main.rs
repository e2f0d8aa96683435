use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use nftab::minorations::{correction_table, local_correction, max_applicable_norm};
use nftab::polyarith::{sturm_signature, IntPolynomial};
use nftab::sieve::{candidate_filter_traced, satisfies_search_bounds, SearchParams, DEFAULT_WINDOW};
use nftab::tabcli::{parse_chunk_key, run_search, BoundSpec, ChunkSelection, RunConfig, TabError};

const EXIT_INVALID_CONFIG: u8 = 2;
const EXIT_CORRUPT_CHECKPOINT: u8 = 3;
const EXIT_INTERRUPTED: u8 = 4;

#[derive(Parser)]
#[command(name = "tab", about = "Tabulate number fields of bounded discriminant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all fields of one signature up to a discriminant bound.
    Run {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        r1: usize,
        #[arg(long)]
        r2: usize,
        /// Discriminant bound, or `auto` for the norm-5 local correction.
        #[arg(long, default_value = "auto")]
        bound: String,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// `all`, or a comma-separated list of `trace:a_n` keys.
        #[arg(long, default_value = "all")]
        chunks: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Stop after this many chunks, leaving the checkpoint for a resume.
        #[arg(long, hide = true)]
        stop_after: Option<usize>,
    },
    /// Print local corrections `C(r1, r2, q)` for a degree.
    Bounds {
        #[arg(long)]
        degree: usize,
        #[arg(long, requires = "r2")]
        r1: Option<usize>,
        #[arg(long, requires = "r1")]
        r2: Option<usize>,
        /// Emit JSON instead of a text table.
        #[arg(long)]
        json: bool,
    },
    /// Run the candidate filter on one polynomial and print each step.
    Verify {
        /// `x^3 - x - 1` or a coefficient list `1,0,-1,-1`.
        poly: String,
        #[arg(long)]
        degree: usize,
        /// Discriminant bound; defaults to the norm-5 local correction.
        #[arg(long)]
        bound: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { degree, r1, r2, bound, window, jobs, chunks, out, checkpoint, stop_after } => {
            run(degree, r1, r2, &bound, window, jobs, &chunks, out, checkpoint, stop_after)
        }
        Command::Bounds { degree, r1, r2, json } => bounds(degree, r1.zip(r2), json),
        Command::Verify { poly, degree, bound, window } => verify(&poly, degree, bound, window),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<TabError>() {
                Some(TabError::InvalidConfig(_)) => EXIT_INVALID_CONFIG,
                Some(TabError::CorruptCheckpoint(_) | TabError::ConfigMismatchOnResume) => EXIT_CORRUPT_CHECKPOINT,
                Some(TabError::Interrupted(_)) => EXIT_INTERRUPTED,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    TabError::InvalidConfig(msg.into()).into()
}

fn parse_chunks(spec: &str) -> anyhow::Result<ChunkSelection> {
    if spec.trim() == "all" {
        return Ok(ChunkSelection::All);
    }
    spec.split(',')
        .map(|k| parse_chunk_key(k).ok_or_else(|| invalid(format!("bad chunk key {k:?}"))))
        .collect::<anyhow::Result<Vec<_>>>()
        .map(ChunkSelection::List)
}

#[allow(clippy::too_many_arguments)]
fn run(
    degree: usize,
    r1: usize,
    r2: usize,
    bound: &str,
    window: i64,
    jobs: usize,
    chunks: &str,
    out: PathBuf,
    checkpoint: PathBuf,
    stop_after: Option<usize>,
) -> anyhow::Result<()> {
    let bound = match bound.trim() {
        "auto" => BoundSpec::Auto,
        b => BoundSpec::Explicit(b.parse().map_err(|_| invalid(format!("bad bound {b:?}")))?),
    };
    let mut config = RunConfig::new(degree, r1, r2, bound);
    config.window = window;
    config.jobs = jobs;
    config.chunks = parse_chunks(chunks)?;
    config.out = Some(out);
    config.checkpoint = Some(checkpoint);
    config.stop_after = stop_after;
    let params = config.search_params()?;
    println!(
        "degree {} signature ({}, {})  B = {}  filter level {}  window {}",
        params.n, params.r1, params.r2, params.bound, params.filter_level, params.window
    );
    let table = run_search(&config)?;
    print!("{}", table.summary());
    Ok(())
}

fn bounds(degree: usize, signature: Option<(usize, usize)>, json: bool) -> anyhow::Result<()> {
    if let Some((r1, r2)) = signature {
        if r1 + 2 * r2 != degree {
            return Err(invalid(format!("signature ({r1}, {r2}) does not match degree {degree}")));
        }
    }
    if degree < 2 {
        return Err(invalid("degree must be at least 2"));
    }
    let table = correction_table(degree, signature);
    if json {
        println!("{}", serde_json::to_string_pretty(&table).context("serializing table")?);
        return Ok(());
    }
    println!("{:>3} {:>3} {:>3} {:>16}", "r1", "r2", "q", "C");
    for e in &table {
        println!("{:>3} {:>3} {:>3} {:>16}", e.r1, e.r2, e.q, e.c);
    }
    Ok(())
}

fn verify(poly: &str, degree: usize, bound: Option<u64>, window: i64) -> anyhow::Result<()> {
    let p: IntPolynomial = poly.parse().map_err(|e| invalid(format!("cannot parse polynomial: {e}")))?;
    if p.degree() != degree {
        return Err(invalid(format!("polynomial has degree {}, expected {degree}", p.degree())));
    }
    let (r1, r2) = sturm_signature(&p).map_err(|e| invalid(format!("{e}")))?;
    let b = match bound {
        Some(b) => b,
        None => u64::try_from(local_correction(degree, r1, r2, 5)).map_err(|_| invalid("bound exceeds 64 bits"))?,
    };
    let m = max_applicable_norm(degree, r1, r2, b as u128);
    let params = SearchParams::new(degree, r1, r2, b, m, window).map_err(|e| invalid(e.to_string()))?;
    println!("{p}");
    println!("signature ({r1}, {r2})  B = {b}  filter level {m}");
    println!(
        "  {:<20} {}",
        "search_bounds",
        if satisfies_search_bounds(&p, &params) { "inside" } else { "outside (informational)" }
    );
    let (outcome, steps) = candidate_filter_traced(&p, &params);
    for s in &steps {
        println!("  {:<20} {:<5} {}", s.check, if s.passed { "pass" } else { "FAIL" }, s.detail);
    }
    match outcome {
        Ok(r) => match r.d_k {
            Some(d) => println!("accepted: d_K = {d}"),
            None => println!("accepted: d_K unresolved"),
        },
        Err(reason) => println!("rejected: {reason}"),
    }
    Ok(())
}
