mod commands;
mod config;
mod report;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Certified frame bounds for woven wavelet and Gabor systems.
///
/// Exit codes: 0 when the run certifies, 2 when the computation succeeds
/// but the certificate is negative, 1 on errors.
#[derive(Parser)]
#[command(name = "frameweave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config describing the system.
    #[arg(long)]
    config: PathBuf,
    /// Directory for reports and curves (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override numeric.seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override numeric.grid from the config.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Frame bounds of one woven wavelet system, with the full bound chain.
    Bounds(RunArgs),
    /// Pattern-independent bounds valid for every weaving pattern.
    WeaveCertify(RunArgs),
    /// Scan random patterns against the weave certificate.
    WeaveSample(RunArgs),
    /// Scan every pattern on a window against the weave certificate.
    WeaveEnumerate(RunArgs),
    /// Frame bounds of one woven Gabor system.
    GaborBounds(RunArgs),
    /// Density gate, cover check, and weave certificate for a Gabor layout.
    GaborCertify(RunArgs),
    /// Density admissibility of a Gabor layout, nothing else.
    DensityGate(RunArgs),
    /// Round-trip reconstruction of random band-limited signals.
    Reconstruct(RunArgs),
    /// Reconstruction with erased scales patched by a fallback family.
    Erasure(RunArgs),
    /// Fusion bounds and decompositions of a finite packet.
    FusionDemo(RunArgs),
    /// Projection-mass growth of the non-expansive packet family.
    Counterexample(RunArgs),
}

impl Command {
    fn split(&self) -> (&'static str, &RunArgs) {
        match self {
            Command::Bounds(a) => ("bounds", a),
            Command::WeaveCertify(a) => ("weave-certify", a),
            Command::WeaveSample(a) => ("weave-sample", a),
            Command::WeaveEnumerate(a) => ("weave-enumerate", a),
            Command::GaborBounds(a) => ("gabor-bounds", a),
            Command::GaborCertify(a) => ("gabor-certify", a),
            Command::DensityGate(a) => ("density-gate", a),
            Command::Reconstruct(a) => ("reconstruct", a),
            Command::Erasure(a) => ("erasure", a),
            Command::FusionDemo(a) => ("fusion-demo", a),
            Command::Counterexample(a) => ("counterexample", a),
        }
    }
}

fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("FRAMEWEAVE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("FRAMEWEAVE_THREADS must be a positive integer, got {raw:?}"))?;
    if threads == 0 {
        bail!("FRAMEWEAVE_THREADS must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot size the thread pool")?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    init_thread_pool()?;
    let (name, args) = cli.command.split();
    let cfg = config::RunConfig::load(&args.config, args.out.clone(), args.seed, args.grid)?;
    let started = Instant::now();
    let outcome = match &cli.command {
        Command::Bounds(_) => commands::bounds(&cfg)?,
        Command::WeaveCertify(_) => commands::weave_certify(&cfg)?,
        Command::WeaveSample(_) => commands::weave_sample(&cfg)?,
        Command::WeaveEnumerate(_) => commands::weave_enumerate(&cfg)?,
        Command::GaborBounds(_) => commands::gabor_bounds(&cfg)?,
        Command::GaborCertify(_) => commands::gabor_certify(&cfg)?,
        Command::DensityGate(_) => commands::density_gate_cmd(&cfg)?,
        Command::Reconstruct(_) => commands::reconstruct(&cfg)?,
        Command::Erasure(_) => commands::erasure(&cfg)?,
        Command::FusionDemo(_) => commands::fusion_demo(&cfg)?,
        Command::Counterexample(_) => commands::counterexample(&cfg)?,
    };
    let wall = started.elapsed().as_secs_f64();

    if !cfg.out_dir.as_os_str().is_empty() {
        std::fs::create_dir_all(&cfg.out_dir)
            .with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    }
    let report_path = cfg.report_path(name);
    std::fs::write(&report_path, outcome.report.render()?)
        .with_context(|| format!("cannot write {}", report_path.display()))?;
    println!("{name}: {}", outcome.summary);
    println!("report: {}", report_path.display());
    if let Some(curve) = &outcome.curve {
        let curve_path = cfg
            .curve_path()
            .unwrap_or_else(|| cfg.out_dir.join(format!("{name}-curve.csv")));
        std::fs::write(&curve_path, curve)
            .with_context(|| format!("cannot write {}", curve_path.display()))?;
        println!("curve: {}", curve_path.display());
    }
    // Wall time goes to stdout only; reports must be byte-identical across
    // reruns.
    println!("wall time: {wall:.3} s");
    Ok(outcome.certified)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                // Usage mistakes are errors; 2 is reserved for negative
                // certificates.
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
