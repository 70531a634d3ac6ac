//! Command-line harness: closed-form analysis, placement optimization,
//! Monte Carlo validation, and figure-style parameter sweeps over TOML
//! experiment configs.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hetcache::config::{load_config, ExperimentConfig, OutputFormat, PolicyKind};
use hetcache::experiment::run_experiment;
use hetcache::output::{emit_results, fmt_sig, write_results};
use hetcache::placement::{solve_nonuniform_suboptimal, solve_uniform, SolverReport};
use hetcache::reference::{solve_reference, ReferenceOptions};
use hetcache::{hcp_placement, mpcp_placement, PlacementMatrix};

#[derive(Parser)]
#[command(
    name = "hetcache",
    about = "Hit-probability analysis and content placement for cache-enabled multi-tier networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the simulation seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the simulation trial count from the config.
    #[arg(long)]
    trials: Option<u64>,
    /// Output file; stdout when neither this nor [output] is given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (csv or json); overrides [output].
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed forms for the configured policies (no sweep, no
    /// simulation).
    Analyze(CommonArgs),
    /// Produce the placement matrix for a single configured policy.
    Optimize(CommonArgs),
    /// Monte Carlo check of the analytic hit probability.
    Simulate(CommonArgs),
    /// Reproduce a figure-style sweep: one row per (sweep value, policy).
    Sweep(CommonArgs),
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(format!("unknown format {other:?}; expected csv or json")),
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &CommonArgs) {
    if let Some(sim) = cfg.simulation.as_mut() {
        if let Some(seed) = args.seed {
            sim.seed = seed;
        }
        if let Some(trials) = args.trials {
            sim.trials = trials;
        }
    } else if args.trials.is_some() {
        cfg.simulation = Some(hetcache::config::SimulationSection {
            region_radius_km: None,
            trials: args.trials.unwrap(),
            seed: args.seed.unwrap_or(0),
            target_file: None,
            mode: None,
        });
    }
}

/// Resolves destination and format from flags, falling back to the config's
/// [output] section, then stdout/CSV.
fn resolve_output(
    cfg: &ExperimentConfig,
    args: &CommonArgs,
) -> Result<(Option<PathBuf>, OutputFormat), String> {
    let path = args
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| PathBuf::from(&o.path)));
    let format = match &args.format {
        Some(f) => parse_format(f)?,
        None => cfg
            .output
            .as_ref()
            .map(|o| o.format)
            .unwrap_or(OutputFormat::Csv),
    };
    Ok((path, format))
}

fn emit_rows(
    rows: &[hetcache::output::ResultRow],
    path: Option<&PathBuf>,
    format: OutputFormat,
) -> Result<(), String> {
    match path {
        Some(p) => {
            emit_results(rows, format, p).map_err(|e| e.to_string())?;
            eprintln!("wrote {} rows to {}", rows.len(), p.display());
        }
        None => {
            write_results(rows, format, std::io::stdout().lock()).map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

fn print_report(policy: &str, report: &SolverReport) {
    eprintln!(
        "{policy}: objective {} ({} iterations, converged: {}{})",
        fmt_sig(report.objective, 12),
        report.iterations,
        report.converged,
        report
            .duality_gap
            .map(|g| format!(", duality gap {}", fmt_sig(g, 6)))
            .unwrap_or_default()
    );
}

fn warn_region(cfg: &ExperimentConfig) -> Result<(), String> {
    let model = cfg.network_model().map_err(|e| e.to_string())?;
    if let Some(sim) = cfg.sim_config(&model).map_err(|e| e.to_string())? {
        if let Some(warning) = sim.region_warning(&model) {
            eprintln!("warning: {warning}");
        }
    }
    Ok(())
}

fn run_analyze(args: &CommonArgs) -> Result<(), String> {
    let mut cfg = load_config(&args.config).map_err(|e| e.to_string())?;
    apply_overrides(&mut cfg, args);
    // Closed forms only: strip sweep and simulation.
    cfg.sweep = None;
    cfg.simulation = None;
    let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let (path, format) = resolve_output(&cfg, args)?;
    emit_rows(&rows, path.as_ref(), format)
}

fn run_optimize(args: &CommonArgs) -> Result<(), String> {
    let mut cfg = load_config(&args.config).map_err(|e| e.to_string())?;
    apply_overrides(&mut cfg, args);
    if cfg.policy.names.len() != 1 {
        return Err(format!(
            "optimize needs exactly one policy in policy.names; got {}",
            cfg.policy.names.len()
        ));
    }
    let policy = cfg.policy.names[0];
    let model = cfg.network_model().map_err(|e| e.to_string())?;
    let q = cfg.popularity_profile().map_err(|e| e.to_string())?;
    let seed = args
        .seed
        .or_else(|| cfg.simulation.as_ref().map(|s| s.seed))
        .unwrap_or(0);
    let (matrix, report): (PlacementMatrix, Option<SolverReport>) = match policy {
        PolicyKind::TlcpUniform => {
            let (m, r) = solve_uniform(&model, &q).map_err(|e| e.to_string())?;
            (m, Some(r))
        }
        PolicyKind::TlcpSuboptimal => {
            let (m, r) = solve_nonuniform_suboptimal(&model, &q).map_err(|e| e.to_string())?;
            (m, Some(r))
        }
        PolicyKind::TlcpReference => {
            let options = ReferenceOptions {
                seed,
                ..ReferenceOptions::default()
            };
            let (m, r) = solve_reference(&model, &q, &options).map_err(|e| e.to_string())?;
            (m, Some(r))
        }
        PolicyKind::Mpcp => (
            mpcp_placement(&model, q.len()).map_err(|e| e.to_string())?,
            None,
        ),
        PolicyKind::Hcp => (hcp_placement(&model, &q).map_err(|e| e.to_string())?, None),
        PolicyKind::ExplicitMatrix => {
            let rows = cfg
                .policy
                .matrix
                .clone()
                .ok_or("explicit-matrix policy requires policy.matrix")?;
            (
                PlacementMatrix::from_rows(rows, &model).map_err(|e| e.to_string())?,
                None,
            )
        }
    };
    if let Some(r) = &report {
        print_report(policy.name(), r);
    } else {
        let objective =
            hetcache::hit_probability(&model, &matrix, &q).map_err(|e| e.to_string())?;
        eprintln!("{}: objective {}", policy.name(), fmt_sig(objective, 12));
    }
    let (path, format) = resolve_output(&cfg, args)?;
    emit_matrix(&matrix, path.as_ref(), format)
}

fn emit_matrix(
    matrix: &PlacementMatrix,
    path: Option<&PathBuf>,
    format: OutputFormat,
) -> Result<(), String> {
    let render = |mut w: Box<dyn Write>| -> Result<(), String> {
        match format {
            OutputFormat::Csv => {
                let mut header = vec!["file".to_string()];
                header.extend((1..=matrix.num_tiers()).map(|k| format!("tier_{k}")));
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(&header).map_err(|e| e.to_string())?;
                for m in 0..matrix.num_files() {
                    let mut record = vec![(m + 1).to_string()];
                    record.extend(matrix.row(m).iter().map(|&p| fmt_sig(p, 12)));
                    csv.write_record(&record).map_err(|e| e.to_string())?;
                }
                csv.flush().map_err(|e| e.to_string())?;
            }
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut w, &matrix.rows())
                    .map_err(|e| e.to_string())?;
                writeln!(w).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    };
    match path {
        Some(p) => {
            let file = std::fs::File::create(p)
                .map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            render(Box::new(std::io::BufWriter::new(file)))?;
            eprintln!("wrote placement matrix to {}", p.display());
            Ok(())
        }
        None => render(Box::new(std::io::stdout().lock())),
    }
}

fn run_simulate(args: &CommonArgs) -> Result<(), String> {
    let mut cfg = load_config(&args.config).map_err(|e| e.to_string())?;
    apply_overrides(&mut cfg, args);
    if cfg.simulation.is_none() {
        cfg.simulation = Some(hetcache::config::SimulationSection {
            region_radius_km: None,
            trials: 10_000,
            seed: args.seed.unwrap_or(0),
            target_file: None,
            mode: None,
        });
    }
    warn_region(&cfg)?;
    let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let (path, format) = resolve_output(&cfg, args)?;
    emit_rows(&rows, path.as_ref(), format)
}

fn run_sweep(args: &CommonArgs) -> Result<(), String> {
    let mut cfg = load_config(&args.config).map_err(|e| e.to_string())?;
    apply_overrides(&mut cfg, args);
    if cfg.simulation.is_some() {
        warn_region(&cfg)?;
    }
    let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let (path, format) = resolve_output(&cfg, args)?;
    emit_rows(&rows, path.as_ref(), format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Optimize(args) => run_optimize(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Sweep(args) => run_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
