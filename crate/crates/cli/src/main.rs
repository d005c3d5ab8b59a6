use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use maslov_cli::report::trace_csv;
use maslov_cli::spec::Format;
use maslov_cli::{run, CliError, ConventionProfile, ExperimentSpec, LEDGER_ENV};

/// Maslov indices and ground-state holonomy of Lagrangian submanifolds.
#[derive(Debug, Parser)]
#[command(name = "maslov", version)]
struct Args {
    /// Experiment specification (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Output file; defaults to the spec's output.path, else standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
    /// Override tolerances.phase_tol.
    #[arg(long)]
    tol_phase: Option<f64>,
    /// Override the seed of randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the maximal refinement depth.
    #[arg(long)]
    refine_max: Option<u32>,
}

fn load(args: &Args) -> Result<ExperimentSpec, CliError> {
    let text =
        std::fs::read_to_string(&args.spec).map_err(|e| CliError::Io(format!("{}: {e}", args.spec.display())))?;
    let mut spec = ExperimentSpec::from_json(&text)?;
    if let Some(p) = args.tol_phase {
        spec.tolerances.phase_tol = p;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(r) = args.refine_max {
        spec.refine_max = Some(r);
    }
    if let Some(f) = &args.format {
        spec.output.format = if f == "csv" { Format::Csv } else { Format::Json };
    }
    if let Some(o) = &args.out {
        spec.output.path = Some(o.display().to_string());
    }
    spec.validate()?;
    Ok(spec)
}

fn execute(args: &Args) -> Result<i32, CliError> {
    let profile = ConventionProfile::parse(&std::env::var(LEDGER_ENV).unwrap_or_else(|_| "paper-v1".into()))?;
    let spec = load(args)?;
    let outcome = run(&spec, profile)?;
    let body = match spec.output.format {
        Format::Json => outcome.report.to_json(),
        Format::Csv => trace_csv(outcome.trace.as_deref().unwrap_or_default()),
    };
    let failing = outcome.report.failing();
    let summary = if failing.is_empty() {
        format!("{}: pass ({} assertions)", outcome.report.command, outcome.report.assertions.len())
    } else {
        format!("{}: FAIL {}", outcome.report.command, failing.join(", "))
    };
    match &spec.output.path {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| CliError::Io(format!("{p}: {e}")))?;
            println!("{summary}");
        }
        None => {
            print!("{body}");
            eprintln!("{summary}");
        }
    }
    Ok(if failing.is_empty() { 0 } else { 2 })
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("maslov: {e}");
            if let Some(what) = e.invariant() {
                eprintln!("maslov: failing invariant: {what}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
