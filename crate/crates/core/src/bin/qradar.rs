use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qradar::scenario::{
    emit_csv, emit_svg, load_scenario_with, run_detuning_sweep, run_parameter_sweep, stability_census, with_jobs,
    write_csv, Scenario, SweepAxis, SweepResult,
};
use qradar::{Convention, Error};

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "qradar", version, about = "Entanglement survival through a quantum radar chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the detuning and report the witness after every stage
    Sweep(RunArgs),
    /// Sweep temperature, wavelength or MR damping, minimizing over detuning
    ParamSweep(RunArgs),
    /// Validate a scenario and report how many sweep points are stable
    Check(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    scenario: PathBuf,
    /// Enforce the tabulated device parameter ranges
    #[arg(long)]
    strict: bool,
    #[arg(long, value_parser = ["corrected", "verbatim"])]
    convention: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_name = "PATH")]
    out_csv: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out_svg: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Parse { .. } | Error::Validation(_) | Error::Domain(_) => EXIT_INVALID,
        _ if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

fn load(args: &CommonArgs) -> Result<Scenario, Error> {
    let mut s = load_scenario_with(&args.scenario, args.strict).map_err(|e| match e {
        Error::Io(io) => Error::Io(io::Error::new(io.kind(), format!("{}: {io}", args.scenario.display()))),
        other => other,
    })?;
    if let Some(c) = &args.convention {
        s.convention = c.parse::<Convention>()?;
    }
    Ok(s)
}

fn summarize(r: &SweepResult, out: &mut impl Write) -> io::Result<()> {
    let points = r.rows.len() / r.stages.len().max(1);
    writeln!(out, "{} points, {} stage series, scenario {}", points, r.stages.len(), &r.scenario_hash[..12])?;
    for label in &r.stages {
        let stable = r.series(label).filter(|row| row.lambda.is_some()).count();
        match r.min_lambda(label) {
            Some(m) => writeln!(out, "  {label}: min lambda {m:.6e} ({stable}/{points} points)")?,
            None => writeln!(out, "  {label}: no stable points")?,
        }
    }
    Ok(())
}

fn run(args: RunArgs, parameter: bool) -> Result<(), Error> {
    let s = load(&args.common)?;
    let is_detuning = s.sweep.axis == SweepAxis::Detuning;
    if parameter == is_detuning {
        let hint = if parameter { "sweep" } else { "param-sweep" };
        return Err(Error::Validation(vec![qradar::Violation::new(
            "sweep.axis",
            format!("axis {} needs the `{hint}` subcommand", s.sweep.axis.as_str()),
        )]));
    }
    let result = with_jobs(args.common.jobs, || {
        if parameter {
            run_parameter_sweep(&s)
        } else {
            run_detuning_sweep(&s)
        }
    })??;

    let csv = args.out_csv.or_else(|| s.output.csv.clone());
    let svg = args.out_svg.or_else(|| s.output.svg.clone());
    match &csv {
        Some(path) => emit_csv(&result, path)?,
        None => write_csv(&result, io::stdout().lock())?,
    }
    if let Some(path) = &svg {
        emit_svg(&result, path)?;
    }
    summarize(&result, &mut io::stderr().lock())?;
    if result.stable_rows() == 0 {
        return Err(Error::Numerical("no sweep point has a stable stationary state".into()));
    }
    Ok(())
}

fn check(args: CommonArgs) -> Result<(), Error> {
    let s = load(&args)?;
    let census = with_jobs(args.jobs, || stability_census(&s))??;
    let mut out = io::stdout().lock();
    writeln!(out, "{}: valid ({} convention)", display(&args.scenario), s.convention)?;
    writeln!(
        out,
        "stable points: {}/{} ({} without a converged steady state)",
        census.stable, census.points, census.diverged
    )?;
    if let Some((lo, hi)) = census.abscissa_range {
        writeln!(out, "spectral abscissa range: [{lo:.6e}, {hi:.6e}] 1/s")?;
    }
    if census.stable == 0 {
        return Err(Error::Numerical("no sweep point has a stable stationary state".into()));
    }
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => run(a, false),
        Command::ParamSweep(a) => run(a, true),
        Command::Check(a) => check(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qradar: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
