use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use planar_string::braid::Projection;
use planar_string::pipeline::{self, Stage, StageError, StageResult, Written};
use planar_string::scenario::{Overrides, Scenario};

/// Planar strings from chiral soliton data: fields, world-sheets, charges,
/// cusp world-lines and braids.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    /// worker threads (default: all cores); results do not depend on it
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize both chiral fields and write them as CSV
    Synth(Run),
    /// Recover eigenvalues and the monodromy on the real axis
    Spectrum(Run),
    /// Reconstruct the world-sheet on the scenario lattice
    Worldsheet(Run),
    /// Momentum, angular momentum, Hamiltonian and constraint residual
    Charges(Run),
    /// Track cusp world-lines and their birth/death events
    Cusps(Run),
    /// Braid word (or tangle) of the cusp world-lines
    Braid(Run),
    /// Every stage enabled in the scenario outputs
    Pipeline(Run),
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X1,
    X3,
}

#[derive(Args)]
struct Run {
    /// scenario JSON
    scenario: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// translation `Z1,Z3`
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    z: Option<[f64; 2]>,
    /// grid half-width
    #[arg(long = "half-width")]
    half_width: Option<f64>,
    /// grid samples (power of two)
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    xi0_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xi0_max: Option<f64>,
    #[arg(long)]
    xi0_step: Option<f64>,
    /// crossing axis of the braid projection
    #[arg(long, value_enum)]
    projection: Option<Axis>,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok([a, b]),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

impl Run {
    fn overrides(&self) -> Overrides {
        Overrides {
            kappa: self.kappa,
            beta: self.beta,
            gamma: self.gamma,
            z: self.z,
            half_width: self.half_width,
            samples: self.samples,
            xi0_min: self.xi0_min,
            xi0_max: self.xi0_max,
            xi0_step: self.xi0_step,
            out_dir: self.out.clone(),
            projection: self.projection.map(|a| match a {
                Axis::X1 => Projection::X1,
                Axis::X3 => Projection::X3,
            }),
        }
    }

    fn scenario(&self) -> StageResult<Scenario> {
        let mut s = Scenario::load(&self.scenario).map_err(|source| StageError {
            stage: Stage::Scenario,
            source,
        })?;
        s.apply(&self.overrides());
        Ok(s)
    }
}

fn dispatch(cmd: &Command) -> StageResult<Written> {
    let (run, f): (&Run, fn(&Scenario) -> StageResult<Written>) = match cmd {
        Command::Synth(r) => (r, pipeline::run_synth),
        Command::Spectrum(r) => (r, pipeline::run_spectrum),
        Command::Worldsheet(r) => (r, pipeline::run_worldsheet),
        Command::Charges(r) => (r, pipeline::run_charges),
        Command::Cusps(r) => (r, pipeline::run_cusps),
        Command::Braid(r) => (r, pipeline::run_braid),
        Command::Pipeline(r) => (r, pipeline::run_pipeline),
    };
    f(&run.scenario()?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{{\"stage\":\"scenario\",\"kind\":\"validation\",\"message\":\"--threads must be positive\"}}");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: {e}");
        }
    }
    match dispatch(&cli.command) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
