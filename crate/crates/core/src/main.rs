use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uavcover::commands::{cmd_evaluate, cmd_plan, cmd_power, cmd_sweep, BeamSpec};
use uavcover::deployment::DeploymentDoc;
use uavcover::scenario::Scenario;
use uavcover::{Error, Method};

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(name = "uavcover", version, about = "Non-overlapping indoor coverage of a building by directional UAVs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (key = value lines).
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build one deployment and write it as JSON.
    Plan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        method: Method,
        /// Half-power beamwidth in degrees.
        #[arg(long, conflicts_with = "r_far", required_unless_present = "r_far")]
        theta_b: Option<f64>,
        /// Radius of the beam footprint on the far facade, metres.
        #[arg(long)]
        r_far: Option<f64>,
    },
    /// Coverage of every method over the scenario sweep, as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Minimum transmit power per UAV and in total, as CSV.
    Power {
        #[command(flatten)]
        common: Common,
        /// Deployment JSON written by `plan`.
        deployment: PathBuf,
        /// Add UAVs on other channels until no hole is left.
        #[arg(long)]
        full_coverage: bool,
    },
    /// Monte-Carlo coverage, overlaps and holes of a deployment, as JSON.
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Deployment JSON written by `plan`.
        deployment: PathBuf,
    },
}

fn load(common: &Common) -> Result<Scenario, Error> {
    let mut s = Scenario::from_path(&common.scenario)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(n) = common.samples {
        s.n_samples = n;
    }
    Ok(s)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn read_doc(p: &Path) -> Result<DeploymentDoc, Error> {
    DeploymentDoc::from_path(p)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Plan { common, method, theta_b, r_far } => {
            let scenario = load(&common)?;
            let beam = match (theta_b, r_far) {
                (Some(t), _) => BeamSpec::ThetaB(t),
                (None, Some(r)) => BeamSpec::RFar(r),
                (None, None) => return Err(Error::Missing("give --theta-b or --r-far".into())),
            };
            let (plan, text) = cmd_plan(&scenario, method, beam)?;
            emit(&common.out, &text)?;
            if let Some(d) = &plan.diagnostic {
                eprintln!("infeasible geometry: {d}");
                return Ok(ExitCode::from(EXIT_INFEASIBLE));
            }
        }
        Command::Sweep { common } => {
            let scenario = load(&common)?;
            emit(&common.out, &cmd_sweep(&scenario)?)?;
        }
        Command::Power { common, deployment, full_coverage } => {
            let scenario = load(&common)?;
            emit(&common.out, &cmd_power(&scenario, &read_doc(&deployment)?, full_coverage)?)?;
        }
        Command::Evaluate { common, deployment } => {
            let scenario = load(&common)?;
            emit(&common.out, &cmd_evaluate(&scenario, &read_doc(&deployment)?)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) => ExitCode::from(EXIT_INFEASIBLE),
                _ => ExitCode::from(EXIT_CONFIG),
            }
        }
    }
}
