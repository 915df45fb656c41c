//! Command-line front end: `hallcond <step> [--config FILE | --preset NAME]`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hallcond::config::{preset, Operation, RunConfig, PRESETS};
use hallcond::error::{HallError, Result};
use hallcond::run::{run, write_outputs};

#[derive(Parser)]
#[command(name = "hallcond", version, about = "Quantum Hall transport on a magnetic torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named experiment (see `--help` of any step for the list).
    #[arg(long, global = true, long_help = format!("Named experiment: {}", PRESETS.join(", ")))]
    preset: Option<String>,
    /// Directory for bundle.json and the CSV files.
    #[arg(long, global = true, default_value = "hallcond-out")]
    out_dir: PathBuf,
    /// Override the run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for gauge-point work (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Leave timings out of the bundle so repeated runs are byte-identical.
    #[arg(long, global = true)]
    canonical: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Low-lying spectrum at the configured gauge point.
    Spectrum,
    /// Kubo coefficients and switching corrections.
    Response(ResponseArgs),
    /// Driven time evolution; writes trace.csv.
    Evolve(ResponseArgs),
    /// Chern number, curvature and fraction bound; writes curvature.csv.
    Chern,
    /// Boundary winding integer.
    Winding,
    /// Heat-kernel Dirac index.
    Index,
    /// Gauge averages of the response coefficients.
    Average,
    /// Parameter sweep; writes scan.csv.
    Scan,
    /// Every step listed in the configuration.
    All,
}

#[derive(Args, Default)]
struct ResponseArgs {
    /// Gauge point `phiX,phiY`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phi: Option<Vec<f64>>,
    /// Switching rate.
    #[arg(long)]
    eta: Option<f64>,
    /// Switch-on duration.
    #[arg(long = "T")]
    big_t: Option<f64>,
    /// Observation time.
    #[arg(long)]
    t: Option<f64>,
    /// Field strength.
    #[arg(long = "F")]
    f: Option<f64>,
    /// Also run the driven evolution.
    #[arg(long)]
    evolve: bool,
}

impl ResponseArgs {
    fn apply(&self, c: &mut RunConfig) -> Result<()> {
        if let Some(p) = &self.phi {
            if p.len() != 2 {
                return Err(HallError::Config(format!("--phi needs two values, got {}", p.len())));
            }
            c.response.phi = [p[0], p[1]];
        }
        if self.eta.is_some() {
            c.response.eta = self.eta;
        }
        if self.big_t.is_some() {
            c.response.big_t = self.big_t;
        }
        if let Some(t) = self.t {
            c.response.t = t;
        }
        if let Some(f) = self.f {
            c.response.f = f;
        }
        Ok(())
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut config = match (&cli.config, &cli.preset) {
        (Some(path), None) => RunConfig::from_file(path)?,
        (None, Some(name)) => preset(name)?,
        _ => {
            return Err(HallError::Config(format!(
                "give --config FILE or --preset NAME (presets: {})",
                PRESETS.join(", ")
            )))
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.output.canonical |= cli.canonical;
    let ops = match &cli.command {
        Command::Spectrum => vec![Operation::Spectrum],
        Command::Response(a) => {
            a.apply(&mut config)?;
            if a.evolve {
                vec![Operation::Response, Operation::Evolve]
            } else {
                vec![Operation::Response]
            }
        }
        Command::Evolve(a) => {
            a.apply(&mut config)?;
            vec![Operation::Evolve]
        }
        Command::Chern => vec![Operation::Chern],
        Command::Winding => vec![Operation::Winding],
        Command::Index => vec![Operation::Index],
        Command::Average => vec![Operation::Average],
        Command::Scan => vec![Operation::Scan],
        Command::All => config.operations.clone(),
    };
    config.operations = ops;
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> Result<()> {
    let config = load(cli)?;
    #[cfg(feature = "parallel")]
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| HallError::Config(format!("cannot start {n} workers: {e}")))?;
    }
    let output = run(&config)?;
    for w in &output.bundle.warnings {
        eprintln!("warning: {w}");
    }
    let files = write_outputs(&output, &cli.out_dir)?;
    println!("wrote {} to {}", files.join(", "), cli.out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hallcond: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
