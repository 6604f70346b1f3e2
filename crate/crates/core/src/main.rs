//! Command-line entry point. Subcommands map onto the experiment kinds;
//! flags override the config file, the config file overrides the desk
//! defaults.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};

use clap::{Args, Parser, Subcommand};

use barren_lab::circuit::{sample_circuit, to_json};
use barren_lab::cli::{
    load_config, run_with_interrupt, sample_spec, CliError, ExperimentConfig, ExperimentKind,
    RunOutcome,
};

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

extern "C" fn flag_interrupt(_signal: libc::c_int) {
    INTERRUPTED.store(true, Ordering::SeqCst);
}

/// The handler only flips a flag; the sweep loop polls it between grid
/// cells and flushes a truncated CSV on its way out.
fn install_interrupt_flag() {
    let handler = flag_interrupt as extern "C" fn(libc::c_int);
    unsafe {
        libc::signal(libc::SIGINT, handler as libc::sighandler_t);
    }
}

#[derive(Parser)]
#[command(name = "barren-lab", version, about = "gradient statistics for layered random rotation circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the formula cross-check battery and print the pass table
    Verify(CommonArgs),
    /// Tabulate exact vs closed-form averaged-layer coefficients
    Channel(CommonArgs),
    /// Print a circuit's backward light cone and write the JSON report
    Lightcone(CommonArgs),
    /// Emit one sampled circuit from the ensemble as JSON
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        /// which ensemble draw to emit
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Run the configured grid experiment, write CSV plus manifest
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config; a run manifest also works. Desk defaults
    /// apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// override master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// override the sample count
    #[arg(long)]
    samples: Option<usize>,
    /// override the output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// force one accumulation pass in sample order
    #[arg(long)]
    sequential: bool,
}

impl CommonArgs {
    fn resolve(&self, force: Option<ExperimentKind>) -> Result<ExperimentConfig, CliError> {
        let mut config = load_config(self.config.as_deref())?;
        if let Some(kind) = force {
            config.experiment = kind;
        }
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(samples) = self.samples {
            config.samples = samples;
        }
        if let Some(out) = &self.out {
            config.output_path = Some(out.clone());
        }
        if self.sequential {
            config.sequential_reduction = true;
        }
        Ok(config)
    }
}

fn run_forced(args: &CommonArgs, kind: ExperimentKind) -> Result<RunOutcome, CliError> {
    let config = args.resolve(Some(kind))?;
    run_with_interrupt(&config, &INTERRUPTED)
}

fn dispatch(cli: Cli) -> Result<RunOutcome, CliError> {
    match cli.command {
        Command::Verify(args) => run_forced(&args, ExperimentKind::Verify),
        Command::Channel(args) => run_forced(&args, ExperimentKind::Channel),
        Command::Lightcone(args) => run_forced(&args, ExperimentKind::Lightcone),
        Command::Sweep(args) => {
            let config = args.resolve(None)?;
            if !config.experiment.is_statistical() {
                return Err(CliError::Config(format!(
                    "sweep wants one of the grid experiments, config names {}",
                    config.experiment.label()
                )));
            }
            run_with_interrupt(&config, &INTERRUPTED)
        }
        Command::Sample { common, index } => {
            let config = common.resolve(None)?;
            let spec = sample_spec(&config)?;
            let text = to_json(&sample_circuit(&spec, index));
            match &config.output_path {
                Some(path) => std::fs::write(path, text + "\n")
                    .map_err(|source| CliError::Io { path: path.clone(), source })?,
                None => println!("{text}"),
            }
            Ok(RunOutcome::Completed)
        }
    }
}

fn main() {
    install_interrupt_flag();
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
