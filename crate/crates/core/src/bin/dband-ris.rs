use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dband_ris::cli::config::{parse_file, AbsorptionChoice, Scenario};
use dband_ris::cli::presets::figure_preset;
use dband_ris::cli::sweep::run_config_sweep;
use dband_ris::cli::{run_point, CliError, Table};

#[derive(Debug, Parser)]
#[command(
    name = "dband-ris",
    version,
    about = "RIS-assisted D-band link: channel gain, pathgain and capacity"
)]
struct Args {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Absorption source: vacuum, default, or a CSV table path.
    #[arg(long, global = true)]
    absorption: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every metric at one scenario.
    Point {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep the axes in the scenario's [sweep] section.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a figure preset: fig2, fig3, fig4 or fig5.
    Preset {
        #[arg(long)]
        name: String,
    },
}

fn run(args: &Args) -> Result<Table, CliError> {
    let absorption = args.absorption.as_deref().map(AbsorptionChoice::parse);
    match &args.command {
        Command::Point { config } => {
            let file = parse_file(config)?;
            run_point(&Scenario::resolve(&file, absorption.as_ref())?)
        }
        Command::Sweep { config } => {
            let file = parse_file(config)?;
            let section = file
                .sweep
                .clone()
                .ok_or_else(|| CliError::validation("sweep", "missing [sweep] section"))?;
            run_config_sweep(&Scenario::resolve(&file, absorption.as_ref())?, &section, args.jobs)
        }
        Command::Preset { name } => figure_preset(name, absorption.as_ref(), args.jobs),
    }
}

fn write(args: &Args, table: &Table) -> io::Result<()> {
    let out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Csv => table.write_csv(out),
        Format::Json => table.write_json(out),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let table = match run(&args) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = write(&args, &table) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
