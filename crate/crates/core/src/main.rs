use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isoplate::analysis::{run_analysis, RunOptions};
use isoplate::exec::configure_threads;
use isoplate::export::{frequencies_csv, write_results, Format};
use isoplate::fixtures;
use isoplate::model::{parse_model, Boundary};
use isoplate::Error;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "isoplate",
    version,
    about = "Free vibration of stiffened laminated plates with cutouts"
)]
#[command(after_help = "Environment:\n  ISOPLATE_THREADS  worker threads (default: all cores)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a modal analysis and write the frequency table (and mode shapes).
    Analyze {
        model: PathBuf,
        /// Number of modes.
        #[arg(long)]
        modes: Option<usize>,
        /// Refinement level: every element is halved L times.
        #[arg(long, value_name = "L")]
        refine: Option<u32>,
        /// Boundary code for the edges x_min, y_min, x_max, y_max (e.g. ssss, cccc, cfff).
        #[arg(long)]
        bc: Option<String>,
        /// Output directory. Without it the frequency table goes to stdout.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Gauss points per direction.
        #[arg(long, value_name = "Q")]
        quadrature: Option<usize>,
    },
    /// Check a model file against the schema.
    Validate { model: PathBuf },
    /// Built-in reference models.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    /// Print the fixture names.
    List,
    /// Print a fixture as a model file.
    Emit { name: String },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_NUMERICAL
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Analyze {
            model,
            modes,
            refine,
            bc,
            out,
            format,
            quadrature,
        } => {
            let formats = Format::parse_list(&format)?;
            let mut doc = parse_model(&model).map_err(Error::at("input"))?;
            if let Some(n) = modes {
                doc.analysis.n_modes = n;
            }
            if let Some(l) = refine {
                doc.analysis.refine = l;
                doc.analysis.divisions = None;
            }
            if let Some(code) = bc {
                doc.boundary = Boundary::parse(&code)?;
            }
            if quadrature.is_some() {
                doc.analysis.quadrature = quadrature;
            }
            doc.validate().map_err(Error::at("input"))?;
            let result = run_analysis(&doc, &RunOptions::default())?;
            match out {
                Some(dir) => {
                    for p in write_results(&result, &dir, &formats)? {
                        eprintln!("wrote {}", p.display());
                    }
                }
                None => print!("{}", frequencies_csv(&result.omega, &result.omega_tilde)),
            }
        }
        Command::Validate { model } => {
            let doc = parse_model(&model).map_err(Error::at("input"))?;
            println!(
                "ok: {}",
                if doc.name.is_empty() {
                    model.display().to_string()
                } else {
                    doc.name
                }
            );
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => {
                for n in fixtures::names() {
                    println!("{n}");
                }
            }
            FixtureAction::Emit { name } => println!("{}", fixtures::fixture(&name)?.to_json()),
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
