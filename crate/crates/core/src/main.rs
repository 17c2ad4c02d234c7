use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use secant::field::MERSENNE_61;
use secant::report::{
    cmd_analyze, cmd_list_catalog, cmd_verify_paper, render_analysis, render_catalog,
    render_verify, Format, RunConfig,
};
use secant::{Error, Mode};

/// Exact secant-variety invariants of parametrized projective varieties.
#[derive(Parser)]
#[command(name = "secant", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one catalog variety.
    Analyze {
        /// Catalog key, e.g. veronese:5, segre:2,2, bns:5,1, cone:segre:2,2
        #[arg(long)]
        variety: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the full verification matrix.
    VerifyPaper {
        #[command(flatten)]
        run: RunArgs,
    },
    /// List catalog keys and their known invariants.
    ListCatalog {
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = MERSENNE_61)]
    prime: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::PrimeField)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PrimeField,
    Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Text => Format::Text,
        }
    }
}

impl RunArgs {
    fn config(&self, variety: Option<String>) -> RunConfig {
        RunConfig {
            variety,
            trials: self.trials,
            prime: self.prime,
            seed: self.seed,
            mode: match self.mode {
                ModeArg::PrimeField => Mode::PrimeField,
                ModeArg::Rational => Mode::Rational,
            },
            format: self.format.into(),
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_degeneracy() {
        EXIT_DEGENERATE
    } else {
        EXIT_USAGE
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { variety, run } => {
            let config = run.config(Some(variety));
            match cmd_analyze(&config) {
                Ok(doc) => {
                    print!("{}", render_analysis(&doc, config.format));
                    if doc.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(EXIT_CHECK_FAILED)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::VerifyPaper { run } => {
            let config = run.config(None);
            match cmd_verify_paper(&config) {
                Ok(doc) => {
                    print!("{}", render_verify(&doc, config.format));
                    if doc.passed {
                        ExitCode::SUCCESS
                    } else {
                        for r in doc.failing() {
                            eprintln!("failing row: {} {}", r.criterion, r.name);
                        }
                        ExitCode::from(EXIT_CHECK_FAILED)
                    }
                }
                Err(e) => fail(e),
            }
        }
        Command::ListCatalog { format } => {
            print!("{}", render_catalog(&cmd_list_catalog(), format.into()));
            ExitCode::SUCCESS
        }
    }
}
