use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pvss::{CliError, Format};

#[derive(Parser)]
#[command(name = "pvss", version, about = "K-theory of Z^n crossed products from K-theoretic action data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Machine,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => Format::Table,
            FormatArg::Machine => Format::Machine,
        }
    }
}

#[derive(clap::Args)]
struct Output {
    #[arg(long, value_enum, default_value = "table")]
    format: FormatArg,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the pages E1 through E∞.
    Pages {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
        /// Treat a violated pointwise-inner constraint as an error.
        #[arg(long)]
        strict: bool,
    },
    /// Compute K0 and K1 of the crossed product.
    Crossed {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        strict: bool,
    },
    /// Solve the PV sequence of a single automorphism (n = 1).
    Pv {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Group cohomology of Z^n with coefficients in K0 and K1.
    Cohomology {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Smith normal form of a matrix given as a JSON array of rows.
    Snf {
        /// Input file, or `-` for stdin.
        #[arg(default_value = "-")]
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Parse and validate a system file.
    Validate { file: PathBuf },
}

fn read_input(path: &PathBuf) -> Result<Vec<u8>, CliError> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Parse(format!("reading stdin: {e}")))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| CliError::Parse(format!("reading {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), CliError> {
    Ok(match cli.command {
        Command::Pages { file, output, strict } => {
            (pvss::pages(&read_input(&file)?, output.format.into(), strict)?, output.out)
        }
        Command::Crossed { file, output, strict } => {
            (pvss::crossed(&read_input(&file)?, output.format.into(), strict)?, output.out)
        }
        Command::Pv { file, output } => (pvss::pv(&read_input(&file)?, output.format.into())?, output.out),
        Command::Cohomology { file, output } => {
            (pvss::cohomology(&read_input(&file)?, output.format.into())?, output.out)
        }
        Command::Snf { file, output } => (pvss::snf(&read_input(&file)?, output.format.into())?, output.out),
        Command::Validate { file } => (pvss::validate(&read_input(&file)?)?, None),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli))
        .unwrap_or_else(|_| Err(CliError::Internal("unexpected panic".into())));
    match outcome {
        Ok((text, None)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok((text, Some(path))) => match std::fs::write(&path, text) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: writing {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
