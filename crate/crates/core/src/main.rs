use std::io::{ErrorKind, IsTerminal, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tangent_lift::cli::{execute, parse_model, Command, Format, Model};

/// Exact Poisson calculus on manifolds and their tangent bundles.
///
/// Reads a model from `--model FILE` or standard input, runs one command and
/// prints a model or a report. Exit status: 0 all checks pass, 1 a check
/// failed, 2 usage or input error.
#[derive(Parser, Debug)]
#[command(name = "tlift", version)]
struct Args {
    /// Model file; standard input is used when omitted.
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

fn load(args: &Args) -> Result<Model, String> {
    if args.command.is_standalone() {
        return Ok(Model::new());
    }
    let text = match &args.model {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None if std::io::stdin().is_terminal() => String::new(),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| format!("reading standard input: {e}"))?;
            s
        }
    };
    parse_model(&text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result =
        load(&args).and_then(|model| execute(&model, &args.command).map_err(|e| e.to_string()));
    match result {
        Ok(out) => {
            // a closed downstream pipe is not an error of ours
            if let Err(e) = writeln!(std::io::stdout(), "{}", out.render(args.format)) {
                if e.kind() != ErrorKind::BrokenPipe {
                    eprintln!("error: writing output: {e}");
                    return ExitCode::from(2);
                }
            }
            if out.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
