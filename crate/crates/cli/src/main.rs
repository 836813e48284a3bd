use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use regkit::corpus::run_corpus;
use regkit::{parse_session_with, run, RunFlags};
use regkit_core::{Exec, FieldSpec};

#[derive(Parser)]
#[command(name = "regkit", version, about = "Castelnuovo-Mumford regularity workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Fp32003,
    Qq,
}

#[derive(Subcommand)]
enum Command {
    /// Run one script.
    Run {
        file: PathBuf,
        /// Coefficient field for every ring in the script.
        #[arg(long, value_enum)]
        field: Option<FieldArg>,
        /// Default largest power for powers, linear-powers and rho.
        #[arg(long)]
        max_v: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Record wall-clock times in the JSON report.
        #[arg(long)]
        timing: bool,
    },
    /// Run every *.rk script in a directory.
    Corpus {
        dir: PathBuf,
        #[arg(long)]
        max_v: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
}

fn flags(max_v: Option<i64>, timing: bool) -> Result<RunFlags> {
    if max_v.is_some_and(|v| v < 1) {
        anyhow::bail!("--max-v must be at least 1");
    }
    Ok(RunFlags { max_v, timing, ..RunFlags::default() })
}

fn write(path: &PathBuf, body: &str) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn main_inner() -> Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, field, max_v, json, csv, timing } => {
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let field = field.map(|f| match f {
                FieldArg::Fp32003 => FieldSpec::Prime(32003),
                FieldArg::Qq => FieldSpec::Rationals,
            });
            let script = match parse_session_with(&text, field) {
                Ok(s) => s,
                Err(d) => {
                    eprintln!("{}:{d}", file.display());
                    return Ok(1);
                }
            };
            let name = file.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
            let doc = run(&script, &name, &flags(max_v, timing)?);
            print!("{}", doc.to_text());
            if let Some(p) = json {
                write(&p, &doc.to_json())?;
            }
            if let Some(p) = csv {
                write(&p, &doc.to_csv())?;
            }
            Ok(doc.exit_code())
        }
        Command::Corpus { dir, max_v, json, timing } => {
            let report = run_corpus(&dir, &flags(max_v, timing)?, Exec::default()).with_context(|| format!("reading {}", dir.display()))?;
            print!("{}", report.table());
            if let Some(p) = json {
                write(&p, &report.to_json())?;
            }
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
