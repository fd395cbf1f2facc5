//! `homkk`: command-line front end for homkk-core.

mod commands;
mod text;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use commands::{Context, Failure, Verb};
use homkk_core::json::Decoder;

const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "homkk",
    version,
    about = "Obstruction classes and resolutions over Z, unique path spaces and filtrated K-theory"
)]
struct Args {
    verb: Verb,
    /// Input JSON documents, in order; `-` reads standard input.
    #[arg(short, long = "input")]
    input: Vec<PathBuf>,
    /// Further inputs, appended after those given with `--input`.
    #[arg(value_name = "FILE")]
    files: Vec<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Recorded in the report; every computation is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Largest number of points accepted for filtrated modules.
    #[arg(long, default_value_t = 6)]
    max_n: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn read_input(path: &PathBuf, i: usize) -> Result<Value, Failure> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::invalid(format!("input[{i}]"), format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::invalid(
            format!("input[{i}] line {} column {}", e.line(), e.column()),
            format!("malformed JSON: {e}"),
        )
    })
}

fn max_matrix() -> Result<usize, Failure> {
    match std::env::var("HOMKK_MAX_MATRIX") {
        Err(_) => Ok(usize::MAX),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::invalid("HOMKK_MAX_MATRIX", format!("not a size: {s:?}"))),
    }
}

fn execute(args: &Args) -> (Vec<Value>, Result<Value, Failure>) {
    let mut inputs = Vec::new();
    for (i, p) in args.input.iter().chain(&args.files).enumerate() {
        match read_input(p, i) {
            Ok(v) => inputs.push(v),
            Err(f) => return (inputs, Err(f)),
        }
    }
    let ctx = match max_matrix() {
        Ok(m) => Context {
            decoder: Decoder::with_max_dim(m),
            max_n: args.max_n,
        },
        Err(f) => return (inputs, Err(f)),
    };
    let out = commands::run(args.verb, &inputs, &ctx);
    (inputs, out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (inputs, outcome) = execute(&args);
    let (code, status, body) = match outcome {
        Ok(v) => (0, "ok", ("result", v)),
        Err(f) => (f.exit_code, f.kind(), ("error", f.to_json())),
    };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": args.verb.name(),
        "status": status,
        "exit_code": code,
        "options": { "seed": args.seed, "max_n": args.max_n },
        "inputs": inputs,
    });
    report[body.0] = body.1;
    let rendered = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => text::render(&report),
    };
    let written = match &args.output {
        Some(p) => std::fs::write(p, &rendered).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("homkk: {e}");
        return ExitCode::from(2);
    }
    if code != 0 {
        if let Some(e) = report.get("error") {
            eprintln!(
                "homkk: {} at {}: {}",
                status,
                e["location"].as_str().unwrap_or(""),
                e["message"].as_str().unwrap_or("")
            );
        }
    }
    ExitCode::from(code as u8)
}
