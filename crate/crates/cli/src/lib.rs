//! Batch command line for credal optimal transport.
//!
//! [`run`] parses arguments, reads one JSON document, dispatches to a
//! solver and writes a [`output::ResultDocument`]. Exit codes: 0 success,
//! 2 input or schema error, 3 domain error, 4 size cap, 1 internal error or
//! failed verification.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;
pub mod schema;
pub mod verify;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::Path;

use clap::Parser;
use log::info;
use serde_json::Value;

use args::{Cli, Command, CommonArgs, Format, VerifyArgs};
use commands::Context;
use error::{CliError, CliResult, ErrorKind};
use output::{canonical_json, plot_csv, result_csv, Provenance, ResultDocument};

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().find(|l| !l.trim().is_empty()).unwrap_or("bad arguments");
            eprintln!("{}", CliError::input(first.trim_start_matches("error: ")));
            return ErrorKind::Input.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn read_input(path: Option<&Path>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    match path {
        Some(p) => {
            buf = std::fs::read(p)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?;
        }
        None => {
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| CliError::input(format!("cannot read standard input: {e}")))?;
        }
    }
    Ok(buf)
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::new(ErrorKind::Internal, format!("cannot write standard output: {e}")))
        }
    }
}

fn render(doc: &ResultDocument, format: Format) -> CliResult<String> {
    match format {
        Format::Json => canonical_json(doc),
        Format::Csv => Ok(result_csv(doc)),
    }
}

fn execute(command: &Command) -> CliResult<i32> {
    if let Command::Verify(v) = command {
        return verify(v);
    }
    let args = command.common();
    let input = read_input(args.input.as_deref())?;
    let ctx = Context { args, input: &input };
    info!("running {}", command.name());
    let doc = match command {
        Command::Choquet(_) => commands::choquet(&ctx),
        Command::Kantorovich(_) => commands::kantorovich(&ctx),
        Command::Monge(_) => commands::monge(&ctx),
        Command::Monge1d(_) => commands::monge1d(&ctx),
        Command::GaussMap(_) => commands::gauss_map(&ctx),
        Command::LowerKantorovich(_) => commands::lower_kantorovich(&ctx),
        Command::LowerMonge(_) => commands::lower_monge(&ctx),
        Command::Condition(_) => commands::condition(&ctx),
        Command::Wasserstein(_) => commands::wasserstein(&ctx),
        Command::Verify(_) => unreachable!("handled above"),
    }?;
    emit(&doc, args)?;
    Ok(0)
}

fn emit(doc: &ResultDocument, args: &CommonArgs) -> CliResult<()> {
    if let Some(path) = &args.emit_plot_data {
        let csv = plot_csv(doc)?;
        std::fs::write(path, csv)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    write_text(args.output.as_deref(), &render(doc, args.format)?)
}

fn verify(v: &VerifyArgs) -> CliResult<i32> {
    if v.trials == 0 {
        return Err(CliError::input("--trials must be positive"));
    }
    if let Some(t) = v.common.tolerance {
        if !(t >= 0.0) {
            return Err(CliError::input(format!("--tolerance must be nonnegative, got {t}")));
        }
    }
    let cfg = verify::VerifyConfig {
        seed: v.common.seed.unwrap_or(verify::DEFAULT_SEED),
        trials: v.trials,
        tolerance: v.common.tolerance,
    };
    let results = verify::run_suite(&v.suite, &cfg)?;
    let failures = results.iter().filter(|r| !r.passed).count();
    let mut lines = String::new();
    for r in &results {
        lines.push_str(&r.to_string());
        lines.push('\n');
    }
    let provenance = Provenance::new(v.suite.as_bytes(), Some(cfg.seed));
    let mut doc = ResultDocument::new("verify", failures as f64, provenance);
    doc.diag("suite", v.suite.as_str())
        .diag("trials", cfg.trials as u64)
        .diag("checks", results.len() as u64)
        .diag("failures", failures as u64)
        .diag(
            "results",
            serde_json::to_value(&results).unwrap_or(Value::Null),
        );
    write_text(None, &lines)?;
    if let Some(out) = &v.common.output {
        write_text(Some(out), &render(&doc, v.common.format)?)?;
    }
    Ok(if failures == 0 { 0 } else { 1 })
}
