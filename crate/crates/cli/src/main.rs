mod cli;
mod output;
mod parse;
mod run;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use helidot_core::{Config, Result};
use serde_json::json;

use cli::{Cli, Cmd};
use output::{Output, RunConfig};

fn execute(cli: Cli) -> Result<serde_json::Value> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    // calculators only write files when asked to
    let out = match (&cli.out, &cli.cmd) {
        (None, Cmd::Calc(_)) => None,
        (None, _) => Some(PathBuf::from(".")),
        (Some(p), _) => Some(p.clone()),
    };
    let run = RunConfig {
        command: cli.cmd.name(),
        args: serde_json::to_value(&cli.cmd)?,
        inputs: run::inputs(&cli.cmd),
        out: out.as_ref().map(|p| p.display().to_string()),
        seed: cli.seed,
        formats: cli.format.clone(),
        config_path: cli.config.as_ref().map(|p| p.display().to_string()),
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut ctx = run::Ctx {
        cfg: &cfg,
        seed: cli.seed,
        out: Output::new(out.as_deref(), &run)?,
    };
    run::dispatch(&cli.cmd, &mut ctx)
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim()),
    };
    match execute(cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).unwrap_or_default();
            let _ = writeln!(std::io::stdout(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
