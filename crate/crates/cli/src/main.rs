mod args;
mod output;
mod run;
mod specs;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::Value;

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for numerical failures reported by the library, 1 for everything else.
fn exit_code(e: &anyhow::Error) -> u8 {
    let numerical = e
        .chain()
        .find_map(|c| c.downcast_ref::<onskit_core::Error>())
        .is_some_and(onskit_core::Error::is_numerical);
    if numerical {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("--threads")?;
    }
    let command = match &cli.config {
        Some(path) => apply_config(path, cli.command)?,
        None => cli
            .command
            .ok_or_else(|| anyhow!("no subcommand given (see --help)"))?,
    };
    let outputs = command.execute()?;
    let manifest = output::write_all(
        &cli.out,
        &command.stem(),
        command.name(),
        command.parameters()?,
        &outputs,
    )?;
    println!("{}: {}", command.name(), outputs.headline);
    for p in &manifest.output_paths {
        log::info!("wrote {}", cli.out.join(p).display());
    }
    Ok(())
}

/// A manifest (`command` + `parameters`) replaces the command line; a flat
/// object overrides individual flags of the given subcommand.
fn apply_config(path: &Path, command: Option<Command>) -> Result<Command> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("--config: reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("--config: {} is not JSON", path.display()))?;
    let Value::Object(obj) = value else {
        bail!("--config: expected a JSON object");
    };
    if let (Some(Value::String(name)), Some(Value::Object(params))) =
        (obj.get("command"), obj.get("parameters"))
    {
        let params: BTreeMap<String, Value> = params.clone().into_iter().collect();
        if let Some(cmd) = &command {
            if cmd.name() != name {
                log::warn!(
                    "--config manifest runs '{name}', ignoring the '{}' subcommand",
                    cmd.name()
                );
            }
        }
        return Command::from_parameters(name, params);
    }
    let command =
        command.ok_or_else(|| anyhow!("--config with flat parameters needs a subcommand"))?;
    let mut params = command.parameters()?;
    for (k, v) in obj {
        match params.get_mut(&k) {
            Some(slot) => *slot = v,
            None => bail!("--config: '{k}' is not a parameter of '{}'", command.name()),
        }
    }
    Command::from_parameters(command.name(), params)
}
