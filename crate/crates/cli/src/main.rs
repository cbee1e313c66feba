// negated float comparisons are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use clap::{Arg, ArgMatches, Command};
use commands::CliError;
use config::{Settings, UsageError};
use output::Outputs;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

fn cli() -> Command {
    let mut app = Command::new("eqmeasure")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Equilibrium measures of attractive-repulsive power-law interactions")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about) in config::COMMANDS {
        let mut sub = Command::new(*name).about(*about).arg(
            Arg::new("config")
                .long("config")
                .short('c')
                .value_name("FILE")
                .help("key = value settings; flags take precedence"),
        );
        for k in config::keys(name) {
            sub = sub.arg(k.arg());
        }
        app = app.subcommand(sub);
    }
    app
}

fn settings(name: &str, m: &ArgMatches) -> Result<Settings, UsageError> {
    let file = match m.get_one::<String>("config") {
        Some(p) => config::parse_file(PathBuf::from(p).as_path())?,
        None => BTreeMap::new(),
    };
    let flags = config::keys(name)
        .iter()
        .filter_map(|k| {
            m.get_one::<String>(k.name)
                .map(|v| (k.name.to_string(), v.clone()))
        })
        .collect();
    Settings::resolve(name, file, flags)
}

fn run(name: &str, s: &Settings) -> Result<String, CliError> {
    if s.has("threads") {
        let t = s.int("threads")?;
        if t > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| CliError::Usage(UsageError(vec![format!("threads: {e}")])))?;
        }
    }
    let mut out = Outputs::new(PathBuf::from(s.text("output")?), s.text("format")?)?;
    let result = match name {
        "solve" => commands::solve(s, &mut out),
        "solve2" => commands::solve2(s, &mut out),
        "potential" => commands::potential(s, &mut out),
        "scan-gap" => commands::scan_gap(s, &mut out),
        "contour" => commands::contour(s, &mut out),
        "simulate" => commands::simulate(s, &mut out),
        "validate" => commands::validate(s, &mut out),
        other => unreachable!("unregistered command {other}"),
    };
    // the manifest labels partial outputs of a failed run
    let err = result.as_ref().err().map(|e| e.to_string());
    out.finish(s, err.as_deref())?;
    result
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let outcome = settings(name, sub)
        .map_err(CliError::Usage)
        .and_then(|s| run(name, &s));
    match outcome {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("eqmeasure {name}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn command_definitions_are_consistent() {
        super::cli().debug_assert();
    }
}
