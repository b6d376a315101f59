//! `key=value` defaults merged into the command line before parsing.
//!
//! Keys are long flag names (`walk-steps` or `walk_steps`). A key only
//! applies when the flag is absent from the command line and none of the
//! flags it conflicts with is present. Keys belonging to a different
//! subcommand are ignored, so one file can serve them all.

use std::ffi::OsString;
use std::path::Path;

use clap::CommandFactory;

use crate::args::{Cli, Command};
use crate::CliError;

/// Pairs of flags that cannot be given together.
const EXCLUSIVE: [(&str, &str); 2] = [("auto", "truth-size"), ("seed-count", "seed-ratio")];

pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", idx + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", idx + 1)));
        }
        entries.push((key, value.trim().to_string()));
    }
    Ok(entries)
}

pub fn read_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

/// Finds `--config FILE` or `--config=FILE` without running the full parser.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn on_command_line(argv: &[OsString], long: &str) -> bool {
    let flag = format!("--{long}");
    let with_value = format!("--{long}=");
    argv.iter().any(|a| {
        let a = a.to_string_lossy();
        a == flag || a.starts_with(&with_value)
    })
}

/// Appends config entries as flags after the subcommand's own arguments.
pub fn merge(argv: Vec<OsString>, entries: &[(String, String)]) -> Result<Vec<OsString>, CliError> {
    let Some(sub_name) = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy())
        .find(|a| Command::NAMES.contains(&a.as_ref()))
    else {
        return Ok(argv);
    };
    let root = Cli::command();
    let sub = root.find_subcommand(sub_name.as_ref()).expect("known subcommand");
    let mut merged = argv.clone();
    for (key, value) in entries {
        if key == "config" {
            return Err(CliError::usage("config files cannot include other config files"));
        }
        let arg = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = arg else {
            let elsewhere = root
                .get_subcommands()
                .flat_map(|s| s.get_arguments())
                .any(|a| a.get_long() == Some(key.as_str()));
            if elsewhere {
                continue;
            }
            return Err(CliError::usage(format!("unknown config key {key:?}")));
        };
        let partner = EXCLUSIVE.iter().find_map(|&(a, b)| match key.as_str() {
            k if k == a => Some(b),
            k if k == b => Some(a),
            _ => None,
        });
        if on_command_line(&argv, key) || partner.is_some_and(|p| on_command_line(&argv, p)) {
            continue;
        }
        if arg.get_action().takes_values() {
            merged.push(format!("--{key}={value}").into());
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => merged.push(format!("--{key}").into()),
                "false" | "no" | "0" => {}
                other => {
                    return Err(CliError::usage(format!(
                        "config key {key}: expected a boolean, got {other:?}"
                    )))
                }
            }
        }
    }
    Ok(merged)
}
