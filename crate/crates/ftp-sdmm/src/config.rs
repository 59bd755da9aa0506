//! `key=value` config files. Keys are long flag names of the chosen
//! subcommand; flags given on the command line win.

use std::collections::HashSet;
use std::ffi::OsString;

use clap::Command;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("config line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("config file needs a subcommand on the command line")]
    NoSubcommand,
    #[error("reading {path}: {reason}")]
    Io { path: String, reason: String },
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are ignored.
pub fn parse(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: idx + 1 })?;
        let key = k.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(ConfigError::Syntax { line: idx + 1 });
        }
        out.push((idx + 1, key.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn long_names(arg: &clap::Arg) -> Vec<String> {
    arg.get_long().into_iter().chain(arg.get_all_aliases().unwrap_or_default()).map(str::to_string).collect()
}

/// Removes `--config PATH` (or `--config=PATH`) from `args`, returning its value.
pub fn take_config_path(args: &mut Vec<OsString>) -> Option<OsString> {
    let pos = args.iter().position(|a| a == "--config" || a.to_string_lossy().starts_with("--config="))?;
    let flag = args.remove(pos);
    if let Some(v) = flag.to_string_lossy().strip_prefix("--config=") {
        return Some(v.into());
    }
    (pos < args.len()).then(|| args.remove(pos))
}

/// Inserts the file's settings right after the subcommand name, skipping any
/// key whose flag (or an alias of it) already appears on the command line.
pub fn merge(cmd: &Command, args: &[OsString], text: &str) -> Result<Vec<OsString>, ConfigError> {
    let entries = parse(text)?;
    let sub_pos = args
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, a)| cmd.find_subcommand(a.to_string_lossy().as_ref()).is_some())
        .map(|(i, _)| i)
        .ok_or(ConfigError::NoSubcommand)?;
    let sub = cmd.find_subcommand(args[sub_pos].to_string_lossy().as_ref()).unwrap();

    let given: HashSet<String> = args[sub_pos + 1..]
        .iter()
        .filter_map(|a| {
            let s = a.to_string_lossy();
            let name = s.strip_prefix("--")?;
            Some(name.split('=').next().unwrap_or(name).to_string())
        })
        .collect();

    let mut injected = Vec::new();
    for (line, key, value) in entries {
        let arg = sub
            .get_arguments()
            .find(|a| long_names(a).contains(&key))
            .ok_or_else(|| ConfigError::UnknownKey { line, key: key.clone() })?;
        if long_names(arg).iter().any(|n| given.contains(n)) {
            continue;
        }
        let long = arg.get_long().unwrap_or(&key);
        let takes_value = arg.get_action().takes_values();
        if takes_value {
            injected.push(OsString::from(format!("--{long}={value}")));
        } else if matches!(value.as_str(), "true" | "yes" | "1") {
            injected.push(OsString::from(format!("--{long}")));
        }
    }
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[sub_pos + 1..]);
    Ok(out)
}
