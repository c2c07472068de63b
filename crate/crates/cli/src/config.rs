//! Flat `key=value` job files.
//!
//! Each key is a long flag name without the leading dashes. Blank lines and
//! lines starting with `#` are ignored. Entries are inserted ahead of the
//! command-line flags, so flags given on the command line win.

use std::ffi::OsString;
use std::fs;

use crate::CliError;

/// Parses a job file body into `--key=value` arguments.
pub fn parse(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got {line:?}", n + 1)))?;
        let key = key.trim();
        if key.is_empty() || key == "config" || key.starts_with('-') {
            return Err(CliError::Usage(format!("config line {}: invalid key {key:?}", n + 1)));
        }
        out.push(format!("--{key}={}", value.trim()));
    }
    Ok(out)
}

/// Replaces `--config FILE` with the file's entries, placed right after the
/// subcommand name.
pub fn expand_args(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let text = arg.to_string_lossy().into_owned();
        if text == "--config" {
            let value = it.next().ok_or_else(|| CliError::Usage("--config needs a file".into()))?;
            path = Some(value.to_string_lossy().into_owned());
        } else if let Some(value) = text.strip_prefix("--config=") {
            path = Some(value.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let entries = parse(&text)?;
    // argv[0] is the program and argv[1] the subcommand
    let at = rest.len().min(2);
    rest.splice(at..at, entries.into_iter().map(OsString::from));
    Ok(rest)
}
