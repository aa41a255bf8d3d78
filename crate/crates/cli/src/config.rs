//! `--config FILE`: a JSON object whose keys are long flag names.
//!
//! The stored flags are spliced in right after the subcommand, so anything
//! given on the command line overrides them (clap keeps the last occurrence).

use std::fs;

use serde_json::Value;

/// Returns the argument vector with the config file expanded and the
/// `--config` flag itself removed.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a file argument")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_owned());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path}: expected a JSON object"));
    };
    let mut flags = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => flags.push(flag),
            Value::String(s) => flags.extend([flag, s]),
            Value::Number(n) => flags.extend([flag, n.to_string()]),
            Value::Array(items) => {
                let parts: Result<Vec<String>, String> = items
                    .into_iter()
                    .map(|i| match i {
                        Value::String(s) => Ok(s),
                        Value::Number(n) => Ok(n.to_string()),
                        other => Err(format!("config {path}: unsupported list entry {other} for `{key}`")),
                    })
                    .collect();
                flags.extend([flag, parts?.join(",")]);
            }
            Value::Object(_) => return Err(format!("config {path}: nested object for `{key}`")),
        }
    }
    // The subcommand is the first argument that is not a flag.
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .ok_or("--config needs a subcommand")?;
    rest.splice(at..at, flags);
    Ok(rest)
}
