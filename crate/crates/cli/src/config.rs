//! `--config FILE`: a JSON object whose keys are subcommand flag names
//! (`n_max` or `n-max` for `--n-max`). Its entries are spliced into the
//! argument list just after the subcommand, ahead of the user's own flags,
//! so that flags given on the command line take precedence.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::Value;

const COMMANDS: [&str; 7] = ["gk", "prob", "variance", "curve", "budget", "verify", "birthday"];
/// Keys holding paths, resolved against the config file's directory.
const PATH_KEYS: [&str; 2] = ["rho_file", "network"];

pub fn expand(raw: Vec<OsString>) -> Result<Vec<OsString>> {
    let Some(path) = config_path(&raw) else {
        return Ok(raw);
    };
    let Some(at) = subcommand_index(&raw) else {
        return Ok(raw);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let spliced = config_args(&value, &base)?;
    let mut out = raw[..=at].to_vec();
    out.extend(spliced.into_iter().map(OsString::from));
    out.extend_from_slice(&raw[at + 1..]);
    Ok(out)
}

fn config_path(raw: &[OsString]) -> Option<PathBuf> {
    let mut it = raw.iter().skip(1);
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(v));
        }
    }
    None
}

fn subcommand_index(raw: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < raw.len() {
        let s = raw[i].to_string_lossy();
        if s == "--threads" || s == "--config" {
            i += 2;
            continue;
        }
        if COMMANDS.contains(&s.as_ref()) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn config_args(value: &Value, base: &Path) -> Result<Vec<String>> {
    let Value::Object(map) = value else {
        bail!("config must be a JSON object of flag values");
    };
    let mut args = Vec::new();
    for (key, v) in map {
        let norm = key.replace('-', "_");
        if norm == "config" {
            bail!("config files cannot include other config files");
        }
        let flag = format!("--{}", norm.replace('_', "-"));
        let text = match v {
            Value::Null | Value::Bool(false) => continue,
            Value::Bool(true) => {
                args.push(flag);
                continue;
            }
            Value::Number(x) => x.to_string(),
            Value::String(s) if PATH_KEYS.contains(&norm.as_str()) && Path::new(s).is_relative() => {
                base.join(s).to_string_lossy().into_owned()
            }
            Value::String(s) => s.clone(),
            Value::Array(items) => items
                .iter()
                .map(|x| match x {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => bail!("config key {key}: arrays may hold numbers or strings only"),
                })
                .collect::<Result<Vec<_>>>()?
                .join(","),
            Value::Object(_) => bail!("config key {key}: nested objects are not supported"),
        };
        args.push(flag);
        args.push(text);
    }
    Ok(args)
}
