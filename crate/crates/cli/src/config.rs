//! `key = value` configuration files merged into the argument list.

use std::path::Path;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`, got {raw:?}", no + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(format!("line {}: invalid key {key:?}", no + 1));
        }
        out.push((key.to_owned(), value.trim().to_owned()));
    }
    Ok(out)
}

/// Removes `--config FILE` from `args` and returns the file, if present.
pub fn take_config_path(args: &mut Vec<String>) -> Result<Option<String>, String> {
    let mut found = None;
    let mut k = 1;
    while k < args.len() {
        if args[k] == "--config" {
            if k + 1 >= args.len() {
                return Err("--config needs a FILE".into());
            }
            found = Some(args.remove(k + 1));
            args.remove(k);
        } else if let Some(path) = args[k].strip_prefix("--config=") {
            found = Some(path.to_owned());
            args.remove(k);
        } else {
            k += 1;
        }
    }
    Ok(found)
}

/// Appends `--key value` for every entry whose flag is not already on the command line.
/// Boolean entries (`true`/`false`) add or omit the bare flag.
pub fn merge(args: &mut Vec<String>, entries: &[(String, String)]) {
    let present = |key: &str, args: &[String]| {
        let flag = format!("--{key}");
        let prefix = format!("--{key}=");
        args.iter().any(|a| *a == flag || a.starts_with(&prefix))
    };
    let mut extra = Vec::new();
    for (key, value) in entries {
        if present(key, args) {
            continue;
        }
        match value.as_str() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    args.extend(extra);
}

pub fn load(path: &Path) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}
