//! Flags > config file > defaults, all as JSON objects.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::CliError;

pub fn read_json_file(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{} is not valid JSON: {e}", path.display())))
}

/// Inline JSON, or `@path` for a file.
pub fn json_arg(s: &str) -> Result<Value, String> {
    match s.strip_prefix('@') {
        Some(path) => read_json_file(Path::new(path)).map_err(|e| e.to_string()),
        None => serde_json::from_str(s).map_err(|e| format!("invalid JSON: {e}")),
    }
}

/// Flags that were given, as an object. Absent options serialize to null and
/// are dropped.
pub fn flag_map<T: Serialize>(args: &T) -> Result<Value, CliError> {
    let v = serde_json::to_value(args).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Value::Object(drop_nulls(v)))
}

fn drop_nulls(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

pub fn merge(defaults: &Value, file: Option<&Value>, command: &str, flags: &Value) -> Result<Value, CliError> {
    let mut out = match defaults {
        Value::Object(m) => m.clone(),
        _ => Map::new(),
    };
    if let Some(file) = file {
        let Value::Object(top) = file else {
            return Err(CliError::Usage("the config file must hold a JSON object".into()));
        };
        for (k, v) in top {
            if out.contains_key(k) && !v.is_null() {
                out.insert(k.clone(), v.clone());
            }
        }
        if let Some(section) = top.get(command) {
            let Value::Object(section) = section else {
                return Err(CliError::Usage(format!("config section `{command}` must be an object")));
            };
            for (k, v) in section {
                if !out.contains_key(k) {
                    return Err(CliError::Usage(format!("unknown key `{k}` in config section `{command}`")));
                }
                out.insert(k.clone(), v.clone());
            }
        }
    }
    if let Value::Object(f) = flags {
        for (k, v) in f {
            out.insert(k.clone(), v.clone());
        }
    }
    Ok(Value::Object(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn precedence() {
        let defaults = json!({"p": 3.0, "n": [8], "seed": 0});
        let file = json!({"p": 4.0, "seed": 7, "other": 1, "norm": {"n": [16]}});
        let flags = json!({"p": 5.0});
        let m = merge(&defaults, Some(&file), "norm", &flags).unwrap();
        assert_eq!(m, json!({"p": 5.0, "n": [16], "seed": 7}));
        let bad = json!({"norm": {"nope": 1}});
        assert!(merge(&defaults, Some(&bad), "norm", &json!({})).is_err());
    }
}
