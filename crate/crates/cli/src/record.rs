//! Flat JSON records: the result's own fields at the top level, followed by
//! `config.*` keys echoing the resolved configuration and the tool version.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn flatten_into(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten_into(&format!("{prefix}.{k}"), v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

/// `result`'s fields, then `config` flattened under `config.`, then `command` and `tool_version`.
pub fn flat_record<R: Serialize, C: Serialize>(command: &str, result: &R, config: &C) -> Result<Value, CliError> {
    let mut out = match serde_json::to_value(result).map_err(|e| CliError::Numerical(e.to_string()))? {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    let config = serde_json::to_value(config).map_err(|e| CliError::Numerical(e.to_string()))?;
    flatten_into("config", &config, &mut out);
    out.insert("command".into(), Value::String(command.into()));
    out.insert("tool_version".into(), Value::String(VERSION.into()));
    Ok(Value::Object(out))
}

pub fn write_json(path: &Path, record: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(record).map_err(|e| CliError::Numerical(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_config_is_flattened() {
        let r = flat_record("x", &json!({"A": 1.5}), &json!({"group": {"vol": 2.0}, "U": 17})).unwrap();
        assert_eq!(r["A"], json!(1.5));
        assert_eq!(r["config.group.vol"], json!(2.0));
        assert_eq!(r["config.U"], json!(17));
        assert_eq!(r["tool_version"], json!(VERSION));
    }
}
