//! Report envelope shared by every command, and its rendering.

use serde::Serialize;
use serde_json::{json, Value};
use spt_z2::io;
use spt_z2::status::{HasStatus, Status};
use spt_z2::Config;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct Envelope {
    pub schema_version: &'static str,
    pub command: String,
    pub input_digest: String,
    pub config: Config,
    pub result: Value,
    pub status: Status,
}

impl Envelope {
    pub fn new(command: &str, digest: String, config: Config, result: Value, status: Status) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            input_digest: digest,
            config,
            result,
            status,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.status.code() as u8
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelopes serialize")
    }

    /// `key  value` lines for the scalar fields of the result.
    pub fn to_table(&self) -> String {
        let mut out = format!("{:<32}  {}\n", "command", self.command);
        out.push_str(&format!("{:<32}  {}\n", "status", self.status));
        flatten("", &self.result, &mut out);
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, item, out);
            }
        }
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            match parts {
                Some(p) if p.len() <= 12 => out.push_str(&format!("{prefix:<32}  [{}]\n", p.join(", "))),
                _ => out.push_str(&format!("{prefix:<32}  <{} items>\n", items.len())),
            }
        }
        other => out.push_str(&format!("{prefix:<32}  {}\n", scalar(other).unwrap_or_default())),
    }
}

/// `{"error": message, "kind": status, "details": …}` payload for a failure.
pub fn error_result<E: HasStatus + std::fmt::Display>(err: &E, details: Option<Value>) -> (Value, Status) {
    let status = err.status();
    let mut obj = json!({ "error": err.to_string(), "kind": status.as_str() });
    if let Some(d) = details {
        obj["details"] = d;
    }
    (obj, status)
}

pub fn digest_of(value: &Value) -> String {
    io::digest(value)
}
