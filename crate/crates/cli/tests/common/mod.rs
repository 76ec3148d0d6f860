//! Helpers shared by the command-line test targets.

#![allow(dead_code)]

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}\n{}", self.stdout, self.stderr))
    }
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spt-z2")
}

pub fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

/// Run with `SPT_Z2_CONFIG` cleared unless given in `env`.
pub fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(bin());
    cmd.args(args).env_remove("SPT_Z2_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(name)).expect("schema file");
    serde_json::from_str(&text).expect("schema is JSON")
}

const BASE: &str = "https://spt-z2.invalid/schemas/";

/// Validator for one shipped schema, with its siblings registered for `$ref`.
pub fn validator(name: &str) -> jsonschema::Validator {
    let mut opts = jsonschema::options();
    for sibling in ["tuple_file", "vector_file", "scan_spec", "report"] {
        let file = format!("{sibling}.schema.json");
        let resource = jsonschema::Resource::from_contents(load(&file)).expect("valid resource");
        opts.with_resource(format!("{BASE}{file}"), resource);
    }
    opts.build(&load(name)).expect("schema compiles")
}

pub fn assert_valid(v: &jsonschema::Validator, instance: &Value) {
    let errors: Vec<String> =
        v.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}
