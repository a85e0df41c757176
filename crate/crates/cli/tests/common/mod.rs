#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

pub fn fixture(rel: &str) -> String {
    repo_root().join("fixtures").join(rel).to_string_lossy().into_owned()
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}", self.stdout))
    }
}

pub fn ore_command() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ore"));
    cmd.env_remove("RUST_LOG");
    cmd
}

pub fn ore<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let Output { status, stdout, stderr } = ore_command().args(args).output().expect("ore runs");
    Run {
        code: status.code().expect("exited normally"),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn load(name: &str) -> Value {
    let path = repo_root().join("docs/schemas").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap()
}

/// Checks `value` against `docs/schemas/<name>.json`.
pub fn schema_check(name: &str, value: &Value) -> Result<(), String> {
    let base = "file:///schemas/";
    let finding = jsonschema::Resource::from_contents(load("finding.json")).map_err(|e| e.to_string())?;
    let validator = jsonschema::options()
        .with_base_uri(format!("{base}{name}.json"))
        .with_resource(format!("{base}finding.json"), finding)
        .build(&load(&format!("{name}.json")))
        .map_err(|e| format!("schema {name}: {e}"))?;
    let problems: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems.join("; "))
    }
}
