#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

pub const CAUCHY: &str =
    r#"{"family":"stable_asymmetric","alpha":1.0,"c_plus":0.3183098861837907,"c_minus":0.3183098861837907,"d":1}"#;
pub const ASYM: &str = r#"{"family":"stable_asymmetric","alpha":1.2,"c_plus":2.0,"c_minus":1.0,"d":1}"#;
pub const POISSON: &str =
    r#"{"family":"compound_poisson","rate":3.0,"jumps":{"kind":"uniform","lo":1.0,"hi":2.0},"d":1}"#;

pub struct Run {
    pub out: Output,
    pub elapsed: Duration,
}

impl Run {
    pub fn code(&self) -> i32 {
        self.out.status.code().unwrap_or(-1)
    }

    pub fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.out.stderr).into_owned()
    }
}

pub fn cli(args: &[&str]) -> Run {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_hardy-stein"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        out,
        elapsed: start.elapsed(),
    }
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn report(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

pub fn f(v: &Value, path: &str) -> f64 {
    v.pointer(path).and_then(Value::as_f64).unwrap_or_else(|| panic!("no number at {path}"))
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
