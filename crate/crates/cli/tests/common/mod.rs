#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dvfs"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn dvfs")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

/// First whitespace-separated token of a line like `10.4205 ms`.
pub fn leading_number(line: &str) -> f64 {
    line.split_whitespace().next().and_then(|t| t.parse().ok()).unwrap_or_else(|| panic!("no number in {line:?}"))
}

/// AlexNet shipped profile restricted to the two-point scale {0.5, 1.0} GHz.
pub fn alexnet_two_step(dir: &Path) -> PathBuf {
    let mut doc = dvfs_core::builtin::alexnet_xavier_nx();
    doc.device.freq_scale_ghz = vec![0.5, 1.0];
    let path = dir.join("alexnet_two_step.json");
    std::fs::write(&path, doc.to_json()).unwrap();
    path
}

/// A trace CSV sampling `model` at `freqs`.
pub fn write_trace(dir: &Path, name: &str, rows: &[(String, f64, f64)]) -> PathBuf {
    let mut text = String::from("block,freq_ghz,latency_ms\n");
    for (block, f, t) in rows {
        text.push_str(&format!("{block},{f},{t}\n"));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}
