#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

/// Self-cleaning scratch directory under the system temp dir.
pub struct TempDir {
    path: PathBuf,
}

impl TempDir {
    pub fn new(label: &str) -> Self {
        static COUNTER: AtomicUsize = AtomicUsize::new(0);
        let path = std::env::temp_dir().join(format!(
            "phdnas-{label}-{}-{}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::create_dir_all(&path).expect("create temp dir");
        TempDir { path }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.path.join(name)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.path);
    }
}

/// Run the phdnas binary with the given arguments.
pub fn phdnas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phdnas"))
        .args(args)
        .output()
        .expect("phdnas binary runs")
}

/// Run the phdnas binary with an extra environment variable.
pub fn phdnas_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phdnas"))
        .args(args)
        .env(key, value)
        .output()
        .expect("phdnas binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited normally")
}

/// Generate a synthetic benchmark CSV into `dir` and return its path.
pub fn generate_bench(dir: &TempDir, seed: u64) -> PathBuf {
    let path = dir.file("bench.csv");
    let output = phdnas(&[
        "gen-bench",
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0, "{}", stderr_of(&output));
    path
}
