#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

pub fn daia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_daia"))
        .args(args)
        .output()
        .expect("daia runs")
}

pub fn ok(args: &[&str]) -> String {
    let out = daia(args);
    assert!(
        out.status.success(),
        "daia {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// A directory that outlives the test binary's threads.
pub fn scratch() -> PathBuf {
    tempfile::tempdir().unwrap().keep()
}

/// Model trained once per test binary on a synthetic game session.
pub fn model() -> &'static Path {
    static MODEL: OnceLock<PathBuf> = OnceLock::new();
    MODEL.get_or_init(|| {
        let dir = scratch();
        let (game, phases, model) = (dir.join("game.ndjson"), dir.join("phases.ndjson"), dir.join("model.txt"));
        ok(&["synth", "--game", "5000", "--seed", "42", "--out", p(&game), "--phases", p(&phases)]);
        ok(&["train", "--input", p(&game), "--phases", p(&phases), "--out", p(&model)]);
        model
    })
}
