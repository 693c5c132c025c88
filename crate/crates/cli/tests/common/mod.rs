#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use rabi_aa_cli::{compute, Settings, Table};

/// Reference data sets: file stem and the command that produces it.
pub const REFERENCE_SETS: &[(&str, &str)] = &[
    ("block_n2_a_plus", "dynamics"),
    ("block_n2_a_zero", "dynamics"),
    ("block_n2_a_minus", "dynamics"),
    ("block_weights", "spectrum"),
    ("collapse_revival", "revival"),
    ("preservation_alpha2_36", "coherent"),
    ("preservation_alpha2_55", "coherent"),
];

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn regenerate(name: &str, command: &str) -> String {
    let s = Settings::from_file(&golden_dir().join(format!("{name}.conf"))).unwrap();
    compute(command, &s).unwrap().to_csv_string()
}

pub fn stored(name: &str) -> Option<String> {
    fs::read_to_string(golden_dir().join(format!("{name}.csv"))).ok()
}

pub fn settings(pairs: &[(&str, &str)]) -> Settings {
    let mut s = Settings::default();
    for (k, v) in pairs {
        s.set(k, v).unwrap();
    }
    s
}

pub fn run(command: &str, pairs: &[(&str, &str)]) -> Table {
    compute(command, &settings(pairs)).unwrap()
}
