#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

use evl::events::Registry;
use evl::infer::Options;
use evl::{syntax, Mode, Term};

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus_path(name: &str) -> PathBuf {
    crate_dir().join("corpus").join(name)
}

pub fn fixture_path(name: &str) -> PathBuf {
    crate_dir().join("fixtures").join(name)
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap()
}

/// Every corpus file as `(name, text)`, sorted by name.
pub fn corpus() -> Vec<(String, String)> {
    let mut out: Vec<_> = std::fs::read_dir(crate_dir().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "evl"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        .collect();
    out.sort();
    out
}

/// Corpus programs that need lists or `letrec`.
pub const EXTENDED: [&str; 3] = ["avg.evl", "fire_pipeline.evl", "library.evl"];

/// Corpus files holding a type rather than a term.
pub const SCHEMES: [&str; 2] = ["ge_int.evl", "ge_poly.evl"];

pub fn mode_of(name: &str) -> Mode {
    if EXTENDED.contains(&name) {
        Mode::Extended
    } else {
        Mode::Core
    }
}

pub fn parse(src: &str) -> Term {
    syntax::parse(src, Mode::Core).unwrap_or_else(|d| panic!("{d}\n{src}"))
}

pub fn parse_ext(src: &str) -> Term {
    syntax::parse(src, Mode::Extended).unwrap_or_else(|d| panic!("{d}\n{src}"))
}

pub fn registry() -> Registry {
    Registry::load(&fixture_path("events.toml"), Mode::Extended).unwrap()
}

/// Prelude plus the fixture registry.
pub fn registry_options(mode: Mode) -> Options {
    Options { extra: registry().typing_env(), ..Options::new(mode) }
}

/// The weather fixture as parsed JSON objects.
pub fn weather() -> Vec<serde_json::Map<String, serde_json::Value>> {
    std::fs::read_to_string(fixture_path("weather.ndjson"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}
