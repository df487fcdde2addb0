// SPDX-License-Identifier: Apache-2.0

//! Shared helpers for integration tests: corpus loading, hand-traced
//! ledgers and a naive reference evaluator.

#![allow(dead_code)]

pub mod oracle;
pub mod random;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use soquet::facts::{EntityKind, FactKind, FactStore};
use soquet::frontend::{extract_dir, extract_sources};
use soquet::model::ConcernModel;
use soquet::query::Tuple;
use soquet::sorts::BindingsFile;

pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn pattern_dir(name: &str) -> PathBuf {
    corpus_root().join("patterns").join(name)
}

pub fn fixture_dir(name: &str) -> PathBuf {
    corpus_root().join("fixtures").join(name)
}

/// Every pattern program directory, sorted by name.
pub fn pattern_dirs() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(corpus_root().join("patterns"))
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs
}

pub fn dir_name(dir: &Path) -> String {
    dir.file_name().unwrap().to_string_lossy().into_owned()
}

/// Extracts a corpus directory; the project is named after the directory.
pub fn load(dir: &Path) -> FactStore {
    let ex = extract_dir(dir, &dir_name(dir)).unwrap_or_else(|e| panic!("{}: {e}", dir.display()));
    assert!(
        ex.warnings.is_empty(),
        "{}: unexpected warnings\n{}",
        dir.display(),
        ex.diagnostics()
    );
    ex.store
}

pub fn load_pattern(name: &str) -> FactStore {
    load(&pattern_dir(name))
}

pub fn load_fixture(name: &str) -> FactStore {
    load(&fixture_dir(name))
}

/// Extracts inline source text as a single file.
pub fn inline(src: &str) -> FactStore {
    let ex = extract_sources(&[("inline.oosl".to_string(), src.to_string())], "inline").unwrap();
    assert!(ex.warnings.is_empty(), "{}", ex.diagnostics());
    ex.store
}

pub fn bindings(dir: &Path) -> BindingsFile {
    let text = fs::read_to_string(dir.join("bindings.toml")).unwrap();
    BindingsFile::from_toml(&text).unwrap()
}

/// A model named after the corpus directory holding one composite for its
/// pattern, built from the checked-in bindings.
pub fn pattern_model(dir: &Path) -> (FactStore, ConcernModel) {
    let store = load(dir);
    let file = bindings(dir);
    let mut model = ConcernModel::new(&dir_name(dir));
    model
        .add_bindings(&store, model.root(), &file.pattern, &file)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()));
    (store, model)
}

#[derive(Debug, Deserialize)]
pub struct Ledger {
    #[serde(default)]
    pub entities: BTreeMap<String, usize>,
    #[serde(default)]
    pub facts: BTreeMap<String, usize>,
    #[serde(default)]
    pub instances: Vec<LedgerInstance>,
}

#[derive(Debug, Deserialize)]
pub struct LedgerInstance {
    pub name: String,
    pub kind: String,
    pub tuples: Vec<(String, String)>,
    pub obligations: Option<Vec<String>>,
}

pub fn ledger(dir: &Path) -> Ledger {
    let text = fs::read_to_string(dir.join("ledger.toml")).unwrap();
    toml::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
}

pub fn entity_counts(store: &FactStore) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for e in store.entities() {
        *out.entry(format!("{:?}", e.kind)).or_insert(0) += 1;
    }
    out
}

pub fn fact_counts(store: &FactStore) -> BTreeMap<String, usize> {
    store
        .fact_counts()
        .into_iter()
        .map(|(k, n)| (format!("{k:?}"), n))
        .collect()
}

/// `(source, target)` text pairs, sorted.
pub fn pairs(tuples: &[Tuple]) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = tuples
        .iter()
        .map(|t| (t.source.to_string(), t.target.to_string()))
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn sorted(mut v: Vec<(String, String)>) -> Vec<(String, String)> {
    v.sort();
    v
}

/// Facts of one kind as text pairs, straight from the store.
pub fn fact_pairs(store: &FactStore, kind: FactKind) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = store
        .facts_of_kind(kind)
        .iter()
        .map(|f| (f.source.to_string(), f.target.to_string()))
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn ids_of_kind(store: &FactStore, kind: EntityKind) -> Vec<String> {
    store
        .entities()
        .filter(|e| e.kind == kind)
        .map(|e| e.id.to_string())
        .collect()
}
