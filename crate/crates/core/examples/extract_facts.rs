// SPDX-License-Identifier: Apache-2.0

//! Extracts a source tree and prints fact counts, warnings and the first
//! lines of the facts file.
//!
//!     cargo run --example extract_facts [dir]

use std::path::PathBuf;

use soquet::facts::export_facts;
use soquet::frontend::extract_dir;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns/observer"));
    let x = extract_dir(&dir, "example")?;
    let store = &x.store;
    println!("{} entities, {} facts, hash {}", store.entity_count(), store.facts().len(), store.hash());
    for (kind, n) in store.fact_counts() {
        println!("  {kind:?}: {n}");
    }
    print!("{}", x.diagnostics());

    let mut out = Vec::new();
    export_facts(store, &mut out)?;
    for line in String::from_utf8(out)?.lines().take(8) {
        println!("{line}");
    }
    Ok(())
}
