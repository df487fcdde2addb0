// SPDX-License-Identifier: Apache-2.0

//! Instantiates sorts over the corpus fixtures and prints their tuples.
//!
//!     cargo run --example sort_instances

use std::path::Path;

use soquet::facts::FactStore;
use soquet::frontend::extract_dir;
use soquet::sorts::{cb_query, dbe_query, de_query, ec_query, ep_query, instantiate, pe_query, SortInstance, SortKind, SortSpec};

fn load(rel: &str) -> Result<FactStore, Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel);
    Ok(extract_dir(&dir, rel.rsplit('/').next().unwrap())?.store)
}

fn show(inst: &SortInstance) {
    println!("{} ({} tuples)", inst.name, inst.result.len());
    for t in &inst.result {
        println!("  {} -> {}", t.source, t.target);
    }
    if let Some(obligations) = &inst.obligations {
        for id in obligations {
            println!("  missing: {id}");
        }
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let observer = load("patterns/observer")?;
    show(&cb_query(&observer, "draw.Figure+", "Figure.notifyListeners()")?);

    // The same thing through the generic entry point.
    let spec = SortSpec::new(SortKind::RSI, [("role", "FigureChangeListener"), ("context", "package draw")]);
    show(&instantiate(&observer, &[], "listeners", &spec)?);

    show(&ec_query(&load("fixtures/chain10")?, "Steps.m1(..)", "monitor", "Monitor", true)?);
    show(&ep_query(&load("fixtures/rethrow")?, "Stream.read()", "IOException", "package io", true)?);
    show(&pe_query(&load("fixtures/beans")?, "Bean+", "package java.awt", false)?);
    show(&de_query(&load("fixtures/storable")?, "class Storable+", "new()")?);
    show(&dbe_query(&load("fixtures/counter")?, "Counter", "counter", None)?);
    Ok(())
}
