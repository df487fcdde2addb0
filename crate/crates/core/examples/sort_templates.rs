// SPDX-License-Identifier: Apache-2.0

//! Prints each sort's parameters and the query generated for sample values.
//!
//!     cargo run --example sort_templates

use soquet::sorts::{generate, SortKind, SortSpec};

fn sample(kind: SortKind) -> Vec<(&'static str, &'static str)> {
    match kind {
        SortKind::CB | SortKind::CE => vec![("context", "package app"), ("target", "Log.write(..)")],
        SortKind::ER | SortKind::RL => vec![("type", "Wrapper"), ("reference", "inner")],
        SortKind::AV => vec![("type", "Command")],
        SortKind::EC => vec![("caller", "Job.run(..)"), ("arg_name", "monitor")],
        SortKind::RSI => vec![("role", "Listener"), ("context", "package app")],
        SortKind::SC => vec![("context", "Editor+"), ("role", "Tool")],
        SortKind::PE => vec![("source", "package model"), ("target", "package ui")],
        SortKind::EP => vec![("seed", "Stream.read()"), ("exception", "IOException"), ("context", "package io")],
        SortKind::DE => vec![("context", "Storable+"), ("member", "new()")],
        SortKind::DBE => vec![("type", "Counter"), ("field", "count")],
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for kind in SortKind::ALL {
        let params: Vec<String> = kind
            .params()
            .iter()
            .map(|(name, required)| if *required { name.to_string() } else { format!("{name}?") })
            .collect();
        println!("== {} ({}): {}", kind.code(), kind.title(), params.join(", "));
        let generated = generate(&SortSpec::new(kind, sample(kind)))?;
        println!("{}\n", generated.query);
    }
    Ok(())
}
