// SPDX-License-Identifier: Apache-2.0

//! Composes every corpus pattern from its bindings file into one model and
//! prints the tree.
//!
//!     cargo run --example compose_pattern [pattern]

use std::fs;
use std::path::Path;

use soquet::cli::report::render_tree;
use soquet::frontend::extract_dir;
use soquet::model::ConcernModel;
use soquet::sorts::{BindingsFile, PATTERNS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let only = std::env::args().nth(1);
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns");
    for row in &PATTERNS {
        if only.as_deref().is_some_and(|p| p != row.name) {
            continue;
        }
        let dir = root.join(row.name);
        let store = extract_dir(&dir, row.name)?.store;
        let bindings = BindingsFile::from_toml(&fs::read_to_string(dir.join("bindings.toml"))?)?;
        for planned in bindings.plan()? {
            println!("{}: {} {:?}", row.name, planned.name, planned.spec.params);
        }
        let mut model = ConcernModel::new(row.name);
        model.add_bindings(&store, model.root(), row.name, &bindings)?;
        println!("{}", render_tree(&model));
    }
    Ok(())
}
