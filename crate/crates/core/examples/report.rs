// SPDX-License-Identifier: Apache-2.0

//! Renders the observer model as text and as a structured document.
//!
//!     cargo run --example report [--structured]

use std::fs;
use std::path::Path;

use soquet::cli::report::{render_structured, render_text};
use soquet::frontend::extract_dir;
use soquet::model::ConcernModel;
use soquet::sorts::BindingsFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns/observer");
    let store = extract_dir(&dir, "observer")?.store;
    let bindings = BindingsFile::from_toml(&fs::read_to_string(dir.join("bindings.toml"))?)?;
    let mut model = ConcernModel::new("observer");
    model.add_bindings(&store, model.root(), "observer", &bindings)?;
    model.check(&store);
    if std::env::args().any(|a| a == "--structured") {
        println!("{}", render_structured(&model));
    } else {
        print!("{}", render_text(&model));
    }
    Ok(())
}
