// SPDX-License-Identifier: Apache-2.0

//! Builds a concern model, saves and reloads it, then edits the source and
//! refreshes the leaves that went stale.
//!
//!     cargo run --example concern_model

use std::fs;
use std::path::Path;

use soquet::cli::report::render_tree;
use soquet::frontend::extract_sources;
use soquet::model::{load_model, save_model, ConcernModel};
use soquet::sorts::{cb_query, rsi_query};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns/observer/figures.oosl");
    let source = fs::read_to_string(path)?;
    let store = extract_sources(&[("figures.oosl".into(), source.clone())], "observer")?.store;

    let mut model = ConcernModel::new("figures");
    let observer = model.add_composite(model.root(), "observer")?;
    let roles = model.add_composite(observer, "roles")?;
    model.add_instance(roles, rsi_query(&store, &[], "FigureChangeListener", "package draw")?, "listeners")?;
    let notify = model.add_instance(observer, cb_query(&store, "draw.Figure+", "Figure.notifyListeners()")?, "notify")?;
    model.rename(notify, "notification")?;
    println!("{}", render_tree(&model));

    let text = save_model(&model);
    println!("saved {} bytes", text.len());
    let (reloaded, dangling) = load_model(&text, Some(&store))?;
    assert_eq!(reloaded, model);
    assert!(dangling.is_empty());

    // Drop one notification call and re-extract.
    let edited = source.replacen("{ notifyListeners(); }", "{ }", 1);
    let store2 = extract_sources(&[("figures.oosl".into(), edited)], "observer")?.store;
    let mut model = reloaded;
    let report = model.refresh(&store2, false);
    for diff in &report.diffs {
        println!("{}: +{} -{}", diff.path, diff.added.len(), diff.removed.len());
        for t in &diff.removed {
            println!("  removed {} -> {}", t.source, t.target);
        }
    }
    Ok(())
}
