// SPDX-License-Identifier: Apache-2.0

//! Defines a role over `Circle.clone()` and finds every type playing it.
//!
//!     cargo run --example virtual_interface

use std::path::Path;

use soquet::facts::EntityId;
use soquet::frontend::extract_dir;
use soquet::model::ConcernModel;
use soquet::sorts::rsi_query;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns/prototype");
    let store = extract_dir(&dir, "prototype")?.store;
    let host = EntityId::parse("class:shapes.Circle").ok_or("bad id")?;

    let mut model = ConcernModel::new("prototype");
    let vi = model.define_virtual_interface(&store, &host, ["clone()"], "Prototype")?;
    println!("role {} on {}: {:?}", vi.role_name, vi.host_type, vi.member_signatures);
    for ty in vi.satisfiers(&store)? {
        println!("  satisfied by {ty}");
    }
    for partial in vi.partial_matches(&store)? {
        println!("  {} lacks {:?}", partial.ty, partial.missing);
    }

    let inst = rsi_query(&store, &model.role_specs(), "role Prototype", "project prototype")?;
    println!("{}", inst.query_text);
    for t in &inst.result {
        println!("  {} implements {}", t.source, t.target);
    }
    Ok(())
}
