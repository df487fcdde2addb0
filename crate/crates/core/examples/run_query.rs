// SPDX-License-Identifier: Apache-2.0

//! Evaluates a query against the observer program.
//!
//!     cargo run --example run_query ['query text']

use std::path::Path;

use soquet::frontend::extract_dir;
use soquet::query::{eval_program, parse_query, Value};

const DEFAULT: &str = "\
<listeners> = sourceof(implements(type *, interface FigureChangeListener));
<callers> = sourceof(invokes(method *, method Figure.notifyListeners()));
invokes(<callers> && targetof(declares(<listeners>, method *)), method *);";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args().nth(1).unwrap_or_else(|| DEFAULT.to_string());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns/observer");
    let store = extract_dir(&dir, "observer")?.store;

    let query = parse_query(&text)?;
    println!("{query}\n");
    let (value, _env) = eval_program(&query, &store)?;
    match value {
        Value::Entities(set) => {
            for id in set.iter() {
                println!("{id}");
            }
        }
        Value::Tuples(tuples) => {
            for (source, target, kind, _) in tuples.iter() {
                println!("{source} -{kind}-> {target}");
            }
        }
    }
    Ok(())
}
