// SPDX-License-Identifier: Apache-2.0

//! Drives the HTTP handler directly, without opening a socket. Pass
//! `--listen` to serve on port 7878 instead.
//!
//!     cargo run --example serve_api [--listen]

use std::fs;
use std::path::Path;

use soquet::cli::serve::{handle, serve, ServeState};
use soquet::frontend::extract_dir;
use soquet::model::ConcernModel;
use soquet::sorts::BindingsFile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/patterns/observer");
    let store = extract_dir(&dir, "observer")?.store;
    let bindings = BindingsFile::from_toml(&fs::read_to_string(dir.join("bindings.toml"))?)?;
    let mut model = ConcernModel::new("observer");
    model.add_bindings(&store, model.root(), "observer", &bindings)?;
    let mut state = ServeState::new(store, model, None, Some(dir), false);

    if std::env::args().any(|a| a == "--listen") {
        println!("listening on http://127.0.0.1:7878/api/model");
        return Ok(serve(state, 7878)?);
    }

    let requests = [
        ("GET", "/api/model"),
        ("GET", "/api/instance/observer%2FNotification"),
        ("GET", "/api/entity/method%3Adraw.Figure.notifyListeners()"),
        ("GET", "/api/source?file=figures.oosl&from=1&to=5"),
        ("GET", "/api/touching?entity=interface%3Adraw.FigureChangeListener"),
        ("POST", "/api/instance/observer%2FNotification/refresh"),
        ("GET", "/api/nothing"),
    ];
    for (method, url) in requests {
        let response = handle(&mut state, method, url, "");
        let body = serde_json::to_string(&response.body)?;
        let short: String = body.chars().take(160).collect();
        println!("{method} {url} -> {}\n  {short}", response.status);
    }
    Ok(())
}
