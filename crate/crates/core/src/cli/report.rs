// SPDX-License-Identifier: Apache-2.0

//! Model reports.

use std::fmt::Write;

use crate::model::{document_with_status, ConcernModel, LeafStatus, NodeId};

fn status_tag(status: &LeafStatus) -> &'static str {
    match status {
        LeafStatus::Unchecked => "",
        LeafStatus::Fresh => "",
        LeafStatus::Stale => " STALE",
        LeafStatus::Broken(_) => " BROKEN",
    }
}

fn header(model: &ConcernModel) -> String {
    let hash = if model.store_hash.is_empty() {
        "none"
    } else {
        &model.store_hash[..model.store_hash.len().min(16)]
    };
    format!("model {}  store {hash}\n", model.name)
}

/// The tree with one line per node.
pub fn render_tree(model: &ConcernModel) -> String {
    let mut s = header(model);
    for c in model.children(model.root()) {
        tree_lines(model, *c, 1, &mut s);
    }
    s
}

fn tree_lines(model: &ConcernModel, id: NodeId, depth: usize, s: &mut String) {
    let node = model.node(id).expect("tree ids resolve");
    let pad = "  ".repeat(depth);
    match node.leaf() {
        None => {
            let _ = writeln!(s, "{pad}{}/  #{id}", node.name);
            for c in node.children() {
                tree_lines(model, *c, depth + 1, s);
            }
        }
        Some(leaf) => {
            let _ = writeln!(
                s,
                "{pad}{}  [{}, {} tuple(s)]{}  #{id}",
                node.name,
                leaf.instance.kind,
                leaf.instance.result.len(),
                status_tag(&leaf.status)
            );
        }
    }
}

/// Full text report: tree, then one section per leaf with its parameters,
/// query text, tuples and obligations. An empty model yields the header only.
pub fn render_text(model: &ConcernModel) -> String {
    if model.is_empty() {
        return header(model);
    }
    let mut s = render_tree(model);
    if !model.virtual_interfaces().is_empty() {
        s.push_str("\nvirtual interfaces\n");
        for vi in model.virtual_interfaces() {
            let members: Vec<&str> = vi.member_signatures.iter().map(String::as_str).collect();
            let _ = writeln!(s, "  {} on {} {{{}}}", vi.role_name, vi.host_type, members.join(", "));
        }
    }
    for id in model.leaves() {
        let node = model.node(id).expect("leaf ids resolve");
        let leaf = node.leaf().expect("leaf");
        let inst = &leaf.instance;
        let _ = writeln!(s, "\n== {} ==", model.path(id));
        match &leaf.status {
            LeafStatus::Broken(why) => {
                let _ = writeln!(s, "!! BROKEN");
                for w in why {
                    let _ = writeln!(s, "!!   {w}");
                }
            }
            LeafStatus::Stale => {
                let _ = writeln!(s, "!! STALE: computed against store {}", inst.store_hash);
            }
            LeafStatus::Fresh | LeafStatus::Unchecked => {}
        }
        let _ = writeln!(s, "sort {} ({})", inst.kind, inst.kind.title());
        for (k, v) in &inst.params {
            let _ = writeln!(s, "  {k} = {v}");
        }
        s.push_str("query\n");
        for line in inst.query_text.lines() {
            let _ = writeln!(s, "  {line}");
        }
        let _ = writeln!(s, "tuples ({})", inst.result.len());
        if inst.result.is_empty() {
            s.push_str("  (none)\n");
        }
        for t in &inst.result {
            let sites: Vec<String> = t.sites.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(s, "  {} -> {}  {}", t.source, t.target, sites.join(", "));
        }
        if let Some(obl) = &inst.obligations {
            let _ = writeln!(s, "obligations ({})", obl.len());
            for o in obl {
                let _ = writeln!(s, "  {o}");
            }
        }
        for w in &inst.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
    }
    s
}

/// The model document with per-leaf status, as pretty JSON.
pub fn render_structured(model: &ConcernModel) -> String {
    let mut text = serde_json::to_string_pretty(&document_with_status(model)).expect("JSON values serialize");
    text.push('\n');
    text
}
