// SPDX-License-Identifier: Apache-2.0

mod support;

use std::collections::{BTreeMap, BTreeSet};

use soquet::facts::{EntityId, EntityKind, FactKind, FactStore};
use soquet::query::{RoleSpec, Relation};
use soquet::sorts::*;
use support::*;

fn id(text: &str) -> EntityId {
    EntityId::parse(text).unwrap_or_else(|| panic!("bad id {text}"))
}

fn p(a: &str, b: &str) -> (String, String) {
    (a.to_string(), b.to_string())
}

/// Methods declared directly in the type with the given qualified name.
fn methods_of(store: &FactStore, qname: &str) -> BTreeSet<String> {
    store
        .entities()
        .filter(|e| matches!(e.kind, EntityKind::Method | EntityKind::Constructor))
        .filter(|e| store.entity(e.declared_in.as_ref().unwrap()).unwrap().qualified_name == qname)
        .map(|e| e.id.to_string())
        .collect()
}

/// Invokes facts whose target is `target`, as pairs.
fn callers_of(store: &FactStore, target: &str) -> Vec<(String, String)> {
    sorted(
        fact_pairs(store, FactKind::Invokes)
            .into_iter()
            .filter(|(_, t)| t == target)
            .collect(),
    )
}

// Consistent behavior and contract enforcement

#[test]
fn cb_tools_call_tool_done() {
    let store = load_pattern("state");
    let inst = cb_query(&store, "Tool+", "DrawingEditor.toolDone()").unwrap();
    let tools: BTreeSet<String> = ["CreationTool", "TextTool", "ConnectionTool"]
        .iter()
        .flat_map(|t| methods_of(&store, &format!("draw.{t}")))
        .collect();
    let expected: Vec<_> = callers_of(&store, "method:draw.DrawingEditor.toolDone()")
        .into_iter()
        .filter(|(s, _)| tools.contains(s))
        .collect();
    assert_eq!(expected.len(), 3);
    assert_eq!(pairs(&inst.result), expected);
    assert!(inst.result.iter().all(|t| t.kind == Relation::Invokes && !t.sites.is_empty()));
}

const FIVE_METHODS: &str = "package p;
class Target { void m() { } }
class Client {
  Target t;
  void a() { t.m(); }
  void b() { }
  void c() { t.m(); }
  void d() { t.m(); }
  void e() { }
}
";

#[test]
fn cb_selects_exactly_the_callers() {
    let store = inline(FIVE_METHODS);
    let inst = cb_query(&store, "type (p.Client)", "Target.m()").unwrap();
    let client = methods_of(&store, "p.Client");
    let expected: Vec<_> = callers_of(&store, "method:p.Target.m()")
        .into_iter()
        .filter(|(s, _)| client.contains(s))
        .collect();
    assert_eq!(expected.len(), 3);
    assert_eq!(pairs(&inst.result), expected);
}

#[test]
fn cb_empty_context_and_unresolved_target() {
    let store = inline(FIVE_METHODS);
    let inst = cb_query(&store, "type (p.Target)", "Target.m()").unwrap();
    assert!(inst.result.is_empty());
    let inst = cb_query(&store, "{ }", "Target.m()").unwrap();
    assert!(inst.result.is_empty());
    assert_eq!(
        cb_query(&store, "type (p.Client)", "Target.mm()").unwrap_err(),
        SortError::TargetUnresolved("method Target.mm()".into())
    );
}

const CHECKS: &str = "package cmd;
class View { boolean isValid() { return true; } }
interface Command { void execute(); }
class Cut implements Command { View view; void execute() { view.isValid(); } }
class Copy implements Command { View view; void execute() { view.isValid(); } }
class Paste implements Command { View view; void execute() { view.isValid(); } }
class Clear implements Command { View view; void execute() { view.isValid(); } }
class Status { View view; void show() { view.isValid(); } }
";

#[test]
fn ce_checks_from_every_execute() {
    let store = inline(CHECKS);
    let ce = ce_query(&store, "Command+", "View.isValid()").unwrap();
    let expected: Vec<_> = callers_of(&store, "method:cmd.View.isValid()")
        .into_iter()
        .filter(|(s, _)| s.ends_with(".execute()"))
        .collect();
    assert_eq!(expected.len(), 4);
    assert_eq!(pairs(&ce.result), expected);
    assert_eq!(ce.kind, SortKind::CE);

    let cb = cb_query(&store, "Command+", "View.isValid()").unwrap();
    assert_eq!(cb.result, ce.result);
    assert_eq!(cb.kind, SortKind::CB);
}

// Interfacing and redirection layers

#[test]
fn er_menu_item_mirrors_its_command() {
    let store = load_pattern("command");
    let inst = er_query(&store, "MenuItem", "command").unwrap();
    assert_eq!(
        pairs(&inst.result),
        sorted(vec![
            p("field:app.MenuItem.command", "interface:app.Command"),
            p("method:app.MenuItem.click()", "method:app.Command.execute()"),
            p("method:app.MenuItem.setCommand(app.Command)", "interface:app.Command"),
        ])
    );
}

const READERS: &str = "package r;
class Model { int value() { return 0; } }
class Panel {
  Model model;
  int count;
  void a() { model.value(); }
  void b() { count = 1; }
  void c(Model other) { }
  void d() { }
  void e() { count = 2; }
}
";

#[test]
fn er_sources_are_members_touching_the_reference_type() {
    let store = inline(READERS);
    let inst = er_query(&store, "Panel", "model").unwrap();
    // Brute force: members of Panel with a reference edge into Model or its members.
    let model_side: BTreeSet<String> = std::iter::once("class:r.Model".to_string())
        .chain(methods_of(&store, "r.Model"))
        .collect();
    let mut expected = BTreeSet::new();
    for kind in [FactKind::Invokes, FactKind::VarType, FactKind::ParamType] {
        for (s, t) in fact_pairs(&store, kind) {
            if !model_side.contains(&t) {
                continue;
            }
            let owner = match id(&s).kind() {
                EntityKind::Parameter => store.entity(&id(&s)).unwrap().declared_in.clone().unwrap().to_string(),
                _ => s,
            };
            if owner.starts_with("method:r.Panel.") || owner.starts_with("field:r.Panel.") {
                expected.insert(owner);
            }
        }
    }
    let sources: BTreeSet<String> = inst.result.iter().map(|t| t.source.to_string()).collect();
    assert_eq!(sources, expected);
    let methods: Vec<_> = sources.iter().filter(|s| s.starts_with("method:")).collect();
    assert_eq!(methods.len(), 2, "{methods:?}");
}

#[test]
fn er_reference_errors() {
    let store = inline(READERS);
    assert_eq!(
        er_query(&store, "Panel", "nothing").unwrap_err(),
        SortError::ReferenceUnresolved("nothing".into())
    );
    assert_eq!(
        er_query(&store, "Model", "count").unwrap_err(),
        SortError::NotAMemberOfType {
            member: "count".into(),
            ty: "Model".into()
        }
    );
    assert!(matches!(er_query(&store, "Nope", "model"), Err(SortError::TypeUnresolved(_))));
}

#[test]
fn er_accessor_reference_uses_return_type() {
    let store = inline(
        "package r;
class Model { int value() { return 0; } }
class Panel {
  Model m;
  Model model() { return m; }
  void a() { model().value(); }
}
",
    );
    let inst = er_query(&store, "Panel", "model()").unwrap();
    let sources: BTreeSet<String> = inst.result.iter().map(|t| t.source.to_string()).collect();
    assert!(sources.contains("method:r.Panel.a()"), "{sources:?}");
}

#[test]
fn rl_decorator_forwards_every_method() {
    let store = load_pattern("decorator");
    let inst = rl_query(&store, "DecoratorFigure", "fComponent").unwrap();
    let decor = methods_of(&store, "draw.DecoratorFigure");
    let comp = methods_of(&store, "draw.Figure");
    let simple = |s: &str| store.entity(&id(s)).unwrap().simple_name.clone();
    let expected: Vec<_> = fact_pairs(&store, FactKind::Invokes)
        .into_iter()
        .filter(|(s, t)| decor.contains(s) && comp.contains(t) && simple(s) == simple(t))
        .collect();
    assert_eq!(expected.len(), 3);
    assert_eq!(pairs(&inst.result), expected);
}

#[test]
fn rl_renamed_forwarding_is_invisible_but_er_is_not() {
    let store = load_pattern("state");
    let rl = rl_query(&store, "DrawApplication", "tool").unwrap();
    let er = er_query(&store, "DrawApplication", "tool").unwrap();
    assert!(rl.result.is_empty());
    assert!(!er.result.is_empty());
}

#[test]
fn rl_counts_only_same_name_forwards() {
    let store = inline(
        "package f;
interface Sink { void a(); void b(); void c(); void d(); void e(); }
class Wrapper {
  Sink sink;
  void a() { sink.a(); }
  void b() { sink.b(); }
  void c() { sink.c(); }
  void x() { sink.d(); }
  void y() { sink.e(); }
}
",
    );
    let rl = rl_query(&store, "Wrapper", "sink").unwrap();
    assert_eq!(
        pairs(&rl.result),
        vec![
            p("method:f.Wrapper.a()", "method:f.Sink.a()"),
            p("method:f.Wrapper.b()", "method:f.Sink.b()"),
            p("method:f.Wrapper.c()", "method:f.Sink.c()"),
        ]
    );
    let er = er_query(&store, "Wrapper", "sink").unwrap();
    let er_sources: BTreeSet<_> = er.result.iter().map(|t| t.source.clone()).collect();
    assert!(rl.result.iter().all(|t| er_sources.contains(&t.source)));
}

// Add variability

#[test]
fn av_anonymous_command_passed_to_menu() {
    let store = load_pattern("command");
    let inst = av_query(&store, "Command").unwrap();
    assert_eq!(
        pairs(&inst.result),
        vec![p("method:app.Menu.build()", "method:app.Menu.addItem(app.Command)")]
    );
    assert_eq!(inst.result[0].sites.len(), 2);
    assert!(inst.warnings.is_empty());
}

#[test]
fn av_runnable_passed_to_invoke_later() {
    let store = load_fixture("runnable");
    let inst = av_query(&store, "Runnable").unwrap();
    assert_eq!(
        pairs(&inst.result),
        vec![p("method:ui.Editor.refresh()", "method:ui.EventQueue.invokeLater(ui.Runnable)")]
    );
}

#[test]
fn av_creator_must_also_call_a_consumer() {
    let store = inline(
        "package m;
interface Action { void run(); }
class Queue { void post(Action a) { } }
class Job implements Action { void run() { } }
class Screen {
  Queue queue;
  void one() { queue.post(new Job()); }
  void two() { Job j = new Job(); }
  void three() { queue.post(null); }
}
",
    );
    let inst = av_query(&store, "Action").unwrap();
    // Oracle: creators of Action subtypes intersected with callers of methods taking an Action.
    let creators: BTreeSet<String> = fact_pairs(&store, FactKind::Creates)
        .into_iter()
        .filter(|(_, t)| t == "class:m.Job")
        .map(|(s, _)| s)
        .collect();
    let consumers: BTreeSet<String> = fact_pairs(&store, FactKind::ParamType)
        .into_iter()
        .filter(|(_, t)| t == "interface:m.Action")
        .map(|(s, _)| store.entity(&id(&s)).unwrap().declared_in.clone().unwrap().to_string())
        .collect();
    let expected: Vec<_> = fact_pairs(&store, FactKind::Invokes)
        .into_iter()
        .filter(|(s, t)| creators.contains(s) && consumers.contains(t))
        .collect();
    assert_eq!(expected, vec![p("method:m.Screen.one()", "method:m.Queue.post(m.Action)")]);
    assert_eq!(pairs(&inst.result), expected);
}

#[test]
fn av_warns_on_wide_method_objects_and_rejects_unknown_types() {
    let store = load_pattern("decorator");
    let inst = av_query(&store, "Figure").unwrap();
    assert_eq!(inst.warnings.len(), 1);
    assert!(inst.result.is_empty());
    assert!(matches!(av_query(&store, "Nothing"), Err(SortError::TypeUnresolved(_))));
}

// Expose context

#[test]
fn ec_progress_monitor_chain() {
    let store = load_fixture("progress");
    let direct = ec_query(&store, "Build.op1(..)", "monitor", "IProgressMonitor", false).unwrap();
    assert_eq!(
        pairs(&direct.result),
        vec![p("method:jobs.Build.op1(jobs.IProgressMonitor)", "method:jobs.Build.op2(jobs.IProgressMonitor)")]
    );
    let all = ec_query(&store, "Build.op1(..)", "monitor", "IProgressMonitor", true).unwrap();
    let op = |n: u32| format!("method:jobs.Build.op{n}(jobs.IProgressMonitor)");
    assert_eq!(
        pairs(&all.result),
        sorted(vec![(op(1), op(2)), (op(1), op(3)), (op(2), op(3))])
    );
}

/// Pairs (a, b) with b reachable from a over the given edges.
fn reachable_pairs(edges: &[(String, String)]) -> BTreeSet<(String, String)> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
    }
    let mut out = BTreeSet::new();
    for start in adj.keys() {
        let mut stack = vec![*start];
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            for next in adj.get(n).into_iter().flatten() {
                if seen.insert(*next) {
                    out.insert((start.to_string(), next.to_string()));
                    stack.push(next);
                }
            }
        }
    }
    out
}

#[test]
fn ec_ten_deep_chain_has_45_pairs() {
    let store = load_fixture("chain10");
    let inst = ec_query(&store, "Steps.m1(..)", "monitor", "Monitor", true).unwrap();
    let brute = reachable_pairs(&fact_pairs(&store, FactKind::Invokes));
    assert_eq!(brute.len(), 45);
    let got: BTreeSet<(String, String)> = pairs(&inst.result).into_iter().collect();
    assert_eq!(got, brute);
}

#[test]
fn ec_errors_and_empty() {
    let store = load_fixture("progress");
    assert!(matches!(
        ec_query(&store, "Build.nope(..)", "monitor", "*", false),
        Err(SortError::CallerUnresolved(_))
    ));
    let inst = ec_query(&store, "Build.op3(..)", "monitor", "*", true).unwrap();
    assert!(inst.result.is_empty());
}

// Role superimposition and support classes

#[test]
fn rsi_storable_figures() {
    let store = load_fixture("storable");
    let inst = rsi_query(&store, &[], "interface Storable", "Figure+").unwrap();
    let expected: Vec<_> = fact_pairs(&store, FactKind::Implements)
        .into_iter()
        .filter(|(s, t)| t == "interface:storage.Storable" && s.starts_with("class:figures."))
        .collect();
    assert_eq!(expected.len(), 3);
    assert_eq!(pairs(&inst.result), expected);
    let inst = rsi_query(&store, &[], "interface Storable", "type (app.Drawing)").unwrap();
    assert!(inst.result.is_empty());
    assert!(matches!(
        rsi_query(&store, &[], "interface Missing", "Figure+"),
        Err(SortError::RoleUnresolved(_))
    ));
}

#[test]
fn rsi_virtual_role_matches_redeclaring_classes() {
    let store = load_pattern("prototype");
    let role = RoleSpec {
        name: "Prototype".into(),
        host: id("class:shapes.Circle"),
        members: vec!["clone()".into()],
    };
    let inst = rsi_query(&store, &[role], "role Prototype", "project prototype").unwrap();
    // Signature scan: classes declaring a zero-argument clone.
    let expected: BTreeSet<String> = store
        .entities()
        .filter(|e| e.kind == EntityKind::Method && e.signature == "clone()")
        .map(|e| e.declared_in.clone().unwrap().to_string())
        .collect();
    let got: BTreeSet<String> = inst.result.iter().map(|t| t.source.to_string()).collect();
    assert_eq!(got, expected);
    assert!(inst.result.iter().all(|t| t.target.to_string() == "role:shapes.Circle$Prototype"));
}

#[test]
fn sc_nested_undo_activities() {
    let store = load_fixture("undo");
    let inst = sc_query(&store, &[], "Command+", "Undoable").unwrap();
    assert_eq!(
        pairs(&inst.result),
        vec![
            p("class:undo.DeleteCommand$UndoActivity", "interface:undo.Undoable"),
            p("class:undo.PasteCommand$UndoActivity", "interface:undo.Undoable"),
        ]
    );
    let inst = sc_query(&store, &[], "type (undo.Clipboard)", "Undoable").unwrap();
    assert!(inst.result.is_empty());
}

#[test]
fn sc_excludes_top_level_implementors() {
    let store = inline(
        "package s;
interface Role { }
class Outer {
  class A implements Role { }
  class B implements Role { }
}
class C implements Role { }
",
    );
    let inst = sc_query(&store, &[], "project inline", "Role").unwrap();
    let nested: BTreeSet<String> = fact_pairs(&store, FactKind::Contains)
        .into_iter()
        .filter(|(s, _)| s.starts_with("class:"))
        .map(|(_, t)| t)
        .collect();
    let expected: Vec<_> = fact_pairs(&store, FactKind::Implements)
        .into_iter()
        .filter(|(s, _)| nested.contains(s))
        .collect();
    assert_eq!(expected.len(), 2);
    assert_eq!(pairs(&inst.result), expected);
}

// Policy enforcement

#[test]
fn pe_bean_referencing_awt() {
    let store = load_fixture("beans");
    let inst = pe_query(&store, "Bean+", "package java.awt", false).unwrap();
    assert_eq!(
        pairs(&inst.result),
        vec![p("field:beans.StyledBean.background", "class:java.awt.Color")]
    );
    assert_eq!(inst.obligations, None);
    let clean = pe_query(&store, "type (beans.PersonBean)", "package java.awt", false).unwrap();
    assert!(clean.result.is_empty());
}

#[test]
fn pe_require_reports_unmet_sources() {
    let store = inline(
        "package q;
class Log { void write() { } }
class A { Log log; void run() { log.write(); } }
class B { Log log; }
class C { void run() { } }
",
    );
    let inst = pe_query(&store, "{ \"class:q.A\", \"class:q.B\", \"class:q.C\" }", "type (q.Log)", true).unwrap();
    assert_eq!(inst.obligations, Some(vec![id("class:q.C")]));
    assert!(matches!(
        pe_query(&store, "{ }", "type (q.Log)", true),
        Err(SortError::EmptyContext(_))
    ));
    assert!(matches!(
        pe_query(&store, "type (q.A)", "type (q.Nothing)", false),
        Err(SortError::EmptyContext(_))
    ));
}

// Exception propagation

#[test]
fn ep_four_level_rethrow() {
    let store = load_fixture("rethrow");
    let all = ep_query(&store, "Stream.read()", "IOException", "package io", true).unwrap();
    let level = |n: u32| format!("method:io.Parser.level{n}()");
    assert_eq!(
        pairs(&all.result),
        sorted((1..=4).map(|n| (level(n), "class:io.IOException".to_string())).collect())
    );
    assert!(all.result.iter().all(|t| t.kind == Relation::Throws));
    let direct = ep_query(&store, "Stream.read()", "IOException", "package io", false).unwrap();
    assert_eq!(pairs(&direct.result), vec![(level(1), "class:io.IOException".to_string())]);
}

#[test]
fn ep_stops_at_the_catching_driver() {
    let store = load_fixture("storable");
    let inst = ep_query(&store, "read(..)", "IOException", "project storable", true).unwrap();
    let sources: Vec<String> = pairs(&inst.result).into_iter().map(|(s, _)| s).collect();
    assert_eq!(
        sources,
        vec![
            "method:app.Drawing.load(storage.StorableInput)",
            "method:app.Editor.revert(storage.StorableInput)",
            "method:figures.GroupFigure.read(storage.StorableInput)",
        ]
    );
    assert!(matches!(
        ep_query(&store, "nothing()", "IOException", "project storable", false),
        Err(SortError::SeedUnresolved(_))
    ));
    assert!(matches!(
        ep_query(&store, "read(..)", "NoSuchError", "project storable", false),
        Err(SortError::ExceptionUnresolved(_))
    ));
}

// Design enforcement

#[test]
fn de_storable_needs_default_constructor() {
    let store = load_fixture("storable");
    let inst = de_query(&store, "class Storable+", "new()").unwrap();
    assert_eq!(inst.obligations, Some(vec![id("class:figures.TextFigure")]));
    assert_eq!(
        pairs(&inst.result),
        vec![
            p("class:figures.GroupFigure", "constructor:figures.GroupFigure.new()"),
            p("class:figures.RectFigure", "constructor:figures.RectFigure.new()"),
        ]
    );
    let ok = de_query(&store, "class Storable+", "read(..)").unwrap();
    assert_eq!(ok.obligations, Some(vec![]));
    assert!(matches!(de_query(&store, "{ }", "new()"), Err(SortError::EmptyContext(_))));
}

#[test]
fn de_obligations_are_the_types_missing_the_member() {
    let store = inline(
        "package d;
interface Shape { }
class A implements Shape { void draw() { } }
class B implements Shape { }
class C implements Shape { void draw() { } }
class D implements Shape { }
class E implements Shape { void draw() { } }
",
    );
    let inst = de_query(&store, "class Shape+", "draw()").unwrap();
    let declaring: BTreeSet<String> = fact_pairs(&store, FactKind::Declares)
        .into_iter()
        .filter(|(_, t)| t.ends_with(".draw()"))
        .map(|(s, _)| s)
        .collect();
    let expected: Vec<EntityId> = ["A", "B", "C", "D", "E"]
        .iter()
        .map(|c| format!("class:d.{c}"))
        .filter(|c| !declaring.contains(c))
        .map(|c| id(&c))
        .collect();
    assert_eq!(expected.len(), 2);
    assert_eq!(inst.obligations, Some(expected));
}

// Dynamic behavior enforcement

#[test]
fn dbe_counter_accesses() {
    let store = load_fixture("counter");
    let inst = dbe_query(&store, "Counter", "counter", None).unwrap();
    assert_eq!(inst.result.len(), 6);
    for method in ["enter()", "leave()", "reset()"] {
        let kinds: BTreeSet<Relation> = inst
            .result
            .iter()
            .filter(|t| t.source.to_string() == format!("method:guard.Counter.{method}"))
            .map(|t| t.kind)
            .collect();
        assert_eq!(kinds, BTreeSet::from([Relation::Get, Relation::Set]), "{method}");
    }
    assert!(matches!(
        dbe_query(&store, "Counter", "missing", None),
        Err(SortError::FieldUnresolved(_))
    ));
}

#[test]
fn dbe_tags_match_fact_scan() {
    let store = inline(
        "package g;
class Lock {
  int held;
  void a() { check(held); }
  void b() { held = 1; }
  void c() { check(held); }
  void d() { }
  void check(int v) { }
}
",
    );
    let inst = dbe_query(&store, "Lock", "held", None).unwrap();
    let mut expected = Vec::new();
    for (kind, rel) in [(FactKind::Get, Relation::Get), (FactKind::Set, Relation::Set)] {
        for (s, t) in fact_pairs(&store, kind) {
            if t == "field:g.Lock.held" {
                expected.push((s, rel));
            }
        }
    }
    expected.sort();
    let mut got: Vec<(String, Relation)> = inst.result.iter().map(|t| (t.source.to_string(), t.kind)).collect();
    got.sort();
    assert_eq!(got.len(), 3);
    assert_eq!(got, expected);
    let none = dbe_query(&store, "Lock", "held", Some("type (g.Nothing)")).unwrap();
    assert!(none.result.is_empty());
}

// Patterns

fn bind(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

#[test]
fn singleton_row_is_rsi_de_cb() {
    let dir = pattern_dir("singleton");
    let file = bindings(&dir);
    let kinds: Vec<SortKind> = file.plan().unwrap().iter().map(|p| p.spec.kind).collect();
    assert_eq!(kinds, vec![SortKind::RSI, SortKind::DE, SortKind::CB]);
    let de = &file.plan().unwrap()[1];
    assert_eq!(de.spec.param("member"), Some("private new(..)"));
}

#[test]
fn decorator_row_is_a_single_rl() {
    let plan = pattern_plan(
        "Decorator",
        &bind(&[("decorator", "DecoratorFigure"), ("component_reference", "fComponent")]),
    )
    .unwrap();
    assert_eq!(plan.len(), 1);
    assert_eq!(plan[0].spec.kind, SortKind::RL);
}

#[test]
fn pattern_binding_errors() {
    assert_eq!(
        pattern_plan("decorator", &bind(&[("decorator", "DecoratorFigure")])).unwrap_err(),
        SortError::MissingBinding("component_reference".into())
    );
    assert_eq!(
        pattern_plan("bridge", &BTreeMap::new()).unwrap_err(),
        SortError::UnknownPattern("bridge".into())
    );
    assert!(matches!(
        pattern_plan("decorator", &bind(&[("decorator", "D"), ("component_reference", "c"), ("typo", "x")])),
        Err(SortError::UnknownParam(_))
    ));
    // Optional instances need all or none of their bindings.
    assert_eq!(
        pattern_plan(
            "proxy",
            &bind(&[("proxy", "P"), ("subject_reference", "r"), ("check_access", "c()")])
        )
        .unwrap_err(),
        SortError::MissingBinding("protected_context".into())
    );
    assert_eq!(pattern_plan("Chain of Responsibility", &BTreeMap::new()).unwrap_err(), SortError::MissingBinding("handler".into()));
}

#[test]
fn every_table_row_is_present() {
    let names: Vec<&str> = PATTERNS.iter().map(|r| r.name).collect();
    assert_eq!(
        names,
        vec![
            "adapter",
            "state",
            "decorator",
            "proxy",
            "visitor",
            "command",
            "composite",
            "iterator",
            "flyweight",
            "memento",
            "strategy",
            "mediator",
            "chain-of-responsibility",
            "prototype",
            "singleton",
            "observer",
        ]
    );
}

// General properties

#[test]
fn instances_are_deterministic() {
    let store = load_pattern("observer");
    let file = bindings(&pattern_dir("observer"));
    let a = file.compose(&store).unwrap();
    let b = file.compose(&load_pattern("observer")).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|i| !i.is_stale(&store)));
}

#[test]
fn empty_context_gives_empty_result_for_every_contextual_sort() {
    let store = load_pattern("observer");
    let roles: Vec<RoleSpec> = Vec::new();
    let cases = [
        SortSpec::new(SortKind::CB, [("context", "{ }"), ("target", "Figure.notifyListeners()")]),
        SortSpec::new(SortKind::CE, [("context", "{ }"), ("target", "Figure.notifyListeners()")]),
        SortSpec::new(SortKind::RSI, [("context", "{ }"), ("role", "FigureChangeListener")]),
        SortSpec::new(SortKind::SC, [("context", "{ }"), ("role", "FigureChangeListener")]),
        SortSpec::new(
            SortKind::EP,
            [("context", "{ }"), ("seed", "notifyListeners()"), ("exception", "Figure"), ("transitive", "true")],
        ),
        SortSpec::new(SortKind::DBE, [("type", "Figure"), ("field", "listener"), ("context", "{ }")]),
    ];
    for spec in cases {
        let inst = instantiate(&store, &roles, "empty", &spec).unwrap();
        assert!(inst.result.is_empty(), "{:?}", spec.kind);
    }
}

#[test]
fn generated_query_is_reproducible_from_params() {
    let store = load_pattern("command");
    for inst in bindings(&pattern_dir("command")).compose(&store).unwrap() {
        let regenerated = generate(&inst.spec()).unwrap().query.to_string();
        assert_eq!(regenerated, inst.query_text);
    }
}
