// SPDX-License-Identifier: Apache-2.0

mod support;

use std::collections::BTreeSet;

use proptest::prelude::*;
use soquet::facts::{export_facts, import_facts, EntityKind, Fact, FactKind, FactStore};
use soquet::model::{load_model, save_model, ConcernModel, NodeId};
use soquet::query::parse_query;
use soquet::sorts::{cb_query, ce_query, er_query, rl_query, SortInstance};
use support::oracle::{render_set, render_tup, Sel, SetExpr, World};
use support::random::*;
use support::{dir_name, pattern_dirs, pattern_model};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evaluator_agrees_with_naive_oracle(spec in store_spec(), q in any_expr()) {
        let store = build(&spec, false);
        let world = World::new(&store);
        let ids = world.ids();
        let text = render(&q, &ids);
        prop_assert_eq!(run(&text, &store), oracle(&q, &world), "query: {}", text);
    }
}

#[test]
fn oracle_cases_are_not_mostly_empty() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{Config, TestRunner};
    let mut runner = TestRunner::new(Config::default());
    let strategy = (store_spec(), any_expr());
    let (mut nonempty, total) = (0, 300);
    for _ in 0..total {
        let (spec, q) = strategy.new_tree(&mut runner).unwrap().current();
        let store = build(&spec, false);
        let world = World::new(&store);
        if !oracle(&q, &world).pairs().is_empty() {
            nonempty += 1;
        }
    }
    assert!(nonempty * 4 >= total, "only {nonempty}/{total} random queries had results");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fact_indexes_agree_with_the_fact_list(spec in store_spec()) {
        let store = build(&spec, false);
        let all = store.facts();
        for e in store.entities() {
            for k in FactKind::ALL {
                let from: Vec<&Fact> = store.facts_from(k, &e.id).collect();
                let scan: Vec<&Fact> = all.iter().filter(|f| f.kind == k && f.source == e.id).collect();
                prop_assert_eq!(from, scan);
                let to: Vec<&Fact> = store.facts_to(k, &e.id).collect();
                let scan: Vec<&Fact> = all.iter().filter(|f| f.kind == k && f.target == e.id).collect();
                prop_assert_eq!(to, scan);
            }
            let children: BTreeSet<_> = store.children(&e.id).iter().cloned().collect();
            let scan: BTreeSet<_> = all
                .iter()
                .filter(|f| f.kind.is_structural() && f.source == e.id)
                .map(|f| f.target.clone())
                .collect();
            prop_assert_eq!(children, scan);
            let expected_parent = match e.kind {
                EntityKind::Project => None,
                EntityKind::Package => store.project().cloned(),
                _ => e.declared_in.clone(),
            };
            prop_assert_eq!(store.parent(&e.id).cloned(), expected_parent);
        }
        for k in FactKind::ALL {
            let scan: Vec<&Fact> = all.iter().filter(|f| f.kind == k).collect();
            prop_assert_eq!(store.facts_of_kind(k).iter().collect::<Vec<_>>(), scan);
        }
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]), "facts are sorted and unique");
    }

    #[test]
    fn export_import_preserves_the_hash(spec in store_spec()) {
        let store = build(&spec, false);
        let mut buf = Vec::new();
        export_facts(&store, &mut buf).unwrap();
        let back = import_facts(&buf[..]).unwrap();
        prop_assert_eq!(back.hash(), store.hash());
        prop_assert_eq!(back.canonical_text(), store.canonical_text());
        let rebuilt = build(&spec, false);
        prop_assert_eq!(rebuilt.hash(), store.hash());
    }

    #[test]
    fn closure_is_idempotent(spec in store_spec(), t in tup_expr(2)) {
        let store = build(&spec, false);
        let ids = World::new(&store).ids();
        let inner = render_tup(&t, &ids);
        let once = run(&format!("closure({inner})"), &store);
        let twice = run(&format!("closure(closure({inner}))"), &store);
        prop_assert_eq!(once.pairs(), twice.pairs());
        prop_assert!(once.pairs().is_superset(&run(&inner, &store).pairs()));
    }

    #[test]
    fn queries_are_monotone_in_facts(spec in store_spec(), q in any_expr()) {
        let full = build(&spec, false);
        let sub = build(&spec, true);
        let ids = World::new(&full).ids();
        prop_assert_eq!(World::new(&sub).ids(), ids.clone());
        let text = render(&q, &ids);
        let small = run(&text, &sub).pairs();
        let big = run(&text, &full).pairs();
        prop_assert!(small.is_subset(&big), "query: {}", text);
    }

    #[test]
    fn hierarchy_suffix_only_widens(spec in store_spec(), sel in prop::option::of(0usize..3), n in 0usize..14) {
        let store = build(&spec, false);
        let sel = sel.map(|i| [Sel::Type, Sel::Class, Sel::Interface][i]);
        let name = if n < EXACT.len() && sel.is_some() { EXACT[n] } else { GLOBS[n % GLOBS.len()] };
        let plain = SetExpr::Pat { sel, name: name.into(), plus: false };
        let plus = SetExpr::Pat { sel, name: name.into(), plus: true };
        let narrow = match run(&render_set(&plain, &[]), &store) { Out::Set(s) => s, Out::Tup(_) => unreachable!() };
        let wide = match run(&render_set(&plus, &[]), &store) { Out::Set(s) => s, Out::Tup(_) => unreachable!() };
        let narrow_types: BTreeSet<String> = narrow
            .iter()
            .filter(|id| ["class:", "interface:", "role:"].iter().any(|p| id.starts_with(p)))
            .cloned()
            .collect();
        if sel.is_some() {
            prop_assert!(wide.is_superset(&narrow));
        } else {
            prop_assert!(wide.is_superset(&narrow_types));
        }
    }

    #[test]
    fn projections_are_sound(spec in store_spec(), t in tup_expr(3)) {
        let store = build(&spec, false);
        let ids = World::new(&store).ids();
        let inner = render_tup(&t, &ids);
        let tuples = run(&inner, &store).pairs();
        let Out::Set(src) = run(&format!("sourceof({inner})"), &store) else { unreachable!() };
        let Out::Set(tgt) = run(&format!("targetof({inner})"), &store) else { unreachable!() };
        prop_assert_eq!(src.clone(), tuples.iter().map(|(s, _)| s.clone()).collect::<BTreeSet<_>>());
        prop_assert_eq!(tgt.clone(), tuples.iter().map(|(_, t)| t.clone()).collect::<BTreeSet<_>>());
        prop_assert!(src.iter().chain(&tgt).all(|id| ids.contains(id)));
    }

    #[test]
    fn canonical_text_round_trips(q in any_expr()) {
        let ids: Vec<String> = vec!["class:pa.Alpha0".into(), "method:pa.Alpha0.run(pa.Beta1)".into()];
        let text = render(&q, &ids);
        let parsed = parse_query(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        let shown = parsed.to_string();
        let again = parse_query(&shown).unwrap_or_else(|e| panic!("{shown}: {e}"));
        prop_assert_eq!(&again, &parsed);
        prop_assert_eq!(again.to_string(), shown);
    }
}

// ---------------------------------------------------------------------------
// models

#[derive(Debug, Clone)]
enum Op {
    Composite(usize, usize),
    Leaf(usize, usize, usize),
    Move(usize, usize),
    Rename(usize, usize),
    Remove(usize),
}

const NODE_NAMES: [&str; 5] = ["core", "ui", "Notification", "io", "misc"];

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        (0usize..16, 0usize..5).prop_map(|(p, n)| Op::Composite(p, n)),
        (0usize..16, 0usize..8, 0usize..5).prop_map(|(p, i, n)| Op::Leaf(p, i, n)),
        (0usize..16, 0usize..16).prop_map(|(a, b)| Op::Move(a, b)),
        (0usize..16, 0usize..5).prop_map(|(a, n)| Op::Rename(a, n)),
        (1usize..16).prop_map(Op::Remove),
    ]
}

fn base_model() -> &'static (FactStore, ConcernModel, Vec<SortInstance>) {
    static BASE: std::sync::OnceLock<(FactStore, ConcernModel, Vec<SortInstance>)> = std::sync::OnceLock::new();
    BASE.get_or_init(|| {
        // every pooled instance must come from the same store as the model
        let (store, model) = pattern_model(&support::pattern_dir("observer"));
        let pool: Vec<SortInstance> =
            model.leaves().into_iter().map(|id| model.node(id).unwrap().leaf().unwrap().instance.clone()).collect();
        (store, model, pool)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn model_documents_round_trip(ops in prop::collection::vec(op(), 0..24)) {
        let (store, base, pool) = base_model();
        let mut model = base.clone();
        for op in ops {
            let nodes: Vec<NodeId> = model.preorder();
            let pick = |i: usize| nodes[i % nodes.len()];
            let _ = match op {
                Op::Composite(p, n) => model.add_composite(pick(p), NODE_NAMES[n]).map(|_| ()),
                Op::Leaf(p, i, n) => model.add_instance(pick(p), pool[i % pool.len()].clone(), NODE_NAMES[n]).map(|_| ()),
                Op::Move(a, b) => model.move_node(pick(a), pick(b)),
                Op::Rename(a, n) => model.rename(pick(a), NODE_NAMES[n]),
                Op::Remove(a) => model.remove(pick(a)),
            };
        }
        let text = save_model(&model);
        let (back, dangling) = load_model(&text, Some(store)).unwrap();
        prop_assert!(dangling.is_empty());
        prop_assert_eq!(&back, &model);
        prop_assert_eq!(save_model(&back), text.clone());
        let (bare, _) = load_model(&text, None).unwrap();
        prop_assert_eq!(&bare, &model);
    }
}

// ---------------------------------------------------------------------------
// sort-level invariants on every corpus program

#[test]
fn cb_and_ce_agree_on_every_corpus_target() {
    for dir in pattern_dirs() {
        let store = support::load(&dir);
        let targets: BTreeSet<String> = store
            .entities()
            .filter(|e| e.kind == EntityKind::Method)
            .map(|e| format!("{}(..)", e.qualified_name))
            .collect();
        for target in &targets {
            let cb = cb_query(&store, "package *", target).unwrap();
            let ce = ce_query(&store, "package *", target).unwrap();
            let project = |i: &SortInstance| -> Vec<_> {
                i.result.iter().map(|t| (t.source.clone(), t.target.clone(), t.kind, t.sites.clone())).collect()
            };
            assert_eq!(project(&cb), project(&ce), "{} {target}", dir_name(&dir));
            let expected: BTreeSet<(String, String)> = store
                .facts_of_kind(FactKind::Invokes)
                .iter()
                .filter(|f| store.entity(&f.target).is_some_and(|t| t.qualified_name == target.trim_end_matches("(..)")))
                .map(|f| (f.source.to_string(), f.target.to_string()))
                .collect();
            let got: BTreeSet<(String, String)> =
                cb.result.iter().map(|t| (t.source.to_string(), t.target.to_string())).collect();
            assert_eq!(got, expected, "{} {target}", dir_name(&dir));
        }
    }
}

#[test]
fn rl_is_contained_in_er_on_every_corpus_reference() {
    let mut compared = 0;
    for dir in pattern_dirs() {
        let store = support::load(&dir);
        for ty in store.entities().filter(|e| e.kind.is_type()) {
            let refs: Vec<String> = store
                .children(&ty.id)
                .iter()
                .filter_map(|c| store.entity(c))
                .filter_map(|m| match m.kind {
                    EntityKind::Field => Some(m.simple_name.clone()),
                    EntityKind::Method if m.param_types().is_empty() => Some(format!("{}()", m.simple_name)),
                    _ => None,
                })
                .collect();
            for r in refs {
                let er = er_query(&store, &ty.qualified_name, &r);
                let rl = rl_query(&store, &ty.qualified_name, &r);
                match (er, rl) {
                    (Ok(er), Ok(rl)) => {
                        let er: BTreeSet<_> = er.result.iter().map(|t| (t.source.clone(), t.target.clone())).collect();
                        for t in &rl.result {
                            assert!(
                                er.contains(&(t.source.clone(), t.target.clone())),
                                "{}: RL {} {r}: {} -> {} not in ER",
                                dir_name(&dir),
                                ty.qualified_name,
                                t.source,
                                t.target
                            );
                        }
                        compared += 1;
                    }
                    (Err(a), Err(b)) => assert_eq!(a, b),
                    (a, b) => panic!("{} {r}: ER {a:?} vs RL {b:?}", ty.qualified_name),
                }
            }
        }
    }
    assert!(compared > 50, "only {compared} references compared");
}
