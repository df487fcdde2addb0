// SPDX-License-Identifier: Apache-2.0

//! Query generation and evaluation for each sort.

use crate::facts::{EntityId, EntityKind, FactStore};
use crate::query::{
    eval_program, overlay_roles, parse_expr, parse_pattern, parse_query, EntitySet, Evaluator, Expr,
    Pattern, Query, RoleSpec, Selector, TupleSet, Value,
};

use super::{SortError, SortInstance, SortKind, SortSpec};

/// A generated query plus what it takes to interpret its result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub query: Query,
    pub obligations: Option<Obligation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Obligation {
    /// Context types (classes only for constructor rules) lacking a tuple.
    Declares { classes_only: bool },
    /// Source context elements with no tuple from themselves or anything
    /// they contain.
    References,
}

fn bad(name: &str, reason: impl ToString) -> SortError {
    SortError::BadParam {
        name: name.to_string(),
        reason: reason.to_string(),
    }
}

fn check_params(spec: &SortSpec) -> Result<(), SortError> {
    let schema = spec.kind.params();
    for key in spec.params.keys() {
        if !schema.iter().any(|(name, _)| name == key) {
            return Err(SortError::UnknownParam(key.clone()));
        }
    }
    for (name, required) in schema {
        if *required && spec.param(name).is_none_or(|v| v.trim().is_empty()) {
            return Err(SortError::MissingParam(name.to_string()));
        }
    }
    Ok(())
}

fn required<'a>(spec: &'a SortSpec, name: &str) -> &'a str {
    spec.param(name).expect("checked by check_params").trim()
}

fn optional<'a>(spec: &'a SortSpec, name: &str) -> Option<&'a str> {
    spec.param(name).map(str::trim).filter(|v| !v.is_empty())
}

fn flag(spec: &SortSpec, name: &str) -> Result<bool, SortError> {
    match optional(spec, name) {
        None | Some("false") | Some("no") => Ok(false),
        Some("true") | Some("yes") => Ok(true),
        Some(other) => Err(bad(name, format!("expected true or false, found `{other}`"))),
    }
}

fn pattern(spec: &SortSpec, name: &str, default: Selector) -> Result<Pattern, SortError> {
    let mut p = parse_pattern(required(spec, name)).map_err(|e| bad(name, e))?;
    if p.selector.is_none() {
        p.selector = Some(default);
    }
    p.validate().map_err(|e| bad(name, e))?;
    Ok(p)
}

fn context(spec: &SortSpec, name: &str) -> Result<Expr, SortError> {
    parse_expr(required(spec, name), &[]).map_err(|e| bad(name, e))
}

/// `owner.member` with the owner written as a type pattern.
fn member_of(owner: &Pattern, member: &str) -> String {
    format!("{}.{member}", owner.name)
}

/// Selector for a field-or-accessor reference: `acc()` names a zero-argument
/// method, anything else a field.
fn reference_pattern(owner: &Pattern, reference: &str) -> Result<Pattern, SortError> {
    let reference = reference.trim();
    let text = match reference.strip_suffix("()") {
        Some(acc) => format!("method {}()", member_of(owner, acc)),
        None => format!("field {}", member_of(owner, reference)),
    };
    parse_pattern(&text).map_err(|e| bad("reference", e))
}

/// Produces the query for a spec; does not consult any store.
pub fn generate(spec: &SortSpec) -> Result<Generated, SortError> {
    check_params(spec)?;
    let mut obligations = None;
    let text = match spec.kind {
        SortKind::CB | SortKind::CE => {
            let ctx = context(spec, "context")?;
            let target = pattern(spec, "target", Selector::Method)?;
            let head = if spec.kind == SortKind::CB { "CB" } else { "CE" };
            format!(
                "<context> = {ctx};\n\
                 <selcallers> = <context> && sourceof(invokes(method *, {target}));\n\
                 {head}(contextElem, m) = invokes(<selcallers>, {target});"
            )
        }
        SortKind::ER | SortKind::RL => {
            let ty = pattern(spec, "type", Selector::Type)?;
            let reference = reference_pattern(&ty, required(spec, "reference"))?;
            let interfaced = match reference.selector {
                Some(Selector::Field) => format!("targetof(typeof({reference}, type *))"),
                _ => format!("targetof(returns({reference}, type *))"),
            };
            if spec.kind == SortKind::ER {
                format!(
                    "<interfacedType> = {interfaced};\n\
                     ER(C, field) = references({ty}, <interfacedType>);"
                )
            } else {
                format!(
                    "<compType> = {interfaced};\n\
                     <compMethods> = targetof(declares(<compType>, method *));\n\
                     <decorMethods> = targetof(declares({ty}, method *));\n\
                     RL(D, field) = invokes(<decorMethods>, <compMethods>) && compares(<decorMethods>, <compMethods>);"
                )
            }
        }
        SortKind::AV => {
            let ty = pattern(spec, "type", Selector::Type)?;
            let mut hier = ty.clone();
            hier.hierarchy = true;
            format!(
                "<target> = sourceof(params(method *, {ty}));\n\
                 <mCreateMethObj> = sourceof(creates(method *, {hier}));\n\
                 <source> = <mCreateMethObj> && sourceof(invokes(method *, <target>));\n\
                 AV(MethObjT) = invokes(<source>, <target>);"
            )
        }
        SortKind::EC => {
            let caller = pattern(spec, "caller", Selector::Method)?;
            let arg_name = required(spec, "arg_name");
            let arg_type = optional(spec, "arg_type").unwrap_or("*");
            let arg = parse_pattern(&format!("param {arg_type} {arg_name}")).map_err(|e| bad("arg_name", e))?;
            let select = format!(
                "<callees> = targetof(invokes({caller}, method *));\n\
                 <selCallees> = <callees> && sourceof(declares(method *, {arg}));\n"
            );
            if flag(spec, "transitive")? {
                format!(
                    "<argMethods> = sourceof(declares(method *, {arg}));\n\
                     <passing> = invokes(method *, <argMethods>);\n\
                     <chain> = {caller} || targetof(restrict(closure(<passing>), {caller}, method *));\n\
                     EC(caller, argName) = restrict(closure(<passing>), <chain>, method *);"
                )
            } else {
                format!("{select}EC(caller, argName) = invokes({caller}, <selCallees>);")
            }
        }
        SortKind::RSI => {
            let ctx = context(spec, "context")?;
            let role = pattern(spec, "role", Selector::Type)?;
            format!(
                "<context> = {ctx};\n\
                 <implementors> = sourceof(implements(type *, {role})) || sourceof(extends(type *, {role}));\n\
                 <selectedImpls> = <context> && <implementors>;\n\
                 RSI(Role, contextElem) = implements(<selectedImpls>, {role}) || extends(<selectedImpls>, {role});"
            )
        }
        SortKind::SC => {
            let ctx = context(spec, "context")?;
            let mut role = pattern(spec, "role", Selector::Type)?;
            if role.selector != Some(Selector::Role) {
                role.hierarchy = true;
            }
            format!(
                "<context> = {ctx};\n\
                 <nested> = targetof(contains(<context> && type *, class *));\n\
                 <implementors> = <nested> && (sourceof(implements(class *, {role})) || sourceof(extends(class *, {role})));\n\
                 SC(EnclosingC, Role) = implements(<implementors>, {role}) || extends(<implementors>, {role});"
            )
        }
        SortKind::PE => {
            let src = context(spec, "source")?;
            let tgt = context(spec, "target")?;
            match optional(spec, "polarity") {
                None | Some("forbid") => {}
                Some("require") => obligations = Some(Obligation::References),
                Some(other) => return Err(bad("polarity", format!("expected forbid or require, found `{other}`"))),
            }
            format!(
                "<src_context> = {src};\n\
                 <tgt_context> = {tgt};\n\
                 PE(srcContextElem, targetContextElem) = references(<src_context>, <tgt_context>);"
            )
        }
        SortKind::EP => {
            let seed = pattern(spec, "seed", Selector::Method)?;
            let exception = pattern(spec, "exception", Selector::Class)?;
            let ctx = context(spec, "context")?;
            let base = format!(
                "<context> = {ctx};\n\
                 <callers> = sourceof(invokes(method *, {seed}));\n\
                 <throw> = sourceof(throws(method *, {exception}));\n\
                 <source> = <throw> && <callers> && <context>;\n"
            );
            if flag(spec, "transitive")? {
                format!(
                    "{base}<rethrowers> = <throw> && <context>;\n\
                     <chain> = <source> || sourceof(restrict(closure(invokes(<rethrowers>, <rethrowers>)), <rethrowers>, <source>));\n\
                     EP(m, ExceptionType, contextElem) = throws(<chain>, {exception});"
                )
            } else {
                format!("{base}EP(m, ExceptionType, contextElem) = throws(<source>, {exception});")
            }
        }
        SortKind::DE => {
            let ctx = context(spec, "context")?;
            let mut member = pattern(spec, "member", Selector::Member)?;
            if member.type_pattern.is_none() && member.params.is_some() {
                member.type_pattern = Some("*".into());
            }
            let ctor = member.name == "new" || member.name.ends_with(".new");
            obligations = Some(Obligation::Declares { classes_only: ctor });
            format!(
                "<context> = {ctx};\n\
                 DE(contextElem, m) = declares(<context>, {member});"
            )
        }
        SortKind::DBE => {
            let ty = pattern(spec, "type", Selector::Type)?;
            let field_name = required(spec, "field");
            let field = parse_pattern(&format!("field {}", member_of(&ty, field_name))).map_err(|e| bad("field", e))?;
            let ctx = match optional(spec, "context") {
                Some(_) => context(spec, "context")?.to_string(),
                None => format!("targetof(declares({ty}, method *))"),
            };
            format!(
                "<context> = {ctx};\n\
                 DBE(C, field) = set(<context>, {field}) || get(<context>, {field});"
            )
        }
    };
    let query = parse_query(&text).map_err(SortError::Query)?;
    Ok(Generated { query, obligations })
}

/// Rejects parameters that name nothing in the store, so a typo is not
/// mistaken for an empty result.
fn validate(spec: &SortSpec, store: &FactStore) -> Result<Vec<String>, SortError> {
    let ev = Evaluator::new(store);
    let mut warnings = Vec::new();
    let resolve = |name: &str, default: Selector| -> Result<(String, EntitySet), SortError> {
        let p = pattern(spec, name, default)?;
        let found = ev.pattern(&p);
        Ok((p.to_string(), found))
    };
    match spec.kind {
        SortKind::CB | SortKind::CE => {
            let (text, found) = resolve("target", Selector::Method)?;
            if found.iter().all(|id| !id.kind().is_callable()) {
                return Err(SortError::TargetUnresolved(text));
            }
        }
        SortKind::ER | SortKind::RL => {
            let (ty_text, types) = resolve("type", Selector::Type)?;
            if types.is_empty() {
                return Err(SortError::TypeUnresolved(ty_text));
            }
            let ty = pattern(spec, "type", Selector::Type)?;
            let reference = required(spec, "reference");
            let in_type = reference_pattern(&ty, reference)?;
            if ev.pattern(&in_type).is_empty() {
                let mut anywhere = reference_pattern(&Pattern::named(None, "*"), reference)?;
                anywhere.name = reference.trim_end_matches("()").to_string();
                if ev.pattern(&anywhere).is_empty() {
                    return Err(SortError::ReferenceUnresolved(reference.to_string()));
                }
                return Err(SortError::NotAMemberOfType {
                    member: reference.to_string(),
                    ty: ty.name.clone(),
                });
            }
        }
        SortKind::AV => {
            let ty = pattern(spec, "type", Selector::Type)?;
            let types = ev.pattern(&ty);
            if types.is_empty() {
                return Err(SortError::TypeUnresolved(ty.to_string()));
            }
            for t in &types {
                let methods = store.children(t).iter().filter(|c| c.kind() == EntityKind::Method).count();
                if methods != 1 {
                    warnings.push(format!(
                        "method-object type `{}` declares {methods} methods; one is typical",
                        t.as_str()
                    ));
                }
            }
        }
        SortKind::EC => {
            let (text, found) = resolve("caller", Selector::Method)?;
            if found.is_empty() {
                return Err(SortError::CallerUnresolved(text));
            }
        }
        SortKind::RSI | SortKind::SC => {
            let (text, found) = resolve("role", Selector::Type)?;
            if found.is_empty() {
                return Err(SortError::RoleUnresolved(text));
            }
        }
        SortKind::EP => {
            let (text, found) = resolve("seed", Selector::Method)?;
            if found.is_empty() {
                return Err(SortError::SeedUnresolved(text));
            }
            let (text, found) = resolve("exception", Selector::Class)?;
            if found.is_empty() {
                return Err(SortError::ExceptionUnresolved(text));
            }
        }
        SortKind::DBE => {
            let ty = pattern(spec, "type", Selector::Type)?;
            if ev.pattern(&ty).is_empty() {
                return Err(SortError::TypeUnresolved(ty.to_string()));
            }
            let field = parse_pattern(&format!("field {}", member_of(&ty, required(spec, "field"))))
                .map_err(|e| bad("field", e))?;
            if ev.pattern(&field).is_empty() {
                return Err(SortError::FieldUnresolved(field.to_string()));
            }
        }
        SortKind::PE | SortKind::DE => {}
    }
    Ok(warnings)
}

/// Named classes: anonymous classes cannot declare constructors.
fn is_named_class(store: &FactStore, id: &EntityId) -> bool {
    id.kind() == EntityKind::Class
        && store
            .entity(id)
            .is_some_and(|e| !e.simple_name.chars().all(|c| c.is_ascii_digit()))
}

fn obligations(
    kind: Obligation,
    store: &FactStore,
    subjects: &EntitySet,
    result: &TupleSet,
) -> Vec<EntityId> {
    match kind {
        Obligation::Declares { classes_only } => {
            let sources = result.sources();
            subjects
                .iter()
                .filter(|id| {
                    if classes_only {
                        is_named_class(store, id)
                    } else {
                        matches!(id.kind(), EntityKind::Class | EntityKind::Interface)
                    }
                })
                .filter(|id| !sources.contains(*id))
                .cloned()
                .collect()
        }
        Obligation::References => {
            let types: Vec<&EntityId> = subjects
                .iter()
                .filter(|id| matches!(id.kind(), EntityKind::Class | EntityKind::Interface))
                .collect();
            let candidates: Vec<&EntityId> = if types.is_empty() {
                subjects.iter().collect()
            } else {
                types
            };
            let sources = result.sources();
            candidates
                .into_iter()
                .filter(|s| {
                    let mut within = EntitySet::new();
                    collect_descendants(store, s, &mut within);
                    within.is_disjoint(&sources)
                })
                .cloned()
                .collect()
        }
    }
}

fn collect_descendants(store: &FactStore, id: &EntityId, out: &mut EntitySet) {
    out.insert(id.clone());
    for c in store.children(id) {
        collect_descendants(store, c, out);
    }
}

pub(super) fn instantiate(
    store: &FactStore,
    roles: &[RoleSpec],
    name: &str,
    spec: &SortSpec,
) -> Result<SortInstance, SortError> {
    let generated = generate(spec)?;
    let view = if roles.is_empty() {
        None
    } else {
        Some(overlay_roles(store, roles)?)
    };
    let view_store = view.as_ref().unwrap_or(store);
    let warnings = validate(spec, view_store)?;
    let (value, env) = eval_program(&generated.query, view_store)?;
    let Value::Tuples(result) = value else {
        unreachable!("sort templates end in a relation")
    };

    if matches!(spec.kind, SortKind::PE | SortKind::DE) {
        let ctx_var = if spec.kind == SortKind::PE { "<src_context>" } else { "<context>" };
        let ctx = env.get(ctx_var).and_then(Value::as_entities).cloned().unwrap_or_default();
        if ctx.is_empty() {
            let which = if spec.kind == SortKind::PE { "source" } else { "rule" };
            return Err(SortError::EmptyContext(which.into()));
        }
        if spec.kind == SortKind::PE
            && env.get("<tgt_context>").and_then(Value::as_entities).is_none_or(|t| t.is_empty())
        {
            return Err(SortError::EmptyContext("target".into()));
        }
    }
    let obligations = generated.obligations.map(|kind| {
        let ctx_var = if spec.kind == SortKind::PE { "<src_context>" } else { "<context>" };
        let subjects = env.get(ctx_var).and_then(Value::as_entities).cloned().unwrap_or_default();
        obligations(kind, view_store, &subjects, &result)
    });

    Ok(SortInstance {
        name: name.to_string(),
        kind: spec.kind,
        params: spec.params.clone(),
        query_text: generated.query.to_string(),
        result: result.tuples(),
        obligations,
        warnings,
        store_hash: store.hash().to_string(),
    })
}

macro_rules! builder {
    ($(#[$doc:meta])* $name:ident, $kind:expr, $($param:ident),+) => {
        $(#[$doc])*
        pub fn $name(store: &FactStore, $($param: &str),+) -> Result<SortInstance, SortError> {
            let spec = SortSpec::new($kind, [$((stringify!($param), $param)),+]);
            instantiate(store, &[], &format!("{} {}", $kind, [$($param),+].join(", ")), &spec)
        }
    };
}

builder!(
    /// Consistent behavior: calls from a context to a common action.
    cb_query, SortKind::CB, context, target
);
builder!(
    /// Contract enforcement: same shape as CB, different intent.
    ce_query, SortKind::CE, context, target
);
/// Interfacing layer: references from a type to the type of one of its
/// fields or accessors.
pub fn er_query(store: &FactStore, ty: &str, reference: &str) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(SortKind::ER, [("type", ty), ("reference", reference)]);
    instantiate(store, &[], &format!("ER {ty}, {reference}"), &spec)
}

/// Redirection layer: same-name forwarding calls through a reference.
pub fn rl_query(store: &FactStore, ty: &str, reference: &str) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(SortKind::RL, [("type", ty), ("reference", reference)]);
    instantiate(store, &[], &format!("RL {ty}, {reference}"), &spec)
}

/// Add variability: creators of a method object calling its consumers.
pub fn av_query(store: &FactStore, ty: &str) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(SortKind::AV, [("type", ty)]);
    instantiate(store, &[], &format!("AV {ty}"), &spec)
}

/// Expose context: calls passing a named argument down the call chain.
pub fn ec_query(
    store: &FactStore,
    caller: &str,
    arg_name: &str,
    arg_type: &str,
    transitive: bool,
) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(
        SortKind::EC,
        [
            ("caller", caller),
            ("arg_name", arg_name),
            ("arg_type", arg_type),
            ("transitive", if transitive { "true" } else { "false" }),
        ],
    );
    instantiate(store, &[], &format!("EC {caller}, {arg_name}"), &spec)
}

/// Role superimposition: context types implementing or extending a role.
pub fn rsi_query(store: &FactStore, roles: &[RoleSpec], role: &str, context: &str) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(SortKind::RSI, [("role", role), ("context", context)]);
    instantiate(store, roles, &format!("RSI {role}"), &spec)
}

/// Support classes: nested classes of a context implementing a role.
pub fn sc_query(store: &FactStore, roles: &[RoleSpec], context: &str, role: &str) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(SortKind::SC, [("context", context), ("role", role)]);
    instantiate(store, roles, &format!("SC {role}"), &spec)
}

/// Policy enforcement: references between two contexts. `require` also
/// records the source elements with no reference.
pub fn pe_query(store: &FactStore, source: &str, target: &str, require: bool) -> Result<SortInstance, SortError> {
    let polarity = if require { "require" } else { "forbid" };
    let spec = SortSpec::new(
        SortKind::PE,
        [("source", source), ("target", target), ("polarity", polarity)],
    );
    instantiate(store, &[], &format!("PE {polarity}"), &spec)
}

/// Exception propagation: methods that call the seed and rethrow.
pub fn ep_query(
    store: &FactStore,
    seed: &str,
    exception: &str,
    context: &str,
    transitive: bool,
) -> Result<SortInstance, SortError> {
    let spec = SortSpec::new(
        SortKind::EP,
        [
            ("seed", seed),
            ("exception", exception),
            ("context", context),
            ("transitive", if transitive { "true" } else { "false" }),
        ],
    );
    instantiate(store, &[], &format!("EP {seed}, {exception}"), &spec)
}

builder!(
    /// Design enforcement: context types declaring a required member.
    de_query, SortKind::DE, context, member
);

/// Dynamic behavior enforcement: reads and writes of a guard field.
pub fn dbe_query(store: &FactStore, ty: &str, field: &str, context: Option<&str>) -> Result<SortInstance, SortError> {
    let mut spec = SortSpec::new(SortKind::DBE, [("type", ty), ("field", field)]);
    if let Some(c) = context {
        spec.params.insert("context".into(), c.into());
    }
    instantiate(store, &[], &format!("DBE {ty}.{field}"), &spec)
}
