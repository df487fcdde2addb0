// SPDX-License-Identifier: Apache-2.0

//! Fact extraction from parsed OOSL units.
//!
//! Extraction runs in four passes over the syntax trees: type declarations
//! (named, nested and anonymous), supertypes, member signatures, and finally
//! method bodies. Calls are resolved statically against the declared type of
//! the receiver; anything that cannot be resolved becomes a warning.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::facts::{
    Entity, EntityId, EntityKind, Fact, FactKind, FactStore, FactsError, Location, StoreBuilder,
};

use super::ast::*;

const PRIMITIVES: [&str; 9] = [
    "void", "int", "long", "short", "byte", "char", "boolean", "float", "double",
];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ResolutionWarning {
    pub site: Location,
    pub message: String,
}

impl fmt::Display for ResolutionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.site, self.message)
    }
}

#[derive(Debug)]
pub struct Extraction {
    pub store: FactStore,
    pub warnings: Vec<ResolutionWarning>,
}

impl Extraction {
    /// Plain-text diagnostics report, one warning per line.
    pub fn diagnostics(&self) -> String {
        self.warnings.iter().map(|w| format!("{w}\n")).collect()
    }
}

struct FieldInfo {
    name: String,
    id: EntityId,
    ty: Option<usize>,
}

struct MethodInfo<'a> {
    name: String,
    arity: usize,
    id: EntityId,
    key: String,
    ret: Option<usize>,
    decl: &'a MethodDecl,
    params: Vec<(String, EntityId, Option<usize>)>,
}

struct TypeInfo<'a> {
    id: EntityId,
    qname: String,
    simple: String,
    kind: TypeKind,
    package: String,
    file: &'a str,
    enclosing: Option<usize>,
    anonymous: bool,
    members: &'a [Member],
    declared_extends: &'a [TypeRef],
    declared_implements: &'a [TypeRef],
    anon_base: Option<&'a TypeRef>,
    superclass: Option<usize>,
    interfaces: Vec<usize>,
    nested: HashMap<String, usize>,
    fields: Vec<FieldInfo>,
    methods: Vec<MethodInfo<'a>>,
    ctors: Vec<MethodInfo<'a>>,
}

enum Resolved {
    Primitive,
    Found(usize),
    Unresolved,
    Ambiguous,
}

struct Extractor<'a> {
    types: Vec<TypeInfo<'a>>,
    by_qname: HashMap<String, usize>,
    by_simple: HashMap<String, Vec<usize>>,
    builder: StoreBuilder,
    warnings: Vec<ResolutionWarning>,
}

/// Extracts a sealed fact store from parsed units. Units are processed in
/// path order, so the result does not depend on the order they are given in.
pub fn extract(units: &[SourceUnit], project: &str) -> Result<Extraction, FactsError> {
    let mut sorted: Vec<&SourceUnit> = units.iter().collect();
    sorted.sort_by(|a, b| a.path.cmp(&b.path));

    let mut ex = Extractor {
        types: Vec::new(),
        by_qname: HashMap::new(),
        by_simple: HashMap::new(),
        builder: StoreBuilder::new(),
        warnings: Vec::new(),
    };
    ex.builder
        .add_entity(Entity::new(EntityKind::Project, project, project, ""))?;
    for unit in &sorted {
        ex.declare_unit(unit)?;
    }
    ex.resolve_supertypes()?;
    ex.declare_members()?;
    ex.walk_bodies()?;

    let Extractor {
        builder,
        mut warnings,
        ..
    } = ex;
    warnings.sort();
    warnings.dedup();
    Ok(Extraction {
        store: builder.seal()?,
        warnings,
    })
}

fn loc(file: &str, line: u32) -> Location {
    Location::line(file, line)
}

/// Anonymous classes appearing directly in a statement or expression, not
/// descending into their bodies.
fn anon_in_stmt<'a>(stmt: &'a Stmt, out: &mut Vec<(&'a TypeRef, &'a AnonClass)>) {
    match stmt {
        Stmt::Local { init, .. } => {
            if let Some(e) = init {
                anon_in_expr(e, out);
            }
        }
        Stmt::Expr(e) | Stmt::Throw(e, _) => anon_in_expr(e, out),
        Stmt::Return(e, _) => {
            if let Some(e) = e {
                anon_in_expr(e, out);
            }
        }
        Stmt::If {
            cond,
            then,
            otherwise,
        } => {
            anon_in_expr(cond, out);
            anon_in_stmt(then, out);
            if let Some(o) = otherwise {
                anon_in_stmt(o, out);
            }
        }
        Stmt::While { cond, body } => {
            anon_in_expr(cond, out);
            anon_in_stmt(body, out);
        }
        Stmt::For {
            init,
            cond,
            update,
            body,
        } => {
            if let Some(i) = init {
                anon_in_stmt(i, out);
            }
            for e in cond.iter().chain(update.iter()) {
                anon_in_expr(e, out);
            }
            anon_in_stmt(body, out);
        }
        Stmt::Try {
            body,
            catches,
            finally,
        } => {
            body.stmts.iter().for_each(|s| anon_in_stmt(s, out));
            for c in catches {
                c.body.stmts.iter().for_each(|s| anon_in_stmt(s, out));
            }
            if let Some(f) = finally {
                f.stmts.iter().for_each(|s| anon_in_stmt(s, out));
            }
        }
        Stmt::Block(b) => b.stmts.iter().for_each(|s| anon_in_stmt(s, out)),
        Stmt::Empty => {}
    }
}

fn anon_in_expr<'a>(expr: &'a Expr, out: &mut Vec<(&'a TypeRef, &'a AnonClass)>) {
    match &expr.kind {
        ExprKind::Name(_) | ExprKind::This | ExprKind::Super | ExprKind::Literal => {}
        ExprKind::Field { recv, .. } => anon_in_expr(recv, out),
        ExprKind::Call { recv, args, .. } => {
            if let Some(r) = recv {
                anon_in_expr(r, out);
            }
            args.iter().for_each(|a| anon_in_expr(a, out));
        }
        ExprKind::CtorCall { args, .. } => args.iter().for_each(|a| anon_in_expr(a, out)),
        ExprKind::New { ty, args, anon } => {
            args.iter().for_each(|a| anon_in_expr(a, out));
            if let Some(a) = anon {
                out.push((ty, a));
            }
        }
        ExprKind::Assign { lhs, rhs, .. } => {
            anon_in_expr(lhs, out);
            anon_in_expr(rhs, out);
        }
        ExprKind::Binary(a, b) => {
            anon_in_expr(a, out);
            anon_in_expr(b, out);
        }
        ExprKind::Unary(a) | ExprKind::Update(a) => anon_in_expr(a, out),
        ExprKind::Conditional(a, b, c) => {
            anon_in_expr(a, out);
            anon_in_expr(b, out);
            anon_in_expr(c, out);
        }
    }
}

impl<'a> Extractor<'a> {
    fn warn(&mut self, site: Location, message: String) {
        self.warnings.push(ResolutionWarning { site, message });
    }

    fn package_id(&mut self, name: &str) -> Result<EntityId, FactsError> {
        let simple = name.rsplit('.').next().unwrap_or(name);
        self.builder
            .add_entity(Entity::new(EntityKind::Package, simple, name, ""))
    }

    fn declare_unit(&mut self, unit: &'a SourceUnit) -> Result<(), FactsError> {
        let pkg = self.package_id(&unit.package)?;
        for decl in &unit.types {
            self.declare_named(decl, None, &pkg, unit)?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn push_type(
        &mut self,
        kind: TypeKind,
        simple: String,
        qname: String,
        enclosing: Option<usize>,
        parent: &EntityId,
        unit: &'a SourceUnit,
        modifiers: &[crate::facts::Modifier],
        span: (u32, u32),
        anon_base: Option<&'a TypeRef>,
        members: &'a [Member],
        declared: (&'a [TypeRef], &'a [TypeRef]),
    ) -> Result<usize, FactsError> {
        let entity_kind = match kind {
            TypeKind::Class => EntityKind::Class,
            TypeKind::Interface => EntityKind::Interface,
        };
        let entity = Entity::new(entity_kind, simple.clone(), qname.clone(), "")
            .in_parent(parent)
            .with_modifiers(modifiers.iter().copied())
            .at(Location::new(unit.path.clone(), span.0, span.1));
        let id = self.builder.add_entity(entity)?;
        let idx = self.types.len();
        self.types.push(TypeInfo {
            id,
            qname: qname.clone(),
            simple: simple.clone(),
            kind,
            package: unit.package.clone(),
            file: &unit.path,
            enclosing,
            anonymous: anon_base.is_some(),
            members,
            declared_extends: declared.0,
            declared_implements: declared.1,
            anon_base,
            superclass: None,
            interfaces: Vec::new(),
            nested: HashMap::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            ctors: Vec::new(),
        });
        self.by_qname.insert(qname, idx);
        if anon_base.is_none() {
            self.by_simple.entry(simple.clone()).or_default().push(idx);
        }
        if let Some(outer) = enclosing {
            self.types[outer].nested.insert(simple, idx);
        }
        Ok(idx)
    }

    fn declare_named(
        &mut self,
        decl: &'a TypeDecl,
        enclosing: Option<usize>,
        parent: &EntityId,
        unit: &'a SourceUnit,
    ) -> Result<(), FactsError> {
        let qname = match enclosing {
            Some(outer) => format!("{}${}", self.types[outer].qname, decl.name),
            None => format!("{}.{}", unit.package, decl.name),
        };
        let idx = self.push_type(
            decl.kind,
            decl.name.clone(),
            qname,
            enclosing,
            parent,
            unit,
            &decl.modifiers,
            (decl.start_line, decl.end_line),
            None,
            &decl.members,
            (&decl.extends, &decl.implements),
        )?;
        self.declare_inner(idx, &decl.members, unit)
    }

    fn declare_inner(
        &mut self,
        idx: usize,
        members: &'a [Member],
        unit: &'a SourceUnit,
    ) -> Result<(), FactsError> {
        let id = self.types[idx].id.clone();
        for member in members {
            let mut anons = Vec::new();
            match member {
                Member::Type(nested) => self.declare_named(nested, Some(idx), &id, unit)?,
                Member::Field(f) => {
                    if let Some(init) = &f.init {
                        anon_in_expr(init, &mut anons);
                    }
                }
                Member::Method(m) | Member::Constructor(m) => {
                    if let Some(body) = &m.body {
                        body.stmts.iter().for_each(|s| anon_in_stmt(s, &mut anons));
                    }
                }
            }
            for (base, anon) in anons {
                let qname = format!("{}${}", self.types[idx].qname, anon.ordinal);
                let anon_idx = self.push_type(
                    TypeKind::Class,
                    anon.ordinal.to_string(),
                    qname,
                    Some(idx),
                    &id,
                    unit,
                    &[],
                    (anon.start_line, anon.end_line),
                    Some(base),
                    &anon.members,
                    (&[], &[]),
                )?;
                self.declare_inner(anon_idx, &anon.members, unit)?;
            }
        }
        Ok(())
    }

    fn resolve_type(&self, name: &str, ctx: usize) -> Resolved {
        if PRIMITIVES.contains(&name) {
            return Resolved::Primitive;
        }
        if let Some((first, rest)) = name.split_once('.') {
            if let Some(&idx) = self.by_qname.get(name) {
                return Resolved::Found(idx);
            }
            if let Resolved::Found(outer) = self.resolve_type(first, ctx) {
                let nested = format!("{}${}", self.types[outer].qname, rest.replace('.', "$"));
                if let Some(&idx) = self.by_qname.get(&nested) {
                    return Resolved::Found(idx);
                }
            }
            return Resolved::Unresolved;
        }
        let mut cursor = Some(ctx);
        while let Some(t) = cursor {
            let info = &self.types[t];
            if let Some(&idx) = info.nested.get(name) {
                return Resolved::Found(idx);
            }
            if !info.anonymous && info.simple == name {
                return Resolved::Found(t);
            }
            cursor = info.enclosing;
        }
        let local = format!("{}.{}", self.types[ctx].package, name);
        if let Some(&idx) = self.by_qname.get(&local) {
            return Resolved::Found(idx);
        }
        match self.by_simple.get(name).map(Vec::as_slice) {
            Some([only]) => Resolved::Found(*only),
            Some([_, _, ..]) => Resolved::Ambiguous,
            _ => Resolved::Unresolved,
        }
    }

    /// Resolves a type reference, warning when it cannot be found.
    fn type_or_warn(&mut self, tref: &TypeRef, ctx: usize) -> Option<usize> {
        match self.resolve_type(&tref.name, ctx) {
            Resolved::Found(idx) => Some(idx),
            Resolved::Primitive => None,
            Resolved::Ambiguous => {
                let site = loc(self.types[ctx].file, tref.line);
                self.warn(site, format!("ambiguous type `{}`", tref.name));
                None
            }
            Resolved::Unresolved => {
                let site = loc(self.types[ctx].file, tref.line);
                self.warn(site, format!("unresolved type `{}`", tref.name));
                None
            }
        }
    }

    fn type_display(&self, tref: &TypeRef, ctx: usize) -> String {
        match self.resolve_type(&tref.name, ctx) {
            Resolved::Found(idx) => self.types[idx].qname.clone(),
            _ => tref.name.clone(),
        }
    }

    fn add_fact(
        &mut self,
        kind: FactKind,
        source: &EntityId,
        target: &EntityId,
        site: Location,
    ) -> Result<(), FactsError> {
        self.builder.add_fact(Fact::new(kind, source, target, site))
    }

    fn resolve_supertypes(&mut self) -> Result<(), FactsError> {
        for idx in 0..self.types.len() {
            let file = self.types[idx].file;
            let id = self.types[idx].id.clone();
            if let Some(base) = self.types[idx].anon_base {
                if let Some(t) = self.type_or_warn(base, idx) {
                    let target = self.types[t].id.clone();
                    match self.types[t].kind {
                        TypeKind::Class => {
                            self.types[idx].superclass = Some(t);
                            self.add_fact(FactKind::Extends, &id, &target, loc(file, base.line))?;
                        }
                        TypeKind::Interface => {
                            self.types[idx].interfaces.push(t);
                            self.add_fact(FactKind::Implements, &id, &target, loc(file, base.line))?;
                        }
                    }
                }
                continue;
            }
            let kind = self.types[idx].kind;
            for tref in self.types[idx].declared_extends {
                let Some(t) = self.type_or_warn(tref, idx) else { continue };
                let target = self.types[t].id.clone();
                let ok = match (kind, self.types[t].kind) {
                    (TypeKind::Class, TypeKind::Class) => {
                        self.types[idx].superclass = Some(t);
                        true
                    }
                    (TypeKind::Interface, TypeKind::Interface) => {
                        self.types[idx].interfaces.push(t);
                        true
                    }
                    _ => false,
                };
                if ok {
                    self.add_fact(FactKind::Extends, &id, &target, loc(file, tref.line))?;
                } else {
                    self.warn(
                        loc(file, tref.line),
                        format!("`{}` cannot extend `{}`", self.types[idx].qname, tref.name),
                    );
                }
            }
            for tref in self.types[idx].declared_implements {
                let Some(t) = self.type_or_warn(tref, idx) else { continue };
                if self.types[t].kind != TypeKind::Interface {
                    self.warn(
                        loc(file, tref.line),
                        format!("`{}` is not an interface", tref.name),
                    );
                    continue;
                }
                self.types[idx].interfaces.push(t);
                let target = self.types[t].id.clone();
                self.add_fact(FactKind::Implements, &id, &target, loc(file, tref.line))?;
            }
        }
        Ok(())
    }

    fn declare_members(&mut self) -> Result<(), FactsError> {
        for idx in 0..self.types.len() {
            let members = self.types[idx].members;
            for member in members {
                match member {
                    Member::Field(f) => self.declare_field(idx, f)?,
                    Member::Method(m) => self.declare_callable(idx, m, EntityKind::Method)?,
                    Member::Constructor(m) => {
                        self.declare_callable(idx, m, EntityKind::Constructor)?
                    }
                    Member::Type(_) => {}
                }
            }
        }
        Ok(())
    }

    fn declare_field(&mut self, idx: usize, f: &'a FieldDecl) -> Result<(), FactsError> {
        let owner = &self.types[idx];
        let file = owner.file;
        let qname = format!("{}.{}", owner.qname, f.name);
        if self.builder.contains(&EntityId::derive(EntityKind::Field, &qname, "")) {
            self.warn(loc(file, f.line), format!("duplicate field `{}`", f.name));
            return Ok(());
        }
        let entity = Entity::new(
            EntityKind::Field,
            f.name.clone(),
            qname,
            "",
        )
        .in_parent(&owner.id)
        .with_modifiers(f.modifiers.iter().copied())
        .at(loc(file, f.line));
        let id = match self.builder.add_entity(entity) {
            Ok(id) => id,
            Err(FactsError::DuplicateConflict { .. }) => {
                self.warn(loc(file, f.line), format!("duplicate field `{}`", f.name));
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        let ty = self.type_or_warn(&f.ty, idx);
        if let Some(t) = ty {
            let target = self.types[t].id.clone();
            self.add_fact(FactKind::VarType, &id, &target, loc(file, f.line))?;
        }
        self.types[idx].fields.push(FieldInfo {
            name: f.name.clone(),
            id,
            ty,
        });
        Ok(())
    }

    fn declare_callable(
        &mut self,
        idx: usize,
        m: &'a MethodDecl,
        kind: EntityKind,
    ) -> Result<(), FactsError> {
        let file = self.types[idx].file;
        let param_types: Vec<String> = m.params.iter().map(|p| self.type_display(&p.ty, idx)).collect();
        let signature = format!("{}({})", m.name, param_types.join(","));
        let qname = format!("{}.{}", self.types[idx].qname, m.name);
        let key = format!("{}.{}", self.types[idx].qname, signature);
        let owner = self.types[idx].id.clone();
        if self.builder.contains(&EntityId::derive(kind, &qname, &signature)) {
            self.warn(loc(file, m.start_line), format!("duplicate member `{key}`"));
            return Ok(());
        }
        let entity = Entity::new(kind, m.name.clone(), qname, signature)
            .in_parent(&owner)
            .with_modifiers(m.modifiers.iter().copied())
            .at(Location::new(file, m.start_line, m.end_line));
        let id = match self.builder.add_entity(entity) {
            Ok(id) => id,
            Err(FactsError::DuplicateConflict { id }) => {
                self.warn(loc(file, m.start_line), format!("duplicate member `{id}`"));
                return Ok(());
            }
            Err(e) => return Err(e),
        };

        let mut params = Vec::new();
        for p in &m.params {
            let pentity = Entity::new(
                EntityKind::Parameter,
                p.name.clone(),
                format!("{key}.{}", p.name),
                "",
            )
            .in_parent(&id)
            .at(loc(file, p.line));
            let pid = match self.builder.add_entity(pentity) {
                Ok(pid) => pid,
                Err(FactsError::DuplicateConflict { .. }) => {
                    self.warn(loc(file, p.line), format!("duplicate parameter `{}`", p.name));
                    continue;
                }
                Err(e) => return Err(e),
            };
            let ty = self.type_or_warn(&p.ty, idx);
            if let Some(t) = ty {
                let target = self.types[t].id.clone();
                self.add_fact(FactKind::ParamType, &pid, &target, loc(file, p.line))?;
            }
            params.push((p.name.clone(), pid, ty));
        }

        for tref in &m.throws {
            if let Some(t) = self.type_or_warn(tref, idx) {
                if self.types[t].kind == TypeKind::Class {
                    let target = self.types[t].id.clone();
                    self.add_fact(FactKind::Throws, &id, &target, loc(file, tref.line))?;
                } else {
                    self.warn(loc(file, tref.line), format!("`{}` is not a class", tref.name));
                }
            }
        }

        let ret = match &m.ret {
            Some(r) => self.type_or_warn(r, idx),
            None => None,
        };
        if let (Some(t), EntityKind::Method) = (ret, kind) {
            let target = self.types[t].id.clone();
            self.add_fact(FactKind::Returns, &id, &target, loc(file, m.start_line))?;
        }

        let info = MethodInfo {
            name: m.name.clone(),
            arity: m.params.len(),
            id,
            key,
            ret,
            decl: m,
            params,
        };
        if kind == EntityKind::Constructor {
            self.types[idx].ctors.push(info);
        } else {
            self.types[idx].methods.push(info);
        }
        Ok(())
    }

    /// Member lookup order: the superclass chain first, then interfaces
    /// breadth-first.
    fn lookup_order(&self, start: usize) -> Vec<usize> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        let mut cursor = Some(start);
        while let Some(t) = cursor {
            if !seen.insert(t) {
                break;
            }
            order.push(t);
            cursor = self.types[t].superclass;
        }
        let mut i = 0;
        while i < order.len() {
            for &iface in &self.types[order[i]].interfaces {
                if seen.insert(iface) {
                    order.push(iface);
                }
            }
            i += 1;
        }
        order
    }

    fn lookup_method(&self, start: usize, name: &str, arity: usize) -> Option<(EntityId, Option<usize>)> {
        self.lookup_order(start).into_iter().find_map(|t| {
            self.types[t]
                .methods
                .iter()
                .find(|m| m.name == name && m.arity == arity)
                .map(|m| (m.id.clone(), m.ret))
        })
    }

    fn lookup_field(&self, start: usize, name: &str) -> Option<(EntityId, Option<usize>)> {
        self.lookup_order(start).into_iter().find_map(|t| {
            self.types[t]
                .fields
                .iter()
                .find(|f| f.name == name)
                .map(|f| (f.id.clone(), f.ty))
        })
    }

    fn lookup_ctor(&self, t: usize, arity: usize) -> Option<EntityId> {
        self.types[t]
            .ctors
            .iter()
            .find(|c| c.arity == arity)
            .map(|c| c.id.clone())
    }

    fn walk_bodies(&mut self) -> Result<(), FactsError> {
        for idx in 0..self.types.len() {
            let jobs: Vec<(EntityId, String, &'a MethodDecl, Vec<(String, EntityId, Option<usize>)>)> =
                self.types[idx]
                    .methods
                    .iter()
                    .chain(self.types[idx].ctors.iter())
                    .filter(|m| m.decl.body.is_some())
                    .map(|m| (m.id.clone(), m.key.clone(), m.decl, m.params.clone()))
                    .collect();
            for (id, key, decl, params) in jobs {
                let mut scope = HashMap::new();
                for (name, pid, ty) in params {
                    scope.insert(name, Var { id: pid, ty });
                }
                let mut walker = BodyWalker {
                    ex: self,
                    ty: idx,
                    method: id,
                    key,
                    scopes: vec![scope],
                    local_counts: HashMap::new(),
                };
                walker.block(decl.body.as_ref().unwrap())?;
            }
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Var {
    id: EntityId,
    ty: Option<usize>,
}

#[derive(Clone, Copy, PartialEq)]
enum Val {
    /// A value of the given static type.
    Typed(usize),
    /// A type name used as a receiver (static access).
    Static(usize),
    /// A value whose type is primitive or otherwise untracked.
    Unknown,
    /// A name that resolves to nothing; not yet reported.
    Unresolved,
}

#[derive(Clone, Copy, PartialEq)]
enum Access {
    Read,
    Write,
    /// Read then written: `+=`, `++`.
    Update,
}

struct BodyWalker<'e, 'a> {
    ex: &'e mut Extractor<'a>,
    ty: usize,
    method: EntityId,
    key: String,
    scopes: Vec<HashMap<String, Var>>,
    local_counts: HashMap<String, u32>,
}

impl BodyWalker<'_, '_> {
    fn site(&self, line: u32) -> Location {
        loc(self.ex.types[self.ty].file, line)
    }

    fn fact(&mut self, kind: FactKind, target: &EntityId, line: u32) -> Result<(), FactsError> {
        let site = self.site(line);
        let method = self.method.clone();
        self.ex.add_fact(kind, &method, target, site)
    }

    fn warn(&mut self, line: u32, message: String) {
        let site = self.site(line);
        self.ex.warn(site, message);
    }

    fn var(&self, name: &str) -> Option<&Var> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    /// Current type, then lexically enclosing types.
    fn enclosing_chain(&self) -> Vec<usize> {
        let mut chain = Vec::new();
        let mut cursor = Some(self.ty);
        while let Some(t) = cursor {
            chain.push(t);
            cursor = self.ex.types[t].enclosing;
        }
        chain
    }

    fn declare_local(&mut self, tref: &TypeRef, name: &str, line: u32) -> Result<(), FactsError> {
        let count = self.local_counts.entry(name.to_string()).or_insert(0);
        *count += 1;
        let qname = if *count == 1 {
            format!("{}.{name}", self.key)
        } else {
            format!("{}.{name}${count}", self.key)
        };
        let entity = Entity::new(EntityKind::LocalVariable, name, qname, "")
            .in_parent(&self.method)
            .at(self.site(line));
        let id = self.ex.builder.add_entity(entity)?;
        let ty = self.ex.type_or_warn(tref, self.ty);
        if let Some(t) = ty {
            let target = self.ex.types[t].id.clone();
            let site = self.site(line);
            self.ex.add_fact(FactKind::VarType, &id, &target, site)?;
        }
        self.scopes
            .last_mut()
            .unwrap()
            .insert(name.to_string(), Var { id, ty });
        Ok(())
    }

    fn block(&mut self, block: &Block) -> Result<(), FactsError> {
        self.scopes.push(HashMap::new());
        for stmt in &block.stmts {
            self.stmt(stmt)?;
        }
        self.scopes.pop();
        Ok(())
    }

    fn scoped(&mut self, stmt: &Stmt) -> Result<(), FactsError> {
        self.scopes.push(HashMap::new());
        self.stmt(stmt)?;
        self.scopes.pop();
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), FactsError> {
        match stmt {
            Stmt::Local {
                ty,
                name,
                init,
                line,
            } => {
                if let Some(e) = init {
                    self.expr(e)?;
                }
                self.declare_local(ty, name, *line)?;
            }
            Stmt::Expr(e) => {
                self.expr(e)?;
            }
            Stmt::If {
                cond,
                then,
                otherwise,
            } => {
                self.expr(cond)?;
                self.scoped(then)?;
                if let Some(o) = otherwise {
                    self.scoped(o)?;
                }
            }
            Stmt::While { cond, body } => {
                self.expr(cond)?;
                self.scoped(body)?;
            }
            Stmt::For {
                init,
                cond,
                update,
                body,
            } => {
                self.scopes.push(HashMap::new());
                if let Some(i) = init {
                    self.stmt(i)?;
                }
                for e in cond.iter().chain(update.iter()) {
                    self.expr(e)?;
                }
                self.scoped(body)?;
                self.scopes.pop();
            }
            Stmt::Return(e, _) => {
                if let Some(e) = e {
                    self.expr(e)?;
                }
            }
            Stmt::Throw(e, line) => {
                if let Val::Typed(t) = self.expr(e)? {
                    if self.ex.types[t].kind == TypeKind::Class {
                        let target = self.ex.types[t].id.clone();
                        self.fact(FactKind::Throws, &target, *line)?;
                    }
                }
            }
            Stmt::Try {
                body,
                catches,
                finally,
            } => {
                self.block(body)?;
                for c in catches {
                    self.scopes.push(HashMap::new());
                    self.declare_local(&c.ty, &c.name, c.line)?;
                    self.block(&c.body)?;
                    self.scopes.pop();
                }
                if let Some(f) = finally {
                    self.block(f)?;
                }
            }
            Stmt::Block(b) => self.block(b)?,
            Stmt::Empty => {}
        }
        Ok(())
    }

    /// Evaluates an expression whose value is used directly; reports names
    /// that do not resolve.
    fn expr(&mut self, e: &Expr) -> Result<Val, FactsError> {
        let val = self.value(e, Access::Read)?;
        if val == Val::Unresolved {
            if let ExprKind::Name(n) = &e.kind {
                self.warn(e.line, format!("unresolved name `{n}`"));
            }
            return Ok(Val::Unknown);
        }
        Ok(val)
    }

    fn typed(ty: Option<usize>) -> Val {
        ty.map(Val::Typed).unwrap_or(Val::Unknown)
    }

    fn value(&mut self, e: &Expr, access: Access) -> Result<Val, FactsError> {
        Ok(match &e.kind {
            ExprKind::Literal => Val::Unknown,
            ExprKind::This => Val::Typed(self.ty),
            ExprKind::Super => Self::typed(self.ex.types[self.ty].superclass),
            ExprKind::Name(name) => self.name(name, access, e.line)?,
            ExprKind::Field { recv, name } => {
                let receiver = self.value(recv, Access::Read)?;
                match receiver {
                    Val::Typed(t) | Val::Static(t) => match self.ex.lookup_field(t, name) {
                        Some((fid, fty)) => {
                            self.field_access(&fid, access, e.line)?;
                            Self::typed(fty)
                        }
                        None => {
                            let owner = self.ex.types[t].qname.clone();
                            self.warn(e.line, format!("no field `{name}` in `{owner}`"));
                            Val::Unknown
                        }
                    },
                    _ => {
                        self.warn(e.line, format!("cannot resolve receiver of `.{name}`"));
                        Val::Unknown
                    }
                }
            }
            ExprKind::Call { recv, name, args } => {
                let receiver = match recv {
                    Some(r) => Some(self.value(r, Access::Read)?),
                    None => None,
                };
                self.args(args, e.line)?;
                let target = match receiver {
                    None => self
                        .enclosing_chain()
                        .into_iter()
                        .find_map(|t| self.ex.lookup_method(t, name, args.len())),
                    Some(Val::Typed(t)) | Some(Val::Static(t)) => {
                        self.ex.lookup_method(t, name, args.len())
                    }
                    Some(_) => None,
                };
                match target {
                    Some((mid, ret)) => {
                        self.fact(FactKind::Invokes, &mid, e.line)?;
                        Self::typed(ret)
                    }
                    None => {
                        let what = match (&receiver, recv.as_deref()) {
                            (Some(Val::Unresolved), Some(Expr { kind: ExprKind::Name(n), .. })) => {
                                format!("cannot resolve call `{n}.{name}(..)`: `{n}` is not declared")
                            }
                            (Some(Val::Typed(t)) | Some(Val::Static(t)), _) => format!(
                                "no method `{name}` with {} argument(s) in `{}`",
                                args.len(),
                                self.ex.types[*t].qname
                            ),
                            (Some(_), _) => format!("cannot resolve receiver type of `{name}(..)`"),
                            (None, _) => format!(
                                "no method `{name}` with {} argument(s) in scope",
                                args.len()
                            ),
                        };
                        self.warn(e.line, what);
                        Val::Unknown
                    }
                }
            }
            ExprKind::CtorCall { is_super, args } => {
                self.args(args, e.line)?;
                let target = if *is_super {
                    self.ex.types[self.ty].superclass
                } else {
                    Some(self.ty)
                };
                if let Some(t) = target {
                    match self.ex.lookup_ctor(t, args.len()) {
                        Some(cid) => self.fact(FactKind::Invokes, &cid, e.line)?,
                        None if args.is_empty() => {}
                        None => self.warn(
                            e.line,
                            format!("no constructor with {} argument(s) in `{}`", args.len(), self.ex.types[t].qname),
                        ),
                    }
                }
                Val::Unknown
            }
            ExprKind::New { ty, args, anon } => {
                self.args(args, e.line)?;
                let Some(base) = self.ex.type_or_warn(ty, self.ty) else {
                    return Ok(Val::Unknown);
                };
                let created = match anon {
                    Some(a) => {
                        let qname = format!("{}${}", self.ex.types[self.ty].qname, a.ordinal);
                        self.ex.by_qname[&qname]
                    }
                    None => base,
                };
                let created_id = self.ex.types[created].id.clone();
                self.fact(FactKind::Creates, &created_id, e.line)?;
                if self.ex.types[base].kind == TypeKind::Class {
                    match self.ex.lookup_ctor(base, args.len()) {
                        Some(cid) => self.fact(FactKind::Invokes, &cid, e.line)?,
                        None if args.is_empty() => {}
                        None => self.warn(
                            e.line,
                            format!("no constructor with {} argument(s) in `{}`", args.len(), self.ex.types[base].qname),
                        ),
                    }
                }
                Val::Typed(created)
            }
            ExprKind::Assign { lhs, rhs, compound } => {
                self.expr(rhs)?;
                let access = if *compound { Access::Update } else { Access::Write };
                self.target(lhs, access)?;
                Val::Unknown
            }
            ExprKind::Update(a) => {
                self.target(a, Access::Update)?;
                Val::Unknown
            }
            ExprKind::Binary(a, b) => {
                self.expr(a)?;
                self.expr(b)?;
                Val::Unknown
            }
            ExprKind::Unary(a) => {
                self.expr(a)?;
                Val::Unknown
            }
            ExprKind::Conditional(a, b, c) => {
                self.expr(a)?;
                self.expr(b)?;
                self.expr(c)?;
                Val::Unknown
            }
        })
    }

    fn field_access(&mut self, field: &EntityId, access: Access, line: u32) -> Result<(), FactsError> {
        if access != Access::Write {
            self.fact(FactKind::Get, field, line)?;
        }
        if access != Access::Read {
            self.fact(FactKind::Set, field, line)?;
        }
        Ok(())
    }

    /// Evaluates an assignment or update target.
    fn target(&mut self, e: &Expr, access: Access) -> Result<(), FactsError> {
        if self.value(e, access)? == Val::Unresolved {
            if let ExprKind::Name(n) = &e.kind {
                self.warn(e.line, format!("unresolved name `{n}`"));
            }
        }
        Ok(())
    }

    fn name(&mut self, name: &str, access: Access, line: u32) -> Result<Val, FactsError> {
        if let Some(var) = self.var(name) {
            return Ok(Self::typed(var.ty));
        }
        let field = self
            .enclosing_chain()
            .into_iter()
            .find_map(|t| self.ex.lookup_field(t, name));
        if let Some((fid, fty)) = field {
            self.field_access(&fid, access, line)?;
            return Ok(Self::typed(fty));
        }
        if let Resolved::Found(t) = self.ex.resolve_type(name, self.ty) {
            return Ok(Val::Static(t));
        }
        Ok(Val::Unresolved)
    }

    /// Evaluates call arguments; identifiers naming variables or fields are
    /// recorded as passed arguments.
    fn args(&mut self, args: &[Expr], line: u32) -> Result<(), FactsError> {
        for arg in args {
            self.expr(arg)?;
            let passed = match &arg.kind {
                ExprKind::Name(n) => match self.var(n) {
                    Some(v) => Some(v.id.clone()),
                    None => self
                        .enclosing_chain()
                        .into_iter()
                        .find_map(|t| self.ex.lookup_field(t, n))
                        .map(|(fid, _)| fid),
                },
                ExprKind::Field { recv, name } if matches!(recv.kind, ExprKind::This) => {
                    self.ex.lookup_field(self.ty, name).map(|(fid, _)| fid)
                }
                _ => None,
            };
            if let Some(target) = passed {
                self.fact(FactKind::ArgPass, &target, line)?;
            }
        }
        Ok(())
    }
}
