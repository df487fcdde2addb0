// SPDX-License-Identifier: Apache-2.0

//! Query syntax trees and their canonical text form.

use std::fmt;

use crate::facts::EntityId;

use super::pattern::Pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Invokes,
    Declares,
    Contains,
    Implements,
    Extends,
    Throws,
    Get,
    Set,
    Creates,
    Args,
    TypeOf,
    Returns,
    Params,
    References,
    Compares,
    /// Pairs added by `closure(..)`; not a query primitive.
    Closure,
}

impl Relation {
    pub const PRIMITIVES: [Relation; 15] = [
        Relation::Invokes,
        Relation::Declares,
        Relation::Contains,
        Relation::Implements,
        Relation::Extends,
        Relation::Throws,
        Relation::Get,
        Relation::Set,
        Relation::Creates,
        Relation::Args,
        Relation::TypeOf,
        Relation::Returns,
        Relation::Params,
        Relation::References,
        Relation::Compares,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Invokes => "invokes",
            Relation::Declares => "declares",
            Relation::Contains => "contains",
            Relation::Implements => "implements",
            Relation::Extends => "extends",
            Relation::Throws => "throws",
            Relation::Get => "get",
            Relation::Set => "set",
            Relation::Creates => "creates",
            Relation::Args => "args",
            Relation::TypeOf => "typeof",
            Relation::Returns => "returns",
            Relation::Params => "params",
            Relation::References => "references",
            Relation::Compares => "compares",
            Relation::Closure => "closure",
        }
    }

    pub fn from_name(name: &str) -> Option<Relation> {
        Relation::PRIMITIVES.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// A bound name, written `<name>` or bare.
    Var(String),
    Pattern(Pattern),
    /// `type (T)`: the type and its declared members.
    TypeMembers(String),
    /// `package p`: types in the package and their members.
    Package(String),
    /// `project P`: everything under the project root.
    Project(String),
    /// `{ "id", ... }`
    Enumeration(Vec<EntityId>),
    Primitive(Relation, Box<Expr>, Box<Expr>),
    SourceOf(Box<Expr>),
    TargetOf(Box<Expr>),
    Closure(Box<Expr>),
    /// Tuples of the first operand whose endpoints lie in the other two.
    Restrict(Box<Expr>, Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn prim(rel: Relation, left: Expr, right: Expr) -> Expr {
        Expr::Primitive(rel, Box::new(left), Box::new(right))
    }

    pub fn and(self, other: Expr) -> Expr {
        Expr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Expr) -> Expr {
        Expr::Or(Box::new(self), Box::new(other))
    }

    pub fn source_of(self) -> Expr {
        Expr::SourceOf(Box::new(self))
    }

    pub fn target_of(self) -> Expr {
        Expr::TargetOf(Box::new(self))
    }

    pub fn closure(self) -> Expr {
        Expr::Closure(Box::new(self))
    }

    pub fn restrict(self, left: Expr, right: Expr) -> Expr {
        Expr::Restrict(Box::new(self), Box::new(left), Box::new(right))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            _ => 3,
        }
    }

    /// Variable names referenced by this expression.
    pub fn vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Var(v) => out.push(v.clone()),
            Expr::Pattern(_)
            | Expr::TypeMembers(_)
            | Expr::Package(_)
            | Expr::Project(_)
            | Expr::Enumeration(_) => {}
            Expr::Primitive(_, a, b) | Expr::And(a, b) | Expr::Or(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Expr::SourceOf(a) | Expr::TargetOf(a) | Expr::Closure(a) => a.vars(out),
            Expr::Restrict(a, b, c) => {
                a.vars(out);
                b.vars(out);
                c.vars(out);
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if e.precedence() < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Pattern(p) => write!(f, "{p}"),
            Expr::TypeMembers(name) => write!(f, "type ({name})"),
            Expr::Package(p) => write!(f, "package {p}"),
            Expr::Project(p) => write!(f, "project {p}"),
            Expr::Enumeration(ids) => {
                f.write_str("{")?;
                for (i, id) in ids.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{:?}", id.as_str())?;
                }
                f.write_str("}")
            }
            Expr::Primitive(rel, a, b) => write!(f, "{rel}({a}, {b})"),
            Expr::SourceOf(a) => write!(f, "sourceof({a})"),
            Expr::TargetOf(a) => write!(f, "targetof({a})"),
            Expr::Closure(a) => write!(f, "closure({a})"),
            Expr::Restrict(a, b, c) => write!(f, "restrict({a}, {b}, {c})"),
            Expr::And(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(" && ")?;
                write_operand(f, b, 3)
            }
            Expr::Or(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" || ")?;
                write_operand(f, b, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    /// `<name> = expr;` or `name = expr;`
    Var(String),
    /// `Name(a, b) = expr;`
    Head { name: String, params: Vec<String> },
}

impl Binding {
    pub fn name(&self) -> &str {
        match self {
            Binding::Var(n) => n,
            Binding::Head { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub binding: Option<Binding>,
    pub expr: Expr,
}

/// A query program: bindings evaluated in order; the last statement is the
/// result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub stmts: Vec<Stmt>,
}

impl Query {
    pub fn single(expr: Expr) -> Query {
        Query {
            stmts: vec![Stmt {
                binding: None,
                expr,
            }],
        }
    }

    pub fn result(&self) -> &Expr {
        &self.stmts.last().expect("queries are nonempty").expr
    }

    /// Names bound by statements, in order.
    pub fn bindings(&self) -> Vec<&str> {
        self.stmts
            .iter()
            .filter_map(|s| s.binding.as_ref().map(Binding::name))
            .collect()
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for stmt in &self.stmts {
            match &stmt.binding {
                Some(Binding::Var(name)) => write!(f, "{name} = ")?,
                Some(Binding::Head { name, params }) => {
                    write!(f, "{name}({}) = ", params.join(", "))?
                }
                None => {}
            }
            writeln!(f, "{};", stmt.expr)?;
        }
        Ok(())
    }
}
