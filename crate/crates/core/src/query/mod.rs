// SPDX-License-Identifier: Apache-2.0

//! Relational queries over program facts.
//!
//! A query is a sequence of bindings followed by a result expression. Terms
//! are name patterns or contexts that evaluate to entity sets; relation
//! primitives turn two entity sets into a tuple set; `sourceof`/`targetof`
//! project back to entity sets. The surface syntax is documented in
//! `docs/query.md`.

mod ast;
mod eval;
mod parser;
mod pattern;
mod roles;

pub use ast::{Binding, Expr, Query, Relation, Stmt};
pub use eval::{
    closure, eval, eval_context, eval_program, EntitySet, Env, Evaluator, ResultSet, Tuple, TupleSet, Value,
    REFERENCE_EDGES,
};
pub use parser::{parse_expr, parse_pattern, parse_query};
pub use pattern::{glob, name_matches, ParamPattern, Pattern, Selector};
pub use roles::{overlay_roles, role_entity, OverlayError, RoleSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: u32, col: u32, message: String },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("closure needs a tuple set, found an entity set")]
    ClosureOnEntitySet,
    #[error("malformed pattern `{pattern}`: {reason}")]
    Pattern { pattern: String, reason: String },
}
