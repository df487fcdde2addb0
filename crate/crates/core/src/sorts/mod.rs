// SPDX-License-Identifier: Apache-2.0

//! The twelve sort templates as parameterized query builders, and design
//! patterns as compositions of sort instances.

mod builders;
mod patterns;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::facts::{EntityId, FactStore};
use crate::query::{OverlayError, QueryError, RoleSpec, Tuple, TupleSet};

pub use builders::{
    av_query, cb_query, ce_query, dbe_query, de_query, ec_query, ep_query, er_query, generate, pe_query,
    rl_query, rsi_query, sc_query, Generated,
};
pub use patterns::{compose_pattern, BindingsFile, find_pattern, pattern_plan, InstanceTemplate, PatternRow, PlannedInstance, PATTERNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SortKind {
    CB,
    CE,
    ER,
    RL,
    AV,
    EC,
    RSI,
    SC,
    PE,
    EP,
    DE,
    DBE,
}

impl SortKind {
    pub const ALL: [SortKind; 12] = [
        SortKind::CB,
        SortKind::CE,
        SortKind::ER,
        SortKind::RL,
        SortKind::AV,
        SortKind::EC,
        SortKind::RSI,
        SortKind::SC,
        SortKind::PE,
        SortKind::EP,
        SortKind::DE,
        SortKind::DBE,
    ];

    pub fn code(self) -> &'static str {
        match self {
            SortKind::CB => "CB",
            SortKind::CE => "CE",
            SortKind::ER => "ER",
            SortKind::RL => "RL",
            SortKind::AV => "AV",
            SortKind::EC => "EC",
            SortKind::RSI => "RSI",
            SortKind::SC => "SC",
            SortKind::PE => "PE",
            SortKind::EP => "EP",
            SortKind::DE => "DE",
            SortKind::DBE => "DBE",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            SortKind::CB => "Consistent behavior",
            SortKind::CE => "Contract enforcement",
            SortKind::ER => "Interfacing layer",
            SortKind::RL => "Redirection layer",
            SortKind::AV => "Add variability",
            SortKind::EC => "Expose context",
            SortKind::RSI => "Role superimposition",
            SortKind::SC => "Support classes for role superimposition",
            SortKind::PE => "Policy enforcement",
            SortKind::EP => "Exception propagation",
            SortKind::DE => "Design enforcement",
            SortKind::DBE => "Dynamic behavior enforcement",
        }
    }

    pub fn from_code(code: &str) -> Option<SortKind> {
        SortKind::ALL.into_iter().find(|k| k.code().eq_ignore_ascii_case(code))
    }

    /// Parameter names in schema order, with whether each is required.
    pub fn params(self) -> &'static [(&'static str, bool)] {
        match self {
            SortKind::CB | SortKind::CE => &[("context", true), ("target", true)],
            SortKind::ER | SortKind::RL => &[("type", true), ("reference", true)],
            SortKind::AV => &[("type", true)],
            SortKind::EC => &[
                ("caller", true),
                ("arg_name", true),
                ("arg_type", false),
                ("transitive", false),
            ],
            SortKind::RSI => &[("role", true), ("context", true)],
            SortKind::SC => &[("context", true), ("role", true)],
            SortKind::PE => &[("source", true), ("target", true), ("polarity", false)],
            SortKind::EP => &[
                ("seed", true),
                ("exception", true),
                ("context", true),
                ("transitive", false),
            ],
            SortKind::DE => &[("context", true), ("member", true)],
            SortKind::DBE => &[("type", true), ("field", true), ("context", false)],
        }
    }
}

impl fmt::Display for SortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

pub type Params = BTreeMap<String, String>;

/// A sort kind with its parameter values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortSpec {
    pub kind: SortKind,
    pub params: Params,
}

impl SortSpec {
    pub fn new<'a>(kind: SortKind, params: impl IntoIterator<Item = (&'a str, &'a str)>) -> SortSpec {
        SortSpec {
            kind,
            params: params
                .into_iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    pub fn param(&self, name: &str) -> Option<&str> {
        self.params.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortInstance {
    pub name: String,
    pub kind: SortKind,
    pub params: Params,
    pub query_text: String,
    pub result: Vec<Tuple>,
    /// Context elements failing the rule (DE, and PE with `require`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obligations: Option<Vec<EntityId>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub store_hash: String,
}

impl SortInstance {
    pub fn spec(&self) -> SortSpec {
        SortSpec {
            kind: self.kind,
            params: self.params.clone(),
        }
    }

    pub fn tuples(&self) -> TupleSet {
        self.result.iter().cloned().collect()
    }

    pub fn is_stale(&self, store: &FactStore) -> bool {
        self.store_hash != store.hash()
    }

    pub fn touches(&self, id: &EntityId) -> bool {
        self.result.iter().any(|t| &t.source == id || &t.target == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SortError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("parameter `{name}`: {reason}")]
    BadParam { name: String, reason: String },
    #[error("target `{0}` matches no method")]
    TargetUnresolved(String),
    #[error("reference `{0}` matches no field or zero-argument method")]
    ReferenceUnresolved(String),
    #[error("`{member}` is not a member of `{ty}`")]
    NotAMemberOfType { member: String, ty: String },
    #[error("type `{0}` matches no type")]
    TypeUnresolved(String),
    #[error("caller `{0}` matches no method")]
    CallerUnresolved(String),
    #[error("role `{0}` matches no type or virtual interface")]
    RoleUnresolved(String),
    #[error("{0} context is empty")]
    EmptyContext(String),
    #[error("seed `{0}` matches no method")]
    SeedUnresolved(String),
    #[error("exception `{0}` matches no class")]
    ExceptionUnresolved(String),
    #[error("field `{0}` matches no field")]
    FieldUnresolved(String),
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error("missing binding `{0}`")]
    MissingBinding(String),
    #[error("bindings file: {0}")]
    BadBindings(String),
    #[error("virtual interfaces: {0}")]
    Roles(String),
    #[error(transparent)]
    Query(#[from] QueryError),
}

impl From<OverlayError> for SortError {
    fn from(e: OverlayError) -> Self {
        match e {
            OverlayError::Query(q) => SortError::Query(q),
            other => SortError::Roles(other.to_string()),
        }
    }
}

/// Builds and evaluates a sort instance. `roles` are the virtual interfaces
/// role parameters may refer to.
pub fn instantiate(
    store: &FactStore,
    roles: &[RoleSpec],
    name: &str,
    spec: &SortSpec,
) -> Result<SortInstance, SortError> {
    builders::instantiate(store, roles, name, spec)
}
