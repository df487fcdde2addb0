// SPDX-License-Identifier: Apache-2.0

//! Program facts, relational queries over them, the twelve crosscutting
//! concern sorts as query templates, and concern models built from sort
//! instances.

pub mod cli;
pub mod facts;
pub mod frontend;
pub mod model;
pub mod query;
pub mod sorts;
