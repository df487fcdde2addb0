// SPDX-License-Identifier: Apache-2.0

//! Syntax trees for OOSL source units.

use crate::facts::Modifier;

#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub path: String,
    pub package: String,
    pub types: Vec<TypeDecl>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeKind {
    Class,
    Interface,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeRef {
    /// Dotted name as written.
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeDecl {
    pub kind: TypeKind,
    pub name: String,
    pub modifiers: Vec<Modifier>,
    pub extends: Vec<TypeRef>,
    pub implements: Vec<TypeRef>,
    pub members: Vec<Member>,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
    Constructor(MethodDecl),
    Type(TypeDecl),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub modifiers: Vec<Modifier>,
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub modifiers: Vec<Modifier>,
    /// `None` for constructors.
    pub ret: Option<TypeRef>,
    pub name: String,
    pub params: Vec<Param>,
    pub throws: Vec<TypeRef>,
    pub body: Option<Block>,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catch {
    pub ty: TypeRef,
    pub name: String,
    pub body: Block,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Local {
        ty: TypeRef,
        name: String,
        init: Option<Expr>,
        line: u32,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        update: Option<Expr>,
        body: Box<Stmt>,
    },
    Return(Option<Expr>, u32),
    Throw(Expr, u32),
    Try {
        body: Block,
        catches: Vec<Catch>,
        finally: Option<Block>,
    },
    Block(Block),
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonClass {
    /// 1-based order of appearance inside the lexically enclosing type.
    pub ordinal: u32,
    pub members: Vec<Member>,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Name(String),
    This,
    Super,
    Literal,
    Field {
        recv: Box<Expr>,
        name: String,
    },
    Call {
        recv: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    /// `super(..)` / `this(..)` constructor chaining.
    CtorCall {
        is_super: bool,
        args: Vec<Expr>,
    },
    New {
        ty: TypeRef,
        args: Vec<Expr>,
        anon: Option<AnonClass>,
    },
    /// `=`, or `+=`/`-=` when `compound`.
    Assign {
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        compound: bool,
    },
    /// `++`/`--`, prefix or postfix, on a name or field.
    Update(Box<Expr>),
    Binary(Box<Expr>, Box<Expr>),
    Unary(Box<Expr>),
    Conditional(Box<Expr>, Box<Expr>, Box<Expr>),
}
