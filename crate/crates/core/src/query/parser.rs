// SPDX-License-Identifier: Apache-2.0

//! Tokenizer and recursive-descent parser for query programs.

use std::collections::HashSet;

use crate::facts::{EntityId, Modifier};

use super::ast::{Binding, Expr, Query, Relation, Stmt};
use super::pattern::{ParamPattern, Pattern, Selector};
use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Str(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Var(v) => format!("`{v}`"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of query".to_string(),
        }
    }
}

struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '$' | '*' | '.')
}

fn tokenize(text: &str) -> Result<Vec<Token>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0, 1u32, 1u32);
    let syntax = |line, col, message: String| QueryError::Syntax { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }
        let tok = if c == '<' {
            let end = chars[i + 1..]
                .iter()
                .position(|&c| c == '>')
                .map(|p| i + 1 + p)
                .filter(|&end| end > i + 1 && chars[i + 1..end].iter().all(|&c| c.is_alphanumeric() || c == '_'))
                .ok_or_else(|| syntax(start_line, start_col, "malformed variable name".to_string()))?;
            let name: String = chars[i..=end].iter().collect();
            advance(end + 1 - i, &mut i);
            Tok::Var(name)
        } else if c == '"' {
            let end = chars[i + 1..]
                .iter()
                .position(|&c| c == '"' || c == '\n')
                .map(|p| i + 1 + p)
                .filter(|&end| chars[end] == '"')
                .ok_or_else(|| syntax(start_line, start_col, "unterminated string".to_string()))?;
            let value: String = chars[i + 1..end].iter().collect();
            advance(end + 1 - i, &mut i);
            Tok::Str(value)
        } else if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                advance(1, &mut i);
            }
            Tok::Word(chars[start..i].iter().collect())
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let sym = match two.as_str() {
                "&&" => Some("&&"),
                "||" => Some("||"),
                _ => None,
            };
            let sym = match sym {
                Some(s) => {
                    advance(2, &mut i);
                    s
                }
                None => {
                    let s = match c {
                        '(' => "(",
                        ')' => ")",
                        ',' => ",",
                        ';' => ";",
                        '=' => "=",
                        '+' => "+",
                        '{' => "{",
                        '}' => "}",
                        _ => return Err(syntax(start_line, start_col, format!("unexpected character `{c}`"))),
                    };
                    advance(1, &mut i);
                    s
                }
            };
            Tok::Sym(sym)
        };
        tokens.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(tokens)
}

fn is_plain_ident(word: &str) -> bool {
    word.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && word.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses a query program.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        bound: HashSet::new(),
    };
    parser.program()
}

/// Parses a standalone expression, e.g. a context given on the command line.
/// `bound` lists variable names the expression may reference.
pub fn parse_expr(text: &str, bound: &[&str]) -> Result<Expr, QueryError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        bound: bound.iter().map(|s| s.to_string()).collect(),
    };
    let expr = parser.expr(false)?;
    parser.eat_sym(";");
    parser.expect_eof()?;
    Ok(expr)
}

/// Parses a pattern with an optional selector, such as `method p.C.m(..)`.
pub fn parse_pattern(text: &str) -> Result<Pattern, QueryError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        bound: HashSet::new(),
    };
    let selector = match parser.peek() {
        Tok::Word(w) if Selector::from_keyword(w).is_some() && parser.word_at(1) => {
            let s = Selector::from_keyword(w);
            parser.pos += 1;
            s
        }
        _ => None,
    };
    let pattern = parser.pattern(selector)?;
    parser.expect_eof()?;
    Ok(pattern)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    bound: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn word_at(&self, offset: usize) -> bool {
        matches!(self.peek_at(offset), Tok::Word(_))
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> QueryError {
        let t = &self.tokens[self.pos];
        QueryError::Syntax {
            line: t.line,
            col: t.col,
            message: format!("expected {expected}, found {}", t.tok.describe()),
        }
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), QueryError> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.error(&format!("`{sym}`")))
        }
    }

    fn expect_eof(&self) -> Result<(), QueryError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of query"))
        }
    }

    fn word(&mut self, what: &str) -> Result<String, QueryError> {
        match self.peek() {
            Tok::Word(w) => {
                let w = w.clone();
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(what)),
        }
    }

    /// Index just past the `)` matching the `(` at `open`.
    fn matching_paren(&self, open: usize) -> Option<usize> {
        let mut depth = 0;
        for (i, t) in self.tokens.iter().enumerate().skip(open) {
            match t.tok {
                Tok::Sym("(") => depth += 1,
                Tok::Sym(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i + 1);
                    }
                }
                Tok::Eof => return None,
                _ => {}
            }
        }
        None
    }

    fn program(&mut self) -> Result<Query, QueryError> {
        let mut stmts = Vec::new();
        while *self.peek() != Tok::Eof {
            if self.eat_sym(";") {
                continue;
            }
            stmts.push(self.stmt()?);
        }
        if stmts.is_empty() {
            return Err(self.error("a query"));
        }
        Ok(Query { stmts })
    }

    fn binding(&mut self) -> Result<Option<Binding>, QueryError> {
        match self.peek().clone() {
            Tok::Var(name) if matches!(self.peek_at(1), Tok::Sym("=")) => {
                self.pos += 2;
                Ok(Some(Binding::Var(name)))
            }
            Tok::Word(name) if is_plain_ident(&name) && matches!(self.peek_at(1), Tok::Sym("=")) => {
                self.pos += 2;
                Ok(Some(Binding::Var(name)))
            }
            Tok::Word(name) if is_plain_ident(&name) && matches!(self.peek_at(1), Tok::Sym("(")) => {
                let Some(close) = self.matching_paren(self.pos + 1) else {
                    return Ok(None);
                };
                if !matches!(self.tokens[close].tok, Tok::Sym("=")) {
                    return Ok(None);
                }
                self.pos += 2;
                let mut params = Vec::new();
                if !self.eat_sym(")") {
                    loop {
                        params.push(self.word("parameter name")?);
                        if self.eat_sym(")") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                self.expect_sym("=")?;
                Ok(Some(Binding::Head { name, params }))
            }
            _ => Ok(None),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, QueryError> {
        let binding = self.binding()?;
        let expr = self.expr(false)?;
        if !self.eat_sym(";") && *self.peek() != Tok::Eof {
            return Err(self.error("`;`"));
        }
        if let Some(b) = &binding {
            self.bound.insert(b.name().to_string());
        }
        Ok(Stmt { binding, expr })
    }

    /// `term` is set inside relation arguments, where bare names are
    /// patterns unless bound.
    fn expr(&mut self, term: bool) -> Result<Expr, QueryError> {
        let mut lhs = self.and_expr(term)?;
        while self.eat_sym("||") {
            lhs = lhs.or(self.and_expr(term)?);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self, term: bool) -> Result<Expr, QueryError> {
        let mut lhs = self.primary(term)?;
        while self.eat_sym("&&") {
            lhs = lhs.and(self.primary(term)?);
        }
        Ok(lhs)
    }

    fn primary(&mut self, term: bool) -> Result<Expr, QueryError> {
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let inner = self.expr(term)?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            Tok::Sym("{") => self.enumeration(),
            Tok::Var(name) => {
                if !self.bound.contains(&name) {
                    return Err(QueryError::UnboundVariable(name));
                }
                self.bump();
                Ok(Expr::Var(name))
            }
            Tok::Word(word) => self.word_expr(word, term),
            _ => Err(self.error("an expression")),
        }
    }

    fn enumeration(&mut self) -> Result<Expr, QueryError> {
        self.expect_sym("{")?;
        let mut ids = Vec::new();
        if !self.eat_sym("}") {
            loop {
                let (line, col) = (self.tokens[self.pos].line, self.tokens[self.pos].col);
                match self.bump() {
                    Tok::Str(text) => ids.push(EntityId::parse(&text).ok_or(QueryError::Syntax {
                        line,
                        col,
                        message: format!("malformed entity id {text:?}"),
                    })?),
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("an entity id string"));
                    }
                }
                if self.eat_sym("}") {
                    break;
                }
                self.expect_sym(",")?;
            }
        }
        Ok(Expr::Enumeration(ids))
    }

    fn word_expr(&mut self, word: String, term: bool) -> Result<Expr, QueryError> {
        let next = self.peek_at(1).clone();
        if is_plain_ident(&word) && next == Tok::Sym("(") && word != "type" {
            self.bump();
            return self.call(&word);
        }
        if word == "relationship" {
            if let Tok::Word(rel) = &next {
                if Relation::from_name(rel).is_some() && self.peek_at(2) == &Tok::Sym("(") {
                    self.bump();
                    let rel = rel.clone();
                    self.bump();
                    return self.call(&rel);
                }
            }
        }
        if word == "package" && matches!(next, Tok::Word(_)) {
            self.bump();
            return Ok(Expr::Package(self.word("package name")?));
        }
        if word == "project" && matches!(next, Tok::Word(_)) {
            self.bump();
            return Ok(Expr::Project(self.word("project name")?));
        }
        if word == "type" && next == Tok::Sym("(") {
            self.bump();
            self.bump();
            let name = self.word("type name")?;
            self.expect_sym(")")?;
            let pattern = Pattern::named(Some(Selector::Type), name.clone());
            pattern.validate()?;
            return Ok(Expr::TypeMembers(name));
        }
        if let Some(sel) = Selector::from_keyword(&word) {
            if matches!(next, Tok::Word(_)) {
                self.bump();
                return Ok(Expr::Pattern(self.pattern(Some(sel))?));
            }
        }
        if is_plain_ident(&word) && self.bound.contains(&word) {
            self.bump();
            return Ok(Expr::Var(word));
        }
        let pattern_follows = matches!(next, Tok::Word(_) | Tok::Sym("+") | Tok::Sym("("));
        if is_plain_ident(&word) && !term && !pattern_follows && Modifier::from_keyword(&word).is_none() {
            return Err(QueryError::UnboundVariable(word));
        }
        Ok(Expr::Pattern(self.pattern(None)?))
    }

    fn call(&mut self, name: &str) -> Result<Expr, QueryError> {
        let unary = |f: fn(Box<Expr>) -> Expr| f;
        let op = match name {
            "sourceof" => Some(unary(Expr::SourceOf)),
            "targetof" => Some(unary(Expr::TargetOf)),
            "closure" => Some(unary(Expr::Closure)),
            _ => None,
        };
        self.expect_sym("(")?;
        if let Some(op) = op {
            let inner = self.expr(false)?;
            self.expect_sym(")")?;
            return Ok(op(Box::new(inner)));
        }
        if name == "restrict" {
            let tuples = self.expr(false)?;
            self.expect_sym(",")?;
            let left = self.expr(true)?;
            self.expect_sym(",")?;
            let right = self.expr(true)?;
            self.expect_sym(")")?;
            return Ok(tuples.restrict(left, right));
        }
        let rel = Relation::from_name(name).ok_or_else(|| QueryError::UnknownRelation(name.to_string()))?;
        let left = self.expr(true)?;
        self.expect_sym(",")?;
        let right = self.expr(true)?;
        self.expect_sym(")")?;
        Ok(Expr::prim(rel, left, right))
    }

    fn pattern(&mut self, selector: Option<Selector>) -> Result<Pattern, QueryError> {
        let mut modifiers = Vec::new();
        while let Tok::Word(w) = self.peek() {
            match Modifier::from_keyword(w) {
                Some(m) if self.word_at(1) => {
                    modifiers.push(m);
                    self.bump();
                }
                _ => break,
            }
        }
        let first = self.word("a name pattern")?;
        let (type_pattern, name) = if self.word_at(0) {
            (Some(first), self.word("a name pattern")?)
        } else {
            (None, first)
        };
        let params = if self.eat_sym("(") {
            if let Tok::Word(w) = self.peek() {
                if w == ".." || w == "..." {
                    self.bump();
                    self.expect_sym(")")?;
                    Some(ParamPattern::Any)
                } else {
                    let mut slots = vec![self.word("a parameter type")?];
                    while self.eat_sym(",") {
                        slots.push(self.word("a parameter type")?);
                    }
                    self.expect_sym(")")?;
                    Some(ParamPattern::Exact(slots))
                }
            } else {
                self.expect_sym(")")?;
                Some(ParamPattern::Exact(Vec::new()))
            }
        } else {
            None
        };
        let hierarchy = self.eat_sym("+");
        let pattern = Pattern {
            selector,
            modifiers,
            type_pattern,
            name,
            params,
            hierarchy,
        };
        pattern.validate()?;
        Ok(pattern)
    }
}
