// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser for OOSL.

use crate::facts::Modifier;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

const KEYWORDS: [&str; 25] = [
    "package", "class", "interface", "extends", "implements", "throws", "new", "return", "throw",
    "if", "else", "while", "for", "this", "super", "null", "true", "false", "try", "catch",
    "finally", "public", "private", "protected", "static",
];
const MORE_KEYWORDS: [&str; 2] = ["abstract", "final"];

fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word) || MORE_KEYWORDS.contains(&word)
}

pub fn parse_unit(path: &str, text: &str) -> Result<SourceUnit, SyntaxError> {
    let toks = tokenize(path, text)?;
    let mut parser = Parser {
        file: path,
        toks,
        pos: 0,
        anon_counters: Vec::new(),
    };
    parser.unit()
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    anon_counters: Vec<u32>,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn line(&self) -> u32 {
        self.toks[self.pos].line
    }

    fn prev_line(&self) -> u32 {
        self.toks[self.pos.saturating_sub(1)].line
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = &self.toks[self.pos];
        SyntaxError {
            file: self.file.to_string(),
            line: t.line,
            col: t.col,
            found: t.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn is_word(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if self.is_sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        if self.is_word(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &'static str) -> PResult<()> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{sym}`")]))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<()> {
        if self.eat_word(word) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn is_ident_at(&self, offset: usize) -> bool {
        matches!(self.peek_at(offset), Tok::Ident(s) if !is_keyword(s))
    }

    fn qualified(&mut self, what: &str) -> PResult<String> {
        let mut name = self.ident(what)?;
        while self.is_sym(".") && self.is_ident_at(1) {
            self.bump();
            name.push('.');
            name.push_str(&self.ident(what)?);
        }
        Ok(name)
    }

    fn type_ref(&mut self, what: &str) -> PResult<TypeRef> {
        let line = self.line();
        let name = self.qualified(what)?;
        Ok(TypeRef { name, line })
    }

    fn type_list(&mut self) -> PResult<Vec<TypeRef>> {
        let mut list = vec![self.type_ref("type name")?];
        while self.eat_sym(",") {
            list.push(self.type_ref("type name")?);
        }
        Ok(list)
    }

    fn modifiers(&mut self) -> Vec<Modifier> {
        let mut mods = Vec::new();
        while let Tok::Ident(word) = self.peek() {
            match Modifier::from_keyword(word) {
                Some(m) => {
                    mods.push(m);
                    self.bump();
                }
                None => break,
            }
        }
        mods
    }

    fn unit(&mut self) -> PResult<SourceUnit> {
        self.expect_word("package")?;
        let package = self.qualified("package name")?;
        self.expect_sym(";")?;
        let mut types = Vec::new();
        while *self.peek() != Tok::Eof {
            let start = self.line();
            let mods = self.modifiers();
            types.push(self.type_decl(mods, start)?);
        }
        Ok(SourceUnit {
            path: self.file.to_string(),
            package,
            types,
        })
    }

    fn type_decl(&mut self, modifiers: Vec<Modifier>, start_line: u32) -> PResult<TypeDecl> {
        let kind = if self.eat_word("class") {
            TypeKind::Class
        } else if self.eat_word("interface") {
            TypeKind::Interface
        } else {
            return Err(self.error(&["`class`", "`interface`"]));
        };
        let name = self.ident("type name")?;
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_word("extends") {
            extends = match kind {
                TypeKind::Class => vec![self.type_ref("type name")?],
                TypeKind::Interface => self.type_list()?,
            };
        }
        if kind == TypeKind::Class && self.eat_word("implements") {
            implements = self.type_list()?;
        }
        let members = self.class_body(Some(&name))?;
        Ok(TypeDecl {
            kind,
            name,
            modifiers,
            extends,
            implements,
            members,
            start_line,
            end_line: self.prev_line(),
        })
    }

    /// `{ member* }`; `class_name` is `None` inside anonymous classes.
    fn class_body(&mut self, class_name: Option<&str>) -> PResult<Vec<Member>> {
        self.expect_sym("{")?;
        self.anon_counters.push(0);
        let mut members = Vec::new();
        while !self.eat_sym("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.error(&["member declaration", "`}`"]));
            }
            if self.eat_sym(";") {
                continue;
            }
            members.push(self.member(class_name)?);
        }
        self.anon_counters.pop();
        Ok(members)
    }

    fn member(&mut self, class_name: Option<&str>) -> PResult<Member> {
        let start = self.line();
        let modifiers = self.modifiers();
        if self.is_word("class") || self.is_word("interface") {
            return Ok(Member::Type(self.type_decl(modifiers, start)?));
        }
        // Constructor: `Name (`
        if self.is_ident_at(0) && matches!(self.peek_at(1), Tok::Sym("(")) {
            let name = self.ident("constructor name")?;
            if class_name != Some(name.as_str()) {
                self.pos -= 1;
                return Err(self.error(&["return type"]));
            }
            let mut decl = self.method_rest(modifiers, None, name, start)?;
            decl.name = "new".to_string();
            return Ok(Member::Constructor(decl));
        }
        let ty = self.type_ref("member type")?;
        let name = self.ident("member name")?;
        if self.is_sym("(") {
            return Ok(Member::Method(self.method_rest(modifiers, Some(ty), name, start)?));
        }
        let init = if self.eat_sym("=") {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_sym(";")?;
        Ok(Member::Field(FieldDecl {
            modifiers,
            ty,
            name,
            init,
            line: start,
        }))
    }

    fn method_rest(
        &mut self,
        modifiers: Vec<Modifier>,
        ret: Option<TypeRef>,
        name: String,
        start_line: u32,
    ) -> PResult<MethodDecl> {
        self.expect_sym("(")?;
        let mut params = Vec::new();
        if !self.eat_sym(")") {
            loop {
                let line = self.line();
                if !self.is_ident_at(0) {
                    return Err(self.error(&["`)`", "parameter type"]));
                }
                let ty = self.type_ref("parameter type")?;
                let pname = self.ident("parameter name")?;
                params.push(Param {
                    ty,
                    name: pname,
                    line,
                });
                if self.eat_sym(")") {
                    break;
                }
                if !self.eat_sym(",") {
                    return Err(self.error(&["`,`", "`)`"]));
                }
            }
        }
        let throws = if self.eat_word("throws") {
            self.type_list()?
        } else {
            Vec::new()
        };
        let body = if self.eat_sym(";") {
            None
        } else if self.is_sym("{") {
            Some(self.block()?)
        } else {
            return Err(self.error(&["`{`", "`;`", "`throws`"]));
        };
        Ok(MethodDecl {
            modifiers,
            ret,
            name,
            params,
            throws,
            body,
            start_line,
            end_line: self.prev_line(),
        })
    }

    fn block(&mut self) -> PResult<Block> {
        self.expect_sym("{")?;
        let mut stmts = Vec::new();
        while !self.eat_sym("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.error(&["statement", "`}`"]));
            }
            stmts.push(self.stmt()?);
        }
        Ok(Block { stmts })
    }

    /// `T x =` / `T x;` / `a.b.T x ...` at the cursor.
    fn at_local_decl(&self) -> bool {
        let mut i = 0;
        if !self.is_ident_at(i) {
            return false;
        }
        i += 1;
        while matches!(self.peek_at(i), Tok::Sym(".")) && self.is_ident_at(i + 1) {
            i += 2;
        }
        self.is_ident_at(i) && matches!(self.peek_at(i + 1), Tok::Sym("=") | Tok::Sym(";"))
    }

    fn local_decl(&mut self) -> PResult<Stmt> {
        let line = self.line();
        let ty = self.type_ref("type name")?;
        let name = self.ident("variable name")?;
        let init = if self.eat_sym("=") {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Stmt::Local {
            ty,
            name,
            init,
            line,
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.is_sym("{") {
            return Ok(Stmt::Block(self.block()?));
        }
        if self.eat_sym(";") {
            return Ok(Stmt::Empty);
        }
        let line = self.line();
        if self.eat_word("if") {
            self.expect_sym("(")?;
            let cond = self.expr()?;
            self.expect_sym(")")?;
            let then = Box::new(self.stmt()?);
            let otherwise = if self.eat_word("else") {
                Some(Box::new(self.stmt()?))
            } else {
                None
            };
            return Ok(Stmt::If {
                cond,
                then,
                otherwise,
            });
        }
        if self.eat_word("while") {
            self.expect_sym("(")?;
            let cond = self.expr()?;
            self.expect_sym(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::While { cond, body });
        }
        if self.eat_word("for") {
            self.expect_sym("(")?;
            let init = if self.is_sym(";") {
                None
            } else if self.at_local_decl() {
                Some(Box::new(self.local_decl()?))
            } else {
                Some(Box::new(Stmt::Expr(self.expr()?)))
            };
            self.expect_sym(";")?;
            let cond = if self.is_sym(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_sym(";")?;
            let update = if self.is_sym(")") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_sym(")")?;
            let body = Box::new(self.stmt()?);
            return Ok(Stmt::For {
                init,
                cond,
                update,
                body,
            });
        }
        if self.eat_word("return") {
            let value = if self.is_sym(";") {
                None
            } else {
                Some(self.expr()?)
            };
            self.expect_sym(";")?;
            return Ok(Stmt::Return(value, line));
        }
        if self.eat_word("throw") {
            let value = self.expr()?;
            self.expect_sym(";")?;
            return Ok(Stmt::Throw(value, line));
        }
        if self.eat_word("try") {
            let body = self.block()?;
            let mut catches = Vec::new();
            while self.is_word("catch") {
                let cline = self.line();
                self.bump();
                self.expect_sym("(")?;
                let ty = self.type_ref("exception type")?;
                let name = self.ident("variable name")?;
                self.expect_sym(")")?;
                let cbody = self.block()?;
                catches.push(Catch {
                    ty,
                    name,
                    body: cbody,
                    line: cline,
                });
            }
            let finally = if self.eat_word("finally") {
                Some(self.block()?)
            } else {
                None
            };
            if catches.is_empty() && finally.is_none() {
                return Err(self.error(&["`catch`", "`finally`"]));
            }
            return Ok(Stmt::Try {
                body,
                catches,
                finally,
            });
        }
        if self.at_local_decl() {
            let decl = self.local_decl()?;
            self.expect_sym(";")?;
            return Ok(decl);
        }
        let e = self.expr()?;
        self.expect_sym(";")?;
        Ok(Stmt::Expr(e))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        if self.is_sym("=") || self.is_sym("+=") || self.is_sym("-=") {
            if !matches!(lhs.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
                return Err(self.error(&["`;`"]));
            }
            let compound = !self.is_sym("=");
            self.bump();
            let rhs = self.expr()?;
            let line = lhs.line;
            return Ok(Expr {
                kind: ExprKind::Assign {
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                    compound,
                },
                line,
            });
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if self.eat_sym("?") {
            let a = self.expr()?;
            self.expect_sym(":")?;
            let b = self.conditional()?;
            let line = cond.line;
            return Ok(Expr {
                kind: ExprKind::Conditional(Box::new(cond), Box::new(a), Box::new(b)),
                line,
            });
        }
        Ok(cond)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let prec = match self.peek() {
                Tok::Sym("||") => 1,
                Tok::Sym("&&") => 2,
                Tok::Sym("|") | Tok::Sym("^") | Tok::Sym("&") => 3,
                Tok::Sym("==") | Tok::Sym("!=") => 4,
                Tok::Sym("<") | Tok::Sym(">") | Tok::Sym("<=") | Tok::Sym(">=") => 5,
                Tok::Sym("+") | Tok::Sym("-") => 6,
                Tok::Sym("*") | Tok::Sym("/") | Tok::Sym("%") => 7,
                _ => break,
            };
            if prec <= min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec)?;
            let line = lhs.line;
            lhs = Expr {
                kind: ExprKind::Binary(Box::new(lhs), Box::new(rhs)),
                line,
            };
        }
        Ok(lhs)
    }

    /// Wraps a prefix `++`/`--` operand; `op` is the operator's token index.
    fn update(&self, target: Expr, op: usize) -> PResult<Expr> {
        let t = &self.toks[op];
        if !matches!(target.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
            return Err(SyntaxError {
                file: self.file.to_string(),
                line: t.line,
                col: t.col,
                found: format!("{} needs a name or field operand", t.tok.describe()),
                expected: Vec::new(),
            });
        }
        Ok(Expr {
            kind: ExprKind::Update(Box::new(target)),
            line: t.line,
        })
    }

    fn unary(&mut self) -> PResult<Expr> {
        let line = self.line();
        if self.is_sym("++") || self.is_sym("--") {
            let op = self.pos;
            self.bump();
            let inner = self.unary()?;
            return self.update(inner, op);
        }
        if self.eat_sym("!") || self.eat_sym("-") || self.eat_sym("+") {
            let inner = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Unary(Box::new(inner)),
                line,
            });
        }
        let mut e = self.primary()?;
        loop {
            if self.is_sym(".") {
                self.bump();
                let name = self.ident("member name")?;
                let line = e.line;
                if self.is_sym("(") {
                    let args = self.args()?;
                    e = Expr {
                        kind: ExprKind::Call {
                            recv: Some(Box::new(e)),
                            name,
                            args,
                        },
                        line,
                    };
                } else {
                    e = Expr {
                        kind: ExprKind::Field {
                            recv: Box::new(e),
                            name,
                        },
                        line,
                    };
                }
            } else if self.is_sym("++") || self.is_sym("--") {
                if !matches!(e.kind, ExprKind::Name(_) | ExprKind::Field { .. }) {
                    return Err(self.error(&["`;`"]));
                }
                self.bump();
                let line = e.line;
                e = Expr {
                    kind: ExprKind::Update(Box::new(e)),
                    line,
                };
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_sym("(")?;
        let mut args = Vec::new();
        if self.eat_sym(")") {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat_sym(")") {
                return Ok(args);
            }
            if !self.eat_sym(",") {
                return Err(self.error(&["`,`", "`)`"]));
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let line = self.line();
        let kind = match self.peek().clone() {
            Tok::Int(_) | Tok::Str(_) | Tok::Char(_) => {
                self.bump();
                ExprKind::Literal
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.expr()?;
                self.expect_sym(")")?;
                return Ok(inner);
            }
            Tok::Ident(word) => match word.as_str() {
                "true" | "false" | "null" => {
                    self.bump();
                    ExprKind::Literal
                }
                "this" | "super" => {
                    self.bump();
                    let is_super = word == "super";
                    if self.is_sym("(") {
                        ExprKind::CtorCall {
                            is_super,
                            args: self.args()?,
                        }
                    } else if is_super {
                        ExprKind::Super
                    } else {
                        ExprKind::This
                    }
                }
                "new" => {
                    self.bump();
                    let ty = self.type_ref("type name")?;
                    let args = self.args()?;
                    let anon = if self.is_sym("{") {
                        let ordinal = match self.anon_counters.last_mut() {
                            Some(counter) => {
                                *counter += 1;
                                *counter
                            }
                            None => return Err(self.error(&["`;`"])),
                        };
                        let start_line = self.line();
                        let members = self.class_body(None)?;
                        Some(AnonClass {
                            ordinal,
                            members,
                            start_line,
                            end_line: self.prev_line(),
                        })
                    } else {
                        None
                    };
                    ExprKind::New { ty, args, anon }
                }
                _ if is_keyword(&word) => return Err(self.error(&["expression"])),
                _ => {
                    self.bump();
                    if self.is_sym("(") {
                        ExprKind::Call {
                            recv: None,
                            name: word,
                            args: self.args()?,
                        }
                    } else {
                        ExprKind::Name(word)
                    }
                }
            },
            _ => return Err(self.error(&["expression"])),
        };
        Ok(Expr { kind, line })
    }
}
