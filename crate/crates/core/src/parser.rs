//! Recursive-descent parser for `.pbl` programs.
//!
//! ```text
//! program  ::= header* stmt*
//! header   ::= "param" ident ";"
//!            | ("uvar" | "ovar") ident ("in" domain)? ";"
//! domain   ::= "{" nat ("," nat)* "}" | "{" nat ".." nat "}"
//! stmt     ::= "skip" ";"
//!            | ident "=" "sample" "(" branch ("+" branch)* ")" ";"
//!            | ident "=" "observe" ident ";"
//!            | "observe" ident ";"
//!            | ident "=" expr ";"
//!            | "if" "(" prop ")" block ("else" block)?
//!            | "while" "(" prop ")" block
//!            | "infer" "(" "p" "(" prop ")" cmp bound ")" block ("else" block)?
//! branch   ::= rational "|" expr ">"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::ast::*;
use crate::lexer::{tokenize, Tok, Token};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: BTreeSet<String>,
    pub message: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        if let Some(m) = &self.message {
            return write!(f, "{m}");
        }
        write!(f, "unexpected {}", self.found)?;
        if !self.expected.is_empty() {
            let list: Vec<&str> = self.expected.iter().map(String::as_str).collect();
            write!(f, ", expected one of: {}", list.join(", "))?;
        }
        Ok(())
    }
}

const KEYWORDS: &[&str] = &[
    "param", "uvar", "ovar", "in", "skip", "if", "else", "while", "infer", "sample", "observe", "true", "false",
    "diverge",
];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Whether `[P]` may appear inside expressions (predicate mode).
    pub(crate) allow_iverson: bool,
    /// Expected-token set accumulated at the furthest failure position.
    expected: BTreeSet<String>,
    furthest: usize,
}

pub(crate) type PResult<T> = Result<T, ParseError>;

impl Parser {
    pub(crate) fn new(src: &str) -> PResult<Parser> {
        let toks = tokenize(src).map_err(|e| ParseError {
            line: e.line,
            col: e.col,
            found: format!("character `{}`", e.ch),
            expected: BTreeSet::new(),
            message: None,
        })?;
        Ok(Parser { toks, pos: 0, allow_iverson: false, expected: BTreeSet::new(), furthest: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn note_expected(&mut self, what: &str) {
        if self.pos > self.furthest {
            self.furthest = self.pos;
            self.expected.clear();
        }
        if self.pos == self.furthest {
            self.expected.insert(what.to_string());
        }
    }

    /// Error at the furthest position reached, listing everything that
    /// would have been accepted there.
    pub(crate) fn error(&self) -> ParseError {
        let at = self.furthest.max(self.pos).min(self.toks.len() - 1);
        let t = &self.toks[at];
        let expected = if at == self.furthest { self.expected.clone() } else { BTreeSet::new() };
        ParseError { line: t.line, col: t.col, found: t.tok.to_string(), expected, message: None }
    }

    pub(crate) fn error_msg(&self, message: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            col: t.col,
            found: t.tok.to_string(),
            expected: BTreeSet::new(),
            message: Some(message.into()),
        }
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            self.note_expected(&tok.to_string());
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    pub(crate) fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.bump();
            true
        } else {
            self.note_expected(&format!("`{kw}`"));
            false
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    pub(crate) fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => {
                self.note_expected("identifier");
                Err(self.error())
            }
        }
    }

    pub(crate) fn nat(&mut self) -> PResult<u64> {
        if let Tok::Number(s) = self.peek().clone() {
            if let Ok(n) = s.parse::<u64>() {
                self.bump();
                return Ok(n);
            }
        }
        self.note_expected("natural number");
        Err(self.error())
    }

    /// `a`, `a.b` or `a/b`.
    pub(crate) fn rational(&mut self) -> PResult<Rational> {
        let Tok::Number(s) = self.peek().clone() else {
            self.note_expected("rational number");
            return Err(self.error());
        };
        self.bump();
        if matches!(self.peek(), Tok::Slash) && matches!(self.peek_at(1), Tok::Number(_)) {
            self.bump();
            let Tok::Number(d) = self.bump() else { unreachable!() };
            return parse_rational(&format!("{s}/{d}")).map_err(|e| self.error_msg(e.to_string()));
        }
        parse_rational(&s).map_err(|e| self.error_msg(e.to_string()))
    }

    pub(crate) fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    // -- expressions ------------------------------------------------------

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => {
                    self.note_expected("`+`");
                    self.note_expected("`-`");
                    return Ok(lhs);
                }
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => {
                    self.note_expected("`*`");
                    self.note_expected("`/`");
                    return Ok(lhs);
                }
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Number(s) => match s.parse::<u64>() {
                Ok(n) => {
                    self.bump();
                    Ok(Expr::Const(n))
                }
                Err(_) => Err(self.error_msg(format!("expected a natural number, found `{s}`"))),
            },
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Expr::Const(1))
            }
            Tok::Ident(s) if s == "false" => {
                self.bump();
                Ok(Expr::Const(0))
            }
            Tok::Ident(_) => Ok(Expr::Var(self.ident()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Tok::LBracket if self.allow_iverson => {
                self.bump();
                let p = self.prop()?;
                self.expect(&Tok::RBracket)?;
                Ok(Expr::iverson(p))
            }
            _ => {
                self.note_expected("expression");
                Err(self.error())
            }
        }
    }

    // -- propositions -----------------------------------------------------

    pub(crate) fn cmp_op(&mut self) -> Option<CmpOp> {
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Assign | Tok::EqEq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            _ => {
                self.note_expected("comparison");
                return None;
            }
        };
        self.bump();
        Some(op)
    }

    pub(crate) fn prop(&mut self) -> PResult<Prop> {
        let mut lhs = self.prop_and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.prop_and()?;
            lhs = Prop::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_and(&mut self) -> PResult<Prop> {
        let mut lhs = self.prop_unary()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.prop_unary()?;
            lhs = Prop::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn prop_unary(&mut self) -> PResult<Prop> {
        if self.eat(&Tok::Bang) {
            return Ok(Prop::not(self.prop_unary()?));
        }
        self.prop_atom()
    }

    fn is_expr_continuation(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::Plus
                | Tok::Minus
                | Tok::Star
                | Tok::Slash
                | Tok::Lt
                | Tok::Le
                | Tok::Gt
                | Tok::Ge
                | Tok::Assign
                | Tok::EqEq
                | Tok::Ne
        )
    }

    fn prop_atom(&mut self) -> PResult<Prop> {
        if let Tok::Ident(s) = self.peek() {
            if (s == "true" || s == "false") && !Self::is_expr_continuation(self.peek_at(1)) {
                let b = s == "true";
                self.bump();
                return Ok(Prop::Bool(b));
            }
        }
        let start = self.pos;
        match self.expr() {
            Ok(lhs) => {
                if let Some(op) = self.cmp_op() {
                    let rhs = self.expr()?;
                    Ok(Prop::Cmp(op, lhs, rhs))
                } else {
                    // a bare expression stands for `E != 0`
                    Ok(Prop::Cmp(CmpOp::Ne, lhs, Expr::Const(0)))
                }
            }
            Err(first) => {
                self.pos = start;
                if self.eat(&Tok::LParen) {
                    let p = self.prop()?;
                    self.expect(&Tok::RParen)?;
                    Ok(p)
                } else {
                    Err(first)
                }
            }
        }
    }

    // -- statements -------------------------------------------------------

    fn block(&mut self) -> PResult<Statement> {
        self.expect(&Tok::LBrace)?;
        let mut items = Vec::new();
        while !matches!(self.peek(), Tok::RBrace) {
            if self.at_eof() {
                self.note_expected("`}`");
                return Err(self.error());
            }
            items.push(self.statement()?);
        }
        self.bump();
        Ok(Statement::seq(items))
    }

    fn else_block(&mut self) -> PResult<Statement> {
        if self.eat_keyword("else") {
            self.block()
        } else {
            Ok(Statement::Skip)
        }
    }

    fn statement(&mut self) -> PResult<Statement> {
        if self.eat_keyword("skip") {
            self.expect(&Tok::Semi)?;
            return Ok(Statement::Skip);
        }
        if self.is_keyword("diverge") {
            return Err(self.error_msg("`diverge` is internal to bounded unrolling and cannot appear in source"));
        }
        if self.eat_keyword("observe") {
            let source = self.ident()?;
            self.expect(&Tok::Semi)?;
            return Ok(Statement::Observe { target: None, source });
        }
        if self.eat_keyword("if") {
            self.expect(&Tok::LParen)?;
            let guard = self.prop()?;
            self.expect(&Tok::RParen)?;
            let a = self.block()?;
            let b = self.else_block()?;
            return Ok(Statement::if_then_else(guard, a, b));
        }
        if self.eat_keyword("while") {
            self.expect(&Tok::LParen)?;
            let guard = self.prop()?;
            self.expect(&Tok::RParen)?;
            let body = self.block()?;
            return Ok(Statement::while_loop(guard, body));
        }
        if self.eat_keyword("infer") {
            self.expect(&Tok::LParen)?;
            self.expect_keyword("p")?;
            self.expect(&Tok::LParen)?;
            let prop = self.prop()?;
            self.expect(&Tok::RParen)?;
            let Some(op) = self.cmp_op() else {
                return Err(self.error());
            };
            let bound = match self.peek().clone() {
                Tok::Number(_) => Bound::Const(self.rational()?),
                Tok::Ident(_) => Bound::Param(self.ident()?),
                _ => {
                    self.note_expected("threshold");
                    return Err(self.error());
                }
            };
            self.expect(&Tok::RParen)?;
            let a = self.block()?;
            let b = self.else_block()?;
            return Ok(Statement::infer(prop, Threshold { op, bound }, a, b));
        }
        if matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            let target = self.ident()?;
            self.expect(&Tok::Assign)?;
            if self.eat_keyword("sample") {
                self.expect(&Tok::LParen)?;
                let mut branches = Vec::new();
                loop {
                    let weight = self.rational()?;
                    self.expect(&Tok::Bar)?;
                    let value = self.expr()?;
                    self.expect(&Tok::Gt)?;
                    branches.push(Branch { weight, value });
                    if !self.eat(&Tok::Plus) {
                        break;
                    }
                }
                self.expect(&Tok::RParen)?;
                self.expect(&Tok::Semi)?;
                return Ok(Statement::Sample { target, spec: SampleSpec { branches } });
            }
            if self.eat_keyword("observe") {
                let source = self.ident()?;
                self.expect(&Tok::Semi)?;
                return Ok(Statement::Observe { target: Some(target), source });
            }
            let value = self.expr()?;
            self.expect(&Tok::Semi)?;
            return Ok(Statement::Assign { target, value });
        }
        for kw in ["skip", "observe", "if", "while", "infer"] {
            self.note_expected(&format!("`{kw}`"));
        }
        self.note_expected("identifier");
        Err(self.error())
    }

    fn domain(&mut self) -> PResult<Vec<u64>> {
        self.expect(&Tok::LBrace)?;
        let first = self.nat()?;
        if self.eat(&Tok::DotDot) {
            let last = self.nat()?;
            self.expect(&Tok::RBrace)?;
            if last < first {
                return Err(self.error_msg(format!("empty range {first}..{last}")));
            }
            return Ok((first..=last).collect());
        }
        let mut vals = vec![first];
        while self.eat(&Tok::Comma) {
            vals.push(self.nat()?);
        }
        self.expect(&Tok::RBrace)?;
        vals.sort_unstable();
        vals.dedup();
        Ok(vals)
    }

    fn program(&mut self) -> PResult<Program> {
        let mut params = Vec::new();
        let mut decls = Vec::new();
        loop {
            if self.eat_keyword("param") {
                params.push(self.ident()?);
                self.expect(&Tok::Semi)?;
                continue;
            }
            let kind = if self.eat_keyword("uvar") {
                VarKind::Unobservable
            } else if self.eat_keyword("ovar") {
                VarKind::Observable
            } else {
                break;
            };
            let name = self.ident()?;
            let domain = if self.eat_keyword("in") { Some(self.domain()?) } else { None };
            self.expect(&Tok::Semi)?;
            decls.push(VarDecl { name, kind, domain });
        }
        let mut items = Vec::new();
        while !self.at_eof() {
            items.push(self.statement()?);
        }
        Ok(Program { params, decls, body: Statement::seq(items) })
    }
}

pub fn parse(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    p.program()
}

/// Parses a single statement sequence without a header.
pub fn parse_statement(src: &str) -> Result<Statement, ParseError> {
    let mut p = Parser::new(src)?;
    let mut items = Vec::new();
    while !p.at_eof() {
        items.push(p.statement()?);
    }
    Ok(Statement::seq(items))
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}

pub fn parse_prop(src: &str) -> Result<Prop, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.prop()?;
    p.expect(&Tok::Eof)?;
    Ok(e)
}
