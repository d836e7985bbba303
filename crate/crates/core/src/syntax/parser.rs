//! Recursive-descent parser for terms.
//!
//! Precedence, loosest first: `λ`/`let`/`if` (extend as far right as
//! possible), `or`, `and`, comparisons (non-associative), `+ -`, `* /`,
//! application, postfix selection `.l`, atoms. Binary operators become
//! applications of free variables named after the operator.

use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Pos, SourceProgram};
use crate::term::{Literal, Term};
use crate::Mode;

/// Parses a whole program.
pub fn parse(src: &str, mode: Mode) -> Result<Term, Diagnostic> {
    let tokens = lex(src)?;
    let mut p = Parser { toks: tokens, i: 0, mode };
    let t = p.term()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(t)
}

/// Parses a [`SourceProgram`], prefixing diagnostics with its origin.
pub fn parse_source(src: &SourceProgram, mode: Mode) -> Result<Term, String> {
    parse(&src.text, mode).map_err(|d| format!("{}:{d}", src.origin))
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    mode: Mode,
}

fn binop_name(t: &Tok) -> Option<&'static str> {
    Some(match t {
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Slash => "/",
        Tok::Gt => ">",
        Tok::Lt => "<",
        Tok::EqEq => "==",
        Tok::And => "and",
        Tok::Or => "or",
        _ => return None,
    })
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), Diagnostic> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {what}, found {}", self.peek().describe()), self.pos())
    }

    fn ident(&mut self, what: &str) -> Result<String, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn term(&mut self) -> Result<Term, Diagnostic> {
        match self.peek() {
            Tok::Lambda => self.lambda(),
            Tok::Let | Tok::LetEv | Tok::LetRec => self.let_form(),
            Tok::If => self.conditional(),
            _ => self.binary(0),
        }
    }

    fn lambda(&mut self) -> Result<Term, Diagnostic> {
        self.advance();
        let mut params = vec![self.ident("a parameter name")?];
        loop {
            match self.peek() {
                Tok::Ident(_) => params.push(self.ident("a parameter name")?),
                // `λx λy. M` is shorthand for `λx. λy. M`
                Tok::Lambda => {
                    self.advance();
                    params.push(self.ident("a parameter name")?);
                }
                _ => break,
            }
        }
        self.expect(&Tok::Dot, "`.` after the parameters")?;
        let body = self.term()?;
        Ok(Term::abs_many(params, body))
    }

    fn let_form(&mut self) -> Result<Term, Diagnostic> {
        let pos = self.pos();
        let kw = self.advance();
        if kw == Tok::LetRec && !self.mode.is_extended() {
            return Err(Diagnostic::error("`letrec` is only available in extended mode", pos));
        }
        let name = self.ident("a name to bind")?;
        let mut params = Vec::new();
        while let Tok::Ident(_) = self.peek() {
            params.push(self.ident("a parameter name")?);
        }
        self.expect(&Tok::Eq, "`=`")?;
        let bound_pos = self.pos();
        let bound = self.term()?;
        let bound = Term::abs_many(params, bound);
        if kw == Tok::LetRec && !matches!(bound, Term::Abs(..)) {
            return Err(Diagnostic::error("`letrec` must bind a function (λx. ...)", bound_pos));
        }
        self.expect(&Tok::In, "`in`")?;
        let body = self.term()?;
        Ok(match kw {
            Tok::Let => Term::let_(name, bound, body),
            Tok::LetEv => Term::let_ev(name, bound, body),
            _ => Term::let_rec(name, bound, body),
        })
    }

    fn conditional(&mut self) -> Result<Term, Diagnostic> {
        self.advance();
        let g = self.term()?;
        self.expect(&Tok::Then, "`then`")?;
        let t = self.term()?;
        self.expect(&Tok::Else, "`else`")?;
        let e = self.term()?;
        Ok(Term::cond(g, t, e))
    }

    /// Binary operators by precedence level: 0 `or`, 1 `and`, 2 comparisons,
    /// 3 additive, 4 multiplicative.
    fn binary(&mut self, level: u8) -> Result<Term, Diagnostic> {
        if level > 4 {
            return self.application();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let op = self.peek().clone();
            let at_level = matches!(
                (&op, level),
                (Tok::Or, 0)
                    | (Tok::And, 1)
                    | (Tok::Gt | Tok::Lt | Tok::EqEq, 2)
                    | (Tok::Plus | Tok::Minus, 3)
                    | (Tok::Star | Tok::Slash, 4)
            );
            if !at_level {
                return Ok(lhs);
            }
            let pos = self.pos();
            self.advance();
            let rhs = self.binary(level + 1)?;
            let name = binop_name(&op).unwrap();
            lhs = Term::apps(Term::var(name), [lhs, rhs]);
            if level == 2 && matches!(self.peek(), Tok::Gt | Tok::Lt | Tok::EqEq) {
                return Err(Diagnostic::error("comparisons do not chain; add parentheses", Pos { ..pos }));
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Int(_)
                | Tok::Float(_)
                | Tok::Str(_)
                | Tok::True
                | Tok::False
                | Tok::LParen
                | Tok::LBrace
                | Tok::Modify
        )
    }

    fn application(&mut self) -> Result<Term, Diagnostic> {
        let mut head = self.postfix()?;
        loop {
            if self.starts_atom() {
                let arg = self.postfix()?;
                head = Term::app(head, arg);
            } else if matches!(self.peek(), Tok::Lambda | Tok::Let | Tok::LetEv | Tok::LetRec | Tok::If) {
                // A trailing abstraction, let or conditional is the last argument.
                let arg = self.term()?;
                return Ok(Term::app(head, arg));
            } else {
                return Ok(head);
            }
        }
    }

    fn postfix(&mut self) -> Result<Term, Diagnostic> {
        let mut t = self.atom()?;
        while self.peek() == &Tok::Dot {
            self.advance();
            let l = self.ident("a label after `.`")?;
            t = Term::select(t, l);
        }
        Ok(t)
    }

    fn literal_annotation(&mut self, lit: Literal) -> Result<Literal, Diagnostic> {
        if self.peek() != &Tok::Caret {
            return Ok(lit);
        }
        self.advance();
        let pos = self.pos();
        let ty = self.ident("a base type after `^`")?;
        let out = match (lit, ty.as_str()) {
            (l @ Literal::Bool(_), "Bool") => l,
            (l @ Literal::Int(_), "Int") => l,
            (Literal::Int(n), "Float") => Literal::Float(n as f64),
            (l @ Literal::Float(_), "Float") => l,
            (l @ Literal::Str(_), "String") => l,
            (l, other) => {
                return Err(Diagnostic::error(format!("literal `{l}` cannot be annotated with `{other}`"), pos))
            }
        };
        Ok(out)
    }

    fn int_literal(&self, n: u64, negative: bool, pos: Pos) -> Result<Literal, Diagnostic> {
        let v = if negative {
            if n > i64::MIN.unsigned_abs() {
                return Err(Diagnostic::error("integer literal out of range", pos));
            }
            (n as i128).wrapping_neg() as i64
        } else {
            i64::try_from(n).map_err(|_| Diagnostic::error("integer literal out of range", pos))?
        };
        Ok(Literal::Int(v))
    }

    fn atom(&mut self) -> Result<Term, Diagnostic> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.advance();
                Ok(Term::Var(x))
            }
            Tok::True | Tok::False => {
                let b = self.advance() == Tok::True;
                Ok(Term::Const(self.literal_annotation(Literal::Bool(b))?))
            }
            Tok::Int(n) => {
                self.advance();
                let lit = self.int_literal(n, false, pos)?;
                Ok(Term::Const(self.literal_annotation(lit)?))
            }
            Tok::Float(x) => {
                self.advance();
                Ok(Term::Const(self.literal_annotation(Literal::Float(x))?))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Term::Const(self.literal_annotation(Literal::Str(s))?))
            }
            Tok::LBrace => self.record(),
            Tok::Modify => {
                self.advance();
                self.expect(&Tok::LParen, "`(` after `modify`")?;
                let m = self.term()?;
                self.expect(&Tok::Comma, "`,`")?;
                let l = self.ident("a label")?;
                self.expect(&Tok::Comma, "`,`")?;
                let n = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Term::modify(m, l, n))
            }
            Tok::LParen => self.parenthesized(),
            _ => Err(self.unexpected("a term")),
        }
    }

    fn parenthesized(&mut self) -> Result<Term, Diagnostic> {
        let open = self.pos();
        self.advance();
        // Operator sections: `(+)`, `(and)`, ...
        if let Some(name) = binop_name(self.peek()) {
            if self.peek_at(1) == &Tok::RParen {
                self.advance();
                self.advance();
                return Ok(Term::var(name));
            }
        }
        // Negative literals: `(-3)`, `(-2.5)`.
        if self.peek() == &Tok::Minus {
            let lit_pos = self.pos();
            let lit = match self.peek_at(1).clone() {
                Tok::Int(n) => Some(self.int_literal(n, true, lit_pos)?),
                Tok::Float(x) => Some(Literal::Float(-x)),
                _ => None,
            };
            if let Some(lit) = lit {
                if self.peek_at(2) == &Tok::RParen {
                    self.advance();
                    self.advance();
                    self.advance();
                    return Ok(Term::Const(self.literal_annotation(lit)?));
                }
            }
            return Err(Diagnostic::error("unary minus is only allowed on literals, as in `(-3)`", lit_pos));
        }
        let first = self.term()?;
        if self.eat(&Tok::Comma) {
            let second = self.term()?;
            if self.peek() == &Tok::Comma {
                return Err(Diagnostic::error("only pairs are supported; nest them for longer tuples", self.pos()));
            }
            self.expect(&Tok::RParen, "`)` closing the pair")?;
            return Ok(Term::pair(first, second));
        }
        if self.peek() != &Tok::RParen {
            return Err(Diagnostic::error(
                format!(
                    "expected `)` to close the `(` at {}:{}, found {}",
                    open.line,
                    open.column,
                    self.peek().describe()
                ),
                self.pos(),
            ));
        }
        self.advance();
        Ok(first)
    }

    fn record(&mut self) -> Result<Term, Diagnostic> {
        let open = self.pos();
        self.advance();
        if self.peek() == &Tok::RBrace {
            return Err(Diagnostic::error("records need at least one field", open));
        }
        let mut fields = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            let lpos = self.pos();
            let l = self.ident("a field label")?;
            if !seen.insert(l.clone()) {
                return Err(Diagnostic::error(format!("duplicate label `{l}` in record"), lpos));
            }
            self.expect(&Tok::Eq, "`=` after the label")?;
            let t = self.term()?;
            fields.push((l, t));
            if self.eat(&Tok::Comma) {
                continue;
            }
            self.expect(&Tok::RBrace, "`,` or `}`")?;
            return Ok(Term::Record(fields));
        }
    }
}
