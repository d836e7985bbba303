//! Parser for type syntax, the inverse of the `Display` impls in [`crate::types`].
//!
//! ```text
//! scheme ::= ("forall" tvar "::" kind ".")* mono
//! mono   ::= app ("->" mono)?
//! app    ::= "List" atom | atom
//! atom   ::= Bool | Int | Float | String | tvar | 't<n> | "{" fields "}" | "(" mono ")"
//! kind   ::= "U" | "{{" fields "}}"
//! ```

use std::collections::BTreeSet;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Pos};
use crate::types::{BaseType, Fields, Kind, MonoType, PolyType, TyVar};

struct TyParser {
    toks: Vec<Token>,
    i: usize,
}

pub fn parse_scheme(src: &str) -> Result<PolyType, Diagnostic> {
    let mut p = TyParser { toks: lex(src)?, i: 0 };
    let s = p.scheme()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(s)
}

pub fn parse_monotype(src: &str) -> Result<MonoType, Diagnostic> {
    let mut p = TyParser { toks: lex(src)?, i: 0 };
    let t = p.mono()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(t)
}

pub fn parse_kind(src: &str) -> Result<Kind, Diagnostic> {
    let mut p = TyParser { toks: lex(src)?, i: 0 };
    let k = p.kind()?;
    p.expect(&Tok::Eof, "end of input")?;
    Ok(k)
}

const RESERVED: [&str; 7] = ["Bool", "Int", "Float", "String", "List", "U", "forall"];

impl TyParser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
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

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), Diagnostic> {
        if self.peek() == t {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(format!("expected {what}, found {}", self.peek().describe()), self.pos())
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn tyvar(&mut self) -> Result<TyVar, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.advance();
                Ok(TyVar::Named(s))
            }
            Tok::FreshVar(n) => {
                self.advance();
                Ok(TyVar::Fresh(n))
            }
            _ => Err(self.unexpected("a type variable")),
        }
    }

    fn scheme(&mut self) -> Result<PolyType, Diagnostic> {
        let mut prefix = Vec::new();
        let mut seen = BTreeSet::new();
        while self.is_word("forall") {
            self.advance();
            let pos = self.pos();
            let v = self.tyvar()?;
            if !seen.insert(v.clone()) {
                return Err(Diagnostic::error(format!("`{v}` is quantified twice"), pos));
            }
            self.expect(&Tok::ColonColon, "`::`")?;
            let k = self.kind()?;
            self.expect(&Tok::Dot, "`.`")?;
            prefix.push((v, k));
        }
        let body = self.mono()?;
        Ok(PolyType::new(prefix, body))
    }

    fn kind(&mut self) -> Result<Kind, Diagnostic> {
        if self.is_word("U") {
            self.advance();
            return Ok(Kind::Universal);
        }
        self.expect(&Tok::LBrace, "a kind (`U` or `{{...}}`)")?;
        self.expect(&Tok::LBrace, "`{{` opening a record kind")?;
        let fs = self.fields()?;
        self.expect(&Tok::RBrace, "`}}`")?;
        self.expect(&Tok::RBrace, "`}}`")?;
        Ok(Kind::Record(fs))
    }

    fn fields(&mut self) -> Result<Fields, Diagnostic> {
        let mut fs = Fields::new();
        loop {
            let pos = self.pos();
            let l = match self.peek().clone() {
                Tok::Ident(s) => {
                    self.advance();
                    s
                }
                _ => return Err(self.unexpected("a field label")),
            };
            self.expect(&Tok::Colon, "`:`")?;
            let t = self.mono()?;
            if fs.insert(l.clone(), t).is_some() {
                return Err(Diagnostic::error(format!("duplicate label `{l}`"), pos));
            }
            if self.peek() == &Tok::Comma {
                self.advance();
                continue;
            }
            return Ok(fs);
        }
    }

    fn mono(&mut self) -> Result<MonoType, Diagnostic> {
        let dom = self.app()?;
        if self.peek() == &Tok::Arrow {
            self.advance();
            let cod = self.mono()?;
            return Ok(MonoType::arrow(dom, cod));
        }
        Ok(dom)
    }

    fn app(&mut self) -> Result<MonoType, Diagnostic> {
        if self.is_word("List") {
            self.advance();
            let elem = self.atom()?;
            return Ok(MonoType::list(elem));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<MonoType, Diagnostic> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                if let Some(b) = BaseType::from_name(&s) {
                    self.advance();
                    return Ok(MonoType::Base(b));
                }
                if s == "List" {
                    return self.app();
                }
                Ok(MonoType::Var(self.tyvar()?))
            }
            Tok::FreshVar(_) => Ok(MonoType::Var(self.tyvar()?)),
            Tok::LBrace => {
                let open = self.pos();
                self.advance();
                if self.peek() == &Tok::RBrace {
                    return Err(Diagnostic::error("record types need at least one field", open));
                }
                let fs = self.fields()?;
                self.expect(&Tok::RBrace, "`,` or `}`")?;
                Ok(MonoType::Record(fs))
            }
            Tok::LParen => {
                self.advance();
                let t = self.mono()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a type")),
        }
    }
}
