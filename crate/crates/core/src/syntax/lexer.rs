//! Tokenizer shared by the term and type parsers.

use super::{Diagnostic, Pos};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Integer literal without sign; the parser checks the range.
    Int(u64),
    Float(f64),
    Str(String),
    /// `'t<n>`: an inference variable, only meaningful in type syntax.
    FreshVar(u32),
    Let,
    LetEv,
    LetRec,
    In,
    If,
    Then,
    Else,
    Modify,
    True,
    False,
    And,
    Or,
    Lambda,
    Dot,
    Eq,
    EqEq,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Caret,
    Plus,
    Minus,
    Star,
    Slash,
    Gt,
    Lt,
    Colon,
    ColonColon,
    Arrow,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Float(x) => format!("float `{x:?}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::FreshVar(n) => format!("type variable `'t{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Let => "let",
            Tok::LetEv => "letEv",
            Tok::LetRec => "letrec",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Modify => "modify",
            Tok::True => "true",
            Tok::False => "false",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Lambda => "\\",
            Tok::Dot => ".",
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Caret => "^",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Gt => ">",
            Tok::Lt => "<",
            Tok::Colon => ":",
            Tok::ColonColon => "::",
            Tok::Arrow => "->",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub const KEYWORDS: [&str; 12] =
    ["let", "letEv", "letrec", "in", "if", "then", "else", "modify", "true", "false", "and", "or"];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "let" => Tok::Let,
        "letEv" => Tok::LetEv,
        "letrec" => Tok::LetRec,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "modify" => Tok::Modify,
        "true" => Tok::True,
        "false" => Tok::False,
        "and" => Tok::And,
        "or" => Tok::Or,
        _ => return None,
    })
}

pub fn is_ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'λ') || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    (c.is_alphanumeric() && c != 'λ') || c == '_'
}

/// True if `s` lexes as a single identifier token.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else { return false };
    if !is_ident_start(first) {
        return false;
    }
    let rest: String = chars.collect();
    let body = rest.trim_end_matches('\'');
    body.chars().all(is_ident_continue) && keyword(s).is_none()
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|(_, c)| *c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.col }
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |(i, _)| *i)
    }
}

/// Splits source text into tokens; the last token is always `Eof`.
pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer { chars: src.char_indices().peekable(), src, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        // Whitespace and `--` comments.
        loop {
            match lx.peek() {
                Some(c) if c.is_whitespace() => {
                    lx.bump();
                }
                Some('-') if lx.peek2() == Some('-') => {
                    while let Some(c) = lx.peek() {
                        if c == '\n' {
                            break;
                        }
                        lx.bump();
                    }
                }
                _ => break,
            }
        }
        let pos = lx.pos();
        let Some(c) = lx.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = if is_ident_start(c) {
            let start = lx.offset();
            while lx.peek().is_some_and(is_ident_continue) {
                lx.bump();
            }
            while lx.peek() == Some('\'') {
                lx.bump();
            }
            let end = lx.offset();
            let word = &src[start..end];
            keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()))
        } else if c.is_ascii_digit() {
            lex_number(&mut lx, pos)?
        } else if c == '"' {
            lex_string(&mut lx, pos)?
        } else {
            lx.bump();
            match c {
                'λ' | '\\' => Tok::Lambda,
                '.' => Tok::Dot,
                '=' => {
                    if lx.peek() == Some('=') {
                        lx.bump();
                        Tok::EqEq
                    } else {
                        Tok::Eq
                    }
                }
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '^' => Tok::Caret,
                '+' => Tok::Plus,
                '-' => {
                    if lx.peek() == Some('>') {
                        lx.bump();
                        Tok::Arrow
                    } else {
                        Tok::Minus
                    }
                }
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '>' => Tok::Gt,
                '<' => Tok::Lt,
                ':' => {
                    if lx.peek() == Some(':') {
                        lx.bump();
                        Tok::ColonColon
                    } else {
                        Tok::Colon
                    }
                }
                '\'' => {
                    if lx.peek() != Some('t') {
                        return Err(Diagnostic::error("expected `'t<number>`", pos));
                    }
                    lx.bump();
                    let start = lx.offset();
                    while lx.peek().is_some_and(|d| d.is_ascii_digit()) {
                        lx.bump();
                    }
                    let end = lx.offset();
                    let n =
                        src[start..end].parse::<u32>().map_err(|_| Diagnostic::error("expected `'t<number>`", pos))?;
                    Tok::FreshVar(n)
                }
                other => return Err(Diagnostic::error(format!("unexpected character `{other}`"), pos)),
            }
        };
        out.push(Token { tok, pos });
    }
}

fn lex_number(lx: &mut Lexer<'_>, pos: Pos) -> Result<Tok, Diagnostic> {
    let start = lx.offset();
    while lx.peek().is_some_and(|d| d.is_ascii_digit()) {
        lx.bump();
    }
    let mut is_float = false;
    if lx.peek() == Some('.') && lx.peek2().is_some_and(|d| d.is_ascii_digit()) {
        is_float = true;
        lx.bump();
        while lx.peek().is_some_and(|d| d.is_ascii_digit()) {
            lx.bump();
        }
    }
    if matches!(lx.peek(), Some('e' | 'E')) {
        let next = lx.peek2();
        let has_exp = match next {
            Some(d) if d.is_ascii_digit() => true,
            Some('+' | '-') => {
                let mut it = lx.chars.clone();
                it.next();
                it.next();
                it.next().is_some_and(|(_, d)| d.is_ascii_digit())
            }
            _ => false,
        };
        if has_exp {
            is_float = true;
            lx.bump();
            if matches!(lx.peek(), Some('+' | '-')) {
                lx.bump();
            }
            while lx.peek().is_some_and(|d| d.is_ascii_digit()) {
                lx.bump();
            }
        }
    }
    let end = lx.offset();
    let text = &lx.src[start..end];
    if lx.peek().is_some_and(is_ident_start) {
        return Err(Diagnostic::error(format!("malformed number `{text}`"), pos));
    }
    if is_float {
        text.parse::<f64>().map(Tok::Float).map_err(|_| Diagnostic::error(format!("malformed float `{text}`"), pos))
    } else {
        text.parse::<u64>()
            .map(Tok::Int)
            .map_err(|_| Diagnostic::error(format!("integer literal `{text}` out of range"), pos))
    }
}

fn lex_string(lx: &mut Lexer<'_>, pos: Pos) -> Result<Tok, Diagnostic> {
    lx.bump();
    let mut s = String::new();
    loop {
        match lx.bump() {
            None => return Err(Diagnostic::error("unterminated string literal", pos)),
            Some('"') => return Ok(Tok::Str(s)),
            Some('\\') => {
                let esc_pos = lx.pos();
                match lx.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('r') => s.push('\r'),
                    Some(c) => return Err(Diagnostic::error(format!("unknown escape `\\{c}`"), esc_pos)),
                    None => return Err(Diagnostic::error("unterminated string literal", pos)),
                }
            }
            Some(c) => s.push(c),
        }
    }
}
