//! Abstract syntax of EVL terms.

use std::collections::BTreeSet;
use std::fmt;

use crate::types::BaseType;

/// A constant. Its base type is determined by the variant.
#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl Literal {
    pub fn base_type(&self) -> BaseType {
        match self {
            Literal::Bool(_) => BaseType::Bool,
            Literal::Int(_) => BaseType::Int,
            Literal::Float(_) => BaseType::Float,
            Literal::Str(_) => BaseType::String,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Int(n) if *n < 0 => write!(f, "(-{})", n.unsigned_abs()),
            Literal::Int(n) => write!(f, "{n}"),
            Literal::Float(x) => write_float(f, *x),
            Literal::Str(s) => write_string(f, s),
        }
    }
}

fn write_float(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x.is_nan() {
        f.write_str("(0.0 / 0.0)")
    } else if x.is_infinite() {
        if x > 0.0 {
            f.write_str("(1.0 / 0.0)")
        } else {
            f.write_str("((-1.0) / 0.0)")
        }
    } else if x.is_sign_negative() {
        // `{:?}` keeps enough digits to round-trip and always shows a point or exponent.
        write!(f, "(-{:?})", -x)
    } else {
        write!(f, "{x:?}")
    }
}

fn write_string(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("\"")?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str("\"")
}

/// EVL terms.
///
/// `LetRec` and `Fix` only occur in extended mode. `Fix(f, x, body)` is the
/// runtime value that a `letrec f = λx.body` binding reduces to.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Const(Literal),
    Var(String),
    App(Box<Term>, Box<Term>),
    Abs(String, Box<Term>),
    Cond(Box<Term>, Box<Term>, Box<Term>),
    Let(String, Box<Term>, Box<Term>),
    LetEv(String, Box<Term>, Box<Term>),
    LetRec(String, Box<Term>, Box<Term>),
    Record(Vec<(String, Term)>),
    Select(Box<Term>, String),
    Modify(Box<Term>, String, Box<Term>),
    Fix(String, String, Box<Term>),
}

impl Term {
    pub fn var(x: impl Into<String>) -> Term {
        Term::Var(x.into())
    }

    pub fn bool(b: bool) -> Term {
        Term::Const(Literal::Bool(b))
    }

    pub fn int(n: i64) -> Term {
        Term::Const(Literal::Int(n))
    }

    pub fn float(x: f64) -> Term {
        Term::Const(Literal::Float(x))
    }

    pub fn string(s: impl Into<String>) -> Term {
        Term::Const(Literal::Str(s.into()))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// `f a1 a2 ... an`, left-associated.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn abs(x: impl Into<String>, body: Term) -> Term {
        Term::Abs(x.into(), Box::new(body))
    }

    /// `λx1 ... λxn. body`.
    pub fn abs_many<S: Into<String>>(params: impl IntoIterator<Item = S>, body: Term) -> Term {
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        params.into_iter().rev().fold(body, |acc, p| Term::abs(p, acc))
    }

    pub fn cond(g: Term, t: Term, e: Term) -> Term {
        Term::Cond(Box::new(g), Box::new(t), Box::new(e))
    }

    pub fn let_(x: impl Into<String>, m: Term, n: Term) -> Term {
        Term::Let(x.into(), Box::new(m), Box::new(n))
    }

    pub fn let_ev(x: impl Into<String>, m: Term, n: Term) -> Term {
        Term::LetEv(x.into(), Box::new(m), Box::new(n))
    }

    pub fn let_rec(x: impl Into<String>, m: Term, n: Term) -> Term {
        Term::LetRec(x.into(), Box::new(m), Box::new(n))
    }

    pub fn record<L: Into<String>>(fields: impl IntoIterator<Item = (L, Term)>) -> Term {
        Term::Record(fields.into_iter().map(|(l, t)| (l.into(), t)).collect())
    }

    pub fn select(m: Term, l: impl Into<String>) -> Term {
        Term::Select(Box::new(m), l.into())
    }

    pub fn modify(m: Term, l: impl Into<String>, n: Term) -> Term {
        Term::Modify(Box::new(m), l.into(), Box::new(n))
    }

    /// The pair `(a, b)`, encoded as `{fst = a, snd = b}`.
    pub fn pair(a: Term, b: Term) -> Term {
        Term::record([("fst", a), ("snd", b)])
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::App(a, b) => 1 + a.size() + b.size(),
            Term::Abs(_, b) | Term::Fix(_, _, b) => 1 + b.size(),
            Term::Cond(a, b, c) => 1 + a.size() + b.size() + c.size(),
            Term::Let(_, a, b) | Term::LetEv(_, a, b) | Term::LetRec(_, a, b) => 1 + a.size() + b.size(),
            Term::Record(fs) => 1 + fs.iter().map(|(_, t)| t.size()).sum::<usize>(),
            Term::Select(m, _) => 1 + m.size(),
            Term::Modify(m, _, n) => 1 + m.size() + n.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Const(_) => {}
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::App(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Term::Abs(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::Fix(f, x, body) => {
                bound.push(f.clone());
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
                bound.pop();
            }
            Term::Cond(a, b, c) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
                c.collect_free(bound, out);
            }
            Term::Let(x, m, n) | Term::LetEv(x, m, n) => {
                m.collect_free(bound, out);
                bound.push(x.clone());
                n.collect_free(bound, out);
                bound.pop();
            }
            Term::LetRec(x, m, n) => {
                bound.push(x.clone());
                m.collect_free(bound, out);
                n.collect_free(bound, out);
                bound.pop();
            }
            Term::Record(fs) => fs.iter().for_each(|(_, t)| t.collect_free(bound, out)),
            Term::Select(m, _) => m.collect_free(bound, out),
            Term::Modify(m, _, n) => {
                m.collect_free(bound, out);
                n.collect_free(bound, out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// True if the term uses `letrec` anywhere.
    pub fn uses_letrec(&self) -> bool {
        match self {
            Term::LetRec(..) | Term::Fix(..) => true,
            Term::Const(_) | Term::Var(_) => false,
            Term::App(a, b) | Term::Let(_, a, b) | Term::LetEv(_, a, b) | Term::Modify(a, _, b) => {
                a.uses_letrec() || b.uses_letrec()
            }
            Term::Abs(_, b) | Term::Select(b, _) => b.uses_letrec(),
            Term::Cond(a, b, c) => a.uses_letrec() || b.uses_letrec() || c.uses_letrec(),
            Term::Record(fs) => fs.iter().any(|(_, t)| t.uses_letrec()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::pretty(self))
    }
}

/// Capture-avoiding substitution `[v/x]m`.
pub fn subst_term(v: &Term, x: &str, m: &Term) -> Term {
    let fv = v.free_vars();
    subst_rec(v, &fv, x, m)
}

fn subst_rec(v: &Term, fv: &BTreeSet<String>, x: &str, m: &Term) -> Term {
    match m {
        Term::Const(_) => m.clone(),
        Term::Var(y) => {
            if y == x {
                v.clone()
            } else {
                m.clone()
            }
        }
        Term::App(a, b) => Term::app(subst_rec(v, fv, x, a), subst_rec(v, fv, x, b)),
        Term::Abs(y, body) => {
            if y == x {
                return m.clone();
            }
            let (y, body) = freshen_binder(y, body, fv, x);
            Term::abs(y, subst_rec(v, fv, x, &body))
        }
        Term::Fix(g, y, body) => {
            if g == x || y == x {
                return m.clone();
            }
            let (g, body) = freshen_binder(g, body, fv, x);
            let (y, body) = freshen_binder(y, &body, fv, x);
            Term::Fix(g, y, Box::new(subst_rec(v, fv, x, &body)))
        }
        Term::Cond(a, b, c) => Term::cond(subst_rec(v, fv, x, a), subst_rec(v, fv, x, b), subst_rec(v, fv, x, c)),
        Term::Let(y, a, b) | Term::LetEv(y, a, b) => {
            let a2 = subst_rec(v, fv, x, a);
            let b2 = if y == x {
                (**b).clone()
            } else {
                let (y2, b) = freshen_binder(y, b, fv, x);
                return rebuild_let(m, y2, a2, subst_rec(v, fv, x, &b));
            };
            rebuild_let(m, y.clone(), a2, b2)
        }
        Term::LetRec(y, a, b) => {
            if y == x {
                return m.clone();
            }
            // The binder scopes over both parts, so rename it in both.
            let (y2, a1) = freshen_binder(y, a, fv, x);
            let b1 = if &y2 != y { rename_free(b, y, &y2) } else { (**b).clone() };
            Term::let_rec(y2, subst_rec(v, fv, x, &a1), subst_rec(v, fv, x, &b1))
        }
        Term::Record(fs) => Term::Record(fs.iter().map(|(l, t)| (l.clone(), subst_rec(v, fv, x, t))).collect()),
        Term::Select(a, l) => Term::select(subst_rec(v, fv, x, a), l.clone()),
        Term::Modify(a, l, b) => Term::modify(subst_rec(v, fv, x, a), l.clone(), subst_rec(v, fv, x, b)),
    }
}

fn rebuild_let(template: &Term, y: String, a: Term, b: Term) -> Term {
    match template {
        Term::LetEv(..) => Term::let_ev(y, a, b),
        _ => Term::let_(y, a, b),
    }
}

/// Renames binder `y` in `body` when it would capture a free variable of the
/// substituted value and the substitution actually reaches under it.
fn freshen_binder(y: &str, body: &Term, fv: &BTreeSet<String>, x: &str) -> (String, Term) {
    if !fv.contains(y) {
        return (y.to_string(), body.clone());
    }
    let body_fv = body.free_vars();
    if !body_fv.contains(x) {
        return (y.to_string(), body.clone());
    }
    let mut fresh = format!("{y}'");
    while fv.contains(&fresh) || body_fv.contains(&fresh) || fresh == x {
        fresh.push('\'');
    }
    let renamed = rename_free(body, y, &fresh);
    (fresh, renamed)
}

fn rename_free(body: &Term, from: &str, to: &str) -> Term {
    subst_term(&Term::Var(to.to_string()), from, body)
}
