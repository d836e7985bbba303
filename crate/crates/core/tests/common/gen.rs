//! Term generators.
//!
//! [`typed_term`] builds closed core terms together with a ground type they
//! have by construction, so typing facts about them do not depend on the
//! crate's inference. [`any_term`] builds arbitrary (usually ill-typed)
//! syntax for the parser.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evl::{Literal, MonoType, Term};

const LABELS: [&str; 3] = ["l1", "l2", "l3"];

fn base_types() -> [MonoType; 4] {
    [MonoType::bool(), MonoType::int(), MonoType::float(), MonoType::string()]
}

/// A small random ground type.
pub fn random_type(rng: &mut impl Rng, depth: u32) -> MonoType {
    let bases = base_types();
    if depth == 0 || rng.gen_bool(0.55) {
        return bases.choose(rng).unwrap().clone();
    }
    if rng.gen_bool(0.5) {
        MonoType::arrow(random_type(rng, depth - 1), random_type(rng, depth - 1))
    } else {
        let n = rng.gen_range(1..=2);
        let mut labels = LABELS.to_vec();
        labels.shuffle(rng);
        MonoType::record(labels[..n].iter().map(|l| (*l, random_type(rng, depth - 1))))
    }
}

fn constant(rng: &mut impl Rng, t: &MonoType) -> Option<Term> {
    let MonoType::Base(b) = t else { return None };
    Some(match b.name() {
        "Bool" => Term::bool(rng.gen()),
        "Int" => Term::int(rng.gen_range(-3..10)),
        "Float" => Term::float(rng.gen_range(-4..8) as f64 * 0.5),
        _ => Term::string(["a", "b", "Porto"][rng.gen_range(0..3)]),
    })
}

struct Gen<'r, R> {
    rng: &'r mut R,
    fresh: usize,
}

#[derive(Clone)]
struct Scope {
    vars: Vec<(String, MonoType)>,
    /// Names bound to a polymorphic identity.
    ids: Vec<String>,
}

impl Scope {
    /// Scope extended with `x: t`; the new binding hides older ones.
    fn with(&self, x: &str, t: MonoType) -> Scope {
        let mut s = self.hiding(x);
        s.vars.push((x.to_string(), t));
        s
    }

    fn with_id(&self, x: &str) -> Scope {
        let mut s = self.hiding(x);
        s.ids.push(x.to_string());
        s
    }

    fn hiding(&self, x: &str) -> Scope {
        Scope {
            vars: self.vars.iter().filter(|(y, _)| y != x).cloned().collect(),
            ids: self.ids.iter().filter(|y| *y != x).cloned().collect(),
        }
    }
}

impl<R: Rng> Gen<'_, R> {
    fn name(&mut self) -> String {
        self.fresh += 1;
        ["x", "y", "z", "w"][self.fresh % 4].to_string() + &"'".repeat(self.fresh / 4 % 2)
    }

    fn term(&mut self, t: &MonoType, sc: &Scope, budget: i32) -> Term {
        let here: Vec<&String> = sc.vars.iter().filter(|(_, u)| u == t).map(|(x, _)| x).collect();
        if budget <= 1 {
            if let Some(x) = here.choose(self.rng) {
                return Term::var(x.as_str());
            }
            if let Some(c) = constant(self.rng, t) {
                return c;
            }
        }
        loop {
            let pick = self.rng.gen_range(0..12);
            let b = budget - 1;
            match pick {
                0 | 11 if !here.is_empty() => return Term::var(here.choose(self.rng).unwrap().as_str()),
                1 if b >= 3 => {
                    let g = self.term(&MonoType::bool(), sc, b / 3);
                    let x = self.term(t, sc, b / 3);
                    let y = self.term(t, sc, b / 3);
                    return Term::cond(g, x, y);
                }
                2 if b >= 2 => {
                    let a = random_type(self.rng, 1);
                    let f = self.term(&MonoType::arrow(a.clone(), t.clone()), sc, b / 2);
                    let x = self.term(&a, sc, b / 2);
                    return Term::app(f, x);
                }
                3 if b >= 2 => {
                    let a = random_type(self.rng, 1);
                    let x = self.name();
                    let m = self.term(&a, sc, b / 2);
                    let inner = sc.with(&x, a);
                    let n = self.term(t, &inner, b / 2);
                    return Term::let_(x, m, n);
                }
                4 if b >= 2 => {
                    let mut fields = vec![(LABELS[0], t.clone())];
                    if self.rng.gen_bool(0.5) {
                        fields.push((LABELS[1], random_type(self.rng, 0)));
                    }
                    let r = self.term(&MonoType::record(fields), sc, b);
                    return Term::select(r, LABELS[0]);
                }
                5 if b >= 3 => {
                    // A polymorphic identity, used at this type.
                    let f = self.name();
                    let z = self.name();
                    let inner = sc.with_id(&f);
                    let body = self.term(t, &inner, b - 2);
                    return Term::let_(f, Term::abs(z.clone(), Term::var(z)), body);
                }
                6 if !sc.ids.is_empty() && b >= 1 => {
                    let f = sc.ids.choose(self.rng).unwrap().clone();
                    return Term::app(Term::var(f), self.term(t, sc, b));
                }
                7 if b >= 3 => {
                    // letEv over a flat record.
                    let e = self.name();
                    let ety = MonoType::record([(LABELS[2], random_type(self.rng, 0))]);
                    let MonoType::Record(fs) = &ety else { unreachable!() };
                    let ev = Term::record(fs.iter().map(|(l, ft)| (l.clone(), constant(self.rng, ft).unwrap())));
                    let inner = sc.with(&e, ety);
                    return Term::let_ev(e, ev, self.term(t, &inner, b - 2));
                }
                8 | 9 => {
                    if let Some(m) = self.shaped(t, sc, b) {
                        return m;
                    }
                }
                10 if b >= 2 => {
                    if let Some(m) = self.operator(t, sc, b) {
                        return m;
                    }
                }
                _ => {
                    if budget <= 2 {
                        if let Some(c) = constant(self.rng, t) {
                            return c;
                        }
                        if let Some(m) = self.shaped(t, sc, b) {
                            return m;
                        }
                    }
                }
            }
        }
    }

    /// Introduction forms for the type's own constructor.
    fn shaped(&mut self, t: &MonoType, sc: &Scope, b: i32) -> Option<Term> {
        match t {
            MonoType::Base(_) => constant(self.rng, t),
            MonoType::Arrow(a, r) => {
                let x = self.name();
                let inner = sc.with(&x, (**a).clone());
                Some(Term::abs(x, self.term(r, &inner, b)))
            }
            MonoType::Record(fs) => {
                if self.rng.gen_bool(0.25) && b >= 3 {
                    let (l, ft) = fs.iter().nth(self.rng.gen_range(0..fs.len())).unwrap();
                    let m = self.term(t, sc, b / 2);
                    let n = self.term(ft, sc, b / 2);
                    return Some(Term::modify(m, l.clone(), n));
                }
                let share = (b / fs.len() as i32).max(1);
                Some(Term::record(fs.iter().map(|(l, ft)| (l.clone(), self.term(ft, sc, share)))))
            }
            MonoType::Var(_) | MonoType::List(_) => None,
        }
    }

    fn operator(&mut self, t: &MonoType, sc: &Scope, b: i32) -> Option<Term> {
        let MonoType::Base(base) = t else { return None };
        let (op, arg): (&str, MonoType) = match base.name() {
            "Int" => (["iadd", "isub", "imul"][self.rng.gen_range(0..3)], MonoType::int()),
            "Float" => (["+", "-", "*", "/"][self.rng.gen_range(0..4)], MonoType::float()),
            "Bool" => match self.rng.gen_range(0..6) {
                0 => ("and", MonoType::bool()),
                1 => ("or", MonoType::bool()),
                2 => (">", MonoType::float()),
                3 => ("igt", MonoType::int()),
                4 => ("==", MonoType::string()),
                _ => return Some(Term::app(Term::var("not"), self.term(t, sc, b))),
            },
            _ => return None,
        };
        let x = self.term(&arg, sc, b / 2);
        let y = self.term(&arg, sc, b / 2);
        Some(Term::apps(Term::var(op), [x, y]))
    }
}

/// A closed core term of type `ty`, generated from `seed`. Uses the prelude
/// operators but never integer division.
pub fn typed_term(seed: u64, budget: i32) -> (Term, MonoType) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ty = random_type(&mut rng, 2);
    let mut g = Gen { rng: &mut rng, fresh: 0 };
    let t = g.term(&ty, &Scope { vars: Vec::new(), ids: Vec::new() }, budget);
    (t, ty)
}

/// A typed term of at most `max_size` nodes, generated from `seed`.
pub fn sized_typed_term(seed: u64, max_size: usize) -> (Term, MonoType) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let budget = rng.gen_range(3..=max_size as i32 + 4);
        let (t, ty) = typed_term(rng.gen(), budget);
        if t.size() <= max_size {
            return (t, ty);
        }
    }
}

/// Typed terms of at most `max_size` nodes.
pub fn small_typed_term(max_size: usize) -> impl Strategy<Value = (Term, MonoType)> {
    any::<u64>().prop_map(move |seed| sized_typed_term(seed, max_size))
}

fn ident() -> impl Strategy<Value = String> {
    prop_oneof![
        prop::sample::select(vec!["x", "y", "f", "acc", "fire_danger", "x1", "_tmp", "ré"]).prop_map(String::from),
        "[a-z][a-z0-9_]{0,4}'{0,2}".prop_filter("keyword", |s| evl::syntax::is_identifier(s)),
    ]
}

fn label() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["l", "l1", "location", "temperature", "fst", "snd", "head", "empty"])
        .prop_map(String::from)
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        any::<bool>().prop_map(Literal::Bool),
        any::<i64>().prop_map(Literal::Int),
        prop::num::f64::NORMAL.prop_map(Literal::Float),
        (-1000i32..1000).prop_map(|n| Literal::Float(n as f64 / 8.0)),
        "[ -~]{0,6}".prop_map(Literal::Str),
        "[\"\\\\\\n\\té]{0,4}".prop_map(Literal::Str),
    ]
}

/// Arbitrary extended-mode syntax trees (no fixpoints, which have no
/// concrete syntax).
pub fn any_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        literal().prop_map(Term::Const),
        ident().prop_map(Term::Var),
        prop::sample::select(vec!["+", "==", "and", "not", "nil", "cons", "iadd"]).prop_map(Term::var),
    ];
    leaf.prop_recursive(6, 40, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (ident(), inner.clone()).prop_map(|(x, b)| Term::abs(x, b)),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(g, a, b)| Term::cond(g, a, b)),
            (ident(), inner.clone(), inner.clone()).prop_map(|(x, m, n)| Term::let_(x, m, n)),
            (ident(), inner.clone(), inner.clone()).prop_map(|(x, m, n)| Term::let_ev(x, m, n)),
            (ident(), ident(), inner.clone(), inner.clone()).prop_map(|(f, x, b, n)| Term::let_rec(
                f,
                Term::abs(x, b),
                n
            )),
            prop::collection::btree_map(label(), inner.clone(), 1..4)
                .prop_map(|fs| Term::Record(fs.into_iter().collect())),
            (inner.clone(), label()).prop_map(|(m, l)| Term::select(m, l)),
            (inner.clone(), label(), inner.clone()).prop_map(|(m, l, n)| Term::modify(m, l, n)),
        ]
    })
}
