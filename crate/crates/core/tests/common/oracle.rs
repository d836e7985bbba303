//! Brute-force typing for tiny closed core terms, independent of the crate's
//! inference: it never unifies, it only tries ground types.
//!
//! Types are built from `Bool`, `Int`, arrows and the one-label record
//! `{l: T}`; base types have depth 0. [`Oracle::typable`] searches typings
//! whose subterm types have depth at most [`CAP`], which covers every term
//! of size ≤ 5 (a typing of such a term never needs to nest more than
//! four constructors). [`Oracle::typings`] lists the types of depth ≤ 2 a
//! term has.
//!
//! `let x = M in N` is typed as `N[M/x]` provided `M` has some type, which
//! is what let-polymorphism amounts to.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use evl::term::subst_term;
use evl::{Literal, MonoType, Term};

pub const CAP: u8 = 4;
pub const LABEL: &str = "l";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Ty {
    Bool,
    Int,
    Arrow(u32, u32),
    Rec(u32),
}

type TySet = Rc<BTreeSet<u32>>;
type Env = Vec<(String, u32)>;

pub struct Oracle {
    tys: Vec<Ty>,
    depth: Vec<u8>,
    index: HashMap<Ty, u32>,
    /// `pools[d]`: every type of depth at most `d`, for `d < CAP`.
    pools: Vec<Vec<u32>>,
    /// Terms built while inlining `let`; memo keys point into them.
    arena: Vec<Rc<Term>>,
    memo: HashMap<(usize, u8, Env), TySet>,
    exists_memo: HashMap<(usize, u8, Env), bool>,
}

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        let mut o = Oracle {
            tys: Vec::new(),
            depth: Vec::new(),
            index: HashMap::new(),
            pools: Vec::new(),
            arena: Vec::new(),
            memo: HashMap::new(),
            exists_memo: HashMap::new(),
        };
        let base = vec![o.intern(Ty::Bool), o.intern(Ty::Int)];
        o.pools.push(base);
        for _ in 1..CAP {
            let prev = o.pools.last().unwrap().clone();
            let mut next = o.pools[0].clone();
            for &a in &prev {
                for &b in &prev {
                    next.push(o.intern(Ty::Arrow(a, b)));
                }
                next.push(o.intern(Ty::Rec(a)));
            }
            o.pools.push(next);
        }
        o
    }

    fn intern(&mut self, t: Ty) -> u32 {
        if let Some(&i) = self.index.get(&t) {
            return i;
        }
        let d = match t {
            Ty::Bool | Ty::Int => 0,
            Ty::Arrow(a, b) => 1 + self.depth[a as usize].max(self.depth[b as usize]),
            Ty::Rec(a) => 1 + self.depth[a as usize],
        };
        let i = self.tys.len() as u32;
        self.tys.push(t);
        self.depth.push(d);
        self.index.insert(t, i);
        i
    }

    fn reset(&mut self) {
        self.memo.clear();
        self.exists_memo.clear();
        self.arena.clear();
    }

    /// Whether the closed term `t` has a typing within the search bound.
    pub fn typable(&mut self, t: &Term) -> bool {
        self.reset();
        self.exists(t, &[], CAP)
    }

    /// Every ground type of depth ≤ 2 that the closed term `t` has.
    pub fn typings(&mut self, t: &Term) -> Vec<MonoType> {
        self.reset();
        let set = self.types(t, &[], 2);
        set.iter().map(|&i| self.to_mono(i)).collect()
    }

    pub fn to_mono(&self, i: u32) -> MonoType {
        match self.tys[i as usize] {
            Ty::Bool => MonoType::bool(),
            Ty::Int => MonoType::int(),
            Ty::Arrow(a, b) => MonoType::arrow(self.to_mono(a), self.to_mono(b)),
            Ty::Rec(a) => MonoType::record([(LABEL, self.to_mono(a))]),
        }
    }

    fn key(t: &Term, env: &[(String, u32)], budget: u8) -> (usize, u8, Env) {
        let free = t.free_vars();
        let mut key_env: Env = Vec::new();
        for x in &free {
            if let Some(b) = env.iter().rev().find(|(y, _)| y == x) {
                key_env.push(b.clone());
            }
        }
        (t as *const Term as usize, budget, key_env)
    }

    fn inline(&mut self, x: &str, m: &Term, n: &Term) -> Rc<Term> {
        let t = Rc::new(subst_term(m, x, n));
        self.arena.push(t.clone());
        t
    }

    /// Whether `t` has some type of depth ≤ `budget`. Abstractions guess
    /// their parameter one binder at a time instead of building the set of
    /// all their types.
    fn exists(&mut self, t: &Term, env: &[(String, u32)], budget: u8) -> bool {
        let key = Self::key(t, env, budget);
        if let Some(&b) = self.exists_memo.get(&key) {
            return b;
        }
        let out = match t {
            Term::Abs(x, body) if budget > 0 => self.pools[budget as usize - 1].clone().into_iter().any(|s| {
                let mut env2 = env.to_vec();
                env2.push((x.clone(), s));
                self.exists(body, &env2, budget - 1)
            }),
            Term::Let(x, m, n) => {
                self.exists(m, env, CAP) && {
                    let inlined = self.inline(x, m, n);
                    self.exists(&inlined, env, budget)
                }
            }
            _ => !self.types(t, env, budget).is_empty(),
        };
        self.exists_memo.insert(key, out);
        out
    }

    /// All types of `t` with depth ≤ `budget`.
    fn types(&mut self, t: &Term, env: &[(String, u32)], budget: u8) -> TySet {
        let key = Self::key(t, env, budget);
        if let Some(s) = self.memo.get(&key) {
            return s.clone();
        }
        let out = Rc::new(self.compute(t, env, budget));
        self.memo.insert(key, out.clone());
        out
    }

    fn compute(&mut self, t: &Term, env: &[(String, u32)], budget: u8) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        let fits = |o: &Oracle, i: u32| o.depth[i as usize] <= budget;
        match t {
            Term::Const(Literal::Bool(_)) => {
                out.insert(self.index[&Ty::Bool]);
            }
            Term::Const(Literal::Int(_)) => {
                out.insert(self.index[&Ty::Int]);
            }
            Term::Const(_) => {}
            Term::Var(x) => {
                if let Some(&(_, i)) = env.iter().rev().find(|(y, _)| y == x) {
                    if fits(self, i) {
                        out.insert(i);
                    }
                }
            }
            Term::Abs(x, body) => {
                if budget == 0 {
                    return out;
                }
                for s in self.pools[budget as usize - 1].clone() {
                    let mut env2 = env.to_vec();
                    env2.push((x.clone(), s));
                    for &r in self.types(body, &env2, budget - 1).iter() {
                        out.insert(self.intern(Ty::Arrow(s, r)));
                    }
                }
            }
            Term::App(f, a) => {
                // The function type nests one level deeper than both sides.
                let args = self.types(a, env, CAP - 1);
                if let Term::Abs(x, body) = &**f {
                    // Check the abstraction against each argument type.
                    for &p in args.iter() {
                        let mut env2 = env.to_vec();
                        env2.push((x.clone(), p));
                        out.extend(self.types(body, &env2, budget.min(CAP - 1)).iter());
                    }
                } else {
                    for &ft in self.types(f, env, CAP).iter() {
                        if let Ty::Arrow(p, r) = self.tys[ft as usize] {
                            if fits(self, r) && args.contains(&p) {
                                out.insert(r);
                            }
                        }
                    }
                }
            }
            Term::Cond(g, a, b) => {
                if self.types(g, env, 0).contains(&self.index[&Ty::Bool]) {
                    let sa = self.types(a, env, budget);
                    let sb = self.types(b, env, budget);
                    out.extend(sa.intersection(&sb));
                }
            }
            Term::Let(x, m, n) => {
                if self.exists(m, env, CAP) {
                    let inlined = self.inline(x, m, n);
                    out.extend(self.types(&inlined, env, budget).iter());
                }
            }
            Term::Record(fs) => {
                if budget == 0 || fs.len() != 1 || fs[0].0 != LABEL {
                    return out;
                }
                for &i in self.types(&fs[0].1, env, budget - 1).iter() {
                    out.insert(self.intern(Ty::Rec(i)));
                }
            }
            Term::Select(m, l) => {
                // An abstraction never has a record type.
                if l != LABEL || matches!(**m, Term::Abs(..)) {
                    return out;
                }
                for &i in self.types(m, env, (budget + 1).min(CAP)).iter() {
                    if let Ty::Rec(f) = self.tys[i as usize] {
                        if fits(self, f) {
                            out.insert(f);
                        }
                    }
                }
            }
            Term::Modify(m, l, n) => {
                if l != LABEL || budget == 0 || matches!(**m, Term::Abs(..)) {
                    return out;
                }
                let ms = self.types(m, env, budget);
                let ns = self.types(n, env, budget - 1);
                for &i in ms.iter() {
                    if let Ty::Rec(f) = self.tys[i as usize] {
                        if ns.contains(&f) {
                            out.insert(i);
                        }
                    }
                }
            }
            Term::LetEv(..) | Term::LetRec(..) | Term::Fix(..) => panic!("outside the enumerated fragment"),
        }
        out
    }
}

/// Every closed term of exactly `size` nodes built from `true`, `1`,
/// variables `x`/`y`, abstraction, application, conditionals, `let`, the
/// record `{l = M}`, selection and `modify` on `l`.
pub fn closed_terms(size: usize) -> Vec<Term> {
    let mut cache = HashMap::new();
    terms(size, &[], &mut cache)
}

fn terms(size: usize, scope: &[&'static str], cache: &mut HashMap<(usize, Vec<&'static str>), Vec<Term>>) -> Vec<Term> {
    let mut scope_key: Vec<&'static str> = scope.to_vec();
    scope_key.sort();
    scope_key.dedup();
    let key = (size, scope_key.clone());
    if let Some(v) = cache.get(&key) {
        return v.clone();
    }
    let mut out = Vec::new();
    if size == 1 {
        out.push(Term::bool(true));
        out.push(Term::int(1));
        for x in &scope_key {
            out.push(Term::var(*x));
        }
    } else {
        let rest = size - 1;
        for x in ["x", "y"] {
            let mut inner = scope_key.clone();
            inner.push(x);
            for b in terms(rest, &inner, cache) {
                out.push(Term::abs(x, b));
            }
        }
        for i in 1..rest {
            let fs = terms(i, &scope_key, cache);
            let args = terms(rest - i, &scope_key, cache);
            for f in &fs {
                for a in &args {
                    out.push(Term::app(f.clone(), a.clone()));
                    out.push(Term::modify(f.clone(), LABEL, a.clone()));
                }
            }
            for x in ["x", "y"] {
                let mut inner = scope_key.clone();
                inner.push(x);
                let bodies = terms(rest - i, &inner, cache);
                for m in &fs {
                    for n in &bodies {
                        out.push(Term::let_(x, m.clone(), n.clone()));
                    }
                }
            }
        }
        for i in 1..rest {
            for j in 1..rest - i {
                let k = rest - i - j;
                for g in terms(i, &scope_key, cache) {
                    for a in terms(j, &scope_key, cache) {
                        for b in terms(k, &scope_key, cache) {
                            out.push(Term::cond(g.clone(), a.clone(), b));
                        }
                    }
                }
            }
        }
        for m in terms(rest, &scope_key, cache) {
            out.push(Term::record([(LABEL, m.clone())]));
            out.push(Term::select(m, LABEL));
        }
    }
    cache.insert(key, out.clone());
    out
}
