//! The `WK` inference algorithm and the closure operation.

use std::collections::{BTreeMap, BTreeSet};

use super::shape::is_event_type;
use super::unify::{unify, unify_finite, UnifyError};
use crate::term::Term;
use crate::types::{
    eftv, ftv, FreshSupply, Kind, KindingEnv, MonoType, PolyType, Substitution, TyVar, Types, TypingEnv,
};

/// `WK(K, Γ, M) = (K', S, τ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inference {
    pub kinds: KindingEnv,
    pub subst: Substitution,
    pub ty: MonoType,
}

impl Inference {
    /// `{"type": τ, "kinds": {var: kind}, "subst": {var: type}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let kinds: serde_json::Map<String, serde_json::Value> =
            self.kinds.iter().map(|(v, k)| (v.to_string(), k.to_string().into())).collect();
        let subst: serde_json::Map<String, serde_json::Value> =
            self.subst.iter().map(|(v, t)| (v.to_string(), t.to_string().into())).collect();
        serde_json::json!({ "type": self.ty.to_string(), "kinds": kinds, "subst": subst })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("{context}: {error}")]
    Unify { context: String, error: UnifyError },
    #[error("`{name}` is bound with letEv but its type `{ty}` is not an event type")]
    NotAnEvent { name: String, ty: MonoType },
    #[error("letrec needs extended mode")]
    LetRecInCore,
    #[error("the body of `letrec {0}` must be a function")]
    LetRecNotFunction(String),
}

/// Runs `WK` on `m`.
pub fn infer(k: &KindingEnv, g: &TypingEnv, m: &Term) -> Result<Inference, TypeError> {
    infer_avoiding(k, g, m, &BTreeSet::new())
}

/// Like [`infer`], with fresh variables also kept apart from `avoid`.
pub fn infer_avoiding(
    k: &KindingEnv,
    g: &TypingEnv,
    m: &Term,
    avoid: &BTreeSet<TyVar>,
) -> Result<Inference, TypeError> {
    Wk::new(k, g, avoid, false).run(k, g, m)
}

/// Like [`infer`], but unifies with [`unify_finite`], so a term whose typing
/// needs a cyclic kind is rejected.
pub fn infer_finite(k: &KindingEnv, g: &TypingEnv, m: &Term) -> Result<Inference, TypeError> {
    Wk::new(k, g, &BTreeSet::new(), true).run(k, g, m)
}

/// Every type variable in `g`, bound ones included, so that fresh names
/// never coincide with a name already written somewhere.
fn all_vars(g: &TypingEnv) -> BTreeSet<TyVar> {
    let mut out = BTreeSet::new();
    for (_, s) in g.iter() {
        s.body.ftv_into(&mut out);
        for (v, k) in &s.prefix {
            out.insert(v.clone());
            k.ftv_into(&mut out);
        }
    }
    out
}

/// `Cls(K, Γ, τ)`: quantifies `eftv(K, τ) \ eftv(K, Γ)`, moving their kinds
/// out of `K`.
///
/// A variable is quantified before the variables whose kinds mention it;
/// ties go to the smaller name. Cyclic kinds break at the smallest name.
pub fn closure(k: &KindingEnv, g: &TypingEnv, t: &MonoType) -> (KindingEnv, PolyType) {
    let env_vars = eftv(k, g);
    let vars: BTreeSet<TyVar> = eftv(k, t).difference(&env_vars).cloned().collect();
    let kind_of = |v: &TyVar| k.get(v).cloned().unwrap_or(Kind::Universal);

    // deps[v] = quantified variables that v's kind mentions.
    let deps: BTreeMap<&TyVar, BTreeSet<TyVar>> = vars
        .iter()
        .map(|v| {
            let d: BTreeSet<TyVar> = ftv(&kind_of(v)).into_iter().filter(|w| vars.contains(w) && w != v).collect();
            (v, d)
        })
        .collect();
    let mut done: BTreeSet<TyVar> = BTreeSet::new();
    let mut prefix = Vec::with_capacity(vars.len());
    while done.len() < vars.len() {
        let ready = vars.iter().find(|v| !done.contains(*v) && deps[v].iter().all(|w| done.contains(w)));
        let next = ready.or_else(|| vars.iter().find(|v| !done.contains(*v))).unwrap().clone();
        prefix.push((next.clone(), kind_of(&next)));
        done.insert(next);
    }

    let mut rest = k.clone();
    for v in &vars {
        rest.remove(v);
    }
    (rest, PolyType::new(prefix, t.clone()))
}

struct Wk {
    supply: FreshSupply,
    finite: bool,
}

type Step = (KindingEnv, Substitution, MonoType);

impl Wk {
    fn new(k: &KindingEnv, g: &TypingEnv, avoid: &BTreeSet<TyVar>, finite: bool) -> Wk {
        Wk { supply: FreshSupply::avoiding([&ftv(k), &all_vars(g), avoid]), finite }
    }

    fn run(&mut self, k: &KindingEnv, g: &TypingEnv, m: &Term) -> Result<Inference, TypeError> {
        let (kinds, subst, ty) = self.infer(k, g, m)?;
        Ok(Inference { kinds, subst, ty })
    }

    fn infer(&mut self, k: &KindingEnv, g: &TypingEnv, m: &Term) -> Result<Step, TypeError> {
        match m {
            Term::Const(lit) => Ok((k.clone(), Substitution::identity(), MonoType::Base(lit.base_type()))),
            Term::Var(x) => {
                let sigma = g.get(x).ok_or_else(|| TypeError::Unbound(x.clone()))?;
                let s: Substitution = sigma.prefix.iter().map(|(v, _)| (v.clone(), self.supply.fresh_type())).collect();
                let mut k1 = k.clone();
                for (v, kind) in &sigma.prefix {
                    let MonoType::Var(beta) = s.lookup(v) else { unreachable!() };
                    k1.insert(beta, kind.apply(&s));
                }
                Ok((k1, Substitution::identity(), sigma.body.apply(&s)))
            }
            Term::App(m1, m2) => {
                let (k1, s1, t1) = self.infer(k, g, m1)?;
                let (mut k2, s2, t2) = self.infer(&k1, &g.apply(&s1), m2)?;
                let a = self.supply.fresh();
                k2.insert(a.clone(), Kind::Universal);
                let fun = t1.apply(&s2);
                let want = MonoType::arrow(t2, MonoType::Var(a.clone()));
                let (k3, s3) = self.unify_in(|| format!("in the application `{m}`"), &k2, vec![(fun, want)])?;
                let result = s3.lookup(&a);
                Ok((k3, s3.compose(&s2).compose(&s1), result))
            }
            Term::Abs(x, body) => {
                let a = self.supply.fresh();
                let mut k0 = k.clone();
                k0.insert(a.clone(), Kind::Universal);
                let g0 = g.extended(x, PolyType::mono(MonoType::Var(a.clone())));
                let (k1, s1, t) = self.infer(&k0, &g0, body)?;
                let dom = s1.lookup(&a);
                Ok((k1, s1, MonoType::arrow(dom, t)))
            }
            Term::Let(x, m1, m2) => self.infer_let(k, g, x, m1, m2, false),
            Term::LetEv(x, m1, m2) => self.infer_let(k, g, x, m1, m2, true),
            Term::LetRec(f, m1, m2) => {
                if !matches!(**m1, Term::Abs(..)) {
                    return Err(TypeError::LetRecNotFunction(f.clone()));
                }
                let (k1, s1, t1) = self.infer_recursive(k, g, f, m1)?;
                let g1 = g.apply(&s1);
                let (k1c, sigma) = closure(&k1, &g1, &t1);
                let (k2, s2, t2) = self.infer(&k1c, &g1.extended(f, sigma), m2)?;
                Ok((k2, s2.compose(&s1), t2))
            }
            Term::Fix(f, x, body) => {
                let lam = Term::Abs(x.clone(), body.clone());
                self.infer_recursive(k, g, f, &lam)
            }
            Term::Record(fields) => {
                let mut kc = k.clone();
                let mut sc = Substitution::identity();
                let mut tys: Vec<(String, MonoType)> = Vec::with_capacity(fields.len());
                for (l, mi) in fields {
                    let (ki, si, ti) = self.infer(&kc, &g.apply(&sc), mi)?;
                    for (_, t) in tys.iter_mut() {
                        *t = t.apply(&si);
                    }
                    tys.push((l.clone(), ti));
                    kc = ki;
                    sc = si.compose(&sc);
                }
                Ok((kc, sc, MonoType::record(tys)))
            }
            Term::Select(m1, l) => {
                let (mut k1, s1, t1) = self.infer(k, g, m1)?;
                let a1 = self.supply.fresh();
                let a2 = self.supply.fresh();
                k1.insert(a1.clone(), Kind::Universal);
                k1.insert(a2.clone(), Kind::record([(l.clone(), MonoType::Var(a1.clone()))]));
                let (k2, s2) =
                    self.unify_in(|| format!("in the selection `{m}`"), &k1, vec![(MonoType::Var(a2), t1)])?;
                let result = s2.lookup(&a1);
                Ok((k2, s2.compose(&s1), result))
            }
            Term::Modify(m1, l, m2) => {
                let (k1, s1, t1) = self.infer(k, g, m1)?;
                let (mut k2, s2, t2) = self.infer(&k1, &g.apply(&s1), m2)?;
                let a1 = self.supply.fresh();
                let a2 = self.supply.fresh();
                k2.insert(a1.clone(), Kind::Universal);
                k2.insert(a2.clone(), Kind::record([(l.clone(), MonoType::Var(a1.clone()))]));
                let eqs = vec![(MonoType::Var(a1), t2), (MonoType::Var(a2.clone()), t1.apply(&s2))];
                let (k3, s3) = self.unify_in(|| format!("in `{m}`"), &k2, eqs)?;
                let result = s3.lookup(&a2);
                Ok((k3, s3.compose(&s2).compose(&s1), result))
            }
            Term::Cond(m1, m2, m3) => {
                let (k1, s1, t1) = self.infer(k, g, m1)?;
                let (k2, s2) =
                    self.unify_in(|| format!("in the condition `{m1}`"), &k1, vec![(t1, MonoType::bool())])?;
                let s21 = s2.compose(&s1);
                let (k3, s3, t2) = self.infer(&k2, &g.apply(&s21), m2)?;
                let s321 = s3.compose(&s21);
                let (k4, s4, t3) = self.infer(&k3, &g.apply(&s321), m3)?;
                let t2 = t2.apply(&s4);
                let (k5, s5) = self.unify_in(|| format!("in the branches of `{m}`"), &k4, vec![(t2.clone(), t3)])?;
                Ok((k5, s5.compose(&s4).compose(&s321), t2.apply(&s5)))
            }
        }
    }

    fn infer_let(
        &mut self,
        k: &KindingEnv,
        g: &TypingEnv,
        x: &str,
        m1: &Term,
        m2: &Term,
        event: bool,
    ) -> Result<Step, TypeError> {
        let (k1, s1, t1) = self.infer(k, g, m1)?;
        if event && !is_event_type(&t1) {
            return Err(TypeError::NotAnEvent { name: x.to_string(), ty: t1 });
        }
        let g1 = g.apply(&s1);
        let (k1c, sigma) = closure(&k1, &g1, &t1);
        let (k2, s2, t2) = self.infer(&k1c, &g1.extended(x, sigma), m2)?;
        Ok((k2, s2.compose(&s1), t2))
    }

    fn unify_in(
        &self,
        context: impl FnOnce() -> String,
        k: &KindingEnv,
        eqs: Vec<(MonoType, MonoType)>,
    ) -> Result<(KindingEnv, Substitution), TypeError> {
        let r = if self.finite { unify_finite(k, eqs) } else { unify(k, eqs) };
        r.map_err(|error| TypeError::Unify { context: context(), error })
    }

    /// Types `lam` with `f` bound monomorphically to its own type.
    fn infer_recursive(&mut self, k: &KindingEnv, g: &TypingEnv, f: &str, lam: &Term) -> Result<Step, TypeError> {
        let a = self.supply.fresh();
        let mut k0 = k.clone();
        k0.insert(a.clone(), Kind::Universal);
        let g0 = g.extended(f, PolyType::mono(MonoType::Var(a.clone())));
        let (k1, s1, t1) = self.infer(&k0, &g0, lam)?;
        let (k2, s2) =
            self.unify_in(|| format!("in the recursive use of `{f}`"), &k1, vec![(s1.lookup(&a), t1.clone())])?;
        Ok((k2, s2.compose(&s1), t1.apply(&s2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_kind, parse_monotype, parse_scheme};
    use crate::Mode;

    fn ty(s: &str) -> MonoType {
        parse_monotype(s).unwrap()
    }

    fn kenv(entries: &[(&str, &str)]) -> KindingEnv {
        entries.iter().map(|(v, k)| (TyVar::named(*v), parse_kind(k).unwrap())).collect()
    }

    fn run(src: &str) -> Result<Inference, TypeError> {
        infer(&KindingEnv::new(), &TypingEnv::new(), &parse(src, Mode::Extended).unwrap())
    }

    #[test]
    fn identity() {
        let r = run("λx. x").unwrap();
        let MonoType::Arrow(a, b) = &r.ty else { panic!() };
        assert_eq!(a, b);
        assert_eq!(r.kinds.len(), 1);
    }

    #[test]
    fn fire_danger_run() {
        let r =
            run(r#"letEv FireDanger = λl. λd. {location = l, fire_danger = d} in FireDanger "Porto" "low""#).unwrap();
        assert_eq!(r.ty, ty("{fire_danger: String, location: String}"));
        assert!(r.kinds.is_empty());
    }

    #[test]
    fn selection_builds_record_kinds() {
        let r = run("λx. x.l").unwrap();
        let (k, s) = closure(&r.kinds, &TypingEnv::new(), &r.ty);
        assert!(k.is_empty());
        assert!(s.equivalent(&parse_scheme("forall a::U. forall b::{{l: a}}. b -> a").unwrap()));
    }

    #[test]
    fn letev_rejects_non_events() {
        assert!(matches!(run("letEv f = λx. x in f"), Err(TypeError::NotAnEvent { .. })));
        assert!(matches!(run("letEv f = {l = {m = 1}} in f"), Err(TypeError::NotAnEvent { .. })));
        assert!(run("letEv f = {l = 1} in f").is_ok());
    }

    #[test]
    fn unbound_and_clashes() {
        assert_eq!(run("y"), Err(TypeError::Unbound("y".into())));
        assert!(matches!(run("if 1 then 2 else 3"), Err(TypeError::Unify { .. })));
        assert!(matches!(run("{l = 1}.m"), Err(TypeError::Unify { .. })));
        assert!(matches!(run("λx. x x"), Err(TypeError::Unify { .. })));
    }

    #[test]
    fn let_is_polymorphic() {
        let r = run("let id = λx. x in {a = id 1, b = id true}").unwrap();
        assert_eq!(r.ty, ty("{a: Int, b: Bool}"));
    }

    #[test]
    fn letrec_is_monomorphic_inside() {
        let r = run("letrec f x = if true then x else f x in {a = f 1, b = f true}").unwrap();
        assert_eq!(r.ty, ty("{a: Int, b: Bool}"));
        assert!(run("letrec f x = f in f").is_err());
    }

    #[test]
    fn closure_worked_example() {
        let k = kenv(&[("a2", "U"), ("a3", "U"), ("a4", "U"), ("a1", "{{l1: a2}}")]);
        let g: TypingEnv = [("x".to_string(), PolyType::mono(ty("a1")))].into_iter().collect();
        let t = ty("{l1: a2, l4: Bool} -> {l2: Int, l3: a3 -> a4}");
        let (k2, s) = closure(&k, &g, &t);
        assert_eq!(k2, kenv(&[("a2", "U"), ("a1", "{{l1: a2}}")]));
        assert_eq!(s.to_string(), "forall a3::U. forall a4::U. {l1: a2, l4: Bool} -> {l2: Int, l3: a3 -> a4}");
    }

    #[test]
    fn closure_orders_by_dependency() {
        let k = kenv(&[("z", "U"), ("a", "{{l: z}}")]);
        let (_, s) = closure(&k, &TypingEnv::new(), &ty("a"));
        assert_eq!(s.to_string(), "forall z::U. forall a::{{l: z}}. a");
        let (k2, s) = closure(&KindingEnv::new(), &TypingEnv::new(), &ty("Int"));
        assert!(k2.is_empty() && s.is_mono());
    }
}
