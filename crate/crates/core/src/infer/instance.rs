//! Generic instances and the typing check.
//!
//! Both questions reduce to matching: the variables that may be chosen are
//! flexible, everything else is rigid, and kinded unification runs with the
//! rigid set fixed. Flexible variables left unconstrained afterwards are
//! completed with a witness from their kind.

use std::collections::BTreeSet;

use super::algorithm::infer_avoiding;
use super::unify::unify_rigid;
use crate::term::Term;
use crate::types::{
    eftv, ftv, respects, FreshSupply, Kind, KindingEnv, MonoType, PolyType, Substitution, TyVar, Types, TypingEnv,
};

/// `K ⊩ σ₁ ≥ σ₂`.
pub fn generic_instance(k: &KindingEnv, s1: &PolyType, s2: &PolyType) -> bool {
    instance_witness(k, s1, s2).is_some()
}

/// The substitution on `σ₁`'s (renamed) prefix that yields `σ₂`, if any.
pub fn instance_witness(k: &KindingEnv, s1: &PolyType, s2: &PolyType) -> Option<Substitution> {
    let mut k = k.clone();
    for v in ftv(s1).union(&ftv(s2)) {
        if !k.contains(v) {
            k.insert(v.clone(), Kind::Universal);
        }
    }
    let mut supply = FreshSupply::avoiding([&ftv(&k), &all_vars(s1), &all_vars(s2)]);
    let (p1, body1) = open(s1, &mut supply);
    let (p2, body2) = open(s2, &mut supply);
    let flexible = p1.domain();

    let match_env = k.union(&p2).union(&p1);
    let rigid: BTreeSet<TyVar> =
        ftv(&match_env).into_iter().chain(ftv(&body2)).filter(|v| !flexible.contains(v)).collect();
    let (k_out, s) = unify_rigid(&match_env, vec![(body1.clone(), body2.clone())], &rigid).ok()?;
    let s = complete(&k_out, s, &flexible)?;

    let target_env = k.union(&p2);
    (body1.apply(&s) == body2 && respects(&target_env, &s, &k.union(&p1))).then_some(s)
}

/// `K, Γ ⊢ M : τ` in the declarative system.
///
/// `WK` gives the principal typing; the answer is whether `τ` (with `Γ`
/// unchanged) is an instance of it under a substitution respecting `K`.
pub fn check(k: &KindingEnv, g: &TypingEnv, m: &Term, t: &MonoType) -> bool {
    if !k.is_well_formed() || !k.well_formed(t) || !k.well_formed(g) {
        return false;
    }
    let avoid = ftv(t);
    let Ok(r) = infer_avoiding(k, g, m, &avoid) else { return false };
    let flexible: BTreeSet<TyVar> = r.kinds.domain().difference(&k.domain()).cloned().collect();

    let env_vars = eftv(k, g);
    let mut eqs = vec![(r.ty.clone(), t.clone())];
    for v in &env_vars {
        eqs.push((r.subst.lookup(v), MonoType::Var(v.clone())));
    }
    let mut match_env = k.clone();
    for v in &flexible {
        match_env.insert(v.clone(), r.kinds.get(v).unwrap().clone());
    }
    let rigid: BTreeSet<TyVar> = k.domain();
    let Ok((k_out, s)) = unify_rigid(&match_env, eqs, &rigid) else { return false };
    let Some(s) = complete(&k_out, s, &flexible) else { return false };

    r.ty.apply(&s) == *t
        && env_vars.iter().all(|v| r.subst.lookup(v).apply(&s) == MonoType::Var(v.clone()))
        && respects(k, &s, &r.kinds)
}

/// Renames a scheme's prefix to fresh variables.
fn open(s: &PolyType, supply: &mut FreshSupply) -> (KindingEnv, MonoType) {
    let ren: Substitution = s.prefix.iter().map(|(v, _)| (v.clone(), supply.fresh_type())).collect();
    let p = s
        .prefix
        .iter()
        .map(|(v, k)| {
            let MonoType::Var(w) = ren.lookup(v) else { unreachable!() };
            (w, k.apply(&ren))
        })
        .collect();
    (p, s.body.apply(&ren))
}

fn all_vars(s: &PolyType) -> BTreeSet<TyVar> {
    let mut out = ftv(&s.body);
    for (v, k) in &s.prefix {
        out.insert(v.clone());
        k.ftv_into(&mut out);
    }
    out
}

/// Instantiates flexible variables that matching left open: universal ones
/// with `Bool`, record-kinded ones with the smallest record of their kind.
/// Fails when a record kind refers back to an unresolved variable.
fn complete(k: &KindingEnv, mut s: Substitution, flexible: &BTreeSet<TyVar>) -> Option<Substitution> {
    let mut k = k.clone();
    loop {
        let open: Vec<TyVar> = k.domain().into_iter().filter(|v| flexible.contains(v)).collect();
        if open.is_empty() {
            return Some(s);
        }
        let open_set: BTreeSet<TyVar> = open.iter().cloned().collect();
        let pick = open.iter().find_map(|v| match k.get(v).unwrap() {
            Kind::Universal => Some((v.clone(), MonoType::bool())),
            Kind::Record(fs) => {
                let t = MonoType::Record(fs.clone());
                ftv(&t).is_disjoint(&open_set).then_some((v.clone(), t))
            }
        })?;
        let single = Substitution::singleton(pick.0.clone(), pick.1.clone());
        s = single.compose(&s);
        k.remove(&pick.0);
        k = k.apply(&single);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_monotype, parse_scheme};
    use crate::Mode;

    fn sch(s: &str) -> PolyType {
        parse_scheme(s).unwrap()
    }

    fn ge(a: &str, b: &str) -> bool {
        generic_instance(&KindingEnv::new(), &sch(a), &sch(b))
    }

    #[test]
    fn instances() {
        assert!(ge(
            "forall a1::U. forall a2::U. a1 -> a2 -> {location: a1, fire_danger: a2}",
            "String -> String -> {location: String, fire_danger: String}"
        ));
        assert!(ge("forall a::U. a -> a", "forall a::U. a -> a"));
        assert!(ge("forall a::U. a -> a", "forall b::U. (b -> b) -> b -> b"));
        assert!(!ge("forall e::{{l1: Int}}. e", "{l1: Float}"));
        assert!(ge("forall a::U. forall e::{{l1: a}}. e", "{l1: Float}"));
        assert!(ge("forall a::U. forall e::{{l1: a}}. e", "forall e::{{l1: Int}}. e"));
        assert!(!ge("forall e::{{l1: Int}}. e", "forall a::U. forall e::{{l1: a}}. e"));
        assert!(!ge("forall a::U. a -> a", "Int -> Bool"));
        assert!(ge("forall a::U. Int", "Int"));
    }

    #[test]
    fn kinds_must_be_respected() {
        assert!(!ge("forall e::{{l: Int}}. e -> e", "forall e::{{m: Int}}. e -> e"));
        assert!(ge("forall e::{{l: Int}}. e -> e", "forall e::{{l: Int, m: Int}}. e -> e"));
        assert!(ge("forall e::{{l: Int}}. e -> e", "{l: Int, m: Bool} -> {l: Int, m: Bool}"));
    }

    fn chk(src: &str, t: &str) -> bool {
        let m = parse(src, Mode::Extended).unwrap();
        check(&KindingEnv::new(), &TypingEnv::new(), &m, &parse_monotype(t).unwrap())
    }

    #[test]
    fn checks() {
        assert!(chk("true", "Bool"));
        assert!(!chk("true", "Int"));
        assert!(chk("λx. x", "Int -> Int"));
        assert!(!chk("λx. x.l", "Int -> Int"));
        assert!(chk("λx. x.l", "{l: Int} -> Int"));
        assert!(chk("λx. x.l", "{l: Int, m: Bool} -> Int"));
        assert!(!chk("λx. x.l", "{m: Int} -> Int"));
        assert!(chk(
            r#"letEv FireDanger = λl. λd. {location = l, fire_danger = d} in FireDanger "Porto" "low""#,
            "{location: String, fire_danger: String}"
        ));
    }

    #[test]
    fn checks_with_free_kinded_variables() {
        let k: KindingEnv = [(TyVar::named("a"), Kind::record([("l", MonoType::int())]))].into_iter().collect();
        let g: TypingEnv = [("x".to_string(), PolyType::mono(MonoType::named("a")))].into_iter().collect();
        let sel = |l: &str| Term::select(Term::var("x"), l);
        assert!(check(&k, &g, &sel("l"), &MonoType::int()));
        assert!(!check(&k, &g, &sel("m"), &MonoType::int()));
        assert!(check(&k, &g, &Term::var("x"), &MonoType::named("a")));
        assert!(!check(&k, &g, &Term::var("x"), &parse_monotype("{l: Int}").unwrap()));
    }
}
