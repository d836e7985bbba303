//! Relations between generic events, decided through the generic-instance
//! ordering on their schemes.
//!
//! `ge₁` is a member of `ge₂` when every instance of `ge₁` is an instance of
//! `ge₂`. Opening `ge₁` with rigid variables gives an instance that every
//! other instance of `ge₁` is itself an instance of, so the universally
//! quantified definition comes down to the single check `ge₂ ≥ ge₁`.

use std::collections::BTreeSet;

use crate::infer::{final_codomain, generic_instance};
use crate::types::{
    close_under_kinds, ftv, BaseType, Kind, KindingEnv, MonoType, PolyType, Substitution, TyVar, Types,
};

/// `ge₁` is a member of `ge₂`.
pub fn membership(k: &KindingEnv, ge1: &PolyType, ge2: &PolyType) -> bool {
    generic_instance(k, ge2, ge1)
}

/// `ge₁` is a generalization of `ge₂`: `K ⊩ ge₁ ≥ ge₂`.
pub fn generalization(k: &KindingEnv, ge1: &PolyType, ge2: &PolyType) -> bool {
    generic_instance(k, ge1, ge2)
}

/// `ge₁` is a specialization of `ge₂`: `K ⊩ ge₂ ≥ ge₁`.
pub fn specialization(k: &KindingEnv, ge1: &PolyType, ge2: &PolyType) -> bool {
    generalization(k, ge2, ge1)
}

/// Order in which base types are tried when building witnesses.
pub const WITNESS_BASES: [BaseType; 4] = [BaseType::Float, BaseType::Int, BaseType::String, BaseType::Bool];

/// Ground instances of `s` obtained by giving each universal prefix variable
/// a base type and each record-kinded one the smallest record of its kind.
/// At most `limit` instances are produced, in [`WITNESS_BASES`] order.
pub fn ground_instances(s: &PolyType, limit: usize) -> Vec<MonoType> {
    instances(s, limit, None)
}

/// Like [`ground_instances`], but every record-kinded variable also gets the
/// field `extra: Float`.
fn widened_instances(s: &PolyType, limit: usize, extra: &str) -> Vec<MonoType> {
    instances(s, limit, Some(extra))
}

fn instances(s: &PolyType, limit: usize, extra: Option<&str>) -> Vec<MonoType> {
    let universal: Vec<&TyVar> =
        s.prefix.iter().filter(|(_, k)| matches!(k, Kind::Universal)).map(|(v, _)| v).collect();
    let mut out = Vec::new();
    let total = WITNESS_BASES.len().saturating_pow(universal.len() as u32);
    for mut code in 0..total {
        if out.len() >= limit {
            break;
        }
        let mut s_u = Substitution::identity();
        for v in &universal {
            s_u.insert((*v).clone(), MonoType::Base(WITNESS_BASES[code % WITNESS_BASES.len()]));
            code /= WITNESS_BASES.len();
        }
        if let Some(t) = resolve_records(s, s_u, extra) {
            out.push(t);
        }
    }
    out
}

/// Fills in record-kinded prefix variables once their kinds are ground.
fn resolve_records(s: &PolyType, mut sub: Substitution, extra: Option<&str>) -> Option<MonoType> {
    let mut pending: Vec<(TyVar, Kind)> = s.prefix.iter().filter(|(v, _)| sub.get(v).is_none()).cloned().collect();
    while !pending.is_empty() {
        let bound: BTreeSet<TyVar> = pending.iter().map(|(v, _)| v.clone()).collect();
        let pos = pending.iter().position(|(_, k)| ftv(&k.apply(&sub)).is_disjoint(&bound))?;
        let (v, k) = pending.remove(pos);
        let Kind::Record(mut fs) = k.apply(&sub) else { unreachable!() };
        if let Some(l) = extra {
            fs.insert(l.to_string(), MonoType::Base(WITNESS_BASES[0]));
        }
        let single = Substitution::singleton(v, MonoType::Record(fs));
        sub = single.compose(&sub);
    }
    Some(s.body.apply(&sub))
}

/// An instance of `ge₁` that is not an instance of `ge₂`, found by bounded
/// search, explaining why `ge₁` is not a member of `ge₂`. Records with the
/// fewest fields are tried first, then records with one more field.
pub fn membership_witness(k: &KindingEnv, ge1: &PolyType, ge2: &PolyType) -> Option<MonoType> {
    let extra = fresh_label(&[ge1, ge2]);
    ground_instances(ge1, 4096)
        .into_iter()
        .chain(widened_instances(ge1, 4096, &extra))
        .find(|t| !generic_instance(k, ge2, &PolyType::mono(t.clone())))
}

/// A label that occurs in none of the schemes.
fn fresh_label(schemes: &[&PolyType]) -> String {
    fn collect(t: &MonoType, out: &mut BTreeSet<String>) {
        match t {
            MonoType::Arrow(a, b) => {
                collect(a, out);
                collect(b, out);
            }
            MonoType::Record(fs) => {
                for (l, u) in fs {
                    out.insert(l.clone());
                    collect(u, out);
                }
            }
            MonoType::List(e) => collect(e, out),
            MonoType::Var(_) | MonoType::Base(_) => {}
        }
    }
    let mut used = BTreeSet::new();
    for s in schemes {
        collect(&s.body, &mut used);
        for (_, k) in &s.prefix {
            if let Kind::Record(fs) = k {
                for (l, t) in fs {
                    used.insert(l.clone());
                    collect(t, &mut used);
                }
            }
        }
    }
    (0..).map(|i| if i == 0 { "extra".to_string() } else { format!("extra{i}") }).find(|l| !used.contains(l)).unwrap()
}

/// The record part of an event constructor's scheme, closed over just the
/// prefix variables it needs.
pub fn codomain_scheme(s: &PolyType) -> PolyType {
    let body = final_codomain(&s.body).clone();
    let prefix_env: KindingEnv = s.prefix.iter().cloned().collect();
    let needed = close_under_kinds(&prefix_env, ftv(&body));
    let prefix = s.prefix.iter().filter(|(v, _)| needed.contains(v)).cloned().collect();
    PolyType::new(prefix, body)
}

/// `⊢ e :: ge`: the ground event type `e` instantiates the generic event.
pub fn instantiates(k: &KindingEnv, e: &MonoType, ge: &PolyType) -> bool {
    e.is_ground() && generic_instance(k, &codomain_scheme(ge), &PolyType::mono(e.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_monotype, parse_scheme};

    fn sch(s: &str) -> PolyType {
        parse_scheme(s).unwrap()
    }

    const GE_POLY: &str = "forall a::U. forall e::{{l1: a}}. e";
    const GE_INT: &str = "forall e::{{l1: Int}}. e";

    #[test]
    fn worked_relations() {
        let k = KindingEnv::new();
        assert!(membership(&k, &sch(GE_INT), &sch(GE_POLY)));
        assert!(!membership(&k, &sch(GE_POLY), &sch(GE_INT)));
        assert_eq!(membership_witness(&k, &sch(GE_POLY), &sch(GE_INT)), Some(parse_monotype("{l1: Float}").unwrap()));
        assert!(generalization(&k, &sch(GE_POLY), &sch(GE_INT)));
        assert!(specialization(&k, &sch(GE_INT), &sch(GE_POLY)));
        assert!(!specialization(&k, &sch(GE_POLY), &sch(GE_INT)));
        assert!(!generalization(&k, &sch(GE_INT), &sch("{l1: Float}")));
    }

    #[test]
    fn witnesses_may_need_more_fields() {
        let k = KindingEnv::new();
        let open = sch("forall e::{{l1: Float, l2: Int}}. e");
        let closed = sch("forall a::U. {l1: Float, l2: a}");
        assert!(!membership(&k, &open, &closed));
        let w = membership_witness(&k, &open, &closed).unwrap();
        assert_eq!(w, parse_monotype("{extra: Float, l1: Float, l2: Int}").unwrap());
    }

    #[test]
    fn reflexive() {
        let k = KindingEnv::new();
        for s in [GE_POLY, GE_INT, "{l: Int}"] {
            assert!(membership(&k, &sch(s), &sch(s)));
            assert!(generalization(&k, &sch(s), &sch(s)));
        }
    }

    #[test]
    fn instantiation() {
        let fire = sch("forall a::U. forall b::U. a -> b -> {fire_danger: b, location: a}");
        let k = KindingEnv::new();
        let e = parse_monotype("{fire_danger: String, location: String}").unwrap();
        assert!(instantiates(&k, &e, &fire));
        let typed = sch("String -> String -> {fire_danger: String, location: String}");
        assert!(!instantiates(&k, &parse_monotype("{fire_danger: String, location: Int}").unwrap(), &typed));
        assert_eq!(codomain_scheme(&fire).prefix.len(), 2);
    }
}
