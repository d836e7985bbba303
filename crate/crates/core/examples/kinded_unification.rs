//! Unify type variables that carry record kinds.

use evl::infer::{unify, unify_finite};
use evl::syntax::{parse_kind, parse_monotype};
use evl::{KindingEnv, TyVar};

fn kinds(entries: &[(&str, &str)]) -> KindingEnv {
    entries.iter().map(|(v, k)| (TyVar::named(*v), parse_kind(k).unwrap())).collect()
}

fn main() {
    // A variable known to have a location field meets a full record kind.
    let k = kinds(&[("a1", "{{location: a3}}"), ("a2", "{{fire_danger: String, location: String}}"), ("a3", "U")]);
    let eq = (parse_monotype("a1").unwrap(), parse_monotype("a2").unwrap());
    let (k2, s) = unify(&k, vec![eq]).unwrap();
    println!("K = {k2}");
    println!("S = {s}");

    // A record variable meets a concrete record.
    let k = kinds(&[("a", "{{temperature: Float}}")]);
    let eq = (parse_monotype("a").unwrap(), parse_monotype("{location: String, temperature: Float}").unwrap());
    println!("S = {}", unify(&k, vec![eq]).unwrap().1);

    // Field types disagree.
    let eq = (parse_monotype("a").unwrap(), parse_monotype("{temperature: Int}").unwrap());
    println!("{}", unify(&k, vec![eq]).unwrap_err());

    // A kind mentioning its own variable: fine for lists, not without them.
    let k = kinds(&[("a", "{{tail: b}}"), ("b", "U")]);
    let eq = (parse_monotype("a").unwrap(), parse_monotype("b").unwrap());
    println!("K = {}", unify(&k, vec![eq.clone()]).unwrap().0);
    println!("{}", unify_finite(&k, vec![eq]).unwrap_err());
}
