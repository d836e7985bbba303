//! Compare generic events: membership, generalization, specialization.

use evl::events::{generalization, membership, membership_witness, specialization};
use evl::syntax::parse_scheme;
use evl::KindingEnv;

fn main() {
    let k = KindingEnv::new();
    let poly = parse_scheme("forall a::U. forall e::{{l1: a}}. e").unwrap();
    let int = parse_scheme("forall e::{{l1: Int}}. e").unwrap();
    println!("poly = {poly}");
    println!("int  = {int}");
    println!("int ∈ poly: {}", membership(&k, &int, &poly));
    println!("poly ∈ int: {}", membership(&k, &poly, &int));
    if let Some(w) = membership_witness(&k, &poly, &int) {
        println!("  witness: {w}");
    }
    println!("poly generalizes int: {}", generalization(&k, &poly, &int));
    println!("int specializes poly: {}", specialization(&k, &int, &poly));
}
