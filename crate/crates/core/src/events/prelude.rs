//! Typed primitive operators and the list builtins.
//!
//! Operators are free variables as far as the calculus is concerned; this
//! table gives each one a type (`Γ₀`) and an implementation (`Δ₀`).

use std::sync::OnceLock;

use crate::eval::StuckReason;
use crate::syntax::parse_scheme;
use crate::term::Literal;
use crate::types::TypingEnv;

pub struct Primitive {
    pub name: &'static str,
    pub ty: &'static str,
    pub arity: usize,
}

const fn prim(name: &'static str, ty: &'static str, arity: usize) -> Primitive {
    Primitive { name, ty, arity }
}

const FF_F: &str = "Float -> Float -> Float";
const FF_B: &str = "Float -> Float -> Bool";
const II_I: &str = "Int -> Int -> Int";
const II_B: &str = "Int -> Int -> Bool";
const BB_B: &str = "Bool -> Bool -> Bool";

pub const PRIMITIVES: &[Primitive] = &[
    prim("+", FF_F, 2),
    prim("-", FF_F, 2),
    prim("*", FF_F, 2),
    prim("/", FF_F, 2),
    prim(">", FF_B, 2),
    prim("<", FF_B, 2),
    prim("==", "String -> String -> Bool", 2),
    prim("and", BB_B, 2),
    prim("or", BB_B, 2),
    prim("not", "Bool -> Bool", 1),
    prim("iadd", II_I, 2),
    prim("isub", II_I, 2),
    prim("imul", II_I, 2),
    prim("idiv", II_I, 2),
    prim("igt", II_B, 2),
    prim("ilt", II_B, 2),
    prim("ieq", II_B, 2),
    prim("feq", FF_B, 2),
    prim("beq", BB_B, 2),
    prim("toFloat", "Int -> Float", 1),
];

/// Builtin list constructors, available in extended mode.
pub const NIL: &str = "nil";
pub const CONS: &str = "cons";

pub fn primitive(name: &str) -> Option<&'static Primitive> {
    PRIMITIVES.iter().find(|p| p.name == name)
}

/// Arity of a builtin name: primitives, `cons` (2) and `nil` (0).
pub fn builtin_arity(name: &str) -> Option<usize> {
    match name {
        NIL => Some(0),
        CONS => Some(2),
        _ => primitive(name).map(|p| p.arity),
    }
}

pub fn typing_env() -> TypingEnv {
    static ENV: OnceLock<TypingEnv> = OnceLock::new();
    ENV.get_or_init(|| {
        PRIMITIVES.iter().map(|p| (p.name.to_string(), parse_scheme(p.ty).expect("prelude type"))).collect()
    })
    .clone()
}

pub fn list_env() -> TypingEnv {
    static ENV: OnceLock<TypingEnv> = OnceLock::new();
    ENV.get_or_init(|| {
        [
            (NIL.to_string(), parse_scheme("forall a::U. List a").unwrap()),
            (CONS.to_string(), parse_scheme("forall a::U. a -> List a -> List a").unwrap()),
        ]
        .into_iter()
        .collect()
    })
    .clone()
}

/// Runs a saturated primitive. Operators are strict: both operands of
/// `and`/`or` have already been evaluated.
pub fn apply_primitive(name: &str, args: &[Literal]) -> Result<Literal, StuckReason> {
    use Literal::*;
    let bad = || StuckReason::PrimitiveTypeError(name.to_string());
    Ok(match (name, args) {
        ("+", [Float(a), Float(b)]) => Float(a + b),
        ("-", [Float(a), Float(b)]) => Float(a - b),
        ("*", [Float(a), Float(b)]) => Float(a * b),
        ("/", [Float(a), Float(b)]) => Float(a / b),
        (">", [Float(a), Float(b)]) => Bool(a > b),
        ("<", [Float(a), Float(b)]) => Bool(a < b),
        ("==", [Str(a), Str(b)]) => Bool(a == b),
        ("and", [Bool(a), Bool(b)]) => Bool(*a && *b),
        ("or", [Bool(a), Bool(b)]) => Bool(*a || *b),
        ("not", [Bool(a)]) => Bool(!a),
        ("iadd", [Int(a), Int(b)]) => Int(a.wrapping_add(*b)),
        ("isub", [Int(a), Int(b)]) => Int(a.wrapping_sub(*b)),
        ("imul", [Int(a), Int(b)]) => Int(a.wrapping_mul(*b)),
        ("idiv", [Int(_), Int(0)]) => return Err(StuckReason::DivisionByZero),
        ("idiv", [Int(a), Int(b)]) => Int(a.wrapping_div(*b)),
        ("igt", [Int(a), Int(b)]) => Bool(a > b),
        ("ilt", [Int(a), Int(b)]) => Bool(a < b),
        ("ieq", [Int(a), Int(b)]) => Bool(a == b),
        ("feq", [Float(a), Float(b)]) => Bool(a == b),
        ("beq", [Bool(a), Bool(b)]) => Bool(a == b),
        ("toFloat", [Int(a)]) => Float(*a as f64),
        _ => return Err(bad()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BaseType, MonoType};

    /// A literal of each base type, for exercising every entry.
    fn sample(b: BaseType) -> Literal {
        match b {
            BaseType::Bool => Literal::Bool(true),
            BaseType::Int => Literal::Int(7),
            BaseType::Float => Literal::Float(2.5),
            BaseType::String => Literal::Str("s".into()),
        }
    }

    #[test]
    fn every_typed_primitive_runs_at_its_type() {
        let env = typing_env();
        assert_eq!(env.len(), PRIMITIVES.len());
        for p in PRIMITIVES {
            let sigma = env.get(p.name).unwrap();
            let mut t = &sigma.body;
            let mut args = Vec::new();
            while let MonoType::Arrow(a, b) = t {
                let MonoType::Base(base) = **a else { panic!("{}", p.name) };
                args.push(sample(base));
                t = b;
            }
            assert_eq!(args.len(), p.arity, "{}", p.name);
            let MonoType::Base(result) = t else { panic!() };
            let out = apply_primitive(p.name, &args).unwrap();
            assert_eq!(out.base_type(), *result, "{}", p.name);
        }
    }

    #[test]
    fn division_conventions() {
        assert_eq!(apply_primitive("idiv", &[Literal::Int(1), Literal::Int(0)]), Err(StuckReason::DivisionByZero));
        assert_eq!(
            apply_primitive("/", &[Literal::Float(1.0), Literal::Float(0.0)]),
            Ok(Literal::Float(f64::INFINITY))
        );
        let r = apply_primitive(
            "/",
            &[apply_primitive("-", &[Literal::Float(50.0), Literal::Float(32.0)]).unwrap(), Literal::Float(1.8)],
        );
        let Ok(Literal::Float(x)) = r else { panic!() };
        assert!((x - 10.0).abs() < 1e-9);
    }

    #[test]
    fn tags_are_checked() {
        assert!(matches!(
            apply_primitive("+", &[Literal::Int(1), Literal::Float(1.0)]),
            Err(StuckReason::PrimitiveTypeError(_))
        ));
    }

    #[test]
    fn strict_boolean_truth_tables() {
        for a in [false, true] {
            for b in [false, true] {
                let args = [Literal::Bool(a), Literal::Bool(b)];
                assert_eq!(apply_primitive("and", &args), Ok(Literal::Bool(a && b)));
                assert_eq!(apply_primitive("or", &args), Ok(Literal::Bool(a || b)));
            }
        }
    }
}
