//! EVL: a small typed higher-order language for generic events.
//!
//! Terms are typed with kinded record polymorphism: a type variable may be
//! restricted to record types that carry at least some labelled fields. The
//! crate provides
//!
//! * a parser and pretty-printer for `.evl` sources ([`syntax`]),
//! * kinded unification and the `WK` inference algorithm ([`infer`]),
//! * a call-by-value small-step evaluator and an environment machine ([`eval`]),
//! * relations between event schemes and a typed prelude ([`events`]),
//! * a stream harness running event processing agents over NDJSON ([`harness`]).
//!
//! ```
//! use evl::{syntax, infer, Mode};
//!
//! let src = r#"letEv FireDanger l d = {location = l, fire_danger = d} in
//!              FireDanger "Porto" "low""#;
//! let term = syntax::parse(src, Mode::Core).unwrap();
//! let scheme = infer::principal_scheme(&term, &infer::Options::default()).unwrap();
//! assert_eq!(scheme.to_string(), "{fire_danger: String, location: String}");
//! ```

pub mod eval;
pub mod events;
pub mod harness;
pub mod infer;
pub mod syntax;
pub mod term;
pub mod types;

pub use term::{Literal, Term};
pub use types::{BaseType, Kind, KindingEnv, MonoType, PolyType, Substitution, TyVar, TypingEnv};

/// Language level.
///
/// `Core` is the plain calculus. `Extended` adds builtin lists
/// (`nil`, `cons`, `List T`) and `letrec`, which the recursive CEP library
/// needs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Core,
    Extended,
}

impl Mode {
    pub fn is_extended(self) -> bool {
        self == Mode::Extended
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "core" => Ok(Mode::Core),
            "extended" => Ok(Mode::Extended),
            other => Err(format!("unknown mode `{other}` (expected core or extended)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Core => "core",
            Mode::Extended => "extended",
        })
    }
}
