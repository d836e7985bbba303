//! Type inference: kinded unification, `WK`, closure, generic instances and
//! the event-shape predicates.

mod algorithm;
mod instance;
mod shape;
mod unify;

pub use algorithm::{closure, infer, infer_avoiding, infer_finite, Inference, TypeError};
pub use instance::{check, generic_instance, instance_witness};
pub use shape::{final_codomain, is_event_scheme, is_event_scheme_under, is_event_type, is_field_type};
pub use unify::{field_merge, kind_cycle, unify, unify_finite, unify_rigid, UnifyError, UnifyFailure};

use crate::events::prelude;
use crate::term::Term;
use crate::types::{KindingEnv, PolyType, TypingEnv};
use crate::Mode;

/// The environment a program is typed in.
#[derive(Clone, Debug)]
pub struct Options {
    pub mode: Mode,
    /// Include the operator prelude (`+`, `>`, `and`, ...).
    pub prelude: bool,
    /// Extra bindings, e.g. event constructors from a registry. They shadow
    /// the prelude.
    pub extra: TypingEnv,
}

impl Default for Options {
    fn default() -> Self {
        Options { mode: Mode::Core, prelude: true, extra: TypingEnv::new() }
    }
}

impl Options {
    pub fn new(mode: Mode) -> Self {
        Options { mode, ..Options::default() }
    }

    pub fn without_prelude(mut self) -> Self {
        self.prelude = false;
        self
    }

    /// `Γ₀`: prelude operators, list builtins in extended mode, then `extra`.
    pub fn env(&self) -> TypingEnv {
        let mut g = TypingEnv::new();
        if self.prelude {
            g = g.union(&prelude::typing_env());
        }
        if self.mode.is_extended() {
            g = g.union(&prelude::list_env());
        }
        g.union(&self.extra)
    }
}

/// Runs `WK` from empty kinds under [`Options::env`].
///
/// Core mode has no list type, so a cyclic kind there has no instance and
/// is reported as a type error ([`infer_finite`]).
pub fn principal(term: &Term, opts: &Options) -> Result<Inference, TypeError> {
    let g = opts.env();
    if opts.mode.is_extended() {
        infer(&KindingEnv::new(), &g, term)
    } else if term.uses_letrec() {
        Err(TypeError::LetRecInCore)
    } else {
        infer_finite(&KindingEnv::new(), &g, term)
    }
}

/// The closed principal scheme, with its prefix renamed to `a, b, ...`.
pub fn principal_scheme(term: &Term, opts: &Options) -> Result<PolyType, TypeError> {
    let r = principal(term, opts)?;
    let (_, sigma) = closure(&r.kinds, &TypingEnv::new(), &r.ty);
    Ok(sigma.normalized())
}
