//! Call-by-value evaluation.
//!
//! [`small_step`] follows the reduction rules literally: decompose a term into
//! an evaluation context and a redex, contract, plug. [`machine`] is an
//! environment machine computing the same results much faster; the two are
//! cross-checked in tests.

pub mod machine;
pub mod small_step;

use std::fmt;

pub use machine::{run, Value};
pub use small_step::{decompose, eval, step, trace, Decomposition, EvalContext, Frame, Step, StepOutcome};

use crate::events::prelude::{builtin_arity, CONS, NIL};
use crate::term::Term;

/// Default step budget.
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StuckReason {
    ApplyNonFunction,
    SelectMissingLabel(String),
    ModifyMissingLabel(String),
    CondNonBool,
    FreeVariable(String),
    PrimitiveTypeError(String),
    DivisionByZero,
}

impl StuckReason {
    /// Short kebab-case name, as printed by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            StuckReason::ApplyNonFunction => "apply-non-function",
            StuckReason::SelectMissingLabel(_) => "select-missing-label",
            StuckReason::ModifyMissingLabel(_) => "modify-missing-label",
            StuckReason::CondNonBool => "cond-non-bool",
            StuckReason::FreeVariable(_) => "free-variable",
            StuckReason::PrimitiveTypeError(_) => "primitive-type-error",
            StuckReason::DivisionByZero => "division-by-zero",
        }
    }
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())?;
        match self {
            StuckReason::SelectMissingLabel(l) | StuckReason::ModifyMissingLabel(l) => write!(f, " ({l})"),
            StuckReason::FreeVariable(x) | StuckReason::PrimitiveTypeError(x) => write!(f, " ({x})"),
            _ => Ok(()),
        }
    }
}

/// Which reduction rule fired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Beta,
    CondTrue,
    CondFalse,
    Let,
    LetEv,
    Select,
    Modify,
    /// A saturated primitive application.
    Delta(String),
    /// `letrec f = λx.M in N` binding `f` to a fixpoint.
    LetRec,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Beta => f.write_str("beta"),
            Rule::CondTrue => f.write_str("if-true"),
            Rule::CondFalse => f.write_str("if-false"),
            Rule::Let => f.write_str("let"),
            Rule::LetEv => f.write_str("letEv"),
            Rule::Select => f.write_str("select"),
            Rule::Modify => f.write_str("modify"),
            Rule::Delta(op) => write!(f, "delta {op}"),
            Rule::LetRec => f.write_str("letrec"),
        }
    }
}

/// A finished evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated {
    pub value: Term,
    pub steps: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("stuck after {steps} steps: {reason}, at `{term}`")]
    Stuck { term: Term, reason: StuckReason, steps: u64 },
    #[error("no value after {steps} steps")]
    FuelExhausted { term: Term, steps: u64 },
}

/// Splits `f a1 ... an` into `f` and its arguments.
pub(crate) fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut head = t;
    while let Term::App(f, a) = head {
        args.push(&**a);
        head = f;
    }
    args.reverse();
    (head, args)
}

/// Values: constants, abstractions, fixpoints, records of values, builtin
/// names, partial primitive applications and `cons` cells.
pub fn is_value(t: &Term) -> bool {
    match t {
        Term::Const(_) | Term::Abs(..) | Term::Fix(..) => true,
        Term::Var(x) => builtin_arity(x).is_some(),
        Term::Record(fs) => fs.iter().all(|(_, v)| is_value(v)),
        Term::App(..) => {
            let (head, args) = spine(t);
            let Term::Var(x) = head else { return false };
            let saturated_ok = x == CONS;
            match builtin_arity(x) {
                Some(n) if x != NIL => {
                    (args.len() < n || (saturated_ok && args.len() == n)) && args.iter().all(|a| is_value(a))
                }
                _ => false,
            }
        }
        _ => false,
    }
}

/// `cons v w` as a pair of its parts.
pub(crate) fn as_cons(t: &Term) -> Option<(&Term, &Term)> {
    if let Term::App(f, tail) = t {
        if let Term::App(c, head) = &**f {
            if matches!(&**c, Term::Var(x) if x == CONS) {
                return Some((head, tail));
            }
        }
    }
    None
}
