//! Small-step reduction by evaluation-context decomposition.
//!
//! ```text
//! E ::= [] | E M | v E | if E then M else M | let x = E in M | letEv x = E in M
//!     | {l1 = v1, ..., li = E, ..., ln = Mn} | E.l | modify(E, l, M) | modify(v, l, E)
//! ```

use super::{as_cons, is_value, spine, EvalError, Evaluated, Rule, StuckReason};
use crate::events::prelude::{apply_primitive, builtin_arity, primitive, CONS, NIL};
use crate::term::{subst_term, Literal, Term};

/// One layer of an evaluation context; the hole is the missing subterm.
#[derive(Clone, Debug, PartialEq)]
pub enum Frame {
    /// `[] M`
    AppLeft(Term),
    /// `v []`
    AppRight(Term),
    /// `if [] then M else N`
    CondGuard(Term, Term),
    /// `let x = [] in M`
    LetBound(String, Term),
    /// `letEv x = [] in M`
    LetEvBound(String, Term),
    /// `{done..., label = [], rest...}`
    RecordField { done: Vec<(String, Term)>, label: String, rest: Vec<(String, Term)> },
    /// `[].l`
    Select(String),
    /// `modify([], l, M)`
    ModifyLeft(String, Term),
    /// `modify(v, l, [])`
    ModifyRight(Term, String),
}

/// A term with one hole. Frames are listed outermost first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalContext {
    pub frames: Vec<Frame>,
}

impl EvalContext {
    pub fn hole() -> Self {
        EvalContext::default()
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    /// `E[t]`.
    pub fn plug(&self, t: Term) -> Term {
        self.frames.iter().rev().fold(t, |inner, frame| plug_frame(frame, inner))
    }
}

fn plug_frame(frame: &Frame, t: Term) -> Term {
    match frame {
        Frame::AppLeft(a) => Term::app(t, a.clone()),
        Frame::AppRight(f) => Term::app(f.clone(), t),
        Frame::CondGuard(a, b) => Term::cond(t, a.clone(), b.clone()),
        Frame::LetBound(x, n) => Term::let_(x.clone(), t, n.clone()),
        Frame::LetEvBound(x, n) => Term::let_ev(x.clone(), t, n.clone()),
        Frame::RecordField { done, label, rest } => {
            let mut fs = done.clone();
            fs.push((label.clone(), t));
            fs.extend(rest.iter().cloned());
            Term::Record(fs)
        }
        Frame::Select(l) => Term::select(t, l.clone()),
        Frame::ModifyLeft(l, n) => Term::modify(t, l.clone(), n.clone()),
        Frame::ModifyRight(v, l) => Term::modify(v.clone(), l.clone(), t),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decomposition {
    Value,
    Redex(EvalContext, Term),
    /// The subterm in the hole is not a redex and cannot be reduced further.
    Stuck(EvalContext, Term, StuckReason),
}

/// Finds the unique context and redex of a closed term.
pub fn decompose(t: &Term) -> Decomposition {
    if is_value(t) {
        return Decomposition::Value;
    }
    let mut ctx = EvalContext::hole();
    let mut cur = t;
    loop {
        let push = |ctx: &mut EvalContext, f: Frame| ctx.frames.push(f);
        match cur {
            Term::App(f, a) => {
                if !is_value(f) {
                    push(&mut ctx, Frame::AppLeft((**a).clone()));
                    cur = f;
                } else if !is_value(a) {
                    push(&mut ctx, Frame::AppRight((**f).clone()));
                    cur = a;
                } else {
                    return match applicable(f) {
                        true => Decomposition::Redex(ctx, cur.clone()),
                        false => Decomposition::Stuck(ctx, cur.clone(), StuckReason::ApplyNonFunction),
                    };
                }
            }
            Term::Cond(g, a, b) => {
                if !is_value(g) {
                    push(&mut ctx, Frame::CondGuard((**a).clone(), (**b).clone()));
                    cur = g;
                } else if matches!(**g, Term::Const(Literal::Bool(_))) {
                    return Decomposition::Redex(ctx, cur.clone());
                } else {
                    return Decomposition::Stuck(ctx, cur.clone(), StuckReason::CondNonBool);
                }
            }
            Term::Let(x, m, n) | Term::LetEv(x, m, n) if !is_value(m) => {
                let frame = match cur {
                    Term::Let(..) => Frame::LetBound(x.clone(), (**n).clone()),
                    _ => Frame::LetEvBound(x.clone(), (**n).clone()),
                };
                push(&mut ctx, frame);
                cur = m;
            }
            Term::Let(..) | Term::LetEv(..) | Term::LetRec(..) => return Decomposition::Redex(ctx, cur.clone()),
            Term::Record(fs) => {
                let i = fs.iter().position(|(_, v)| !is_value(v)).expect("records of values are values");
                push(
                    &mut ctx,
                    Frame::RecordField { done: fs[..i].to_vec(), label: fs[i].0.clone(), rest: fs[i + 1..].to_vec() },
                );
                cur = &fs[i].1;
            }
            Term::Select(m, l) => {
                if !is_value(m) {
                    push(&mut ctx, Frame::Select(l.clone()));
                    cur = m;
                } else if select_field(m, l).is_some() {
                    return Decomposition::Redex(ctx, cur.clone());
                } else {
                    return Decomposition::Stuck(ctx, cur.clone(), StuckReason::SelectMissingLabel(l.clone()));
                }
            }
            Term::Modify(m, l, n) => {
                if !is_value(m) {
                    push(&mut ctx, Frame::ModifyLeft(l.clone(), (**n).clone()));
                    cur = m;
                } else if !is_value(n) {
                    push(&mut ctx, Frame::ModifyRight((**m).clone(), l.clone()));
                    cur = n;
                } else if modify_field(m, l, n).is_some() {
                    return Decomposition::Redex(ctx, cur.clone());
                } else {
                    return Decomposition::Stuck(ctx, cur.clone(), StuckReason::ModifyMissingLabel(l.clone()));
                }
            }
            Term::Var(x) => return Decomposition::Stuck(ctx, cur.clone(), StuckReason::FreeVariable(x.clone())),
            Term::Const(_) | Term::Abs(..) | Term::Fix(..) => unreachable!("values are not decomposed"),
        }
    }
}

/// A value in function position that an argument can be applied to.
fn applicable(f: &Term) -> bool {
    match f {
        Term::Abs(..) | Term::Fix(..) => true,
        _ => {
            let (head, args) = spine(f);
            match head {
                Term::Var(x) if x != NIL => builtin_arity(x).is_some_and(|n| args.len() < n),
                _ => false,
            }
        }
    }
}

/// `v.l` for records and builtin lists.
pub(crate) fn select_field(v: &Term, l: &str) -> Option<Term> {
    match v {
        Term::Record(fs) => fs.iter().find(|(k, _)| k == l).map(|(_, t)| t.clone()),
        Term::Var(x) if x == NIL => (l == "empty").then(|| Term::bool(true)),
        _ => {
            let (h, t) = as_cons(v)?;
            match l {
                "empty" => Some(Term::bool(false)),
                "head" => Some(h.clone()),
                "tail" => Some(t.clone()),
                _ => None,
            }
        }
    }
}

/// `modify(v, l, w)` for records and the `head`/`tail` of a cons cell.
pub(crate) fn modify_field(v: &Term, l: &str, w: &Term) -> Option<Term> {
    match v {
        Term::Record(fs) => fs.iter().any(|(k, _)| k == l).then(|| {
            Term::Record(fs.iter().map(|(k, t)| (k.clone(), if k == l { w.clone() } else { t.clone() })).collect())
        }),
        _ => {
            let (h, t) = as_cons(v)?;
            let cons = |h: &Term, t: &Term| Term::apps(Term::var(CONS), [h.clone(), t.clone()]);
            match l {
                "head" => Some(cons(w, t)),
                "tail" => Some(cons(h, w)),
                _ => None,
            }
        }
    }
}

/// Contracts a redex found by [`decompose`].
fn contract(r: &Term) -> Result<(Term, Rule), StuckReason> {
    match r {
        Term::App(f, v) => match &**f {
            Term::Abs(x, body) => Ok((subst_term(v, x, body), Rule::Beta)),
            Term::Fix(g, x, body) => Ok((unfold(g, x, body, v), Rule::Beta)),
            _ => {
                let (head, args) = spine(r);
                let Term::Var(op) = head else { unreachable!() };
                let lits: Option<Vec<Literal>> = args
                    .iter()
                    .map(|a| match a {
                        Term::Const(l) => Some(l.clone()),
                        _ => None,
                    })
                    .collect();
                let p = primitive(op).expect("only primitives saturate into redexes");
                let lits = lits.ok_or_else(|| StuckReason::PrimitiveTypeError(p.name.to_string()))?;
                Ok((Term::Const(apply_primitive(op, &lits)?), Rule::Delta(op.clone())))
            }
        },
        Term::Cond(g, a, b) => match **g {
            Term::Const(Literal::Bool(true)) => Ok(((**a).clone(), Rule::CondTrue)),
            _ => Ok(((**b).clone(), Rule::CondFalse)),
        },
        Term::Let(x, v, n) => Ok((subst_term(v, x, n), Rule::Let)),
        Term::LetEv(x, v, n) => Ok((subst_term(v, x, n), Rule::LetEv)),
        Term::LetRec(f, m, n) => {
            let Term::Abs(x, body) = &**m else { return Err(StuckReason::ApplyNonFunction) };
            let fix = Term::Fix(f.clone(), x.clone(), body.clone());
            Ok((subst_term(&fix, f, n), Rule::LetRec))
        }
        Term::Select(v, l) => Ok((select_field(v, l).unwrap(), Rule::Select)),
        Term::Modify(v, l, w) => Ok((modify_field(v, l, w).unwrap(), Rule::Modify)),
        _ => unreachable!("not a redex: {r}"),
    }
}

/// `(fix f x. body) v  →  [fix/f][v/x]body`.
fn unfold(f: &str, x: &str, body: &Term, v: &Term) -> Term {
    let fix = Term::Fix(f.to_string(), x.to_string(), Box::new(body.clone()));
    let with_f = if f == x { body.clone() } else { subst_term(&fix, f, body) };
    subst_term(v, x, &with_f)
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Stepped(Term, Rule),
    Done,
    Stuck(Term, StuckReason),
}

/// One reduction step.
pub fn step(t: &Term) -> StepOutcome {
    match decompose(t) {
        Decomposition::Value => StepOutcome::Done,
        Decomposition::Stuck(_, _, reason) => StepOutcome::Stuck(t.clone(), reason),
        Decomposition::Redex(ctx, r) => match contract(&r) {
            Ok((out, rule)) => StepOutcome::Stepped(ctx.plug(out), rule),
            Err(reason) => StepOutcome::Stuck(t.clone(), reason),
        },
    }
}

/// Reduces until a value, a stuck term, or `fuel` steps.
pub fn eval(t: &Term, fuel: u64) -> Result<Evaluated, EvalError> {
    let mut cur = t.clone();
    for steps in 0..=fuel {
        match step(&cur) {
            StepOutcome::Done => return Ok(Evaluated { value: cur, steps }),
            StepOutcome::Stuck(term, reason) => return Err(EvalError::Stuck { term, reason, steps }),
            StepOutcome::Stepped(next, _) if steps < fuel => cur = next,
            StepOutcome::Stepped(..) => break,
        }
    }
    Err(EvalError::FuelExhausted { term: cur, steps: fuel })
}

/// A reduct and the rule that produced it; `None` for the input.
pub type Step = (Option<Rule>, Term);

/// Every intermediate term with the rule that produced it. The first entry
/// is the input (with no rule); the last is a value, a stuck term, or the
/// term at which fuel ran out.
pub fn trace(t: &Term, fuel: u64) -> (Vec<Step>, Result<(), EvalError>) {
    let mut out = vec![(None, t.clone())];
    let mut steps = 0;
    loop {
        let cur = &out.last().unwrap().1;
        match step(cur) {
            StepOutcome::Done => return (out, Ok(())),
            StepOutcome::Stuck(term, reason) => return (out, Err(EvalError::Stuck { term, reason, steps })),
            StepOutcome::Stepped(next, rule) => {
                if steps == fuel {
                    let term = cur.clone();
                    return (out, Err(EvalError::FuelExhausted { term, steps }));
                }
                out.push((Some(rule), next));
                steps += 1;
            }
        }
    }
}
