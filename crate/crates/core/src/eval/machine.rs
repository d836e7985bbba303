//! An environment machine for the same call-by-value semantics.
//!
//! Closures capture a persistent environment instead of substituting, and the
//! evaluation context lives on an explicit continuation stack. Every rule the
//! small-step evaluator would fire is counted here as well, so step counts,
//! values and stuck terms agree; values and stuck terms are read back into
//! terms by substituting the captured environments.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::small_step::{EvalContext, Frame};
use super::{EvalError, Evaluated, Rule, StuckReason};
use crate::events::prelude::{apply_primitive, builtin_arity, CONS, NIL};
use crate::term::{subst_term, Literal, Term};

/// A runtime value. Closure bodies borrow from the program being run.
#[derive(Clone, Debug)]
pub enum Value<'t> {
    Const(Literal),
    Closure {
        param: &'t str,
        body: &'t Term,
        env: Env<'t>,
    },
    Fix {
        name: &'t str,
        param: &'t str,
        body: &'t Term,
        env: Env<'t>,
    },
    Record(Vec<(String, Value<'t>)>),
    /// A builtin applied to fewer arguments than its arity.
    Prim {
        name: &'t str,
        args: Vec<Value<'t>>,
    },
    Nil,
    Cons(Arc<Value<'t>>, Arc<Value<'t>>),
}

/// A persistent environment, innermost binding first.
#[derive(Clone, Debug, Default)]
pub struct Env<'t>(Option<Arc<Binding<'t>>>);

#[derive(Debug)]
struct Binding<'t> {
    name: &'t str,
    value: Value<'t>,
    next: Env<'t>,
}

impl<'t> Env<'t> {
    fn bind(&self, name: &'t str, value: Value<'t>) -> Env<'t> {
        Env(Some(Arc::new(Binding { name, value, next: self.clone() })))
    }

    fn lookup(&self, x: &str) -> Option<&Value<'t>> {
        let mut cur = &self.0;
        while let Some(b) = cur {
            if b.name == x {
                return Some(&b.value);
            }
            cur = &b.next.0;
        }
        None
    }

    /// `t` with its free variables replaced by the values bound here.
    fn close(&self, t: &Term) -> Term {
        let free = t.free_vars();
        let mut seen = BTreeSet::new();
        let mut out = t.clone();
        let mut cur = &self.0;
        while let Some(b) = cur {
            if free.contains(b.name) && seen.insert(b.name) {
                out = subst_term(&b.value.readback(), b.name, &out);
            }
            cur = &b.next.0;
        }
        out
    }
}

impl Value<'_> {
    /// The term this value stands for.
    pub fn readback(&self) -> Term {
        match self {
            Value::Const(l) => Term::Const(l.clone()),
            Value::Closure { param, body, env } => env.close(&Term::abs(*param, (*body).clone())),
            Value::Fix { name, param, body, env } => {
                env.close(&Term::Fix(name.to_string(), param.to_string(), Box::new((*body).clone())))
            }
            Value::Record(fs) => Term::Record(fs.iter().map(|(l, v)| (l.clone(), v.readback())).collect()),
            Value::Prim { name, args } => Term::apps(Term::var(*name), args.iter().map(Value::readback)),
            Value::Nil => Term::var(NIL),
            Value::Cons(h, t) => Term::apps(Term::var(CONS), [h.readback(), t.readback()]),
        }
    }
}

enum Kont<'t> {
    AppArg(&'t Term, Env<'t>),
    AppFun(Value<'t>),
    Cond(&'t Term, &'t Term, Env<'t>),
    Let { ev: bool, x: &'t str, body: &'t Term, env: Env<'t> },
    Record { done: Vec<(String, Value<'t>)>, label: &'t str, rest: &'t [(String, Term)], env: Env<'t> },
    Select(&'t str),
    ModifyLeft(&'t str, &'t Term, Env<'t>),
    ModifyRight(Value<'t>, &'t str),
}

impl Kont<'_> {
    fn readback(&self) -> Frame {
        match self {
            Kont::AppArg(a, env) => Frame::AppLeft(env.close(a)),
            Kont::AppFun(f) => Frame::AppRight(f.readback()),
            Kont::Cond(a, b, env) => Frame::CondGuard(env.close(a), env.close(b)),
            Kont::Let { ev, x, body, env } => {
                // Close the body with `x` still bound.
                let lam = env.close(&Term::abs(*x, (*body).clone()));
                let Term::Abs(x, body) = lam else { unreachable!() };
                if *ev {
                    Frame::LetEvBound(x, *body)
                } else {
                    Frame::LetBound(x, *body)
                }
            }
            Kont::Record { done, label, rest, env } => Frame::RecordField {
                done: done.iter().map(|(l, v)| (l.clone(), v.readback())).collect(),
                label: label.to_string(),
                rest: rest.iter().map(|(l, t)| (l.clone(), env.close(t))).collect(),
            },
            Kont::Select(l) => Frame::Select(l.to_string()),
            Kont::ModifyLeft(l, n, env) => Frame::ModifyLeft(l.to_string(), env.close(n)),
            Kont::ModifyRight(v, l) => Frame::ModifyRight(v.readback(), l.to_string()),
        }
    }
}

enum State<'t> {
    Eval(&'t Term, Env<'t>),
    Return(Value<'t>),
}

struct Machine<'t> {
    stack: Vec<Kont<'t>>,
    steps: u64,
    fuel: u64,
}

impl<'t> Machine<'t> {
    fn whole(&self, focus: Term) -> Term {
        EvalContext { frames: self.stack.iter().map(Kont::readback).collect() }.plug(focus)
    }

    fn stuck(&self, redex: Term, reason: StuckReason) -> EvalError {
        EvalError::Stuck { term: self.whole(redex), reason, steps: self.steps }
    }

    /// Counts one rule firing, or runs out of fuel on the redex `redex()`.
    fn fire(&mut self, _rule: Rule, redex: impl FnOnce() -> Term) -> Result<(), EvalError> {
        if self.steps == self.fuel {
            return Err(EvalError::FuelExhausted { term: self.whole(redex()), steps: self.steps });
        }
        self.steps += 1;
        Ok(())
    }

    fn eval(&mut self, t: &'t Term, env: Env<'t>) -> Result<State<'t>, EvalError> {
        Ok(match t {
            Term::Const(l) => State::Return(Value::Const(l.clone())),
            Term::Var(x) => match env.lookup(x) {
                Some(v) => State::Return(v.clone()),
                None if x == NIL => State::Return(Value::Nil),
                None if builtin_arity(x).is_some() => State::Return(Value::Prim { name: x, args: Vec::new() }),
                None => return Err(self.stuck(t.clone(), StuckReason::FreeVariable(x.clone()))),
            },
            Term::Abs(x, body) => State::Return(Value::Closure { param: x, body, env }),
            Term::Fix(f, x, body) => State::Return(Value::Fix { name: f, param: x, body, env }),
            Term::App(f, a) => {
                self.stack.push(Kont::AppArg(a, env.clone()));
                State::Eval(f, env)
            }
            Term::Cond(g, a, b) => {
                self.stack.push(Kont::Cond(a, b, env.clone()));
                State::Eval(g, env)
            }
            Term::Let(x, m, n) | Term::LetEv(x, m, n) => {
                let ev = matches!(t, Term::LetEv(..));
                self.stack.push(Kont::Let { ev, x, body: n, env: env.clone() });
                State::Eval(m, env)
            }
            Term::LetRec(f, m, n) => {
                let Term::Abs(x, body) = &**m else {
                    return Err(self.stuck(env.close(t), StuckReason::ApplyNonFunction));
                };
                self.fire(Rule::LetRec, || env.close(t))?;
                let fix = Value::Fix { name: f, param: x, body, env: env.clone() };
                State::Eval(n, env.bind(f, fix))
            }
            Term::Record(fs) => match fs.split_first() {
                None => State::Return(Value::Record(Vec::new())),
                Some(((label, first), rest)) => {
                    self.stack.push(Kont::Record { done: Vec::new(), label, rest, env: env.clone() });
                    State::Eval(first, env)
                }
            },
            Term::Select(m, l) => {
                self.stack.push(Kont::Select(l));
                State::Eval(m, env)
            }
            Term::Modify(m, l, n) => {
                self.stack.push(Kont::ModifyLeft(l, n, env.clone()));
                State::Eval(m, env)
            }
        })
    }

    fn apply(&mut self, f: Value<'t>, v: Value<'t>) -> Result<State<'t>, EvalError> {
        let redex = |f: &Value, v: &Value| Term::app(f.readback(), v.readback());
        match f {
            Value::Closure { param, body, ref env } => {
                self.fire(Rule::Beta, || redex(&f, &v))?;
                Ok(State::Eval(body, env.bind(param, v)))
            }
            Value::Fix { name, param, body, ref env } => {
                self.fire(Rule::Beta, || redex(&f, &v))?;
                let env = if name == param { env.clone() } else { env.bind(name, f.clone()) };
                Ok(State::Eval(body, env.bind(param, v)))
            }
            Value::Prim { name, ref args } if args.len() < builtin_arity(name).unwrap_or(0) => {
                let mut args = args.clone();
                args.push(v);
                if args.len() < builtin_arity(name).unwrap() {
                    return Ok(State::Return(Value::Prim { name, args }));
                }
                if name == CONS {
                    let t = args.pop().unwrap();
                    let h = args.pop().unwrap();
                    return Ok(State::Return(Value::Cons(Arc::new(h), Arc::new(t))));
                }
                let whole = |args: &[Value]| Term::apps(Term::var(name), args.iter().map(Value::readback));
                let lits: Option<Vec<Literal>> = args
                    .iter()
                    .map(|a| match a {
                        Value::Const(l) => Some(l.clone()),
                        _ => None,
                    })
                    .collect();
                let out = lits
                    .ok_or_else(|| StuckReason::PrimitiveTypeError(name.to_string()))
                    .and_then(|lits| apply_primitive(name, &lits));
                match out {
                    Ok(l) => {
                        self.fire(Rule::Delta(name.to_string()), || whole(&args))?;
                        Ok(State::Return(Value::Const(l)))
                    }
                    Err(reason) => Err(self.stuck(whole(&args), reason)),
                }
            }
            _ => Err(self.stuck(redex(&f, &v), StuckReason::ApplyNonFunction)),
        }
    }

    fn ret(&mut self, v: Value<'t>) -> Result<Option<State<'t>>, EvalError> {
        let Some(k) = self.stack.pop() else { return Ok(None) };
        Ok(Some(match k {
            Kont::AppArg(a, env) => {
                self.stack.push(Kont::AppFun(v));
                State::Eval(a, env)
            }
            Kont::AppFun(f) => self.apply(f, v)?,
            Kont::Cond(a, b, env) => {
                let redex = |v: &Value, env: &Env| Term::cond(v.readback(), env.close(a), env.close(b));
                match v {
                    Value::Const(Literal::Bool(c)) => {
                        let rule = if c { Rule::CondTrue } else { Rule::CondFalse };
                        self.fire(rule, || redex(&v, &env))?;
                        State::Eval(if c { a } else { b }, env)
                    }
                    _ => return Err(self.stuck(redex(&v, &env), StuckReason::CondNonBool)),
                }
            }
            Kont::Let { ev, x, body, env } => {
                let rule = if ev { Rule::LetEv } else { Rule::Let };
                self.fire(rule, || {
                    let lam = env.close(&Term::abs(x, body.clone()));
                    let Term::Abs(x, n) = lam else { unreachable!() };
                    let m = v.readback();
                    if ev {
                        Term::let_ev(x, m, *n)
                    } else {
                        Term::let_(x, m, *n)
                    }
                })?;
                State::Eval(body, env.bind(x, v))
            }
            Kont::Record { mut done, label, rest, env } => {
                done.push((label.to_string(), v));
                match rest.split_first() {
                    None => State::Return(Value::Record(done)),
                    Some(((label, next), rest)) => {
                        self.stack.push(Kont::Record { done, label, rest, env: env.clone() });
                        State::Eval(next, env)
                    }
                }
            }
            Kont::Select(l) => {
                let redex = || Term::select(v.readback(), l);
                match select(&v, l) {
                    Some(w) => {
                        self.fire(Rule::Select, redex)?;
                        State::Return(w)
                    }
                    None => return Err(self.stuck(redex(), StuckReason::SelectMissingLabel(l.to_string()))),
                }
            }
            Kont::ModifyLeft(l, n, env) => {
                self.stack.push(Kont::ModifyRight(v, l));
                State::Eval(n, env)
            }
            Kont::ModifyRight(r, l) => {
                let redex = || Term::modify(r.readback(), l, v.readback());
                match modify(&r, l, &v) {
                    Some(w) => {
                        self.fire(Rule::Modify, redex)?;
                        State::Return(w)
                    }
                    None => return Err(self.stuck(redex(), StuckReason::ModifyMissingLabel(l.to_string()))),
                }
            }
        }))
    }
}

fn select<'t>(v: &Value<'t>, l: &str) -> Option<Value<'t>> {
    match (v, l) {
        (Value::Record(fs), _) => fs.iter().find(|(k, _)| k == l).map(|(_, w)| w.clone()),
        (Value::Nil, "empty") => Some(Value::Const(Literal::Bool(true))),
        (Value::Cons(..), "empty") => Some(Value::Const(Literal::Bool(false))),
        (Value::Cons(h, _), "head") => Some((**h).clone()),
        (Value::Cons(_, t), "tail") => Some((**t).clone()),
        _ => None,
    }
}

fn modify<'t>(r: &Value<'t>, l: &str, w: &Value<'t>) -> Option<Value<'t>> {
    match (r, l) {
        (Value::Record(fs), _) => fs.iter().any(|(k, _)| k == l).then(|| {
            Value::Record(fs.iter().map(|(k, v)| (k.clone(), if k == l { w.clone() } else { v.clone() })).collect())
        }),
        (Value::Cons(_, t), "head") => Some(Value::Cons(Arc::new(w.clone()), t.clone())),
        (Value::Cons(h, _), "tail") => Some(Value::Cons(h.clone(), Arc::new(w.clone()))),
        _ => None,
    }
}

/// Evaluates `t` with at most `fuel` rule firings.
pub fn run(t: &Term, fuel: u64) -> Result<Evaluated, EvalError> {
    run_value(t, fuel, |v, steps| Evaluated { value: v.readback(), steps })
}

/// Evaluates `t` and hands the raw value and step count to `k`.
pub fn run_value<R>(t: &Term, fuel: u64, k: impl FnOnce(&Value, u64) -> R) -> Result<R, EvalError> {
    let mut m = Machine { stack: Vec::new(), steps: 0, fuel };
    let mut state = State::Eval(t, Env::default());
    loop {
        state = match state {
            State::Eval(t, env) => m.eval(t, env)?,
            State::Return(v) => match m.ret(v.clone())? {
                Some(next) => next,
                None => return Ok(k(&v, m.steps)),
            },
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::small_step;
    use crate::syntax::parse;
    use crate::Mode;

    fn same(src: &str, fuel: u64) {
        let t = parse(src, Mode::Extended).unwrap();
        assert_eq!(run(&t, fuel), small_step::eval(&t, fuel), "{src}");
    }

    #[test]
    fn agrees_with_small_step() {
        for src in [
            "(λx. modify(x, temperature, (x.temperature - 32.0) / 1.8)) {temperature = 50.0}",
            "{l1 = true, l2 = false}.l1",
            "let f = λx. λy. x in {a = f 1 2, b = f true}",
            "letrec f x = if ilt x 1 then 0 else iadd 2 (f (isub x 1)) in f 10",
            "letrec len l = if l.empty then 0 else iadd 1 (len l.tail) in len (cons 1 (cons 2 nil))",
            "modify(cons 1 nil, tail, cons 2 nil)",
            "(λx. λy. x) (λz. z)",
            "let x = 1 in let g = λy. x in let x = true in g x",
            "(λf. f) (+) 1.0",
            "cons",
        ] {
            same(src, 10_000);
        }
    }

    #[test]
    fn agrees_when_stuck_or_out_of_fuel() {
        for src in [
            "let x = 1 in {a = x, b = x 2}",
            "(λx. if x then 1 else 2) 3",
            "{a = (λx. x.m) {l = 1}}",
            "idiv 3 (isub 1 1)",
            "modify({l = 1}, m, (λx. x) 2)",
            "letrec f x = f x in f 1",
            "nil.head",
        ] {
            same(src, 30);
        }
        let bad = Term::let_rec("f", Term::int(1), Term::var("f"));
        assert_eq!(run(&bad, 5), small_step::eval(&bad, 5));
        for fuel in 0..6 {
            same("let y = {a = (λx. x) 1} in modify(y, a, 2)", fuel);
        }
    }
}
