//! Kinded unification.
//!
//! Equations are kept in a queue. Each step takes the first pair, applies the
//! first rule that matches it, and appends any equations the rule generates.
//! Variables in the `rigid` set are never substituted; that is how matching
//! (generic instance checks) reuses this engine.
//!
//! Kinds may mention their own variable, directly or through other kinds, as
//! in `α::{{empty: Bool, head: β, tail: α}}`, which is what a recursive walk
//! down a record-encoded list produces and which `List β` satisfies.
//! [`unify_finite`] instead treats such a cycle like a failed occurs check,
//! since no finite record type has a cyclic kind.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::types::{ftv, Fields, Kind, KindingEnv, Label, MonoType, Substitution, TyVar, Types};

/// `F₁ ± F₂`: every label of either map, `F₁` winning on overlap.
pub fn field_merge(f1: &Fields, f2: &Fields) -> Fields {
    let mut out = f2.clone();
    for (l, t) in f1 {
        out.insert(l.clone(), t.clone());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyFailure {
    /// Different type constructors or base types.
    Clash,
    /// `α = τ` with `α` free in `τ`.
    Occurs(TyVar),
    /// A record kind asks for labels the other side lacks.
    MissingLabels(Vec<Label>),
    /// Two record types with different label sets.
    FieldSets,
    /// A rigid variable would have to be substituted.
    Rigid(TyVar),
}

/// A failed unification, with the pair that could not be solved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnifyError {
    pub left: MonoType,
    pub right: MonoType,
    pub failure: UnifyFailure,
}

impl fmt::Display for UnifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot unify `{}` with `{}`", self.left, self.right)?;
        match &self.failure {
            UnifyFailure::Clash => Ok(()),
            UnifyFailure::Occurs(v) => write!(f, ": `{v}` occurs in the other type"),
            UnifyFailure::MissingLabels(ls) => write!(f, ": missing label(s) {}", ls.join(", ")),
            UnifyFailure::FieldSets => write!(f, ": the records have different fields"),
            UnifyFailure::Rigid(v) => write!(f, ": `{v}` is rigid"),
        }
    }
}

impl std::error::Error for UnifyError {}

/// Most general kinded unifier of `(k, eqs)`.
pub fn unify(k: &KindingEnv, eqs: Vec<(MonoType, MonoType)>) -> Result<(KindingEnv, Substitution), UnifyError> {
    unify_rigid(k, eqs, &BTreeSet::new())
}

/// Like [`unify`], but fails instead of making the kinds cyclic.
pub fn unify_finite(k: &KindingEnv, eqs: Vec<(MonoType, MonoType)>) -> Result<(KindingEnv, Substitution), UnifyError> {
    run(k, eqs, &BTreeSet::new(), kind_cycle(k).is_none())
}

/// Unification in which the variables of `rigid` behave like constants.
pub fn unify_rigid(
    k: &KindingEnv,
    eqs: Vec<(MonoType, MonoType)>,
    rigid: &BTreeSet<TyVar>,
) -> Result<(KindingEnv, Substitution), UnifyError> {
    run(k, eqs, rigid, false)
}

fn run(
    k: &KindingEnv,
    eqs: Vec<(MonoType, MonoType)>,
    rigid: &BTreeSet<TyVar>,
    acyclic: bool,
) -> Result<(KindingEnv, Substitution), UnifyError> {
    let mut st = State { eqs: eqs.into(), k: k.clone(), s: Substitution::identity(), rigid };
    while let Some((t1, t2)) = st.eqs.pop_front() {
        st.step(t1.clone(), t2.clone())?;
        if acyclic {
            if let Some(v) = kind_cycle(&st.k) {
                return Err(UnifyError { left: t1, right: t2, failure: UnifyFailure::Occurs(v) });
            }
        }
    }
    Ok((st.k, st.s))
}

/// A variable reachable from itself through the kinds of `k`, if any.
pub fn kind_cycle(k: &KindingEnv) -> Option<TyVar> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit(k: &KindingEnv, v: &TyVar, marks: &mut BTreeMap<TyVar, Mark>) -> Option<TyVar> {
        match marks.get(v) {
            Some(Mark::Open) => return Some(v.clone()),
            Some(Mark::Done) => return None,
            None => {}
        }
        marks.insert(v.clone(), Mark::Open);
        if let Some(kind) = k.get(v) {
            for w in ftv(kind) {
                if let Some(c) = visit(k, &w, marks) {
                    return Some(c);
                }
            }
        }
        marks.insert(v.clone(), Mark::Done);
        None
    }
    let mut marks = BTreeMap::new();
    k.domain().iter().find_map(|v| visit(k, v, &mut marks))
}

struct State<'r> {
    eqs: VecDeque<(MonoType, MonoType)>,
    k: KindingEnv,
    s: Substitution,
    rigid: &'r BTreeSet<TyVar>,
}

enum VarKind {
    Universal,
    Record(Fields),
}

impl State<'_> {
    fn kind_of(&self, v: &TyVar) -> VarKind {
        match self.k.get(v) {
            Some(Kind::Record(fs)) => VarKind::Record(fs.clone()),
            _ => VarKind::Universal,
        }
    }

    fn flexible(&self, v: &TyVar) -> bool {
        !self.rigid.contains(v)
    }

    /// Replaces `v` by `t` everywhere and records the binding.
    fn bind(&mut self, v: &TyVar, t: MonoType) {
        let single = Substitution::singleton(v.clone(), t.clone());
        for (a, b) in self.eqs.iter_mut() {
            *a = a.apply(&single);
            *b = b.apply(&single);
        }
        self.k.remove(v);
        self.k = self.k.apply(&single);
        self.s = self.s.apply(&single);
        self.s.insert(v.clone(), t);
    }

    fn push_fields(&mut self, f1: &Fields, f2: &Fields) {
        for (l, t1) in f1 {
            if let Some(t2) = f2.get(l) {
                self.eqs.push_back((t1.clone(), t2.clone()));
            }
        }
    }

    fn step(&mut self, t1: MonoType, t2: MonoType) -> Result<(), UnifyError> {
        let fail = |failure| Err(UnifyError { left: t1.clone(), right: t2.clone(), failure });
        if t1 == t2 {
            return Ok(());
        }
        // A universally kinded flexible variable on either side.
        if let MonoType::Var(a) = &t1 {
            if self.flexible(a) && matches!(self.kind_of(a), VarKind::Universal) {
                if t2.occurs(a) {
                    return fail(UnifyFailure::Occurs(a.clone()));
                }
                self.bind(a, t2.clone());
                return Ok(());
            }
        }
        if let MonoType::Var(b) = &t2 {
            if self.flexible(b) && matches!(self.kind_of(b), VarKind::Universal) {
                if t1.occurs(b) {
                    return fail(UnifyFailure::Occurs(b.clone()));
                }
                self.bind(b, t1.clone());
                return Ok(());
            }
        }
        match (&t1, &t2) {
            (MonoType::Var(a), MonoType::Var(b)) => {
                let (fa, fb) = match (self.kind_of(a), self.kind_of(b)) {
                    (VarKind::Record(fa), VarKind::Record(fb)) => (fa, fb),
                    // Only rigid universal variables are left here.
                    _ => return fail(UnifyFailure::Rigid(if self.flexible(a) { b.clone() } else { a.clone() })),
                };
                match (self.flexible(a), self.flexible(b)) {
                    (true, true) => {
                        self.push_fields(&fa, &fb);
                        let merged = Kind::Record(field_merge(&fa, &fb));
                        self.bind(a, t2.clone());
                        let single = Substitution::singleton(a.clone(), t2.clone());
                        self.k.insert(b.clone(), merged.apply(&single));
                    }
                    (true, false) => self.flex_into_rigid(a, &fa, b, &fb, &t1, &t2)?,
                    (false, true) => self.flex_into_rigid(b, &fb, a, &fa, &t1, &t2)?,
                    (false, false) => return fail(UnifyFailure::Rigid(a.clone())),
                }
                Ok(())
            }
            (MonoType::Var(a), other) | (other, MonoType::Var(a)) => {
                if !self.flexible(a) {
                    return fail(UnifyFailure::Rigid(a.clone()));
                }
                let VarKind::Record(fa) = self.kind_of(a) else { unreachable!() };
                let have = match other {
                    MonoType::Record(fs) => fs.clone(),
                    MonoType::List(elem) => MonoType::list_fields(elem),
                    _ => return fail(UnifyFailure::Clash),
                };
                let missing: Vec<Label> = fa.keys().filter(|l| !have.contains_key(*l)).cloned().collect();
                if !missing.is_empty() {
                    return fail(UnifyFailure::MissingLabels(missing));
                }
                if other.occurs(a) {
                    return fail(UnifyFailure::Occurs(a.clone()));
                }
                self.push_fields(&fa, &have);
                self.bind(a, other.clone());
                Ok(())
            }
            (MonoType::Record(f1), MonoType::Record(f2)) => {
                if f1.len() != f2.len() || f1.keys().any(|l| !f2.contains_key(l)) {
                    return fail(UnifyFailure::FieldSets);
                }
                self.push_fields(f1, f2);
                Ok(())
            }
            (MonoType::Arrow(a1, b1), MonoType::Arrow(a2, b2)) => {
                self.eqs.push_back(((**a1).clone(), (**a2).clone()));
                self.eqs.push_back(((**b1).clone(), (**b2).clone()));
                Ok(())
            }
            (MonoType::List(e1), MonoType::List(e2)) => {
                self.eqs.push_back(((**e1).clone(), (**e2).clone()));
                Ok(())
            }
            _ => fail(UnifyFailure::Clash),
        }
    }

    /// A flexible record-kinded variable meets a rigid one: the rigid kind
    /// must already provide every label the flexible one asks for.
    fn flex_into_rigid(
        &mut self,
        flex: &TyVar,
        f_flex: &Fields,
        rigid: &TyVar,
        f_rigid: &Fields,
        t1: &MonoType,
        t2: &MonoType,
    ) -> Result<(), UnifyError> {
        let missing: Vec<Label> = f_flex.keys().filter(|l| !f_rigid.contains_key(*l)).cloned().collect();
        if !missing.is_empty() {
            return Err(UnifyError {
                left: t1.clone(),
                right: t2.clone(),
                failure: UnifyFailure::MissingLabels(missing),
            });
        }
        self.push_fields(f_flex, f_rigid);
        self.bind(flex, MonoType::Var(rigid.clone()));
        Ok(())
    }
}
