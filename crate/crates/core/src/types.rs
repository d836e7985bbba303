//! Types, kinds, schemes, environments and substitutions.
//!
//! Record field maps are `BTreeMap`s, so every record type and record kind
//! is kept in canonical (label-sorted) order. Schemes compare equal up to
//! renaming of their quantified variables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Record labels and term variable names.
pub type Label = String;

/// Label-indexed field map shared by record types and record kinds.
pub type Fields = BTreeMap<Label, MonoType>;

/// A type variable.
///
/// `Named` variables come from user-written type syntax. `Fresh` variables
/// are produced by a [`FreshSupply`] and print as `'t<n>`, a spelling that
/// no source term can contain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TyVar {
    Named(String),
    Fresh(u32),
}

impl TyVar {
    pub fn named(name: impl Into<String>) -> Self {
        TyVar::Named(name.into())
    }
}

impl fmt::Display for TyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TyVar::Named(n) => f.write_str(n),
            TyVar::Fresh(n) => write!(f, "'t{n}"),
        }
    }
}

/// Constant (base) types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseType {
    Bool,
    Int,
    Float,
    String,
}

impl BaseType {
    pub const ALL: [BaseType; 4] = [BaseType::Bool, BaseType::Int, BaseType::Float, BaseType::String];

    pub fn name(self) -> &'static str {
        match self {
            BaseType::Bool => "Bool",
            BaseType::Int => "Int",
            BaseType::Float => "Float",
            BaseType::String => "String",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        BaseType::ALL.into_iter().find(|b| b.name() == name)
    }
}

impl fmt::Display for BaseType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Monotypes.
///
/// `List` only arises in extended mode, where the builtin list type is
/// treated as a record-like type with fields `empty`, `head` and `tail`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonoType {
    Var(TyVar),
    Base(BaseType),
    Arrow(Box<MonoType>, Box<MonoType>),
    Record(Fields),
    List(Box<MonoType>),
}

impl MonoType {
    pub fn var(v: TyVar) -> Self {
        MonoType::Var(v)
    }

    pub fn named(name: &str) -> Self {
        MonoType::Var(TyVar::named(name))
    }

    pub fn arrow(dom: MonoType, cod: MonoType) -> Self {
        MonoType::Arrow(Box::new(dom), Box::new(cod))
    }

    /// Curried arrow `a1 -> a2 -> ... -> result`.
    pub fn arrows(args: impl IntoIterator<Item = MonoType>, result: MonoType) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter().rev().fold(result, |acc, a| MonoType::arrow(a, acc))
    }

    pub fn record<L: Into<Label>>(fields: impl IntoIterator<Item = (L, MonoType)>) -> Self {
        MonoType::Record(fields.into_iter().map(|(l, t)| (l.into(), t)).collect())
    }

    pub fn list(elem: MonoType) -> Self {
        MonoType::List(Box::new(elem))
    }

    pub fn bool() -> Self {
        MonoType::Base(BaseType::Bool)
    }
    pub fn int() -> Self {
        MonoType::Base(BaseType::Int)
    }
    pub fn float() -> Self {
        MonoType::Base(BaseType::Float)
    }
    pub fn string() -> Self {
        MonoType::Base(BaseType::String)
    }

    pub fn is_ground(&self) -> bool {
        ftv(self).is_empty()
    }

    /// Nesting depth; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            MonoType::Var(_) | MonoType::Base(_) => 1,
            MonoType::Arrow(a, b) => 1 + a.depth().max(b.depth()),
            MonoType::Record(fs) => 1 + fs.values().map(MonoType::depth).max().unwrap_or(0),
            MonoType::List(t) => 1 + t.depth(),
        }
    }

    /// Field view of a builtin list type.
    pub fn list_fields(elem: &MonoType) -> Fields {
        let mut fs = Fields::new();
        fs.insert("empty".into(), MonoType::bool());
        fs.insert("head".into(), elem.clone());
        fs.insert("tail".into(), MonoType::list(elem.clone()));
        fs
    }

    fn walk_vars(&self, f: &mut impl FnMut(&TyVar)) {
        match self {
            MonoType::Var(v) => f(v),
            MonoType::Base(_) => {}
            MonoType::Arrow(a, b) => {
                a.walk_vars(f);
                b.walk_vars(f);
            }
            MonoType::Record(fs) => fs.values().for_each(|t| t.walk_vars(f)),
            MonoType::List(t) => t.walk_vars(f),
        }
    }

    pub fn occurs(&self, v: &TyVar) -> bool {
        let mut found = false;
        self.walk_vars(&mut |w| found |= w == v);
        found
    }
}

/// Kinds: the universal kind or a record kind `{{l: T, ...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Universal,
    Record(Fields),
}

impl Kind {
    pub fn record<L: Into<Label>>(fields: impl IntoIterator<Item = (L, MonoType)>) -> Self {
        Kind::Record(fields.into_iter().map(|(l, t)| (l.into(), t)).collect())
    }
}

/// A kinded type scheme `forall a1::k1 ... forall an::kn. body`.
///
/// The whole prefix binds simultaneously: a prefix variable may appear in
/// any prefix kind as well as in the body.
#[derive(Clone, Debug)]
pub struct PolyType {
    pub prefix: Vec<(TyVar, Kind)>,
    pub body: MonoType,
}

impl PolyType {
    pub fn mono(body: MonoType) -> Self {
        PolyType { prefix: Vec::new(), body }
    }

    pub fn new(prefix: Vec<(TyVar, Kind)>, body: MonoType) -> Self {
        PolyType { prefix, body }
    }

    pub fn is_mono(&self) -> bool {
        self.prefix.is_empty()
    }

    pub fn bound_vars(&self) -> BTreeSet<TyVar> {
        self.prefix.iter().map(|(v, _)| v.clone()).collect()
    }

    /// Renames the prefix to `#0, #1, ...`; these names cannot be written in
    /// source so the renaming never captures.
    fn canonical(&self) -> PolyType {
        let s: Substitution = self
            .prefix
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (v.clone(), MonoType::Var(TyVar::Named(format!("#{i}")))))
            .collect();
        PolyType {
            prefix: self
                .prefix
                .iter()
                .enumerate()
                .map(|(i, (_, k))| (TyVar::Named(format!("#{i}")), k.apply(&s)))
                .collect(),
            body: self.body.apply(&s),
        }
    }

    /// Renames the prefix to `a, b, c, ...`, skipping names that occur free.
    pub fn normalized(&self) -> PolyType {
        let free = ftv(self);
        let mut names = (0usize..).map(pretty_var_name).filter(|n| !free.contains(&TyVar::named(n.clone())));
        let s: Substitution =
            self.prefix.iter().map(|(v, _)| (v.clone(), MonoType::Var(TyVar::Named(names.next().unwrap())))).collect();
        PolyType {
            prefix: self
                .prefix
                .iter()
                .map(|(v, k)| {
                    let MonoType::Var(nv) = s.get(v).unwrap().clone() else { unreachable!() };
                    (nv, k.apply(&s))
                })
                .collect(),
            body: self.body.apply(&s),
        }
    }

    /// Equality up to renaming *and* reordering of the prefix.
    pub fn equivalent(&self, other: &PolyType) -> bool {
        if self.prefix.len() != other.prefix.len() {
            return false;
        }
        let left: BTreeMap<&TyVar, &Kind> = self.prefix.iter().map(|(v, k)| (v, k)).collect();
        let right: BTreeMap<&TyVar, &Kind> = other.prefix.iter().map(|(v, k)| (v, k)).collect();
        if left.len() != self.prefix.len() || right.len() != other.prefix.len() {
            return false;
        }
        let mut map: BTreeMap<TyVar, TyVar> = BTreeMap::new();
        if !match_bound(&self.body, &other.body, &left, &right, &mut map) {
            return false;
        }
        // Kinds of matched variables may bind further prefix variables.
        let mut checked: BTreeSet<TyVar> = BTreeSet::new();
        loop {
            let pending: Vec<(TyVar, TyVar)> =
                map.iter().filter(|(a, _)| !checked.contains(*a)).map(|(a, b)| (a.clone(), b.clone())).collect();
            if pending.is_empty() {
                break;
            }
            for (a, b) in pending {
                checked.insert(a.clone());
                if !match_kind_bound(left[&a], right[&b], &left, &right, &mut map) {
                    return false;
                }
            }
        }
        // Unused quantifiers are paired in prefix order.
        let unmapped_l: Vec<&TyVar> = self.prefix.iter().map(|(v, _)| v).filter(|v| !map.contains_key(*v)).collect();
        let image: BTreeSet<&TyVar> = map.values().collect();
        let unmapped_r: Vec<&TyVar> = other.prefix.iter().map(|(v, _)| v).filter(|v| !image.contains(v)).collect();
        if unmapped_l.len() != unmapped_r.len() {
            return false;
        }
        for (a, b) in unmapped_l.iter().zip(unmapped_r.iter()) {
            map.insert((*a).clone(), (*b).clone());
        }
        for (a, b) in unmapped_l.into_iter().zip(unmapped_r) {
            if !match_kind_bound(left[a], right[b], &left, &right, &mut map) {
                return false;
            }
        }
        let values: BTreeSet<&TyVar> = map.values().collect();
        values.len() == map.len()
    }
}

fn match_bound(
    a: &MonoType,
    b: &MonoType,
    left: &BTreeMap<&TyVar, &Kind>,
    right: &BTreeMap<&TyVar, &Kind>,
    map: &mut BTreeMap<TyVar, TyVar>,
) -> bool {
    match (a, b) {
        (MonoType::Var(x), MonoType::Var(y)) if left.contains_key(x) => {
            if !right.contains_key(y) {
                return false;
            }
            match map.get(x) {
                Some(z) => z == y,
                None => {
                    map.insert(x.clone(), y.clone());
                    true
                }
            }
        }
        (MonoType::Var(x), MonoType::Var(y)) => x == y && !right.contains_key(y),
        (MonoType::Base(x), MonoType::Base(y)) => x == y,
        (MonoType::Arrow(a1, a2), MonoType::Arrow(b1, b2)) => {
            match_bound(a1, b1, left, right, map) && match_bound(a2, b2, left, right, map)
        }
        (MonoType::Record(fa), MonoType::Record(fb)) => {
            fa.len() == fb.len()
                && fa
                    .iter()
                    .zip(fb.iter())
                    .all(|((la, ta), (lb, tb))| la == lb && match_bound(ta, tb, left, right, map))
        }
        (MonoType::List(x), MonoType::List(y)) => match_bound(x, y, left, right, map),
        _ => false,
    }
}

fn match_kind_bound(
    a: &Kind,
    b: &Kind,
    left: &BTreeMap<&TyVar, &Kind>,
    right: &BTreeMap<&TyVar, &Kind>,
    map: &mut BTreeMap<TyVar, TyVar>,
) -> bool {
    match (a, b) {
        (Kind::Universal, Kind::Universal) => true,
        (Kind::Record(fa), Kind::Record(fb)) => {
            fa.len() == fb.len()
                && fa
                    .iter()
                    .zip(fb.iter())
                    .all(|((la, ta), (lb, tb))| la == lb && match_bound(ta, tb, left, right, map))
        }
        _ => false,
    }
}

impl PartialEq for PolyType {
    fn eq(&self, other: &Self) -> bool {
        if self.prefix.len() != other.prefix.len() {
            return false;
        }
        let a = self.canonical();
        let b = other.canonical();
        a.prefix == b.prefix && a.body == b.body
    }
}

impl Eq for PolyType {}

impl From<MonoType> for PolyType {
    fn from(t: MonoType) -> Self {
        PolyType::mono(t)
    }
}

fn pretty_var_name(i: usize) -> String {
    let letter = (b'a' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

/// Kinding environment `K`: type variable to kind.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KindingEnv(BTreeMap<TyVar, Kind>);

impl KindingEnv {
    pub fn new() -> Self {
        KindingEnv(BTreeMap::new())
    }

    pub fn get(&self, v: &TyVar) -> Option<&Kind> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: TyVar, k: Kind) -> Option<Kind> {
        self.0.insert(v, k)
    }

    pub fn remove(&mut self, v: &TyVar) -> Option<Kind> {
        self.0.remove(v)
    }

    pub fn contains(&self, v: &TyVar) -> bool {
        self.0.contains_key(v)
    }

    pub fn domain(&self) -> BTreeSet<TyVar> {
        self.0.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TyVar, &Kind)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `K1 ∪ K2`; entries of `other` win on overlap.
    pub fn union(&self, other: &KindingEnv) -> KindingEnv {
        let mut out = self.clone();
        for (v, k) in other.iter() {
            out.insert(v.clone(), k.clone());
        }
        out
    }

    /// `K` is well-formed iff every kind only mentions variables of `dom(K)`.
    pub fn is_well_formed(&self) -> bool {
        self.0.values().all(|k| ftv(k).iter().all(|v| self.contains(v)))
    }

    pub fn well_formed(&self, t: &impl Types) -> bool {
        ftv(t).iter().all(|v| self.contains(v))
    }
}

impl FromIterator<(TyVar, Kind)> for KindingEnv {
    fn from_iter<I: IntoIterator<Item = (TyVar, Kind)>>(iter: I) -> Self {
        KindingEnv(iter.into_iter().collect())
    }
}

/// Typing environment `Γ`: term variable to scheme.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingEnv(BTreeMap<Label, PolyType>);

impl TypingEnv {
    pub fn new() -> Self {
        TypingEnv(BTreeMap::new())
    }

    pub fn get(&self, x: &str) -> Option<&PolyType> {
        self.0.get(x)
    }

    /// `Γ_x ∪ {x : σ}`.
    pub fn extended(&self, x: &str, sigma: PolyType) -> TypingEnv {
        let mut out = self.clone();
        out.0.insert(x.to_string(), sigma);
        out
    }

    pub fn insert(&mut self, x: impl Into<Label>, sigma: PolyType) {
        self.0.insert(x.into(), sigma);
    }

    pub fn remove(&mut self, x: &str) -> Option<PolyType> {
        self.0.remove(x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &PolyType)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &TypingEnv) -> TypingEnv {
        let mut out = self.clone();
        for (x, s) in other.iter() {
            out.0.insert(x.clone(), s.clone());
        }
        out
    }
}

impl FromIterator<(Label, PolyType)> for TypingEnv {
    fn from_iter<I: IntoIterator<Item = (Label, PolyType)>>(iter: I) -> Self {
        TypingEnv(iter.into_iter().collect())
    }
}

/// A substitution `[τ1/α1, ..., τn/αn]`, applied simultaneously.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<TyVar, MonoType>);

impl Substitution {
    pub fn identity() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn singleton(v: TyVar, t: MonoType) -> Self {
        let mut m = BTreeMap::new();
        m.insert(v, t);
        Substitution(m)
    }

    pub fn get(&self, v: &TyVar) -> Option<&MonoType> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: TyVar, t: MonoType) {
        self.0.insert(v, t);
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(v, t)| matches!(t, MonoType::Var(w) if w == v))
    }

    pub fn domain(&self) -> BTreeSet<TyVar> {
        self.0.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TyVar, &MonoType)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The image of `v`, which is `v` itself outside the domain.
    pub fn lookup(&self, v: &TyVar) -> MonoType {
        self.0.get(v).cloned().unwrap_or_else(|| MonoType::Var(v.clone()))
    }

    /// Restriction to the given variables.
    pub fn restricted(&self, vars: &BTreeSet<TyVar>) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| vars.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    pub fn without(&self, vars: &BTreeSet<TyVar>) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| !vars.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    /// Free variables of the range.
    pub fn range_ftv(&self) -> BTreeSet<TyVar> {
        let mut out = BTreeSet::new();
        for t in self.0.values() {
            t.ftv_into(&mut out);
        }
        out
    }

    /// `self ∘ first`: applying the result equals applying `first`, then `self`.
    pub fn compose(&self, first: &Substitution) -> Substitution {
        let mut out: BTreeMap<TyVar, MonoType> = first.0.iter().map(|(v, t)| (v.clone(), t.apply(self))).collect();
        for (v, t) in &self.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| !matches!(t, MonoType::Var(w) if w == v));
        Substitution(out)
    }

    /// `S` is well-formed under `K` iff every `S(α)` is.
    pub fn is_well_formed_under(&self, k: &KindingEnv) -> bool {
        self.0.values().all(|t| k.well_formed(t))
    }
}

impl FromIterator<(TyVar, MonoType)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (TyVar, MonoType)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

/// `S₂ ∘ S₁`.
pub fn compose(s2: &Substitution, s1: &Substitution) -> Substitution {
    s2.compose(s1)
}

/// Anything with free type variables that a substitution can act on.
pub trait Types: Sized {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>);
    fn apply(&self, s: &Substitution) -> Self;
}

/// Free type variables.
pub fn ftv(t: &impl Types) -> BTreeSet<TyVar> {
    let mut out = BTreeSet::new();
    t.ftv_into(&mut out);
    out
}

/// Applies `s` to `t`.
pub fn apply_subst<T: Types>(s: &Substitution, t: &T) -> T {
    t.apply(s)
}

impl Types for MonoType {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        self.walk_vars(&mut |v| {
            out.insert(v.clone());
        });
    }

    fn apply(&self, s: &Substitution) -> Self {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            MonoType::Var(v) => s.lookup(v),
            MonoType::Base(b) => MonoType::Base(*b),
            MonoType::Arrow(a, b) => MonoType::arrow(a.apply(s), b.apply(s)),
            MonoType::Record(fs) => MonoType::Record(apply_fields(fs, s)),
            MonoType::List(t) => MonoType::list(t.apply(s)),
        }
    }
}

fn apply_fields(fs: &Fields, s: &Substitution) -> Fields {
    fs.iter().map(|(l, t)| (l.clone(), t.apply(s))).collect()
}

impl Types for Kind {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        if let Kind::Record(fs) = self {
            for t in fs.values() {
                t.ftv_into(out);
            }
        }
    }

    fn apply(&self, s: &Substitution) -> Self {
        match self {
            Kind::Universal => Kind::Universal,
            Kind::Record(fs) => Kind::Record(apply_fields(fs, s)),
        }
    }
}

impl Types for PolyType {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        let mut inner = BTreeSet::new();
        self.body.ftv_into(&mut inner);
        for (_, k) in &self.prefix {
            k.ftv_into(&mut inner);
        }
        for (v, _) in &self.prefix {
            inner.remove(v);
        }
        out.extend(inner);
    }

    fn apply(&self, s: &Substitution) -> Self {
        if self.prefix.is_empty() {
            return PolyType::mono(self.body.apply(s));
        }
        let bound = self.bound_vars();
        let free_here = ftv(self);
        let relevant = s.without(&bound).restricted(&free_here);
        if relevant.is_empty() {
            return self.clone();
        }
        // Rename bound variables that would capture a free variable of the range.
        let range = relevant.range_ftv();
        let mut next = max_fresh_index([&ftv_all(self), &range, &relevant.domain()]).map_or(0, |n| n + 1);
        let mut rename = Substitution::identity();
        for v in &bound {
            if range.contains(v) {
                rename.insert(v.clone(), MonoType::Var(TyVar::Fresh(next)));
                next += 1;
            }
        }
        let prefix = self
            .prefix
            .iter()
            .map(|(v, k)| {
                let nv = match rename.get(v) {
                    Some(MonoType::Var(w)) => w.clone(),
                    _ => v.clone(),
                };
                (nv, k.apply(&rename).apply(&relevant))
            })
            .collect();
        PolyType { prefix, body: self.body.apply(&rename).apply(&relevant) }
    }
}

/// All variables of a scheme, bound ones included.
fn ftv_all(s: &PolyType) -> BTreeSet<TyVar> {
    let mut out = ftv(&s.body);
    for (v, k) in &s.prefix {
        out.insert(v.clone());
        k.ftv_into(&mut out);
    }
    out
}

/// Largest `Fresh` index among the given sets.
pub fn max_fresh_index<'a>(sets: impl IntoIterator<Item = &'a BTreeSet<TyVar>>) -> Option<u32> {
    sets.into_iter()
        .flat_map(|s| s.iter())
        .filter_map(|v| match v {
            TyVar::Fresh(n) => Some(*n),
            TyVar::Named(_) => None,
        })
        .max()
}

impl Types for TypingEnv {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        for s in self.0.values() {
            s.ftv_into(out);
        }
    }

    fn apply(&self, s: &Substitution) -> Self {
        TypingEnv(self.0.iter().map(|(x, t)| (x.clone(), t.apply(s))).collect())
    }
}

impl Types for KindingEnv {
    /// Domain plus every variable mentioned by a kind.
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        for (v, k) in &self.0 {
            out.insert(v.clone());
            k.ftv_into(out);
        }
    }

    /// Applies `s` to every kind; substituted variables leave the domain.
    fn apply(&self, s: &Substitution) -> Self {
        KindingEnv(self.0.iter().filter(|(v, _)| s.get(v).is_none()).map(|(v, k)| (v.clone(), k.apply(s))).collect())
    }
}

impl Types for Substitution {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        for (v, t) in &self.0 {
            out.insert(v.clone());
            t.ftv_into(out);
        }
    }

    /// Applies `s` to the range.
    fn apply(&self, s: &Substitution) -> Self {
        Substitution(self.0.iter().map(|(v, t)| (v.clone(), t.apply(s))).collect())
    }
}

impl<A: Types, B: Types> Types for (A, B) {
    fn ftv_into(&self, out: &mut BTreeSet<TyVar>) {
        self.0.ftv_into(out);
        self.1.ftv_into(out);
    }

    fn apply(&self, s: &Substitution) -> Self {
        (self.0.apply(s), self.1.apply(s))
    }
}

/// Essentially free type variables: `ftv(t)` closed under the kinds in `K`.
pub fn eftv(k: &KindingEnv, t: &impl Types) -> BTreeSet<TyVar> {
    close_under_kinds(k, ftv(t))
}

pub(crate) fn close_under_kinds(k: &KindingEnv, mut set: BTreeSet<TyVar>) -> BTreeSet<TyVar> {
    let mut work: Vec<TyVar> = set.iter().cloned().collect();
    while let Some(v) = work.pop() {
        if let Some(kind) = k.get(&v) {
            for w in ftv(kind) {
                if set.insert(w.clone()) {
                    work.push(w);
                }
            }
        }
    }
    set
}

/// The kinding judgment `K ⊩ τ :: k`.
pub fn has_kind(k: &KindingEnv, t: &MonoType, kind: &Kind) -> bool {
    if !k.well_formed(t) || !k.well_formed(kind) {
        return false;
    }
    match kind {
        Kind::Universal => true,
        Kind::Record(required) => match t {
            MonoType::Var(v) => match k.get(v) {
                Some(Kind::Record(have)) => fields_extend(have, required),
                _ => false,
            },
            MonoType::Record(have) => fields_extend(have, required),
            MonoType::List(elem) => fields_extend(&MonoType::list_fields(elem), required),
            _ => false,
        },
    }
}

/// `have` contains every field of `required`, at the same type.
fn fields_extend(have: &Fields, required: &Fields) -> bool {
    required.iter().all(|(l, t)| have.get(l) == Some(t))
}

/// `(K₁, S)` respects `K`: for every `α ∈ dom(K)`, `K₁ ⊩ S(α) :: S(K(α))`.
pub fn respects(k1: &KindingEnv, s: &Substitution, k: &KindingEnv) -> bool {
    k.iter().all(|(v, kind)| has_kind(k1, &s.lookup(v), &kind.apply(s)))
}

/// Hands out fresh type variables for one inference session.
#[derive(Clone, Debug, Default)]
pub struct FreshSupply {
    next: u32,
}

impl FreshSupply {
    pub fn new() -> Self {
        FreshSupply { next: 0 }
    }

    /// A supply whose variables are distinct from every `Fresh` var in `avoid`.
    pub fn avoiding<'a>(avoid: impl IntoIterator<Item = &'a BTreeSet<TyVar>>) -> Self {
        FreshSupply { next: max_fresh_index(avoid).map_or(0, |n| n + 1) }
    }

    pub fn bump_past(&mut self, vars: &BTreeSet<TyVar>) {
        if let Some(n) = max_fresh_index([vars]) {
            self.next = self.next.max(n + 1);
        }
    }

    pub fn fresh(&mut self) -> TyVar {
        let v = TyVar::Fresh(self.next);
        self.next += 1;
        v
    }

    pub fn fresh_type(&mut self) -> MonoType {
        MonoType::Var(self.fresh())
    }
}

// Printing. Arrows associate to the right; `List` binds tighter than `->`.

impl MonoType {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            MonoType::Var(v) => write!(f, "{v}"),
            MonoType::Base(b) => write!(f, "{b}"),
            MonoType::Arrow(a, b) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 0)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            MonoType::Record(fs) => {
                f.write_str("{")?;
                write_fields(f, fs)?;
                f.write_str("}")
            }
            MonoType::List(t) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                f.write_str("List ")?;
                t.fmt_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

fn write_fields(f: &mut fmt::Formatter<'_>, fs: &Fields) -> fmt::Result {
    for (i, (l, t)) in fs.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{l}: ")?;
        t.fmt_prec(f, 0)?;
    }
    Ok(())
}

impl fmt::Display for MonoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Universal => f.write_str("U"),
            Kind::Record(fs) => {
                f.write_str("{{")?;
                write_fields(f, fs)?;
                f.write_str("}}")
            }
        }
    }
}

impl fmt::Display for PolyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (v, k) in &self.prefix {
            write!(f, "forall {v}::{k}. ")?;
        }
        write!(f, "{}", self.body)
    }
}

impl fmt::Display for KindingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, k)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}::{k}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}/{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for TypingEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, s)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}: {s}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> MonoType {
        MonoType::named(n)
    }
    fn v(n: &str) -> TyVar {
        TyVar::named(n)
    }
    fn set(names: &[&str]) -> BTreeSet<TyVar> {
        names.iter().map(|n| v(n)).collect()
    }

    #[test]
    fn ftv_of_closed_base_type_is_empty() {
        assert!(ftv(&MonoType::int()).is_empty());
    }

    #[test]
    fn ftv_collects_all_free_variables() {
        let mu = MonoType::arrow(
            a("a1"),
            MonoType::record([("l2", MonoType::int()), ("l3", MonoType::arrow(a("a2"), a("a3")))]),
        );
        assert_eq!(ftv(&mu), set(&["a1", "a2", "a3"]));
    }

    #[test]
    fn ftv_excludes_quantified_variables() {
        let s = PolyType::new(vec![(v("a"), Kind::Universal)], MonoType::arrow(a("a"), a("b")));
        assert_eq!(ftv(&s), set(&["b"]));
    }

    #[test]
    fn eftv_follows_kinds() {
        let k: KindingEnv = [
            (v("a2"), Kind::Universal),
            (v("a3"), Kind::Universal),
            (v("a4"), Kind::Universal),
            (v("a1"), Kind::record([("l1", a("a2"))])),
        ]
        .into_iter()
        .collect();
        let tau = MonoType::arrow(
            MonoType::record([("l1", a("a2")), ("l4", MonoType::bool())]),
            MonoType::record([("l2", MonoType::int()), ("l3", MonoType::arrow(a("a3"), a("a4")))]),
        );
        // a1 is not reachable from tau, so it is not essentially free in it.
        assert_eq!(eftv(&k, &tau), set(&["a2", "a3", "a4"]));
        let gamma: TypingEnv = [("x".to_string(), PolyType::mono(a("a1")))].into_iter().collect();
        assert_eq!(eftv(&k, &gamma), set(&["a1", "a2"]));
        assert!(eftv(&KindingEnv::new(), &MonoType::arrow(MonoType::int(), MonoType::bool())).is_empty());
        let k2: KindingEnv =
            [(v("a1"), Kind::record([("l", a("a2"))])), (v("a2"), Kind::Universal)].into_iter().collect();
        assert_eq!(eftv(&k2, &a("a1")), set(&["a1", "a2"]));
    }

    #[test]
    fn apply_replaces_simultaneously() {
        let s = Substitution::singleton(v("a"), MonoType::int());
        assert_eq!(MonoType::arrow(a("a"), a("a")).apply(&s), MonoType::arrow(MonoType::int(), MonoType::int()));
        let s2: Substitution = [(v("a1"), a("a2")), (v("a3"), MonoType::string())].into_iter().collect();
        let k = Kind::record([("fire_danger", MonoType::string()), ("location", a("a3"))]);
        assert_eq!(k.apply(&s2), Kind::record([("fire_danger", MonoType::string()), ("location", MonoType::string())]));
    }

    #[test]
    fn apply_to_scheme_leaves_bound_variables_alone() {
        let id = PolyType::new(vec![(v("b"), Kind::Universal)], MonoType::arrow(a("b"), a("b")));
        let out = id.apply(&Substitution::singleton(v("b"), MonoType::bool()));
        assert_eq!(out, id);
    }

    #[test]
    fn apply_to_scheme_avoids_capture() {
        // forall b. a -> b  with [b/a] must not become forall b. b -> b
        let s = PolyType::new(vec![(v("b"), Kind::Universal)], MonoType::arrow(a("a"), a("b")));
        let out = s.apply(&Substitution::singleton(v("a"), a("b")));
        assert_eq!(ftv(&out), set(&["b"]));
        let (bv, _) = &out.prefix[0];
        assert_ne!(bv, &v("b"));
        assert_eq!(out.body, MonoType::arrow(a("b"), MonoType::Var(bv.clone())));
    }

    #[test]
    fn compose_laws() {
        let s = Substitution::singleton(v("a"), MonoType::int());
        assert_eq!(compose(&Substitution::identity(), &s), s);
        let c = compose(&Substitution::singleton(v("b"), MonoType::int()), &Substitution::singleton(v("a"), a("b")));
        assert_eq!(c.lookup(&v("a")), MonoType::int());
        assert_eq!(c.lookup(&v("b")), MonoType::int());
        let s1: Substitution =
            [(v("a5"), MonoType::string()), (v("a3"), MonoType::string()), (v("a4"), a("a6"))].into_iter().collect();
        let s2 = Substitution::singleton(v("a6"), MonoType::string());
        assert_eq!(compose(&s2, &s1).lookup(&v("a4")), MonoType::string());
    }

    #[test]
    fn kinding_judgment_examples() {
        let mu = MonoType::arrow(
            a("a1"),
            MonoType::record([("l2", MonoType::int()), ("l3", MonoType::arrow(a("a2"), a("a3")))]),
        );
        let k1: KindingEnv = ["a1", "a2", "a3"].into_iter().map(|n| (v(n), Kind::Universal)).collect();
        let k2: KindingEnv = ["a1", "a2"].into_iter().map(|n| (v(n), Kind::Universal)).collect();
        assert!(has_kind(&k1, &mu, &Kind::Universal));
        assert!(!has_kind(&k2, &mu, &Kind::Universal));
        let r = MonoType::record([("l", MonoType::int())]);
        assert!(has_kind(&KindingEnv::new(), &r, &Kind::record([("l", MonoType::int())])));
        assert!(!has_kind(&KindingEnv::new(), &r, &Kind::record([("l", MonoType::bool())])));
        assert!(!has_kind(&KindingEnv::new(), &r, &Kind::record([("m", MonoType::int())])));
    }

    #[test]
    fn record_kinded_variable_has_sub_kinds() {
        let k: KindingEnv =
            [(v("a"), Kind::record([("l", MonoType::int()), ("m", MonoType::bool())]))].into_iter().collect();
        assert!(has_kind(&k, &a("a"), &Kind::record([("l", MonoType::int())])));
        assert!(!has_kind(&k, &a("a"), &Kind::record([("n", MonoType::int())])));
    }

    #[test]
    fn respects_examples() {
        let k1: KindingEnv =
            [(v("a1"), Kind::record([("l1", a("a2"))])), (v("a2"), Kind::Universal)].into_iter().collect();
        let s = Substitution::singleton(v("a1"), MonoType::record([("l1", MonoType::int())]));
        let k2: KindingEnv = [(v("a1"), Kind::record([("l1", MonoType::int())]))].into_iter().collect();
        assert!(respects(&k1, &s, &k2));
        assert!(respects(&k1, &Substitution::identity(), &k1));
        let bad = Substitution::singleton(v("a1"), a("a2"));
        let k3: KindingEnv = [(v("a3"), Kind::Universal)].into_iter().collect();
        assert!(!bad.is_well_formed_under(&k3));
        let k4: KindingEnv = [(v("a2"), Kind::Universal)].into_iter().collect();
        assert!(bad.is_well_formed_under(&k4));
    }

    #[test]
    fn schemes_compare_up_to_renaming() {
        let s1 = PolyType::new(vec![(v("a"), Kind::Universal)], MonoType::arrow(a("a"), a("a")));
        let s2 = PolyType::new(vec![(v("z"), Kind::Universal)], MonoType::arrow(a("z"), a("z")));
        assert_eq!(s1, s2);
        let s3 = PolyType::new(vec![(v("z"), Kind::Universal)], MonoType::arrow(a("z"), a("y")));
        assert_ne!(s1, s3);
    }

    #[test]
    fn equivalence_ignores_prefix_order() {
        let s1 = PolyType::new(
            vec![(v("a"), Kind::Universal), (v("b"), Kind::record([("l", a("a"))]))],
            MonoType::arrow(a("b"), a("a")),
        );
        let s2 = PolyType::new(
            vec![(v("y"), Kind::record([("l", a("x"))])), (v("x"), Kind::Universal)],
            MonoType::arrow(a("y"), a("x")),
        );
        assert!(s1.equivalent(&s2));
        assert_ne!(s1, s2);
        let s3 = PolyType::new(
            vec![(v("y"), Kind::record([("m", a("x"))])), (v("x"), Kind::Universal)],
            MonoType::arrow(a("y"), a("x")),
        );
        assert!(!s1.equivalent(&s3));
    }

    #[test]
    fn printing_is_canonical() {
        let t = MonoType::record([("location", MonoType::string()), ("fire_danger", MonoType::string())]);
        assert_eq!(t.to_string(), "{fire_danger: String, location: String}");
        let s = PolyType::new(
            vec![(TyVar::Fresh(7), Kind::Universal)],
            MonoType::arrow(MonoType::Var(TyVar::Fresh(7)), MonoType::Var(TyVar::Fresh(7))),
        );
        assert_eq!(s.normalized().to_string(), "forall a::U. a -> a");
        let k = Kind::record([("l", MonoType::int())]);
        assert_eq!(k.to_string(), "{{l: Int}}");
        let f = MonoType::arrow(MonoType::arrow(a("a"), a("b")), MonoType::list(MonoType::arrow(a("a"), a("b"))));
        assert_eq!(f.to_string(), "(a -> b) -> List (a -> b)");
    }
}
