//! Which types describe events.
//!
//! Event fields have *field types*: a variable, a base type, or a function
//! whose final result is a field type. An event type is a record of field
//! types, possibly behind a curried chain of arguments. Records never nest
//! inside events.

use crate::types::{Fields, Kind, KindingEnv, MonoType, PolyType};

pub fn is_field_type(t: &MonoType) -> bool {
    match t {
        MonoType::Var(_) | MonoType::Base(_) => true,
        MonoType::Arrow(_, cod) => is_field_type(cod),
        MonoType::Record(_) | MonoType::List(_) => false,
    }
}

fn event_fields(fs: &Fields) -> bool {
    fs.values().all(is_field_type)
}

/// The codomain left after stripping every argument.
pub fn final_codomain(t: &MonoType) -> &MonoType {
    match t {
        MonoType::Arrow(_, cod) => final_codomain(cod),
        other => other,
    }
}

pub fn is_event_type(t: &MonoType) -> bool {
    matches!(final_codomain(t), MonoType::Record(fs) if event_fields(fs))
}

/// Like [`is_event_type`], but a final variable also counts when its kind
/// (from the prefix, or else from `k`) is a record kind of field types.
pub fn is_event_scheme_under(k: &KindingEnv, s: &PolyType) -> bool {
    match final_codomain(&s.body) {
        MonoType::Record(fs) => event_fields(fs),
        MonoType::Var(v) => {
            let kind = s.prefix.iter().find(|(w, _)| w == v).map(|(_, k)| k).or_else(|| k.get(v));
            matches!(kind, Some(Kind::Record(fs)) if event_fields(fs))
        }
        _ => false,
    }
}

pub fn is_event_scheme(s: &PolyType) -> bool {
    is_event_scheme_under(&KindingEnv::new(), s)
}
