//! The event layer: generic and specific events, agent classification, the
//! recursive CEP library, an event registry, and relations between schemes.

pub mod prelude;
pub mod relations;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

pub use relations::{
    codomain_scheme, generalization, ground_instances, instantiates, membership, membership_witness, specialization,
};

use crate::infer::{self, final_codomain, generic_instance, is_event_scheme, Options, TypeError};
use crate::syntax::{parse, parse_scheme};
use crate::term::Term;
use crate::types::{KindingEnv, MonoType, PolyType, TypingEnv};
use crate::Mode;

/// A named event constructor with its event scheme.
#[derive(Clone, Debug)]
pub struct GenericEvent {
    pub name: String,
    pub scheme: PolyType,
    pub definition: Term,
}

/// A ground event: a record value together with its ground record type.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecificEvent {
    pub value: Term,
    pub ty: MonoType,
}

impl SpecificEvent {
    /// `⊢ e :: ge`.
    pub fn instantiates(&self, ge: &GenericEvent) -> bool {
        instantiates(&KindingEnv::new(), &self.ty, &ge.scheme)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EventError {
    #[error("event names start with a capital letter: `{0}`")]
    BadName(String),
    #[error("`{name}`: {source}")]
    Parse { name: String, source: crate::syntax::Diagnostic },
    #[error("`{name}`: {source}")]
    Type { name: String, source: Box<TypeError> },
    #[error("`{name}` has type `{scheme}`, which is not an event type")]
    NotAnEvent { name: String, scheme: PolyType },
    #[error("`{name}`: declared type `{declared}` is not an instance of `{principal}`")]
    NotAnInstance { name: String, declared: Box<PolyType>, principal: Box<PolyType> },
    #[error("cannot read registry: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad registry: {0}")]
    Toml(#[from] toml::de::Error),
}

impl GenericEvent {
    /// Types a constructor term. A declared scheme, when given, must be a
    /// generic instance of the principal one and is used instead of it.
    pub fn new(name: &str, definition: Term, declared: Option<PolyType>, opts: &Options) -> Result<Self, EventError> {
        if !name.starts_with(|c: char| c.is_uppercase()) {
            return Err(EventError::BadName(name.to_string()));
        }
        let principal = infer::principal_scheme(&definition, opts)
            .map_err(|source| EventError::Type { name: name.to_string(), source: Box::new(source) })?;
        let scheme = match declared {
            Some(d) => {
                if !generic_instance(&KindingEnv::new(), &principal, &d) {
                    return Err(EventError::NotAnInstance {
                        name: name.to_string(),
                        declared: Box::new(d),
                        principal: Box::new(principal),
                    });
                }
                d
            }
            None => principal,
        };
        if !is_event_scheme(&scheme) {
            return Err(EventError::NotAnEvent { name: name.to_string(), scheme });
        }
        Ok(GenericEvent { name: name.to_string(), scheme, definition })
    }
}

/// Event constructors loaded from a TOML file:
///
/// ```toml
/// [events.FireDanger]
/// term = "λl d. {location = l, fire_danger = d}"
/// type = "String -> String -> {fire_danger: String, location: String}"   # optional
/// ```
#[derive(Clone, Debug, Default)]
pub struct Registry {
    pub events: Vec<GenericEvent>,
}

#[derive(serde::Deserialize)]
struct RegistryFile {
    #[serde(default)]
    events: BTreeMap<String, RegistryEntry>,
}

#[derive(serde::Deserialize)]
struct RegistryEntry {
    term: String,
    #[serde(rename = "type")]
    ty: Option<String>,
}

impl Registry {
    pub fn from_toml(text: &str, mode: Mode) -> Result<Self, EventError> {
        let file: RegistryFile = toml::from_str(text)?;
        let opts = Options::new(mode);
        let mut events = Vec::new();
        for (name, entry) in file.events {
            let definition =
                parse(&entry.term, mode).map_err(|source| EventError::Parse { name: name.clone(), source })?;
            let declared = entry
                .ty
                .map(|t| parse_scheme(&t).map_err(|source| EventError::Parse { name: name.clone(), source }))
                .transpose()?;
            events.push(GenericEvent::new(&name, definition, declared, &opts)?);
        }
        Ok(Registry { events })
    }

    pub fn load(path: &Path, mode: Mode) -> Result<Self, EventError> {
        Registry::from_toml(&std::fs::read_to_string(path)?, mode)
    }

    /// The constructors' schemes, for typing programs that use them.
    pub fn typing_env(&self) -> TypingEnv {
        self.events.iter().map(|e| (e.name.clone(), e.scheme.clone())).collect()
    }

    /// Binds every constructor around `body` with `letEv`, for evaluation.
    pub fn wrap(&self, body: Term) -> Term {
        self.events.iter().rev().fold(body, |acc, e| Term::let_ev(e.name.clone(), e.definition.clone(), acc))
    }

    pub fn get(&self, name: &str) -> Option<&GenericEvent> {
        self.events.iter().find(|e| e.name == name)
    }
}

/// Shape of an event processing agent's principal scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentShape {
    pub scheme: PolyType,
    /// Argument types, outermost first.
    pub inputs: Vec<MonoType>,
    pub output: MonoType,
}

impl AgentShape {
    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    /// Whether the agent takes a whole sequence of events.
    pub fn takes_sequence(&self) -> bool {
        matches!(self.inputs.first(), Some(MonoType::List(_)))
    }

    /// Whether the single input and the output have the same type, as with
    /// translate agents that rewrite fields in place.
    pub fn preserves_input(&self) -> bool {
        self.inputs.len() == 1 && self.inputs[0] == self.output
    }
}

impl fmt::Display for AgentShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scheme)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("not an event processing agent: `{0}` does not produce an event")]
    NotAnAgent(PolyType),
}

/// Types `m` and checks that its principal scheme has event shape.
pub fn agent_shape(m: &Term, opts: &Options) -> Result<AgentShape, AgentError> {
    let scheme = infer::principal_scheme(m, opts)?;
    if !is_event_scheme(&scheme) {
        return Err(AgentError::NotAnAgent(scheme));
    }
    let mut inputs = Vec::new();
    let mut t = &scheme.body;
    while let MonoType::Arrow(a, b) = t {
        inputs.push((**a).clone());
        t = b;
    }
    let output = final_codomain(&scheme.body).clone();
    Ok(AgentShape { scheme, inputs, output })
}

/// An event processing agent is a term whose principal scheme is an event
/// type. A result that is a record-kinded variable counts too, so agents that
/// hand back their (modified) input qualify.
pub fn is_epa(m: &Term, opts: &Options) -> bool {
    agent_shape(m, opts).is_ok()
}

/// The recursive sequence combinators, as `letrec` bindings around a body.
pub const LIBRARY: &str = "\
letrec filter p list = if list.empty then list
                       else if p list.head
                            then cons list.head (filter p list.tail)
                            else filter p list.tail in
letrec transform f list = if list.empty then list
                          else cons (f list.head) (transform f list.tail) in
letrec aggregater f z list = if list.empty then z
                             else f list.head (aggregater f z list.tail) in
letrec aggregatel f z list = if list.empty then z
                             else aggregatel f (f z list.head) list.tail in
";

/// `body` with the library in scope. Needs extended mode.
pub fn with_library(body: &str) -> String {
    format!("{LIBRARY}{body}")
}
