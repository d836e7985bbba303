//! Runs an event processing agent over a stream of NDJSON events.
//!
//! Each input line is one JSON object of scalars. It becomes a record value
//! whose ground type is checked against the agent's domain before the agent
//! is applied. Three run styles are supported:
//!
//! * unary: the agent maps each event to an output event;
//! * fold: with an initial accumulator, the agent is folded left over the
//!   stream (`acc -> event -> acc`) and the final accumulator is emitted;
//! * batch: an agent over `List` receives all admitted events at once.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::Serialize;
use serde_json::{Map, Number, Value as Json};

use crate::eval::{self, EvalError};
use crate::events::prelude::{CONS, NIL};
use crate::events::{agent_shape, AgentError, AgentShape};
use crate::infer::{self, unify, Options, TypeError, UnifyFailure};
use crate::term::{Literal, Term};
use crate::types::{BaseType, Kind, KindingEnv, MonoType};

/// One decoded input line.
#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    /// Position in the input stream, from 0.
    pub index: usize,
    pub payload: Map<String, Json>,
}

impl EventRecord {
    pub fn parse(index: usize, line: &str) -> Result<Self, HarnessError> {
        match serde_json::from_str(line) {
            Ok(Json::Object(payload)) => Ok(EventRecord { index, payload }),
            Ok(_) => Err(HarnessError::BadEvent("an event must be a JSON object".into())),
            Err(e) => Err(HarnessError::BadEvent(e.to_string())),
        }
    }
}

/// How JSON numbers become EVL literals. By default a number written without
/// a fraction or exponent is an `Int` and anything else a `Float`; per-label
/// overrides force one or the other.
#[derive(Clone, Debug, Default)]
pub struct NumberPolicy {
    pub overrides: BTreeMap<String, BaseType>,
}

impl NumberPolicy {
    pub fn with(mut self, label: impl Into<String>, ty: BaseType) -> Self {
        self.overrides.insert(label.into(), ty);
        self
    }

    fn literal(&self, label: &str, n: &Number) -> Result<Literal, HarnessError> {
        let bad = || HarnessError::BadEvent(format!("`{label}`: {n} does not fit its number type"));
        match self.overrides.get(label) {
            Some(BaseType::Float) => n.as_f64().map(Literal::Float).ok_or_else(bad),
            Some(BaseType::Int) => n.as_i64().map(Literal::Int).ok_or_else(bad),
            Some(other) => Err(HarnessError::BadEvent(format!("`{label}`: a number cannot be read as {other}"))),
            None => match n.as_i64() {
                Some(i) => Ok(Literal::Int(i)),
                None => n.as_f64().map(Literal::Float).ok_or_else(bad),
            },
        }
    }
}

/// The record value for an event and its ground record type.
pub fn json_to_value(e: &EventRecord, policy: &NumberPolicy) -> Result<(Term, MonoType), HarnessError> {
    if e.payload.is_empty() {
        return Err(HarnessError::BadEvent("empty event".into()));
    }
    let mut fields = Vec::new();
    let mut types = BTreeMap::new();
    for (label, v) in &e.payload {
        let lit = match v {
            Json::String(s) => Literal::Str(s.clone()),
            Json::Bool(b) => Literal::Bool(*b),
            Json::Number(n) => policy.literal(label, n)?,
            Json::Null => return Err(HarnessError::BadEvent(format!("`{label}` is null"))),
            Json::Array(_) | Json::Object(_) => {
                return Err(HarnessError::BadEvent(format!("`{label}` is not a scalar; events are flat")))
            }
        };
        types.insert(label.clone(), MonoType::Base(lit.base_type()));
        fields.push((label.clone(), Term::Const(lit)));
    }
    Ok((Term::Record(fields), MonoType::Record(types)))
}

/// JSON for a result value: records become objects and lists arrays.
pub fn value_to_json(t: &Term) -> Result<Json, HarnessError> {
    let unrepresentable = || HarnessError::Unrepresentable(t.to_string());
    Ok(match t {
        Term::Const(Literal::Bool(b)) => Json::Bool(*b),
        Term::Const(Literal::Int(i)) => Json::from(*i),
        Term::Const(Literal::Float(x)) => Number::from_f64(*x).map(Json::Number).ok_or_else(unrepresentable)?,
        Term::Const(Literal::Str(s)) => Json::String(s.clone()),
        Term::Record(fs) => {
            let mut out = Map::new();
            for (l, v) in fs {
                out.insert(l.clone(), value_to_json(v)?);
            }
            Json::Object(out)
        }
        Term::Var(x) if x == NIL => Json::Array(Vec::new()),
        _ => {
            let mut items = Vec::new();
            let mut cur = t;
            loop {
                match cur {
                    Term::Var(x) if x == NIL => break,
                    Term::App(f, tail) => match &**f {
                        Term::App(c, head) if matches!(&**c, Term::Var(x) if x == CONS) => {
                            items.push(value_to_json(head)?);
                            cur = tail;
                        }
                        _ => return Err(unrepresentable()),
                    },
                    _ => return Err(unrepresentable()),
                }
            }
            Json::Array(items)
        }
    })
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("bad event: {0}")]
    BadEvent(String),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("the agent does not accept `{event}`: it needs label(s) {}", .missing.join(", "))]
    MissingLabels { event: MonoType, missing: Vec<String> },
    #[error("the agent does not accept `{event}`: expected `{expected}`")]
    KindMismatch { event: MonoType, expected: MonoType },
    #[error("{0}")]
    Setup(String),
    #[error("initial accumulator: {0}")]
    Init(TypeError),
    #[error("event {index}: {error}")]
    Eval { index: usize, error: EvalError },
    #[error("result `{0}` has no JSON form")]
    Unrepresentable(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// How the agent is driven.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Style {
    Unary,
    Fold,
    Batch,
}

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub opts: Options,
    pub fuel: u64,
    pub numbers: NumberPolicy,
    /// Initial accumulator; makes a two-argument agent a fold.
    pub init: Option<Term>,
    /// Skip bad or stuck events instead of stopping.
    pub skip_bad: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            opts: Options::default(),
            fuel: eval::DEFAULT_FUEL,
            numbers: NumberPolicy::default(),
            init: None,
            skip_bad: false,
        }
    }
}

/// A type-checked agent ready to run.
#[derive(Clone, Debug)]
pub struct Agent {
    pub shape: AgentShape,
    pub style: Style,
    /// The term applied to events; may differ from the typed term, e.g. when
    /// registry constructors are bound around it.
    pub runtime: Term,
    /// The domain events are checked against.
    pub domain: MonoType,
}

impl Agent {
    pub fn new(term: &Term, cfg: &HarnessConfig) -> Result<Agent, HarnessError> {
        let shape = agent_shape(term, &cfg.opts)?;
        let (style, domain) = match (&cfg.init, shape.arity()) {
            (Some(init), n) if n >= 2 => {
                // The accumulator must fit the first argument.
                infer::principal(&Term::app(term.clone(), init.clone()), &cfg.opts).map_err(HarnessError::Init)?;
                (Style::Fold, shape.inputs[1].clone())
            }
            (Some(_), _) => return Err(HarnessError::Setup("a fold agent takes an accumulator and an event".into())),
            (None, 1) => match sequence_element(&shape) {
                Some(elem) => (Style::Batch, elem),
                None => (Style::Unary, shape.inputs[0].clone()),
            },
            (None, 0) => return Err(HarnessError::Setup(format!("`{}` takes no events", shape.scheme))),
            (None, n) => {
                return Err(HarnessError::Setup(format!(
                    "the agent takes {n} arguments; give an initial accumulator to fold it"
                )))
            }
        };
        Ok(Agent { shape, style, runtime: term.clone(), domain })
    }

    /// Per-event admission: the event's ground type must unify with the
    /// agent's domain under the scheme's kinds.
    pub fn accepts(&self, event: &MonoType) -> Result<(), HarnessError> {
        let k: KindingEnv = self.shape.scheme.prefix.iter().cloned().collect();
        match unify(&k, vec![(self.domain.clone(), event.clone())]) {
            Ok(_) => Ok(()),
            Err(e) => Err(match e.failure {
                UnifyFailure::MissingLabels(missing) => HarnessError::MissingLabels { event: event.clone(), missing },
                _ => HarnessError::KindMismatch { event: event.clone(), expected: self.domain.clone() },
            }),
        }
    }
}

/// The element type when the agent's argument is a sequence: a `List`, or a
/// variable only ever used through `empty`, `head` and `tail`.
fn sequence_element(shape: &AgentShape) -> Option<MonoType> {
    match &shape.inputs[0] {
        MonoType::List(elem) => Some((**elem).clone()),
        MonoType::Var(v) => {
            let (_, Kind::Record(fs)) = shape.scheme.prefix.iter().find(|(w, _)| w == v)? else { return None };
            let is_list = fs.keys().all(|l| ["empty", "head", "tail"].contains(&l.as_str())) && fs.contains_key("head");
            is_list.then(|| fs["head"].clone())
        }
        _ => None,
    }
}

/// Type-checks `agent` and admits events of type `sample`.
pub fn admit(agent: &Term, sample: &MonoType, cfg: &HarnessConfig) -> Result<Agent, HarnessError> {
    let a = Agent::new(agent, cfg)?;
    a.accepts(sample)?;
    Ok(a)
}

/// Counts for a finished run. For unary agents `in = out + skipped + stuck`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    #[serde(rename = "in")]
    pub input: usize,
    pub out: usize,
    pub skipped: usize,
    /// Evaluations that got stuck or ran out of fuel.
    pub stuck: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain counts")
    }
}

/// Reads NDJSON events from `input` and writes derived events to `output`.
/// Problems with single events go to `on_issue` when `skip_bad` is set and
/// end the run otherwise.
pub fn run_stream(
    agent: &Agent,
    input: impl BufRead,
    mut output: impl Write,
    cfg: &HarnessConfig,
    mut on_issue: impl FnMut(&HarnessError),
) -> Result<Report, HarnessError> {
    let mut report = Report::default();
    let mut acc = cfg.init.clone();
    let mut batch = Vec::new();
    let mut index = 0;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        report.input += 1;
        let admitted = EventRecord::parse(index, &line)
            .and_then(|e| json_to_value(&e, &cfg.numbers))
            .and_then(|(v, ty)| agent.accepts(&ty).map(|()| v));
        index += 1;
        let value = match admitted {
            Ok(v) => v,
            Err(e) if cfg.skip_bad => {
                on_issue(&e);
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match agent.style {
            Style::Batch => batch.push(value),
            Style::Unary | Style::Fold => {
                let args = match &acc {
                    Some(a) if agent.style == Style::Fold => vec![a.clone(), value],
                    _ => vec![value],
                };
                match apply(agent, args, cfg.fuel, index - 1) {
                    Ok(v) if agent.style == Style::Fold => acc = Some(v),
                    Ok(v) => match emit(&mut output, &v) {
                        Ok(()) => report.out += 1,
                        Err(e) => fail(e, cfg, &mut report, &mut on_issue)?,
                    },
                    Err(e) => fail(e, cfg, &mut report, &mut on_issue)?,
                }
            }
        }
    }
    let last = index.saturating_sub(1);
    let result = match agent.style {
        Style::Unary => None,
        Style::Fold => acc.filter(|_| report.input > report.skipped + report.stuck).map(Ok),
        Style::Batch => {
            let list =
                batch.into_iter().rev().fold(Term::var(NIL), |tail, head| Term::apps(Term::var(CONS), [head, tail]));
            Some(apply(agent, vec![list], cfg.fuel, last))
        }
    };
    match result.map(|r| r.and_then(|v| emit(&mut output, &v))) {
        Some(Ok(())) => report.out += 1,
        Some(Err(e)) => fail(e, cfg, &mut report, &mut on_issue)?,
        None => {}
    }
    output.flush()?;
    Ok(report)
}

fn apply(agent: &Agent, args: Vec<Term>, fuel: u64, index: usize) -> Result<Term, HarnessError> {
    let t = Term::apps(agent.runtime.clone(), args);
    eval::run(&t, fuel).map(|r| r.value).map_err(|error| HarnessError::Eval { index, error })
}

fn emit(output: &mut impl Write, v: &Term) -> Result<(), HarnessError> {
    let json = value_to_json(v)?;
    writeln!(output, "{json}")?;
    Ok(())
}

/// Counts a stuck or unprintable result, or stops the run.
fn fail(
    e: HarnessError,
    cfg: &HarnessConfig,
    report: &mut Report,
    on_issue: &mut impl FnMut(&HarnessError),
) -> Result<(), HarnessError> {
    if !cfg.skip_bad {
        return Err(e);
    }
    on_issue(&e);
    report.stuck += 1;
    Ok(())
}
