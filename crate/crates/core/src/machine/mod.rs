//! The content-management abstract machine.
//!
//! A machine state is `Memory × Input × Output`. Programs are given meaning
//! twice: by a direct denotational evaluator ([`eval_expr`], [`exec_com`],
//! [`run`]) and by a small-step machine ([`step`], [`run_small_step`]) whose
//! transitions enumerate the work cycle one frame at a time. The two must
//! agree on every program.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::lang::Pos;
use crate::templating::{ContentStore, PersonalizationContext};
use crate::value::{ContentType, Value};

mod denot;
mod small_step;

pub use denot::{eval_expr, exec_com, run};
pub use small_step::{run_small_step, step, trace, Frame, MachineConfig, Rule, Step, TraceLine};

/// Result of looking an identifier up in memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding<'a> {
    Bound(&'a Value),
    Unbound,
}

/// `Ide → Value + {unbound}`; identifiers absent from the map are unbound.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Memory(BTreeMap<String, Value>);

impl Memory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, ide: &str) -> Binding<'_> {
        match self.0.get(ide) {
            Some(v) => Binding::Bound(v),
            None => Binding::Unbound,
        }
    }

    pub fn get(&self, ide: &str) -> Option<&Value> {
        self.0.get(ide)
    }

    /// Substitution `m[v/I]`: rebinds `ide`, leaving every other identifier.
    pub fn substitute(mut self, ide: impl Into<String>, v: Value) -> Self {
        self.0.insert(ide.into(), v);
        self
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl FromIterator<(String, Value)> for Memory {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        Memory(iter.into_iter().collect())
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MachineState {
    pub memory: Memory,
    /// Consumed from the front by `read()`.
    pub input: VecDeque<Value>,
    /// Appended to by `emit`; never shrinks.
    pub output: Vec<Value>,
}

impl MachineState {
    pub fn with_input(input: impl IntoIterator<Item = Value>) -> Self {
        MachineState { input: input.into_iter().collect(), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    UnboundIdentifier,
    TypeIncompatibility,
    InputExhausted,
    UnknownContent,
    /// A filled-in value would leave `{{` in a rendered page.
    ResidualHole,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The `{error}` summand, with diagnostics: the offending identifier or
/// path, the source position, and the machine state at failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} `{subject}` at {pos}: {detail}")]
pub struct MachineError {
    pub kind: ErrorKind,
    pub subject: String,
    pub detail: String,
    pub pos: Pos,
    pub state: Box<MachineState>,
}

impl MachineError {
    pub(crate) fn new(
        kind: ErrorKind,
        subject: impl Into<String>,
        detail: impl Into<String>,
        pos: Pos,
        state: MachineState,
    ) -> Self {
        MachineError {
            kind,
            subject: subject.into(),
            detail: detail.into(),
            pos,
            state: Box::new(state),
        }
    }

    pub(crate) fn unbound(name: &str, pos: Pos, state: MachineState) -> Self {
        Self::new(ErrorKind::UnboundIdentifier, name, "identifier is unbound", pos, state)
    }

    pub(crate) fn input_exhausted(pos: Pos, state: MachineState) -> Self {
        Self::new(ErrorKind::InputExhausted, "read()", "input is empty", pos, state)
    }

    pub(crate) fn incomparable(lhs: &Value, rhs: &Value, pos: Pos, state: MachineState) -> Self {
        Self::new(
            ErrorKind::TypeIncompatibility,
            "comparison",
            format!("cannot compare {} with {}", lhs.tag(), rhs.tag()),
            pos,
            state,
        )
    }

    pub(crate) fn non_bool_condition(v: &Value, pos: Pos, state: MachineState) -> Self {
        Self::new(
            ErrorKind::TypeIncompatibility,
            "if",
            format!("condition has type {}, expected Bool", v.tag()),
            pos,
            state,
        )
    }

    pub(crate) fn slot_mismatch(
        name: &str,
        slot_type: &ContentType,
        v: &Value,
        pos: Pos,
        state: MachineState,
    ) -> Self {
        Self::new(
            ErrorKind::TypeIncompatibility,
            name,
            format!("slot type {slot_type}, value type {}", v.tag()),
            pos,
            state,
        )
    }
}

/// Read-only surroundings of a run: the content store, the personalization
/// context, and (when binding a template) the slot types that assignments
/// are checked against.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub store: &'a ContentStore,
    pub ctx: &'a PersonalizationContext,
    pub slots: Option<&'a IndexMap<String, ContentType>>,
}

impl<'a> Env<'a> {
    pub fn new(store: &'a ContentStore, ctx: &'a PersonalizationContext) -> Self {
        Env { store, ctx, slots: None }
    }

    pub fn with_slots(mut self, slots: &'a IndexMap<String, ContentType>) -> Self {
        self.slots = Some(slots);
        self
    }

    /// Resolves `content("path")` through the store's variant selection.
    pub(crate) fn content(&self, path: &str, pos: Pos, state: &MachineState) -> Result<Value, MachineError> {
        let obj = self.store.get(path).ok_or_else(|| {
            MachineError::new(ErrorKind::UnknownContent, path, "no such content object", pos, state.clone())
        })?;
        obj.resolve(self.ctx).cloned().map_err(|_| {
            MachineError::new(
                ErrorKind::UnknownContent,
                path,
                "no variant matches the context",
                pos,
                state.clone(),
            )
        })
    }

    /// The assignment rule `(m, i, o) ↦ (m[v/I], i, o)`, type-checked when
    /// `name` is a slot.
    pub(crate) fn assign(
        &self,
        name: &str,
        v: Value,
        pos: Pos,
        state: MachineState,
    ) -> Result<MachineState, MachineError> {
        if let Some(slot_type) = self.slots.and_then(|s| s.get(name)) {
            if v.tag() != *slot_type {
                return Err(MachineError::slot_mismatch(name, slot_type, &v, pos, state));
            }
        }
        let MachineState { memory, input, output } = state;
        Ok(MachineState { memory: memory.substitute(name, v), input, output })
    }
}

/// Binds `v` to `ide` if its tag matches `slot_type`; an existing binding is
/// overwritten and all other bindings are kept.
pub fn bind_value(m: Memory, slot_type: &ContentType, ide: &str, v: Value) -> Result<Memory, MachineError> {
    if v.tag() != *slot_type {
        let state = MachineState { memory: m, ..MachineState::default() };
        return Err(MachineError::slot_mismatch(ide, slot_type, &v, Pos::default(), state));
    }
    Ok(m.substitute(ide, v))
}

/// Structural equality on same-tagged values; `None` when tags differ.
pub(crate) fn compare(lhs: &Value, rhs: &Value) -> Option<bool> {
    (lhs.tag() == rhs.tag()).then(|| lhs == rhs)
}
