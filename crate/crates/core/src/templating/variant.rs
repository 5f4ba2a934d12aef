use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::value::Value;

/// The four parameter axes content selection depends on: registration
/// status `p`, personal preferences `s`, client interface `v` and access
/// device `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersonalizationContext {
    pub status: String,
    pub prefs: BTreeMap<String, String>,
    pub client: BTreeMap<String, String>,
    pub device: BTreeMap<String, String>,
}

impl Default for PersonalizationContext {
    fn default() -> Self {
        PersonalizationContext {
            status: "anonymous".to_string(),
            prefs: BTreeMap::new(),
            client: BTreeMap::new(),
            device: BTreeMap::new(),
        }
    }
}

impl PersonalizationContext {
    pub fn with_status(status: impl Into<String>) -> Self {
        PersonalizationContext { status: status.into(), ..Self::default() }
    }

    /// Canonical `key = value` text; parses back to an equal context.
    pub fn canonical(&self) -> String {
        let mut out = format!("p = {}\n", self.status);
        for (axis, map) in [("s", &self.prefs), ("v", &self.client), ("e", &self.device)] {
            for (k, v) in map {
                out.push_str(&format!("{axis}.{k} = {v}\n"));
            }
        }
        out
    }

    /// Short stable digest of [`canonical`](Self::canonical).
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn lookup(&self, axis: Axis, key: &str) -> Option<&str> {
        let map = match axis {
            Axis::Prefs => &self.prefs,
            Axis::Client => &self.client,
            Axis::Device => &self.device,
        };
        map.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Prefs,
    Client,
    Device,
}

impl Axis {
    fn prefix(self) -> &'static str {
        match self {
            Axis::Prefs => "s",
            Axis::Client => "v",
            Axis::Device => "e",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GuardAtom {
    Status(String),
    Key { axis: Axis, key: String, value: String },
}

impl GuardAtom {
    fn key(&self) -> String {
        match self {
            GuardAtom::Status(_) => "p".to_string(),
            GuardAtom::Key { axis, key, .. } => format!("{}.{key}", axis.prefix()),
        }
    }

    fn holds(&self, ctx: &PersonalizationContext) -> bool {
        match self {
            GuardAtom::Status(s) => ctx.status == *s,
            GuardAtom::Key { axis, key, value } => ctx.lookup(*axis, key) == Some(value.as_str()),
        }
    }
}

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardAtom::Status(s) => write!(f, "p={s}"),
            GuardAtom::Key { value, .. } => write!(f, "{}={value}", self.key()),
        }
    }
}

/// A conjunction of atomic conditions, or the catch-all `default`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Guard {
    Default,
    All(Vec<GuardAtom>),
}

impl Guard {
    /// Parses `p=registered & s.lang=en` or `default`.
    pub fn parse(text: &str) -> Result<Guard, String> {
        let text = text.trim();
        if text == "default" {
            return Ok(Guard::Default);
        }
        let mut atoms: Vec<GuardAtom> = Vec::new();
        for part in text.split('&') {
            let (key, value) = part
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("guard condition `{}` is not `key=value`", part.trim()))?;
            if value.is_empty() || value.contains(char::is_whitespace) {
                return Err(format!("guard condition `{key}` needs a value without spaces"));
            }
            let atom = if key == "p" {
                GuardAtom::Status(value.to_string())
            } else {
                let (prefix, name) = key
                    .split_once('.')
                    .filter(|(_, n)| !n.is_empty() && !n.contains(char::is_whitespace))
                    .ok_or_else(|| format!("unknown guard key `{key}`"))?;
                let axis = match prefix {
                    "s" => Axis::Prefs,
                    "v" => Axis::Client,
                    "e" => Axis::Device,
                    _ => return Err(format!("unknown guard key `{key}`")),
                };
                GuardAtom::Key { axis, key: name.to_string(), value: value.to_string() }
            };
            if atoms.iter().any(|a| a.key() == atom.key()) {
                return Err(format!("guard key `{}` repeats", atom.key()));
            }
            atoms.push(atom);
        }
        Ok(Guard::All(atoms))
    }

    /// Number of satisfied conditions when the guard holds as a whole;
    /// `default` holds with score 0.
    pub fn score(&self, ctx: &PersonalizationContext) -> Option<usize> {
        match self {
            Guard::Default => Some(0),
            Guard::All(atoms) => atoms.iter().all(|a| a.holds(ctx)).then_some(atoms.len()),
        }
    }

    /// Context keys (`p`, `s.lang`, ...) the guard inspects.
    pub fn keys(&self) -> Vec<String> {
        match self {
            Guard::Default => vec![],
            Guard::All(atoms) => atoms.iter().map(GuardAtom::key).collect(),
        }
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Default => f.write_str("default"),
            Guard::All(atoms) => {
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no variant of the content object matches the context")]
pub struct NoVariant;

/// Picks the payload whose guard holds with the most satisfied conditions;
/// ties go to the earliest declaration.
pub fn select<'v>(
    variants: &'v [(Guard, Value)],
    ctx: &PersonalizationContext,
) -> Result<&'v Value, NoVariant> {
    let mut best: Option<(usize, &Value)> = None;
    for (guard, payload) in variants {
        if let Some(score) = guard.score(ctx) {
            if best.is_none_or(|(top, _)| score > top) {
                best = Some((score, payload));
            }
        }
    }
    best.map(|(_, v)| v).ok_or(NoVariant)
}
