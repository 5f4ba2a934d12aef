use std::collections::BTreeMap;

use thiserror::Error;

use crate::lang::lexer::is_identifier;
use crate::lang::{ComAst, ExpAst};
use crate::templating::{ContentStore, PersonalizationContext};
use crate::value::{Literal, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("content paths {} all mangle to `{identifier}`", paths.join(", "))]
    IdentifierCollision { identifier: String, paths: Vec<String> },
    #[error("content path `{0}` does not mangle to a legal identifier")]
    IllegalIdentifier(String),
    #[error("no variant of `{0}` matches the context")]
    NoVariant(String),
}

/// Turns a content path into a program identifier: `/` becomes `_`, other
/// characters outside `[A-Za-z0-9_]` are dropped, and a leading digit gets a
/// `_` prefix. `None` if the result is empty or a reserved word.
pub fn mangle(path: &str) -> Option<String> {
    let mut out: String = path
        .chars()
        .filter_map(|c| match c {
            '/' => Some('_'),
            c if c.is_ascii_alphanumeric() || c == '_' => Some(c),
            _ => None,
        })
        .collect();
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    is_identifier(&out).then_some(out)
}

/// Literal form of a resolved payload, when the concrete syntax can carry
/// it. Lists, records and markup containing the raw-block terminator are
/// loaded through `content(...)` instead.
fn literal_of(v: &Value) -> Option<Literal> {
    match v {
        Value::Markup(m) if m.contains(">>>") => None,
        other => other.as_literal(),
    }
}

/// A program that assigns every content object, resolved for `ctx`, to its
/// mangled path, in path order.
pub fn emit_load_program(store: &ContentStore, ctx: &PersonalizationContext) -> Result<ComAst, LoadError> {
    let mut by_ident: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for obj in store.iter() {
        let ident = mangle(&obj.path).ok_or_else(|| LoadError::IllegalIdentifier(obj.path.clone()))?;
        by_ident.entry(ident).or_default().push(obj.path.clone());
    }
    if let Some((identifier, paths)) = by_ident.into_iter().find(|(_, p)| p.len() > 1) {
        return Err(LoadError::IdentifierCollision { identifier, paths });
    }

    let mut commands = Vec::with_capacity(store.len());
    for obj in store.iter() {
        let value = obj.resolve(ctx).map_err(|_| LoadError::NoVariant(obj.path.clone()))?;
        let exp = match literal_of(value) {
            Some(lit) => ExpAst::lit(lit),
            None => ExpAst::content(&obj.path),
        };
        commands.push(ComAst::assign(mangle(&obj.path).expect("checked above"), exp));
    }
    Ok(ComAst::seq(commands))
}
