//! Templates with typed slots, the content store, personalization and page
//! rendering.

use indexmap::IndexMap;

use crate::lang::{ComAst, Pos};
use crate::machine::{self, Env, ErrorKind, MachineError, MachineState, Memory};
use crate::value::ContentType;

mod store;
mod variant;

pub use store::{load_store, parse_content, resolve_variant, ContentObject, ContentStore, StoreError};
pub use variant::{select, Axis, Guard, GuardAtom, NoVariant, PersonalizationContext};

/// A page template: typed slots plus a markup skeleton with `{{name}}` holes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub slots: IndexMap<String, ContentType>,
    pub skeleton: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Hole<'a> {
    pub name: &'a str,
    /// Byte offset of the opening `{{`.
    pub offset: usize,
}

impl Hole<'_> {
    fn len(&self) -> usize {
        self.name.len() + 4
    }
}

/// Finds the `{{name}}` holes of `skeleton`. Any other use of `{{` is an
/// error, reported as the byte offset of the bad `{{`.
pub(crate) fn holes(skeleton: &str) -> Result<Vec<Hole<'_>>, usize> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(rel) = skeleton[from..].find("{{") {
        let offset = from + rel;
        let rest = &skeleton[offset + 2..];
        let close = rest.find("}}").ok_or(offset)?;
        let name = &rest[..close];
        if !crate::lang::lexer::is_identifier(name) {
            return Err(offset);
        }
        out.push(Hole { name, offset });
        from = offset + 2 + close + 2;
    }
    Ok(out)
}

/// A rendered page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    pub markup: String,
    pub template: String,
    /// Fingerprint of the personalization context, when rendered through
    /// [`render_page`].
    pub context_fingerprint: Option<String>,
}

/// Runs `program` with empty input, checking every assignment to a slot
/// against the slot's declared type. Non-slot identifiers act as scratch
/// variables.
pub fn bind_template(
    t: &Template,
    program: &ComAst,
    store: &ContentStore,
    ctx: &PersonalizationContext,
) -> Result<Memory, MachineError> {
    let env = Env::new(store, ctx).with_slots(&t.slots);
    machine::run(program, [], &env).map(|s| s.memory)
}

/// Fills every hole of `t` from `m`. Every slot must be bound to a value of
/// its declared type, whether or not the skeleton uses it.
pub fn render(t: &Template, m: &Memory) -> Result<Page, MachineError> {
    let fail = |kind, name: &str, detail: String| {
        let state = MachineState { memory: m.clone(), ..MachineState::default() };
        MachineError::new(kind, name, detail, Pos::default(), state)
    };
    let mut filled: IndexMap<&str, String> = IndexMap::new();
    for (name, ty) in &t.slots {
        let v = m
            .get(name)
            .ok_or_else(|| fail(ErrorKind::UnboundIdentifier, name, "slot is unbound".into()))?;
        if v.tag() != *ty {
            return Err(fail(
                ErrorKind::TypeIncompatibility,
                name,
                format!("slot type {ty}, value type {}", v.tag()),
            ));
        }
        let text = v.render_text();
        if text.contains("{{") {
            return Err(fail(ErrorKind::ResidualHole, name, "value contains `{{`".into()));
        }
        filled.insert(name, text);
    }

    let hole_list = holes(&t.skeleton).map_err(|offset| {
        fail(ErrorKind::ResidualHole, &t.name, format!("malformed hole at byte {offset}"))
    })?;
    let mut markup = String::with_capacity(t.skeleton.len());
    let mut last = 0;
    for hole in hole_list {
        markup.push_str(&t.skeleton[last..hole.offset]);
        let text = filled
            .get(hole.name)
            .ok_or_else(|| fail(ErrorKind::UnboundIdentifier, hole.name, "hole has no slot".into()))?;
        markup.push_str(text);
        last = hole.offset + hole.len();
    }
    markup.push_str(&t.skeleton[last..]);
    if markup.contains("{{") {
        return Err(fail(ErrorKind::ResidualHole, &t.name, "page contains `{{`".into()));
    }
    Ok(Page { markup, template: t.name.clone(), context_fingerprint: None })
}

/// Binds and renders in one go, stamping the page with the context
/// fingerprint.
pub fn render_page(
    t: &Template,
    program: &ComAst,
    store: &ContentStore,
    ctx: &PersonalizationContext,
) -> Result<Page, MachineError> {
    let memory = bind_template(t, program, store, ctx)?;
    let mut page = render(t, &memory)?;
    page.context_fingerprint = Some(ctx.fingerprint());
    Ok(page)
}
