use indexmap::IndexMap;

use super::ast::ComAst;
use super::lexer::{tokenize, Keyword, Punct, TokenKind};
use super::parser::{parse_commands, parse_type, Cursor};
use super::{LangError, Pos};
use crate::templating::{holes, PersonalizationContext, Template};
use crate::value::Literal;

/// Parses a `.amt` file:
/// `template "<name>" { slot <n> : <Type>; ... skeleton <<< ... >>> }`.
pub fn parse_template(source: &str) -> Result<Template, LangError> {
    let toks = tokenize(source)?;
    let mut cur = Cursor::new(&toks);
    cur.expect_word("template")?;
    let (name, _) = cur.expect_string()?;
    cur.expect_punct(Punct::LBrace)?;
    let mut slots = IndexMap::new();
    while cur.is_word("slot") {
        cur.bump();
        let (slot, pos) = cur.expect_ident()?;
        if slots.contains_key(&slot) {
            return Err(LangError::custom(pos, format!("distinct slot name (`{slot}` repeats)")));
        }
        cur.expect_punct(Punct::Colon)?;
        let ty = parse_type(&mut cur)?;
        cur.expect_punct(Punct::Semi)?;
        slots.insert(slot, ty);
    }
    cur.expect_word("skeleton")?;
    let (skeleton, skeleton_pos, skeleton_offset) = match cur.peek() {
        Some(tok) => match &tok.kind {
            TokenKind::Literal(Literal::Markup(m)) => (m.clone(), tok.pos, tok.offset),
            _ => return Err(cur.error(&["`<<<` skeleton block"]).into()),
        },
        None => return Err(cur.error(&["`<<<` skeleton block"]).into()),
    };
    cur.bump();
    cur.eat_punct(Punct::Semi);
    cur.expect_punct(Punct::RBrace)?;
    cur.expect_end()?;

    // positions inside the skeleton, relative to the whole file
    let body_offset = skeleton_offset + 3;
    let locate = |rel: usize| offset_to_pos(source, body_offset + rel, skeleton_pos);
    for hole in holes(&skeleton).map_err(|rel| LangError::custom(locate(rel), "well-formed `{{name}}` hole"))? {
        if !slots.contains_key(hole.name) {
            return Err(LangError::UndeclaredHole {
                name: hole.name.to_string(),
                pos: locate(hole.offset),
            });
        }
    }
    Ok(Template { name, slots, skeleton })
}

fn offset_to_pos(source: &str, offset: usize, fallback: Pos) -> Pos {
    let Some(prefix) = source.get(..offset) else {
        return fallback;
    };
    let line = prefix.matches('\n').count() as u32 + 1;
    let col = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
    Pos::new(line, col)
}

/// A parsed `.amp` file: the program that fills the named template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub template: String,
    pub program: ComAst,
}

/// Parses `bind "<template>" { <program> }`.
pub fn parse_binding(source: &str) -> Result<Binding, LangError> {
    let toks = tokenize(source)?;
    let mut cur = Cursor::new(&toks);
    cur.expect_keyword(Keyword::Bind)?;
    let (template, _) = cur.expect_string()?;
    cur.expect_punct(Punct::LBrace)?;
    let program = parse_commands(&mut cur, |c| c.is_punct(Punct::RBrace))?;
    cur.expect_punct(Punct::RBrace)?;
    cur.expect_end()?;
    Ok(Binding { template, program })
}

/// Parses a `.ctx` file of `p = <status>` / `s.<k> = <v>` / `v.<k> = <v>` /
/// `e.<k> = <v>` lines. Blank lines and lines starting with `#` are skipped.
pub fn parse_context(source: &str) -> Result<PersonalizationContext, LangError> {
    let mut ctx = PersonalizationContext::default();
    let mut seen_status = false;
    for (key, value, pos) in key_value_lines(source)? {
        let duplicate = || LangError::DuplicateKey { key: key.clone(), pos };
        if key == "p" {
            if seen_status {
                return Err(duplicate());
            }
            seen_status = true;
            ctx.status = value;
            continue;
        }
        let (axis, name) = key
            .split_once('.')
            .filter(|(_, name)| !name.is_empty())
            .ok_or_else(|| LangError::custom(pos, "key `p`, `s.<k>`, `v.<k>` or `e.<k>`"))?;
        let map = match axis {
            "s" => &mut ctx.prefs,
            "v" => &mut ctx.client,
            "e" => &mut ctx.device,
            _ => return Err(LangError::custom(pos, "key `p`, `s.<k>`, `v.<k>` or `e.<k>`")),
        };
        if map.insert(name.to_string(), value).is_some() {
            return Err(duplicate());
        }
    }
    Ok(ctx)
}

/// Splits line-oriented `key = value` text. Keys and values are trimmed and
/// must be non-empty; keys may not contain whitespace.
pub(crate) fn key_value_lines(source: &str) -> Result<Vec<(String, String, Pos)>, LangError> {
    let mut out = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let col = (raw.len() - raw.trim_start().len()) as u32 + 1;
        let pos = Pos::new(idx as u32 + 1, col);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| LangError::custom(pos, "`key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(LangError::custom(pos, "non-empty key without whitespace"));
        }
        if value.is_empty() {
            return Err(LangError::custom(pos, format!("value for `{key}`")));
        }
        out.push((key.to_string(), value.to_string(), pos));
    }
    Ok(out)
}
