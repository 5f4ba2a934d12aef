//! Text format for domain models.
//!
//! ```text
//! domain pages;
//! concept title over pages : Text fns(value);
//! individual pages.home { title.value = "Home"; }
//! state s0 pages = { home };
//! object front = unique { x in pages | title.value == "Home" } @ s0;
//! ```

use thiserror::Error;

use super::{Concept, DomainModel, Formula, Individual, ModelError, ObjectDecl, StateId};
use crate::lang::lexer::{tokenize, Punct};
use crate::lang::parser::{parse_type, Cursor};
use crate::lang::{LangError, ParseError, Pos};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelLoadError {
    #[error(transparent)]
    Syntax(#[from] LangError),
    #[error("{pos}: {error}")]
    Model { pos: Pos, error: ModelError },
}

impl ModelLoadError {
    pub fn pos(&self) -> Pos {
        match self {
            ModelLoadError::Syntax(e) => e.pos(),
            ModelLoadError::Model { pos, .. } => *pos,
        }
    }
}

impl From<ParseError> for ModelLoadError {
    fn from(e: ParseError) -> Self {
        ModelLoadError::Syntax(e.into())
    }
}

type Result<T> = std::result::Result<T, ModelLoadError>;

fn at(pos: Pos) -> impl FnOnce(ModelError) -> ModelLoadError {
    move |error| ModelLoadError::Model { pos, error }
}

/// Parses and builds a model. Object definitions are not checked for
/// stratification here so that [`check_integrity`](crate::translate::check_integrity)
/// can report violations alongside other findings.
pub fn parse_model(source: &str) -> Result<DomainModel> {
    let toks = tokenize(source).map_err(LangError::from)?;
    let mut cur = Cursor::new(&toks);
    let mut model = DomainModel::new();
    while !cur.at_end() {
        let pos = cur.pos();
        model = if cur.is_word("domain") {
            cur.bump();
            let (name, _) = cur.expect_ident()?;
            cur.expect_punct(Punct::Semi)?;
            model.define_domain(name).map_err(at(pos))?
        } else if cur.is_word("concept") {
            cur.bump();
            let (name, _) = cur.expect_ident()?;
            cur.expect_word("over")?;
            let (domain, _) = cur.expect_ident()?;
            cur.expect_punct(Punct::Colon)?;
            let ty = parse_type(&mut cur)?;
            cur.expect_word("fns")?;
            cur.expect_punct(Punct::LParen)?;
            let mut fns = vec![cur.expect_ident()?.0];
            while cur.eat_punct(Punct::Comma) {
                fns.push(cur.expect_ident()?.0);
            }
            cur.expect_punct(Punct::RParen)?;
            cur.expect_punct(Punct::Semi)?;
            let concept = Concept::new(name, domain, ty, fns).map_err(at(pos))?;
            model.define_concept(concept).map_err(at(pos))?
        } else if cur.is_word("individual") {
            cur.bump();
            let (domain, _) = cur.expect_ident()?;
            cur.expect_punct(Punct::Dot)?;
            let (id, _) = cur.expect_ident()?;
            let mut ind = Individual::new(id);
            cur.expect_punct(Punct::LBrace)?;
            while !cur.is_punct(Punct::RBrace) {
                let attr_pos = cur.pos();
                let (concept, _) = cur.expect_ident()?;
                cur.expect_punct(Punct::Dot)?;
                let (function, _) = cur.expect_ident()?;
                cur.expect_punct(Punct::Assign)?;
                let (value, _) = cur.expect_literal()?;
                cur.expect_punct(Punct::Semi)?;
                let key = (concept, function);
                if ind.attributes.contains_key(&key) {
                    return Err(LangError::DuplicateKey { key: format!("{}.{}", key.0, key.1), pos: attr_pos }.into());
                }
                ind.attributes.insert(key, value);
            }
            cur.expect_punct(Punct::RBrace)?;
            cur.eat_punct(Punct::Semi);
            model.add_individual(&domain, ind).map_err(at(pos))?
        } else if cur.is_word("state") {
            cur.bump();
            let (state, _) = cur.expect_ident()?;
            let (domain, _) = cur.expect_ident()?;
            cur.expect_punct(Punct::Assign)?;
            cur.expect_punct(Punct::LBrace)?;
            let mut members = Vec::new();
            if !cur.is_punct(Punct::RBrace) {
                members.push(cur.expect_ident()?.0);
                while cur.eat_punct(Punct::Comma) {
                    members.push(cur.expect_ident()?.0);
                }
            }
            cur.expect_punct(Punct::RBrace)?;
            cur.expect_punct(Punct::Semi)?;
            model.set_state_membership(&domain, StateId(state), members).map_err(at(pos))?
        } else if cur.is_word("object") {
            cur.bump();
            let decl = parse_object(&mut cur)?;
            model.define_object_unstratified(decl).map_err(at(pos))?
        } else {
            return Err(cur.error(&["`domain`", "`concept`", "`individual`", "`state`", "`object`"]).into());
        };
    }
    Ok(model)
}

fn parse_object(cur: &mut Cursor<'_>) -> Result<ObjectDecl> {
    let (name, _) = cur.expect_ident()?;
    cur.expect_punct(Punct::Assign)?;
    let unique = cur.is_word("unique");
    if unique {
        cur.bump();
    }
    cur.expect_punct(Punct::LBrace)?;
    let (var, _) = cur.expect_ident()?;
    cur.expect_word("in")?;
    let (base, _) = cur.expect_ident()?;
    cur.expect_punct(Punct::Pipe)?;
    let formula = parse_or(cur, &var)?;
    cur.expect_punct(Punct::RBrace)?;
    cur.expect_punct(Punct::At)?;
    let (state, _) = cur.expect_ident()?;
    cur.expect_punct(Punct::Semi)?;
    Ok(ObjectDecl { name, base, formula, state: StateId(state), unique })
}

/// Parses a formula in which `var` is the bound variable.
pub fn parse_formula(source: &str, var: &str) -> Result<Formula> {
    let toks = tokenize(source).map_err(LangError::from)?;
    let mut cur = Cursor::new(&toks);
    let f = parse_or(&mut cur, var)?;
    cur.expect_end()?;
    Ok(f)
}

fn parse_or(cur: &mut Cursor<'_>, var: &str) -> Result<Formula> {
    let mut f = parse_and(cur, var)?;
    while cur.is_word("or") {
        cur.bump();
        f = Formula::or(f, parse_and(cur, var)?);
    }
    Ok(f)
}

fn parse_and(cur: &mut Cursor<'_>, var: &str) -> Result<Formula> {
    let mut f = parse_unary(cur, var)?;
    while cur.is_word("and") {
        cur.bump();
        f = Formula::and(f, parse_unary(cur, var)?);
    }
    Ok(f)
}

fn parse_unary(cur: &mut Cursor<'_>, var: &str) -> Result<Formula> {
    if cur.is_word("not") {
        cur.bump();
        return Ok(Formula::not(parse_unary(cur, var)?));
    }
    if cur.eat_punct(Punct::LParen) {
        let f = parse_or(cur, var)?;
        cur.expect_punct(Punct::RParen)?;
        return Ok(f);
    }
    if let Some(crate::lang::TokenKind::Literal(crate::value::Literal::Bool(b))) = cur.peek_kind() {
        cur.bump();
        return Ok(if *b { Formula::True } else { Formula::False });
    }
    if cur.is_word(var) {
        cur.bump();
        cur.expect_word("in")?;
        let (object, _) = cur.expect_ident()?;
        return Ok(Formula::InObject(object));
    }
    let (concept, _) = cur.expect_ident().map_err(|_| cur.error(&["formula"]))?;
    cur.expect_punct(Punct::Dot)?;
    let (function, _) = cur.expect_ident()?;
    let eq = if cur.eat_punct(Punct::EqEq) {
        true
    } else if cur.eat_punct(Punct::NotEq) {
        false
    } else {
        return Err(cur.error(&["`==`", "`!=`"]).into());
    };
    let (value, _) = cur.expect_literal()?;
    Ok(if eq {
        Formula::AttrEq { concept, function, value }
    } else {
        Formula::AttrNeq { concept, function, value }
    })
}
