use super::ast::{CmpOp, ComAst, ExpAst};
use super::lexer::{Keyword, Punct, Token, TokenKind};
use super::{ParseError, Pos};
use crate::value::{ContentType, Literal};

/// Token cursor shared by every grammar in the crate.
pub(crate) struct Cursor<'t> {
    toks: &'t [Token],
    idx: usize,
}

impl<'t> Cursor<'t> {
    pub(crate) fn new(toks: &'t [Token]) -> Self {
        Cursor { toks, idx: 0 }
    }

    pub(crate) fn peek(&self) -> Option<&'t Token> {
        self.toks.get(self.idx)
    }

    pub(crate) fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub(crate) fn bump(&mut self) -> Option<&'t Token> {
        let tok = self.toks.get(self.idx)?;
        self.idx += 1;
        Some(tok)
    }

    /// Position of the current token, or of the last token at end of input.
    pub(crate) fn pos(&self) -> Pos {
        self.peek()
            .or_else(|| self.toks.last())
            .map(|t| t.pos)
            .unwrap_or(Pos::new(1, 1))
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek()
                .map(|t| t.kind.to_string())
                .unwrap_or_else(|| "end of input".to_string()),
        }
    }

    pub(crate) fn is_punct(&self, p: Punct) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Punct(q)) if *q == p)
    }

    pub(crate) fn is_keyword(&self, k: Keyword) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Keyword(q)) if *q == k)
    }

    pub(crate) fn is_word(&self, word: &str) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Ident(w)) if w == word)
    }

    pub(crate) fn eat_punct(&mut self, p: Punct) -> bool {
        if self.is_punct(p) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect_punct(&mut self, p: Punct) -> Result<Pos, ParseError> {
        if self.is_punct(p) {
            Ok(self.bump().unwrap().pos)
        } else {
            Err(self.error(&[&format!("`{}`", p.as_str())]))
        }
    }

    pub(crate) fn expect_keyword(&mut self, k: Keyword) -> Result<Pos, ParseError> {
        if self.is_keyword(k) {
            Ok(self.bump().unwrap().pos)
        } else {
            Err(self.error(&[&format!("`{}`", k.as_str())]))
        }
    }

    /// Expects a contextual keyword, which lexes as an identifier.
    pub(crate) fn expect_word(&mut self, word: &str) -> Result<Pos, ParseError> {
        if self.is_word(word) {
            Ok(self.bump().unwrap().pos)
        } else {
            Err(self.error(&[&format!("`{word}`")]))
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(name), pos, .. }) => {
                self.idx += 1;
                Ok((name.clone(), *pos))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    pub(crate) fn expect_string(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Literal(Literal::Text(s)), pos, .. }) => {
                self.idx += 1;
                Ok((s.clone(), *pos))
            }
            _ => Err(self.error(&["string literal"])),
        }
    }

    pub(crate) fn expect_literal(&mut self) -> Result<(Literal, Pos), ParseError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Literal(lit), pos, .. }) => {
                self.idx += 1;
                Ok((lit.clone(), *pos))
            }
            _ => Err(self.error(&["literal"])),
        }
    }

    pub(crate) fn expect_end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

/// `program := com*` (an empty program is `Skip`).
pub fn parse_program(tokens: &[Token]) -> Result<ComAst, ParseError> {
    let mut cur = Cursor::new(tokens);
    let program = parse_commands(&mut cur, |c| c.at_end())?;
    cur.expect_end()?;
    Ok(program)
}

/// Parses commands until `stop` holds, returning their right-nested sequence.
pub(crate) fn parse_commands(
    cur: &mut Cursor<'_>,
    stop: impl Fn(&Cursor<'_>) -> bool,
) -> Result<ComAst, ParseError> {
    let mut commands = Vec::new();
    while !stop(cur) {
        if cur.at_end() {
            return Err(cur.error(&["command"]));
        }
        commands.push(parse_com(cur)?);
    }
    Ok(ComAst::seq(commands))
}

fn parse_com(cur: &mut Cursor<'_>) -> Result<ComAst, ParseError> {
    match cur.peek_kind() {
        Some(TokenKind::Ident(_)) => {
            let (name, at) = cur.expect_ident()?;
            cur.expect_punct(Punct::Assign)?;
            let value = parse_exp(cur)?;
            cur.expect_punct(Punct::Semi)?;
            Ok(ComAst::Assign { name, value, at })
        }
        Some(TokenKind::Keyword(Keyword::Emit)) => {
            let at = cur.bump().unwrap().pos;
            let value = parse_exp(cur)?;
            cur.expect_punct(Punct::Semi)?;
            Ok(ComAst::Emit { value, at })
        }
        Some(TokenKind::Keyword(Keyword::If)) => {
            let at = cur.bump().unwrap().pos;
            cur.expect_punct(Punct::LParen)?;
            let cond = parse_exp(cur)?;
            cur.expect_punct(Punct::RParen)?;
            let then = parse_block(cur)?;
            let otherwise = if cur.is_keyword(Keyword::Else) {
                cur.bump();
                Some(Box::new(parse_block(cur)?))
            } else {
                None
            };
            Ok(ComAst::If { cond, then: Box::new(then), otherwise, at })
        }
        _ => Err(cur.error(&["identifier", "`if`", "`emit`"])),
    }
}

/// `block := "{" com+ "}"`
fn parse_block(cur: &mut Cursor<'_>) -> Result<ComAst, ParseError> {
    cur.expect_punct(Punct::LBrace)?;
    if cur.is_punct(Punct::RBrace) {
        return Err(cur.error(&["command"]));
    }
    let body = parse_commands(cur, |c| c.is_punct(Punct::RBrace))?;
    cur.expect_punct(Punct::RBrace)?;
    Ok(body)
}

/// `exp := atom (("==" | "!=") atom)?`
pub(crate) fn parse_exp(cur: &mut Cursor<'_>) -> Result<ExpAst, ParseError> {
    let lhs = parse_atom(cur)?;
    let op = if cur.eat_punct(Punct::EqEq) {
        CmpOp::Eq
    } else if cur.eat_punct(Punct::NotEq) {
        CmpOp::Neq
    } else {
        return Ok(lhs);
    };
    let rhs = parse_atom(cur)?;
    let at = lhs.pos();
    Ok(ExpAst::Cmp { op, lhs: Box::new(lhs), rhs: Box::new(rhs), at })
}

fn parse_atom(cur: &mut Cursor<'_>) -> Result<ExpAst, ParseError> {
    match cur.peek() {
        Some(Token { kind: TokenKind::Literal(lit), pos, .. }) => {
            let (value, at) = (lit.clone(), *pos);
            cur.bump();
            Ok(ExpAst::Lit { value, at })
        }
        Some(Token { kind: TokenKind::Ident(name), pos, .. }) => {
            let (name, at) = (name.clone(), *pos);
            cur.bump();
            Ok(ExpAst::Ident { name, at })
        }
        Some(Token { kind: TokenKind::Keyword(Keyword::Content), pos, .. }) => {
            let at = *pos;
            cur.bump();
            cur.expect_punct(Punct::LParen)?;
            if matches!(cur.peek_kind(), Some(TokenKind::Literal(Literal::Text(p))) if p.is_empty()) {
                return Err(cur.error(&["non-empty content path"]));
            }
            let (path, _) = cur.expect_string()?;
            cur.expect_punct(Punct::RParen)?;
            Ok(ExpAst::ContentRef { path, at })
        }
        Some(Token { kind: TokenKind::Keyword(Keyword::Read), pos, .. }) => {
            let at = *pos;
            cur.bump();
            cur.expect_punct(Punct::LParen)?;
            cur.expect_punct(Punct::RParen)?;
            Ok(ExpAst::Read { at })
        }
        _ => Err(cur.error(&["expression"])),
    }
}

/// `Text | Int | Bool | Markup | List<T> | Record{name: T, ...}`
pub(crate) fn parse_type(cur: &mut Cursor<'_>) -> Result<ContentType, ParseError> {
    let Some(TokenKind::Ident(word)) = cur.peek_kind() else {
        return Err(cur.error(&["type"]));
    };
    let ty = match word.as_str() {
        "Text" => ContentType::Text,
        "Int" => ContentType::Int,
        "Bool" => ContentType::Bool,
        "Markup" => ContentType::Markup,
        "List" => {
            cur.bump();
            cur.expect_punct(Punct::Lt)?;
            let elem = parse_type(cur)?;
            cur.expect_punct(Punct::Gt)?;
            return Ok(ContentType::List(Box::new(elem)));
        }
        "Record" => {
            cur.bump();
            cur.expect_punct(Punct::LBrace)?;
            let mut fields = std::collections::BTreeMap::new();
            while !cur.is_punct(Punct::RBrace) {
                let (name, _) = cur.expect_ident()?;
                if fields.contains_key(&name) {
                    return Err(cur.error(&["distinct record field name"]));
                }
                cur.expect_punct(Punct::Colon)?;
                let ty = parse_type(cur)?;
                fields.insert(name, ty);
                if !cur.eat_punct(Punct::Comma) {
                    break;
                }
            }
            cur.expect_punct(Punct::RBrace)?;
            return Ok(ContentType::Record(fields));
        }
        _ => return Err(cur.error(&["type"])),
    };
    cur.bump();
    Ok(ty)
}
