use std::fmt;

use super::{LexError, Pos};
use crate::value::Literal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Punct {
    Assign,
    EqEq,
    NotEq,
    Semi,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Pipe,
    At,
    Lt,
    Gt,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::Assign => "=",
            Punct::EqEq => "==",
            Punct::NotEq => "!=",
            Punct::Semi => ";",
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Comma => ",",
            Punct::Dot => ".",
            Punct::Colon => ":",
            Punct::Pipe => "|",
            Punct::At => "@",
            Punct::Lt => "<",
            Punct::Gt => ">",
        }
    }
}

/// Reserved words of the binding language. Words used only by the file
/// formats (`template`, `slot`, `domain`, ...) lex as identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    If,
    Else,
    Emit,
    Read,
    Content,
    Bind,
}

impl Keyword {
    pub const ALL: [Keyword; 6] = [
        Keyword::If,
        Keyword::Else,
        Keyword::Emit,
        Keyword::Read,
        Keyword::Content,
        Keyword::Bind,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::If => "if",
            Keyword::Else => "else",
            Keyword::Emit => "emit",
            Keyword::Read => "read",
            Keyword::Content => "content",
            Keyword::Bind => "bind",
        }
    }

    fn from_word(word: &str) -> Option<Keyword> {
        Keyword::ALL.into_iter().find(|k| k.as_str() == word)
    }
}

/// True for words reserved by the binding language, including the boolean
/// literals.
pub fn is_reserved(word: &str) -> bool {
    word == "true" || word == "false" || Keyword::from_word(word).is_some()
}

pub fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_reserved(word)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Literal(Literal),
    Keyword(Keyword),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// The exact source lexeme.
    pub text: String,
    pub pos: Pos,
    /// Byte offset of the lexeme in the source.
    pub offset: usize,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(name) => write!(f, "identifier `{name}`"),
            TokenKind::Literal(lit) => write!(f, "literal {lit}"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_str()),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.offset..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.offset..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, LexError> {
        self.skip_trivia();
        let start = self.offset;
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let kind = if c.is_ascii_alphabetic() || c == '_' {
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                self.bump();
            }
            let word = &self.src[start..self.offset];
            match word {
                "true" => TokenKind::Literal(Literal::Bool(true)),
                "false" => TokenKind::Literal(Literal::Bool(false)),
                _ => match Keyword::from_word(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                },
            }
        } else if c.is_ascii_digit() || (c == '-' && matches!(self.peek_at(1), Some(d) if d.is_ascii_digit())) {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
            let text = &self.src[start..self.offset];
            let n = text
                .parse::<i64>()
                .map_err(|_| LexError::new(pos, format!("integer literal `{text}` out of range")))?;
            TokenKind::Literal(Literal::Int(n))
        } else if c == '"' {
            TokenKind::Literal(Literal::Text(self.string(pos)?))
        } else if self.src[start..].starts_with("<<<") {
            TokenKind::Literal(Literal::Markup(self.raw_block(pos)?))
        } else {
            self.bump();
            let punct = match c {
                '=' if self.peek() == Some('=') => {
                    self.bump();
                    Punct::EqEq
                }
                '=' => Punct::Assign,
                '!' if self.peek() == Some('=') => {
                    self.bump();
                    Punct::NotEq
                }
                ';' => Punct::Semi,
                '(' => Punct::LParen,
                ')' => Punct::RParen,
                '{' => Punct::LBrace,
                '}' => Punct::RBrace,
                ',' => Punct::Comma,
                '.' => Punct::Dot,
                ':' => Punct::Colon,
                '|' => Punct::Pipe,
                '@' => Punct::At,
                '<' => Punct::Lt,
                '>' => Punct::Gt,
                other => {
                    return Err(LexError::new(pos, format!("illegal character `{other}`")));
                }
            };
            TokenKind::Punct(punct)
        };
        Ok(Some(Token {
            kind,
            text: self.src[start..self.offset].to_string(),
            pos,
            offset: start,
        }))
    }

    fn string(&mut self, pos: Pos) -> Result<String, LexError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(LexError::new(pos, "unterminated string literal")),
                Some('"') => return Ok(out),
                Some('\\') => {
                    let esc_pos = self.pos();
                    match self.bump() {
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('n') => out.push('\n'),
                        Some('t') => out.push('\t'),
                        Some('r') => out.push('\r'),
                        Some(other) => {
                            return Err(LexError::new(
                                esc_pos,
                                format!("unknown escape `\\{other}`"),
                            ))
                        }
                        None => return Err(LexError::new(pos, "unterminated string literal")),
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// `<<< ... >>>`; the block ends at the first run of three or more `>`,
    /// whose last three characters are the terminator.
    fn raw_block(&mut self, pos: Pos) -> Result<String, LexError> {
        for _ in 0..3 {
            self.bump();
        }
        let body_start = self.offset;
        let rest = &self.src[body_start..];
        let bytes = rest.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i] == b'>' {
                let mut j = i;
                while j < bytes.len() && bytes[j] == b'>' {
                    j += 1;
                }
                if j - i >= 3 {
                    let body = rest[..j - 3].to_string();
                    while self.offset < body_start + j {
                        self.bump();
                    }
                    return Ok(body);
                }
                i = j;
            } else {
                i += 1;
            }
        }
        Err(LexError::new(pos, "unterminated `<<<` block"))
    }
}

/// Splits `source` into tokens. Whitespace and `#` comments are skipped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lexer = Lexer {
        src: source,
        offset: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}
