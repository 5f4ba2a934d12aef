//! Content types and values shared by the machine, the templates and the
//! conceptual model.

use std::collections::BTreeMap;
use std::fmt;

/// Type tag of a content value. Atomic tags come from the standard domains;
/// `List` and `Record` are the domain constructors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContentType {
    Text,
    Int,
    Bool,
    Markup,
    List(Box<ContentType>),
    Record(BTreeMap<String, ContentType>),
}

impl ContentType {
    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            ContentType::Text | ContentType::Int | ContentType::Bool | ContentType::Markup
        )
    }
}

impl fmt::Display for ContentType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContentType::Text => f.write_str("Text"),
            ContentType::Int => f.write_str("Int"),
            ContentType::Bool => f.write_str("Bool"),
            ContentType::Markup => f.write_str("Markup"),
            ContentType::List(elem) => write!(f, "List<{elem}>"),
            ContentType::Record(fields) => {
                f.write_str("Record{")?;
                for (i, (name, ty)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{name}: {ty}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Constants of the binding language and of the model format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    Text(String),
    Int(i64),
    Bool(bool),
    /// Stored verbatim.
    Markup(String),
}

impl Literal {
    pub fn tag(&self) -> ContentType {
        match self {
            Literal::Text(_) => ContentType::Text,
            Literal::Int(_) => ContentType::Int,
            Literal::Bool(_) => ContentType::Bool,
            Literal::Markup(_) => ContentType::Markup,
        }
    }
}

impl From<Literal> for Value {
    fn from(lit: Literal) -> Self {
        match lit {
            Literal::Text(s) => Value::Text(s),
            Literal::Int(i) => Value::Int(i),
            Literal::Bool(b) => Value::Bool(b),
            Literal::Markup(m) => Value::Markup(m),
        }
    }
}

/// Source form of a literal, re-readable by the lexer.
impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => write_quoted(f, s),
            Literal::Int(i) => write!(f, "{i}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Markup(m) => write!(f, "<<<{m}>>>"),
        }
    }
}

pub(crate) fn write_quoted(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

/// The value domain: a disjoint sum of the content types. Every value
/// carries exactly one tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Text(String),
    Int(i64),
    Bool(bool),
    Markup(String),
    /// Homogeneous list; the element type is kept so empty lists stay typed.
    List(ContentType, Vec<Value>),
    Record(BTreeMap<String, Value>),
}

impl Value {
    pub fn tag(&self) -> ContentType {
        match self {
            Value::Text(_) => ContentType::Text,
            Value::Int(_) => ContentType::Int,
            Value::Bool(_) => ContentType::Bool,
            Value::Markup(_) => ContentType::Markup,
            Value::List(elem, _) => ContentType::List(Box::new(elem.clone())),
            Value::Record(fields) => {
                ContentType::Record(fields.iter().map(|(k, v)| (k.clone(), v.tag())).collect())
            }
        }
    }

    /// Builds a list, rejecting elements whose tag differs from `elem`.
    pub fn list(elem: ContentType, items: Vec<Value>) -> Option<Value> {
        if items.iter().all(|v| v.tag() == elem) {
            Some(Value::List(elem, items))
        } else {
            None
        }
    }

    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Value::Text(s) => Some(Literal::Text(s.clone())),
            Value::Int(i) => Some(Literal::Int(*i)),
            Value::Bool(b) => Some(Literal::Bool(*b)),
            Value::Markup(m) => Some(Literal::Markup(m.clone())),
            Value::List(..) | Value::Record(_) => None,
        }
    }

    /// Textual form used when a value fills a template hole: text and markup
    /// verbatim, integers in decimal, booleans as `true`/`false`, list
    /// elements concatenated, record fields as `key: value` lines.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut String) {
        match self {
            Value::Text(s) | Value::Markup(s) => out.push_str(s),
            Value::Int(i) => out.push_str(&i.to_string()),
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::List(_, items) => items.iter().for_each(|v| v.render_into(out)),
            Value::Record(fields) => {
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.push_str(k);
                    out.push_str(": ");
                    v.render_into(out);
                }
            }
        }
    }
}

/// Diagnostic form used in traces and `eval` output.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => write_quoted(f, s),
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Markup(m) => write!(f, "<<<{m}>>>"),
            Value::List(_, items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Value::Record(fields) => {
                f.write_str("{")?;
                for (i, (k, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k}: {v}")?;
                }
                f.write_str("}")
            }
        }
    }
}
