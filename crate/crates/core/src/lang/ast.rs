use std::fmt;

use super::Pos;
use crate::value::{write_quoted, Literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Neq => "!=",
        }
    }
}

/// Expressions. `at` records where the construct starts in the source and
/// does not take part in equality.
#[derive(Debug, Clone)]
pub enum ExpAst {
    Lit { value: Literal, at: Pos },
    Ident { name: String, at: Pos },
    /// Lookup of a content object by path; the path is non-empty.
    ContentRef { path: String, at: Pos },
    /// Consumes the head of the machine input.
    Read { at: Pos },
    Cmp { op: CmpOp, lhs: Box<ExpAst>, rhs: Box<ExpAst>, at: Pos },
}

/// Commands. `Seq` chains produced by the parser are right-associated.
#[derive(Debug, Clone)]
pub enum ComAst {
    /// The empty program.
    Skip,
    Assign { name: String, value: ExpAst, at: Pos },
    Seq(Box<ComAst>, Box<ComAst>),
    If { cond: ExpAst, then: Box<ComAst>, otherwise: Option<Box<ComAst>>, at: Pos },
    Emit { value: ExpAst, at: Pos },
}

impl ExpAst {
    pub fn lit(value: impl Into<Literal>) -> Self {
        ExpAst::Lit { value: value.into(), at: Pos::default() }
    }

    pub fn ident(name: impl Into<String>) -> Self {
        ExpAst::Ident { name: name.into(), at: Pos::default() }
    }

    pub fn content(path: impl Into<String>) -> Self {
        ExpAst::ContentRef { path: path.into(), at: Pos::default() }
    }

    pub fn read() -> Self {
        ExpAst::Read { at: Pos::default() }
    }

    pub fn eq(lhs: ExpAst, rhs: ExpAst) -> Self {
        ExpAst::Cmp { op: CmpOp::Eq, lhs: Box::new(lhs), rhs: Box::new(rhs), at: Pos::default() }
    }

    pub fn neq(lhs: ExpAst, rhs: ExpAst) -> Self {
        ExpAst::Cmp { op: CmpOp::Neq, lhs: Box::new(lhs), rhs: Box::new(rhs), at: Pos::default() }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ExpAst::Lit { at, .. }
            | ExpAst::Ident { at, .. }
            | ExpAst::ContentRef { at, .. }
            | ExpAst::Read { at }
            | ExpAst::Cmp { at, .. } => *at,
        }
    }
}

impl From<&str> for Literal {
    fn from(s: &str) -> Self {
        Literal::Text(s.to_string())
    }
}

impl From<i64> for Literal {
    fn from(i: i64) -> Self {
        Literal::Int(i)
    }
}

impl From<bool> for Literal {
    fn from(b: bool) -> Self {
        Literal::Bool(b)
    }
}

impl ComAst {
    pub fn assign(name: impl Into<String>, value: ExpAst) -> Self {
        ComAst::Assign { name: name.into(), value, at: Pos::default() }
    }

    pub fn emit(value: ExpAst) -> Self {
        ComAst::Emit { value, at: Pos::default() }
    }

    pub fn if_(cond: ExpAst, then: ComAst, otherwise: Option<ComAst>) -> Self {
        ComAst::If {
            cond,
            then: Box::new(then),
            otherwise: otherwise.map(Box::new),
            at: Pos::default(),
        }
    }

    /// Right-associated sequence of `commands`; `Skip` when empty.
    pub fn seq(commands: impl IntoIterator<Item = ComAst>) -> Self {
        let mut items: Vec<ComAst> = commands.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return ComAst::Skip;
        };
        while let Some(prev) = items.pop() {
            acc = ComAst::Seq(Box::new(prev), Box::new(acc));
        }
        acc
    }

    /// Flattens a `Seq` tree into its command list (`Skip` yields nothing).
    pub fn commands(&self) -> Vec<&ComAst> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a ComAst, out: &mut Vec<&'a ComAst>) {
            match c {
                ComAst::Skip => {}
                ComAst::Seq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }
}

impl PartialEq for ExpAst {
    fn eq(&self, other: &Self) -> bool {
        use ExpAst::*;
        match (self, other) {
            (Lit { value: a, .. }, Lit { value: b, .. }) => a == b,
            (Ident { name: a, .. }, Ident { name: b, .. }) => a == b,
            (ContentRef { path: a, .. }, ContentRef { path: b, .. }) => a == b,
            (Read { .. }, Read { .. }) => true,
            (Cmp { op: o1, lhs: l1, rhs: r1, .. }, Cmp { op: o2, lhs: l2, rhs: r2, .. }) => {
                o1 == o2 && l1 == l2 && r1 == r2
            }
            _ => false,
        }
    }
}

impl Eq for ExpAst {}

impl PartialEq for ComAst {
    fn eq(&self, other: &Self) -> bool {
        use ComAst::*;
        match (self, other) {
            (Skip, Skip) => true,
            (Assign { name: n1, value: v1, .. }, Assign { name: n2, value: v2, .. }) => {
                n1 == n2 && v1 == v2
            }
            (Seq(a1, b1), Seq(a2, b2)) => a1 == a2 && b1 == b2,
            (
                If { cond: c1, then: t1, otherwise: e1, .. },
                If { cond: c2, then: t2, otherwise: e2, .. },
            ) => c1 == c2 && t1 == t2 && e1 == e2,
            (Emit { value: a, .. }, Emit { value: b, .. }) => a == b,
            _ => false,
        }
    }
}

impl Eq for ComAst {}

impl fmt::Display for ExpAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpAst::Lit { value, .. } => write!(f, "{value}"),
            ExpAst::Ident { name, .. } => f.write_str(name),
            ExpAst::ContentRef { path, .. } => {
                f.write_str("content(")?;
                write_quoted(f, path)?;
                f.write_str(")")
            }
            ExpAst::Read { .. } => f.write_str("read()"),
            ExpAst::Cmp { op, lhs, rhs, .. } => write!(f, "{lhs} {} {rhs}", op.as_str()),
        }
    }
}

/// Pretty-prints in the concrete syntax, one command per line.
impl fmt::Display for ComAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_com(f, self, 0)
    }
}

fn write_com(f: &mut fmt::Formatter<'_>, c: &ComAst, indent: usize) -> fmt::Result {
    let pad = "    ".repeat(indent);
    for cmd in c.commands() {
        match cmd {
            ComAst::Assign { name, value, .. } => writeln!(f, "{pad}{name} = {value};")?,
            ComAst::Emit { value, .. } => writeln!(f, "{pad}emit {value};")?,
            ComAst::If { cond, then, otherwise, .. } => {
                writeln!(f, "{pad}if ({cond}) {{")?;
                write_com(f, then, indent + 1)?;
                match otherwise {
                    Some(e) => {
                        writeln!(f, "{pad}}} else {{")?;
                        write_com(f, e, indent + 1)?;
                        writeln!(f, "{pad}}}")?;
                    }
                    None => writeln!(f, "{pad}}}")?,
                }
            }
            ComAst::Skip | ComAst::Seq(..) => unreachable!("flattened by commands()"),
        }
    }
    Ok(())
}
