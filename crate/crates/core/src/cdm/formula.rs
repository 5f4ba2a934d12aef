use std::collections::BTreeSet;
use std::fmt;

use crate::value::Literal;

/// Definition-language formulas over individuals and level-object members.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    AttrEq { concept: String, function: String, value: Literal },
    AttrNeq { concept: String, function: String, value: Literal },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    /// Membership in a named level object.
    InObject(String),
}

impl Formula {
    pub fn attr_eq(concept: &str, function: &str, value: impl Into<Literal>) -> Self {
        Formula::AttrEq { concept: concept.into(), function: function.into(), value: value.into() }
    }

    pub fn attr_neq(concept: &str, function: &str, value: impl Into<Literal>) -> Self {
        Formula::AttrNeq { concept: concept.into(), function: function.into(), value: value.into() }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn in_object(name: &str) -> Self {
        Formula::InObject(name.into())
    }

    /// Atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Not(a) => 1 + a.depth(),
            _ => 1,
        }
    }

    /// Names of the level objects the formula refers to.
    pub fn objects(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::InObject(name) = f {
                out.insert(name.as_str());
            }
        });
        out
    }

    pub(crate) fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Not(a) => a.visit(f),
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Or(..) => 0,
            Formula::And(..) => 1,
            _ => 2,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Model-file syntax, with `x` as the bound variable.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::AttrEq { concept, function, value } => write!(f, "{concept}.{function} == {value}"),
            Formula::AttrNeq { concept, function, value } => write!(f, "{concept}.{function} != {value}"),
            Formula::And(a, b) => {
                a.write_operand(f, 1)?;
                f.write_str(" and ")?;
                b.write_operand(f, 2)
            }
            Formula::Or(a, b) => {
                a.write_operand(f, 0)?;
                f.write_str(" or ")?;
                b.write_operand(f, 1)
            }
            Formula::Not(a) => {
                f.write_str("not ")?;
                a.write_operand(f, 2)
            }
            Formula::InObject(name) => write!(f, "x in {name}"),
        }
    }
}

/// Something a formula is evaluated at: an individual (level 0) or a set of
/// elements one level down.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Individual(String),
    Set(ElementSet),
}

/// A set whose members all sit at `level - 1`. The level is explicit so the
/// empty set is typed too.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementSet {
    level: usize,
    members: BTreeSet<Element>,
}

impl ElementSet {
    /// `None` if `level` is 0 or some member is not at `level - 1`.
    pub fn new(level: usize, members: impl IntoIterator<Item = Element>) -> Option<Self> {
        let members: BTreeSet<Element> = members.into_iter().collect();
        (level >= 1 && members.iter().all(|m| m.level() + 1 == level)).then_some(ElementSet { level, members })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn members(&self) -> &BTreeSet<Element> {
        &self.members
    }
}

impl Element {
    pub fn individual(id: &str) -> Self {
        Element::Individual(id.to_string())
    }

    /// Set of individuals (level 1).
    pub fn set_of<'a>(ids: impl IntoIterator<Item = &'a str>) -> Self {
        Element::Set(ElementSet::new(1, ids.into_iter().map(Element::individual)).expect("individuals are level 0"))
    }

    pub fn level(&self) -> usize {
        match self {
            Element::Individual(_) => 0,
            Element::Set(s) => s.level,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Individual(id) => f.write_str(id),
            Element::Set(s) => {
                f.write_str("{")?;
                for (i, m) in s.members.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("}")
            }
        }
    }
}
