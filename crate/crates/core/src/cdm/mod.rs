//! The conceptual data model.
//!
//! A data object is a triple of concept, individual and state. Individuals
//! are grouped into variable domains whose membership varies by state.
//! Formulas pick individuals out by definite description
//! ([`DomainModel::individualize`]) or collect them into level objects by
//! comprehension ([`DomainModel::comprehend`]); comprehension over a level-j
//! object ranges over sets of its members and yields a level j+1 object.
//!
//! Models are values: every operation consumes the model and returns the
//! next version, or borrows it for queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::value::{ContentType, Literal};

mod formula;
mod text;

pub use formula::{Element, ElementSet, Formula};
pub use text::{parse_formula, parse_model, ModelLoadError};

/// Upper bound on the base size of a comprehension over a level object,
/// whose candidates are all subsets of the base.
pub const MAX_POWERSET_BASE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown concept `{concept}` for domain `{domain}`")]
    UnknownConcept { concept: String, domain: String },
    #[error("duplicate individual `{domain}.{id}`")]
    DuplicateId { domain: String, id: String },
    #[error("type mismatch for {subject}: expected {expected}, found {found}")]
    TypeMismatch { subject: String, expected: ContentType, found: ContentType },
    #[error("unknown individual `{domain}.{id}`")]
    UnknownIndividual { domain: String, id: String },
    #[error("unknown reference `{0}`")]
    UnknownReference(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("definite description has no satisfier (count {count})")]
    NotFound { count: usize },
    #[error("definite description is not unique ({count} satisfiers)")]
    NotUnique { count: usize },
    #[error("level mismatch for `{subject}`: expected level {expected}, found {found}")]
    LevelMismatch { subject: String, expected: usize, found: usize },
    #[error("object `{object}` (level {level}) refers to `{referenced}` of level {referenced_level}")]
    Stratification { object: String, level: usize, referenced: String, referenced_level: usize },
    #[error("individual `{id}` is not in domain `{domain}` at state `{state}`")]
    NotAMember { domain: String, id: String, state: String },
    #[error("comprehension over `{base}` would range over 2^{size} sets")]
    TooLarge { base: String, size: usize },
}

impl ModelError {
    /// Satisfier count carried by a failed definite description.
    pub fn satisfier_count(&self) -> Option<usize> {
        match self {
            ModelError::NotFound { count } | ModelError::NotUnique { count } => Some(*count),
            _ => None,
        }
    }
}

type Result<T> = std::result::Result<T, ModelError>;

/// A family of functions sharing one definition range (a domain) and one
/// value range (a content type).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub name: String,
    pub domain: String,
    pub value_type: ContentType,
    functions: Vec<String>,
}

impl Concept {
    pub fn new(
        name: impl Into<String>,
        domain: impl Into<String>,
        value_type: ContentType,
        functions: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let mut fns: Vec<String> = Vec::new();
        for f in functions {
            let f = f.into();
            if fns.contains(&f) {
                return Err(ModelError::DuplicateName { kind: "function", name: f });
            }
            fns.push(f);
        }
        Ok(Concept { name: name.into(), domain: domain.into(), value_type, functions: fns })
    }

    pub fn functions(&self) -> &[String] {
        &self.functions
    }

    pub fn has_function(&self, f: &str) -> bool {
        self.functions.iter().any(|g| g == f)
    }
}

/// A problem-domain entity with typed attributes keyed by
/// `(concept, function)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Individual {
    pub id: String,
    pub attributes: BTreeMap<(String, String), Literal>,
}

impl Individual {
    pub fn new(id: impl Into<String>) -> Self {
        Individual { id: id.into(), attributes: BTreeMap::new() }
    }

    pub fn with(mut self, concept: &str, function: &str, value: impl Into<Literal>) -> Self {
        self.attributes.insert((concept.to_string(), function.to_string()), value.into());
        self
    }

    pub fn attribute(&self, concept: &str, function: &str) -> Option<&Literal> {
        self.attributes.get(&(concept.to_string(), function.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub String);

impl StateId {
    pub fn new(s: impl Into<String>) -> Self {
        StateId(s.into())
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-state membership of a domain. States without an entry have no
/// members.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VariableDomain {
    pub name: String,
    pub membership: BTreeMap<StateId, BTreeSet<String>>,
}

impl VariableDomain {
    pub fn members(&self, state: &StateId) -> impl Iterator<Item = &str> {
        self.membership.get(state).into_iter().flatten().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Base {
    Domain(String),
    Object(String),
}

impl Base {
    pub fn name(&self) -> &str {
        match self {
            Base::Domain(n) | Base::Object(n) => n,
        }
    }
}

/// A materialized comprehension `{ x in base | formula }` at one state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelObject {
    name: String,
    level: usize,
    base: Base,
    formula: Formula,
    extension: BTreeSet<Element>,
    state: StateId,
    unique: bool,
}

impl LevelObject {
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn level(&self) -> usize {
        self.level
    }
    pub fn base(&self) -> &Base {
        &self.base
    }
    pub fn formula(&self) -> &Formula {
        &self.formula
    }
    pub fn extension(&self) -> &BTreeSet<Element> {
        &self.extension
    }
    pub fn state(&self) -> &StateId {
        &self.state
    }
    /// Declared as an individualization: the extension should be a singleton.
    pub fn unique(&self) -> bool {
        self.unique
    }

    /// Membership, defined only for elements one level below the object.
    pub fn member(&self, x: &Element) -> Result<bool> {
        if x.level() + 1 != self.level {
            return Err(ModelError::LevelMismatch {
                subject: self.name.clone(),
                expected: self.level - 1,
                found: x.level(),
            });
        }
        Ok(self.extension.contains(x))
    }
}

/// A definition of a level object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectDecl {
    pub name: String,
    pub base: String,
    pub formula: Formula,
    pub state: StateId,
    pub unique: bool,
}

/// A concept, an individual and a state, with the individual present in the
/// concept's domain at that state.
#[derive(Debug, Clone, Copy)]
pub struct DataObject<'m> {
    pub concept: &'m Concept,
    pub individual: &'m Individual,
    pub state: &'m StateId,
}

impl DataObject<'_> {
    pub fn value(&self, function: &str) -> Option<&Literal> {
        self.individual.attribute(&self.concept.name, function)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainModel {
    domains: IndexMap<String, VariableDomain>,
    concepts: IndexMap<String, Concept>,
    individuals: IndexMap<String, IndexMap<String, Individual>>,
    states: BTreeSet<StateId>,
    objects: IndexMap<String, LevelObject>,
}

impl DomainModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn domains(&self) -> impl Iterator<Item = &VariableDomain> {
        self.domains.values()
    }

    pub fn domain(&self, name: &str) -> Option<&VariableDomain> {
        self.domains.get(name)
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn concept(&self, name: &str) -> Option<&Concept> {
        self.concepts.get(name)
    }

    /// Concepts over `domain`, in declaration order.
    pub fn concepts_over<'a>(&'a self, domain: &'a str) -> impl Iterator<Item = &'a Concept> {
        self.concepts.values().filter(move |c| c.domain == domain)
    }

    pub fn individuals(&self, domain: &str) -> impl Iterator<Item = &Individual> {
        self.individuals.get(domain).into_iter().flat_map(|m| m.values())
    }

    pub fn individual(&self, domain: &str, id: &str) -> Option<&Individual> {
        self.individuals.get(domain)?.get(id)
    }

    pub fn states(&self) -> impl Iterator<Item = &StateId> {
        self.states.iter()
    }

    pub fn objects(&self) -> impl Iterator<Item = &LevelObject> {
        self.objects.values()
    }

    pub fn object(&self, name: &str) -> Option<&LevelObject> {
        self.objects.get(name)
    }

    fn name_taken(&self, name: &str) -> bool {
        self.domains.contains_key(name) || self.objects.contains_key(name)
    }

    /// Domains and level objects share one namespace.
    pub fn define_domain(mut self, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if self.name_taken(&name) {
            return Err(ModelError::DuplicateName { kind: "domain", name });
        }
        self.individuals.insert(name.clone(), IndexMap::new());
        self.domains.insert(name.clone(), VariableDomain { name, membership: BTreeMap::new() });
        Ok(self)
    }

    pub fn define_concept(mut self, c: Concept) -> Result<Self> {
        if self.concepts.contains_key(&c.name) {
            return Err(ModelError::DuplicateName { kind: "concept", name: c.name });
        }
        if !self.domains.contains_key(&c.domain) {
            return Err(ModelError::UnknownDomain(c.domain));
        }
        self.concepts.insert(c.name.clone(), c);
        Ok(self)
    }

    pub fn add_individual(mut self, domain: &str, ind: Individual) -> Result<Self> {
        if !self.domains.contains_key(domain) {
            return Err(ModelError::UnknownDomain(domain.to_string()));
        }
        for ((concept, function), value) in &ind.attributes {
            let c = self
                .concepts
                .get(concept)
                .filter(|c| c.domain == domain)
                .ok_or_else(|| ModelError::UnknownConcept { concept: concept.clone(), domain: domain.to_string() })?;
            if !c.has_function(function) {
                return Err(ModelError::UnknownReference(format!("{concept}.{function}")));
            }
            if value.tag() != c.value_type {
                return Err(ModelError::TypeMismatch {
                    subject: format!("{domain}.{}: {concept}.{function}", ind.id),
                    expected: c.value_type.clone(),
                    found: value.tag(),
                });
            }
        }
        let bucket = self.individuals.get_mut(domain).expect("domain has a bucket");
        if bucket.contains_key(&ind.id) {
            return Err(ModelError::DuplicateId { domain: domain.to_string(), id: ind.id });
        }
        bucket.insert(ind.id.clone(), ind);
        Ok(self)
    }

    /// Declares `state` if needed and sets the domain's membership there to
    /// exactly `members`.
    pub fn set_state_membership(
        mut self,
        domain: &str,
        state: StateId,
        members: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let members: BTreeSet<String> = members.into_iter().map(Into::into).collect();
        let bucket = self.individuals.get(domain).ok_or_else(|| ModelError::UnknownDomain(domain.to_string()))?;
        if let Some(id) = members.iter().find(|id| !bucket.contains_key(*id)) {
            return Err(ModelError::UnknownIndividual { domain: domain.to_string(), id: id.clone() });
        }
        self.states.insert(state.clone());
        self.domains.get_mut(domain).expect("checked above").membership.insert(state, members);
        Ok(self)
    }

    /// Declares a state with no memberships.
    pub fn declare_state(mut self, state: StateId) -> Self {
        self.states.insert(state);
        self
    }

    fn check_state(&self, state: &StateId) -> Result<()> {
        if self.states.contains(state) {
            Ok(())
        } else {
            Err(ModelError::UnknownState(state.0.clone()))
        }
    }

    pub fn data_object<'m>(&'m self, concept: &str, id: &str, state: &'m StateId) -> Result<DataObject<'m>> {
        let concept = self.concepts.get(concept).ok_or_else(|| ModelError::UnknownReference(concept.to_string()))?;
        let individual = self
            .individual(&concept.domain, id)
            .ok_or_else(|| ModelError::UnknownIndividual { domain: concept.domain.clone(), id: id.to_string() })?;
        self.check_state(state)?;
        if !self.domains[&concept.domain].members(state).any(|m| m == id) {
            return Err(ModelError::NotAMember { domain: concept.domain.clone(), id: id.to_string(), state: state.0.clone() });
        }
        Ok(DataObject { concept, individual, state })
    }

    /// Checks that every name in `f` resolves, that literals match concept
    /// value types, and that `InObject` atoms can be evaluated at elements of
    /// `level`.
    fn check_formula(&self, f: &Formula, level: usize) -> Result<()> {
        let mut result = Ok(());
        f.visit(&mut |g| {
            if result.is_err() {
                return;
            }
            result = match g {
                Formula::AttrEq { concept, function, value } | Formula::AttrNeq { concept, function, value } => {
                    match self.concepts.get(concept) {
                        Some(c) if c.has_function(function) => {
                            if value.tag() == c.value_type {
                                Ok(())
                            } else {
                                Err(ModelError::TypeMismatch {
                                    subject: format!("{concept}.{function}"),
                                    expected: c.value_type.clone(),
                                    found: value.tag(),
                                })
                            }
                        }
                        _ => Err(ModelError::UnknownReference(format!("{concept}.{function}"))),
                    }
                }
                Formula::InObject(name) => match self.objects.get(name) {
                    None => Err(ModelError::UnknownReference(name.clone())),
                    Some(o) if level + 1 < o.level => Err(ModelError::LevelMismatch {
                        subject: name.clone(),
                        expected: o.level - 1,
                        found: level,
                    }),
                    Some(_) => Ok(()),
                },
                _ => Ok(()),
            };
        });
        result
    }

    /// Truth of `f` at an already checked element. Atoms applied to a set
    /// hold when they hold for every member.
    fn holds(&self, f: &Formula, x: &Element) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::And(a, b) => self.holds(a, x) && self.holds(b, x),
            Formula::Or(a, b) => self.holds(a, x) || self.holds(b, x),
            Formula::Not(a) => !self.holds(a, x),
            Formula::AttrEq { concept, function, value } => match x {
                Element::Individual(id) => self.attribute_is(concept, function, id, value),
                Element::Set(s) => s.members().iter().all(|m| self.holds(f, m)),
            },
            Formula::AttrNeq { concept, function, value } => match x {
                Element::Individual(id) => !self.attribute_is(concept, function, id, value),
                Element::Set(s) => s.members().iter().all(|m| self.holds(f, m)),
            },
            Formula::InObject(name) => {
                let o = &self.objects[name];
                if x.level() + 1 == o.level {
                    o.extension.contains(x)
                } else {
                    match x {
                        Element::Set(s) => s.members().iter().all(|m| self.holds(f, m)),
                        Element::Individual(_) => unreachable!("rejected by check_formula"),
                    }
                }
            }
        }
    }

    /// Closed world: an absent attribute equals nothing.
    fn attribute_is(&self, concept: &str, function: &str, id: &str, value: &Literal) -> bool {
        let domain = &self.concepts[concept].domain;
        self.individual(domain, id).and_then(|i| i.attribute(concept, function)) == Some(value)
    }

    /// Two-valued truth of `f` at `element` under `state`.
    pub fn eval_formula(&self, f: &Formula, element: &Element, state: &StateId) -> Result<bool> {
        self.check_state(state)?;
        self.check_formula(f, element.level())?;
        Ok(self.holds(f, element))
    }

    /// The definite description `ιx. f(x)` over `domain` at `state`: the one
    /// member satisfying `f`.
    pub fn individualize(&self, domain: &str, f: &Formula, state: &StateId) -> Result<String> {
        let d = self.domains.get(domain).ok_or_else(|| ModelError::UnknownDomain(domain.to_string()))?;
        self.check_state(state)?;
        self.check_formula(f, 0)?;
        let satisfiers: Vec<&str> =
            d.members(state).filter(|id| self.holds(f, &Element::individual(id))).collect();
        match satisfiers.as_slice() {
            [one] => Ok(one.to_string()),
            [] => Err(ModelError::NotFound { count: 0 }),
            many => Err(ModelError::NotUnique { count: many.len() }),
        }
    }

    fn resolve_base(&self, base: &str) -> Result<(Base, usize)> {
        if self.domains.contains_key(base) {
            Ok((Base::Domain(base.to_string()), 0))
        } else if let Some(o) = self.objects.get(base) {
            Ok((Base::Object(base.to_string()), o.level))
        } else {
            Err(ModelError::UnknownReference(base.to_string()))
        }
    }

    /// Candidate elements of a comprehension over `base`: domain members at
    /// `state`, or every subset of a level object's extension.
    fn candidates(&self, base: &Base, level: usize, state: &StateId) -> Result<Vec<Element>> {
        match base {
            Base::Domain(d) => Ok(self.domains[d].members(state).map(Element::individual).collect()),
            Base::Object(o) => {
                let ext: Vec<&Element> = self.objects[o].extension.iter().collect();
                if ext.len() > MAX_POWERSET_BASE {
                    return Err(ModelError::TooLarge { base: o.clone(), size: ext.len() });
                }
                Ok((0u32..1 << ext.len())
                    .map(|mask| {
                        let members = ext.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, e)| (*e).clone());
                        Element::Set(ElementSet::new(level, members).expect("members share the base level"))
                    })
                    .collect())
            }
        }
    }

    fn build_object(&self, decl: &ObjectDecl, stratified: bool) -> Result<LevelObject> {
        if self.name_taken(&decl.name) {
            return Err(ModelError::DuplicateName { kind: "object", name: decl.name.clone() });
        }
        self.check_state(&decl.state)?;
        let (base, base_level) = self.resolve_base(&decl.base)?;
        let level = base_level + 1;
        self.check_formula(&decl.formula, base_level)?;
        if stratified {
            for name in decl.formula.objects() {
                let referenced_level = self.objects[name].level;
                if referenced_level >= level {
                    return Err(ModelError::Stratification {
                        object: decl.name.clone(),
                        level,
                        referenced: name.to_string(),
                        referenced_level,
                    });
                }
            }
        }
        let extension = self
            .candidates(&base, base_level, &decl.state)?
            .into_iter()
            .filter(|x| self.holds(&decl.formula, x))
            .collect();
        Ok(LevelObject {
            name: decl.name.clone(),
            level,
            base,
            formula: decl.formula.clone(),
            extension,
            state: decl.state.clone(),
            unique: decl.unique,
        })
    }

    /// `{ x in base | f }` at `state`, one level above `base`. The model is
    /// not modified; see [`define_object`](Self::define_object).
    pub fn comprehend(&self, base: &str, f: &Formula, state: &StateId, name: &str) -> Result<LevelObject> {
        let decl = ObjectDecl {
            name: name.to_string(),
            base: base.to_string(),
            formula: f.clone(),
            state: state.clone(),
            unique: false,
        };
        self.build_object(&decl, true)
    }

    /// Materializes and stores a level object. Formulas may only refer to
    /// objects of strictly lower level.
    pub fn define_object(mut self, decl: ObjectDecl) -> Result<Self> {
        let obj = self.build_object(&decl, true)?;
        self.objects.insert(obj.name.clone(), obj);
        Ok(self)
    }

    /// Like [`define_object`](Self::define_object) but accepts references to
    /// objects at the same or a higher level, leaving them for the integrity
    /// check to report.
    pub fn define_object_unstratified(mut self, decl: ObjectDecl) -> Result<Self> {
        let obj = self.build_object(&decl, false)?;
        self.objects.insert(obj.name.clone(), obj);
        Ok(self)
    }

    /// Removes an individual and its memberships.
    pub fn remove_individual(mut self, domain: &str, id: &str) -> Result<Self> {
        let bucket = self.individuals.get_mut(domain).ok_or_else(|| ModelError::UnknownDomain(domain.to_string()))?;
        if bucket.shift_remove(id).is_none() {
            return Err(ModelError::UnknownIndividual { domain: domain.to_string(), id: id.to_string() });
        }
        for members in self.domains.get_mut(domain).expect("bucket implies domain").membership.values_mut() {
            members.remove(id);
        }
        Ok(self)
    }

    /// Removes a level object. Objects that refer to it keep their
    /// materialized extension.
    pub fn remove_object(mut self, name: &str) -> Result<Self> {
        self.objects.shift_remove(name).ok_or_else(|| ModelError::UnknownReference(name.to_string()))?;
        Ok(self)
    }
}
