use std::collections::BTreeMap;
use std::fmt;

use crate::cdm::{Base, DomainModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    /// Kebab-case finding kind, e.g. `missing-attribute`.
    pub code: &'static str,
    /// What the finding is about: a domain, `domain.id`, or an object name.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}: {}", self.severity, self.code, self.subject, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegrityReport {
    pub findings: Vec<Finding>,
}

impl IntegrityReport {
    pub fn passed(&self) -> bool {
        self.errors() == 0
    }

    pub fn errors(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warnings(&self) -> usize {
        self.findings.len() - self.errors()
    }

    /// `N errors, M warnings`.
    pub fn summary(&self) -> String {
        format!("{} errors, {} warnings", self.errors(), self.warnings())
    }
}

/// Findings, one per line, then the summary line.
impl fmt::Display for IntegrityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        writeln!(f, "{}", self.summary())
    }
}

/// Checks completeness, consistency and integrity of a model.
///
/// * completeness: concepts range over declared domains; individuals carry a
///   value for every function of every concept over their domain.
/// * consistency: attribute values match concept types; level objects refer
///   only to existing objects of strictly lower level; relational names do
///   not collide.
/// * integrity: state members are declared individuals; objects annotated
///   `unique` have exactly one element.
pub fn check_integrity(model: &DomainModel) -> IntegrityReport {
    let mut findings = Vec::new();
    let mut push = |severity, code, subject: String, message: String| {
        findings.push(Finding { severity, code, subject, message });
    };

    for c in model.concepts() {
        if model.domain(&c.domain).is_none() {
            push(Severity::Error, "missing-domain", c.name.clone(), format!("concept ranges over undeclared domain `{}`", c.domain));
        }
    }

    for d in model.domains() {
        if model.individuals(&d.name).next().is_none() {
            push(Severity::Warning, "empty-domain", d.name.clone(), "domain has no individuals".into());
        }
        for ind in model.individuals(&d.name) {
            let subject = format!("{}.{}", d.name, ind.id);
            for c in model.concepts_over(&d.name) {
                for f in c.functions() {
                    match ind.attribute(&c.name, f) {
                        None => push(Severity::Error, "missing-attribute", subject.clone(), format!("no value for {}.{f}", c.name)),
                        Some(v) if v.tag() != c.value_type => push(
                            Severity::Error,
                            "type-conflict",
                            subject.clone(),
                            format!("{}.{f} holds {} but the concept is {}", c.name, v.tag(), c.value_type),
                        ),
                        Some(_) => {}
                    }
                }
            }
        }
        for (state, members) in &d.membership {
            for id in members {
                if model.individual(&d.name, id).is_none() {
                    push(
                        Severity::Error,
                        "undeclared-member",
                        format!("{}.{id}", d.name),
                        format!("member at state `{state}` is not a declared individual"),
                    );
                }
            }
        }
    }

    // Levels are recomputed from the base chain rather than trusted.
    let mut levels: BTreeMap<&str, usize> = BTreeMap::new();
    for o in model.objects() {
        let level = match o.base() {
            Base::Domain(_) => 1,
            Base::Object(b) => match levels.get(b.as_str()) {
                Some(l) => l + 1,
                None => {
                    push(
                        Severity::Error,
                        "dangling-reference",
                        o.name().to_string(),
                        format!("base object `{b}` is undefined"),
                    );
                    o.level()
                }
            },
        };
        levels.insert(o.name(), level);
        for referenced in o.formula().objects() {
            match levels.get(referenced) {
                None => push(
                    Severity::Error,
                    "dangling-reference",
                    o.name().to_string(),
                    format!("formula refers to undefined object `{referenced}`"),
                ),
                Some(&l) if l >= level => push(
                    Severity::Error,
                    "stratification",
                    o.name().to_string(),
                    format!("level-{level} object refers to level-{l} object `{referenced}`"),
                ),
                Some(_) => {}
            }
        }
        if o.level() != level {
            push(
                Severity::Error,
                "level-mismatch",
                o.name().to_string(),
                format!("recorded level {} but its base chain gives {level}", o.level()),
            );
        }
        if o.unique() && o.extension().len() != 1 {
            push(
                Severity::Error,
                "uniqueness",
                o.name().to_string(),
                format!("declared unique but has {} elements", o.extension().len()),
            );
        }
    }

    for (table, owners) in table_owners(model) {
        if owners.len() > 1 {
            push(
                Severity::Error,
                "table-collision",
                owners.last().expect("non-empty").clone(),
                format!("table or column `{table}` is generated by {}", owners.join(", ")),
            );
        }
    }

    IntegrityReport { findings }
}

/// Generated table names (and `table.column` names) with the model items
/// that generate them.
fn table_owners(model: &DomainModel) -> BTreeMap<String, Vec<String>> {
    let mut owners: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for d in model.domains() {
        for t in [d.name.clone(), format!("{}_state", d.name)] {
            owners.entry(t).or_default().push(d.name.clone());
        }
        for c in model.concepts_over(&d.name) {
            for f in c.functions() {
                owners.entry(format!("{}.{}_{f}", d.name, c.name)).or_default().push(format!("{}.{f}", c.name));
            }
        }
    }
    for o in model.objects() {
        let mut tables = vec![format!("{}_members", o.name())];
        if o.level() > 1 {
            tables.push(format!("{}_elements", o.name()));
        }
        for t in tables {
            owners.entry(t).or_default().push(o.name().to_string());
        }
    }
    owners
}
