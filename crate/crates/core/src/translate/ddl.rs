use std::collections::BTreeSet;
use std::fmt;

use crate::cdm::{Base, DomainModel};
use crate::value::ContentType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SqlType {
    Text,
    BigInt,
    Boolean,
}

impl SqlType {
    /// Lists and records are stored serialized as text.
    pub fn of(ty: &ContentType) -> SqlType {
        match ty {
            ContentType::Int => SqlType::BigInt,
            ContentType::Bool => SqlType::Boolean,
            _ => SqlType::Text,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            SqlType::Text => "TEXT",
            SqlType::BigInt => "BIGINT",
            SqlType::Boolean => "BOOLEAN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: SqlType,
    pub nullable: bool,
}

impl Column {
    fn required(name: impl Into<String>, ty: SqlType) -> Self {
        Column { name: name.into(), ty, nullable: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForeignKey {
    pub name: String,
    pub columns: Vec<String>,
    pub table: String,
    pub ref_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub primary_key: Constraint,
    pub uniques: Vec<Constraint>,
    pub foreign_keys: Vec<ForeignKey>,
}

impl Table {
    fn new(name: impl Into<String>, columns: Vec<Column>, pk: &[&str]) -> Self {
        let name = name.into();
        Table {
            primary_key: Constraint { name: format!("{name}_pk"), columns: pk.iter().map(|c| c.to_string()).collect() },
            name,
            columns,
            uniques: Vec::new(),
            foreign_keys: Vec::new(),
        }
    }

    fn references(mut self, role: &str, column: &str, target: &Table) -> Self {
        self.foreign_keys.push(ForeignKey {
            name: format!("{}_{role}_fk", self.name),
            columns: vec![column.to_string()],
            table: target.name.clone(),
            ref_columns: target.primary_key.columns.clone(),
        });
        self
    }
}

/// Tables in dependency order: every table follows the tables it references.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DdlDocument {
    pub tables: Vec<Table>,
}

impl DdlDocument {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Checks the structural invariants: distinct table names, constraint
    /// columns that exist, and foreign keys that target the primary key of an
    /// earlier table.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen: Vec<&Table> = Vec::new();
        for t in &self.tables {
            if seen.iter().any(|s| s.name == t.name) {
                return Err(format!("table `{}` is declared twice", t.name));
            }
            let cols: BTreeSet<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
            if cols.len() != t.columns.len() {
                return Err(format!("table `{}` repeats a column", t.name));
            }
            let constrained = std::iter::once(&t.primary_key.columns)
                .chain(t.uniques.iter().map(|u| &u.columns))
                .chain(t.foreign_keys.iter().map(|f| &f.columns));
            for c in constrained.flatten() {
                if !cols.contains(c.as_str()) {
                    return Err(format!("constraint on `{}` names unknown column `{c}`", t.name));
                }
            }
            for fk in &t.foreign_keys {
                let target = seen
                    .iter()
                    .find(|s| s.name == fk.table)
                    .ok_or_else(|| format!("`{}` references `{}`, which is not declared before it", fk.name, fk.table))?;
                if target.primary_key.columns != fk.ref_columns {
                    return Err(format!("`{}` does not target the primary key of `{}`", fk.name, fk.table));
                }
            }
            seen.push(t);
        }
        Ok(())
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CREATE TABLE {} (", self.name)?;
        let mut lines: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{} {}{}", c.name, c.ty.as_str(), if c.nullable { "" } else { " NOT NULL" }))
            .collect();
        lines.push(format!("CONSTRAINT {} PRIMARY KEY ({})", self.primary_key.name, self.primary_key.columns.join(", ")));
        for u in &self.uniques {
            lines.push(format!("CONSTRAINT {} UNIQUE ({})", u.name, u.columns.join(", ")));
        }
        for fk in &self.foreign_keys {
            lines.push(format!(
                "CONSTRAINT {} FOREIGN KEY ({}) REFERENCES {} ({})",
                fk.name,
                fk.columns.join(", "),
                fk.table,
                fk.ref_columns.join(", ")
            ));
        }
        for (i, line) in lines.iter().enumerate() {
            let sep = if i + 1 < lines.len() { "," } else { "" };
            writeln!(f, "    {line}{sep}")?;
        }
        f.write_str(");")
    }
}

/// `;`-terminated `CREATE TABLE` statements separated by blank lines.
impl fmt::Display for DdlDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Maps a model to tables without checking integrity first.
///
/// * domain `d`: table `d(id, <concept>_<fn>...)` keyed by `id`
/// * membership of `d`: table `d_state(state_id, individual_id)`
/// * level-1 object `o`: table `o_members(element_id)` over the domain
/// * higher object `o`: `o_elements(element_id)` for its set-valued elements
///   and `o_members(element_id, member_id)` pairing each with its members,
///   which are elements of the base object
pub(crate) fn map_model(model: &DomainModel) -> DdlDocument {
    let mut doc = DdlDocument::default();
    for d in model.domains() {
        let mut cols = vec![Column::required("id", SqlType::Text)];
        for c in model.concepts_over(&d.name) {
            for f in c.functions() {
                cols.push(Column::required(format!("{}_{f}", c.name), SqlType::of(&c.value_type)));
            }
        }
        let table = Table::new(d.name.clone(), cols, &["id"]);
        let state = Table::new(
            format!("{}_state", d.name),
            vec![Column::required("state_id", SqlType::Text), Column::required("individual_id", SqlType::Text)],
            &["state_id", "individual_id"],
        )
        .references("individual", "individual_id", &table);
        doc.tables.push(table);
        doc.tables.push(state);
    }
    for o in model.objects() {
        let key_table = |base: &str| -> Table {
            let target = match o.base() {
                Base::Domain(_) => base.to_string(),
                Base::Object(b) if model.object(b).is_some_and(|bo| bo.level() == 1) => format!("{b}_members"),
                Base::Object(b) => format!("{b}_elements"),
            };
            doc.table(&target).cloned().expect("base tables are emitted first")
        };
        if o.level() == 1 {
            let base = key_table(o.base().name());
            let members = Table::new(format!("{}_members", o.name()), vec![Column::required("element_id", SqlType::Text)], &["element_id"])
                .references("element", "element_id", &base);
            doc.tables.push(members);
        } else {
            let base = key_table(o.base().name());
            let elements =
                Table::new(format!("{}_elements", o.name()), vec![Column::required("element_id", SqlType::Text)], &["element_id"]);
            let members = Table::new(
                format!("{}_members", o.name()),
                vec![Column::required("element_id", SqlType::Text), Column::required("member_id", SqlType::Text)],
                &["element_id", "member_id"],
            )
            .references("element", "element_id", &elements)
            .references("member", "member_id", &base);
            doc.tables.push(elements);
            doc.tables.push(members);
        }
    }
    doc
}

/// Parses the DDL subset produced by the printer.
pub fn parse_ddl(source: &str) -> Result<DdlDocument, String> {
    let toks = sql_tokens(source)?;
    let mut p = SqlParser { toks: &toks, idx: 0 };
    let mut doc = DdlDocument::default();
    while p.idx < toks.len() {
        doc.tables.push(p.table()?);
    }
    Ok(doc)
}

fn sql_tokens(source: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    let mut chars = source.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if "(),;".contains(c) {
            out.push(c.to_string());
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut end = i + c.len_utf8();
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(source[i..end].to_string());
        } else {
            return Err(format!("unexpected character `{c}` at byte {i}"));
        }
    }
    Ok(out)
}

struct SqlParser<'a> {
    toks: &'a [String],
    idx: usize,
}

impl SqlParser<'_> {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.idx).map(String::as_str)
    }

    fn next(&mut self) -> Result<&str, String> {
        let t = self.toks.get(self.idx).ok_or("unexpected end of DDL")?;
        self.idx += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &str) -> Result<(), String> {
        match self.next()? {
            t if t == want => Ok(()),
            t => Err(format!("expected `{want}`, found `{t}`")),
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        let t = self.next()?;
        if t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(t.to_string())
        } else {
            Err(format!("expected a name, found `{t}`"))
        }
    }

    fn names(&mut self) -> Result<Vec<String>, String> {
        self.expect("(")?;
        let mut out = vec![self.ident()?];
        while self.peek() == Some(",") {
            self.next()?;
            out.push(self.ident()?);
        }
        self.expect(")")?;
        Ok(out)
    }

    fn table(&mut self) -> Result<Table, String> {
        self.expect("CREATE")?;
        self.expect("TABLE")?;
        let name = self.ident()?;
        self.expect("(")?;
        let mut columns = Vec::new();
        let mut primary_key = None;
        let mut uniques = Vec::new();
        let mut foreign_keys = Vec::new();
        loop {
            if self.peek() == Some("CONSTRAINT") {
                self.next()?;
                let cname = self.ident()?;
                match self.next()? {
                    "PRIMARY" => {
                        self.expect("KEY")?;
                        let columns = self.names()?;
                        if primary_key.replace(Constraint { name: cname, columns }).is_some() {
                            return Err(format!("table `{name}` has two primary keys"));
                        }
                    }
                    "UNIQUE" => uniques.push(Constraint { name: cname, columns: self.names()? }),
                    "FOREIGN" => {
                        self.expect("KEY")?;
                        let columns = self.names()?;
                        self.expect("REFERENCES")?;
                        let table = self.ident()?;
                        let ref_columns = self.names()?;
                        foreign_keys.push(ForeignKey { name: cname, columns, table, ref_columns });
                    }
                    t => return Err(format!("unknown constraint kind `{t}`")),
                }
            } else {
                let cname = self.ident()?;
                let ty = match self.next()? {
                    "TEXT" => SqlType::Text,
                    "BIGINT" => SqlType::BigInt,
                    "BOOLEAN" => SqlType::Boolean,
                    t => return Err(format!("unknown column type `{t}`")),
                };
                let nullable = if self.peek() == Some("NOT") {
                    self.next()?;
                    self.expect("NULL")?;
                    false
                } else {
                    true
                };
                columns.push(Column { name: cname, ty, nullable });
            }
            match self.next()? {
                "," => continue,
                ")" => break,
                t => return Err(format!("expected `,` or `)`, found `{t}`")),
            }
        }
        self.expect(";")?;
        let primary_key = primary_key.ok_or_else(|| format!("table `{name}` has no primary key"))?;
        Ok(Table { name, columns, primary_key, uniques, foreign_keys })
    }
}
