use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

use super::variant::{select, Guard, NoVariant, PersonalizationContext};
use crate::value::{ContentType, Value};

/// A typed content object with personalization variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentObject {
    pub path: String,
    pub ty: ContentType,
    /// In declaration order; a `default` guard, if any, comes last.
    pub variants: Vec<(Guard, Value)>,
}

impl ContentObject {
    /// Checks the variant invariants: at most one `default`, placed last,
    /// and every payload tagged with the declared type.
    pub fn new(path: impl Into<String>, ty: ContentType, variants: Vec<(Guard, Value)>) -> Result<Self, String> {
        let defaults = variants.iter().filter(|(g, _)| *g == Guard::Default).count();
        if defaults > 1 {
            return Err("more than one `default` variant".into());
        }
        if defaults == 1 && variants.last().map(|(g, _)| g) != Some(&Guard::Default) {
            return Err("the `default` variant must be last".into());
        }
        if let Some((_, v)) = variants.iter().find(|(_, v)| v.tag() != ty) {
            return Err(format!("payload of type {} in a {} object", v.tag(), ty));
        }
        Ok(ContentObject { path: path.into(), ty, variants })
    }

    pub fn resolve(&self, ctx: &PersonalizationContext) -> Result<&Value, NoVariant> {
        select(&self.variants, ctx)
    }
}

/// Selects the variant of `obj` for `ctx`.
pub fn resolve_variant(obj: &ContentObject, ctx: &PersonalizationContext) -> Result<Value, NoVariant> {
    obj.resolve(ctx).cloned()
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{file}:{line}: {message}")]
    Parse { file: String, line: usize, message: String },
    #[error("duplicate content path `{0}`")]
    DuplicatePath(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

/// Content objects keyed by normalized path (`/`-separated, no `.` or `..`
/// segments).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContentStore {
    objects: BTreeMap<String, ContentObject>,
}

impl ContentStore {
    pub fn insert(&mut self, obj: ContentObject) -> Result<(), StoreError> {
        let normal = !obj.path.is_empty()
            && obj.path.split('/').all(|seg| !seg.is_empty() && seg != "." && seg != "..");
        if !normal {
            return Err(StoreError::Parse {
                file: obj.path.clone(),
                line: 0,
                message: "content path is not normalized".into(),
            });
        }
        if self.objects.contains_key(&obj.path) {
            return Err(StoreError::DuplicatePath(obj.path));
        }
        self.objects.insert(obj.path.clone(), obj);
        Ok(())
    }

    pub fn get(&self, path: &str) -> Option<&ContentObject> {
        self.objects.get(path)
    }

    /// Objects in path order.
    pub fn iter(&self) -> impl Iterator<Item = &ContentObject> {
        self.objects.values()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }
}

impl FromIterator<ContentObject> for Result<ContentStore, StoreError> {
    fn from_iter<I: IntoIterator<Item = ContentObject>>(iter: I) -> Self {
        let mut store = ContentStore::default();
        for obj in iter {
            store.insert(obj)?;
        }
        Ok(store)
    }
}

/// Loads every `.amc` file under `root`; the path of each object is its
/// relative file path without the extension.
pub fn load_store(root: &Path) -> Result<ContentStore, StoreError> {
    let mut store = ContentStore::default();
    let walker = WalkDir::new(root).follow_links(true).sort_by_file_name();
    for entry in walker {
        let entry = entry.map_err(|e| StoreError::Io {
            path: e.path().unwrap_or(root).to_path_buf(),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("directory loop")),
        })?;
        let file = entry.path();
        if !entry.file_type().is_file() || file.extension().and_then(|e| e.to_str()) != Some("amc") {
            continue;
        }
        let rel = file.strip_prefix(root).expect("walkdir yields paths under root").with_extension("");
        let display = file.display().to_string();
        let mut segments = Vec::new();
        for comp in rel.components() {
            let seg = comp.as_os_str().to_str().ok_or_else(|| StoreError::Parse {
                file: display.clone(),
                line: 0,
                message: "file name is not valid UTF-8".into(),
            })?;
            segments.push(seg);
        }
        let source = std::fs::read_to_string(file).map_err(|source| StoreError::Io { path: file.to_path_buf(), source })?;
        let obj = parse_content(&segments.join("/"), &source).map_err(|(line, message)| StoreError::Parse {
            file: display.clone(),
            line,
            message,
        })?;
        store.insert(obj)?;
    }
    Ok(store)
}

/// Parses an `.amc` file.
///
/// ```text
/// type: Text
/// variant p=registered & s.lang=en:
/// ---
/// Welcome back!
/// variant default:
/// ---
/// Welcome!
/// ```
///
/// A file without `variant` headers has a single `default` payload after
/// the first `---`. Errors carry a 1-based line number.
pub fn parse_content(path: &str, source: &str) -> Result<ContentObject, (usize, String)> {
    let lines: Vec<&str> = source.lines().collect();
    let header = lines.first().ok_or((1, "missing `type:` header".to_string()))?;
    let ty = header
        .strip_prefix("type:")
        .ok_or((1, "expected `type: <Type>` header".to_string()))?
        .trim()
        .parse::<ContentType>()
        .map_err(|e| (1, format!("bad type: {e}")))?;

    let is_variant_header = |i: usize| {
        lines[i].starts_with("variant ")
            && lines[i].trim_end().ends_with(':')
            && lines.get(i + 1).map(|l| l.trim_end()) == Some("---")
    };

    let mut raw: Vec<(Guard, usize, Vec<&str>)> = Vec::new();
    let mut i = 1;
    if lines.get(1).map(|l| l.trim_end()) == Some("---") {
        raw.push((Guard::Default, 3, lines[2..].to_vec()));
    } else {
        while i < lines.len() {
            if !is_variant_header(i) {
                if lines[i].trim().is_empty() && raw.is_empty() {
                    i += 1;
                    continue;
                }
                return Err((i + 1, "expected `variant <guard>:` followed by `---`".into()));
            }
            let text = lines[i].trim_end();
            let guard_text = &text["variant ".len()..text.len() - 1];
            let guard = Guard::parse(guard_text).map_err(|m| (i + 1, m))?;
            let start = i + 2;
            let mut end = start;
            while end < lines.len() && !is_variant_header(end) {
                end += 1;
            }
            raw.push((guard, start + 1, lines[start..end].to_vec()));
            i = end;
        }
        if raw.is_empty() {
            return Err((2, "expected `---` or a `variant` section".into()));
        }
    }

    let mut variants = Vec::new();
    for (guard, first_line, mut body) in raw {
        while body.last().is_some_and(|l| l.trim().is_empty()) {
            body.pop();
        }
        let payload = parse_payload(&ty, &body).map_err(|m| (first_line, m))?;
        variants.push((guard, payload));
    }
    ContentObject::new(path, ty, variants).map_err(|m| (1, m))
}

fn parse_atomic(ty: &ContentType, text: &str) -> Result<Value, String> {
    match ty {
        ContentType::Text => Ok(Value::Text(text.to_string())),
        ContentType::Markup => Ok(Value::Markup(text.to_string())),
        ContentType::Int => text
            .trim()
            .parse()
            .map(Value::Int)
            .map_err(|_| format!("`{}` is not an Int", text.trim())),
        ContentType::Bool => match text.trim() {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            other => Err(format!("`{other}` is not a Bool")),
        },
        other => Err(format!("nested {other} payloads are not supported")),
    }
}

/// List payloads have one element per non-empty line; record payloads have
/// one `field: value` line per declared field.
fn parse_payload(ty: &ContentType, body: &[&str]) -> Result<Value, String> {
    match ty {
        ContentType::List(elem) => {
            let items = body
                .iter()
                .filter(|l| !l.trim().is_empty())
                .map(|l| parse_atomic(elem, l.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::List((**elem).clone(), items))
        }
        ContentType::Record(fields) => {
            let mut out = BTreeMap::new();
            for line in body.iter().filter(|l| !l.trim().is_empty()) {
                let (name, value) = line.split_once(':').ok_or_else(|| format!("`{line}` is not `field: value`"))?;
                let name = name.trim();
                let field_ty = fields.get(name).ok_or_else(|| format!("unknown record field `{name}`"))?;
                if out.insert(name.to_string(), parse_atomic(field_ty, value.trim())?).is_some() {
                    return Err(format!("record field `{name}` repeats"));
                }
            }
            if let Some(missing) = fields.keys().find(|k| !out.contains_key(*k)) {
                return Err(format!("record field `{missing}` is missing"));
            }
            Ok(Value::Record(out))
        }
        atomic => parse_atomic(atomic, &body.join("\n")),
    }
}
