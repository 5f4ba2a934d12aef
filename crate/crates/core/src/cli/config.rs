use std::path::{Path, PathBuf};

use crate::lang::{key_value_lines, LangError};

/// A project file: line-oriented `key = value` pairs.
///
/// ```text
/// content_root = content
/// templates = templates/page.amt, templates/news.amt
/// bindings = bindings/page.amp
/// default_context = contexts/anonymous.ctx
/// output_dir = out
/// ```
///
/// Relative paths are resolved against the directory holding the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectConfig {
    pub content_root: PathBuf,
    pub templates: Vec<PathBuf>,
    pub bindings: Vec<PathBuf>,
    pub default_context: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug)]
pub enum ConfigError {
    Syntax(LangError),
    /// A key is missing, unknown or repeated, or a referenced path does not
    /// exist.
    Invalid(String),
    Io(std::io::Error),
}

impl ProjectConfig {
    pub fn parse(source: &str, base: &Path) -> Result<ProjectConfig, ConfigError> {
        let mut content_root = None;
        let mut templates = None;
        let mut bindings = None;
        let mut default_context = None;
        let mut output_dir = None;
        let list = |v: &str| -> Vec<PathBuf> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| base.join(s)).collect()
        };
        for (key, value, pos) in key_value_lines(&source.replace('\r', "")).map_err(ConfigError::Syntax)? {
            let previous = match key.as_str() {
                "content_root" => content_root.replace(base.join(&value)).is_some(),
                "templates" => templates.replace(list(&value)).is_some(),
                "bindings" => bindings.replace(list(&value)).is_some(),
                "default_context" => default_context.replace(base.join(&value)).is_some(),
                "output_dir" => output_dir.replace(base.join(&value)).is_some(),
                other => return Err(ConfigError::Invalid(format!("{pos}: unknown key `{other}`"))),
            };
            if previous {
                return Err(ConfigError::Syntax(LangError::DuplicateKey { key, pos }));
            }
        }
        let required = |name: &str| ConfigError::Invalid(format!("missing key `{name}`"));
        Ok(ProjectConfig {
            content_root: content_root.ok_or_else(|| required("content_root"))?,
            templates: templates.unwrap_or_default(),
            bindings: bindings.unwrap_or_default(),
            default_context,
            output_dir: output_dir.ok_or_else(|| required("output_dir"))?,
        })
    }

    /// Reads `path`, checks that every referenced input exists and creates
    /// the output directory.
    pub fn load(path: &Path) -> Result<ProjectConfig, ConfigError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let config = ProjectConfig::parse(&source, base)?;
        let inputs = std::iter::once(&config.content_root)
            .chain(&config.templates)
            .chain(&config.bindings)
            .chain(&config.default_context);
        for p in inputs {
            if !p.exists() {
                return Err(ConfigError::Invalid(format!("{} does not exist", p.display())));
            }
        }
        std::fs::create_dir_all(&config.output_dir).map_err(ConfigError::Io)?;
        Ok(config)
    }
}
