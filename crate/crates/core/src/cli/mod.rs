//! The `amcm` command.
//!
//! Exit codes: 0 success, 1 usage or I/O failure, 2 a parse failure of any
//! input or a failed integrity check, 3 a machine error.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::cdm::parse_model;
use crate::lang::{parse_binding, parse_context, parse_program_source, parse_template, tokenize, TokenKind};
use crate::machine::{self, Env, MachineError};
use crate::templating::{load_store, render_page, ContentStore, PersonalizationContext, StoreError, Template};
use crate::translate::{check_integrity, emit_load_program, translate_ddl};
use crate::value::Value;

mod config;

pub use config::{ConfigError, ProjectConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_MACHINE: i32 = 3;

/// Environment variable naming the project file; defaults to `./amcm.conf`.
pub const PROJECT_VAR: &str = "AMCM_PROJECT";

#[derive(Debug, Parser)]
#[command(name = "amcm", version, about = "Typed content templating on an abstract machine")]
struct Cli {
    /// Print timing lines to standard error.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a domain model for completeness, consistency and integrity.
    Check { model: PathBuf },
    /// Render a template of the project to `<output_dir>/<template>.html`.
    Render {
        template: String,
        #[arg(long)]
        context: Option<PathBuf>,
        /// Also write the small-step trace to `<output_dir>/<template>.trace`.
        #[arg(long)]
        trace: bool,
    },
    /// Translate a domain model to DDL, and the project store to a load program.
    Translate {
        model: PathBuf,
        #[arg(long)]
        ddl: Option<PathBuf>,
        #[arg(long)]
        load: Option<PathBuf>,
        #[arg(long)]
        context: Option<PathBuf>,
    },
    /// Run a binding program and print the final memory and output.
    Eval {
        program: PathBuf,
        /// One literal per line, consumed by `read()`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        context: Option<PathBuf>,
    },
}

/// A failed command: exit code plus the message for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }

    fn invalid(message: impl Display) -> Self {
        Failure { code: EXIT_INVALID, message: message.to_string() }
    }

    fn machine(e: &MachineError) -> Self {
        Failure {
            code: EXIT_MACHINE,
            message: format!("{} `{}` at {}: {}", e.kind, e.subject, e.pos, e.detail),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Syntax(e) => Failure::invalid(format!("project file: {e}")),
            ConfigError::Invalid(m) => Failure::usage(format!("project file: {m}")),
            ConfigError::Io(e) => Failure::usage(format!("project file: {e}")),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } => Failure::usage(e),
            _ => Failure::invalid(e),
        }
    }
}

type CmdResult = Result<(), Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    verbose: bool,
    project: Option<PathBuf>,
}

impl Io<'_> {
    fn timing(&mut self, what: &str, since: Instant) {
        if self.verbose {
            let _ = writeln!(self.err, "timing: {what} {:.3}ms", since.elapsed().as_secs_f64() * 1e3);
        }
    }

    fn config(&self) -> Result<ProjectConfig, Failure> {
        Ok(ProjectConfig::load(&self.config_path())?)
    }

    fn config_path(&self) -> PathBuf {
        self.project.clone().unwrap_or_else(|| PathBuf::from("amcm.conf"))
    }

    /// The project, if one is named explicitly or `./amcm.conf` exists.
    fn optional_config(&self) -> Result<Option<ProjectConfig>, Failure> {
        if self.project.is_none() && !self.config_path().exists() {
            return Ok(None);
        }
        self.config().map(Some)
    }
}

/// Runs the command line `args` (program name first), reading the project
/// path from [`PROJECT_VAR`].
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let project = std::env::var_os(PROJECT_VAR).map(PathBuf::from);
    run_with_project(args, project, out, err)
}

pub fn run_with_project(
    args: impl IntoIterator<Item = OsString>,
    project: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err, verbose: cli.verbose, project };
    let result = match cli.command {
        Command::Check { model } => cmd_check(&mut io, &model),
        Command::Render { template, context, trace } => cmd_render(&mut io, &template, context.as_deref(), trace),
        Command::Translate { model, ddl, load, context } => {
            cmd_translate(&mut io, &model, ddl.as_deref(), load.as_deref(), context.as_deref())
        }
        Command::Eval { program, input, context } => cmd_eval(&mut io, &program, input.as_deref(), context.as_deref()),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn parsed<T, E: Display>(path: &Path, r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory, then renames,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> CmdResult {
    write_atomic(path, bytes).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn load_context(explicit: Option<&Path>, fallback: Option<&Path>) -> Result<PersonalizationContext, Failure> {
    match explicit.or(fallback) {
        Some(path) => parsed(path, parse_context(&read(path)?)),
        None => Ok(PersonalizationContext::default()),
    }
}

fn cmd_check(io: &mut Io<'_>, path: &Path) -> CmdResult {
    let start = Instant::now();
    let model = parsed(path, parse_model(&read(path)?))?;
    let report = check_integrity(&model);
    io.timing("check", start);
    write!(io.out, "{report}").map_err(Failure::usage)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::invalid(format!("{} failed integrity checks", path.display())))
    }
}

fn find_template(config: &ProjectConfig, name: &str) -> Result<Template, Failure> {
    for path in &config.templates {
        let t = parsed(path, parse_template(&read(path)?))?;
        if t.name == name {
            return Ok(t);
        }
    }
    Err(Failure::usage(format!("no template named `{name}` in the project")))
}

fn find_binding(config: &ProjectConfig, name: &str) -> Result<crate::lang::ComAst, Failure> {
    for path in &config.bindings {
        let b = parsed(path, parse_binding(&read(path)?))?;
        if b.template == name {
            return Ok(b.program);
        }
    }
    Err(Failure::usage(format!("no binding for template `{name}` in the project")))
}

fn cmd_render(io: &mut Io<'_>, name: &str, context: Option<&Path>, trace: bool) -> CmdResult {
    let start = Instant::now();
    let config = io.config()?;
    let template = find_template(&config, name)?;
    let program = find_binding(&config, name)?;
    let store = load_store(&config.content_root)?;
    let ctx = load_context(context, config.default_context.as_deref())?;
    io.timing("load", start);

    let start = Instant::now();
    let page = render_page(&template, &program, &store, &ctx).map_err(|e| Failure::machine(&e))?;
    let trace_text = trace.then(|| {
        let env = Env::new(&store, &ctx).with_slots(&template.slots);
        let (lines, _) = machine::trace(&program, [], &env);
        lines.iter().map(|l| format!("{l}\n")).collect::<String>()
    });
    io.timing("render", start);

    let html = config.output_dir.join(format!("{name}.html"));
    if let Some(text) = trace_text {
        write_file(&config.output_dir.join(format!("{name}.trace")), text.as_bytes())?;
    }
    write_file(&html, page.markup.as_bytes())?;
    writeln!(io.out, "wrote {}", html.display()).map_err(Failure::usage)?;
    Ok(())
}

fn cmd_translate(
    io: &mut Io<'_>,
    path: &Path,
    ddl_out: Option<&Path>,
    load_out: Option<&Path>,
    context: Option<&Path>,
) -> CmdResult {
    let start = Instant::now();
    let model = parsed(path, parse_model(&read(path)?))?;
    let ddl = match translate_ddl(&model) {
        Ok(doc) => doc.to_string(),
        Err(failed) => {
            write!(io.err, "{}", failed.0).map_err(Failure::usage)?;
            return Err(Failure::invalid(format!("{}: {failed}", path.display())));
        }
    };
    let load = match load_out {
        None => None,
        Some(_) => {
            let config = io.config()?;
            let store = load_store(&config.content_root)?;
            let ctx = load_context(context, config.default_context.as_deref())?;
            let program = emit_load_program(&store, &ctx).map_err(Failure::invalid)?;
            Some(program.to_string())
        }
    };
    io.timing("translate", start);

    match (ddl_out, load_out.zip(load)) {
        (None, None) => io.out.write_all(ddl.as_bytes()).map_err(Failure::usage)?,
        (ddl_path, load) => {
            if let Some(p) = ddl_path {
                write_file(p, ddl.as_bytes())?;
            }
            if let Some((p, text)) = load {
                write_file(p, text.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// One literal per non-blank line.
fn parse_input(source: &str) -> Result<Vec<Value>, String> {
    let mut values = Vec::new();
    for (i, line) in source.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let toks = tokenize(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        match toks.as_slice() {
            [t] => match &t.kind {
                TokenKind::Literal(lit) => values.push(lit.clone().into()),
                _ => return Err(format!("line {}: expected a literal", i + 1)),
            },
            _ => return Err(format!("line {}: expected exactly one literal", i + 1)),
        }
    }
    Ok(values)
}

fn cmd_eval(io: &mut Io<'_>, path: &Path, input: Option<&Path>, context: Option<&Path>) -> CmdResult {
    let start = Instant::now();
    let source = read(path)?;
    let program = if source.trim_start().starts_with("bind") {
        parsed(path, parse_binding(&source))?.program
    } else {
        parsed(path, parse_program_source(&source))?
    };
    let values = match input {
        Some(p) => parsed(p, parse_input(&read(p)?))?,
        None => Vec::new(),
    };
    let config = io.optional_config()?;
    let store = match &config {
        Some(c) => load_store(&c.content_root)?,
        None => ContentStore::default(),
    };
    let ctx = load_context(context, config.as_ref().and_then(|c| c.default_context.as_deref()))?;
    let state = machine::run(&program, values, &Env::new(&store, &ctx)).map_err(|e| Failure::machine(&e))?;
    io.timing("eval", start);
    let output: Vec<String> = state.output.iter().map(Value::to_string).collect();
    writeln!(io.out, "memory: {}", state.memory).map_err(Failure::usage)?;
    writeln!(io.out, "output: [{}]", output.join(", ")).map_err(Failure::usage)?;
    Ok(())
}
