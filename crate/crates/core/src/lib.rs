//! Typed content templating on an abstract machine.
//!
//! * [`cdm`] holds the conceptual data model: concepts, individuals, states,
//!   variable domains, formulas, definite descriptions and comprehension.
//! * [`lang`] is the concrete syntax of binding programs and file formats.
//! * [`machine`] is the abstract machine with its two evaluators.
//! * [`templating`] binds programs to templates and renders pages.
//! * [`translate`] compiles models to relational DDL and stores to load
//!   programs.
//! * [`cli`] drives the `amcm` command.

pub mod cdm;
pub mod cli;
pub mod lang;
pub mod machine;
pub mod templating;
pub mod translate;
pub mod value;

pub use lang::{ComAst, ExpAst, Pos};
pub use machine::{Env, ErrorKind, MachineError, MachineState, Memory};
pub use templating::{ContentStore, PersonalizationContext, Template};
pub use value::{ContentType, Literal, Value};
