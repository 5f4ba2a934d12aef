//! Compilation of a domain model into relational DDL, integrity checking,
//! and emission of load programs that rebuild a content snapshot in machine
//! memory.

use thiserror::Error;

use crate::cdm::DomainModel;

mod ddl;
mod integrity;
mod load;

pub use ddl::{parse_ddl, Column, Constraint, DdlDocument, ForeignKey, SqlType, Table};
pub use integrity::{check_integrity, Finding, IntegrityReport, Severity};
pub use load::{emit_load_program, mangle, LoadError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model failed integrity checks ({})", .0.summary())]
pub struct IntegrityFailed(pub IntegrityReport);

/// Relational schema for a model that passes [`check_integrity`].
pub fn translate_ddl(model: &DomainModel) -> Result<DdlDocument, IntegrityFailed> {
    let report = check_integrity(model);
    if !report.passed() {
        return Err(IntegrityFailed(report));
    }
    Ok(ddl::map_model(model))
}
