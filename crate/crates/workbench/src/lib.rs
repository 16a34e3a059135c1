//! Corpus runner, comparison harness and report emission on top of
//! `anacomb-core`.

pub mod corpus;
pub mod report;

use anacomb_core::limitlaw::LimitLawError;
use anacomb_core::singular::SingularError;
use anacomb_core::specdsl::{CompileError, ParseError};
use anacomb_core::SeriesError;
use thiserror::Error;

pub use corpus::{corpus, find_entry, run_all, run_example, CorpusEntry, RunOptions};
pub use report::{
    compare, emit_report, Check, ComparisonReport, ComparisonRow, ReportFormat, Tolerance, Verdict,
    CSV_HEADER,
};

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("unknown corpus entry {0:?}")]
    UnknownEntry(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Singular(#[from] SingularError),
    #[error(transparent)]
    LimitLaw(#[from] LimitLawError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
