//! End-to-end verification runs and their JSON reports.
//!
//! [`run_verify_family`] chains the polynomial, linear-algebra, flow and
//! Spin-lift checks for one family member, stopping at the first failing
//! stage. Reports are rendered by [`to_json`] with 17 significant digits per
//! float so identical configurations give byte-identical output.

mod config;
mod json;
mod run;

pub use config::{FamilySource, PipelineConfig, Tolerances};
pub use json::{to_json, to_json_pretty};
pub use run::{
    run_verify_family, ReportSummary, StageName, StageRecord, StageStatus, Verdict,
    VerificationReport, GLOBAL_ISOTOPY_HYPOTHESIS, SAMPLED_SMOOTHNESS_HYPOTHESIS,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Poly(#[from] crate::complete_intersections::PolyError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;
