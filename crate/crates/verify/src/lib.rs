//! Randomized verification suites for `lcstar`: seeded instance generation,
//! property runs with replayable failure records, and JSON reports.

pub mod instance;
pub mod suites;

pub use instance::{gen_instance, Instance, InstanceSpec};
pub use suites::{
    check_instance, run_on_instance, run_suite, run_suite_with_workers, Suite, SuiteReport,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("unknown suite {0:?} (expected one of calculus, cone, lemmas, theorem, system, all)")]
    UnknownSuite(String),
    #[error(transparent)]
    Core(#[from] lcstar::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
