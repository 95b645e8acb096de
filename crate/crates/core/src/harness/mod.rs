//! Challenge plumbing: manifests, Task-1 and Task-2 scoring, reverberant test-set
//! assembly, and submission checks.

mod manifest;
mod task1;
mod task2;
mod testset;
mod validate;

use std::path::PathBuf;

use thiserror::Error;

pub use manifest::{
    check_disjoint, load_manifest, parse_manifest, position_key, request_id, utterance_id,
    EnrollmentRecord, EvalRequest, ScenarioManifest, TestUtteranceSpec, CHALLENGE_POSITIONS_PER_ROOM,
    CHALLENGE_REQUESTS_PER_ROOM, CHALLENGE_ROOMS_PER_SCENARIO, CHALLENGE_SPEAKERS_PER_POSITION,
    SCHEMA_VERSION,
};
pub use task1::score_task1;
pub use task2::{
    read_predictions, read_predictions_file, read_truth, score_task2, write_predictions, write_truth, BinStats,
    DistanceReport, Prediction, PredictionSet, DISTANCE_BIN_EDGES_M,
};
pub use testset::{
    build_test_set, build_test_set_with, SpeechCorpus, TestUtterance, TEST_DURATION_S,
    TEST_SAMPLE_RATE_HZ,
};
pub use validate::{validate_submission, Task, ValidationReport};

use crate::metrics::MetricsError;
use crate::signal::SignalError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("count violation: {0}")]
    Count(String),
    #[error("key mismatch: missing {missing:?}, unexpected {extra:?}")]
    KeyMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("duplicate utterance id {0}")]
    DuplicateId(String),
    #[error("non-positive prediction {value} for {id}")]
    NonPositivePrediction { id: String, value: f64 },
    #[error("missing RIR for {0}")]
    MissingRir(String),
    #[error("speech corpus is empty")]
    EmptyCorpus,
    #[error("{context}: {source}")]
    Metrics {
        context: String,
        #[source]
        source: MetricsError,
    },
    #[error("{context}: {source}")]
    Signal {
        context: String,
        #[source]
        source: SignalError,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn signal(context: impl Into<String>, source: SignalError) -> Self {
        Self::Signal {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn metrics(context: impl Into<String>, source: MetricsError) -> Self {
        Self::Metrics {
            context: context.into(),
            source,
        }
    }
}
