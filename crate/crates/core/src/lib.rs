//! Room impulse response analysis and challenge scoring.
//!
//! * [`signal`]: mono buffers, WAV I/O, resampling, convolution.
//! * [`metrics`]: octave filtering, Schroeder decay, T20, DRR, and the error aggregates.
//! * [`geometry`]: shoebox scenes and receiver grids.
//! * [`synthesis`]: image-source and Polack RIR generators, enrollment-based augmentation.
//! * [`harness`]: manifests, Task-1/Task-2 scoring, test-set assembly, submission checks.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod signal;

pub use signal::{SampledSignal, SignalError};
pub mod metrics;

pub use metrics::{describe, AcousticDescriptors, EnergyDecayFunction, MetricReport, OctaveBand};
pub mod geometry;

pub use geometry::{distance, PointPosition, ShoeboxScene};
pub mod synthesis;

pub use synthesis::{EnrollmentSet, IsmConfig};
pub mod harness;
