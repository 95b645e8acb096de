//! Baseline RIR generators.

mod augment;
mod ism;
mod polack;

pub use augment::{
    augment_from_enrollment, augment_with, nearest_enrollment, AugmentConfig, EnrollmentEntry,
    EnrollmentSet,
};
pub use ism::{image_source_rir, image_sources, Arrival};
pub use polack::polack_rir;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::signal::SignalError;

pub const DEFAULT_SPEED_OF_SOUND: f64 = 343.0;
pub const MAX_ISM_ORDER: u32 = 50;

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("source and receiver coincide")]
    ZeroDistance,
    #[error("enrollment set is empty")]
    EmptyEnrollment,
    #[error("enrollment RIRs have mixed sample rates ({0} Hz and {1} Hz)")]
    MixedRates(u32, u32),
    #[error("T60 must be positive, got {0}")]
    NonPositiveT60(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Image-source and Polack generator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IsmConfig {
    pub max_order: u32,
    pub speed_of_sound_mps: f64,
    pub sample_rate_hz: u32,
    pub rng_seed: u64,
}

impl Default for IsmConfig {
    fn default() -> Self {
        Self {
            max_order: 20,
            speed_of_sound_mps: DEFAULT_SPEED_OF_SOUND,
            sample_rate_hz: 32000,
            rng_seed: 0,
        }
    }
}

impl IsmConfig {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        if self.max_order > MAX_ISM_ORDER {
            return Err(SynthesisError::InvalidConfig(format!(
                "max_order {} exceeds {MAX_ISM_ORDER}",
                self.max_order
            )));
        }
        if self.sample_rate_hz < 8000 {
            return Err(SynthesisError::InvalidConfig(format!(
                "sample rate {} Hz is below 8000 Hz",
                self.sample_rate_hz
            )));
        }
        if !(self.speed_of_sound_mps > 0.0) || !self.speed_of_sound_mps.is_finite() {
            return Err(SynthesisError::InvalidConfig(
                "speed of sound must be positive".into(),
            ));
        }
        Ok(())
    }
}
