//! Per-RIR acoustic descriptors and the Task-1 error aggregates.

mod aggregate;
mod band;
mod decay;
mod drr;
mod filter;
mod report;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use aggregate::{drr_mse, edf_mse, edf_pair_mse, mape, pairwise_sum, t20_mape};
pub use band::OctaveBand;
pub use decay::{decay_curve, estimate_t20, schroeder_edf, EnergyDecayFunction, EDF_FLOOR_DB, T20_RANGE_DB};
pub use drr::{estimate_drr, estimate_drr_with, DirectWindow};
pub use filter::{octave_filter, OctaveFilter};
pub use report::MetricReport;

use crate::signal::{SampledSignal, SignalError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("signal has zero energy")]
    ZeroEnergy,
    #[error("band {band} is above Nyquist at {sample_rate_hz} Hz")]
    BandAboveNyquist { band: OctaveBand, sample_rate_hz: u32 },
    #[error("decay range insufficient: {band} EDF never reaches {needed_db} dB")]
    InsufficientDecay { band: OctaveBand, needed_db: f64 },
    #[error("no reverberant tail")]
    NoReverberantTail,
    #[error("length mismatch: {predicted} predicted vs {reference} reference")]
    LengthMismatch { predicted: usize, reference: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("missing band {band} at index {index}")]
    MissingBand { index: usize, band: OctaveBand },
    #[error("reference value at index {index} must be positive, got {value}")]
    NonPositiveReference { index: usize, value: f64 },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("sample-rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Octave-band decays are only fitted while the band stays this far above the
/// broadband energy; anything lower is treated as numerical leakage.
pub const BAND_FLOOR_DB: f64 = -80.0;

/// Everything the Task-1 metrics need from one RIR.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AcousticDescriptors {
    /// Bands whose T20 could not be estimated are absent.
    pub t20_s: BTreeMap<OctaveBand, f64>,
    pub drr_db: Option<f64>,
    /// Why `drr_db` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drr_error: Option<String>,
    #[serde(skip)]
    pub edfs: BTreeMap<OctaveBand, EnergyDecayFunction>,
}

/// EDFs, T20 (broadband and every octave below Nyquist) and DRR of one RIR.
pub fn describe(rir: &SampledSignal) -> Result<AcousticDescriptors, MetricsError> {
    let total = rir.energy();
    if !(total > 0.0) || !total.is_finite() {
        return Err(MetricsError::ZeroEnergy);
    }
    let mut out = AcousticDescriptors::default();
    for band in OctaveBand::ALL {
        if !band.fits(rir.sample_rate_hz()) {
            continue;
        }
        let filtered = octave_filter(rir, band)?;
        let band_energy: f64 = filtered.energy();
        let values_db = match decay_curve(filtered.samples()) {
            Ok(v) => v,
            Err(MetricsError::ZeroEnergy) => continue,
            Err(e) => return Err(e),
        };
        let edf = EnergyDecayFunction {
            values_db,
            sample_rate_hz: rir.sample_rate_hz(),
            band,
        };
        let level_db = 10.0 * (band_energy / total).log10();
        let usable = edf
            .values_db
            .iter()
            .take_while(|&&v| v + level_db >= BAND_FLOOR_DB)
            .count();
        let fit_input = EnergyDecayFunction {
            values_db: edf.values_db[..usable].to_vec(),
            ..edf.clone()
        };
        if let Ok(t20) = estimate_t20(&fit_input) {
            out.t20_s.insert(band, t20);
        }
        out.edfs.insert(band, edf);
    }
    match estimate_drr(rir) {
        Ok(d) => out.drr_db = Some(d),
        Err(e) => out.drr_error = Some(e.to_string()),
    }
    Ok(out)
}
