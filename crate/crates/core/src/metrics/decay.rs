//! Schroeder backward integration and reverberation-time fitting.

use serde::{Deserialize, Serialize};

use super::{octave_filter, MetricsError, OctaveBand};
use crate::signal::SampledSignal;

/// Floor substituted for `log10(0)` and anything below it.
pub const EDF_FLOOR_DB: f64 = -120.0;

/// Upper and lower limits of the T20 evaluation range, in dB below the start of decay.
pub const T20_RANGE_DB: (f64, f64) = (-5.0, -25.0);

/// Normalized backward-integrated energy in dB.
///
/// `values_db[0]` is exactly 0 and the sequence never increases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDecayFunction {
    pub values_db: Vec<f64>,
    pub sample_rate_hz: u32,
    pub band: OctaveBand,
}

impl EnergyDecayFunction {
    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    /// Same values on a time axis scaled by `sample_rate_hz / new_rate`.
    pub fn with_sample_rate(&self, sample_rate_hz: u32) -> Self {
        Self {
            sample_rate_hz,
            ..self.clone()
        }
    }
}

/// Schroeder integral of already band-limited samples.
pub fn decay_curve(samples: &[f64]) -> Result<Vec<f64>, MetricsError> {
    let mut tail = vec![0.0; samples.len()];
    let mut acc = 0.0;
    for (t, &x) in tail.iter_mut().zip(samples).rev() {
        acc += x * x;
        *t = acc;
    }
    let total = acc;
    if !(total > 0.0) || !total.is_finite() {
        return Err(MetricsError::ZeroEnergy);
    }
    Ok(tail
        .into_iter()
        .map(|e| (10.0 * (e / total).log10()).max(EDF_FLOOR_DB))
        .collect())
}

/// Energy decay function of `rir` after filtering to `band`.
pub fn schroeder_edf(rir: &SampledSignal, band: OctaveBand) -> Result<EnergyDecayFunction, MetricsError> {
    let filtered = octave_filter(rir, band)?;
    Ok(EnergyDecayFunction {
        values_db: decay_curve(filtered.samples())?,
        sample_rate_hz: rir.sample_rate_hz(),
        band,
    })
}

/// T20: least-squares line through the EDF samples between -5 and -25 dB, extrapolated
/// to a 60 dB decay (`-60 / slope`).
pub fn estimate_t20(edf: &EnergyDecayFunction) -> Result<f64, MetricsError> {
    let (upper, lower) = T20_RANGE_DB;
    let reached = edf.values_db.iter().any(|&v| v <= lower);
    if !reached {
        return Err(MetricsError::InsufficientDecay {
            band: edf.band,
            needed_db: lower,
        });
    }
    let dt = 1.0 / f64::from(edf.sample_rate_hz);
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &v) in edf.values_db.iter().enumerate() {
        if v <= upper && v >= lower {
            let t = i as f64 * dt;
            n += 1.0;
            sx += t;
            sy += v;
            sxx += t * t;
            sxy += t * v;
        }
    }
    let denom = n * sxx - sx * sx;
    if n < 2.0 || denom <= 0.0 {
        return Err(MetricsError::InsufficientDecay {
            band: edf.band,
            needed_db: lower,
        });
    }
    let slope = (n * sxy - sx * sy) / denom;
    if !(slope < 0.0) {
        return Err(MetricsError::InsufficientDecay {
            band: edf.band,
            needed_db: lower,
        });
    }
    Ok(-60.0 / slope)
}
