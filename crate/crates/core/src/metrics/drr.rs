use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::signal::SampledSignal;

/// Tail energy below this fraction of the total counts as no tail at all.
const MIN_TAIL_FRACTION: f64 = 1e-12;

/// Window around the absolute peak that is counted as direct sound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectWindow {
    pub before_s: f64,
    pub after_s: f64,
}

impl Default for DirectWindow {
    fn default() -> Self {
        Self {
            before_s: 0.5e-3,
            after_s: 2.5e-3,
        }
    }
}

impl DirectWindow {
    /// Half-open sample range `[start, end)` of the window around `peak`, clipped to `len`.
    pub fn range(&self, peak: usize, sample_rate_hz: u32, len: usize) -> std::ops::Range<usize> {
        let fs = f64::from(sample_rate_hz);
        let before = (self.before_s * fs).round() as usize;
        let after = (self.after_s * fs).round() as usize;
        peak.saturating_sub(before)..(peak + after + 1).min(len)
    }
}

/// Direct-to-reverberant ratio in dB with the default window.
pub fn estimate_drr(rir: &SampledSignal) -> Result<f64, MetricsError> {
    estimate_drr_with(rir, DirectWindow::default())
}

pub fn estimate_drr_with(rir: &SampledSignal, window: DirectWindow) -> Result<f64, MetricsError> {
    let total = rir.energy();
    if !(total > 0.0) || !total.is_finite() {
        return Err(MetricsError::ZeroEnergy);
    }
    let range = window.range(rir.peak_index(), rir.sample_rate_hz(), rir.len());
    let direct: f64 = rir.samples()[range.clone()].iter().map(|x| x * x).sum();
    let rest: f64 = rir.samples()[..range.start]
        .iter()
        .chain(&rir.samples()[range.end..])
        .map(|x| x * x)
        .sum();
    if rest < MIN_TAIL_FRACTION * total {
        return Err(MetricsError::NoReverberantTail);
    }
    Ok(10.0 * (direct / rest).log10())
}
