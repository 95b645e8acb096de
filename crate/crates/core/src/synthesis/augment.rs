//! Enrollment-based RIR augmentation by direct-sound transplant.
//!
//! The enrollment RIR whose source-receiver distance is closest to the target keeps its
//! reverberant part untouched; only the direct sound is moved to the target's
//! propagation delay and rescaled by the 1/r law.

use super::{SynthesisError, DEFAULT_SPEED_OF_SOUND};
use crate::geometry::{distance, PointPosition};
use crate::metrics::DirectWindow;
use crate::signal::SampledSignal;

#[derive(Debug, Clone, PartialEq)]
pub struct EnrollmentEntry {
    pub rir: SampledSignal,
    pub source: PointPosition,
    pub receiver: PointPosition,
}

impl EnrollmentEntry {
    pub fn distance_m(&self) -> f64 {
        distance(self.source, self.receiver)
    }
}

/// Enrollment RIRs of one room. Never empty; all entries share a sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct EnrollmentSet {
    entries: Vec<EnrollmentEntry>,
}

impl EnrollmentSet {
    pub fn new(entries: Vec<EnrollmentEntry>) -> Result<Self, SynthesisError> {
        let first = entries.first().ok_or(SynthesisError::EmptyEnrollment)?;
        let rate = first.rir.sample_rate_hz();
        if let Some(e) = entries.iter().find(|e| e.rir.sample_rate_hz() != rate) {
            return Err(SynthesisError::MixedRates(rate, e.rir.sample_rate_hz()));
        }
        if entries.iter().any(|e| e.distance_m() == 0.0) {
            return Err(SynthesisError::ZeroDistance);
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[EnrollmentEntry] {
        &self.entries
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.entries[0].rir.sample_rate_hz()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub speed_of_sound_mps: f64,
    pub direct_window: DirectWindow,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            speed_of_sound_mps: DEFAULT_SPEED_OF_SOUND,
            direct_window: DirectWindow::default(),
        }
    }
}

/// Index of the entry to transplant from: an exact geometry match if there is one,
/// otherwise the smallest `|r_enrolled - r_target|`, earliest index on ties.
pub fn nearest_enrollment(
    enrollment: &EnrollmentSet,
    target_source: PointPosition,
    target_receiver: PointPosition,
) -> usize {
    if let Some(i) = enrollment
        .entries
        .iter()
        .position(|e| e.source == target_source && e.receiver == target_receiver)
    {
        return i;
    }
    let r = distance(target_source, target_receiver);
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for (i, e) in enrollment.entries.iter().enumerate() {
        let gap = (e.distance_m() - r).abs();
        if gap < best_gap {
            best_gap = gap;
            best = i;
        }
    }
    best
}

pub fn augment_from_enrollment(
    enrollment: &EnrollmentSet,
    target_source: PointPosition,
    target_receiver: PointPosition,
) -> Result<SampledSignal, SynthesisError> {
    augment_with(enrollment, target_source, target_receiver, &AugmentConfig::default())
}

/// Moves the direct sound of the nearest enrollment RIR by `(r_new - r_old) / c`
/// (rounded to whole samples) and scales it by `r_old / r_new`. Samples outside the old
/// and new direct windows are copied unchanged.
pub fn augment_with(
    enrollment: &EnrollmentSet,
    target_source: PointPosition,
    target_receiver: PointPosition,
    config: &AugmentConfig,
) -> Result<SampledSignal, SynthesisError> {
    if !(config.speed_of_sound_mps > 0.0) {
        return Err(SynthesisError::InvalidConfig("speed of sound must be positive".into()));
    }
    let r_new = distance(target_source, target_receiver);
    if r_new == 0.0 {
        return Err(SynthesisError::ZeroDistance);
    }
    let entry = &enrollment.entries[nearest_enrollment(enrollment, target_source, target_receiver)];
    let r_old = entry.distance_m();
    let rir = &entry.rir;
    let fs = f64::from(rir.sample_rate_hz());

    let window = config
        .direct_window
        .range(rir.peak_index(), rir.sample_rate_hz(), rir.len());
    let direct = rir.samples()[window.clone()].to_vec();
    let mut out = rir.samples().to_vec();
    out[window.clone()].fill(0.0);

    let shift = ((r_new - r_old) / config.speed_of_sound_mps * fs).round() as i64;
    let gain = r_old / r_new;
    let new_start = window.start as i64 + shift;
    let new_end = new_start + direct.len() as i64;
    if new_end > out.len() as i64 {
        out.resize(new_end as usize, 0.0);
    }
    for (j, &x) in direct.iter().enumerate() {
        let k = new_start + j as i64;
        if k >= 0 {
            out[k as usize] += gain * x;
        }
    }
    Ok(SampledSignal::new(out, rir.sample_rate_hz())?)
}
