//! Mono sample buffers and the primitive operations every other module builds on.

mod convolve;
mod resample;
mod wav;

pub use convolve::{convolve, convolve_direct, convolve_fft, FFT_THRESHOLD};
pub use resample::resample;
pub use wav::{read_wav, read_wav_from, write_wav, write_wav_to, WavFormat};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SignalError {
    #[error("signal has no samples")]
    Empty,
    #[error("sample rate must be positive")]
    ZeroSampleRate,
    #[error("sample-rate mismatch: {0} Hz vs {1} Hz")]
    RateMismatch(u32, u32),
    #[error("channel count ≠ 1 (found {0})")]
    ChannelCount(u16),
    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),
    #[error("malformed WAV: {0}")]
    Malformed(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A mono buffer of real amplitudes at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self, SignalError> {
        if sample_rate_hz == 0 {
            return Err(SignalError::ZeroSampleRate);
        }
        if samples.is_empty() {
            return Err(SignalError::Empty);
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    /// All-zero signal of `len` samples.
    pub fn zeros(len: usize, sample_rate_hz: u32) -> Result<Self, SignalError> {
        Self::new(vec![0.0; len], sample_rate_hz)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|x| x * x).sum()
    }

    pub fn rms(&self) -> f64 {
        (self.energy() / self.samples.len() as f64).sqrt()
    }

    /// Index of the sample with the largest magnitude (first one on ties).
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        let mut best_abs = f64::NEG_INFINITY;
        for (i, x) in self.samples.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        best
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * gain).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    /// Same samples reinterpreted at a different rate (stretches or squeezes the time axis).
    pub fn with_sample_rate(mut self, sample_rate_hz: u32) -> Result<Self, SignalError> {
        if sample_rate_hz == 0 {
            return Err(SignalError::ZeroSampleRate);
        }
        self.sample_rate_hz = sample_rate_hz;
        Ok(self)
    }

    pub(crate) fn first_non_finite(&self) -> Option<usize> {
        self.samples.iter().position(|x| !x.is_finite())
    }
}
