//! Octave band-pass filtering.
//!
//! Each band is a 6th-order Butterworth band-pass (third-order low-pass prototype,
//! bilinear transform with pre-warped edges) realised as three biquads. It is run
//! forward and then backward so the result has zero phase and a squared magnitude
//! response, unity at the band center.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;

use super::{MetricsError, OctaveBand};
use crate::signal::SampledSignal;

const PROTOTYPE_ORDER: usize = 3;

#[derive(Debug, Clone, Copy)]
struct Biquad {
    b: [f64; 3],
    a: [f64; 3],
}

impl Biquad {
    fn run(&self, data: &mut [f64]) {
        let (mut s1, mut s2) = (0.0, 0.0);
        for x in data.iter_mut() {
            let input = *x;
            let y = self.b[0] * input + s1;
            s1 = self.b[1] * input - self.a[1] * y + s2;
            s2 = self.b[2] * input - self.a[2] * y;
            *x = y;
        }
    }

    fn response(&self, z_inv: Complex<f64>) -> Complex<f64> {
        let z2 = z_inv * z_inv;
        (self.b[0] + z_inv * self.b[1] + z2 * self.b[2])
            / (self.a[0] + z_inv * self.a[1] + z2 * self.a[2])
    }
}

/// Band-pass cascade for one octave band at a given sample rate.
#[derive(Debug, Clone)]
pub struct OctaveFilter {
    sections: Vec<Biquad>,
    gain: f64,
    bandwidth_hz: f64,
    sample_rate_hz: u32,
}

impl OctaveFilter {
    pub fn design(band: OctaveBand, sample_rate_hz: u32) -> Result<Option<Self>, MetricsError> {
        let Some((lo, hi)) = band.edges_hz() else {
            return Ok(None);
        };
        if !band.fits(sample_rate_hz) {
            return Err(MetricsError::BandAboveNyquist {
                band,
                sample_rate_hz,
            });
        }
        let fs = f64::from(sample_rate_hz);
        let warp = |f: f64| 2.0 * fs * (PI * f / fs).tan();
        let (wl, wh) = (warp(lo), warp(hi));
        let w0 = (wl * wh).sqrt();
        let bw = wh - wl;

        let mut sections = Vec::with_capacity(PROTOTYPE_ORDER);
        for k in 0..PROTOTYPE_ORDER {
            let theta = PI * (2 * k + 1 + PROTOTYPE_ORDER) as f64 / (2 * PROTOTYPE_ORDER) as f64;
            let p = Complex::from_polar(1.0, theta);
            // Low-pass to band-pass: each prototype pole p yields the roots of s^2 - p*bw*s + w0^2.
            let pb = p * bw;
            let disc = (pb * pb - 4.0 * w0 * w0).sqrt();
            for s in [(pb + disc) / 2.0, (pb - disc) / 2.0] {
                // Conjugate pairs are formed from the upper-half-plane member only.
                if s.im <= 0.0 {
                    continue;
                }
                let z = (2.0 * fs + s) / (2.0 * fs - s);
                sections.push(Biquad {
                    b: [1.0, 0.0, -1.0],
                    a: [1.0, -2.0 * z.re, z.norm_sqr()],
                });
            }
        }
        debug_assert_eq!(sections.len(), PROTOTYPE_ORDER);

        let fc = band.center_hz().expect("octave band has a center");
        let z_inv = Complex::from_polar(1.0, -2.0 * PI * fc / fs);
        let at_center: Complex<f64> = sections.iter().map(|s| s.response(z_inv)).product();
        Ok(Some(Self {
            sections,
            gain: 1.0 / at_center.norm(),
            bandwidth_hz: hi - lo,
            sample_rate_hz,
        }))
    }

    /// Single-pass magnitude at `freq_hz`; the applied zero-phase response is its square.
    pub fn magnitude(&self, freq_hz: f64) -> f64 {
        let z_inv = Complex::from_polar(1.0, -2.0 * PI * freq_hz / f64::from(self.sample_rate_hz));
        let h: Complex<f64> = self.sections.iter().map(|s| s.response(z_inv)).product();
        self.gain * h.norm()
    }

    fn pass(&self, data: &mut [f64]) {
        for s in &self.sections {
            s.run(data);
        }
        for x in data.iter_mut() {
            *x *= self.gain;
        }
    }

    /// Zero-phase application. The input is zero-padded on both sides long enough for
    /// the filter ringing to die out, so onsets and the final decay are not cut off.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        let pad = (10.0 * f64::from(self.sample_rate_hz) / self.bandwidth_hz).ceil() as usize;
        let mut buf = vec![0.0; samples.len() + 2 * pad];
        buf[pad..pad + samples.len()].copy_from_slice(samples);
        self.pass(&mut buf);
        buf.reverse();
        self.pass(&mut buf);
        buf.reverse();
        buf[pad..pad + samples.len()].to_vec()
    }
}

/// Band-limits `signal` to `band`; broadband returns the input unchanged.
pub fn octave_filter(signal: &SampledSignal, band: OctaveBand) -> Result<SampledSignal, MetricsError> {
    match OctaveFilter::design(band, signal.sample_rate_hz())? {
        None => Ok(signal.clone()),
        Some(filter) => Ok(SampledSignal::new(
            filter.apply(signal.samples()),
            signal.sample_rate_hz(),
        )?),
    }
}
