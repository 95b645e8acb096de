use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{SampledSignal, SignalError};

/// Above this many multiply-adds (`len(a) * len(b)`) [`convolve`] switches to the FFT path.
pub const FFT_THRESHOLD: usize = 1 << 20;

/// Full linear convolution (`len(a) + len(b) - 1` samples).
pub fn convolve(a: &SampledSignal, b: &SampledSignal) -> Result<SampledSignal, SignalError> {
    if a.len().saturating_mul(b.len()) > FFT_THRESHOLD {
        convolve_fft(a, b)
    } else {
        convolve_direct(a, b)
    }
}

fn check_rates(a: &SampledSignal, b: &SampledSignal) -> Result<(), SignalError> {
    if a.sample_rate_hz() != b.sample_rate_hz() {
        return Err(SignalError::RateMismatch(a.sample_rate_hz(), b.sample_rate_hz()));
    }
    Ok(())
}

pub fn convolve_direct(a: &SampledSignal, b: &SampledSignal) -> Result<SampledSignal, SignalError> {
    check_rates(a, b)?;
    let (x, h) = (a.samples(), b.samples());
    let mut out = vec![0.0; x.len() + h.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (o, &hj) in out[i..i + h.len()].iter_mut().zip(h) {
            *o += xi * hj;
        }
    }
    SampledSignal::new(out, a.sample_rate_hz())
}

pub fn convolve_fft(a: &SampledSignal, b: &SampledSignal) -> Result<SampledSignal, SignalError> {
    check_rates(a, b)?;
    let out_len = a.len() + b.len() - 1;
    let n = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let load = |s: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (c, &v) in buf.iter_mut().zip(s) {
            c.re = v;
        }
        buf
    };
    let mut fa = load(a.samples());
    let mut fb = load(b.samples());
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    let out = fa[..out_len].iter().map(|c| c.re * scale).collect();
    SampledSignal::new(out, a.sample_rate_hz())
}
