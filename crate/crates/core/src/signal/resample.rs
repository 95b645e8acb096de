//! Polyphase windowed-sinc sample-rate conversion.

use super::SampledSignal;

/// Kernel half-width, in zero crossings of the lower of the two rates.
const ZERO_CROSSINGS: usize = 32;
const KAISER_BETA: f64 = 8.0;
/// Cutoff as a fraction of the lower Nyquist frequency.
const CUTOFF: f64 = 0.94;
/// Upper bound on stored filter phases; finer rational ratios are rounded to the nearest phase.
const MAX_PHASES: u64 = 4096;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zeroth-order modified Bessel function of the first kind (power series).
pub(crate) fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

struct PolyphaseBank {
    /// `taps[phase * width + j]` weights input sample `base - half + 1 + j`.
    taps: Vec<f64>,
    width: usize,
    half: usize,
}

impl PolyphaseBank {
    fn new(source_hz: u64, target_hz: u64, phases: usize) -> Self {
        // Filter designed in input-sample units.
        let ratio = target_hz as f64 / source_hz as f64;
        let cutoff = CUTOFF * ratio.min(1.0);
        let half_span = ZERO_CROSSINGS as f64 / cutoff;
        let half = half_span.ceil() as usize;
        let width = 2 * half;
        let norm = bessel_i0(KAISER_BETA);
        let mut taps = vec![0.0; phases * width];
        for p in 0..phases {
            let frac = p as f64 / phases as f64;
            let row = &mut taps[p * width..(p + 1) * width];
            for (j, w) in row.iter_mut().enumerate() {
                // Offset of input tap relative to the fractional read position.
                let x = (j as f64 - (half as f64 - 1.0)) - frac;
                let r = x / half_span;
                if r.abs() >= 1.0 {
                    continue;
                }
                let window = bessel_i0(KAISER_BETA * (1.0 - r * r).sqrt()) / norm;
                *w = cutoff * sinc(cutoff * x) * window;
            }
        }
        Self {
            taps,
            width,
            half,
        }
    }
}

/// Converts `signal` to `target_rate_hz`. The output has `round(len * target / source)`
/// samples; an identical rate returns a clone of the input.
///
/// # Panics
/// If `target_rate_hz` is zero.
pub fn resample(signal: &SampledSignal, target_rate_hz: u32) -> SampledSignal {
    assert!(target_rate_hz > 0, "target rate must be positive");
    let source = u64::from(signal.sample_rate_hz());
    let target = u64::from(target_rate_hz);
    if source == target {
        return signal.clone();
    }
    let g = gcd(source, target);
    let up = target / g;
    let down = source / g;
    let phases = up.min(MAX_PHASES) as usize;
    let bank = PolyphaseBank::new(source, target, phases);

    let input = signal.samples();
    let in_len = input.len() as u64;
    let out_len = ((u128::from(in_len) * u128::from(target) + u128::from(source / 2))
        / u128::from(source))
    .max(1) as usize;

    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len as u64 {
        // Read position n * down / up in input samples, split into integer base and phase.
        let num = n * down;
        let mut base = (num / up) as i64;
        let rem = num % up;
        let mut phase = if up as usize == phases {
            rem as usize
        } else {
            ((rem as f64 / up as f64) * phases as f64).round() as usize
        };
        if phase == phases {
            phase = 0;
            base += 1;
        }
        let row = &bank.taps[phase * bank.width..(phase + 1) * bank.width];
        let start = base - bank.half as i64 + 1;
        let mut acc = 0.0;
        for (j, &w) in row.iter().enumerate() {
            let idx = start + j as i64;
            if idx >= 0 && (idx as u64) < in_len {
                acc += w * input[idx as usize];
            }
        }
        out.push(acc);
    }
    SampledSignal::new(out, target_rate_hz).expect("positive rate and non-empty output")
}
