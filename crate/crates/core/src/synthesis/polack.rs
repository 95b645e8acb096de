use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{IsmConfig, SynthesisError};
use crate::signal::SampledSignal;

/// Gap between the direct impulse and the start of the diffuse tail.
const TAIL_GAP_S: f64 = 0.005;
/// Tail length in multiples of T60 (the envelope ends 90 dB down).
const TAIL_LENGTH_T60: f64 = 1.5;
/// ln(1000): the amplitude envelope falls 60 dB over one T60.
const DECAY_CONSTANT: f64 = 6.907_755_278_982_137;

/// Polack-model RIR: a unit direct impulse at `direct_delay_s`, then after a 5 ms gap
/// Gaussian noise under the envelope `exp(-6.9078 t / t60)`, scaled so the direct-to-tail
/// energy ratio is exactly `drr_db`. Uses `config.sample_rate_hz` and `config.rng_seed`.
pub fn polack_rir(
    t60_s: f64,
    drr_db: f64,
    direct_delay_s: f64,
    config: &IsmConfig,
) -> Result<SampledSignal, SynthesisError> {
    if !(t60_s > 0.0) || !t60_s.is_finite() {
        return Err(SynthesisError::NonPositiveT60(t60_s));
    }
    if !drr_db.is_finite() || !(direct_delay_s >= 0.0) {
        return Err(SynthesisError::InvalidConfig(
            "DRR must be finite and the direct delay non-negative".into(),
        ));
    }
    let fs = f64::from(config.sample_rate_hz);
    let direct = (direct_delay_s * fs).round() as usize;
    let tail_start = direct + (TAIL_GAP_S * fs).round() as usize;
    let tail_len = (TAIL_LENGTH_T60 * t60_s * fs).ceil() as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut tail: Vec<f64> = (0..tail_len)
        .map(|k| {
            let n: f64 = StandardNormal.sample(&mut rng);
            n * (-DECAY_CONSTANT * k as f64 / fs / t60_s).exp()
        })
        .collect();
    let raw: f64 = tail.iter().map(|x| x * x).sum();
    let target = 10f64.powf(-drr_db / 10.0);
    let gain = (target / raw).sqrt();
    for x in &mut tail {
        *x *= gain;
    }

    let mut h = vec![0.0; tail_start + tail_len];
    h[direct] = 1.0;
    h[tail_start..].copy_from_slice(&tail);
    Ok(SampledSignal::new(h, config.sample_rate_hz)?)
}
