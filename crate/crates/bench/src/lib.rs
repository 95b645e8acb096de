//! Shared fixtures for the roomeval benchmarks.

use roomeval::synthesis::polack_rir;
use roomeval::{IsmConfig, PointPosition, SampledSignal, ShoeboxScene};

/// A 5 × 4 × 3 m room with moderate absorption, one source and one receiver.
pub fn office() -> (ShoeboxScene, PointPosition, PointPosition) {
    (
        ShoeboxScene::empty("office", [5.0, 4.0, 3.0], 0.3),
        PointPosition::new(1.5, 1.2, 1.4),
        PointPosition::new(3.6, 2.7, 1.6),
    )
}

/// Exponentially decaying noise RIR at 32 kHz.
pub fn reverberant_rir(t60_s: f64) -> SampledSignal {
    polack_rir(t60_s, 0.0, 0.005, &IsmConfig::default()).expect("valid Polack parameters")
}

/// Deterministic broadband test signal of `seconds` at `rate` Hz.
pub fn chirp(seconds: f64, rate: u32) -> SampledSignal {
    let n = (seconds * f64::from(rate)) as usize;
    let fs = f64::from(rate);
    let v = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            (2.0 * std::f64::consts::PI * (100.0 + 2000.0 * t) * t).sin()
        })
        .collect();
    SampledSignal::new(v, rate).expect("finite chirp")
}
