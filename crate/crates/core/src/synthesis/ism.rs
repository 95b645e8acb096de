//! Shoebox image-source method with frequency-independent wall reflection.

use std::f64::consts::PI;

use super::{IsmConfig, SynthesisError};
use crate::geometry::{distance, PointPosition, ShoeboxScene};
use crate::signal::SampledSignal;

/// Half-width of the fractional-delay kernel, in samples.
const KERNEL_HALF_WIDTH: usize = 32;

/// One image-source contribution at the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub delay_s: f64,
    pub amplitude: f64,
    pub order: u32,
    pub position: PointPosition,
}

/// Image sources up to `config.max_order` reflections with non-zero amplitude, ordered by
/// delay. Each has amplitude `prod(sqrt(1 - alpha)) / r`. Furniture is ignored.
pub fn image_sources(
    scene: &ShoeboxScene,
    source: PointPosition,
    receiver: PointPosition,
    config: &IsmConfig,
) -> Result<Vec<Arrival>, SynthesisError> {
    config.validate()?;
    scene.validate()?;
    scene.check_inside(source)?;
    scene.check_inside(receiver)?;
    if distance(source, receiver) == 0.0 {
        return Err(SynthesisError::ZeroDistance);
    }
    let beta: [f64; 6] = std::array::from_fn(|i| (1.0 - scene.wall_absorption[i]).sqrt());
    let max_order = config.max_order as i64;
    let n_max = (max_order + 1) / 2 + 1;

    // Per axis: (coordinate, low-wall hits, high-wall hits) for every (n, parity).
    let axis_images = |axis: usize| {
        let s = source.0[axis];
        let l = scene.dims_m[axis];
        let mut v = Vec::new();
        for n in -n_max..=n_max {
            for p in 0..2i64 {
                let low = (n - p).unsigned_abs();
                let high = n.unsigned_abs();
                if (low + high) as i64 > max_order {
                    continue;
                }
                let coord = (1 - 2 * p) as f64 * s + 2.0 * n as f64 * l;
                v.push((coord, low as i32, high as i32));
            }
        }
        v
    };
    let (ix, iy, iz) = (axis_images(0), axis_images(1), axis_images(2));

    let mut out = Vec::new();
    for &(x, xl, xh) in &ix {
        for &(y, yl, yh) in &iy {
            let partial = xl + xh + yl + yh;
            if partial as i64 > max_order {
                continue;
            }
            for &(z, zl, zh) in &iz {
                let order = partial + zl + zh;
                if order as i64 > max_order {
                    continue;
                }
                let gain = beta[0].powi(xl)
                    * beta[1].powi(xh)
                    * beta[2].powi(yl)
                    * beta[3].powi(yh)
                    * beta[4].powi(zl)
                    * beta[5].powi(zh);
                if gain == 0.0 {
                    continue;
                }
                let position = PointPosition::new(x, y, z);
                let r = distance(position, receiver);
                out.push(Arrival {
                    delay_s: r / config.speed_of_sound_mps,
                    amplitude: gain / r,
                    order: order as u32,
                    position,
                });
            }
        }
    }
    out.sort_by(|a, b| a.delay_s.total_cmp(&b.delay_s).then(a.order.cmp(&b.order)));
    Ok(out)
}

/// Hann-windowed sinc evaluated at offset `x` samples from the arrival.
fn kernel(x: f64) -> f64 {
    let w = KERNEL_HALF_WIDTH as f64;
    if x.abs() >= w {
        return 0.0;
    }
    let sinc = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
    sinc * 0.5 * (1.0 + (PI * x / w).cos())
}

/// Renders the image sources of a shoebox scene into a monaural RIR.
pub fn image_source_rir(
    scene: &ShoeboxScene,
    source: PointPosition,
    receiver: PointPosition,
    config: &IsmConfig,
) -> Result<SampledSignal, SynthesisError> {
    let arrivals = image_sources(scene, source, receiver, config)?;
    let fs = f64::from(config.sample_rate_hz);
    let last = arrivals.iter().map(|a| a.delay_s).fold(0.0, f64::max);
    let len = (last * fs).ceil() as usize + KERNEL_HALF_WIDTH + 1;
    let mut h = vec![0.0; len];
    for a in &arrivals {
        let t = a.delay_s * fs;
        let center = t.round() as i64;
        let w = KERNEL_HALF_WIDTH as i64;
        for k in (center - w).max(0)..=(center + w).min(len as i64 - 1) {
            h[k as usize] += a.amplitude * kernel(k as f64 - t);
        }
    }
    Ok(SampledSignal::new(h, config.sample_rate_hz)?)
}
