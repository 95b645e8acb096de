//! Error aggregates over lists of (predicted, reference) pairs.

use super::{AcousticDescriptors, EnergyDecayFunction, MetricsError, OctaveBand};

/// Summation with a fixed binary split, so a given slice always reduces in the same order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

fn mean(values: &[f64]) -> f64 {
    pairwise_sum(values) / values.len() as f64
}

fn check_lengths(predicted: usize, reference: usize) -> Result<(), MetricsError> {
    if predicted != reference {
        return Err(MetricsError::LengthMismatch {
            predicted,
            reference,
        });
    }
    if predicted == 0 {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

/// Mean absolute percentage error, in percent, normalized by `reference`.
pub fn mape(predicted: &[f64], reference: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(predicted.len(), reference.len())?;
    let mut terms = Vec::with_capacity(reference.len());
    for (i, (&p, &r)) in predicted.iter().zip(reference).enumerate() {
        if !(r > 0.0) || !r.is_finite() {
            return Err(MetricsError::NonPositiveReference { index: i, value: r });
        }
        if !p.is_finite() {
            return Err(MetricsError::NonFinite { index: i });
        }
        terms.push((p - r).abs() / r);
    }
    Ok(100.0 * mean(&terms))
}

/// T20 MAPE in one band, in percent.
pub fn t20_mape(
    predicted: &[AcousticDescriptors],
    reference: &[AcousticDescriptors],
    band: OctaveBand,
) -> Result<f64, MetricsError> {
    check_lengths(predicted.len(), reference.len())?;
    let lookup = |list: &[AcousticDescriptors]| {
        list.iter()
            .enumerate()
            .map(|(index, d)| {
                d.t20_s
                    .get(&band)
                    .copied()
                    .ok_or(MetricsError::MissingBand { index, band })
            })
            .collect::<Result<Vec<_>, _>>()
    };
    mape(&lookup(predicted)?, &lookup(reference)?)
}

/// Mean squared dB difference of one EDF pair: truncated to the shorter curve, then the
/// last 5 % (rounded up) of that common length dropped.
pub fn edf_pair_mse(
    predicted: &EnergyDecayFunction,
    reference: &EnergyDecayFunction,
) -> Result<f64, MetricsError> {
    if predicted.sample_rate_hz != reference.sample_rate_hz {
        return Err(MetricsError::RateMismatch(
            predicted.sample_rate_hz,
            reference.sample_rate_hz,
        ));
    }
    let common = predicted.len().min(reference.len());
    let keep = common - common.div_ceil(20);
    if keep == 0 {
        return Err(MetricsError::EmptyInput);
    }
    let sq: Vec<f64> = predicted.values_db[..keep]
        .iter()
        .zip(&reference.values_db[..keep])
        .map(|(a, b)| (a - b) * (a - b))
        .collect();
    Ok(mean(&sq))
}

/// EDF MSE in dB: per-pair time average, then the mean over pairs.
pub fn edf_mse(
    predicted: &[EnergyDecayFunction],
    reference: &[EnergyDecayFunction],
) -> Result<f64, MetricsError> {
    check_lengths(predicted.len(), reference.len())?;
    let per_pair = predicted
        .iter()
        .zip(reference)
        .map(|(p, r)| edf_pair_mse(p, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(mean(&per_pair))
}

/// Mean squared DRR difference.
pub fn drr_mse(predicted: &[f64], reference: &[f64]) -> Result<f64, MetricsError> {
    check_lengths(predicted.len(), reference.len())?;
    let mut sq = Vec::with_capacity(predicted.len());
    for (i, (&p, &r)) in predicted.iter().zip(reference).enumerate() {
        if !p.is_finite() || !r.is_finite() {
            return Err(MetricsError::NonFinite { index: i });
        }
        sq.push((p - r) * (p - r));
    }
    Ok(mean(&sq))
}
