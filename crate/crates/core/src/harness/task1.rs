use std::collections::BTreeMap;

use rayon::prelude::*;

use super::HarnessError;
use crate::metrics::{describe, AcousticDescriptors, MetricReport};
use crate::signal::{resample, SampledSignal};

/// Scores generated RIRs against references with matching keys. A generated RIR at a
/// different rate is resampled to the reference rate first.
///
/// Pairs are described in parallel; aggregation runs over keys in sorted order, so the
/// report does not depend on thread count.
pub fn score_task1(
    generated: &BTreeMap<String, SampledSignal>,
    reference: &BTreeMap<String, SampledSignal>,
) -> Result<MetricReport, HarnessError> {
    let missing: Vec<String> = reference
        .keys()
        .filter(|k| !generated.contains_key(*k))
        .cloned()
        .collect();
    let extra: Vec<String> = generated
        .keys()
        .filter(|k| !reference.contains_key(*k))
        .cloned()
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(HarnessError::KeyMismatch { missing, extra });
    }

    let pairs: Vec<(&String, &SampledSignal, &SampledSignal)> = reference
        .iter()
        .map(|(k, r)| (k, &generated[k], r))
        .collect();
    let described: Vec<(AcousticDescriptors, AcousticDescriptors)> = pairs
        .par_iter()
        .map(|&(key, gen, reference)| {
            let gen = if gen.sample_rate_hz() == reference.sample_rate_hz() {
                describe(gen)
            } else {
                describe(&resample(gen, reference.sample_rate_hz()))
            }
            .map_err(|e| HarnessError::metrics(format!("generated {key}"), e))?;
            let reference =
                describe(reference).map_err(|e| HarnessError::metrics(format!("reference {key}"), e))?;
            Ok((gen, reference))
        })
        .collect::<Result<_, HarnessError>>()?;
    let (gen, reference): (Vec<_>, Vec<_>) = described.into_iter().unzip();
    MetricReport::from_descriptors(&gen, &reference)
        .map_err(|e| HarnessError::metrics("aggregation", e))
}
