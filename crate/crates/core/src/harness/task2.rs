use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::metrics::pairwise_sum;

/// Lower edges of the distance bins; the last bin is open-ended.
pub const DISTANCE_BIN_EDGES_M: [f64; 4] = [0.0, 2.0, 4.0, 6.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub utterance_id: String,
    pub predicted_distance_m: f64,
}

/// Rows of a Task-2 predictions CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionSet {
    pub rows: Vec<Prediction>,
}

impl FromIterator<(String, f64)> for PredictionSet {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Self {
            rows: iter
                .into_iter()
                .map(|(utterance_id, predicted_distance_m)| Prediction {
                    utterance_id,
                    predicted_distance_m,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TruthRow {
    utterance_id: String,
    true_distance_m: f64,
}

/// Reads `utterance_id,predicted_distance_m`.
pub fn read_predictions<R: Read>(reader: R) -> Result<PredictionSet, HarnessError> {
    let mut csv = csv::Reader::from_reader(reader);
    let rows = csv.deserialize().collect::<Result<Vec<Prediction>, _>>()?;
    Ok(PredictionSet { rows })
}

pub fn write_predictions<W: Write>(writer: W, set: &PredictionSet) -> Result<(), HarnessError> {
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for row in &set.rows {
        csv.serialize(row)?;
    }
    csv.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

/// Reads the organizer-side `utterance_id,true_distance_m` file.
pub fn read_truth<R: Read>(reader: R) -> Result<BTreeMap<String, f64>, HarnessError> {
    let mut csv = csv::Reader::from_reader(reader);
    let mut out = BTreeMap::new();
    for row in csv.deserialize() {
        let row: TruthRow = row?;
        if out.insert(row.utterance_id.clone(), row.true_distance_m).is_some() {
            return Err(HarnessError::DuplicateId(row.utterance_id));
        }
    }
    Ok(out)
}

pub fn write_truth<W: Write>(writer: W, truth: &BTreeMap<String, f64>) -> Result<(), HarnessError> {
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for (id, &d) in truth {
        csv.serialize(TruthRow {
            utterance_id: id.clone(),
            true_distance_m: d,
        })?;
    }
    csv.flush().map_err(|e| HarnessError::io("<csv>", e))?;
    Ok(())
}

/// Reads predictions from a file path.
pub fn read_predictions_file(path: &Path) -> Result<PredictionSet, HarnessError> {
    let f = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_predictions(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    pub label: String,
    pub lower_m: f64,
    pub upper_m: Option<f64>,
    pub n: usize,
    pub mae_m: Option<f64>,
    pub mape_pct: Option<f64>,
}

impl BinStats {
    fn from_errors(label: String, lower_m: f64, upper_m: Option<f64>, abs: &[f64], rel: &[f64]) -> Self {
        let n = abs.len();
        let mean = |v: &[f64]| (n > 0).then(|| pairwise_sum(v) / n as f64);
        Self {
            label,
            lower_m,
            upper_m,
            n,
            mae_m: mean(abs),
            mape_pct: mean(rel).map(|m| 100.0 * m),
        }
    }
}

/// Distance-estimation errors overall and per true-distance bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub overall: BinStats,
    pub bins: Vec<BinStats>,
}

fn bin_label(i: usize) -> String {
    let lo = DISTANCE_BIN_EDGES_M[i];
    match DISTANCE_BIN_EDGES_M.get(i + 1) {
        Some(hi) => format!("{lo}–{hi}m"),
        None => format!("{lo}+m"),
    }
}

fn bin_index(d: f64) -> usize {
    DISTANCE_BIN_EDGES_M
        .iter()
        .rposition(|&lo| d >= lo)
        .unwrap_or(0)
}

/// MAE (m) and MAPE (%) pooled per utterance, overall and in left-inclusive bins
/// [0,2), [2,4), [4,6), [6,∞) of the true distance. Rows are summed in utterance-id
/// order, so the result does not depend on CSV row order.
pub fn score_task2(
    predictions: &PredictionSet,
    truth: &BTreeMap<String, f64>,
) -> Result<DistanceReport, HarnessError> {
    let mut by_id = BTreeMap::new();
    for row in &predictions.rows {
        if by_id
            .insert(row.utterance_id.as_str(), row.predicted_distance_m)
            .is_some()
        {
            return Err(HarnessError::DuplicateId(row.utterance_id.clone()));
        }
    }
    let ids: BTreeSet<&str> = by_id.keys().copied().collect();
    let truth_ids: BTreeSet<&str> = truth.keys().map(String::as_str).collect();
    if ids != truth_ids {
        return Err(HarnessError::KeyMismatch {
            missing: truth_ids.difference(&ids).map(|s| s.to_string()).collect(),
            extra: ids.difference(&truth_ids).map(|s| s.to_string()).collect(),
        });
    }
    if truth.is_empty() {
        return Err(HarnessError::Count("no utterances to score".into()));
    }

    let nbins = DISTANCE_BIN_EDGES_M.len();
    let mut abs_all = Vec::with_capacity(truth.len());
    let mut rel_all = Vec::with_capacity(truth.len());
    let mut abs_bins = vec![Vec::new(); nbins];
    let mut rel_bins = vec![Vec::new(); nbins];
    for (id, &d) in truth {
        let p = by_id[id.as_str()];
        if !(p > 0.0) || !p.is_finite() {
            return Err(HarnessError::NonPositivePrediction { id: id.clone(), value: p });
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(HarnessError::Schema(format!("true distance {d} for {id}")));
        }
        let abs = (p - d).abs();
        let b = bin_index(d);
        abs_all.push(abs);
        rel_all.push(abs / d);
        abs_bins[b].push(abs);
        rel_bins[b].push(abs / d);
    }
    let bins = (0..nbins)
        .map(|i| {
            BinStats::from_errors(
                bin_label(i),
                DISTANCE_BIN_EDGES_M[i],
                DISTANCE_BIN_EDGES_M.get(i + 1).copied(),
                &abs_bins[i],
                &rel_bins[i],
            )
        })
        .collect();
    Ok(DistanceReport {
        overall: BinStats::from_errors("Overall".into(), 0.0, None, &abs_all, &rel_all),
        bins,
    })
}

impl DistanceReport {
    /// One row per model: MAE [m] and MAPE [%] overall and per bin.
    pub fn to_table(&self, row_label: &str) -> String {
        let label_w = row_label.len().max(5);
        let groups: Vec<&BinStats> = std::iter::once(&self.overall).chain(&self.bins).collect();
        let mut out = String::new();
        let _ = write!(out, "{:label_w$}", "");
        for g in &groups {
            let _ = write!(out, " | {:^18}", g.label);
        }
        out.push('\n');
        let _ = write!(out, "{:label_w$}", "Model");
        for _ in &groups {
            let _ = write!(out, " | {:>7} {:>10}", "MAE [m]", "MAPE [%]");
        }
        out.push('\n');
        let _ = write!(out, "{row_label:label_w$}");
        for g in &groups {
            let mae = g.mae_m.map_or("-".to_string(), |v| format!("{v:.3}"));
            let mape = g.mape_pct.map_or("-".to_string(), |v| format!("{v:.1}%"));
            let _ = write!(out, " | {mae:>7} {mape:>10}");
        }
        out.push('\n');
        let counts: Vec<String> = groups.iter().map(|g| format!("{}={}", g.label, g.n)).collect();
        let _ = writeln!(out, "n: {}", counts.join(", "));
        out
    }
}
