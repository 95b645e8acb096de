use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{drr_mse, edf_mse, mape, AcousticDescriptors, MetricsError, OctaveBand};

/// Task-1 scores for a list of (generated, reference) RIR pairs.
///
/// A band cell is `None` when no pair had a value on both sides. The `*_pairs`
/// counts say how many pairs contributed to each cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub n: usize,
    pub t20_mape_pct: BTreeMap<OctaveBand, Option<f64>>,
    pub t20_pairs: BTreeMap<OctaveBand, usize>,
    pub edf_mse_db: BTreeMap<OctaveBand, Option<f64>>,
    pub edf_pairs: BTreeMap<OctaveBand, usize>,
    pub drr_mse_db: Option<f64>,
    pub drr_pairs: usize,
}

impl MetricReport {
    pub fn from_descriptors(
        predicted: &[AcousticDescriptors],
        reference: &[AcousticDescriptors],
    ) -> Result<Self, MetricsError> {
        if predicted.len() != reference.len() {
            return Err(MetricsError::LengthMismatch {
                predicted: predicted.len(),
                reference: reference.len(),
            });
        }
        if predicted.is_empty() {
            return Err(MetricsError::EmptyInput);
        }
        let mut report = MetricReport {
            n: predicted.len(),
            t20_mape_pct: BTreeMap::new(),
            t20_pairs: BTreeMap::new(),
            edf_mse_db: BTreeMap::new(),
            edf_pairs: BTreeMap::new(),
            drr_mse_db: None,
            drr_pairs: 0,
        };
        for band in OctaveBand::ALL {
            let (p, r): (Vec<f64>, Vec<f64>) = predicted
                .iter()
                .zip(reference)
                .filter_map(|(p, r)| Some((*p.t20_s.get(&band)?, *r.t20_s.get(&band)?)))
                .unzip();
            report.t20_pairs.insert(band, p.len());
            let cell = if p.is_empty() { None } else { Some(mape(&p, &r)?) };
            report.t20_mape_pct.insert(band, cell);

            let (p, r): (Vec<_>, Vec<_>) = predicted
                .iter()
                .zip(reference)
                .filter_map(|(p, r)| Some((p.edfs.get(&band)?.clone(), r.edfs.get(&band)?.clone())))
                .unzip();
            report.edf_pairs.insert(band, p.len());
            let cell = if p.is_empty() { None } else { Some(edf_mse(&p, &r)?) };
            report.edf_mse_db.insert(band, cell);
        }
        let (p, r): (Vec<f64>, Vec<f64>) = predicted
            .iter()
            .zip(reference)
            .filter_map(|(p, r)| Some((p.drr_db?, r.drr_db?)))
            .unzip();
        report.drr_pairs = p.len();
        if !p.is_empty() {
            report.drr_mse_db = Some(drr_mse(&p, &r)?);
        }
        Ok(report)
    }

    /// Every populated cell, for "all zero" style checks.
    pub fn cells(&self) -> impl Iterator<Item = f64> + '_ {
        self.t20_mape_pct
            .values()
            .chain(self.edf_mse_db.values())
            .chain(std::iter::once(&self.drr_mse_db))
            .flatten()
            .copied()
    }

    /// Aligned text table: T20 MAPE [%] and EDF MSE [dB] over Full/125/…/4k, then DRR MSE [dB].
    pub fn to_table(&self, row_label: &str) -> String {
        let cell = |v: Option<f64>| match v {
            Some(x) => format!("{x:>6.1}"),
            None => format!("{:>6}", "-"),
        };
        let label_w = row_label.len().max(5);
        let band_cols = OctaveBand::ALL.len() * 7 - 1;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:label_w$} | {:<band_cols$} | {:<band_cols$} | DRR MSE [dB]",
            "", "T20 MAPE [%]", "EDF MSE [dB]"
        );
        let heads: Vec<String> = OctaveBand::ALL
            .iter()
            .map(|b| format!("{:>6}", b.column_label()))
            .collect();
        let heads = heads.join(" ");
        let _ = writeln!(out, "{:label_w$} | {heads} | {heads} |", "");
        let t20: Vec<String> = OctaveBand::ALL
            .iter()
            .map(|b| cell(self.t20_mape_pct.get(b).copied().flatten()))
            .collect();
        let edf: Vec<String> = OctaveBand::ALL
            .iter()
            .map(|b| cell(self.edf_mse_db.get(b).copied().flatten()))
            .collect();
        let _ = writeln!(
            out,
            "{row_label:label_w$} | {} | {} | {}",
            t20.join(" "),
            edf.join(" "),
            cell(self.drr_mse_db)
        );
        let _ = writeln!(out, "pairs: {}", self.n);
        out
    }
}
