use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, ScenarioManifest};
use crate::signal::read_wav;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Directory of `<request_id>.wav` generated RIRs.
    Task1,
    /// CSV of distance predictions.
    Task2,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Task1 => "task1",
            Task::Task2 => "task2",
        })
    }
}

/// Every problem found in a submission; `valid` iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub task: Task,
    pub valid: bool,
    pub expected: usize,
    pub found: usize,
    pub violations: Vec<String>,
}

impl ValidationReport {
    fn new(task: Task, expected: usize, found: usize, violations: Vec<String>) -> Self {
        Self {
            task,
            valid: violations.is_empty(),
            expected,
            found,
            violations,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return write!(f, "valid ({} of {})", self.found, self.expected);
        }
        writeln!(f, "invalid: {} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks a submission bundle against the scenario manifests it answers. Only an
/// unreadable bundle is an error; everything else is collected into the report.
pub fn validate_submission(
    task: Task,
    bundle: impl AsRef<Path>,
    manifests: &[ScenarioManifest],
) -> Result<ValidationReport, HarnessError> {
    match task {
        Task::Task1 => validate_task1(bundle.as_ref(), manifests),
        Task::Task2 => validate_task2(bundle.as_ref(), manifests),
    }
}

struct Limits {
    rate: u32,
    max_s: f64,
}

fn validate_task1(dir: &Path, manifests: &[ScenarioManifest]) -> Result<ValidationReport, HarnessError> {
    let expected: BTreeMap<String, Limits> = manifests
        .iter()
        .flat_map(|m| {
            m.requests().into_iter().map(|(id, _)| {
                (
                    id,
                    Limits {
                        rate: m.sample_rate_hz,
                        max_s: m.max_rir_duration_s,
                    },
                )
            })
        })
        .collect();
    let mut names = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))? {
        let entry = entry.map_err(|e| HarnessError::io(dir, e))?;
        names.push(entry.file_name().to_string_lossy().into_owned());
    }
    names.sort();

    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    let mut wavs = 0;
    for name in &names {
        let Some(id) = name.strip_suffix(".wav") else {
            violations.push(format!("unexpected file {name}"));
            continue;
        };
        wavs += 1;
        let Some(limits) = expected.get(id) else {
            violations.push(format!("unexpected RIR {name}"));
            continue;
        };
        seen.insert(id.to_string());
        match read_wav(dir.join(name)) {
            Err(e) => violations.push(format!("{name}: unreadable ({e})")),
            Ok(sig) => {
                if sig.sample_rate_hz() != limits.rate {
                    violations.push(format!(
                        "{name}: sample rate {} Hz, expected {} Hz",
                        sig.sample_rate_hz(),
                        limits.rate
                    ));
                }
                let dur = sig.duration_s();
                if !(dur > 0.0 && dur <= limits.max_s) {
                    violations.push(format!("{name}: duration {dur:.3} s outside (0, {}] s", limits.max_s));
                }
            }
        }
    }
    for id in expected.keys().filter(|id| !seen.contains(*id)) {
        violations.push(format!("missing RIR {id}.wav"));
    }
    if wavs != expected.len() {
        violations.push(format!("expected {} WAVs, found {wavs}", expected.len()));
    }
    Ok(ValidationReport::new(Task::Task1, expected.len(), wavs, violations))
}

fn validate_task2(path: &Path, manifests: &[ScenarioManifest]) -> Result<ValidationReport, HarnessError> {
    let expected: BTreeSet<&str> = manifests
        .iter()
        .flat_map(|m| m.test_utterances.iter().map(|u| u.utterance_id.as_str()))
        .collect();
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(file);

    let mut violations = Vec::new();
    match reader.headers() {
        Ok(h) if h.iter().eq(["utterance_id", "predicted_distance_m"]) => {}
        Ok(h) => violations.push(format!(
            "header {:?}, expected \"utterance_id,predicted_distance_m\"",
            h.iter().collect::<Vec<_>>().join(",")
        )),
        Err(e) => violations.push(format!("unreadable header ({e})")),
    }
    let mut seen = BTreeSet::new();
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                violations.push(format!("line {line}: {e}"));
                continue;
            }
        };
        if record.len() != 2 {
            violations.push(format!("line {line}: {} fields, expected 2", record.len()));
            continue;
        }
        let id = &record[0];
        if !seen.insert(id.to_string()) {
            violations.push(format!("line {line}: duplicate utterance id {id}"));
        } else if !expected.contains(id) {
            violations.push(format!("line {line}: unexpected utterance id {id}"));
        }
        match record[1].trim().parse::<f64>() {
            Ok(d) if d > 0.0 && d.is_finite() => {}
            Ok(d) => violations.push(format!("line {line}: non-positive distance {d} for {id}")),
            Err(_) => violations.push(format!("line {line}: unparsable distance {:?}", &record[1])),
        }
    }
    for id in expected.iter().filter(|id| !seen.contains(**id)) {
        violations.push(format!("missing utterance id {id}"));
    }
    if rows != expected.len() {
        violations.push(format!("expected {} rows, found {rows}", expected.len()));
    }
    Ok(ValidationReport::new(Task::Task2, expected.len(), rows, violations))
}
