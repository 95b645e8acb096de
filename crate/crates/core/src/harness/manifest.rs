use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::PointPosition;

pub const SCHEMA_VERSION: u32 = 1;
pub const CHALLENGE_ROOMS_PER_SCENARIO: usize = 10;
pub const CHALLENGE_REQUESTS_PER_ROOM: usize = 10;
pub const CHALLENGE_POSITIONS_PER_ROOM: usize = 8;
pub const CHALLENGE_SPEAKERS_PER_POSITION: usize = 3;

fn default_rate() -> u32 {
    32000
}

fn default_max_duration() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnrollmentRecord {
    pub rir: String,
    pub source: PointPosition,
    pub receiver: PointPosition,
}

/// A Task-1 generation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRequest {
    pub source: PointPosition,
    pub receiver: PointPosition,
    /// Organizer-side ground-truth RIR, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_rir: Option<String>,
}

/// One Task-2 utterance slot: a test position in a room and a speaker draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestUtteranceSpec {
    pub utterance_id: String,
    pub room: String,
    pub position: usize,
    pub speaker: usize,
    pub source: PointPosition,
    pub receiver: PointPosition,
    /// RIR for this position, relative to the manifest; `None` when hidden.
    #[serde(default)]
    pub rir: Option<String>,
    #[serde(default)]
    pub hidden: bool,
    /// Fixed speech file; sampled from the corpus when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speech: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_distance_m: Option<f64>,
}

/// File inventory of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioManifest {
    pub schema_version: u32,
    pub scenario_id: u8,
    /// Enforce the full challenge counts on load.
    #[serde(default)]
    pub challenge_shaped: bool,
    #[serde(default = "default_rate")]
    pub sample_rate_hz: u32,
    #[serde(default = "default_max_duration")]
    pub max_rir_duration_s: f64,
    pub rooms: Vec<String>,
    #[serde(default)]
    pub enrollment: BTreeMap<String, Vec<EnrollmentRecord>>,
    #[serde(default)]
    pub eval_requests: BTreeMap<String, Vec<EvalRequest>>,
    #[serde(default)]
    pub test_utterances: Vec<TestUtteranceSpec>,
    /// Directory relative paths resolve against; set by [`load_manifest`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// `<room>_<kk>`: Task-1 request and file stem.
pub fn request_id(room: &str, index: usize) -> String {
    format!("{room}_{index:02}")
}

/// `<room>_<position>`: key of a Task-2 test position.
pub fn position_key(room: &str, position: usize) -> String {
    format!("{room}_{position}")
}

/// `<room>_<position>_<speaker>`.
pub fn utterance_id(room: &str, position: usize, speaker: usize) -> String {
    format!("{room}_{position}_{speaker}")
}

impl ScenarioManifest {
    pub fn new(scenario_id: u8, rooms: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario_id,
            challenge_shaped: false,
            sample_rate_hz: default_rate(),
            max_rir_duration_s: default_max_duration(),
            rooms,
            enrollment: BTreeMap::new(),
            eval_requests: BTreeMap::new(),
            test_utterances: Vec::new(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        self.base_dir.join(relative)
    }

    /// Task-1 request ids with their requests, in room order then request order.
    pub fn requests(&self) -> Vec<(String, &EvalRequest)> {
        self.rooms
            .iter()
            .flat_map(|room| {
                self.eval_requests
                    .get(room)
                    .into_iter()
                    .flatten()
                    .enumerate()
                    .map(move |(i, r)| (request_id(room, i), r))
            })
            .collect()
    }

    pub fn request_count(&self) -> usize {
        self.eval_requests.values().map(Vec::len).sum()
    }

    /// Utterance id to ground-truth distance (geometry unless overridden).
    pub fn truth(&self) -> BTreeMap<String, f64> {
        self.test_utterances
            .iter()
            .map(|u| {
                let d = u
                    .true_distance_m
                    .unwrap_or_else(|| crate::geometry::distance(u.source, u.receiver));
                (u.utterance_id.clone(), d)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let schema = |m: String| Err(HarnessError::Schema(m));
        if self.schema_version != SCHEMA_VERSION {
            return schema(format!(
                "schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !matches!(self.scenario_id, 1 | 2) {
            return schema(format!("scenario_id must be 1 or 2, got {}", self.scenario_id));
        }
        if self.sample_rate_hz == 0 || !(self.max_rir_duration_s > 0.0) {
            return schema("sample_rate_hz and max_rir_duration_s must be positive".into());
        }
        if self.rooms.is_empty() {
            return schema("no rooms".into());
        }
        let rooms: BTreeSet<&str> = self.rooms.iter().map(String::as_str).collect();
        if rooms.len() != self.rooms.len() {
            return schema("duplicate room label".into());
        }
        for key in self.enrollment.keys().chain(self.eval_requests.keys()) {
            if !rooms.contains(key.as_str()) {
                return schema(format!("unknown room {key:?}"));
            }
        }
        let all_points = self
            .enrollment
            .values()
            .flatten()
            .flat_map(|e| [e.source, e.receiver])
            .chain(self.eval_requests.values().flatten().flat_map(|r| [r.source, r.receiver]))
            .chain(self.test_utterances.iter().flat_map(|u| [u.source, u.receiver]));
        for p in all_points {
            if p.0.iter().any(|v| !v.is_finite()) {
                return schema(format!("non-finite position {:?}", p.0));
            }
        }
        let mut ids = BTreeSet::new();
        for u in &self.test_utterances {
            if !rooms.contains(u.room.as_str()) {
                return schema(format!("utterance {} in unknown room {:?}", u.utterance_id, u.room));
            }
            if !ids.insert(u.utterance_id.as_str()) {
                return schema(format!("duplicate utterance id {}", u.utterance_id));
            }
            if u.rir.is_none() && !u.hidden {
                return schema(format!("utterance {} has no RIR and is not hidden", u.utterance_id));
            }
            if let Some(d) = u.true_distance_m {
                if !(d > 0.0) {
                    return schema(format!("utterance {} has non-positive distance", u.utterance_id));
                }
            }
        }
        if self.challenge_shaped {
            self.check_challenge_counts()?;
        }
        Ok(())
    }

    fn check_challenge_counts(&self) -> Result<(), HarnessError> {
        let count = |m: String| Err(HarnessError::Count(m));
        if self.rooms.len() != CHALLENGE_ROOMS_PER_SCENARIO {
            return count(format!(
                "{} rooms, expected {CHALLENGE_ROOMS_PER_SCENARIO}",
                self.rooms.len()
            ));
        }
        for room in &self.rooms {
            let n = self.eval_requests.get(room).map_or(0, Vec::len);
            if n != CHALLENGE_REQUESTS_PER_ROOM {
                return count(format!(
                    "room {room}: {n} Task-1 requests, expected {CHALLENGE_REQUESTS_PER_ROOM}"
                ));
            }
            let utts: Vec<_> = self.test_utterances.iter().filter(|u| &u.room == room).collect();
            let positions: BTreeSet<usize> = utts.iter().map(|u| u.position).collect();
            let per_room = CHALLENGE_POSITIONS_PER_ROOM * CHALLENGE_SPEAKERS_PER_POSITION;
            if positions.len() != CHALLENGE_POSITIONS_PER_ROOM || utts.len() != per_room {
                return count(format!(
                    "room {room}: {} utterances over {} positions, expected {per_room} over {CHALLENGE_POSITIONS_PER_ROOM}",
                    utts.len(),
                    positions.len()
                ));
            }
        }
        Ok(())
    }
}

pub fn parse_manifest(json: &str) -> Result<ScenarioManifest, HarnessError> {
    let manifest: ScenarioManifest = serde_json::from_str(json)?;
    manifest.validate()?;
    Ok(manifest)
}

/// Reads and validates a manifest; relative paths inside it resolve against its directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<ScenarioManifest, HarnessError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut manifest = parse_manifest(&text)?;
    manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(manifest)
}

/// Scenario room sets must not overlap.
pub fn check_disjoint(manifests: &[ScenarioManifest]) -> Result<(), HarnessError> {
    let mut seen = BTreeMap::new();
    for m in manifests {
        for room in &m.rooms {
            if let Some(prev) = seen.insert(room.as_str(), m.scenario_id) {
                return Err(HarnessError::Schema(format!(
                    "room {room} appears in scenarios {prev} and {}",
                    m.scenario_id
                )));
            }
        }
    }
    Ok(())
}
