use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{position_key, HarnessError, ScenarioManifest, TestUtteranceSpec};
use crate::signal::{convolve, read_wav, resample, SampledSignal};

pub const TEST_SAMPLE_RATE_HZ: u32 = 32_000;
pub const TEST_DURATION_S: f64 = 10.0;

const TEST_LEN: usize = 320_000;

/// Dry speech recordings, ordered by name.
#[derive(Debug, Clone)]
pub struct SpeechCorpus {
    entries: Vec<(String, SampledSignal)>,
}

impl SpeechCorpus {
    pub fn new(mut entries: Vec<(String, SampledSignal)>) -> Result<Self, HarnessError> {
        if entries.is_empty() {
            return Err(HarnessError::EmptyCorpus);
        }
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { entries })
    }

    /// Loads every `*.wav` directly inside `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let dir = dir.as_ref();
        let mut entries = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| HarnessError::io(dir, e))? {
            let path = entry.map_err(|e| HarnessError::io(dir, e))?.path();
            if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")) && path.is_file() {
                let name = path.file_name().unwrap().to_string_lossy().into_owned();
                let signal = read_wav(&path).map_err(|e| HarnessError::signal(path.display().to_string(), e))?;
                entries.push((name, signal));
            }
        }
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, i: usize) -> &SampledSignal {
        &self.entries[i].1
    }
}

#[derive(Debug, Clone)]
pub struct TestUtterance {
    pub utterance_id: String,
    pub signal: SampledSignal,
    pub true_distance_m: f64,
}

/// Renders every test utterance in manifest order. `rirs` is keyed by
/// [`position_key`]; a 10 s, 32 kHz recording is produced per utterance.
pub fn build_test_set(
    manifest: &ScenarioManifest,
    rirs: &BTreeMap<String, SampledSignal>,
    corpus: &SpeechCorpus,
    seed: u64,
) -> Result<Vec<TestUtterance>, HarnessError> {
    let mut out = Vec::with_capacity(manifest.test_utterances.len());
    build_test_set_with(manifest, rirs, corpus, seed, |u| {
        out.push(u);
        Ok(())
    })?;
    Ok(out)
}

/// Streaming form of [`build_test_set`]: `sink` receives utterances in manifest order,
/// so a full test set never has to be held in memory.
pub fn build_test_set_with<F>(
    manifest: &ScenarioManifest,
    rirs: &BTreeMap<String, SampledSignal>,
    corpus: &SpeechCorpus,
    seed: u64,
    mut sink: F,
) -> Result<(), HarnessError>
where
    F: FnMut(TestUtterance) -> Result<(), HarnessError>,
{
    let specs = &manifest.test_utterances;
    for u in specs {
        if !rirs.contains_key(&position_key(&u.room, u.position)) {
            return Err(HarnessError::MissingRir(u.utterance_id.clone()));
        }
    }
    let draws = draw_speech(specs, corpus.len(), seed);
    let truth = manifest.truth();

    let chunk = (2 * rayon::current_num_threads()).max(1);
    for (c, specs) in specs.chunks(chunk).enumerate() {
        let rendered: Vec<TestUtterance> = specs
            .par_iter()
            .enumerate()
            .map(|(j, u)| {
                let speech = match &u.speech {
                    Some(path) => {
                        let path = manifest.resolve(path);
                        read_wav(&path)
                            .map_err(|e| HarnessError::signal(path.display().to_string(), e))?
                    }
                    None => corpus.get(draws[c * chunk + j]).clone(),
                };
                let rir = &rirs[&position_key(&u.room, u.position)];
                Ok(TestUtterance {
                    utterance_id: u.utterance_id.clone(),
                    signal: render(&speech, rir)
                        .map_err(|e| HarnessError::signal(u.utterance_id.clone(), e))?,
                    true_distance_m: truth[&u.utterance_id],
                })
            })
            .collect::<Result<_, HarnessError>>()?;
        for u in rendered {
            sink(u)?;
        }
    }
    Ok(())
}

/// Corpus index per utterance. Speakers at one position get distinct recordings
/// while the corpus is large enough; positions are visited in key order.
fn draw_speech(specs: &[TestUtteranceSpec], corpus_len: usize, seed: u64) -> Vec<usize> {
    let mut speakers: BTreeMap<String, usize> = BTreeMap::new();
    for u in specs {
        let n = speakers.entry(position_key(&u.room, u.position)).or_default();
        *n = (*n).max(u.speaker + 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_position: BTreeMap<String, Vec<usize>> = speakers
        .into_iter()
        .map(|(key, n)| {
            let picks = if n <= corpus_len {
                index::sample(&mut rng, corpus_len, n).into_vec()
            } else {
                let mut v = index::sample(&mut rng, corpus_len, corpus_len).into_vec();
                let extra: Vec<usize> = (corpus_len..n).map(|i| v[i % corpus_len]).collect();
                v.extend(extra);
                v
            };
            (key, picks)
        })
        .collect();
    specs
        .iter()
        .map(|u| per_position[&position_key(&u.room, u.position)][u.speaker])
        .collect()
}

/// convolve(speech, rir) at 32 kHz, center-trimmed or end-padded to 10 s.
fn render(speech: &SampledSignal, rir: &SampledSignal) -> Result<SampledSignal, crate::SignalError> {
    let speech = resample(speech, TEST_SAMPLE_RATE_HZ);
    let rir = resample(rir, TEST_SAMPLE_RATE_HZ);
    let wet = convolve(&speech, &rir)?.into_samples();
    let out = if wet.len() >= TEST_LEN {
        let start = (wet.len() - TEST_LEN) / 2;
        wet[start..start + TEST_LEN].to_vec()
    } else {
        let mut v = wet;
        v.resize(TEST_LEN, 0.0);
        v
    };
    SampledSignal::new(out, TEST_SAMPLE_RATE_HZ)
}
