use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use roomeval::geometry::{generate_receiver_grid, GridSpec};
use roomeval::harness::{
    build_test_set_with, load_manifest, position_key, read_predictions, read_truth, score_task1,
    score_task2, validate_submission, write_truth, HarnessError, SpeechCorpus, Task,
};
use roomeval::signal::{read_wav, write_wav, WavFormat};
use roomeval::synthesis::{augment_from_enrollment, image_source_rir, nearest_enrollment, EnrollmentEntry};
use roomeval::{describe, distance, AcousticDescriptors, EnrollmentSet, IsmConfig, PointPosition, SampledSignal, ShoeboxScene};
use serde::{Deserialize, Serialize};

use crate::{Cli, Command, TaskArg};

/// Runs one subcommand; returns the number of failed items.
pub fn run(cli: &Cli) -> Result<usize> {
    fs::create_dir_all(&cli.output_dir)
        .with_context(|| format!("creating {}", cli.output_dir.display()))?;
    let out = cli.output_dir.as_path();
    match &cli.command {
        Command::Describe { rirs } => cmd_describe(rirs, out),
        Command::Synth { scene, config, grid, spacing, clearance, elevations } => {
            let mut spec = GridSpec::default();
            if let Some(v) = spacing {
                spec.spacing_m = *v;
            }
            if let Some(v) = clearance {
                spec.clearance_m = *v;
            }
            if let Some(v) = elevations {
                spec.elevations_m = v.clone();
            }
            cmd_synth(scene, config.as_deref(), grid.then_some(spec), cli.seed, out)
        }
        Command::Augment { enrollment, targets } => cmd_augment(enrollment, targets, cli.seed, out),
        Command::ScoreTask1 { generated, reference } => cmd_score_task1(generated, reference, out),
        Command::ScoreTask2 { predictions, truth } => cmd_score_task2(predictions, truth, out),
        Command::Reverb { manifest, speech, rirs } => cmd_reverb(manifest, speech, rirs.as_deref(), cli.seed, out),
        Command::Validate { task, bundle, manifests } => cmd_validate(*task, bundle, manifests, out),
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// `*.wav` files directly inside `dir`, sorted by name.
fn wav_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "wav") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn stem(path: &Path) -> String {
    path.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

/// Positions and provenance written next to every synthesized or augmented WAV.
#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    #[serde(default)]
    room: String,
    source: PointPosition,
    receiver: PointPosition,
    #[serde(default)]
    distance_m: f64,
    #[serde(default)]
    generator: String,
    #[serde(default)]
    seed: u64,
}

fn write_rir(out: &Path, name: &str, rir: &SampledSignal, sidecar: &Sidecar) -> Result<()> {
    write_wav(rir, out.join(format!("{name}.wav")), WavFormat::Float32)?;
    write_json(&out.join(format!("{name}.json")), sidecar)
}

#[derive(Serialize)]
struct DescribeEntry {
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    descriptors: Option<AcousticDescriptors>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_describe(rirs: &[PathBuf], out: &Path) -> Result<usize> {
    let entries: Vec<DescribeEntry> = rirs
        .par_iter()
        .map(|path| {
            let result = read_wav(path)
                .map_err(anyhow::Error::from)
                .and_then(|rir| Ok(describe(&rir)?));
            let file = path.display().to_string();
            match result {
                Ok(d) => DescribeEntry { file, descriptors: Some(d), error: None },
                Err(e) => DescribeEntry { file, descriptors: None, error: Some(format!("{e:#}")) },
            }
        })
        .collect();
    let failures = entries.iter().filter(|e| e.error.is_some()).count();
    for e in entries.iter().filter_map(|e| Some((&e.file, e.error.as_ref()?))) {
        eprintln!("{}: {}", e.0, e.1);
    }
    write_json(&out.join("descriptors.json"), &entries)?;
    println!("{}", serde_json::to_string_pretty(&entries)?);
    Ok(failures)
}

fn cmd_synth(scene_path: &Path, config: Option<&Path>, grid: Option<GridSpec>, seed: u64, out: &Path) -> Result<usize> {
    let scene: ShoeboxScene = read_json(scene_path)?;
    scene.validate().with_context(|| format!("scene {}", scene_path.display()))?;
    let mut config: IsmConfig = match config {
        Some(p) => read_json(p)?,
        None => IsmConfig::default(),
    };
    config.rng_seed = seed;
    config.validate()?;
    if scene.sources.is_empty() {
        bail!("scene {} has no sources", scene.label);
    }
    let receivers = match grid {
        Some(spec) => generate_receiver_grid(&scene, &spec)?,
        None => scene
            .receivers
            .clone()
            .context("scene has no receivers; pass --grid to generate them")?,
    };
    let jobs: Vec<(String, PointPosition, PointPosition)> = scene
        .sources
        .iter()
        .enumerate()
        .flat_map(|(si, &s)| {
            let label = &scene.label;
            receivers
                .iter()
                .enumerate()
                .map(move |(ri, &r)| (format!("{label}_s{si}_r{ri:03}"), s, r))
        })
        .collect();
    let results: Vec<(String, Result<()>)> = jobs
        .par_iter()
        .map(|(name, s, r)| {
            let result = image_source_rir(&scene, *s, *r, &config)
                .map_err(anyhow::Error::from)
                .and_then(|rir| {
                    let sidecar = Sidecar {
                        room: scene.label.clone(),
                        source: *s,
                        receiver: *r,
                        distance_m: distance(*s, *r),
                        generator: "image-source".into(),
                        seed,
                    };
                    write_rir(out, name, &rir, &sidecar)
                });
            (name.clone(), result)
        })
        .collect();
    Ok(report_items(&results))
}

fn report_items(results: &[(String, Result<()>)]) -> usize {
    let mut failures = 0;
    for (name, r) in results {
        if let Err(e) = r {
            eprintln!("{name}: {e:#}");
            failures += 1;
        }
    }
    println!("{} written, {failures} failed", results.len() - failures);
    failures
}

#[derive(Debug, Deserialize)]
struct Target {
    id: String,
    source: PointPosition,
    receiver: PointPosition,
}

fn cmd_augment(enrollment_dir: &Path, targets: &Path, seed: u64, out: &Path) -> Result<usize> {
    let mut entries = Vec::new();
    let mut names = Vec::new();
    for wav in wav_files(enrollment_dir)? {
        let sidecar: Sidecar = read_json(&wav.with_extension("json"))?;
        let rir = read_wav(&wav).with_context(|| wav.display().to_string())?;
        entries.push(EnrollmentEntry { rir, source: sidecar.source, receiver: sidecar.receiver });
        names.push(stem(&wav));
    }
    let set = EnrollmentSet::new(entries).context("enrollment set")?;
    let targets: Vec<Target> = read_json(targets)?;
    let results: Vec<(String, Result<()>)> = targets
        .par_iter()
        .map(|t| {
            let result = augment_from_enrollment(&set, t.source, t.receiver)
                .map_err(anyhow::Error::from)
                .and_then(|rir| {
                    let used = &names[nearest_enrollment(&set, t.source, t.receiver)];
                    let sidecar = Sidecar {
                        room: used.clone(),
                        source: t.source,
                        receiver: t.receiver,
                        distance_m: distance(t.source, t.receiver),
                        generator: format!("augment:{used}"),
                        seed,
                    };
                    write_rir(out, &t.id, &rir, &sidecar)
                });
            (t.id.clone(), result)
        })
        .collect();
    Ok(report_items(&results))
}

fn read_wav_dir(dir: &Path) -> Result<BTreeMap<String, SampledSignal>> {
    wav_files(dir)?
        .par_iter()
        .map(|p| Ok((stem(p), read_wav(p).with_context(|| p.display().to_string())?)))
        .collect()
}

fn cmd_score_task1(generated: &Path, reference: &Path, out: &Path) -> Result<usize> {
    let report = score_task1(&read_wav_dir(generated)?, &read_wav_dir(reference)?)?;
    let table = report.to_table("generated");
    write_json(&out.join("task1_report.json"), &report)?;
    fs::write(out.join("task1_report.txt"), &table)?;
    print!("{table}");
    Ok(0)
}

fn cmd_score_task2(predictions: &Path, truth: &Path, out: &Path) -> Result<usize> {
    let open = |p: &Path| fs::File::open(p).with_context(|| format!("opening {}", p.display()));
    let report = score_task2(&read_predictions(open(predictions)?)?, &read_truth(open(truth)?)?)?;
    let table = report.to_table("submission");
    write_json(&out.join("task2_report.json"), &report)?;
    fs::write(out.join("task2_report.txt"), &table)?;
    print!("{table}");
    Ok(0)
}

fn cmd_reverb(manifest: &Path, speech: &Path, rir_dir: Option<&Path>, seed: u64, out: &Path) -> Result<usize> {
    let manifest = load_manifest(manifest)?;
    let corpus = SpeechCorpus::load(speech)?;
    let mut rirs = BTreeMap::new();
    for u in &manifest.test_utterances {
        let key = position_key(&u.room, u.position);
        if rirs.contains_key(&key) {
            continue;
        }
        let path = match (&u.rir, rir_dir) {
            (Some(rel), _) => manifest.resolve(rel),
            (None, Some(dir)) => dir.join(format!("{key}.wav")),
            (None, None) => continue,
        };
        if path.exists() {
            rirs.insert(key, read_wav(&path).with_context(|| path.display().to_string())?);
        }
    }
    let mut written = 0;
    build_test_set_with(&manifest, &rirs, &corpus, seed, |u| {
        write_wav(&u.signal, out.join(format!("{}.wav", u.utterance_id)), WavFormat::Float32)
            .map_err(|source| HarnessError::Signal { context: u.utterance_id.clone(), source })?;
        written += 1;
        Ok(())
    })?;
    let truth_path = out.join("truth.csv");
    let file = fs::File::create(&truth_path).with_context(|| truth_path.display().to_string())?;
    write_truth(file, &manifest.truth())?;
    println!("{written} utterances written");
    Ok(0)
}

fn cmd_validate(task: TaskArg, bundle: &Path, manifests: &[PathBuf], out: &Path) -> Result<usize> {
    let manifests = manifests.iter().map(load_manifest).collect::<Result<Vec<_>, _>>()?;
    let task = match task {
        TaskArg::One => Task::Task1,
        TaskArg::Two => Task::Task2,
    };
    let report = validate_submission(task, bundle, &manifests)?;
    write_json(&out.join(format!("validation_{task}.json")), &report)?;
    println!("{report}");
    Ok(report.violations.len())
}
