//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

// `ensure!` negates its condition so a NaN measurement fails rather than passes.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomeval::harness::{
    build_test_set_with, load_manifest, request_id, score_task1, score_task2, utterance_id, validate_submission,
    write_predictions, EvalRequest, PredictionSet, ScenarioManifest, SpeechCorpus, Task, TestUtteranceSpec,
};
use roomeval::metrics::{
    decay_curve, edf_pair_mse, estimate_drr, estimate_t20, schroeder_edf, EnergyDecayFunction, OctaveBand,
};
use roomeval::signal::{write_wav, WavFormat};
use roomeval::synthesis::{
    augment_from_enrollment, image_source_rir, image_sources, nearest_enrollment, polack_rir, EnrollmentEntry,
};
use roomeval::{distance, EnrollmentSet, IsmConfig, PointPosition, SampledSignal, ShoeboxScene};

// Pinned tolerances.
const IDENTITY_PAIRS: usize = 50;
const IDENTITY_BUDGET: Duration = Duration::from_secs(10);
const T20_MEDIAN_MAX: f64 = 0.03;
const T20_WORST_MAX: f64 = 0.08;
const DRR_WORST_MAX_DB: f64 = 1.0;
const EDF_HAND_TOL_DB: f64 = 1e-3;
const ARRIVAL_TOL_SAMPLES: f64 = 1.0;
const SABINE_REL_TOL: f64 = 0.30;
const CHALLENGE_BUDGET: Duration = Duration::from_secs(120);
const CHALLENGE_ISM_ORDER: u32 = 10;
const AUGMENT_T20_MAX: f64 = 0.20;
const AUGMENT_TRIALS: u64 = 20;
const AUGMENT_DRR_WIN_FRACTION: f64 = 0.70;
const EXACT: f64 = 1e-12;

const C: f64 = 343.0;
const FS: u32 = 32_000;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ism_config(order: u32) -> IsmConfig {
    IsmConfig {
        max_order: order,
        ..IsmConfig::default()
    }
}

fn polack(t60: f64, drr: f64, seed: u64) -> SampledSignal {
    let config = IsmConfig {
        rng_seed: seed,
        ..IsmConfig::default()
    };
    polack_rir(t60, drr, 0.005, &config).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn random_point(rng: &mut ChaCha8Rng, dims: [f64; 3], margin: f64) -> PointPosition {
    PointPosition(std::array::from_fn(|i| rng.random_range(margin..dims[i] - margin)))
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let scene = ShoeboxScene::empty("id", [6.0, 5.0, 3.0], 0.35);
    let set: BTreeMap<String, SampledSignal> = (0..IDENTITY_PAIRS)
        .map(|i| {
            let h = if i % 2 == 0 {
                polack(rng.random_range(0.2..1.2), rng.random_range(-10.0..15.0), i as u64)
            } else {
                let s = random_point(&mut rng, scene.dims_m, 0.5);
                let r = random_point(&mut rng, scene.dims_m, 0.5);
                image_source_rir(&scene, s, r, &ism_config(8)).unwrap()
            };
            (format!("rir_{i:02}"), h)
        })
        .collect();
    let start = Instant::now();
    let report = score_task1(&set, &set).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(report.t20_mape_pct[&OctaveBand::Broadband] == Some(0.0), "broadband T20 MAPE {:?}", report.t20_mape_pct);
    for band in OctaveBand::ALL {
        ensure!(report.edf_mse_db[&band] == Some(0.0), "EDF MSE {band}: {:?}", report.edf_mse_db[&band]);
        ensure!(report.edf_pairs[&band] == IDENTITY_PAIRS, "EDF pairs {band}");
    }
    ensure!(report.drr_mse_db == Some(0.0), "DRR MSE {:?}", report.drr_mse_db);
    ensure!(report.cells().all(|v| v == 0.0), "non-zero cell");
    ensure!(elapsed < IDENTITY_BUDGET, "took {elapsed:?}");
    Ok(format!("{IDENTITY_PAIRS} pairs, {} zero cells, {elapsed:.2?}", report.cells().count()))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let errors: Vec<f64> = (0..100)
        .map(|i| {
            let t60 = rng.random_range(0.2..1.2);
            let h = polack(t60, 0.0, 1000 + i);
            let t20 = estimate_t20(&schroeder_edf(&h, OctaveBand::Broadband).unwrap()).unwrap();
            (t20 - t60).abs() / t60
        })
        .collect();
    let worst = errors.iter().copied().fold(0.0, f64::max);
    let med = median(errors);
    ensure!(med <= T20_MEDIAN_MAX && worst <= T20_WORST_MAX, "median {:.2}%, max {:.2}%", 100.0 * med, 100.0 * worst);
    Ok(format!("median {:.2}%, max {:.2}%", 100.0 * med, 100.0 * worst))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let drr = rng.random_range(-10.0..15.0);
        let t60 = rng.random_range(0.2..1.2);
        let got = estimate_drr(&polack(t60, drr, 2000 + i)).map_err(|e| e.to_string())?;
        worst = worst.max((got - drr).abs());
    }
    ensure!(worst <= DRR_WORST_MAX_DB, "max error {worst:.3} dB");
    Ok(format!("max error {worst:.2e} dB"))
}

fn criterion_4() -> Outcome {
    let edf = decay_curve(&[1.0; 4]).map_err(|e| e.to_string())?;
    for (got, want) in edf.iter().zip([0.0, -1.249, -3.010, -6.021]) {
        ensure!((got - want).abs() <= EDF_HAND_TOL_DB, "EDF {edf:?}");
    }
    let reference = EnergyDecayFunction {
        values_db: vec![0.0; 100],
        sample_rate_hz: 1000,
        band: OctaveBand::Broadband,
    };
    // Unit error on samples 0..95 and a huge error on the 5 that must be dropped.
    let mut predicted = reference.clone();
    for (i, v) in predicted.values_db.iter_mut().enumerate() {
        *v = if i < 95 { 1.0 } else { 1e9 };
    }
    let mse = edf_pair_mse(&predicted, &reference).map_err(|e| e.to_string())?;
    ensure!(mse == 1.0, "MSE {mse}");
    // A single 95-sample-normalized bump on sample 94 proves the divisor is 95.
    predicted.values_db[94] = 1.0 + 95f64.sqrt();
    let bumped = edf_pair_mse(&predicted, &reference).map_err(|e| e.to_string())?;
    let expected = (94.0 + (1.0 + 95f64.sqrt()).powi(2)) / 95.0;
    ensure!((bumped - expected).abs() < EXACT * 100.0, "bumped {bumped} vs {expected}");
    Ok(format!("EDF {:.3?} dB; 95 of 100 samples averaged", edf))
}

fn onset(h: &[f64]) -> usize {
    let peak = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut i = h.iter().position(|x| x.abs() >= 0.5 * peak).unwrap();
    while i + 1 < h.len() && h[i + 1].abs() > h[i].abs() {
        i += 1;
    }
    i
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut geometries = 0;
    while geometries < 50 {
        let dims = [rng.random_range(3.0..9.0), rng.random_range(3.0..8.0), rng.random_range(2.4..4.0)];
        let scene = ShoeboxScene::empty("r", dims, rng.random_range(0.2..0.8));
        let s = random_point(&mut rng, dims, 0.3);
        let r = random_point(&mut rng, dims, 0.3);
        if distance(s, r) < 0.5 {
            continue;
        }
        geometries += 1;
        let h = image_source_rir(&scene, s, r, &ism_config(6)).map_err(|e| e.to_string())?;
        let expected = distance(s, r) / C * f64::from(FS);
        worst = worst.max((onset(h.samples()) as f64 - expected).abs());
    }
    ensure!(worst <= ARRIVAL_TOL_SAMPLES, "direct arrival off by {worst:.2} samples");

    let rigid = ShoeboxScene::empty("rigid", [4.0, 3.0, 2.5], 0.0);
    let arrivals = image_sources(&rigid, PointPosition::new(1.0, 1.0, 1.0), PointPosition::new(3.0, 2.0, 1.5), &ism_config(1))
        .map_err(|e| e.to_string())?;
    ensure!(arrivals.len() == 7, "{} first-order arrivals", arrivals.len());

    let dims = [5.0, 4.0, 3.0];
    let alpha = 0.3;
    let area = 2.0 * (dims[0] * dims[1] + dims[0] * dims[2] + dims[1] * dims[2]);
    let sabine = 0.161 * dims.iter().product::<f64>() / (alpha * area);
    let scene = ShoeboxScene::empty("sabine", dims, alpha);
    let h = image_source_rir(&scene, PointPosition::new(1.5, 1.2, 1.4), PointPosition::new(3.6, 2.7, 1.6), &ism_config(30))
        .map_err(|e| e.to_string())?;
    let t20 = estimate_t20(&schroeder_edf(&h, OctaveBand::Broadband).unwrap()).map_err(|e| e.to_string())?;
    let rel = (t20 - sabine).abs() / sabine;
    ensure!(rel <= SABINE_REL_TOL, "T20 {t20:.3} s vs Sabine {sabine:.3} s");
    Ok(format!(
        "onset error ≤ {worst:.0} sample over 50 rooms; 7 arrivals; T20 {t20:.3} s vs Sabine {sabine:.3} s ({:+.1}%)",
        100.0 * (t20 - sabine) / sabine
    ))
}

/// Band-limited noise bursts standing in for dry speech.
fn synthetic_speech(n: usize) -> SpeechCorpus {
    let entries = (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(900 + i as u64);
            let mut prev = 0.0;
            let v: Vec<f64> = (0..16_000)
                .map(|t| {
                    let syllable = (std::f64::consts::PI * t as f64 / 2000.0).sin().abs();
                    prev = 0.7 * prev + 0.3 * rng.random_range(-1.0..1.0);
                    0.5 * syllable * prev
                })
                .collect();
            (format!("spk{i:02}.wav"), SampledSignal::new(v, 16_000).unwrap())
        })
        .collect();
    SpeechCorpus::new(entries).unwrap()
}

struct MiniChallenge {
    manifests: Vec<ScenarioManifest>,
    task1_dir: PathBuf,
    task2_csv: PathBuf,
    utterances: usize,
}

fn build_mini_challenge(root: &Path) -> Result<MiniChallenge, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let task1_dir = root.join("task1");
    std::fs::create_dir_all(&task1_dir).map_err(|e| e.to_string())?;
    let config = ism_config(CHALLENGE_ISM_ORDER);
    let corpus = synthetic_speech(12);
    let mut manifests = Vec::new();
    let mut predictions = Vec::new();
    let mut utterances = 0;
    for scenario in 1..=2u8 {
        let rooms: Vec<String> = (0..10).map(|i| format!("room_{:02}", 2 * i + scenario as usize)).collect();
        let mut m = ScenarioManifest::new(scenario, rooms.clone());
        m.challenge_shaped = true;
        let mut rirs = BTreeMap::new();
        for room in &rooms {
            let dims = [rng.random_range(4.0..9.0), rng.random_range(3.5..7.0), rng.random_range(2.5..3.5)];
            let scene = ShoeboxScene::empty(room.clone(), dims, rng.random_range(0.25..0.6));
            let source = random_point(&mut rng, dims, 0.5);
            let mut requests = Vec::new();
            for i in 0..10 {
                let receiver = random_point(&mut rng, dims, 0.5);
                let h = image_source_rir(&scene, source, receiver, &config).map_err(|e| e.to_string())?;
                write_wav(&h, task1_dir.join(format!("{}.wav", request_id(room, i))), WavFormat::Float32)
                    .map_err(|e| e.to_string())?;
                requests.push(EvalRequest { source, receiver, reference_rir: None });
            }
            m.eval_requests.insert(room.clone(), requests);
            for pos in 0..8 {
                let receiver = random_point(&mut rng, dims, 0.5);
                let h = image_source_rir(&scene, source, receiver, &config).map_err(|e| e.to_string())?;
                rirs.insert(roomeval::harness::position_key(room, pos), h);
                for spk in 0..3 {
                    m.test_utterances.push(TestUtteranceSpec {
                        utterance_id: utterance_id(room, pos, spk),
                        room: room.clone(),
                        position: pos,
                        speaker: spk,
                        source,
                        receiver,
                        rir: None,
                        hidden: true,
                        speech: None,
                        true_distance_m: None,
                    });
                }
            }
        }
        // Round-trip through JSON so the challenge-count checks run at load time.
        let path = root.join(format!("scenario_{scenario}.json"));
        std::fs::write(&path, serde_json::to_string_pretty(&m).unwrap()).map_err(|e| e.to_string())?;
        let m = load_manifest(&path).map_err(|e| e.to_string())?;
        let truth = m.truth();
        build_test_set_with(&m, &rirs, &corpus, 6, |u| {
            assert_eq!(u.signal.len(), 320_000);
            utterances += 1;
            predictions.push((u.utterance_id.clone(), truth[&u.utterance_id] * 1.05));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
        manifests.push(m);
    }
    let task2_csv = root.join("predictions.csv");
    let file = std::fs::File::create(&task2_csv).map_err(|e| e.to_string())?;
    write_predictions(file, &predictions.into_iter().collect::<PredictionSet>()).map_err(|e| e.to_string())?;
    Ok(MiniChallenge { manifests, task1_dir, task2_csv, utterances })
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mc = build_mini_challenge(tmp.path())?;
    roomeval::harness::check_disjoint(&mc.manifests).map_err(|e| e.to_string())?;
    ensure!(mc.utterances == 480, "{} utterances rendered", mc.utterances);

    let t1 = validate_submission(Task::Task1, &mc.task1_dir, &mc.manifests).map_err(|e| e.to_string())?;
    ensure!(t1.valid && t1.expected == 200 && t1.found == 200, "task 1: {t1}");
    let t2 = validate_submission(Task::Task2, &mc.task2_csv, &mc.manifests).map_err(|e| e.to_string())?;
    ensure!(t2.valid && t2.expected == 480 && t2.found == 480, "task 2: {t2}");

    // Every single CSV row deletion.
    let csv = std::fs::read_to_string(&mc.task2_csv).map_err(|e| e.to_string())?;
    let lines: Vec<&str> = csv.lines().collect();
    let cut = tmp.path().join("cut.csv");
    for skip in 1..lines.len() {
        let kept: Vec<&str> = lines.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, l)| *l).collect();
        std::fs::write(&cut, kept.join("\n") + "\n").map_err(|e| e.to_string())?;
        let rep = validate_submission(Task::Task2, &cut, &mc.manifests).map_err(|e| e.to_string())?;
        let id = lines[skip].split(',').next().unwrap();
        ensure!(
            !rep.valid && rep.violations.iter().any(|v| v == &format!("missing utterance id {id}")),
            "deleting {id} not flagged"
        );
    }
    // A spread of single WAV deletions.
    let mut wavs: Vec<PathBuf> = std::fs::read_dir(&mc.task1_dir).unwrap().map(|e| e.unwrap().path()).collect();
    wavs.sort();
    let aside = tmp.path().join("aside.wav");
    for wav in wavs.iter().step_by(10) {
        std::fs::rename(wav, &aside).map_err(|e| e.to_string())?;
        let rep = validate_submission(Task::Task1, &mc.task1_dir, &mc.manifests).map_err(|e| e.to_string())?;
        std::fs::rename(&aside, wav).map_err(|e| e.to_string())?;
        let name = wav.file_name().unwrap().to_string_lossy();
        ensure!(
            !rep.valid && rep.violations.iter().any(|v| v == &format!("missing RIR {name}")),
            "deleting {name} not flagged"
        );
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < CHALLENGE_BUDGET, "took {elapsed:?}");
    Ok(format!(
        "200 WAVs + 480 rows valid; 480 row and {} WAV deletions flagged; {elapsed:.1?}",
        wavs.len().div_ceil(10)
    ))
}

fn criterion_7() -> Outcome {
    let truth = BTreeMap::from([("u".to_string(), 2.0)]);
    let preds: PredictionSet = [("u".to_string(), 2.2)].into_iter().collect();
    let rep = score_task2(&preds, &truth).map_err(|e| e.to_string())?;
    ensure!((rep.overall.mae_m.unwrap() - 0.2).abs() < EXACT, "MAE {:?}", rep.overall.mae_m);
    ensure!((rep.overall.mape_pct.unwrap() - 10.0).abs() < EXACT * 1e3, "MAPE {:?}", rep.overall.mape_pct);
    ensure!(rep.bins[1].label == "2–4m" && rep.bins[1].n == 1, "bin {:?}", rep.bins[1]);

    // One utterance per bin plus two more: errors hand-computed below.
    let truth: BTreeMap<String, f64> =
        [("a", 1.0), ("b", 1.5), ("c", 3.0), ("d", 5.0), ("e", 6.0), ("f", 10.0)].map(|(k, v)| (k.to_string(), v)).into();
    let preds: PredictionSet =
        [("a", 1.5), ("b", 1.2), ("c", 3.3), ("d", 4.0), ("e", 6.0), ("f", 8.0)].map(|(k, v)| (k.to_string(), v)).into_iter().collect();
    let rep = score_task2(&preds, &truth).map_err(|e| e.to_string())?;
    // Bin means of |err| = (0.5 + 0.3)/2, 0.3, 1.0, (0 + 2)/2 and of |err|/d = (50 + 20)/2, 10, 20, (0 + 20)/2 %.
    let want_mae = [0.4, 0.3, 1.0, 1.0];
    let want_mape = [35.0, 10.0, 20.0, 10.0];
    let want_n = [2, 1, 1, 2];
    for (i, b) in rep.bins.iter().enumerate() {
        ensure!(b.n == want_n[i], "bin {} n {}", b.label, b.n);
        ensure!((b.mae_m.unwrap() - want_mae[i]).abs() < 1e-12, "bin {} MAE {:?}", b.label, b.mae_m);
        ensure!((b.mape_pct.unwrap() - want_mape[i]).abs() < 1e-9, "bin {} MAPE {:?}", b.label, b.mape_pct);
    }
    ensure!(rep.bins.iter().map(|b| b.n).sum::<usize>() == rep.overall.n, "bin n sum");
    ensure!((rep.overall.mae_m.unwrap() - 4.1 / 6.0).abs() < 1e-12, "overall MAE");
    let table = rep.to_table("hand");
    for label in ["0–2m", "2–4m", "4–6m", "6+m"] {
        ensure!(table.contains(label), "table lacks {label}");
    }
    Ok(format!("0.2 m / 10% in 2–4m; bins n={want_n:?}"))
}

struct AugmentTrial {
    t20_err: f64,
    edf_aug: f64,
    edf_naive: f64,
    drr_aug: f64,
    drr_naive: f64,
}

fn augment_trial(seed: u64) -> AugmentTrial {
    const DIMS: [f64; 3] = [5.0, 4.0, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jitter = |rng: &mut ChaCha8Rng, c: [f64; 3], r: f64| PointPosition(std::array::from_fn(|i| c[i] + rng.random_range(-r..r)));
    let scene = ShoeboxScene::empty("r", DIMS, 0.3);
    let ism = |s, r| image_source_rir(&scene, s, r, &ism_config(20)).unwrap();
    let center = [2.5, 2.0, 1.5];
    let source = jitter(&mut rng, center, 0.3);
    let mut entries = Vec::new();
    while entries.len() < 5 {
        let receiver = jitter(&mut rng, center, 1.0);
        if distance(source, receiver) >= 0.5 {
            entries.push(EnrollmentEntry { rir: ism(source, receiver), source, receiver });
        }
    }
    let corner: [f64; 3] = std::array::from_fn(|i| if rng.random_bool(0.5) { 0.6 } else { DIMS[i] - 0.6 });
    let target = jitter(&mut rng, corner, 0.2);
    let set = EnrollmentSet::new(entries).unwrap();
    let truth = ism(source, target);
    let augmented = augment_from_enrollment(&set, source, target).unwrap();
    let naive = &set.entries()[nearest_enrollment(&set, source, target)].rir;

    let edf = |h: &SampledSignal| schroeder_edf(h, OctaveBand::Broadband).unwrap();
    let (e_truth, e_aug, e_naive) = (edf(&truth), edf(&augmented), edf(naive));
    let t20_truth = estimate_t20(&e_truth).unwrap();
    let drr_truth = estimate_drr(&truth).unwrap();
    AugmentTrial {
        t20_err: (estimate_t20(&e_aug).unwrap() - t20_truth).abs() / t20_truth,
        edf_aug: edf_pair_mse(&e_aug, &e_truth).unwrap(),
        edf_naive: edf_pair_mse(&e_naive, &e_truth).unwrap(),
        drr_aug: (estimate_drr(&augmented).unwrap() - drr_truth).powi(2),
        drr_naive: (estimate_drr(naive).unwrap() - drr_truth).powi(2),
    }
}

fn criterion_8() -> Outcome {
    let trials: Vec<AugmentTrial> = (0..AUGMENT_TRIALS).map(|i| augment_trial(800 + i)).collect();
    let worst_t20 = trials.iter().map(|t| t.t20_err).fold(0.0, f64::max);
    let n = trials.len() as f64;
    let edf_aug = trials.iter().map(|t| t.edf_aug).sum::<f64>() / n;
    let edf_naive = trials.iter().map(|t| t.edf_naive).sum::<f64>() / n;
    let wins = trials.iter().filter(|t| t.drr_aug < t.drr_naive).count();
    let summary = format!(
        "max T20 error {:.1}%, EDF MSE {edf_aug:.2} vs naive {edf_naive:.2} dB, DRR wins {wins}/{}",
        100.0 * worst_t20,
        trials.len()
    );
    ensure!(worst_t20 <= AUGMENT_T20_MAX, "{summary}");
    ensure!(edf_aug < edf_naive, "{summary}");
    ensure!(wins as f64 >= AUGMENT_DRR_WIN_FRACTION * n, "{summary}");
    Ok(summary)
}

fn cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_roomeval"))
        .current_dir(dir)
        .args(["--seed", "4242"])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("roomeval {args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    }
}

/// synth → augment → describe → score-task1 → reverb → score-task2 → validate, all
/// with relative paths so two runs in different directories are comparable byte for byte.
fn pipeline(dir: &Path) -> Result<(), String> {
    let write = |name: &str, text: &str| std::fs::write(dir.join(name), text).map_err(|e| e.to_string());
    write(
        "scene.json",
        r#"{"label": "lab", "dims_m": [4.0, 3.5, 2.8], "wall_absorption": [0.3, 0.3, 0.35, 0.35, 0.2, 0.5],
            "sources": [[1.2, 1.1, 1.5]], "receivers": [[2.0, 1.8, 1.4], [3.1, 2.5, 1.2], [1.9, 2.9, 1.6]]}"#,
    )?;
    write("ism.json", r#"{"max_order": 8}"#)?;
    write(
        "targets.json",
        r#"[{"id": "room_01_00", "source": [1.2, 1.1, 1.5], "receiver": [3.5, 3.0, 1.2]},
            {"id": "room_01_01", "source": [1.2, 1.1, 1.5], "receiver": [0.5, 0.5, 1.0]}]"#,
    )?;
    cli(dir, &["--output-dir", "enroll", "synth", "--scene", "scene.json", "--config", "ism.json"])?;
    cli(dir, &["--output-dir", "refs", "synth", "--scene", "scene.json", "--config", "ism.json", "--grid", "--spacing", "1.5", "--elevations", "1.2"])?;
    cli(dir, &["--output-dir", "gen", "augment", "--enrollment", "enroll", "--targets", "targets.json"])?;
    cli(dir, &["--output-dir", "desc", "describe", "--rir", "gen/room_01_00.wav", "gen/room_01_01.wav"])?;
    // Score augmented RIRs against image-source references for the same geometry.
    std::fs::create_dir_all(dir.join("truth_rirs")).map_err(|e| e.to_string())?;
    write(
        "truth_scene.json",
        r#"{"label": "room_01", "dims_m": [4.0, 3.5, 2.8], "wall_absorption": [0.3, 0.3, 0.35, 0.35, 0.2, 0.5],
            "sources": [[1.2, 1.1, 1.5]], "receivers": [[3.5, 3.0, 1.2], [0.5, 0.5, 1.0]]}"#,
    )?;
    cli(dir, &["--output-dir", "truth_raw", "synth", "--scene", "truth_scene.json", "--config", "ism.json"])?;
    for (from, to) in [("room_01_s0_r000", "room_01_00"), ("room_01_s0_r001", "room_01_01")] {
        std::fs::copy(dir.join(format!("truth_raw/{from}.wav")), dir.join(format!("truth_rirs/{to}.wav")))
            .map_err(|e| e.to_string())?;
    }
    cli(dir, &["--output-dir", "t1", "score-task1", "--generated", "gen", "--reference", "truth_rirs"])?;

    std::fs::create_dir_all(dir.join("speech")).map_err(|e| e.to_string())?;
    let corpus = synthetic_speech(4);
    for (i, name) in corpus.names().enumerate() {
        write_wav(corpus.get(i), dir.join("speech").join(name), WavFormat::Pcm16).map_err(|e| e.to_string())?;
    }
    write(
        "manifest.json",
        r#"{"schema_version": 1, "scenario_id": 1, "rooms": ["room_01"],
            "eval_requests": {"room_01": [{"source": [1.2, 1.1, 1.5], "receiver": [3.5, 3.0, 1.2]},
                                          {"source": [1.2, 1.1, 1.5], "receiver": [0.5, 0.5, 1.0]}]},
            "test_utterances": [
              {"utterance_id": "room_01_0_0", "room": "room_01", "position": 0, "speaker": 0, "source": [1.2, 1.1, 1.5], "receiver": [3.5, 3.0, 1.2], "rir": "truth_rirs/room_01_00.wav"},
              {"utterance_id": "room_01_0_1", "room": "room_01", "position": 0, "speaker": 1, "source": [1.2, 1.1, 1.5], "receiver": [3.5, 3.0, 1.2], "rir": "truth_rirs/room_01_00.wav"},
              {"utterance_id": "room_01_1_0", "room": "room_01", "position": 1, "speaker": 0, "source": [1.2, 1.1, 1.5], "receiver": [0.5, 0.5, 1.0], "rir": "truth_rirs/room_01_01.wav"}
            ]}"#,
    )?;
    cli(dir, &["--output-dir", "testset", "reverb", "--manifest", "manifest.json", "--speech", "speech"])?;
    write(
        "predictions.csv",
        "utterance_id,predicted_distance_m\nroom_01_0_0,3.0\nroom_01_0_1,2.5\nroom_01_1_0,1.1\n",
    )?;
    cli(dir, &["--output-dir", "t2", "score-task2", "--predictions", "predictions.csv", "--truth", "testset/truth.csv"])?;
    cli(dir, &["--output-dir", "v", "validate", "--task", "1", "--bundle", "truth_rirs", "--manifest", "manifest.json"])?;
    cli(dir, &["--output-dir", "v", "validate", "--task", "2", "--bundle", "predictions.csv", "--manifest", "manifest.json"])?;
    Ok(())
}

fn all_files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    pipeline(a.path())?;
    pipeline(b.path())?;
    let (fa, fb) = (all_files(a.path()), all_files(b.path()));
    ensure!(fa.keys().eq(fb.keys()), "file sets differ");
    let differing: Vec<_> = fa.iter().filter(|(k, v)| fb[*k] != **v).map(|(k, _)| k.display().to_string()).collect();
    ensure!(differing.is_empty(), "differing files: {differing:?}");
    let count = |ext: &str| fa.keys().filter(|k| k.extension().is_some_and(|e| e == ext)).count();
    ensure!(count("wav") > 0 && count("csv") > 0 && count("json") > 0, "pipeline produced too few outputs");
    Ok(format!(
        "{} files identical ({} WAV, {} CSV, {} JSON)",
        fa.len(),
        count("wav"),
        count("csv"),
        count("json")
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("metric identities", criterion_1),
        ("T20 oracle", criterion_2),
        ("DRR oracle", criterion_3),
        ("EDF hand oracle", criterion_4),
        ("ISM physics", criterion_5),
        ("challenge-shape validation", criterion_6),
        ("Task-2 scoring", criterion_7),
        ("augmenter regression", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} — {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name} — {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
