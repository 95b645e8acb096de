use std::path::Path;
use std::process::{Command, Output};

use roomeval::signal::{read_wav, write_wav, WavFormat};
use roomeval::synthesis::polack_rir;
use roomeval::{IsmConfig, SampledSignal};
use serde_json::Value;

fn roomeval(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roomeval"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const CUBE: &str = r#"{"label": "cube", "dims_m": [2.0, 2.0, 2.0], "wall_absorption": [0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
                       "sources": [[1.1, 1.2, 1.3]]}"#;

#[test]
fn describe_polack_rir() {
    let dir = tempfile::tempdir().unwrap();
    let h = polack_rir(0.5, 3.0, 0.01, &IsmConfig::default()).unwrap();
    write_wav(&h, dir.path().join("p.wav"), WavFormat::Float32).unwrap();
    let out = roomeval(dir.path(), &["describe", "--rir", "p.wav"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("descriptors.json"));
    let t20 = v[0]["descriptors"]["t20_s"]["broadband"].as_f64().unwrap();
    assert!((t20 - 0.5).abs() / 0.5 < 0.05, "{t20}");
    assert!((v[0]["descriptors"]["drr_db"].as_f64().unwrap() - 3.0).abs() < 1.0);
}

#[test]
fn describe_keeps_going_past_bad_files() {
    let dir = tempfile::tempdir().unwrap();
    write_wav(&SampledSignal::zeros(100, 32_000).unwrap(), dir.path().join("silent.wav"), WavFormat::Pcm16).unwrap();
    let out = roomeval(dir.path(), &["describe", "--rir", "silent.wav"]);
    assert_eq!(out.status.code(), Some(1));

    let h = polack_rir(0.4, 0.0, 0.01, &IsmConfig::default()).unwrap();
    write_wav(&h, dir.path().join("good.wav"), WavFormat::Float32).unwrap();
    let out = roomeval(dir.path(), &["describe", "--rir", "good.wav", "silent.wav"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&dir.path().join("descriptors.json"));
    assert!(v[0]["descriptors"].is_object() && v[0].get("error").is_none());
    assert!(v[1]["error"].is_string() && v[1].get("descriptors").is_none());
}

#[test]
fn synth_grid_enumerates_27_receivers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("scene.json"), CUBE).unwrap();
    std::fs::write(dir.path().join("ism.json"), r#"{"max_order": 3}"#).unwrap();
    let out = roomeval(
        dir.path(),
        &["--output-dir", "out", "synth", "--scene", "scene.json", "--config", "ism.json", "--grid", "--clearance", "0.5"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let wavs = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "wav")
        .count();
    assert_eq!(wavs, 27);
    let side = json(&dir.path().join("out/cube_s0_r000.json"));
    assert_eq!(side["receiver"], serde_json::json!([0.5, 0.5, 0.5]));
    assert_eq!(side["generator"], "image-source");
}

#[test]
fn absorbing_room_peak_sits_at_propagation_delay() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scene.json"),
        r#"{"label": "free", "dims_m": [8, 8, 8], "wall_absorption": [1, 1, 1, 1, 1, 1],
            "sources": [[1, 1, 1]], "receivers": [[4, 5, 1]]}"#,
    )
    .unwrap();
    assert!(roomeval(dir.path(), &["synth", "--scene", "scene.json"]).status.success());
    let h = read_wav(dir.path().join("free_s0_r000.wav")).unwrap();
    // r = 5 m
    assert_eq!(h.peak_index(), (5.0_f64 / 343.0 * 32_000.0).round() as usize);
}

#[test]
fn synth_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("scene.json"), CUBE).unwrap();
    for out in ["a", "b"] {
        let status = roomeval(dir.path(), &["--jobs", "2", "--output-dir", out, "synth", "--scene", "scene.json", "--grid"]).status;
        assert!(status.success());
    }
    let names: Vec<_> = std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(&n)).unwrap(),
            std::fs::read(dir.path().join("b").join(&n)).unwrap()
        );
    }
}

#[test]
fn augment_with_enrolled_geometry_returns_enrollment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("scene.json"),
        r#"{"label": "e", "dims_m": [5, 4, 3], "wall_absorption": [0.3, 0.3, 0.3, 0.3, 0.3, 0.3],
            "sources": [[2.5, 2, 1.5]], "receivers": [[3.5, 2, 1.5], [2.5, 3.2, 1.2]]}"#,
    )
    .unwrap();
    std::fs::write(dir.path().join("ism.json"), r#"{"max_order": 6}"#).unwrap();
    assert!(roomeval(dir.path(), &["--output-dir", "enroll", "synth", "--scene", "scene.json", "--config", "ism.json"]).status.success());
    std::fs::write(
        dir.path().join("targets.json"),
        r#"[{"id": "same", "source": [2.5, 2, 1.5], "receiver": [3.5, 2, 1.5]},
            {"id": "far", "source": [2.5, 2, 1.5], "receiver": [4.5, 3.5, 1.0]}]"#,
    )
    .unwrap();
    let out = roomeval(dir.path(), &["--output-dir", "aug", "augment", "--enrollment", "enroll", "--targets", "targets.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        read_wav(dir.path().join("aug/same.wav")).unwrap(),
        read_wav(dir.path().join("enroll/e_s0_r000.wav")).unwrap()
    );
    assert_eq!(json(&dir.path().join("aug/far.json"))["generator"], "augment:e_s0_r001");
}

#[test]
fn score_task1_identity_and_task2_hand_example() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["gen", "ref"] {
        std::fs::create_dir_all(dir.path().join(sub)).unwrap();
        for i in 0..2u64 {
            let config = IsmConfig { rng_seed: i, ..IsmConfig::default() };
            let h = polack_rir(0.3 + 0.2 * i as f64, 1.0, 0.005, &config).unwrap();
            write_wav(&h, dir.path().join(sub).join(format!("r_{i:02}.wav")), WavFormat::Float32).unwrap();
        }
    }
    let out = roomeval(dir.path(), &["score-task1", "--generated", "gen", "--reference", "ref"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&dir.path().join("task1_report.json"));
    assert_eq!(rep["t20_mape_pct"]["broadband"], 0.0);
    assert_eq!(rep["drr_mse_db"], 0.0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("T20 MAPE [%]"));

    std::fs::write(dir.path().join("p.csv"), "utterance_id,predicted_distance_m\nx,2.2\n").unwrap();
    std::fs::write(dir.path().join("t.csv"), "utterance_id,true_distance_m\nx,2.0\n").unwrap();
    let out = roomeval(dir.path(), &["score-task2", "--predictions", "p.csv", "--truth", "t.csv"]);
    assert!(out.status.success());
    let rep = json(&dir.path().join("task2_report.json"));
    assert!((rep["overall"]["mae_m"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert_eq!(rep["bins"][1]["n"], 1);
    let table = std::fs::read_to_string(dir.path().join("task2_report.txt")).unwrap();
    assert!(table.contains("2–4m") && table.contains("10.0%"));

    std::fs::write(dir.path().join("t.csv"), "utterance_id,true_distance_m\ny,2.0\n").unwrap();
    assert_eq!(roomeval(dir.path(), &["score-task2", "--predictions", "p.csv", "--truth", "t.csv"]).status.code(), Some(2));
}

#[test]
fn reverb_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    std::fs::create_dir_all(root.join("speech")).unwrap();
    std::fs::create_dir_all(root.join("rirs")).unwrap();
    for i in 0..3 {
        let v = (0..8000).map(|t| ((t * (i + 2)) as f64 * 0.013).sin() * 0.3).collect();
        write_wav(&SampledSignal::new(v, 16_000).unwrap(), root.join(format!("speech/s{i}.wav")), WavFormat::Pcm16).unwrap();
    }
    for pos in 0..2 {
        let h = polack_rir(0.3, 2.0, 0.003 * (pos + 1) as f64, &IsmConfig::default()).unwrap();
        write_wav(&h, root.join(format!("rirs/r1_{pos}.wav")), WavFormat::Float32).unwrap();
    }
    let mut utts = Vec::new();
    for pos in 0..2 {
        for spk in 0..3 {
            utts.push(format!(
                r#"{{"utterance_id": "r1_{pos}_{spk}", "room": "r1", "position": {pos}, "speaker": {spk},
                    "source": [1, 1, 1], "receiver": [{}, 1, 1], "hidden": true}}"#,
                2 + pos
            ));
        }
    }
    std::fs::write(
        root.join("m.json"),
        format!(
            r#"{{"schema_version": 1, "scenario_id": 1, "rooms": ["r1"],
                 "eval_requests": {{"r1": [{{"source": [1, 1, 1], "receiver": [2, 1, 1]}}]}},
                 "test_utterances": [{}]}}"#,
            utts.join(",")
        ),
    )
    .unwrap();
    let out = roomeval(root, &["--output-dir", "ts", "reverb", "--manifest", "m.json", "--speech", "speech", "--rirs", "rirs"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let u = read_wav(root.join("ts/r1_1_2.wav")).unwrap();
    assert_eq!((u.len(), u.sample_rate_hz()), (320_000, 32_000));
    let truth = std::fs::read_to_string(root.join("ts/truth.csv")).unwrap();
    assert!(truth.starts_with("utterance_id,true_distance_m\nr1_0_0,1.0\n"), "{truth}");

    let mut rows = String::from("utterance_id,predicted_distance_m\n");
    for id in ["r1_0_0", "r1_0_1", "r1_0_2", "r1_1_0", "r1_1_1", "r1_1_2"] {
        rows.push_str(&format!("{id},1.5\n"));
    }
    std::fs::write(root.join("p.csv"), &rows).unwrap();
    let ok = roomeval(root, &["--output-dir", "v", "validate", "--task", "2", "--bundle", "p.csv", "--manifest", "m.json"]);
    assert!(ok.status.success());
    std::fs::write(root.join("p.csv"), rows.replace("r1_1_1,1.5\n", "")).unwrap();
    let bad = roomeval(root, &["--output-dir", "v", "validate", "--task", "2", "--bundle", "p.csv", "--manifest", "m.json"]);
    assert_eq!(bad.status.code(), Some(1));
    let rep = json(&root.join("v/validation_task2.json"));
    assert!(rep["violations"].as_array().unwrap().iter().any(|v| v == "missing utterance id r1_1_1"));

    std::fs::create_dir_all(root.join("t1")).unwrap();
    let h = SampledSignal::new(vec![1.0, 0.5], 44_100).unwrap();
    write_wav(&h, root.join("t1/r1_00.wav"), WavFormat::Float32).unwrap();
    let out = roomeval(root, &["--output-dir", "v", "validate", "--task", "1", "--bundle", "t1", "--manifest", "m.json"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = json(&root.join("v/validation_task1.json"));
    assert!(rep["violations"][0].as_str().unwrap().contains("sample rate 44100 Hz"));
}
