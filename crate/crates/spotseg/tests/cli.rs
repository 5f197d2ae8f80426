use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spotseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spotseg"))
        .args(args)
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_segment_eval_overlay() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let out = spotseg(&[
        "synth",
        "--out",
        s(&corpus),
        "--count",
        "2",
        "--seed",
        "3",
        "--width",
        "64",
        "--height",
        "64",
        "--max-radius",
        "8",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let image = corpus.join("images/synth_000.png");
    let gt = corpus.join("gt/synth_000.png");
    assert!(image.is_file() && gt.is_file());

    let mask = tmp.path().join("mask.png");
    let diag = tmp.path().join("diag.txt");
    let out = spotseg(&[
        "segment",
        s(&image),
        "--out",
        s(&mask),
        "--diagnostics",
        s(&diag),
        "--inference",
        "lbp",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let diag = fs::read_to_string(&diag).unwrap();
    assert!(diag.contains("lbp_converged = true"), "{diag}");
    assert!(diag.lines().all(|l| l.contains(" = ")));

    let out = spotseg(&[
        "eval",
        "--mask",
        s(&mask),
        "--gt",
        s(&gt),
        "--tolerances",
        "0.6,0.8",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success());
    assert!(text.contains("efficiency=100.0000"), "{text}");
    assert!(
        text.contains("tolerance,correct,over,under,missed,noise\n0.60,1.000000"),
        "{text}"
    );

    let overlay = tmp.path().join("overlay.png");
    let out = spotseg(&[
        "overlay",
        "--image",
        s(&image),
        "--mask",
        s(&mask),
        "--gt",
        s(&gt),
        "--out",
        s(&overlay),
    ]);
    assert!(out.status.success());
    assert!(overlay.is_file());
}

#[test]
fn config_file_and_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    assert!(spotseg(&[
        "synth",
        "--out",
        s(&corpus),
        "--count",
        "1",
        "--width",
        "40",
        "--height",
        "40",
        "--max-radius",
        "6",
        "--min-radius",
        "3"
    ])
    .status
    .success());
    let image = corpus.join("images/synth_000.png");
    let cfg = tmp.path().join("spec.json");
    fs::write(&cfg, r#"{"lambda": 2000, "inference": "graphcut"}"#).unwrap();

    // A huge Potts weight flattens the labeling; the flag brings it back.
    let mask = tmp.path().join("m.png");
    assert!(
        spotseg(&["segment", s(&image), "--out", s(&mask), "--config", s(&cfg)])
            .status
            .success()
    );
    let flat = spotseg_core_mask(&mask);
    assert!(spotseg(&[
        "segment",
        s(&image),
        "--out",
        s(&mask),
        "--config",
        s(&cfg),
        "--lambda",
        "50"
    ])
    .status
    .success());
    let fine = spotseg_core_mask(&mask);
    assert!(flat < fine, "{flat} vs {fine}");

    fs::write(&cfg, r#"{"energy_function": 9}"#).unwrap();
    let out = spotseg(&["segment", s(&image), "--out", s(&mask), "--config", s(&cfg)]);
    assert!(!out.status.success());
}

fn spotseg_core_mask(p: &Path) -> usize {
    spotseg::io::load_mask(p).unwrap().count_foreground()
}

#[test]
fn errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spotseg(&[
        "segment",
        "/nonexistent.png",
        "--out",
        s(&tmp.path().join("m.png")),
    ]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
    let out = spotseg(&[
        "segment",
        "/nonexistent.png",
        "--out",
        "x.png",
        "--bias",
        "3",
    ]);
    assert!(!out.status.success());
    let out = spotseg(&[
        "synth",
        "--out",
        s(tmp.path()),
        "--width",
        "10",
        "--height",
        "10",
    ]);
    assert!(!out.status.success());
}

#[test]
fn grid_on_corpus_with_missing_truth() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("c");
    assert!(spotseg(&[
        "synth",
        "--out",
        s(&corpus),
        "--count",
        "2",
        "--width",
        "48",
        "--height",
        "48",
        "--min-spots",
        "1",
        "--max-spots",
        "3",
        "--max-radius",
        "6",
        "--min-radius",
        "3"
    ])
    .status
    .success());
    fs::remove_file(corpus.join("gt/synth_001.png")).unwrap();
    let out_dir = tmp.path().join("out");
    let out = spotseg(&[
        "grid",
        "--corpus",
        s(&corpus),
        "--out",
        s(&out_dir),
        "--no-masks",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("synth_001"));
    let eff = fs::read_to_string(out_dir.join("efficiency.csv")).unwrap();
    assert_eq!(eff.lines().next(), Some("experiment,lbp,gc"));
    assert_eq!(eff.lines().count(), 13);
    assert!(!out_dir.join("masks").exists());
    assert_eq!(fs::read_dir(out_dir.join("hoover")).unwrap().count(), 24);
    let per_image = fs::read_to_string(out_dir.join("per_image.csv")).unwrap();
    assert_eq!(per_image.lines().count(), 25);
}
