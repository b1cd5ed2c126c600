use std::path::Path;
use std::process::{Command, Output};

use circlecount::imagebuf::{write_pgm, write_ppm, GrayImage};
use circlecount::synth::{render, SceneSpec, PALETTE};
use tempfile::tempdir;

fn circlecount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circlecount"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn without_timings(s: &str) -> String {
    s.lines()
        .filter(|l| !l.starts_with("timing."))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn count_blank_image() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("blank.pgm");
    std::fs::write(&file, write_pgm(&GrayImage::new(64, 64))).unwrap();
    let o = circlecount(&["count", path_str(&file)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("count=0\n"), "{text}");
    assert!(text.contains("degenerate=true\n"), "{text}");
}

#[test]
fn count_truncated_file_names_it() {
    let dir = tempdir().unwrap();
    let file = dir.path().join("cut.pgm");
    let mut bytes = write_pgm(&GrayImage::new(16, 16));
    bytes.truncate(bytes.len() - 10);
    std::fs::write(&file, bytes).unwrap();
    let o = circlecount(&["count", path_str(&file)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cut.pgm"), "{}", stderr(&o));
}

#[test]
fn count_six_disk_scene() {
    let mut spec = SceneSpec::new(320, 220, [150, 150, 150]);
    for i in 0..6 {
        spec = spec.with_disk(
            55 + 105 * (i % 3),
            60 + 100 * (i / 3),
            30,
            PALETTE[i as usize],
        );
    }
    let (img, _) = render(&spec).unwrap();
    let dir = tempdir().unwrap();
    let file = dir.path().join("eggs.ppm");
    std::fs::write(&file, write_ppm(&img)).unwrap();
    let annotated = dir.path().join("annotated");
    let dumps = dir.path().join("dumps");
    let o = circlecount(&[
        "count",
        "--annotate",
        path_str(&annotated),
        "--dump-stages",
        path_str(&dumps),
        path_str(&file),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("count=6\n"), "{}", stdout(&o));
    assert!(annotated.join("eggs.annotated.ppm").is_file());
    for name in [
        "stage2.pgm",
        "stage3.pgm",
        "stage5.pgm",
        "stage7.pgm",
        "stage8.ppm",
    ] {
        assert!(dumps.join(format!("eggs.{name}")).is_file(), "{name}");
    }
}

#[test]
fn gen_is_reproducible() {
    let a = tempdir().unwrap();
    let b = tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = circlecount(&[
            "gen",
            "--profile",
            "clean",
            "--n",
            "10",
            "--seed",
            "1",
            "--out",
            path_str(dir),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let images = names
        .iter()
        .filter(|n| n.to_string_lossy().ends_with(".ppm"))
        .count();
    let truths = names
        .iter()
        .filter(|n| n.to_string_lossy().ends_with(".truth"))
        .count();
    assert_eq!((images, truths), (10, 10));
    for name in names {
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn gen_into_unwritable_location_fails() {
    let dir = tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("corpus");
    let o = circlecount(&[
        "gen",
        "--profile",
        "noisy",
        "--n",
        "2",
        "--seed",
        "3",
        "--out",
        path_str(&target),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("error:"), "{}", stderr(&o));
}

#[test]
fn eval_empty_directory() {
    let dir = tempdir().unwrap();
    let o = circlecount(&["eval", "--corpus", path_str(dir.path())]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no corpus found"), "{}", stderr(&o));
}

#[test]
fn eval_is_deterministic() {
    let dir = tempdir().unwrap();
    let o = circlecount(&[
        "gen",
        "--profile",
        "occluded",
        "--n",
        "4",
        "--seed",
        "9",
        "--out",
        path_str(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first = circlecount(&["eval", "--corpus", path_str(dir.path())]);
    let second = circlecount(&["eval", "--corpus", path_str(dir.path())]);
    assert!(first.status.success(), "{}", stderr(&first));
    let text = stdout(&first);
    assert!(text.contains("images=4\n"), "{text}");
    assert_eq!(without_timings(&text), without_timings(&stdout(&second)));
}

#[test]
fn usage_errors() {
    assert_eq!(circlecount(&[]).status.code(), Some(1));
    assert_eq!(
        circlecount(&["count", "--otsu-classes", "3", "x.pgm"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        circlecount(&["count", "--tones", "odd", "x.pgm"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        circlecount(&[
            "gen",
            "--profile",
            "clean",
            "--n",
            "0",
            "--seed",
            "1",
            "--out",
            "x"
        ])
        .status
        .code(),
        Some(1)
    );
    let help = circlecount(&["--help"]);
    assert!(help.status.success());
    assert!(stdout(&help).contains("count"));
}
