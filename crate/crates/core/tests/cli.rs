use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use omnirep::imaging::{load_paletted_png, save_png, Rgb, RgbImage};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_omnirep"))
}

fn write_input(dir: &Path) -> PathBuf {
    let img = RgbImage::from_fn(24, 20, |x, y| {
        if (x as i32 - 8).pow(2) + (y as i32 - 9).pow(2) < 30 {
            Rgb::new(220, 40, 40)
        } else if y > 14 {
            Rgb::new(30, 60, 160)
        } else {
            Rgb::new(240, 230 - 4 * x as u8, 200)
        }
    })
    .unwrap();
    let path = dir.join("in.png");
    save_png(&img, &path).unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn circles_args<'a>(image: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "--image",
        image,
        "--setup",
        "circles",
        "--generations",
        "100",
        "--snapshot-every",
        "25",
        "--seed",
        "7",
        "--out-dir",
        out,
    ]
}

fn frames_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("frame_"))
        .collect();
    names.sort();
    names
}

#[test]
fn writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let image = write_input(tmp.path());
    let out = tmp.path().join("out");
    run_ok(&circles_args(image.to_str().unwrap(), out.to_str().unwrap()));

    assert_eq!(
        frames_in(&out),
        [
            "frame_000000.png",
            "frame_000025.png",
            "frame_000050.png",
            "frame_000075.png",
            "frame_000099.png"
        ]
    );
    let csv = fs::read_to_string(out.join("fitness_log.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(
        lines[0],
        "generation,best_rep_fitness,mean_rep_fitness,best_interp_fitness,mean_interp_fitness,best_pair_fitness"
    );
    assert!(lines[100].starts_with("99,"));

    let target = load_paletted_png(out.join("target.png")).unwrap();
    assert_eq!(target.dimensions(), (24, 20));
    assert!(target.palette().len() <= 4);
    let gif = fs::read(out.join("trajectory.gif")).unwrap();
    assert_eq!(&gif[..6], b"GIF89a");
    let config = fs::read_to_string(out.join("run_config.toml")).unwrap();
    assert!(config.contains("seed = 7"));
    assert!(!out.join("checkpoint.json").exists());
}

#[test]
fn same_command_same_log() {
    let tmp = tempfile::tempdir().unwrap();
    let image = write_input(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&circles_args(image.to_str().unwrap(), a.to_str().unwrap()));
    run_ok(&circles_args(image.to_str().unwrap(), b.to_str().unwrap()));
    for name in ["fitness_log.csv", "trajectory.gif", "frame_000099.png", "target.png"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn resolved_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let image = write_input(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let img = image.to_str().unwrap();
    run_ok(&[
        "--image",
        img,
        "--setup",
        "polygons",
        "--generations",
        "30",
        "--seed",
        "3",
        "--colors",
        "3",
        "--out-dir",
        a.to_str().unwrap(),
    ]);
    let cfg = a.join("run_config.toml");
    run_ok(&[
        "--image",
        img,
        "--setup",
        "polygons",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        b.to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read(a.join("fitness_log.csv")).unwrap(),
        fs::read(b.join("fitness_log.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("run_config.toml")).unwrap(),
        fs::read(b.join("run_config.toml")).unwrap()
    );
}

#[test]
fn resumed_run_matches_uninterrupted() {
    let tmp = tempfile::tempdir().unwrap();
    let image = write_input(tmp.path());
    let img = image.to_str().unwrap();
    let full = tmp.path().join("full");
    let mut args = circles_args(img, full.to_str().unwrap());
    args[3] = "chunks";
    args.extend(["--checkpoint-every", "40"]);
    run_ok(&args);

    // The last checkpoint was taken after generation 80; restart from it in a
    // directory holding only the frames written before that point.
    let resumed = tmp.path().join("resumed");
    fs::create_dir(&resumed).unwrap();
    for name in [
        "frame_000000.png",
        "frame_000025.png",
        "frame_000050.png",
        "frame_000075.png",
    ] {
        fs::copy(full.join(name), resumed.join(name)).unwrap();
    }
    let checkpoint = tmp.path().join("cp.json");
    fs::copy(full.join("checkpoint.json"), &checkpoint).unwrap();
    run_ok(&[
        "--image",
        img,
        "--resume",
        checkpoint.to_str().unwrap(),
        "--out-dir",
        resumed.to_str().unwrap(),
    ]);

    assert_eq!(frames_in(&full), frames_in(&resumed));
    for name in [
        "fitness_log.csv",
        "trajectory.gif",
        "frame_000099.png",
        "run_config.toml",
    ] {
        assert_eq!(
            fs::read(full.join(name)).unwrap(),
            fs::read(resumed.join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn missing_image_flag_prints_usage() {
    let out = bin().args(["--setup", "circles"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_values_are_rejected() {
    for args in [
        vec!["--image", "x.png", "--setup", "hexagons"],
        vec!["--image", "x.png", "--setup", "chunks", "--generations", "ten"],
        vec!["--image", "x.png", "--setup", "chunks", "--frobnicate"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
}

#[test]
fn unreadable_image_fails_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.png");
    let out = bin()
        .args(["--image", missing.to_str().unwrap(), "--setup", "circles", "--out-dir"])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.png"));

    let junk = tmp.path().join("junk.png");
    fs::write(&junk, b"not a png").unwrap();
    let out = bin()
        .args(["--image", junk.to_str().unwrap(), "--setup", "circles"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn bad_config_file_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let image = write_input(tmp.path());
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "generations = 5\nelitism = true\n").unwrap();
    let out = bin()
        .args([
            "--image",
            image.to_str().unwrap(),
            "--setup",
            "circles",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
        ])
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("elitism"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let image = write_input(tmp.path());
    let cfg = tmp.path().join("c.toml");
    fs::write(&cfg, "generations = 500\nseed = 1\n[limits]\nn_circles = 9\n").unwrap();
    let out = tmp.path().join("out");
    run_ok(&[
        "--image",
        image.to_str().unwrap(),
        "--setup",
        "circles",
        "--config",
        cfg.to_str().unwrap(),
        "--generations",
        "4",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    let resolved = fs::read_to_string(out.join("run_config.toml")).unwrap();
    assert!(resolved.contains("generations = 4"));
    assert!(resolved.contains("seed = 1"));
    assert!(resolved.contains("n_circles = 9"));
    assert_eq!(
        fs::read_to_string(out.join("fitness_log.csv")).unwrap().lines().count(),
        5
    );
}
