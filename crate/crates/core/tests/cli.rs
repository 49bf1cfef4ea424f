use std::fs;
use std::path::{Path, PathBuf};

use pyramid_landing::cli::run_with;

const SIMULATE: &str = "\
image_width = 96
image_height = 72
rock_coverage = 0.05
rock_diameter = 0.4
start_x = 8.0
end_x = 10.0
";

const FUSE: &str = "\
image_width = 96
image_height = 72
extent_cells = 64
";

fn run(args: &[&str]) -> i32 {
    let mut all = vec!["pyramid-landing"];
    all.extend_from_slice(args);
    run_with(all)
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Simulates a short flight into `dir/sim` and returns that directory.
fn simulate(dir: &Path, seed: &str) -> PathBuf {
    let cfg = write_config(dir, "simulate.toml", SIMULATE);
    let out = dir.join("sim");
    assert_eq!(run(&["simulate", "--config", s(&cfg), "--seed", seed, "--out", s(&out)]), 0);
    out
}

fn fuse(dir: &Path, input: &Path, out: &Path) -> i32 {
    let cfg = write_config(dir, "fuse.toml", FUSE);
    run(&["fuse", "--config", s(&cfg), "--input", s(input), "--out", s(out)])
}

fn sorted_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn simulate_fuse_detect_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulate(tmp.path(), "4");
    let names: Vec<String> = sorted_files(&sim).into_iter().map(|(n, _)| n).collect();
    assert_eq!(
        names,
        [
            "frame_000000.rimg",
            "frame_000001.rimg",
            "frame_000002.rimg",
            "frame_000003.rimg",
            "frame_000004.rimg",
            "poses.txt",
            "terrain.meta"
        ]
    );

    let fused = tmp.path().join("fused");
    assert_eq!(fuse(tmp.path(), &sim, &fused), 0);
    assert!(fused.join("map/header.json").is_file());
    assert!(fused.join("map/layer_3.csv").is_file());
    let stats = fs::read_to_string(fused.join("fuse_stats.csv")).unwrap();
    assert_eq!(stats.lines().count(), 6);

    let detected = tmp.path().join("detected");
    let code = run(&[
        "detect",
        "--input",
        s(&fused.join("map")),
        "--out",
        s(&detected),
    ]);
    assert_eq!(code, 0);
    assert!(fs::read(detected.join("landing.pgm")).unwrap().starts_with(b"P5"));
    assert!(fs::read_to_string(detected.join("candidates.csv")).unwrap().starts_with("rank"));

    // A resolution check that does not match the map is refused.
    let strict = write_config(tmp.path(), "detect.toml", "expected_resolution = 0.05\n");
    let code = run(&[
        "detect",
        "--config",
        s(&strict),
        "--input",
        s(&fused.join("map")),
        "--out",
        s(&tmp.path().join("refused")),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn simulate_is_reproducible_from_its_meta_file() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = simulate(a.path(), "9");
    let second = simulate(b.path(), "9");
    assert_eq!(sorted_files(&first), sorted_files(&second));

    // Feeding terrain.meta back regenerates the same run.
    let third = b.path().join("again");
    let code = run(&["simulate", "--config", s(&first.join("terrain.meta")), "--out", s(&third)]);
    assert_eq!(code, 0);
    assert_eq!(sorted_files(&first), sorted_files(&third));

    let other = tempfile::tempdir().unwrap();
    let different = simulate(other.path(), "10");
    assert_ne!(sorted_files(&first), sorted_files(&different));
}

#[test]
fn fuse_rejects_bad_inputs_without_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = simulate(tmp.path(), "2");
    let out = tmp.path().join("never");

    // Empty directory.
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(fuse(tmp.path(), &empty, &out), 2);

    // Missing directory.
    assert_eq!(fuse(tmp.path(), &tmp.path().join("missing"), &out), 2);

    // One image more than poses.
    let extra = tmp.path().join("extra");
    copy_dir(&sim, &extra);
    fs::copy(extra.join("frame_000004.rimg"), extra.join("frame_000005.rimg")).unwrap();
    assert_eq!(fuse(tmp.path(), &extra, &out), 2);

    // Corrupt magic.
    let corrupt = tmp.path().join("corrupt");
    copy_dir(&sim, &corrupt);
    let mut bytes = fs::read(corrupt.join("frame_000002.rimg")).unwrap();
    bytes[0] = b'Q';
    fs::write(corrupt.join("frame_000002.rimg"), bytes).unwrap();
    assert_eq!(fuse(tmp.path(), &corrupt, &out), 2);

    // Timestamps out of order.
    let shuffled = tmp.path().join("shuffled");
    copy_dir(&sim, &shuffled);
    let text = fs::read_to_string(shuffled.join("poses.txt")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(1, 2);
    fs::write(shuffled.join("poses.txt"), lines.join("\n") + "\n").unwrap();
    assert_eq!(fuse(tmp.path(), &shuffled, &out), 2);

    // Frames rendered with another image size.
    let cfg = write_config(tmp.path(), "wrong.toml", "image_width = 64\nimage_height = 48\nextent_cells = 64\n");
    let code = run(&["fuse", "--config", s(&cfg), "--input", s(&sim), "--out", s(&out)]);
    assert_eq!(code, 2);

    assert!(!out.exists());
}

fn copy_dir(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        fs::copy(&p, to.join(p.file_name().unwrap())).unwrap();
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let typo = write_config(tmp.path(), "typo.toml", "image_widht = 96\n");
    let out = tmp.path().join("o");
    assert_eq!(run(&["simulate", "--config", s(&typo), "--out", s(&out)]), 2);
    assert_eq!(run(&["simulate", "--config", s(&tmp.path().join("nope.toml")), "--out", s(&out)]), 2);
    // No output directory anywhere.
    assert_eq!(run(&["simulate"]), 2);
    assert_eq!(run(&["frobnicate"]), 2);
    let bad_experiment = write_config(tmp.path(), "eval.toml", "experiment = \"teleport\"\n");
    assert_eq!(run(&["eval", "--config", s(&bad_experiment), "--out", s(&out)]), 2);
    assert!(!out.exists());
}

const SMALL_BENCH: &str = "\
frames = 3
image_width = 160
image_height = 120
";

#[test]
fn bench_gates_decide_the_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bench.toml", SMALL_BENCH);
    let pass = write_config(
        tmp.path(),
        "pass.toml",
        "[[gate]]\nname = \"memory\"\nmetric = \"bench.memory_bytes\"\nmax = 1e9\n",
    );
    let fail = write_config(
        tmp.path(),
        "fail.toml",
        "[[gate]]\nname = \"impossible\"\nmetric = \"bench.fuse_ms.median\"\nmax = 0.0\n",
    );
    let missing = write_config(
        tmp.path(),
        "missing.toml",
        "[[gate]]\nname = \"unknown metric\"\nmetric = \"bench.no_such_metric\"\nmin = 0.0\n",
    );
    let out = tmp.path().join("bench");
    let base = ["bench", "--config", s(&cfg), "--out", s(&out)];
    let with = |gates: &Path| {
        let mut v = base.to_vec();
        v.extend(["--check", "--gates", s(gates)]);
        run(&v)
    };
    assert_eq!(with(&pass), 0);
    assert_eq!(with(&fail), 1);
    assert_eq!(with(&missing), 1);
    // Without --check gates are ignored.
    let mut v = base.to_vec();
    v.extend(["--gates", s(&fail)]);
    assert_eq!(run(&v), 0);
    for f in ["report.txt", "metrics.csv", "timing.csv", "frames.csv"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let malformed = write_config(tmp.path(), "malformed.toml", "[[gate]]\nname = 3\n");
    assert_eq!(with(&malformed), 2);
}
