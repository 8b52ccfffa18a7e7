use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fspi::scenes;

fn fspi(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fspi")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = fspi(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn image_values(text: &str) -> Vec<f64> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect()
}

fn report_field(text: &str, key: &str) -> String {
    let start = text.find(&format!("\"{key}\":")).unwrap() + key.len() + 3;
    text[start..].split([',', '}']).next().unwrap().trim_matches('"').to_string()
}

#[test]
fn half_spectrum_acquisition_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["acquire", "--scene", "synthetic:peppers", "--size", "64", "--sampling", "half", "--out", "a"]);
    assert_eq!(data_rows(&read(dir.path(), "a/measurements.csv")).len(), 8192);
    let recon = image_values(&read(dir.path(), "a/recon.csv"));
    let scene = scenes::peppers(64);
    let err = recon.iter().zip(scene.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-6, "max err {err}");
    for f in ["a/plan.txt", "a/spectrum.csv", "a/spectrum.png", "a/recon.pgm", "a/report.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn identical_config_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["embed", "--size", "32", "--snr-db", "25", "--seed", "3", "--dc", "0.2", "--out", out];
    ok(dir.path(), &args("x"));
    ok(dir.path(), &args("y"));
    for f in ["measurements.csv", "tv.csv", "spectrum.csv", "fused.csv", "plan.txt"] {
        assert_eq!(read(dir.path(), &format!("x/{f}")), read(dir.path(), &format!("y/{f}")), "{f}");
    }
}

#[test]
fn dc_sweep_writes_one_fused_image_per_offset() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["embed", "--size", "16", "--dc", "0,0.5,1", "--out", "e"]);
    for dc in ["0", "0.5", "1"] {
        assert!(dir.path().join(format!("e/fused_dc{dc}.pgm")).exists());
        assert_eq!(report_field(&read(dir.path(), &format!("e/report_dc{dc}.json")), "psnr_db"), "inf");
    }
}

#[test]
fn embed_outputs_feed_division() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["embed", "--size", "32", "--dc", "0.1", "--out", "e"]);
    ok(
        dir.path(),
        &["dewatermark", "--plan", "e/plan.txt", "--measurements", "e/measurements.csv", "--tv", "e/tv.csv",
          "--reference", "synthetic:peppers", "--size", "32", "--out", "d"],
    );
    let psnr: f64 = report_field(&read(dir.path(), "d/report.json"), "psnr_db").parse().unwrap();
    assert!(psnr > 100.0, "psnr {psnr}");
}

#[test]
fn half_u_filter_removes_a_half_u_watermark() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["embed", "--size", "32", "--region", "half-u", "--out", "e"]);
    ok(
        dir.path(),
        &["dewatermark", "--plan", "e/plan.txt", "--measurements", "e/measurements.csv", "--filter", "half-u",
          "--reference", "synthetic:peppers", "--size", "32", "--out", "d"],
    );
    let report = read(dir.path(), "d/report.json");
    let psnr: f64 = report_field(&report, "psnr_db").parse().unwrap();
    assert!(psnr > 100.0, "psnr {psnr}");
    assert!(read(dir.path(), "d/region.rle").starts_with("# fspi-region v1"));
}

#[test]
fn acquire_outputs_feed_filtering() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["acquire", "--size", "16", "--out", "a"]);
    ok(dir.path(), &["dewatermark", "--plan", "a/plan.txt", "--measurements", "a/measurements.csv", "--filter", "lowfreq:0.1", "--out", "d"]);
    assert_eq!(image_values(&read(dir.path(), "d/recon.csv")).len(), 256);
}

#[test]
fn stego_round_trip_recovers_weights_exactly() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["stego-embed", "--size", "24", "--wm-size", "16", "--r1-side", "11", "--key-seed", "5", "--out", "s"]);
    ok(dir.path(), &["stego-extract", "--plan", "s/plan.txt", "--measurements", "s/measurements.csv", "--mapping", "s/mapping.csv", "--out", "x"]);

    let plan = read(dir.path(), "s/plan.txt");
    let entry_of = |u: &str, v: &str| {
        plan.lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split_whitespace().collect::<Vec<_>>())
            .find(|f| f[2] == u && f[4] == v && f[6] == "0")
            .map(|f| f[0].parse::<usize>().unwrap())
            .unwrap()
    };
    let tv: Vec<f64> = data_rows(&read(dir.path(), "s/tv.csv")).iter().map(|r| r[1].parse().unwrap()).collect();
    let mapping = data_rows(&read(dir.path(), "s/mapping.csv"));
    let weights = data_rows(&read(dir.path(), "x/weights.csv"));
    assert_eq!(mapping.len(), weights.len());
    for (m, w) in mapping.iter().zip(&weights) {
        let embedded = tv[entry_of(&m[0], &m[1])];
        let got: f64 = w[1].parse().unwrap();
        assert!((got - embedded).abs() < 1e-9, "{got} vs {embedded}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "size = 16\nsampling = \"half\"\nout = \"from-file\"\n").unwrap();
    ok(dir.path(), &["acquire", "--config", "run.toml", "--out", "from-flag"]);
    assert!(!dir.path().join("from-file").exists());
    assert_eq!(data_rows(&read(dir.path(), "from-flag/measurements.csv")).len(), 2 * 16 * 16);
}

#[test]
fn sweeps_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sweep-noise", "--size", "16", "--snr-sweep", "10,30", "--repetitions", "2", "--out", "n"]);
    assert_eq!(data_rows(&read(dir.path(), "n/sweep.csv")).len(), 4);
    assert_eq!(data_rows(&read(dir.path(), "n/summary.csv")).len(), 2);
    ok(dir.path(), &["sweep-sampling", "--size", "16", "--q-sweep", "0.25,1", "--out", "q"]);
    let rows = data_rows(&read(dir.path(), "q/sampling.csv"));
    assert_eq!(rows.last().unwrap(), &vec!["1".to_string(), "1".to_string()]);
}

#[test]
fn color_embed_writes_a_pixmap() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["color-embed", "--size", "16", "--dc", "0,0.1,0.2", "--out", "c"]);
    assert!(fs::read(dir.path().join("c/fused.ppm")).unwrap().starts_with(b"P6\n16 16 255\n"));
}

#[test]
fn errors_are_one_line_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    for (args, code) in [
        (vec!["acquire", "--mode", "nope"], 1),
        (vec!["acquire", "--scene", "missing.pgm"], 1),
        (vec!["stego-extract"], 1),
        (vec!["acquire", "--no-such-flag"], 2),
    ] {
        let out = fspi(dir.path(), &args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}

#[test]
fn reads_pgm_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut pgm = b"P2\n4 4\n255\n".to_vec();
    for i in 0..16 {
        pgm.extend_from_slice(format!("{}\n", i * 16).as_bytes());
    }
    fs::write(dir.path().join("in.pgm"), pgm).unwrap();
    ok(dir.path(), &["acquire", "--scene", "in.pgm", "--out", "a"]);
    assert!(fs::read(dir.path().join("a/recon.pgm")).unwrap().starts_with(b"P5"));
    let recon = image_values(&read(dir.path(), "a/recon.csv"));
    assert!((recon[5] - 80.0 / 255.0).abs() < 1e-9);
}
