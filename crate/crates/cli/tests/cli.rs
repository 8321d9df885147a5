use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdyn"))
        .args(args)
        .current_dir(cwd)
        .env_remove("FRACDYN_OUT_DIR")
        .output()
        .unwrap()
}

fn ok_json(args: &[&str], cwd: &Path) -> Value {
    let out = run(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn err_json(args: &[&str], cwd: &Path) -> String {
    let out = run(args, cwd);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let text = String::from_utf8(out.stderr).unwrap();
    assert_eq!(text.trim_end().lines().count(), 1, "error is not one line: {text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    v["error"].as_str().unwrap().to_owned()
}

#[test]
fn synth_then_boxdim() {
    let dir = tempfile::tempdir().unwrap();
    let synth = ok_json(
        &["synth", "--kind", "sierpinski-triangle", "--n", "1024", "-o", "tri.pgm"],
        dir.path(),
    );
    assert_eq!(synth["occupied"], 59049);
    let report = ok_json(&["boxdim", "tri.pgm", "--csv", "counts.csv"], dir.path());
    let d = report["dimension"].as_f64().unwrap();
    assert!((d - 1.58496).abs() < 0.05, "{d}");
    assert!(report["r_squared"].as_f64().is_some());
    assert!(report["stderr"].as_f64().is_some());
    assert_eq!(report["config"]["command"], "boxdim");
    assert_eq!(report["config"]["input"], "tri.pgm");

    let csv = std::fs::read_to_string(dir.path().join("counts.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("size,count,ln_size,ln_count"));
    assert_eq!(lines.next().unwrap().split(',').nth(1), Some("3"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn stability_example() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(&["stability", "--b", "3.1"], dir.path());
    assert_eq!(v["class"], "PeriodTwoOscillation");
    let v = ok_json(&["stability", "--r", "0.049432"], dir.path());
    assert_eq!(v["class"], "LargeNeighborhoodStable");
    assert_eq!(v["b"], 1.049432);
    let v = ok_json(&["stability", "--b", "3"], dir.path());
    assert_eq!(v["class"], "OutOfRange");
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let msg = err_json(&["boxdim", "missing.pgm"], dir.path());
    assert!(msg.contains("missing.pgm"), "{msg}");
    let msg = err_json(&["fit-diff", "nowhere.csv"], dir.path());
    assert!(msg.contains("nowhere.csv"), "{msg}");
}

#[test]
fn malformed_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("junk.pgm"), b"P5\n4 4\n255\n\x00").unwrap();
    let msg = err_json(&["radialdim", "junk.pgm"], dir.path());
    assert!(msg.contains("junk.pgm") && msg.contains("malformed"), "{msg}");
}

#[test]
fn usage_errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(v["error"].as_str().unwrap().contains("frobnicate"));
}

#[test]
fn gray_images_need_a_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let mut pgm = b"P2\n8 8\n255\n".to_vec();
    for i in 0..64 {
        pgm.extend_from_slice(format!("{}\n", i * 4).as_bytes());
    }
    std::fs::write(dir.path().join("ramp.pgm"), pgm).unwrap();
    let msg = err_json(&["binarize", "ramp.pgm", "-o", "b.pgm"], dir.path());
    assert!(msg.contains("--threshold"), "{msg}");

    let v = ok_json(
        &["binarize", "ramp.pgm", "--threshold", "128", "-o", "b.pgm", "--plain"],
        dir.path(),
    );
    assert_eq!(v["occupied"], 32);
    let v = ok_json(
        &["binarize", "ramp.pgm", "--threshold", "128", "--polarity", "dark", "-o", "d.pgm"],
        dir.path(),
    );
    assert_eq!(v["occupied"], 32);
    let written = std::fs::read_to_string(dir.path().join("b.pgm")).unwrap();
    assert!(written.starts_with("P2\n8 8\n255\n"));
}

#[test]
fn crop_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    ok_json(
        &["synth", "--kind", "filled-rect", "--width", "20", "--height", "10", "-o", "r.pgm"],
        dir.path(),
    );
    let v = ok_json(
        &["--out-dir", "out", "crop", "r.pgm", "--rect", "5x4+2+3", "-o", "c.pgm"],
        dir.path(),
    );
    assert_eq!(v["width"], 5);
    assert_eq!(v["height"], 4);
    assert!(dir.path().join("out/c.pgm").exists());

    let msg = err_json(&["crop", "r.pgm", "--rect", "30x4+0+0", "-o", "c.pgm"], dir.path());
    assert!(msg.contains("r.pgm") && msg.contains("30x4+0+0"), "{msg}");

    let out = Command::new(env!("CARGO_BIN_EXE_fracdyn"))
        .args(["synth", "--kind", "line", "--length", "16", "-o", "l.pgm"])
        .current_dir(dir.path())
        .env("FRACDYN_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from-env/l.pgm").exists());
}

#[test]
fn radialdim_with_radii_and_guard() {
    let dir = tempfile::tempdir().unwrap();
    ok_json(&["synth", "--kind", "disk", "--radius", "60", "-o", "disk.pgm"], dir.path());
    let v = ok_json(&["radialdim", "disk.pgm", "--csv", "r.csv"], dir.path());
    assert!((v["dimension"].as_f64().unwrap() - 2.0).abs() < 0.1);
    assert_eq!(v["center"]["x"], 60.0);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("size,count,ln_size,ln_count\n"));

    let v = ok_json(
        &["radialdim", "disk.pgm", "--radii", "4,8,16,32", "--center", "centroid"],
        dir.path(),
    );
    assert_eq!(v["radii"].as_array().unwrap().len(), 4);
    let msg = err_json(&["radialdim", "disk.pgm", "--radii", "4,8,16,100"], dir.path());
    assert!(msg.contains("disk.pgm"), "{msg}");
}

#[test]
fn series_keeps_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("imgs");
    std::fs::create_dir(&sub).unwrap();
    for (name, p) in [("a", "0.2"), ("b", "0.6"), ("c", "0.4")] {
        ok_json(
            &["synth", "--kind", "random-density", "--width", "96", "--height", "96", "--p", p, "-o", &format!("imgs/{name}.pgm")],
            dir.path(),
        );
    }
    // Years deliberately out of order.
    std::fs::write(sub.join("m.csv"), "year,path\n2010,b.pgm\n2000,a.pgm\n2005,c.pgm\n").unwrap();
    let v = ok_json(&["series", "imgs/m.csv", "-o", "s.csv"], dir.path());
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let years: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(csv.lines().next(), Some("t,d"));
    assert_eq!(years, ["2010.0", "2000.0", "2005.0"]);
    assert_eq!(v["series"].as_array().unwrap().len(), 3);

    std::fs::write(sub.join("bad.csv"), "year,file\n2000,a.pgm\n").unwrap();
    let msg = err_json(&["series", "imgs/bad.csv", "-o", "s.csv"], dir.path());
    assert!(msg.contains("year,path"), "{msg}");
    std::fs::write(sub.join("gone.csv"), "year,path\n2000,gone.pgm\n").unwrap();
    let msg = err_json(&["series", "imgs/gone.csv", "-o", "s.csv"], dir.path());
    assert!(msg.contains("gone.pgm"), "{msg}");
}

#[test]
fn logistic_report_has_map_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,d\n");
    for t in [1900.0f64, 1915.0, 1924.0, 1935.0, 1956.0, 1986.0, 2006.0, 2013.0] {
        let d = 1.0 + 0.699952 / (1.0 + 2.07022e40 * (-0.049432 * t).exp());
        csv.push_str(&format!("{t},{d}\n"));
    }
    std::fs::write(dir.path().join("s.csv"), csv).unwrap();
    let v = ok_json(&["fit-logistic", "s.csv"], dir.path());
    assert!((v["params"]["K"].as_f64().unwrap() - 0.699952).abs() < 1e-4);
    assert!((v["b"].as_f64().unwrap() - 1.049432).abs() < 1e-4);
    assert_eq!(v["class"], "LargeNeighborhoodStable");
    assert_eq!(v["config"]["offset"], 1.0);
    assert!(v["objective"].as_f64().unwrap() < 1e-10);
}

#[test]
fn orbit_reports_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok_json(
        &["orbit", "--b", "3.2", "--x0", "0.3", "--steps", "2000", "-o", "o.csv"],
        dir.path(),
    );
    assert_eq!(v["behavior"]["kind"], "period-two");
    assert_eq!(v["class"], "PeriodTwoOscillation");
    let csv = std::fs::read_to_string(dir.path().join("o.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2002);
    let v = ok_json(&["orbit", "--b", "1.5"], dir.path());
    assert_eq!(v["behavior"]["kind"], "fixed-point");
    assert_eq!(v["monotone"], true);
}

#[test]
fn population_fit_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let periods = r#"[
        {"t_start": 0, "t_end": 10, "kind": "exponential"},
        {"t_start": 11, "t_end": 20, "kind": "linear"},
        {"t_start": 21, "t_end": 30, "kind": "exponential"}
    ]"#;
    std::fs::write(dir.path().join("periods.json"), periods).unwrap();
    let mut a = String::from("year,population\n");
    let mut b = String::from("year,population\n");
    for y in 0..=30 {
        let t = y as f64;
        let (pa, pb) = match y {
            0..=10 => (100.0 * 1.1f64.powf(t), 50.0 * 1.2f64.powf(t)),
            11..=20 => (300.0 - t, 400.0 + 2.0 * t),
            _ => (5.0 * 1.05f64.powf(t), 7.0 * 1.08f64.powf(t)),
        };
        a.push_str(&format!("{y},{pa}\n"));
        b.push_str(&format!("{y},{pb}\n"));
    }
    std::fs::write(dir.path().join("a.csv"), a).unwrap();
    std::fs::write(dir.path().join("b.csv"), b).unwrap();

    let v = ok_json(
        &["fit-pop", "a.csv", "--periods", "periods.json", "-o", "a.json"],
        dir.path(),
    );
    let segs = v["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 3);
    assert_eq!(segs[1]["kind"], "linear");
    assert!((segs[0]["b"].as_f64().unwrap() - 1.1).abs() < 1e-9);

    let v = ok_json(
        &["compare-pop", "a.json", "b.csv", "--periods-b", "periods.json", "--tolerance", "0.5"],
        dir.path(),
    );
    assert!(v["a"]["alphas"]["3"].as_f64().is_some());
    assert_eq!(v["similarity"]["comparisons"][0]["index"], 3);

    let msg = err_json(&["compare-pop", "a.json", "b.csv"], dir.path());
    assert!(msg.contains("b.csv"), "{msg}");
}

#[test]
fn fit_diff_recovers_generated_series() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,d\n");
    for y in 2000..=2020 {
        let t = y as f64;
        let d = 0.003 * t - 4.5 + (t - 660.0).powi(2) * (t - 1.8).sin() / 1.8e8;
        csv.push_str(&format!("{t},{d}\n"));
    }
    std::fs::write(dir.path().join("s.csv"), csv).unwrap();
    let v = ok_json(&["fit-diff", "s.csv", "--starts", "4"], dir.path());
    assert!(v["objective"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["config"]["seed"], 20_220_000);
    assert_eq!(v["config"]["starts"], 4);
}
