use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use genfreq::io::{parse_trace, parse_waveform};
use genfreq::signals::{sample, single_phase};
use tempfile::TempDir;

fn genfreq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genfreq")).args(args).env_remove("GENFREQ_SEED").output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = genfreq(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn generate_example1_has_expected_shape() {
    let d = TempDir::new().unwrap();
    let f = path(&d, "e1.csv");
    ok(&["generate", "example1", "--v", "12e3", "--f", "60", "--fs", "10000", "--dur", "0.1", "-o", s(&f)]);
    let text = read(&f);
    assert!(text.lines().any(|l| l.starts_with("# sample_rate=")));
    let w = parse_waveform(&text).unwrap();
    assert_eq!(w.len(), 1000);
    assert_eq!(w.dim(), 2);
    assert_eq!(w.sample_rate(), 10_000.0);
}

#[test]
fn generated_values_round_trip_exactly() {
    let d = TempDir::new().unwrap();
    let f = path(&d, "e1.csv");
    ok(&["generate", "example1", "--phi", "0.3", "--dur", "0.02", "-o", s(&f)]);
    let parsed = parse_waveform(&read(&f)).unwrap();
    let direct = sample(&single_phase(12e3, TAU * 60.0, 0.3).unwrap(), 10_000.0, 0.0, 0.02, 0.0, 0).unwrap();
    assert_eq!(parsed.rows(), direct.rows());
    assert_eq!(parsed.times(), direct.times());
}

#[test]
fn generate_dc_is_constant() {
    let d = TempDir::new().unwrap();
    let f = path(&d, "dc.csv");
    ok(&["generate", "dc", "--v", "100", "--fs", "1000", "--dur", "1", "-o", s(&f)]);
    let w = parse_waveform(&read(&f)).unwrap();
    assert_eq!(w.len(), 1000);
    assert!(w.channel(0).iter().all(|&x| x == 100.0));
}

#[test]
fn fault_file_matches_example2_before_the_fault() {
    let d = TempDir::new().unwrap();
    let (fa, e2) = (path(&d, "fault.csv"), path(&d, "e2.csv"));
    ok(&["generate", "fault", "--sag", "0.4", "--tfault", "0.2", "--tclear", "0.3", "-o", s(&fa)]);
    ok(&["generate", "example2", "--fs", "20000", "--dur", "0.7", "-o", s(&e2)]);
    let (wf, w2) = (parse_waveform(&read(&fa)).unwrap(), parse_waveform(&read(&e2)).unwrap());
    assert_eq!(wf.len(), w2.len());
    let mut checked = 0;
    for k in 0..wf.len() {
        if wf.time(k) < 0.2 {
            assert_eq!(wf.row(k), w2.row(k), "row {k}");
            checked += 1;
        }
    }
    assert_eq!(checked, 4000);
    assert_ne!(wf.row(5000), w2.row(5000));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let d = TempDir::new().unwrap();
    let (a, b, c) = (path(&d, "a.csv"), path(&d, "b.csv"), path(&d, "c.csv"));
    ok(&["generate", "example2", "--noise", "50", "--seed", "9", "-o", s(&a)]);
    ok(&["generate", "example2", "--noise", "50", "--seed", "9", "-o", s(&b)]);
    ok(&["generate", "example2", "--noise", "50", "--seed", "10", "-o", s(&c)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn seed_env_var_is_the_default_seed() {
    let d = TempDir::new().unwrap();
    let (a, b) = (path(&d, "a.csv"), path(&d, "b.csv"));
    ok(&["generate", "example2", "--noise", "50", "--seed", "42", "-o", s(&a)]);
    let out = Command::new(env!("CARGO_BIN_EXE_genfreq"))
        .args(["generate", "example2", "--noise", "50", "-o", s(&b)])
        .env("GENFREQ_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let d = TempDir::new().unwrap();
    let cfg = path(&d, "run.conf");
    fs::write(&cfg, "# sampling\nfs = 2000\ndur = 0.05\n").unwrap();
    let (a, b) = (path(&d, "a.csv"), path(&d, "b.csv"));
    ok(&["generate", "example1", "--config", s(&cfg), "-o", s(&a)]);
    ok(&["generate", "example1", "--config", s(&cfg), "--fs", "4000", "-o", s(&b)]);
    let (wa, wb) = (parse_waveform(&read(&a)).unwrap(), parse_waveform(&read(&b)).unwrap());
    assert_eq!((wa.sample_rate(), wa.len()), (2000.0, 100));
    assert_eq!((wb.sample_rate(), wb.len()), (4000.0, 200));
}

#[test]
fn estimate_geo_on_example1_recovers_60_hz() {
    let d = TempDir::new().unwrap();
    let (w, t) = (path(&d, "e1.csv"), path(&d, "tr.csv"));
    ok(&["generate", "example1", "--dur", "0.2", "-o", s(&w)]);
    ok(&["estimate", s(&w), "--method", "geo", "-o", s(&t)]);
    let tr = parse_trace(&read(&t)).unwrap();
    assert_eq!(tr.len(), 2000);
    let hz = tr.omega_hz();
    for k in tr.valid_indices(0.02, 0.2) {
        assert!((hz[k] - 60.0).abs() <= 0.06, "{} Hz at {}", hz[k], tr.t[k]);
    }
}

#[test]
fn estimate_geo_on_dc_has_zero_omega() {
    let d = TempDir::new().unwrap();
    let (w, t) = (path(&d, "dc.csv"), path(&d, "tr.csv"));
    ok(&["generate", "dc", "--decay", "-3", "--fs", "1000", "-o", s(&w)]);
    ok(&["estimate", s(&w), "-o", s(&t)]);
    let tr = parse_trace(&read(&t)).unwrap();
    assert!(tr.omega_mag.iter().all(|&x| x == 0.0));
}

#[test]
fn estimate_pll_on_example2_settles_to_60_hz() {
    let d = TempDir::new().unwrap();
    let (w, t) = (path(&d, "e2.csv"), path(&d, "tr.csv"));
    ok(&["generate", "example2", "--dur", "0.3", "-o", s(&w)]);
    ok(&["estimate", s(&w), "-m", "pll", "--f-init", "59", "-o", s(&t)]);
    let tr = parse_trace(&read(&t)).unwrap();
    let (mean, _) = tr.omega_stats(0.2, 0.3).unwrap();
    assert!((mean / TAU - 60.0).abs() < 0.01, "{}", mean / TAU);
}

#[test]
fn emit_curve_writes_curve_coordinates() {
    let d = TempDir::new().unwrap();
    let (w, t, c) = (path(&d, "e1.csv"), path(&d, "tr.csv"), path(&d, "curve.csv"));
    ok(&["generate", "example1", "-o", s(&w)]);
    ok(&["estimate", s(&w), "-o", s(&t), "--emit-curve", s(&c), "--tau", "0"]);
    let text = read(&c);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,v1,v2,magnitude,flux_curvature");
    let row: Vec<f64> = lines.nth(500).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[3] - 12e3).abs() < 1e-8);
    // omega / |v| for the circle of radius V
    assert!((row[4] - 120.0 * PI / 12e3).abs() < 1e-3 * row[4]);
}

#[test]
fn compare_trace_with_itself_has_zero_rmse() {
    let d = TempDir::new().unwrap();
    let (w, t, r) = (path(&d, "e2.csv"), path(&d, "tr.csv"), path(&d, "rep.csv"));
    ok(&["generate", "example2", "-o", s(&w)]);
    ok(&["estimate", s(&w), "-o", s(&t)]);
    let out = ok(&["compare", s(&t), s(&t), "--window", "0.01,0.09", "--out", s(&r)]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("rmse omega"));
    let report = read(&r);
    let row: Vec<&str> = report.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn geo_and_pll_agree_after_the_fault() {
    let d = TempDir::new().unwrap();
    let (w, g, p, r) = (path(&d, "f.csv"), path(&d, "g.csv"), path(&d, "p.csv"), path(&d, "r.csv"));
    ok(&["generate", "fault", "-o", s(&w)]);
    ok(&["estimate", s(&w), "-o", s(&g)]);
    ok(&["estimate", s(&w), "-m", "pll", "-o", s(&p)]);
    ok(&["compare", s(&g), s(&p), "--window", "0.5,0.7", "--out", s(&r)]);
    let report = read(&r);
    let row: Vec<f64> = report.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[5] / TAU - 60.0).abs() < 0.01, "geo mean {}", row[5] / TAU);
    assert!((row[6] / TAU - 60.0).abs() < 0.01, "pll mean {}", row[6] / TAU);
}

#[test]
fn disjoint_window_is_a_data_error() {
    let d = TempDir::new().unwrap();
    let (w, t, r) = (path(&d, "e2.csv"), path(&d, "tr.csv"), path(&d, "rep.csv"));
    ok(&["generate", "example2", "-o", s(&w)]);
    ok(&["estimate", s(&w), "-o", s(&t)]);
    let out = genfreq(&["compare", s(&t), s(&t), "--window", "5,6", "--out", s(&r)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!r.exists());
}

#[test]
fn malformed_csv_reports_line_and_writes_nothing() {
    let d = TempDir::new().unwrap();
    let (w, t) = (path(&d, "bad.csv"), path(&d, "tr.csv"));
    fs::write(&w, "t,a,b\n0,1,2\n0.001,1,oops\n0.002,1,2\n").unwrap();
    let out = genfreq(&["estimate", s(&w), "-o", s(&t)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert!(!t.exists());
}

#[test]
fn non_uniform_time_base_is_rejected() {
    let d = TempDir::new().unwrap();
    let w = path(&d, "jitter.csv");
    fs::write(&w, "t,a,b\n0,1,0\n0.001,0,1\n0.0025,-1,0\n0.003,0,-1\n").unwrap();
    assert_eq!(genfreq(&["estimate", s(&w)]).status.code(), Some(2));
}

#[test]
fn pll_needs_three_channels() {
    let d = TempDir::new().unwrap();
    let (w, t) = (path(&d, "e1.csv"), path(&d, "tr.csv"));
    ok(&["generate", "example1", "-o", s(&w)]);
    let out = genfreq(&["estimate", s(&w), "-m", "pll", "-o", s(&t)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!t.exists());
}

#[test]
fn usage_errors_exit_with_one() {
    let d = TempDir::new().unwrap();
    let f = path(&d, "x.csv");
    let bad_cfg = path(&d, "bad.conf");
    fs::write(&bad_cfg, "speed = 3\n").unwrap();
    for args in [
        vec!["generate", "nonsense"],
        vec!["generate", "fault", "--sag", "1.5", "-o", s(&f)],
        vec!["generate", "fault", "--tfault", "0.4", "--tclear", "0.3", "-o", s(&f)],
        vec!["generate", "example1", "--fs", "-5", "-o", s(&f)],
        vec!["generate", "example1", "--config", s(&bad_cfg), "-o", s(&f)],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = genfreq(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!f.exists(), "{args:?} left a file behind");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_genfreq"))
        .args(["generate", "example2", "-o", s(&f)])
        .env("GENFREQ_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(genfreq(&["--help"]).status.success());
}

#[test]
fn missing_input_is_a_data_error() {
    assert_eq!(genfreq(&["estimate", "/nonexistent/input.csv"]).status.code(), Some(2));
}
