use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use arw_lab::stats::{ks_two_sample, EmpiricalSample};

fn arw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arw"))
        .args(args)
        .output()
        .expect("failed to launch arw")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn out_arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn flow_replay_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = arw(&[
            "simulate-flow", "--zeta", "0.5", "--steps", "20000", "--seed", "7",
            "--replicas", "3", "--out", &out_arg(d),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for r in 0..3 {
        for name in [format!("flow-{r:04}.csv"), format!("flow-{r:04}.meta.json")] {
            assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
        }
    }
    assert_ne!(
        fs::read(a.join("flow-0000.csv")).unwrap(),
        fs::read(a.join("flow-0001.csv")).unwrap()
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 6);
    let rho = manifest["derived"]["rho"].as_f64().unwrap();
    assert!((rho - 1.0).abs() < 1e-12, "Bernoulli(1/2) has rho = 1, got {rho}");
}

#[test]
fn replicas_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    for (d, t) in [(&one, "1"), (&many, "3")] {
        let o = arw(&[
            "simulate-flow", "--lambda", "2", "--eta", "poisson", "--steps", "5000",
            "--replicas", "4", "--threads", t, "--out", &out_arg(d),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for r in 0..4 {
        let name = format!("flow-{r:04}.csv");
        assert_eq!(fs::read(one.join(&name)).unwrap(), fs::read(many.join(&name)).unwrap());
    }
}

#[test]
fn dense_output_has_every_step() {
    let dir = tempfile::tempdir().unwrap();
    let o = arw(&[
        "simulate-flow", "--zeta", "0.5", "--steps", "100", "--dense", "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("flow-0000.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 101);
    let values: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn inconsistent_zeta_and_lambda_exit_2() {
    let o = arw(&["simulate-flow", "--zeta", "0.9", "--lambda", "1", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not critical"), "{}", stderr(&o));
}

#[test]
fn missing_density_exits_2() {
    let o = arw(&["simulate-flow", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_eta_exits_2() {
    let o = arw(&["simulate-flow", "--zeta", "0.5", "--eta", "twopoint:x", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn path_mode_rejects_rho_zero() {
    let o = arw(&["sample-limit", "--mode", "path", "--rho", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("runmax"), "{}", stderr(&o));
}

#[test]
fn runmax_output_is_nondecreasing() {
    let dir = tempfile::tempdir().unwrap();
    let o = arw(&[
        "sample-limit", "--mode", "runmax", "--xmax", "1", "--dx", "1e-4", "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("runmax-0000.csv")).unwrap();
    let v: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(v.len(), 10_001);
    assert_eq!(v[0], 0.0);
    assert!(v.windows(2).all(|w| w[0] <= w[1]));
}

fn read_path_values(dir: &Path, replicas: usize) -> Vec<f64> {
    (0..replicas)
        .map(|r| {
            let text = fs::read_to_string(dir.join(format!("limit-{r:04}.csv"))).unwrap();
            let last = text.lines().last().unwrap();
            last.split(',').nth(1).unwrap().parse().unwrap()
        })
        .collect()
}

#[test]
fn path_and_fidi_outputs_agree_at_xmax() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("path");
    let f = dir.path().join("fidi");
    let n = 400;
    let ns = n.to_string();
    let o = arw(&[
        "sample-limit", "--mode", "path", "--rho", "0.5", "--xmax", "1", "--dx", "1e-3",
        "--replicas", &ns, "--seed", "11", "--out", &out_arg(&p),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(p.join("limit-0000-hitting.csv").exists());
    let o = arw(&[
        "sample-limit", "--mode", "fidi", "--rho", "0.5", "--xs", "1", "--dx", "1e-3",
        "--replicas", &ns, "--seed", "12", "--out", &out_arg(&f),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let path_vals = read_path_values(&p, n);
    let fidi_vals: Vec<f64> = fs::read_to_string(f.join("fidi.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(fidi_vals.len(), n);
    let ks = ks_two_sample(
        &EmpiricalSample::new(path_vals).unwrap(),
        &EmpiricalSample::new(fidi_vals).unwrap(),
    );
    assert!(ks.statistic < 0.1, "D = {}", ks.statistic);
}

#[test]
fn exhausted_level_budget_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let o = arw(&[
        "sample-limit", "--mode", "path", "--rho", "0.5", "--dx", "1e-3", "--max-levels", "12",
        "--tol", "1e-6", "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert!(!manifest["warnings"].as_array().unwrap().is_empty());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("limit-0000.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["under_resolved"], true);
}

#[test]
fn json_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = arw(&[
        "sample-limit", "--mode", "fidi", "--rho", "1", "--xs", "0.5,1", "--dx", "1e-3",
        "--replicas", "5", "--format", "json", "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fidi.json")).unwrap()).unwrap();
    let rows = v["values"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let a = row[0].as_f64().unwrap();
        let b = row[1].as_f64().unwrap();
        assert!(0.0 <= a && a <= b);
    }
}

#[test]
fn verify_abelian_passes() {
    let o = arw(&["verify", "abelian"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["check"], "abelian");
    assert_eq!(report["pass"], true);
    let line = &report["results"][0];
    for key in ["test", "D", "n", "p", "pass"] {
        assert!(line.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn verify_unknown_check_exits_2() {
    let o = arw(&["verify", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("marginal-ks"));
}

fn flow_for_plot(dir: &Path) -> std::path::PathBuf {
    let o = arw(&[
        "simulate-flow", "--zeta", "0.808", "--eta", "twopoint:20", "--steps", "20000",
        "--seed", "5", "--out", &out_arg(dir),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    dir.join("flow-0000.csv")
}

#[test]
fn plot_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = flow_for_plot(dir.path());
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for out in [&a, &b] {
        let o = arw(&["plot", "--input", &out_arg(&input), "--output", &out_arg(out), "--title", "C_k"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 1);
}

#[test]
fn plot_grid_has_one_panel_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = out_arg(&flow_for_plot(dir.path()));
    let out = dir.path().join("grid.svg");
    let mut args = vec!["plot"];
    for _ in 0..6 {
        args.extend(["--input", input.as_str()]);
    }
    let out_s = out_arg(&out);
    args.extend(["--output", out_s.as_str()]);
    let o = arw(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.matches("<polyline").count(), 6);
    assert!(text.contains(r#"width="1440""#));
}

#[test]
fn empty_jump_list_plots_flat_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    fs::write(&input, "k,C\n").unwrap();
    fs::write(dir.path().join("empty.meta.json"), r#"{"n": 50}"#).unwrap();
    let out = dir.path().join("empty.svg");
    let o = arw(&["plot", "--input", &out_arg(&input), "--output", &out_arg(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let poly = text.lines().find(|l| l.starts_with("<polyline")).unwrap();
    let points = poly.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
    let ys: Vec<&str> = points.split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
    assert_eq!(ys.len(), 2);
    assert_eq!(ys[0], ys[1]);
}

#[test]
fn malformed_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "k,C\n1,x\n").unwrap();
    let o = arw(&["plot", "--input", &out_arg(&input), "--output", &out_arg(&dir.path().join("o.svg"))]);
    assert_eq!(o.status.code(), Some(3));
    let missing = dir.path().join("missing.csv");
    let o = arw(&["plot", "--input", &out_arg(&missing), "--output", &out_arg(&dir.path().join("o.svg"))]);
    assert_eq!(o.status.code(), Some(3));
}
