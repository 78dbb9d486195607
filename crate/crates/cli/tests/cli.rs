use std::process::Command;

use clap::Parser;
use kgnf_cli::{error_record, parse_kv, render_config, resolve, Cli};
use kgnf_experiments::{Config, ExpError, Experiment};

fn kgnf(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_kgnf"))
        .args(args)
        .env("KGNF_THREADS", "1")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn args(line: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("kgnf").chain(line.iter().copied())).unwrap()
}

#[test]
fn minimal_file_fills_defaults_and_echoes_every_key() {
    let cli = args(&["drift-sweep"]);
    let cfg = resolve(Experiment::DriftSweep, Some("model = g11u\nn = 256\n"), cli.command.args()).unwrap();
    assert_eq!(cfg, Config::defaults(Experiment::DriftSweep));
    let echo = render_config(&cfg);
    for (k, _) in cfg.entries() {
        assert!(echo.contains(&format!("{k} = ")), "{k}");
    }
    let back = resolve(Experiment::DriftSweep, Some(&echo), cli.command.args()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn flags_override_the_file() {
    let cli = args(&["evolve", "--eps", "0.01", "--T", "3", "--L", "10", "--set", "seed=9", "--skip-conjugation-nf"]);
    let file = "# comment\neps = 0.1, 0.2  # trailing\nT = 7\nseed = 1\n";
    let cfg = resolve(Experiment::Evolve, Some(file), cli.command.args()).unwrap();
    assert_eq!(cfg.eps, vec![0.01]);
    assert_eq!(cfg.t_final, 3.0);
    assert_eq!(cfg.length, 10.0);
    assert_eq!(cfg.seed, 9);
    assert!(cfg.skip_conjugation_nf);
}

#[test]
fn config_errors_name_the_key() {
    let cli = args(&["evolve"]);
    let key = |file: &str| match resolve(Experiment::Evolve, Some(file), cli.command.args()) {
        Err(ExpError::Config { key, msg }) => (key, msg),
        other => panic!("expected a config error, got {other:?}"),
    };
    let (k, m) = key("n = 100\n");
    assert_eq!(k, "n");
    assert!(m.contains("power of two"));
    assert_eq!(key("\nfoo = 1\n").0, "foo");
    assert!(key("\nfoo = 1\n").1.contains("line 2"));
    assert_eq!(key("dt = abc\n").0, "dt");
    assert_eq!(key("experiment = lifespan\n").0, "experiment");
    assert!(parse_kv("no equals sign").is_err());

    let (key, msg) = key("n = 100\n");
    let rec: serde_json::Value = serde_json::from_str(&error_record(&ExpError::Config { key, msg })).unwrap();
    assert_eq!(rec["error"], "config");
    assert_eq!(rec["key"], "n");
}

#[test]
fn nf_check_on_flat_exits_zero() {
    let (code, out) = kgnf(&["nf-check", "--model", "flat", "--samples", "100"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "kgnf.nf-check");
    assert_eq!(v["config"]["model"], "flat");
}

#[test]
fn fault_injected_nf_check_exits_nonzero() {
    let (code, out) = kgnf(&["nf-check", "--model", "generic", "--samples", "100", "--fault", "a0-scale"]);
    assert_ne!(code, 0);
    assert!(out.contains("\"lead-symbol\""));
}

#[test]
fn two_point_drift_sweep_exits_nonzero() {
    let (code, out) = kgnf(&["drift-sweep", "--model", "flat", "--eps", "0.02,0.01", "--n", "32", "--T", "0.2"]);
    assert_ne!(code, 0);
    assert!(out.contains("enough-points"));
}

#[test]
fn bad_config_exits_with_a_json_error_record() {
    let (code, out) = kgnf(&["evolve", "--n", "100"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["key"], "n");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, "model = g11u\nwidgets = 3\n").unwrap();
    let (code, out) = kgnf(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["key"], "widgets");
}

#[test]
fn evolve_outputs_are_byte_identical_and_headed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        let (code, _) = kgnf(&[
            "evolve", "--model", "g11u", "--eps", "0.01", "--n", "64", "--T", "0.2", "--dt", "1e-3",
            "--out", csv.to_str().unwrap(), "--summary", json.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        (std::fs::read(csv).unwrap(), std::fs::read_to_string(json).unwrap())
    };
    let (a, ja) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# schema: kgnf.trajectory/1\n# config_sha256: "));
    let v: serde_json::Value = serde_json::from_str(&ja).unwrap();
    let hash = v["config_hash"].as_str().unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(hash));
}
