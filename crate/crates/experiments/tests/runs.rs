use kgnf_core::model::gallery;
use kgnf_core::{make_grid, State};
use kgnf_experiments::drift::drift_sweep;
use kgnf_experiments::lifespan::lifespan_probe;
use kgnf_experiments::lipschitz::difference_trace;
use kgnf_experiments::nfcheck::nf_verify;
use kgnf_experiments::profile::initial_state;
use kgnf_experiments::strichartz::{dispersive_sup, linear_norms, strichartz_tracker};
use kgnf_experiments::trajectory::run_evolve;
use kgnf_experiments::{Config, ExpError, Experiment};

fn cfg(exp: Experiment, kv: &[(&str, &str)]) -> Config {
    let mut c = Config::defaults(exp);
    for (k, v) in kv {
        c.set(k, v).unwrap();
    }
    c
}

#[test]
fn evolve_csv_is_deterministic_and_headed() {
    let c = cfg(
        Experiment::Evolve,
        &[("model", "generic"), ("n", "64"), ("T", "0.2"), ("dt", "1e-3"), ("eps", "0.05,0.02")],
    );
    let a = run_evolve(&c).unwrap();
    let b = run_evolve(&c).unwrap();
    let (ca, cb) = (a.csv().unwrap(), b.csv().unwrap());
    assert_eq!(ca.as_bytes(), cb.as_bytes());
    let mut lines = ca.lines();
    assert_eq!(lines.next().unwrap(), "# schema: kgnf.trajectory/1");
    assert_eq!(lines.next().unwrap(), format!("# config_sha256: {}", c.hash()));
    let header = lines.next().unwrap();
    assert!(header.starts_with("eps,t,E1,E1para,Es,A0,A2,A3"), "{header}");
    assert!(a.passed());

    let json: serde_json::Value = serde_json::from_str(&a.json().unwrap()).unwrap();
    assert_eq!(json["config_hash"], c.hash());
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["config"]["n"], 64);
    assert_eq!(json["config"]["model"], "generic");
}

#[test]
fn flat_drift_sits_at_the_noise_floor() {
    let c = cfg(Experiment::DriftSweep, &[("model", "flat"), ("n", "64"), ("T", "0.3")]);
    let r = drift_sweep(&c).unwrap();
    let g = r.gate("noise-floor").unwrap();
    assert!(g.passed, "{}", g.detail);
    assert!(r.passed());
    for p in &r.points {
        assert!(p.metric("max_dE1_dt") < 1e-10);
        assert!(p.metric("max_dE1para_dt") < 1e-10);
    }
}

#[test]
fn two_point_drift_sweep_fails_its_gate() {
    let c = cfg(
        Experiment::DriftSweep,
        &[("model", "flat"), ("n", "32"), ("T", "0.2"), ("eps", "0.02,0.01")],
    );
    let r = drift_sweep(&c).unwrap();
    assert!(!r.gate("enough-points").unwrap().passed);
    assert!(!r.passed());
}

#[test]
fn identical_data_give_ratio_one() {
    let c = cfg(Experiment::Lipschitz, &[("n", "64")]);
    let grid = make_grid(64, c.length).unwrap();
    let u = initial_state(&c, &grid, 0.05).unwrap();
    let model = gallery("g11u", 1.0).unwrap();
    let tr = difference_trace(&model, &u, &u, 1.0, 0.02, 5).unwrap();
    assert!(tr.len() > 2);
    assert!(tr.iter().all(|p| p.1 == 1.0));
}

#[test]
fn zero_data_give_zero_strichartz_norms() {
    let grid = make_grid(64, 16.0 * std::f64::consts::PI).unwrap();
    let z = State::zeros(&grid);
    assert_eq!(dispersive_sup(&z), 0.0);
    let flat = gallery("flat", 1.0).unwrap();
    let (n, d) = linear_norms(&flat, &z, 0.05, &[1.0, 2.0]).unwrap();
    assert_eq!(n, vec![0.0, 0.0]);
    assert_eq!(d, vec![0.0, 0.0]);
}

#[test]
fn strichartz_refuses_the_wrap_horizon() {
    let c = cfg(Experiment::Strichartz, &[("L", "32"), ("n", "64"), ("horizons", "4,8,16")]);
    match strichartz_tracker(&c) {
        Err(ExpError::Run(m)) => assert!(m.contains("horizon"), "{m}"),
        other => panic!("expected a horizon error, got {other:?}"),
    }
}

#[test]
fn flat_lifespan_reaches_the_cap() {
    let c = cfg(
        Experiment::Lifespan,
        &[("model", "flat"), ("n", "32"), ("eps", "0.4,0.2,0.1"), ("cap_factor", "0.5"), ("dt", "0.05")],
    );
    let r = lifespan_probe(&c).unwrap();
    for p in &r.points {
        assert!(p.has("capped"), "{p:?}");
        let cap = 0.5 / (p.eps * p.eps);
        assert!((p.metric("T_double") - cap).abs() < 0.05 + 1e-9);
    }
    let csv = r.csv().unwrap();
    assert!(csv.lines().nth(2).unwrap().starts_with("eps,direction,T_double,T_eps2,capped"));
}

#[test]
fn nf_check_passes_on_the_gallery_and_fails_under_the_fault() {
    for m in ["flat", "g11u", "generic"] {
        let c = cfg(Experiment::NfCheck, &[("model", m), ("samples", "200")]);
        let r = nf_verify(&c).unwrap();
        assert!(r.passed(), "{m}: {:?}", r.gates);
    }
    let flat = nf_verify(&cfg(Experiment::NfCheck, &[("model", "flat"), ("samples", "50")])).unwrap();
    assert!(flat.gate("flat-exact").unwrap().passed);

    let c = cfg(Experiment::NfCheck, &[("model", "generic"), ("samples", "200"), ("fault", "a0-scale")]);
    let r = nf_verify(&c).unwrap();
    assert!(!r.passed());
    assert!(!r.gate("lead-symbol").unwrap().passed);
    let others = r.gates.iter().filter(|g| g.name != "lead-symbol");
    assert!(others.clone().all(|g| g.passed), "{:?}", others.collect::<Vec<_>>());
    let csv = r.csv().unwrap();
    assert!(csv.starts_with("# schema: kgnf.nf-check/1\n"));
    assert!(csv.contains("generic,lead-symbol,"));
}
