use kgnf_experiments::config::{FAULTS, PROFILES};
use kgnf_experiments::profile::{initial_state, random_bumps, shape};
use kgnf_experiments::{loglog_fit, Config, ExpError, Experiment};
use kgnf_core::make_grid;
use kgnf_core::spectral::sobolev_norm;

fn key_of(e: ExpError) -> String {
    match e {
        ExpError::Config { key, .. } => key,
        e => panic!("expected a config error, got {e}"),
    }
}

#[test]
fn defaults_validate_for_every_experiment() {
    for exp in Experiment::ALL {
        let c = Config::defaults(exp);
        c.validate().unwrap();
        assert_eq!(Experiment::parse(exp.name()), Some(exp));
    }
}

#[test]
fn entries_echo_every_key_and_round_trip() {
    let mut c = Config::defaults(Experiment::DriftSweep);
    c.set("model", "g11u").unwrap();
    c.set("n", "256").unwrap();
    let entries = c.entries();
    let keys: Vec<&str> = entries.iter().map(|(k, _)| k.as_str()).collect();
    for k in ["model", "n", "length", "dt", "t_final", "eps", "s", "profile", "seed", "dealias", "skip_conjugation_nf"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    let json = serde_json::to_value(&c).unwrap();
    let fields = json.as_object().unwrap().len();
    // `coefficients` is echoed as `coef.*` entries.
    assert_eq!(entries.len(), fields - 1);

    let mut d = Config::defaults(Experiment::Evolve);
    for (k, v) in &entries {
        d.set(k, v).unwrap();
    }
    assert_eq!(d, c);
    assert_eq!(d.hash(), c.hash());
}

#[test]
fn n_must_be_a_power_of_two() {
    let mut c = Config::defaults(Experiment::Evolve);
    c.set("n", "100").unwrap();
    let e = c.validate().unwrap_err();
    assert!(e.to_string().contains("power of two"), "{e}");
    assert_eq!(key_of(e), "n");
}

#[test]
fn errors_name_the_offending_key() {
    let mut c = Config::defaults(Experiment::Evolve);
    assert_eq!(key_of(c.set("bogus", "1").unwrap_err()), "bogus");
    assert_eq!(key_of(c.set("dt", "fast").unwrap_err()), "dt");
    assert_eq!(key_of(c.set("eps", "0.1,x").unwrap_err()), "eps");
    assert_eq!(key_of(c.set("dealias", "maybe").unwrap_err()), "dealias");
    assert_eq!(key_of(c.set("coef.g22.1.0.0", "1").unwrap_err()), "coef.g22.1.0.0");

    for (k, v) in [("dt", "-1e-3"), ("model", "nope"), ("profile", "square"), ("fault", "x"), ("mass", "0")] {
        let mut c = Config::defaults(Experiment::Evolve);
        c.set(k, v).unwrap();
        assert_eq!(key_of(c.validate().unwrap_err()), k);
    }
}

#[test]
fn hash_tracks_content() {
    let a = Config::defaults(Experiment::DriftSweep);
    let mut b = a.clone();
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
    b.set("eps", "0.01").unwrap();
    assert_ne!(a.hash(), b.hash());
    b.set("eps", "0.02,0.01,0.005").unwrap();
    assert_eq!(a.hash(), b.hash());
}

#[test]
fn custom_coefficients_build_a_model() {
    let mut c = Config::defaults(Experiment::Evolve);
    c.set("model", "custom").unwrap();
    c.set("coef.g11.1.0.0", "1").unwrap();
    c.validate().unwrap();
    let m = c.model_spec().unwrap();
    assert!(!m.is_flat());
    let mut flat = Config::defaults(Experiment::Evolve);
    flat.set("model", "custom").unwrap();
    assert!(flat.model_spec().unwrap().is_flat());
}

#[test]
fn profiles_are_deterministic_and_normalized() {
    let grid = make_grid(128, 2.0 * std::f64::consts::PI).unwrap();
    for p in PROFILES {
        let mut c = Config::defaults(Experiment::Evolve);
        c.set("profile", p).unwrap();
        c.set("n", "128").unwrap();
        c.set("seed", "7").unwrap();
        let a = shape(&c, &grid).unwrap();
        let b = shape(&c, &grid).unwrap();
        assert_eq!(a.pos.coeffs(), b.pos.coeffs(), "{p}");
        assert_eq!(a.vel.coeffs(), b.vel.coeffs(), "{p}");
        c.set("normalize", "unit-hs").unwrap();
        c.set("s", "2").unwrap();
        let y = initial_state(&c, &grid, 0.03).unwrap();
        assert!((sobolev_norm(&y, 2.0) - 0.03).abs() < 1e-14, "{p}");
    }
    let a = random_bumps(&grid, 1);
    let b = random_bumps(&grid, 1);
    let d = random_bumps(&grid, 2);
    assert_eq!(a.pos.coeffs(), b.pos.coeffs());
    assert_ne!(a.pos.coeffs(), d.pos.coeffs());
    assert!(FAULTS.contains(&"none"));
}

#[test]
fn fits_need_three_points_and_recover_power_laws() {
    assert!(loglog_fit(&[1.0, 2.0], &[1.0, 8.0]).is_none());
    let xs = [0.02, 0.01, 0.005];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 7.0 * x.powi(3)).collect();
    let f = loglog_fit(&xs, &ys).unwrap();
    assert!((f.slope - 3.0).abs() < 1e-12);
    assert!((f.intercept - 7f64.ln()).abs() < 1e-10);
    assert!(f.residual < 1e-12 && f.usable());
    let noisy = [1.0, 3.0, 1.0, 3.0];
    let f = loglog_fit(&[1.0, 2.0, 4.0, 8.0], &noisy).unwrap();
    assert!(!f.usable());
    assert!(loglog_fit(&xs, &[1.0, 0.0, 1.0]).is_none());
}
