use std::f64::consts::PI;
use std::sync::Arc;

use kgnf_core::energy::base_energy;
use kgnf_core::evolve::{cfl_bound, evolve, evolve_linearized, step_rk4, EvolveOptions, Stepper};
use kgnf_core::model::{gallery, GALLERY};
use kgnf_core::{make_grid, Field, Grid, KgError, State};

fn grid(n: usize) -> Arc<Grid> {
    make_grid(n, 2.0 * PI).unwrap()
}

fn data(g: &Arc<Grid>, eps: f64) -> State {
    State::new(
        Field::from_fn(g, |x| eps * (x.cos() + 0.5 * (2.0 * x + 0.3).cos())),
        Field::from_fn(g, |x| eps * 0.3 * (3.0 * x).sin()),
        0.0,
    )
    .unwrap()
}

fn dist(a: &State, b: &State) -> f64 {
    (&a.pos - &b.pos).l2_norm() + (&a.vel - &b.vel).l2_norm()
}

fn run(s0: &State, name: &str, t: f64, dt: f64) -> State {
    let model = gallery(name, 1.0).unwrap();
    evolve(s0, &model, t, dt, EvolveOptions::default(), |_| ())
        .unwrap()
        .last
}

#[test]
fn single_mode_matches_the_exact_solution() {
    let g = grid(32);
    let flat = gallery("flat", 1.0).unwrap();
    let s0 = State::new(
        Field::from_fn(&g, |x| (3.0 * x).cos()),
        Field::zeros(&g),
        0.0,
    )
    .unwrap();
    let w = 10f64.sqrt();
    let exact = |t: f64| {
        State::new(
            Field::from_fn(&g, |x| (w * t).cos() * (3.0 * x).cos()),
            Field::from_fn(&g, |x| -w * (w * t).sin() * (3.0 * x).cos()),
            t,
        )
        .unwrap()
    };
    let e1 = dist(&step_rk4(&s0, &flat, 0.02).unwrap(), &exact(0.02));
    let e2 = dist(&step_rk4(&s0, &flat, 0.01).unwrap(), &exact(0.01));
    let order = (e1 / e2).log2();
    assert!((order - 5.0).abs() < 0.3, "local order {order}");
    let end = run(&s0, "flat", 2.0, 1e-3);
    assert!(dist(&end, &exact(2.0)) < 1e-10);
}

#[test]
fn zero_state_stays_zero() {
    let g = grid(32);
    for name in GALLERY {
        let s = step_rk4(&State::zeros(&g), &gallery(name, 1.0).unwrap(), 0.01).unwrap();
        assert_eq!(s.pos.l2_norm() + s.vel.l2_norm(), 0.0);
        assert_eq!(s.time, 0.01);
    }
}

#[test]
fn self_convergence_is_fourth_order() {
    let g = grid(64);
    for name in GALLERY {
        let s0 = data(&g, 0.01);
        let reference = run(&s0, name, 1.0, 0.0025);
        let e1 = dist(&run(&s0, name, 1.0, 0.04), &reference);
        let e2 = dist(&run(&s0, name, 1.0, 0.02), &reference);
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.2, "{name}: order {order}");
    }
}

#[test]
fn flat_energy_drift_over_long_time() {
    let g = grid(32);
    let flat = gallery("flat", 1.0).unwrap();
    let s0 = data(&g, 1.0);
    let tr = evolve(
        &s0,
        &flat,
        10.0,
        1e-3,
        EvolveOptions {
            every: 100,
            strict_cfl: true,
        },
        |s| base_energy(s, 1.0),
    )
    .unwrap();
    let e0 = tr.samples[0].1;
    let drift = tr
        .samples
        .iter()
        .map(|(_, e)| (e - e0).abs())
        .fold(0.0, f64::max)
        / e0;
    assert!(drift < 1e-8, "drift {drift}");
    assert_eq!(tr.samples.len(), 101);
    assert!((tr.last.time - 10.0).abs() < 1e-9);
}

#[test]
fn flat_flow_is_reversible() {
    let g = grid(32);
    let s0 = data(&g, 1.0);
    let fwd = run(&s0, "flat", 3.0, 1e-2);
    let back = evolve(
        &fwd,
        &gallery("flat", 1.0).unwrap(),
        3.0,
        -1e-2,
        EvolveOptions::default(),
        |_| (),
    )
    .unwrap()
    .last;
    assert!(dist(&back, &s0) < 1e-6);
    assert!(back.time.abs() < 1e-9);
}

#[test]
fn large_data_blow_up_is_reported() {
    let g = grid(32);
    let s0 = State::new(Field::from_fn(&g, |x| 1.0 + x.cos()), Field::zeros(&g), 0.0).unwrap();
    let tr = evolve(
        &s0,
        &gallery("fu2", 1.0).unwrap(),
        20.0,
        1e-3,
        EvolveOptions::default(),
        |s| s.time,
    )
    .unwrap();
    assert!(tr.blew_up());
    let t = tr.blowup.unwrap();
    assert!(t > 0.0 && t < 20.0);
    assert!(tr.last.is_finite());
}

#[test]
fn strict_cfl_rejects_large_steps() {
    let g = grid(64);
    let flat = gallery("flat", 1.0).unwrap();
    let s0 = data(&g, 0.1);
    let bound = cfl_bound(&s0, &flat).unwrap();
    assert!((bound - 0.5 * 2.0 * PI / 64.0).abs() < 1e-14);
    let strict = EvolveOptions {
        every: 1,
        strict_cfl: true,
    };
    let r = evolve(&s0, &flat, 1.0, 2.0 * bound, strict, |_| ());
    assert!(matches!(r, Err(KgError::Cfl { .. })));
    assert!(evolve(
        &s0,
        &flat,
        2.0 * bound,
        2.0 * bound,
        EvolveOptions::default(),
        |_| ()
    )
    .is_ok());
    assert!(evolve(&s0, &flat, -1.0, 1e-3, EvolveOptions::default(), |_| ()).is_err());
    assert!(evolve(&s0, &flat, 1.0, 0.0, EvolveOptions::default(), |_| ()).is_err());
}

#[test]
fn stepper_yields_successive_states() {
    let g = grid(32);
    let model = gallery("g11u", 1.0).unwrap();
    let s0 = data(&g, 0.05);
    let states: Vec<State> = Stepper::new(s0.clone(), &model, 0.01)
        .take(5)
        .map(|r| r.unwrap())
        .collect();
    let direct = run(&s0, "g11u", 0.05, 0.01);
    assert!(dist(&states[4], &direct) == 0.0);
    for (k, s) in states.iter().enumerate() {
        assert!((s.time - 0.01 * (k + 1) as f64).abs() < 1e-15);
    }

    let big = State::new(Field::from_fn(&g, |x| 1.0 + x.cos()), Field::zeros(&g), 0.0).unwrap();
    let fu2 = gallery("fu2", 1.0).unwrap();
    let out: Vec<_> = Stepper::new(big, &fu2, 1e-2).take(100_000).collect();
    assert!(out.last().unwrap().is_err());
    assert!(out[..out.len() - 1].iter().all(|r| r.is_ok()));
}

#[test]
fn trajectories_stay_real() {
    let g = grid(64);
    let model = gallery("generic", 1.0).unwrap();
    let tr = evolve(
        &data(&g, 0.05),
        &model,
        1.0,
        1e-2,
        EvolveOptions::default(),
        |s| s.pos.reality_defect().max(s.vel.reality_defect()),
    )
    .unwrap();
    let worst = tr.samples.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    assert!(worst < 1e-11, "{worst}");
}

fn background(name: &str, eps: f64, t: f64, dt: f64, every: usize) -> Vec<State> {
    let g = grid(64);
    let model = gallery(name, 1.0).unwrap();
    let opts = EvolveOptions {
        every,
        strict_cfl: false,
    };
    evolve(&data(&g, eps), &model, t, dt, opts, |s| s.clone())
        .unwrap()
        .samples
        .into_iter()
        .map(|(_, s)| s)
        .collect()
}

fn perturbation(g: &Arc<Grid>) -> State {
    State::new(
        Field::from_fn(g, |x| (2.0 * x).sin() + 0.3 * (5.0 * x).cos()),
        Field::from_fn(g, |x| 0.5 * x.cos()),
        0.0,
    )
    .unwrap()
}

#[test]
fn linearized_flow_on_zero_background_is_klein_gordon() {
    let bg = background("generic", 0.0, 1.0, 1e-2, 10);
    let model = gallery("generic", 1.0).unwrap();
    let v0 = perturbation(bg[0].grid());
    let lin = evolve_linearized(&bg, &model, &v0, 1e-2).unwrap();
    let free = run(&v0, "flat", 1.0, 1e-2);
    assert!(dist(&lin.last, &free) < 1e-12);
    let z = evolve_linearized(&bg, &model, &State::zeros(bg[0].grid()), 1e-2).unwrap();
    assert_eq!(z.last.pos.l2_norm() + z.last.vel.l2_norm(), 0.0);
    assert!(evolve_linearized(&bg, &model, &v0, 3e-3).is_err());
    assert!(evolve_linearized(&bg[..1], &model, &v0, 1e-2).is_err());
}

#[test]
fn linearized_flow_superposes() {
    let bg = background("generic", 0.05, 1.0, 1e-2, 5);
    let model = gallery("generic", 1.0).unwrap();
    let g = bg[0].grid().clone();
    let a = perturbation(&g);
    let b = data(&g, 1.0);
    let ab = State::new(
        &a.pos + &b.pos.scale(-2.0),
        &a.vel + &b.vel.scale(-2.0),
        0.0,
    )
    .unwrap();
    let la = evolve_linearized(&bg, &model, &a, 1e-2).unwrap().last;
    let lb = evolve_linearized(&bg, &model, &b, 1e-2).unwrap().last;
    let lab = evolve_linearized(&bg, &model, &ab, 1e-2).unwrap().last;
    let comb = State::new(
        &la.pos + &lb.pos.scale(-2.0),
        &la.vel + &lb.vel.scale(-2.0),
        0.0,
    )
    .unwrap();
    assert!(dist(&lab, &comb) < 1e-12 * (1.0 + la.pos.l2_norm()));
}

#[test]
fn linearized_flow_matches_directional_derivative() {
    let name = "generic";
    let model = gallery(name, 1.0).unwrap();
    let (eps, h, dt) = (0.05, 1e-4, 2e-3);
    let g = grid(64);
    let u0 = data(&g, eps);
    let v0 = perturbation(&g);
    let bg: Vec<State> = evolve(&u0, &model, 1.0, dt, EvolveOptions::default(), |s| {
        s.clone()
    })
    .unwrap()
    .samples
    .into_iter()
    .map(|(_, s)| s)
    .collect();
    let lin = evolve_linearized(&bg, &model, &v0, dt).unwrap().last;
    let shifted = State::new(&u0.pos + &v0.pos.scale(h), &u0.vel + &v0.vel.scale(h), 0.0).unwrap();
    let up = run(&shifted, name, 1.0, dt);
    let fd = State::new(
        (&up.pos - &bg.last().unwrap().pos).scale(1.0 / h),
        (&up.vel - &bg.last().unwrap().vel).scale(1.0 / h),
        1.0,
    )
    .unwrap();
    let rel = dist(&fd, &lin) / (lin.pos.l2_norm() + lin.vel.l2_norm());
    assert!(rel < 10.0 * h, "relative gap {rel}");
}
