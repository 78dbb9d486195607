//! Initial-data fixtures.
//!
//! Random profiles draw from `ChaCha8Rng::seed_from_u64(seed)` in a fixed
//! order, so a seed reproduces the same data on every platform.

use std::f64::consts::PI;
use std::sync::Arc;

use kgnf_core::spectral::sobolev_norm;
use kgnf_core::{Field, Grid, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{config_err, Config, Result};

/// Profile shape with unit scale, before ε is applied.
pub fn shape(cfg: &Config, grid: &Arc<Grid>) -> Result<State> {
    let l = grid.length();
    let k0 = 2.0 * PI / l;
    let (mode, amp, phase, width) = (cfg.mode as f64, cfg.amp, cfg.phase, cfg.width);
    let pos = match cfg.profile.as_str() {
        "single-mode" => Field::from_fn(grid, |x| (mode * k0 * x).cos()),
        "two-mode" => Field::from_fn(grid, |x| {
            (k0 * x).cos() + amp * (2.0 * k0 * x + phase).cos()
        }),
        "high-pair" => Field::from_fn(grid, |x| {
            (k0 * x).cos()
                + amp * ((mode * k0 * x).cos() + ((mode + 1.0) * k0 * x + 0.5 * PI).cos())
        }),
        "random-phase" => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let kmax = cfg.mode.max(1);
            let terms: Vec<(f64, f64)> = (1..=kmax)
                .map(|k| {
                    let k = k as f64;
                    (1.0 / (1.0 + k * k), rng.gen_range(0.0..2.0 * PI))
                })
                .collect();
            Field::from_fn(grid, |x| {
                terms
                    .iter()
                    .enumerate()
                    .map(|(j, (a, p))| a * ((j + 1) as f64 * k0 * x + p).cos())
                    .sum()
            })
        }
        "bump" => {
            let c = 0.5 * l;
            Field::from_fn(grid, |x| {
                let z = (x - c) / width;
                (-z * z).exp() * (mode * k0 * (x - c) + phase).cos()
            })
        }
        "random-bumps" => return Ok(random_bumps(grid, cfg.seed)),
        other => return Err(config_err("profile", format!("unknown profile `{other}`"))),
    };
    Ok(State::new(pos.dealiased(), Field::zeros(grid), 0.0)?)
}

/// Scaled initial data: `ε·shape`, or `ε·shape/‖shape‖_{H^s×H^{s-1}}` under `unit-hs`.
pub fn initial_state(cfg: &Config, grid: &Arc<Grid>, eps: f64) -> Result<State> {
    let base = shape(cfg, grid)?;
    let scale = if cfg.normalize == "unit-hs" {
        let nrm = sobolev_norm(&base, cfg.s);
        if nrm == 0.0 {
            return Err(config_err("profile", "profile has zero norm"));
        }
        eps / nrm
    } else {
        eps
    };
    Ok(base.scale(scale))
}

/// Three Gaussian wave packets and one velocity packet centred within
/// `L/32` of the middle of the domain, widths in `[1.5, 3]`, carrier
/// frequencies in `[0, 1]` and amplitudes in `[-1, 1]`.
pub fn random_bumps(grid: &Arc<Grid>, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = grid.length();
    let draw = |rng: &mut ChaCha8Rng| {
        let c = 0.5 * l + rng.gen_range(-1.0..1.0) * l / 32.0;
        let w = rng.gen_range(1.5..3.0);
        let k = rng.gen_range(0.0..1.0);
        let a = rng.gen_range(-1.0..1.0);
        let p = rng.gen_range(0.0..2.0 * PI);
        move |x: f64| {
            let z = (x - c) / w;
            a * (-z * z).exp() * (k * (x - c) + p).cos()
        }
    };
    let bumps: Vec<_> = (0..3).map(|_| draw(&mut rng)).collect();
    let vel = draw(&mut rng);
    State::new(
        Field::from_fn(grid, |x| bumps.iter().map(|b| b(x)).sum()).dealiased(),
        Field::from_fn(grid, vel).dealiased(),
        0.0,
    )
    .expect("fields share the grid")
}
