//! Lipschitz difference bound.
//!
//! Pairs `u¹[0] = ε·profile` and `u²[0] = u¹[0] + δ·v` with a fixed unit
//! direction `v` in `H¹×L²`, evolved to `time_factor·ε⁻²`. The ratio is
//! `sup_t ‖u¹−u²‖_{H¹×L²} / ‖u¹[0]−u²[0]‖_{H¹×L²}`; the run is repeated at
//! `δ/2` and the two ratio traces must agree pointwise. CSV schema `kgnf.lipschitz`: `eps, delta, t, ratio`.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use kgnf_core::evolve::step_rk4;
use kgnf_core::model::ModelSpec;
use kgnf_core::spectral::sobolev_norm;
use kgnf_core::{make_grid, Field, Grid, State};

use crate::profile::initial_state;
use crate::report::{Gate, Point, SweepReport, Table};
use crate::{run_jobs, Config, Result};

pub const RATIO_BOUND: f64 = 3.0;
/// Allowed relative change of the ratio under δ-halving.
pub const DELTA_INVARIANCE: f64 = 0.05;

/// The perturbation direction, normalized in `H¹×L²`.
pub fn direction(grid: &Arc<Grid>) -> State {
    let k0 = 2.0 * PI / grid.length();
    let v = State::new(
        Field::from_fn(grid, |x| (3.0 * k0 * x).sin() + 0.5 * (5.0 * k0 * x + 0.7).cos()),
        Field::from_fn(grid, |x| 0.3 * (2.0 * k0 * x).cos()),
        0.0,
    )
    .expect("same grid");
    let nrm = sobolev_norm(&v, 1.0);
    v.scale(1.0 / nrm)
}

/// Ratio trace `(t, ‖diff[t]‖/‖diff[0]‖)` sampled every `every` steps. A zero
/// initial difference is reported as ratio 1 while the difference stays zero.
pub fn difference_trace(
    model: &ModelSpec,
    a: &State,
    b: &State,
    t_final: f64,
    dt: f64,
    every: usize,
) -> Result<Vec<(f64, f64)>> {
    let d0 = sobolev_norm(&a.diff(b), 1.0);
    let ratio = |x: &State, y: &State| {
        let d = sobolev_norm(&x.diff(y), 1.0);
        if d0 == 0.0 {
            if d == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            d / d0
        }
    };
    let steps = (t_final / dt).round() as usize;
    let (mut x, mut y) = (a.clone(), b.clone());
    let mut out = vec![(0.0, ratio(&x, &y))];
    for k in 1..=steps {
        x = step_rk4(&x, model, dt)?;
        y = step_rk4(&y, model, dt)?;
        if k % every == 0 || k == steps {
            out.push((x.time, ratio(&x, &y)));
        }
    }
    Ok(out)
}

fn sup(trace: &[(f64, f64)]) -> f64 {
    trace.iter().map(|p| p.1).fold(0.0, f64::max)
}

pub fn lipschitz_test(cfg: &Config) -> Result<SweepReport> {
    cfg.validate()?;
    let start = Instant::now();
    let model = cfg.model_spec()?;
    let grid = make_grid(cfg.n, cfg.length)?;
    let v = direction(&grid);
    let jobs: Vec<(f64, f64)> = cfg
        .eps
        .iter()
        .flat_map(|&e| [(e, cfg.delta), (e, 0.5 * cfg.delta)])
        .collect();
    let runs = run_jobs(&jobs, |&(eps, delta)| -> Result<Vec<(f64, f64)>> {
        let u1 = initial_state(cfg, &grid, eps)?;
        let u2 = State::new(
            &u1.pos + &v.pos.scale(delta),
            &u1.vel + &v.vel.scale(delta),
            0.0,
        )?;
        difference_trace(&model, &u1, &u2, cfg.time_factor / (eps * eps), cfg.dt, cfg.every)
    });
    let mut report = SweepReport::new(cfg, "kgnf.lipschitz");
    let mut table = Table::new(&["eps", "delta", "t", "ratio"]);
    let mut traces = Vec::new();
    for (&(eps, delta), run) in jobs.iter().zip(runs) {
        let tr = match run {
            Ok(tr) => tr,
            Err(crate::ExpError::Core(kgnf_core::KgError::BlowUp(t))) => {
                let mut p = Point {
                    eps,
                    ..Point::default()
                };
                p.flags.push("blow-up".into());
                p.metrics.insert("blowup_time".into(), t);
                report.points.push(p);
                traces.push(None);
                continue;
            }
            Err(e) => return Err(e),
        };
        for &(t, r) in &tr {
            table.push(vec![eps, delta, t, r]);
        }
        traces.push(Some(tr));
    }
    report.table = table;
    let mut ok_bound = true;
    let mut ok_inv = true;
    let mut details = Vec::new();
    for (i, &eps) in cfg.eps.iter().enumerate() {
        let (Some(full), Some(half)) = (&traces[2 * i], &traces[2 * i + 1]) else {
            ok_bound = false;
            ok_inv = false;
            continue;
        };
        let (r, rh) = (sup(full), sup(half));
        // Pointwise along the trace, since the sup is often the initial value.
        let inv = full
            .iter()
            .zip(half)
            .map(|(a, b)| (a.1 / b.1 - 1.0).abs())
            .fold(0.0, f64::max);
        ok_bound &= r <= RATIO_BOUND;
        ok_inv &= inv <= DELTA_INVARIANCE;
        details.push(format!("ε={eps}: ratio {r:.4}, δ/2 ratio {rh:.4}, change {inv:.2e}"));
        let mut p = Point {
            eps,
            ..Point::default()
        };
        p.metrics.insert("ratio".into(), r);
        p.metrics.insert("ratio_half_delta".into(), rh);
        p.metrics.insert("delta_change".into(), inv);
        p.metrics.insert("T".into(), cfg.time_factor / (eps * eps));
        report.points.push(p);
    }
    let detail = details.join("; ");
    report.gates.push(Gate::new(
        "ratio-bound",
        ok_bound,
        format!("{detail} (want ratio <= {RATIO_BOUND})"),
    ));
    report.gates.push(Gate::new(
        "delta-invariance",
        ok_inv,
        format!("{detail} (want change <= {DELTA_INVARIANCE})"),
    ));
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
