//! Norm-doubling lifespan probe.
//!
//! `T_double(ε)` is the first sampled time with `‖u[t]‖_{H^s×H^{s-1}} ≥ θ·ε`,
//! where the data are normalized to `‖u[0]‖ = ε` under `normalize = unit-hs`.
//! Runs stop at `cap_factor·ε⁻²` (marker `capped`, a lower bound) and, for
//! localized profiles, at the wrap-around horizon `L/4` (marker `horizon`).
//! CSV schema `kgnf.lifespan`: `eps, direction, T_double, T_eps2, capped, horizon, blow_up`.

use std::time::Instant;

use kgnf_core::evolve::step_rk4;
use kgnf_core::make_grid;
use kgnf_core::spectral::sobolev_norm;
use kgnf_core::KgError;

use crate::profile::initial_state;
use crate::report::{Gate, Point, SweepReport, Table};
use crate::{run_jobs, Config, ExpError, Result};

/// Bound on `max/min` of `T_double·ε²` across the sweep.
pub const SPREAD: f64 = 2.0;

pub fn is_localized(cfg: &Config) -> bool {
    matches!(cfg.profile.as_str(), "bump" | "random-bumps")
}

struct Outcome {
    t: f64,
    capped: bool,
    horizon: bool,
    blowup: bool,
}

fn probe(cfg: &Config, eps: f64) -> Result<Outcome> {
    let model = cfg.model_spec()?;
    let grid = make_grid(cfg.n, cfg.length)?;
    let mut y = initial_state(cfg, &grid, eps)?;
    let cap = cfg.cap_factor / (eps * eps);
    let horizon = 0.25 * cfg.length;
    let limit = if is_localized(cfg) { cap.min(horizon) } else { cap };
    let dt = cfg.dt * cfg.direction as f64;
    let target = cfg.threshold * eps;
    let mut k = 0usize;
    loop {
        if y.time.abs() >= limit - 1e-9 {
            return Ok(Outcome {
                t: y.time.abs(),
                capped: limit == cap,
                horizon: limit < cap,
                blowup: false,
            });
        }
        y = match step_rk4(&y, &model, dt) {
            Ok(z) => z,
            Err(KgError::BlowUp(_)) => {
                return Ok(Outcome {
                    t: y.time.abs(),
                    capped: false,
                    horizon: false,
                    blowup: true,
                })
            }
            Err(e) => return Err(ExpError::Core(e)),
        };
        k += 1;
        if k % cfg.every == 0 && sobolev_norm(&y, cfg.s) >= target {
            return Ok(Outcome {
                t: y.time.abs(),
                capped: false,
                horizon: false,
                blowup: false,
            });
        }
    }
}

pub fn lifespan_probe(cfg: &Config) -> Result<SweepReport> {
    cfg.validate()?;
    let start = Instant::now();
    let runs = run_jobs(&cfg.eps, |&eps| probe(cfg, eps));
    let mut report = SweepReport::new(cfg, "kgnf.lifespan");
    let mut table = Table::new(&[
        "eps",
        "direction",
        "T_double",
        "T_eps2",
        "capped",
        "horizon",
        "blow_up",
    ]);
    for (&eps, run) in cfg.eps.iter().zip(runs) {
        let o = run?;
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        table.push(vec![
            eps,
            cfg.direction as f64,
            o.t,
            o.t * eps * eps,
            flag(o.capped),
            flag(o.horizon),
            flag(o.blowup),
        ]);
        let mut p = Point {
            eps,
            ..Point::default()
        };
        p.metrics.insert("T_double".into(), o.t);
        p.metrics.insert("T_eps2".into(), o.t * eps * eps);
        for (on, name) in [(o.capped, "capped"), (o.horizon, "horizon"), (o.blowup, "blow-up")] {
            if on {
                p.flags.push(name.into());
            }
        }
        report.points.push(p);
    }
    report.table = table;
    let te: Vec<f64> = report.series("T_eps2");
    let lo = te.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = te.iter().copied().fold(0.0, f64::max);
    let spread = hi / lo;
    let capped = report.points.iter().filter(|p| p.has("capped")).count();
    let horizon = report.points.iter().filter(|p| p.has("horizon")).count();
    report
        .fits
        .extend(crate::loglog_fit(&cfg.eps, &report.series("T_double")).map(|f| ("T_double".into(), f)));
    report.gates.push(Gate::new(
        "scaling",
        spread.is_finite() && spread <= SPREAD,
        format!(
            "T_double·ε² in [{lo:.4}, {hi:.4}], spread {spread:.3} (want <= {SPREAD}); {capped} capped, {horizon} at the horizon"
        ),
    ));
    let blown = report.points.iter().any(|p| p.has("blow-up"));
    report
        .gates
        .push(Gate::new("no-blow-up", !blown, "no run stopped on a blow-up signal"));
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
