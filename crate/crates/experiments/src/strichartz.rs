//! Strichartz-norm diagnostics on the long-torus proxy for the line.
//!
//! Linear part: for each ensemble member (`random_bumps` with seed `seed + j`)
//! the flat flow is tracked to the largest horizon and
//! `N(T) = ‖<D>^{-1/4}∂u‖_{L⁴([0,T]; L^∞)}` (trapezoid in time, grid max in
//! space, `∂u = (u_t, u_x)`) is divided by `‖u[0]‖_{H¹×L²}`. The ensemble
//! constant `C(T)` is the largest ratio; its log-log growth exponent over the
//! horizons must stay below [`GROWTH_BOUND`].
//!
//! Nonlinear part: for each ε, `Q³ = (∂_t² − ∂_x² + m)𝐮` with `𝐮` the full
//! normal-form variable and `∂_t²` a five-point difference of the stored
//! samples; `‖Q³‖_{L¹([0,T]; H^{13/4})}` should scale as ε³.
//!
//! All runs must end before `L/4`. CSV schema `kgnf.strichartz`:
//! `kind, index, eps, T, norm, ratio` with kind 0 = ensemble member at a
//! horizon (`index` = member), 1 = ensemble constant, 2 = nonlinear source
//! (`ratio` = `‖Q³‖ / (T^{1/2} N(T)² sup_t‖u‖_{H¹×L²})`).

use std::time::Instant;

use kgnf_core::evolve::step_rk4;
use kgnf_core::model::{gallery, ModelSpec};
use kgnf_core::normalform::NfContext;
use kgnf_core::spectral::sobolev_norm;
use kgnf_core::{make_grid, Field, State, C64};

use crate::fit::loglog_fit;
use crate::profile::{initial_state, random_bumps};
use crate::report::{Gate, Point, SweepReport, Table};
use crate::{run_jobs, Config, ExpError, Result};

/// Bound on the growth exponent of the ensemble constant in `T`.
pub const GROWTH_BOUND: f64 = 0.125;
pub const SOURCE_SLOPE: (f64, f64) = (2.7, 3.3);

fn check_horizon(cfg: &Config, t: f64) -> Result<()> {
    let h = 0.25 * cfg.length;
    if t >= h {
        return Err(ExpError::Run(format!(
            "time {t} reaches the wrap-around horizon L/4 = {h:.3}"
        )));
    }
    Ok(())
}

/// `sup_x max(|<D>^{-1/4}u_t|, |<D>^{-1/4}u_x|)`.
pub fn dispersive_sup(s: &State) -> f64 {
    let w = |xi: f64| C64::new((1.0 + xi * xi).powf(-0.125), 0.0);
    let a = s.vel.map_symbol(w).sup_norm();
    let b = s.pos.dx().map_symbol(w).sup_norm();
    a.max(b)
}

/// `sup_x max_{1≤j≤4} |∂^j u|`, with time derivatives beyond the first
/// traded for space derivatives of `u_t`.
pub fn derivative_sup(s: &State) -> f64 {
    let mut best = 0.0_f64;
    let (mut p, mut v) = (s.pos.dx(), s.vel.clone());
    for _ in 0..4 {
        best = best.max(p.sup_norm()).max(v.sup_norm());
        p = p.dx();
        v = v.dx();
    }
    best
}

/// `(∫_0^T f⁴)^{1/4}` by the trapezoid rule on uniform samples, at each requested `T`.
fn l4_at(times: &[f64], vals: &[f64], horizons: &[f64]) -> Vec<f64> {
    horizons
        .iter()
        .map(|&h| {
            let mut acc = 0.0;
            for j in 1..times.len() {
                if times[j] > h + 1e-9 {
                    break;
                }
                acc += 0.5 * (times[j] - times[j - 1]) * (vals[j].powi(4) + vals[j - 1].powi(4));
            }
            acc.powf(0.25)
        })
        .collect()
}

/// Linear-flow `L⁴L^∞` norms of `<D>^{-1/4}∂u` and of `∂^{≤4}u` at each horizon.
pub fn linear_norms(
    flat: &ModelSpec,
    u0: &State,
    dt: f64,
    horizons: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    let steps = (t_max / dt).round() as usize;
    let mut y = u0.clone();
    let mut times = vec![0.0];
    let mut f = vec![dispersive_sup(&y)];
    let mut g = vec![derivative_sup(&y)];
    for _ in 0..steps {
        y = step_rk4(&y, flat, dt)?;
        times.push(y.time);
        f.push(dispersive_sup(&y));
        g.push(derivative_sup(&y));
    }
    Ok((l4_at(&times, &f, horizons), l4_at(&times, &g, horizons)))
}

struct Source {
    q_norm: f64,
    n4: f64,
    sup_energy: f64,
}

fn nonlinear_source(cfg: &Config, model: &ModelSpec, eps: f64) -> Result<Source> {
    let grid = make_grid(cfg.n, cfg.length)?;
    let ctx = NfContext::new(model, &grid)?;
    let mut y = initial_state(cfg, &grid, eps)?;
    let steps = (cfg.t_final / cfg.dt).round() as usize;
    let mut bold = vec![ctx.nf_full(&y)];
    let mut disp = vec![dispersive_sup(&y)];
    let mut times = vec![0.0];
    let mut sup_energy = sobolev_norm(&y, 1.0);
    for _ in 0..steps {
        y = step_rk4(&y, model, cfg.dt)?;
        bold.push(ctx.nf_full(&y));
        disp.push(dispersive_sup(&y));
        times.push(y.time);
        sup_energy = sup_energy.max(sobolev_norm(&y, 1.0));
    }
    let h2 = cfg.dt * cfg.dt;
    let mut qn = Vec::new();
    let mut qt = Vec::new();
    for j in 2..bold.len().saturating_sub(2) {
        let mut utt = bold[j - 2].scale(-1.0 / 12.0);
        for (w, f) in [
            (16.0, &bold[j - 1]),
            (-30.0, &bold[j]),
            (16.0, &bold[j + 1]),
            (-1.0, &bold[j + 2]),
        ] {
            utt.axpy(w / 12.0, f);
        }
        let mut q: Field = utt.scale(1.0 / h2);
        q.axpy(-1.0, &bold[j].dxx());
        q.axpy(model.m, &bold[j]);
        qn.push(q.jpow(3.25).l2_norm());
        qt.push(times[j]);
    }
    let q_norm: f64 = qt
        .windows(2)
        .zip(qn.windows(2))
        .map(|(t, q)| 0.5 * (t[1] - t[0]) * (q[0] + q[1]))
        .sum();
    let n4 = l4_at(&times, &disp, &[cfg.t_final])[0];
    Ok(Source {
        q_norm,
        n4,
        sup_energy,
    })
}

pub fn strichartz_tracker(cfg: &Config) -> Result<SweepReport> {
    cfg.validate()?;
    let t_max = cfg.horizons.iter().copied().fold(0.0, f64::max);
    check_horizon(cfg, t_max)?;
    check_horizon(cfg, cfg.t_final)?;
    let start = Instant::now();
    let grid = make_grid(cfg.n, cfg.length)?;
    let flat = gallery("flat", cfg.mass)?;
    let model = cfg.model_spec()?;
    let members: Vec<u64> = (0..cfg.ensemble as u64).map(|j| cfg.seed.wrapping_add(j)).collect();
    let lin = run_jobs(&members, |&seed| -> Result<(f64, Vec<f64>, Vec<f64>)> {
        let u0 = random_bumps(&grid, seed);
        let e0 = sobolev_norm(&u0, 1.0);
        let (n, d) = linear_norms(&flat, &u0, cfg.dt, &cfg.horizons)?;
        Ok((e0, n, d))
    });
    let mut report = SweepReport::new(cfg, "kgnf.strichartz");
    let mut table = Table::new(&["kind", "index", "eps", "T", "norm", "ratio"]);
    let mut constant = vec![0.0_f64; cfg.horizons.len()];
    let mut high = vec![0.0_f64; cfg.horizons.len()];
    for (j, run) in lin.into_iter().enumerate() {
        let (e0, n, d) = run?;
        for (i, &t) in cfg.horizons.iter().enumerate() {
            let r = if e0 > 0.0 { n[i] / e0 } else { 0.0 };
            constant[i] = constant[i].max(r);
            high[i] = high[i].max(if e0 > 0.0 { d[i] / e0 } else { 0.0 });
            table.push(vec![0.0, j as f64, 0.0, t, n[i], r]);
        }
    }
    for (i, &t) in cfg.horizons.iter().enumerate() {
        table.push(vec![1.0, 0.0, 0.0, t, high[i], constant[i]]);
    }
    let growth = loglog_fit(&cfg.horizons, &constant);
    if let Some(f) = growth {
        report.fits.insert("ensemble_constant".into(), f);
    }

    let sources = run_jobs(&cfg.eps, |&eps| nonlinear_source(cfg, &model, eps));
    for (&eps, s) in cfg.eps.iter().zip(sources) {
        let s = s?;
        let shape = s.q_norm / (cfg.t_final.sqrt() * s.n4 * s.n4 * s.sup_energy);
        table.push(vec![2.0, 0.0, eps, cfg.t_final, s.q_norm, shape]);
        let mut p = Point {
            eps,
            ..Point::default()
        };
        p.metrics.insert("source_norm".into(), s.q_norm);
        p.metrics.insert("l4_linf".into(), s.n4);
        p.metrics.insert("shape_ratio".into(), shape);
        report.points.push(p);
    }
    report.table = table;
    if let Some(f) = loglog_fit(&cfg.eps, &report.series("source_norm")) {
        report.fits.insert("source_norm".into(), f);
    }

    let detail_c = cfg
        .horizons
        .iter()
        .zip(&constant)
        .map(|(t, c)| format!("C({t}) = {c:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    report.gates.push(match growth {
        Some(f) => Gate::new(
            "linear-bounded",
            f.slope <= GROWTH_BOUND,
            format!(
                "{detail_c}; growth exponent {:.4} (want <= {GROWTH_BOUND})",
                f.slope
            ),
        ),
        None => Gate::new(
            "linear-bounded",
            false,
            format!("{detail_c}; fewer than 3 usable horizons"),
        ),
    });
    report.gates.push(match report.fits.get("source_norm") {
        Some(f) => Gate::new(
            "source-slope",
            f.usable() && (SOURCE_SLOPE.0..=SOURCE_SLOPE.1).contains(&f.slope),
            format!(
                "slope {:.3} (want [2.7, 3.3]), fit residual {:.3e}",
                f.slope, f.residual
            ),
        ),
        None => Gate::new("source-slope", false, "fewer than 3 usable ε points"),
    });
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
