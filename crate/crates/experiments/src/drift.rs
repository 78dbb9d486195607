//! Cubic-estimate drift sweep.
//!
//! For each ε the energies are sampled every `every` steps up to
//! `t_final + 2h` and `max |dE/dt|` is taken over `t ∈ [0.1, t_final]`.
//! The empirical constant is `max_t |dE^{1,para}/dt| / (A0·A3·E^{1,para})`.
//! CSV schema `kgnf.drift-sweep`: the trajectory columns for every ε.

use std::time::Instant;

use crate::fit::{loglog_fit, Fit, MIN_FIT_POINTS};
use crate::report::{max_fd_rate, rates, Gate, Point, SweepReport, Table};
use crate::trajectory::{append_series, energy_series, series_columns, EnergySeries};
use crate::{run_jobs, Config, Result};

/// Start of the measurement window.
pub const T_SKIP: f64 = 0.1;
/// Drift below this is integrator noise.
pub const NOISE_FLOOR: f64 = 1e-10;
pub const E1_SLOPE: (f64, f64) = (2.7, 3.3);
pub const E1PARA_MIN_SLOPE: f64 = 3.6;
/// Bound on `max/min` of the empirical constant across the sweep.
pub const CONSTANT_SPREAD: f64 = 2.0;
/// Required slope loss of `Es` when the conjugation layer is skipped.
pub const ABLATION_LOSS: f64 = 0.3;

fn point(s: &EnergySeries, t_final: f64, both: bool) -> Point {
    let times = s.times();
    let m = |f: &dyn Fn(&crate::trajectory::EnergySample) -> f64| {
        max_fd_rate(&times, &s.values(f), s.h, T_SKIP, t_final)
    };
    let mut p = Point {
        eps: s.eps,
        ..Point::default()
    };
    p.metrics.insert("max_dE1_dt".into(), m(&|x| x.e1));
    p.metrics.insert("max_dE1para_dt".into(), m(&|x| x.e1para));
    p.metrics.insert("max_dEs_dt".into(), m(&|x| x.es));
    if both {
        p.metrics.insert("max_dEs_skip_dt".into(), m(&|x| x.es_skip));
    }
    let dp = rates(&s.values(|x| x.e1para), s.h);
    let constant = s
        .samples
        .iter()
        .zip(&dp)
        .filter(|(x, r)| r.is_finite() && x.t >= T_SKIP - 1e-9 && x.t <= t_final + 1e-9)
        .map(|(x, r)| r.abs() / (x.a0 * x.a3 * x.e1para))
        .fold(0.0, f64::max);
    p.metrics.insert("empirical_constant".into(), constant);
    if let Some(x) = s.samples.first() {
        p.metrics.insert("E1para_initial".into(), x.e1para);
        p.metrics.insert("A0_initial".into(), x.a0);
        p.metrics.insert("A3_initial".into(), x.a3);
    }
    p
}

pub fn drift_sweep(cfg: &Config) -> Result<SweepReport> {
    cfg.validate()?;
    let start = Instant::now();
    let model = cfg.model_spec()?;
    let both = cfg.skip_conjugation_nf;
    let t_end = cfg.t_final + 2.0 * cfg.dt * cfg.every as f64;
    let runs = run_jobs(&cfg.eps, |&eps| energy_series(cfg, &model, eps, t_end, both));
    let mut report = SweepReport::new(cfg, "kgnf.drift-sweep");
    let mut table = Table::new(&series_columns(both));
    let mut invalid = Vec::new();
    for run in runs {
        let s = run?;
        append_series(&mut table, &s, both);
        let mut p = point(&s, cfg.t_final, both);
        if let Some(t) = s.blowup {
            p.flags.push("blow-up".into());
            p.metrics.insert("blowup_time".into(), t);
            invalid.push(s.eps);
        }
        report.points.push(p);
    }
    report.table = table;

    let eps = &cfg.eps;
    let mut keys = vec!["max_dE1_dt", "max_dE1para_dt", "max_dEs_dt", "empirical_constant"];
    if both {
        keys.push("max_dEs_skip_dt");
    }
    for k in keys {
        if let Some(f) = loglog_fit(eps, &report.series(k)) {
            report.fits.insert(k.to_string(), f);
        }
    }

    let mut gates = Vec::new();
    let g = &mut gates;
    g.push(Gate::new(
        "enough-points",
        eps.len() >= MIN_FIT_POINTS,
        format!("{} ε points; slope gates need at least {MIN_FIT_POINTS}", eps.len()),
    ));
    g.push(Gate::new(
        "no-blow-up",
        invalid.is_empty(),
        format!("invalid ε points: {invalid:?}"),
    ));
    let worst = |k: &str| report.points.iter().map(|p| p.metric(k)).fold(0.0, f64::max);
    let (w1, wp) = (worst("max_dE1_dt"), worst("max_dE1para_dt"));
    if model.is_flat() {
        g.push(Gate::new(
            "noise-floor",
            w1 < NOISE_FLOOR && wp < NOISE_FLOOR,
            format!("max |dE1/dt| = {w1:.3e}, max |dE1para/dt| = {wp:.3e}"),
        ));
    } else {
        let slope_gate = |name: &str, f: Option<&Fit>, ok: &dyn Fn(f64) -> bool, want: &str| {
            match f {
                Some(f) => Gate::new(
                    name,
                    f.usable() && ok(f.slope),
                    format!(
                        "slope {:.3} (want {want}), fit residual {:.3e}",
                        f.slope, f.residual
                    ),
                ),
                None => Gate::new(name, false, "no fit (fewer than 3 usable points)"),
            }
        };
        if w1 < NOISE_FLOOR {
            // The cubic flux of E1 vanishes identically for this model.
            g.push(Gate::new(
                "slope-E1",
                true,
                format!("E1 conserved to the noise floor (max {w1:.3e}); slope not applicable"),
            ));
        } else {
            g.push(slope_gate(
                "slope-E1",
                report.fits.get("max_dE1_dt"),
                &|s| (E1_SLOPE.0..=E1_SLOPE.1).contains(&s),
                "[2.7, 3.3]",
            ));
        }
        g.push(slope_gate(
            "slope-E1para",
            report.fits.get("max_dE1para_dt"),
            &|s| s >= E1PARA_MIN_SLOPE,
            ">= 3.6",
        ));
        let c = report.series("empirical_constant");
        let (lo, hi) = c
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(a, b), &x| (a.min(x), b.max(x)));
        g.push(Gate::new(
            "bounded-constant",
            hi.is_finite() && lo > 0.0 && hi / lo <= CONSTANT_SPREAD,
            format!("empirical constant in [{lo:.4e}, {hi:.4e}], spread {:.3}", hi / lo),
        ));
        if both {
            let (fs, fk) = (report.fits.get("max_dEs_dt"), report.fits.get("max_dEs_skip_dt"));
            let gate = match (fs, fk) {
                (Some(a), Some(b)) => Gate::new(
                    "ablation",
                    a.usable() && b.usable() && a.slope - b.slope >= ABLATION_LOSS,
                    format!(
                        "slope(Es) {:.3} vs skipped {:.3}: loss {:.3} (want >= {ABLATION_LOSS})",
                        a.slope,
                        b.slope,
                        a.slope - b.slope
                    ),
                ),
                _ => Gate::new("ablation", false, "no fit"),
            };
            g.push(gate);
        }
    }
    report.gates = gates;
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
