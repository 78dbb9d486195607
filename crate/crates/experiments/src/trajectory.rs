//! Energy time series along one trajectory, and the `evolve` run.
//!
//! CSV schema `kgnf.trajectory`: `eps, t, E1, E1para, Es, A0, A2, A3, Hs_norm,
//! dE1_dt, dE1para_dt, dEs_dt`, plus `Es_skip, dEs_skip_dt` when the cruder
//! functional is requested. Rates are five-point differences of the sampled
//! energies and are NaN within two samples of either end.

use std::time::Instant;

use kgnf_core::energy::{base_energy, EnergyEngine};
use kgnf_core::evolve::{evolve, EvolveOptions};
use kgnf_core::model::ModelSpec;
use kgnf_core::spectral::{control_params, sobolev_norm};
use kgnf_core::make_grid;

use crate::profile::initial_state;
use crate::report::{rates, Gate, Point, SweepReport, Table};
use crate::{run_jobs, Config, ExpError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergySample {
    pub t: f64,
    pub e1: f64,
    pub e1para: f64,
    pub es: f64,
    pub es_skip: f64,
    pub a0: f64,
    pub a2: f64,
    pub a3: f64,
    pub hs: f64,
}

#[derive(Clone, Debug)]
pub struct EnergySeries {
    pub eps: f64,
    pub samples: Vec<EnergySample>,
    /// Sample spacing in time.
    pub h: f64,
    pub blowup: Option<f64>,
}

impl EnergySeries {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn values(&self, f: impl Fn(&EnergySample) -> f64) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }
}

/// Evolves `ε·profile` to `t_end` and evaluates the energies every `cfg.every` steps.
/// `E^{1,para}` is taken on the high-high corrected unknown; `Es` honours
/// `skip_conjugation_nf` unless `both` asks for the two variants.
pub fn energy_series(
    cfg: &Config,
    model: &ModelSpec,
    eps: f64,
    t_end: f64,
    both: bool,
) -> Result<EnergySeries> {
    let grid = make_grid(cfg.n, cfg.length)?;
    let engine = EnergyEngine::new(model, &grid, cfg.s)?;
    let u0 = initial_state(cfg, &grid, eps)?;
    let opts = EvolveOptions {
        every: cfg.every,
        strict_cfl: false,
    };
    let mut failure = None;
    let tr = evolve(&u0, model, t_end, cfg.dt, opts, |y| {
        let bg = match engine.background(y) {
            Ok(bg) => bg,
            Err(e) => {
                failure.get_or_insert(e);
                return EnergySample::default();
            }
        };
        let w = engine.corrected(&bg);
        let (es, es_skip) = if both {
            (engine.es(&bg, false), engine.es(&bg, true))
        } else {
            let v = engine.es(&bg, cfg.skip_conjugation_nf);
            (v, f64::NAN)
        };
        EnergySample {
            t: y.time,
            e1: base_energy(y, model.m),
            e1para: engine.e1para(&bg, &w),
            es,
            es_skip,
            a0: control_params(y, 0),
            a2: control_params(y, 2),
            a3: control_params(y, 3),
            hs: sobolev_norm(y, cfg.s),
        }
    })?;
    if let Some(e) = failure {
        return Err(ExpError::Core(e));
    }
    Ok(EnergySeries {
        eps,
        samples: tr.samples.into_iter().map(|(_, s)| s).collect(),
        h: cfg.dt * cfg.every as f64,
        blowup: tr.blowup,
    })
}

pub fn series_columns(both: bool) -> Vec<&'static str> {
    let mut c = vec![
        "eps",
        "t",
        "E1",
        "E1para",
        "Es",
        "A0",
        "A2",
        "A3",
        "Hs_norm",
        "dE1_dt",
        "dE1para_dt",
        "dEs_dt",
    ];
    if both {
        c.extend(["Es_skip", "dEs_skip_dt"]);
    }
    c
}

pub fn append_series(table: &mut Table, s: &EnergySeries, both: bool) {
    let d1 = rates(&s.values(|x| x.e1), s.h);
    let dp = rates(&s.values(|x| x.e1para), s.h);
    let ds = rates(&s.values(|x| x.es), s.h);
    let dk = rates(&s.values(|x| x.es_skip), s.h);
    for (j, x) in s.samples.iter().enumerate() {
        let mut row = vec![
            s.eps, x.t, x.e1, x.e1para, x.es, x.a0, x.a2, x.a3, x.hs, d1[j], dp[j], ds[j],
        ];
        if both {
            row.extend([x.es_skip, dk[j]]);
        }
        table.push(row);
    }
}

/// Trajectory with energy diagnostics for each ε, up to `t_final`.
pub fn run_evolve(cfg: &Config) -> Result<SweepReport> {
    cfg.validate()?;
    let start = Instant::now();
    let model = cfg.model_spec()?;
    let mut report = SweepReport::new(cfg, "kgnf.trajectory");
    let both = cfg.skip_conjugation_nf;
    let runs = run_jobs(&cfg.eps, |&eps| {
        energy_series(cfg, &model, eps, cfg.t_final, both)
    });
    let mut table = Table::new(&series_columns(both));
    let mut clean = true;
    for run in runs {
        let s = run?;
        append_series(&mut table, &s, both);
        let mut p = Point {
            eps: s.eps,
            ..Point::default()
        };
        let e = s.values(|x| x.e1);
        let e0 = e.first().copied().unwrap_or(0.0);
        let dev = e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max);
        p.metrics.insert("E1_initial".into(), e0);
        p.metrics
            .insert("E1_max_rel_change".into(), if e0 > 0.0 { dev / e0 } else { 0.0 });
        if let Some(t) = s.blowup {
            p.flags.push("blow-up".into());
            p.metrics.insert("blowup_time".into(), t);
            clean = false;
        }
        report.points.push(p);
    }
    report.table = table;
    report.gates.push(Gate::new(
        "no-blow-up",
        clean,
        if clean {
            "all runs reached t_final".to_string()
        } else {
            "a run stopped on a blow-up signal".to_string()
        },
    ));
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
