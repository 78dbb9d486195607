//! Classical RK4 method of lines for the full flow and for the linearized
//! flow along a stored background.

use crate::error::{KgError, Result};
use crate::model::{
    linearized_coefficients, metric_fields, utt_from_state, LinCoefficients, ModelSpec,
};
use crate::normalform::vtt_linearized;
use crate::spectral::{Field, State};

pub const CFL_SAFETY: f64 = 0.5;

/// Sup-norm beyond which a state is treated as blown up.
pub const BLOWUP_SUP: f64 = 1e8;

/// `CFL_SAFETY · Δx / c_max`, with `c_max` the largest characteristic speed
/// `|g01| + sqrt(g01² + g11)` over the grid.
pub fn cfl_bound(state: &State, model: &ModelSpec) -> Result<f64> {
    let dx = state.grid().dx();
    let (g01, g11m1) = metric_fields(state, model)?;
    let a = g01.to_physical();
    let b = g11m1.to_physical();
    let mut c: f64 = 1.0;
    for (x, y) in a.iter().zip(&b) {
        let disc = x * x + 1.0 + y;
        if disc <= 0.0 {
            return Err(KgError::BlowUp(state.time));
        }
        c = c.max(x.abs() + disc.sqrt());
    }
    Ok(CFL_SAFETY * dx / c)
}

fn check(state: &State) -> Result<()> {
    if !state.is_finite() || state.pos.sup_norm() > BLOWUP_SUP {
        return Err(KgError::BlowUp(state.time));
    }
    Ok(())
}

fn stage(y: &State, k: &(Field, Field), h: f64) -> State {
    let mut pos = y.pos.clone();
    pos.axpy(h, &k.0);
    let mut vel = y.vel.clone();
    vel.axpy(h, &k.1);
    State {
        pos,
        vel,
        time: y.time + h,
    }
}

fn rk4_generic(y: &State, dt: f64, mut rhs: impl FnMut(&State) -> Result<Field>) -> Result<State> {
    let k1 = (y.vel.clone(), rhs(y)?);
    let y2 = stage(y, &k1, 0.5 * dt);
    let k2 = (y2.vel.clone(), rhs(&y2)?);
    let y3 = stage(y, &k2, 0.5 * dt);
    let k3 = (y3.vel.clone(), rhs(&y3)?);
    let y4 = stage(y, &k3, dt);
    let k4 = (y4.vel.clone(), rhs(&y4)?);
    let mut pos = y.pos.clone();
    let mut vel = y.vel.clone();
    for (w, k) in [(1.0, &k1), (2.0, &k2), (2.0, &k3), (1.0, &k4)] {
        pos.axpy(w * dt / 6.0, &k.0);
        vel.axpy(w * dt / 6.0, &k.1);
    }
    let out = State {
        pos,
        vel,
        time: y.time + dt,
    };
    check(&out)?;
    Ok(out)
}

/// One classical RK4 step of `(u, u_t)' = (u_t, u_tt)`.
pub fn step_rk4(state: &State, model: &ModelSpec, dt: f64) -> Result<State> {
    rk4_generic(state, dt, |s| utt_from_state(s, model))
}

/// Step-by-step driver; yields successive states and ends after the first error.
pub struct Stepper<'a> {
    model: &'a ModelSpec,
    state: State,
    dt: f64,
    failed: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(state: State, model: &'a ModelSpec, dt: f64) -> Stepper<'a> {
        Stepper {
            model,
            state,
            dt,
            failed: false,
        }
    }

    pub fn state(&self) -> &State {
        &self.state
    }
}

impl Iterator for Stepper<'_> {
    type Item = Result<State>;

    fn next(&mut self) -> Option<Result<State>> {
        if self.failed {
            return None;
        }
        match step_rk4(&self.state, self.model, self.dt) {
            Ok(s) => {
                self.state = s.clone();
                Some(Ok(s))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

/// Sampled output of a run.
#[derive(Clone, Debug)]
pub struct Trajectory<R> {
    pub dt: f64,
    pub samples: Vec<(f64, R)>,
    pub last: State,
    /// Time of the last good state when the run stopped on a blow-up signal.
    pub blowup: Option<f64>,
}

impl<R> Trajectory<R> {
    pub fn blew_up(&self) -> bool {
        self.blowup.is_some()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Observer cadence in steps.
    pub every: usize,
    /// Reject steps above the CFL bound instead of proceeding.
    pub strict_cfl: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            every: 1,
            strict_cfl: false,
        }
    }
}

/// Integrates to `t_final` (negative `dt` runs backwards). The observer sees
/// the initial state and every `every`-th state; the run stops early on a
/// blow-up signal and keeps the partial record.
pub fn evolve<R>(
    state0: &State,
    model: &ModelSpec,
    t_final: f64,
    dt: f64,
    opts: EvolveOptions,
    mut observe: impl FnMut(&State) -> R,
) -> Result<Trajectory<R>> {
    if !(t_final > 0.0) || dt == 0.0 || !dt.is_finite() {
        return Err(KgError::Invalid(format!(
            "need T > 0 and finite dt != 0, got T={t_final}, dt={dt}"
        )));
    }
    let bound = cfl_bound(state0, model)?;
    if dt.abs() > bound {
        if opts.strict_cfl {
            return Err(KgError::Cfl {
                dt: dt.abs(),
                bound,
            });
        }
        log::warn!(
            "dt = {} exceeds the CFL bound {bound:.3e}; proceeding",
            dt.abs()
        );
    }
    let steps = (t_final / dt.abs()).round() as usize;
    let every = opts.every.max(1);
    let mut y = state0.clone();
    let mut samples = vec![(y.time, observe(&y))];
    for k in 1..=steps {
        match step_rk4(&y, model, dt) {
            Ok(next) => y = next,
            Err(KgError::BlowUp(_)) => {
                return Ok(Trajectory {
                    dt,
                    samples,
                    blowup: Some(y.time),
                    last: y,
                });
            }
            Err(e) => return Err(e),
        }
        if k % every == 0 {
            samples.push((y.time, observe(&y)));
        }
    }
    Ok(Trajectory {
        dt,
        samples,
        last: y,
        blowup: None,
    })
}

/// Coefficient fields of the linearized flow at one background time.
#[derive(Clone, Debug)]
struct LinFrame {
    g01: Field,
    g11m1: Field,
    lin: LinCoefficients,
}

impl LinFrame {
    fn of(u: &State, model: &ModelSpec) -> Result<LinFrame> {
        let (g01, g11m1) = metric_fields(u, model)?;
        Ok(LinFrame {
            g01,
            g11m1,
            lin: linearized_coefficients(u, model)?,
        })
    }

    fn lerp(&self, other: &LinFrame, s: f64) -> LinFrame {
        let mix = |a: &Field, b: &Field| {
            let mut o = a.scale(1.0 - s);
            o.axpy(s, b);
            o
        };
        LinFrame {
            g01: mix(&self.g01, &other.g01),
            g11m1: mix(&self.g11m1, &other.g11m1),
            lin: LinCoefficients {
                f0: mix(&self.lin.f0, &other.lin.f0),
                f1: mix(&self.lin.f1, &other.lin.f1),
                f: mix(&self.lin.f, &other.lin.f),
            },
        }
    }
}

/// Integrates `v_tt - 2g01 v_tx - g11 v_xx + m v = F0 v_t + F1 v_x + F v` along
/// background states sampled uniformly in time, interpolating the coefficients
/// linearly. `dt` must divide the background spacing.
pub fn evolve_linearized(
    background: &[State],
    model: &ModelSpec,
    v0: &State,
    dt: f64,
) -> Result<Trajectory<State>> {
    if background.len() < 2 {
        return Err(KgError::Invalid(
            "background needs at least two states".into(),
        ));
    }
    v0.pos.same_grid(&background[0].pos)?;
    let spacing = background[1].time - background[0].time;
    let ratio = spacing / dt;
    if !(dt > 0.0) || (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
        return Err(KgError::Invalid(format!(
            "dt={dt} must divide the background spacing {spacing}"
        )));
    }
    let sub = ratio.round() as usize;
    let frames: Vec<LinFrame> = background
        .iter()
        .map(|u| LinFrame::of(u, model))
        .collect::<Result<_>>()?;
    let t0 = background[0].time;
    let m = model.m;
    let at = |t: f64| -> LinFrame {
        let x = ((t - t0) / spacing).clamp(0.0, (frames.len() - 1) as f64);
        let i = (x.floor() as usize).min(frames.len() - 2);
        frames[i].lerp(&frames[i + 1], x - i as f64)
    };
    let mut v = State {
        time: t0,
        ..v0.clone()
    };
    let mut samples = vec![(v.time, v.clone())];
    for _ in 0..(background.len() - 1) {
        for _ in 0..sub {
            v = rk4_generic(&v, dt, |s| {
                let fr = at(s.time);
                vtt_linearized(s, &fr.g01, &fr.g11m1, &fr.lin, m)
            })?;
        }
        samples.push((v.time, v.clone()));
    }
    Ok(Trajectory {
        dt,
        samples,
        last: v,
        blowup: None,
    })
}
