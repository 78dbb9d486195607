//! The PDE instance `u_tt = 2 g01 u_tx + g11 u_xx + f - m u` (with `g00 = -1`),
//! its quadratic symbols and the time-derivative elimination.

use std::fmt;
use std::sync::Arc;

use crate::bilinear::BilinearSymbol;
use crate::error::{KgError, Result};
use crate::spectral::{to_spectral, Field, State, C64};

/// Central finite-difference step for closure-defined coefficients.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U,
    Ut,
    Ux,
}

/// `c · u^pu · u_t^put · u_x^pux`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Monomial {
    pub c: f64,
    pub pu: u32,
    pub put: u32,
    pub pux: u32,
}

impl Monomial {
    pub fn new(c: f64, pu: u32, put: u32, pux: u32) -> Self {
        Monomial { c, pu, put, pux }
    }

    fn eval(&self, u: f64, ut: f64, ux: f64) -> f64 {
        self.c * u.powi(self.pu as i32) * ut.powi(self.put as i32) * ux.powi(self.pux as i32)
    }

    fn derive(&self, v: Var) -> Option<Monomial> {
        let mut d = *self;
        let p = match v {
            Var::U => &mut d.pu,
            Var::Ut => &mut d.put,
            Var::Ux => &mut d.pux,
        };
        if *p == 0 {
            return None;
        }
        d.c *= *p as f64;
        *p -= 1;
        Some(d)
    }

    pub fn degree(&self) -> u32 {
        self.pu + self.put + self.pux
    }
}

type CoefFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// A scalar function of `(u, u_t, u_x)`.
#[derive(Clone)]
pub enum Coef {
    Poly(Vec<Monomial>),
    Func(Arc<CoefFn>),
}

impl fmt::Debug for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Poly(m) => f.debug_tuple("Poly").field(m).finish(),
            Coef::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl Coef {
    pub fn zero() -> Coef {
        Coef::Poly(vec![])
    }

    pub fn constant(c: f64) -> Coef {
        Coef::Poly(vec![Monomial::new(c, 0, 0, 0)])
    }

    pub fn func(f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Coef {
        Coef::Func(Arc::new(f))
    }

    pub fn eval(&self, u: f64, ut: f64, ux: f64) -> f64 {
        match self {
            Coef::Poly(ms) => ms.iter().map(|m| m.eval(u, ut, ux)).sum(),
            Coef::Func(f) => f(u, ut, ux),
        }
    }

    /// Partial derivative; exact for polynomials, central difference otherwise.
    pub fn partial(&self, v: Var) -> Coef {
        match self {
            Coef::Poly(ms) => Coef::Poly(ms.iter().filter_map(|m| m.derive(v)).collect()),
            Coef::Func(f) => {
                let f = f.clone();
                let h = FD_STEP;
                Coef::func(move |u, ut, ux| {
                    let (p, q) = match v {
                        Var::U => (f(u + h, ut, ux), f(u - h, ut, ux)),
                        Var::Ut => (f(u, ut + h, ux), f(u, ut - h, ux)),
                        Var::Ux => (f(u, ut, ux + h), f(u, ut, ux - h)),
                    };
                    (p - q) / (2.0 * h)
                })
            }
        }
    }

    /// Second derivative at the origin. For closures this uses a direct
    /// three-point stencil rather than nesting two first differences.
    pub fn second_at_origin(&self, a: Var, b: Var) -> f64 {
        match self {
            Coef::Poly(_) => self.partial(a).partial(b).eval(0.0, 0.0, 0.0),
            Coef::Func(f) => {
                let h = 1e-4;
                let e = |v: Var, s: f64| match v {
                    Var::U => [s, 0.0, 0.0],
                    Var::Ut => [0.0, s, 0.0],
                    Var::Ux => [0.0, 0.0, s],
                };
                let at = |x: [f64; 3], y: [f64; 3]| f(x[0] + y[0], x[1] + y[1], x[2] + y[2]);
                if a == b {
                    let z = [0.0; 3];
                    (at(e(a, h), z) - 2.0 * at(z, z) + at(e(a, -h), z)) / (h * h)
                } else {
                    (at(e(a, h), e(b, h)) - at(e(a, h), e(b, -h)) - at(e(a, -h), e(b, h))
                        + at(e(a, -h), e(b, -h)))
                        / (4.0 * h * h)
                }
            }
        }
    }

    pub fn first_at_origin(&self, v: Var) -> f64 {
        self.partial(v).eval(0.0, 0.0, 0.0)
    }

    /// Pointwise evaluation along a state given physical samples.
    pub fn on_samples(&self, u: &[f64], ut: &[f64], ux: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(ut)
            .zip(ux)
            .map(|((&a, &b), &c)| self.eval(a, b, c))
            .collect()
    }

    /// Is this the polynomial `c` with no other monomials?
    fn is_constant(&self, c: f64) -> bool {
        match self {
            Coef::Poly(ms) => {
                let k: f64 = ms.iter().filter(|m| m.degree() == 0).map(|m| m.c).sum();
                k == c && ms.iter().all(|m| m.degree() == 0 || m.c == 0.0)
            }
            Coef::Func(_) => false,
        }
    }
}

/// First derivatives of the metric and second derivatives of the source at 0.
/// `f_*` entries are true partial derivatives of `f`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OriginDerivs {
    pub g01_u: f64,
    pub g01_ut: f64,
    pub g01_ux: f64,
    pub g11_u: f64,
    pub g11_ut: f64,
    pub g11_ux: f64,
    pub f_uu: f64,
    pub f_uut: f64,
    pub f_utut: f64,
    pub f_uxut: f64,
    pub f_uux: f64,
    pub f_uxux: f64,
}

impl OriginDerivs {
    fn from_coefs(g01: &Coef, g11: &Coef, f: &Coef) -> Self {
        use Var::*;
        OriginDerivs {
            g01_u: g01.first_at_origin(U),
            g01_ut: g01.first_at_origin(Ut),
            g01_ux: g01.first_at_origin(Ux),
            g11_u: g11.first_at_origin(U),
            g11_ut: g11.first_at_origin(Ut),
            g11_ux: g11.first_at_origin(Ux),
            f_uu: f.second_at_origin(U, U),
            f_uut: f.second_at_origin(U, Ut),
            f_utut: f.second_at_origin(Ut, Ut),
            f_uxut: f.second_at_origin(Ux, Ut),
            f_uux: f.second_at_origin(U, Ux),
            f_uxux: f.second_at_origin(Ux, Ux),
        }
    }

    pub fn max_abs_diff(&self, o: &OriginDerivs) -> f64 {
        let a = self.as_array();
        let b = o.as_array();
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> [f64; 12] {
        [
            self.g01_u,
            self.g01_ut,
            self.g01_ux,
            self.g11_u,
            self.g11_ut,
            self.g11_ux,
            self.f_uu,
            self.f_uut,
            self.f_utut,
            self.f_uxut,
            self.f_uux,
            self.f_uxux,
        ]
    }
}

/// A normalized model (`g00 ≡ -1`).
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub name: String,
    pub m: f64,
    pub g01: Coef,
    pub g11: Coef,
    pub f: Coef,
    pub derivs: OriginDerivs,
    /// Apply the two-thirds rule to the nonlinearity (on by default).
    pub dealias: bool,
}

impl ModelSpec {
    /// Builds a model and fills the origin derivatives from the coefficients.
    pub fn new(name: &str, m: f64, g01: Coef, g11: Coef, f: Coef) -> Result<ModelSpec> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(KgError::BadMass(m));
        }
        let derivs = OriginDerivs::from_coefs(&g01, &g11, &f);
        let spec = ModelSpec {
            name: name.to_string(),
            m,
            g01,
            g11,
            f,
            derivs,
            dealias: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Replaces the origin derivatives by analytically supplied values.
    pub fn with_derivs(mut self, d: OriginDerivs) -> Result<ModelSpec> {
        self.derivs = d;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dealias(mut self, on: bool) -> ModelSpec {
        self.dealias = on;
        self
    }

    /// Largest gap between the stored origin derivatives and a finite-difference recomputation.
    pub fn derivs_defect(&self) -> f64 {
        let fd = |c: &Coef| match c {
            Coef::Poly(_) => {
                let c = c.clone();
                Coef::func(move |u, ut, ux| c.eval(u, ut, ux))
            }
            Coef::Func(_) => c.clone(),
        };
        let d = OriginDerivs::from_coefs(&fd(&self.g01), &fd(&self.g11), &fd(&self.f));
        self.derivs.max_abs_diff(&d)
    }

    fn validate(&self) -> Result<()> {
        let tol = 1e-9;
        if self.g01.eval(0.0, 0.0, 0.0).abs() > tol {
            return Err(KgError::BadNormalization("g01(0) must vanish".into()));
        }
        if (self.g11.eval(0.0, 0.0, 0.0) - 1.0).abs() > tol {
            return Err(KgError::BadNormalization("g11(0) must equal 1".into()));
        }
        if self.f.eval(0.0, 0.0, 0.0).abs() > tol {
            return Err(KgError::BadNormalization("f(0) must vanish".into()));
        }
        for v in [Var::U, Var::Ut, Var::Ux] {
            if self.f.first_at_origin(v).abs() > 1e-6 {
                return Err(KgError::BadNormalization(format!(
                    "f has a linear part in {v:?}"
                )));
            }
        }
        let d = &self.derivs;
        for (name, x) in [
            ("f_uux", d.f_uux),
            ("f_uxux", d.f_uxux),
            ("f_uxut", d.f_uxut),
        ] {
            if x.abs() > 1e-6 {
                return Err(KgError::UnsupportedChannel(format!(
                    "quadratic source channel {name} = {x}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.g01.is_constant(0.0) && self.g11.is_constant(1.0) && self.f.is_constant(0.0)
    }
}

/// A model with a general `g00 < 0`, before normalization.
#[derive(Clone, Debug)]
pub struct RawModel {
    pub name: String,
    pub m: f64,
    pub g00: Coef,
    pub g01: Coef,
    pub g11: Coef,
    pub f: Coef,
}

/// Divides `g01`, `g11` and `f` by `-g00`. The sign of `g00` is checked on the
/// cube `|u|, |u_t|, |u_x| <= range` at `samples` points per axis.
pub fn normalize_metric(raw: &RawModel, range: f64, samples: usize) -> Result<ModelSpec> {
    if raw.g00.is_constant(-1.0) {
        return ModelSpec::new(
            &raw.name,
            raw.m,
            raw.g01.clone(),
            raw.g11.clone(),
            raw.f.clone(),
        );
    }
    let k = samples.max(2);
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                let p = |t: usize| -range + 2.0 * range * t as f64 / (k - 1) as f64;
                let (u, ut, ux) = (p(i), p(j), p(l));
                let g = raw.g00.eval(u, ut, ux);
                if !(g < 0.0) {
                    return Err(KgError::DegenerateMetric(u, ut, ux));
                }
            }
        }
    }
    let div = |c: &Coef| {
        let c = c.clone();
        let g00 = raw.g00.clone();
        Coef::func(move |u, ut, ux| c.eval(u, ut, ux) / -g00.eval(u, ut, ux))
    };
    // The mass term also picks up the factor 1/(-g00); its nonlinear part moves into f.
    let m0 = raw.m / -raw.g00.eval(0.0, 0.0, 0.0);
    let (f, g00, m) = (raw.f.clone(), raw.g00.clone(), raw.m);
    let f =
        Coef::func(move |u, ut, ux| (f.eval(u, ut, ux) - m * u) / -g00.eval(u, ut, ux) + m0 * u);
    ModelSpec::new(&raw.name, m0, div(&raw.g01), div(&raw.g11), f)
}

pub const GALLERY: [&str; 6] = ["flat", "g11u", "g01ut", "fu2", "fut2", "generic"];

/// Built-in models; `generic` touches all six metric channels and both supported source channels.
pub fn gallery(name: &str, m: f64) -> Result<ModelSpec> {
    let p = Coef::Poly;
    let mono = Monomial::new;
    let one = || mono(1.0, 0, 0, 0);
    match name {
        "flat" => ModelSpec::new(name, m, Coef::zero(), Coef::constant(1.0), Coef::zero()),
        "g11u" => ModelSpec::new(
            name,
            m,
            Coef::zero(),
            p(vec![one(), mono(1.0, 1, 0, 0)]),
            Coef::zero(),
        ),
        "g01ut" => ModelSpec::new(
            name,
            m,
            p(vec![mono(1.0, 0, 1, 0)]),
            Coef::constant(1.0),
            Coef::zero(),
        ),
        "fu2" => ModelSpec::new(
            name,
            m,
            Coef::zero(),
            Coef::constant(1.0),
            p(vec![mono(1.0, 2, 0, 0)]),
        ),
        "fut2" => ModelSpec::new(
            name,
            m,
            Coef::zero(),
            Coef::constant(1.0),
            p(vec![mono(1.0, 0, 2, 0)]),
        ),
        "generic" => ModelSpec::new(
            name,
            m,
            p(vec![
                mono(0.3, 1, 0, 0),
                mono(0.5, 0, 1, 0),
                mono(-0.4, 0, 0, 1),
            ]),
            p(vec![
                one(),
                mono(0.7, 1, 0, 0),
                mono(-0.2, 0, 1, 0),
                mono(0.6, 0, 0, 1),
                mono(0.25, 2, 0, 0),
            ]),
            p(vec![
                mono(0.5, 2, 0, 0),
                mono(-0.3, 1, 1, 0),
                mono(0.2, 0, 2, 0),
                mono(0.1, 3, 0, 0),
            ]),
        ),
        other => Err(KgError::Invalid(format!("unknown model `{other}`"))),
    }
}

/// Physical samples of `u, u_t, u_x, u_xx, u_tx`.
pub(crate) struct Samples {
    pub u: Vec<f64>,
    pub ut: Vec<f64>,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
    pub utx: Vec<f64>,
}

impl Samples {
    pub fn of(state: &State) -> Samples {
        Samples {
            u: state.pos.to_physical(),
            ut: state.vel.to_physical(),
            ux: state.pos.dx().to_physical(),
            uxx: state.pos.dxx().to_physical(),
            utx: state.vel.dx().to_physical(),
        }
    }
}

impl ModelSpec {
    /// `N = 2 g01 u_tx + (g11 - 1) u_xx + f`.
    pub fn nonlinearity(&self, state: &State) -> Result<Field> {
        let grid = state.grid();
        if self.is_flat() {
            return Ok(Field::zeros(grid));
        }
        let s = Samples::of(state);
        let mut out = Vec::with_capacity(grid.n());
        for i in 0..grid.n() {
            let (u, ut, ux) = (s.u[i], s.ut[i], s.ux[i]);
            let v = 2.0 * self.g01.eval(u, ut, ux) * s.utx[i]
                + (self.g11.eval(u, ut, ux) - 1.0) * s.uxx[i]
                + self.f.eval(u, ut, ux);
            if !v.is_finite() {
                return Err(KgError::BlowUp(state.time));
            }
            out.push(v);
        }
        let n = to_spectral(&out, grid)?;
        Ok(if self.dealias { n.dealiased() } else { n })
    }
}

/// `u_tt = u_xx - m u + N(u)`, linear part applied exactly as a multiplier.
pub fn utt_from_state(state: &State, model: &ModelSpec) -> Result<Field> {
    let m = model.m;
    let mut out = state.pos.map_symbol(|xi| C64::new(-xi * xi - m, 0.0));
    out.axpy(1.0, &model.nonlinearity(state)?);
    Ok(out)
}

/// Coefficients of the linearized flow
/// `v_tt - 2 g01 v_tx - g11 v_xx + m v = F0 v_t + F1 v_x + F v`.
#[derive(Clone, Debug)]
pub struct LinCoefficients {
    pub f0: Field,
    pub f1: Field,
    pub f: Field,
}

pub fn linearized_coefficients(state: &State, model: &ModelSpec) -> Result<LinCoefficients> {
    let grid = state.grid();
    if model.is_flat() {
        let z = Field::zeros(grid);
        return Ok(LinCoefficients {
            f0: z.clone(),
            f1: z.clone(),
            f: z,
        });
    }
    let s = Samples::of(state);
    let build = |v: Var| -> Result<Field> {
        let (a, b, c) = (
            model.g01.partial(v),
            model.g11.partial(v),
            model.f.partial(v),
        );
        let mut out = Vec::with_capacity(grid.n());
        for i in 0..grid.n() {
            let (u, ut, ux) = (s.u[i], s.ut[i], s.ux[i]);
            let x = 2.0 * a.eval(u, ut, ux) * s.utx[i]
                + b.eval(u, ut, ux) * s.uxx[i]
                + c.eval(u, ut, ux);
            if !x.is_finite() {
                return Err(KgError::BlowUp(state.time));
            }
            out.push(x);
        }
        Ok(to_spectral(&out, grid)?.dealiased())
    };
    Ok(LinCoefficients {
        f0: build(Var::Ut)?,
        f1: build(Var::Ux)?,
        f: build(Var::U)?,
    })
}

/// Coefficient fields `g01(u, ∂u)` and `g11(u, ∂u) - 1` along a state, dealiased.
pub fn metric_fields(state: &State, model: &ModelSpec) -> Result<(Field, Field)> {
    let grid = state.grid();
    if model.is_flat() {
        return Ok((Field::zeros(grid), Field::zeros(grid)));
    }
    let s = Samples::of(state);
    let g01: Vec<f64> = model.g01.on_samples(&s.u, &s.ut, &s.ux);
    let g11: Vec<f64> = model
        .g11
        .on_samples(&s.u, &s.ut, &s.ux)
        .into_iter()
        .map(|x| x - 1.0)
        .collect();
    if g01.iter().chain(&g11).any(|x| !x.is_finite()) {
        return Err(KgError::BlowUp(state.time));
    }
    Ok((
        to_spectral(&g01, grid)?.dealiased(),
        to_spectral(&g11, grid)?.dealiased(),
    ))
}

/// Constants of the quadratic symbols in the normalization where the source
/// enters as `F_uu u u + F_utu u_t u + F_utut u_t u_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadCoeffs {
    pub g01_u: f64,
    pub g01_ut: f64,
    pub g01_ux: f64,
    pub g11_u: f64,
    pub g11_ut: f64,
    pub g11_ux: f64,
    pub f_uu: f64,
    pub f_utu: f64,
    pub f_utut: f64,
}

impl QuadCoeffs {
    pub fn of(model: &ModelSpec) -> QuadCoeffs {
        let d = &model.derivs;
        QuadCoeffs {
            g01_u: d.g01_u,
            g01_ut: d.g01_ut,
            g01_ux: d.g01_ux,
            g11_u: d.g11_u,
            g11_ut: d.g11_ut,
            g11_ux: d.g11_ux,
            f_uu: 0.5 * d.f_uu,
            f_utu: d.f_uut,
            f_utut: 0.5 * d.f_utut,
        }
    }

    pub fn q00(&self, x1: f64, x2: f64) -> C64 {
        C64::new(self.f_utut, self.g01_ut * (x1 + x2))
    }

    /// `u_t` at `ξ1`, `u` at `ξ2`.
    pub fn q01(&self, x1: f64, x2: f64) -> C64 {
        C64::new(
            self.f_utu - 2.0 * self.g01_ux * x1 * x2 - self.g11_ut * x2 * x2,
            2.0 * self.g01_u * x1,
        )
    }

    pub fn q11(&self, x1: f64, x2: f64) -> C64 {
        C64::new(
            self.f_uu - 0.5 * self.g11_u * (x1 * x1 + x2 * x2),
            -0.5 * self.g11_ux * (x1 * x2 * x2 + x2 * x1 * x1),
        )
    }
}

#[derive(Clone, Debug)]
pub struct QuadSymbols {
    pub q00: BilinearSymbol,
    pub q01: BilinearSymbol,
    pub q11: BilinearSymbol,
}

pub fn quadratic_symbols(model: &ModelSpec) -> QuadSymbols {
    let q = QuadCoeffs::of(model);
    QuadSymbols {
        q00: BilinearSymbol::new(move |a, b| q.q00(a, b)),
        q01: BilinearSymbol::new(move |a, b| q.q01(a, b)),
        q11: BilinearSymbol::new(move |a, b| q.q11(a, b)),
    }
}

/// One-frequency coefficients with `q(ξ1, ξ2) = Σ_k q^(k)(ξ1) ξ2^k`;
/// `tq01` expands `q01(ξ2, ξ1)`.
#[derive(Clone, Copy, Debug)]
pub struct QTaylor {
    q: QuadCoeffs,
}

impl QTaylor {
    pub fn q00_0(&self, x: f64) -> C64 {
        C64::new(self.q.f_utut, self.q.g01_ut * x)
    }
    pub fn q00_1(&self, _x: f64) -> C64 {
        C64::new(0.0, self.q.g01_ut)
    }
    pub fn q11_2(&self, x: f64) -> C64 {
        C64::new(-0.5 * self.q.g11_u, -0.5 * self.q.g11_ux * x)
    }
    pub fn q11_1(&self, x: f64) -> C64 {
        C64::new(0.0, -0.5 * self.q.g11_ux * x * x)
    }
    pub fn q11_0(&self, x: f64) -> C64 {
        C64::new(self.q.f_uu - 0.5 * self.q.g11_u * x * x, 0.0)
    }
    pub fn q01_2(&self, _x: f64) -> C64 {
        C64::new(-self.q.g11_ut, 0.0)
    }
    pub fn q01_1(&self, x: f64) -> C64 {
        C64::new(-2.0 * self.q.g01_ux * x, 0.0)
    }
    pub fn q01_0(&self, x: f64) -> C64 {
        C64::new(self.q.f_utu, 2.0 * self.q.g01_u * x)
    }
    pub fn tq01_1(&self, x: f64) -> C64 {
        C64::new(-2.0 * self.q.g01_ux * x, 2.0 * self.q.g01_u)
    }
    pub fn tq01_0(&self, x: f64) -> C64 {
        C64::new(self.q.f_utu - self.q.g11_ut * x * x, 0.0)
    }

    pub fn q00(&self, x1: f64, x2: f64) -> C64 {
        self.q00_0(x1) + self.q00_1(x1) * x2
    }
    pub fn q11(&self, x1: f64, x2: f64) -> C64 {
        self.q11_0(x1) + self.q11_1(x1) * x2 + self.q11_2(x1) * x2 * x2
    }
    pub fn q01(&self, x1: f64, x2: f64) -> C64 {
        self.q01_0(x1) + self.q01_1(x1) * x2 + self.q01_2(x1) * x2 * x2
    }
    pub fn tq01(&self, x1: f64, x2: f64) -> C64 {
        self.tq01_0(x1) + self.tq01_1(x1) * x2
    }
}

pub fn q_taylor_coeffs(model: &ModelSpec) -> QTaylor {
    QTaylor {
        q: QuadCoeffs::of(model),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_partials_are_exact() {
        let c = Coef::Poly(vec![Monomial::new(2.0, 2, 1, 0)]);
        assert_eq!(c.partial(Var::U).eval(3.0, 5.0, 0.0), 60.0);
        assert_eq!(c.second_at_origin(Var::U, Var::U), 0.0);
    }

    #[test]
    fn gallery_builds() {
        for name in GALLERY {
            let m = gallery(name, 1.0).unwrap();
            assert_eq!(m.is_flat(), name == "flat");
        }
        assert!(gallery("nope", 1.0).is_err());
    }

    #[test]
    fn rejects_ux_source_channels() {
        let f = Coef::Poly(vec![Monomial::new(1.0, 0, 0, 2)]);
        let e = ModelSpec::new("x", 1.0, Coef::zero(), Coef::constant(1.0), f).unwrap_err();
        assert!(matches!(e, KgError::UnsupportedChannel(_)));
    }
}
