//! Energy functionals: the base energy, the normal-form energy, the
//! paracoefficient main energy with its homogeneity grading, the corrected
//! energies at `H¹` and `H^s`, and the linearized energy.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bilinear::{
    paraproduct_shifted, paraproduct_unchecked, SeparableSymbol, SeparableTerm, SymbolTable,
};
use crate::error::{KgError, Result};
use crate::model::{
    linearized_coefficients, metric_fields, utt_from_state, LinCoefficients, ModelSpec,
    OriginDerivs,
};
use crate::normalform::{conjugation_symbols, solve_h_system, vtt_linearized, NfContext, NfTaylor};
use crate::spectral::{Field, Grid, State, C64};

/// `½∫ w_t² + w_x² + m w²`.
pub fn base_energy(w: &State, m: f64) -> f64 {
    let wx = w.pos.dx();
    0.5 * (w.vel.inner(&w.vel) + wx.inner(&wx) + m * w.pos.inner(&w.pos))
}

/// Degree-one coefficient fields of the main energy.
#[derive(Clone, Debug)]
pub struct ParaCoefficients {
    pub k0: Field,
    pub k1: Field,
    pub k2: Field,
}

impl ParaCoefficients {
    pub fn grade(&self) -> u32 {
        1
    }
}

type Multiplier = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Multipliers `(K^u, K^t)` with `κ_j = K_j^u(D) u + K_j^t(D) u_t`, for `j = 0, 1, 2`.
pub fn kappa_multipliers(t: &NfTaylor) -> [(Multiplier, Multiplier); 3] {
    let (t, m) = (*t, t.m);
    let i = C64::new(0.0, 1.0);
    [
        (
            Arc::new(move |x| 4.0 * (-0.5 * t.a0(x) * x + t.a1(x) - t.b0(x) * (x * x + m))),
            Arc::new(move |x| 2.0 * (-0.5 * t.c01(x) * x + t.c11(x) + t.c02(x))),
        ),
        (
            Arc::new(move |x| 2.0 * (i * t.c01(x) * (x * x + m) + 2.0 * i * t.c12(x))),
            Arc::new(move |x| 4.0 * (-i * t.a0(x) + 2.0 * i * t.b1(x))),
        ),
        (
            Arc::new(move |x| 4.0 * (0.5 * t.a0(x) * x + t.a1(x))),
            Arc::new(move |x| 2.0 * (0.5 * t.c01(x) * x + t.c11(x))),
        ),
    ]
}

pub fn para_coefficients_from(t: &NfTaylor, u: &State) -> ParaCoefficients {
    let [k0, k1, k2] = kappa_multipliers(t).map(|(mu, mt)| {
        let mut k = u.pos.map_symbol(|x| mu(x));
        k.axpy(1.0, &u.vel.map_symbol(|x| mt(x)));
        k
    });
    ParaCoefficients { k0, k1, k2 }
}

/// The paraproducts of the main energy, `T_{κ_j} w` and `T_{κ_j} w_x` for
/// `j = 0, 1, 2` and `T_{Λ1 g11} w_x`, as separable low-high symbols in the
/// pair `(u, w)` or `(u_t, w)`.
pub fn separable_symbols_in_use(t: &NfTaylor, d: &OriginDerivs) -> Vec<(String, SeparableSymbol)> {
    let one = |_: f64| C64::new(1.0, 0.0);
    let dx = |x: f64| C64::new(0.0, x);
    let mut out = Vec::new();
    for (j, (mu, mt)) in kappa_multipliers(t).into_iter().enumerate() {
        for (src, low) in [("u", mu), ("ut", mt)] {
            for (tag, high) in [("w", one as fn(f64) -> C64), ("wx", dx as fn(f64) -> C64)] {
                let l = low.clone();
                let sym = SeparableSymbol::new(vec![SeparableTerm::new(0, move |x| l(x), high)]);
                out.push((format!("kappa{j}[{src}]·{tag}"), sym));
            }
        }
    }
    let (gu, gux, gut) = (d.g11_u, d.g11_ux, d.g11_ut);
    out.push((
        "lambda_g11[u]·wx".into(),
        SeparableSymbol::new(vec![
            SeparableTerm::new(0, move |_| C64::new(gu, 0.0), dx),
            SeparableTerm::new(1, move |_| C64::new(0.0, gux), dx),
        ]),
    ));
    out.push((
        "lambda_g11[ut]·wx".into(),
        SeparableSymbol::new(vec![SeparableTerm::new(0, move |_| C64::new(gut, 0.0), dx)]),
    ));
    out
}

pub fn para_coefficients(u: &State, model: &ModelSpec) -> ParaCoefficients {
    para_coefficients_from(&crate::normalform::nf_taylor(model), u)
}

/// `Λ1 g11 = g11_u u + g11_ut u_t + g11_ux u_x`.
pub fn linear_part_g11(u: &State, model: &ModelSpec) -> Field {
    let d = &model.derivs;
    let mut out = u.pos.scale(d.g11_u);
    out.axpy(d.g11_ut, &u.vel);
    out.axpy(d.g11_ux, &u.pos.dx());
    out
}

/// A scalar resolved by total homogeneity degree; key 4 collects every degree ≥ 4.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradedScalar {
    pub total: f64,
    pub by_degree: BTreeMap<u32, f64>,
}

impl GradedScalar {
    pub fn degree(&self, d: u32) -> f64 {
        self.by_degree.get(&d).copied().unwrap_or(0.0)
    }

    pub fn sum_of_degrees(&self) -> f64 {
        self.by_degree.values().sum()
    }
}

/// Everything an energy needs from the background `u` at one time.
#[derive(Clone, Debug)]
pub struct Background {
    pub state: State,
    pub utt: Field,
    pub g01: Field,
    pub g11m1: Field,
    pub lam_g11: Field,
    pub lin: LinCoefficients,
    pub kappa: ParaCoefficients,
}

/// `<D>^σ`-conjugation normal form tabulated on a grid.
#[derive(Clone, Debug)]
pub struct ConjTables {
    pub sigma: f64,
    pub a: SymbolTable,
    pub b: SymbolTable,
    pub c: SymbolTable,
    pub d: SymbolTable,
}

impl ConjTables {
    pub fn new(sigma: f64, model: &ModelSpec, grid: &Arc<Grid>) -> Result<ConjTables> {
        let h = conjugation_symbols(sigma, model);
        let s = solve_h_system(&h.h00, &h.h01, &h.h10, &h.h11, model.m)?;
        Ok(ConjTables {
            sigma,
            a: s.a.tabulate(grid)?,
            b: s.b.tabulate(grid)?,
            c: s.c.tabulate(grid)?,
            d: s.d.tabulate(grid)?,
        })
    }
}

/// Tabulated symbols for one model, grid and Sobolev index.
#[derive(Clone, Debug)]
pub struct EnergyEngine {
    pub nf: NfContext,
    pub taylor: NfTaylor,
    pub s: f64,
    pub conj: Option<ConjTables>,
}

impl EnergyEngine {
    pub fn new(model: &ModelSpec, grid: &Arc<Grid>, s: f64) -> Result<EnergyEngine> {
        if !(s >= 1.0) {
            return Err(KgError::Invalid(format!(
                "energy index s must be at least 1, got {s}"
            )));
        }
        let nf = NfContext::new(model, grid)?;
        let conj = if s > 1.0 {
            Some(ConjTables::new(s - 1.0, model, grid)?)
        } else {
            None
        };
        Ok(EnergyEngine {
            taylor: nf.sym.taylor(),
            nf,
            s,
            conj,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.nf.model
    }

    pub fn background(&self, u: &State) -> Result<Background> {
        let model = &self.nf.model;
        let utt = utt_from_state(u, model)?;
        let (g01, g11m1) = metric_fields(u, model)?;
        let lin = linearized_coefficients(u, model)?;
        Ok(Background {
            state: u.clone(),
            utt,
            g01,
            g11m1,
            lam_g11: linear_part_g11(u, model),
            lin,
            kappa: para_coefficients_from(&self.taylor, u),
        })
    }

    /// Paradifferential substitution
    /// `w_[tt] = w_xx - m w + 2T_{g01} w_tx + T_{g11-1} w_xx + T_{F0} w_t + T_{F1} w_x + T_F w`.
    pub fn wtt(&self, bg: &Background, w: &State) -> Field {
        let m = self.nf.model.m;
        let (w0, w1) = (&w.pos, &w.vel);
        let mut out = w0.map_symbol(|x| C64::new(-x * x - m, 0.0));
        out.axpy(2.0, &paraproduct_unchecked(&bg.g01, &w1.dx()));
        out.axpy(1.0, &paraproduct_unchecked(&bg.g11m1, &w0.dxx()));
        out.axpy(1.0, &paraproduct_unchecked(&bg.lin.f0, w1));
        out.axpy(1.0, &paraproduct_unchecked(&bg.lin.f1, &w0.dx()));
        out.axpy(1.0, &paraproduct_unchecked(&bg.lin.f, w0));
        out
    }

    /// `E¹(w)` plus the low-high normal-form cross terms.
    pub fn nf_energy(&self, bg: &Background, w: &State) -> f64 {
        let nf = &self.nf;
        let m = nf.model.m;
        let (u, ut, utt) = (&bg.state.pos, &bg.state.vel, &bg.utt);
        let (w0, w1) = (&w.pos, &w.vel);
        let w2 = self.wtt(bg, w);
        let mut y = nf.a_lh.apply(u, w0).scale(2.0);
        y.axpy(2.0, &nf.b_lh.apply(ut, w1));
        y.axpy(1.0, &nf.c_lh.apply(ut, w0));
        y.axpy(1.0, &nf.c_hl.apply(w1, u));
        let mut yt = nf.a_lh.apply(ut, w0).scale(2.0);
        yt.axpy(2.0, &nf.a_lh.apply(u, w1));
        yt.axpy(2.0, &nf.b_lh.apply(utt, w1));
        yt.axpy(2.0, &nf.b_lh.apply(ut, &w2));
        yt.axpy(1.0, &nf.c_lh.apply(utt, w0));
        yt.axpy(1.0, &nf.c_lh.apply(ut, w1));
        yt.axpy(1.0, &nf.c_hl.apply(&w2, u));
        yt.axpy(1.0, &nf.c_hl.apply(w1, ut));
        base_energy(w, m) + w1.inner(&yt) + w0.dx().inner(&y.dx()) + m * w0.inner(&y)
    }

    /// `½∫ w_t T_{1+κ0} w_t + T_{1+κ0} w_x T_{g11} w_x + w_t T_{κ1} w_x - T_{κ1} w_x T_{g01} w_x`,
    /// resolved by homogeneity.
    pub fn graded_main_energy(&self, bg: &Background, w: &State) -> GradedScalar {
        let k = &bg.kappa;
        let (wt, wx) = (&w.vel, &w.pos.dx());
        let t0t = paraproduct_unchecked(&k.k0, wt);
        let t0x = paraproduct_unchecked(&k.k0, wx);
        let t1x = paraproduct_unchecked(&k.k1, wx);
        let lam = paraproduct_unchecked(&bg.lam_g11, wx);
        let tg11 = paraproduct_unchecked(&bg.g11m1, wx);
        let rest = &tg11 - &lam;
        let tg01 = paraproduct_unchecked(&bg.g01, wx);

        let d2 = 0.5 * (wt.inner(wt) + wx.inner(wx));
        let d3 = 0.5 * (wt.inner(&t0t) + t0x.inner(wx) + wx.inner(&lam) + wt.inner(&t1x));
        let d4 = 0.5 * (wx.inner(&rest) + t0x.inner(&tg11) - t1x.inner(&tg01));

        let a = paraproduct_shifted(1.0, &k.k0, wt);
        let b = paraproduct_shifted(1.0, &k.k0, wx);
        let c = paraproduct_shifted(1.0, &bg.g11m1, wx);
        let total = 0.5 * (wt.inner(&a) + b.inner(&c) + wt.inner(&t1x) - t1x.inner(&tg01));
        GradedScalar {
            total,
            by_degree: BTreeMap::from([(2, d2), (3, d3), (4, d4)]),
        }
    }

    pub fn main_energy(&self, bg: &Background, w: &State) -> f64 {
        self.graded_main_energy(bg, w).total
    }

    /// `E_main + E_NF - Λ_{≤3} E_main`.
    pub fn e1para(&self, bg: &Background, w: &State) -> f64 {
        let g = self.graded_main_energy(bg, w);
        g.total + self.nf_energy(bg, w) - g.degree(2) - g.degree(3)
    }

    /// High-high corrected pair `(u_NF, ũ_NF)`.
    pub fn corrected(&self, bg: &Background) -> State {
        self.nf.nf_hh(&bg.state, &bg.utt)
    }

    /// Full energy `E^s(u, u_t)`. With `skip_conj` the conjugation normal form
    /// is dropped and `E^{1,para}(<D>^{s-1} ·)` is returned.
    pub fn es(&self, bg: &Background, skip_conj: bool) -> f64 {
        let w = self.corrected(bg);
        let conj = match &self.conj {
            None => return self.e1para(bg, &w),
            Some(c) => c,
        };
        let sig = conj.sigma;
        let ww = State {
            pos: w.pos.jpow(sig),
            vel: w.vel.jpow(sig),
            time: w.time,
        };
        if skip_conj {
            return self.e1para(bg, &ww);
        }
        let wtt = self.wtt(bg, &w).jpow(sig);
        let (u, ut, utt) = (&bg.state.pos, &bg.state.vel, &bg.utt);
        let (w0, w1) = (&ww.pos, &ww.vel);
        let mut p = w0.clone();
        p.axpy(1.0, &conj.a.apply(u, w0));
        p.axpy(1.0, &conj.b.apply(ut, w1));
        p.axpy(1.0, &conj.c.apply(ut, w0));
        p.axpy(1.0, &conj.d.apply(u, w1));
        let mut q = w1.clone();
        q.axpy(1.0, &conj.a.apply(ut, w0));
        q.axpy(1.0, &conj.a.apply(u, w1));
        q.axpy(1.0, &conj.b.apply(utt, w1));
        q.axpy(1.0, &conj.b.apply(ut, &wtt));
        q.axpy(1.0, &conj.c.apply(utt, w0));
        q.axpy(1.0, &conj.c.apply(ut, w1));
        q.axpy(1.0, &conj.d.apply(ut, w1));
        q.axpy(1.0, &conj.d.apply(u, &wtt));
        self.e1para(
            bg,
            &State {
                pos: p,
                vel: q,
                time: w.time,
            },
        )
    }

    /// `E_lin(v) = E^{1,para}(v_NF, ∂_t v_NF)` along the background.
    pub fn elin(&self, bg: &Background, v: &State) -> Result<f64> {
        let vtt = vtt_linearized(v, &bg.g01, &bg.g11m1, &bg.lin, self.nf.model.m)?;
        let vnf = self.nf.nf_linearized(&bg.state, &bg.utt, v, &vtt);
        Ok(self.e1para(bg, &vnf))
    }
}

pub fn nf_energy(u: &State, w: &State, model: &ModelSpec) -> Result<f64> {
    u.pos.same_grid(&w.pos)?;
    let e = EnergyEngine::new(model, u.grid(), 1.0)?;
    Ok(e.nf_energy(&e.background(u)?, w))
}

pub fn main_energy(u: &State, w: &State, model: &ModelSpec) -> Result<f64> {
    Ok(graded_main_energy(u, w, model)?.total)
}

pub fn graded_main_energy(u: &State, w: &State, model: &ModelSpec) -> Result<GradedScalar> {
    u.pos.same_grid(&w.pos)?;
    let e = EnergyEngine::new(model, u.grid(), 1.0)?;
    Ok(e.graded_main_energy(&e.background(u)?, w))
}

pub fn modified_energy_h1(u: &State, w: &State, model: &ModelSpec) -> Result<f64> {
    u.pos.same_grid(&w.pos)?;
    let e = EnergyEngine::new(model, u.grid(), 1.0)?;
    Ok(e.e1para(&e.background(u)?, w))
}

pub fn modified_energy_s(u: &State, model: &ModelSpec, s: f64, skip_conj: bool) -> Result<f64> {
    let e = EnergyEngine::new(model, u.grid(), s)?;
    Ok(e.es(&e.background(u)?, skip_conj))
}

pub fn linearized_energy(u: &State, v: &State, model: &ModelSpec) -> Result<f64> {
    u.pos.same_grid(&v.pos)?;
    let e = EnergyEngine::new(model, u.grid(), 1.0)?;
    e.elin(&e.background(u)?, v)
}
