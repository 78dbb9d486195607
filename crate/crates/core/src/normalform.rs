//! Normal-form symbols: the resonance denominator, the closed-form `a, b, c`,
//! their low-high Taylor data, the generalized `h`-system and the
//! `<D>^σ` conjugation symbols.

use std::sync::Arc;

use crate::bilinear::{chi_weyl, BilinearSymbol, Region, SymbolTable};
use crate::error::{KgError, Result};
use crate::model::{utt_from_state, LinCoefficients, ModelSpec, OriginDerivs, QuadCoeffs};
use crate::spectral::{Field, Grid, State, C64};

/// `Δ = (m - 2ξ1ξ2)² - 4(ξ1² + m)(ξ2² + m)`, returned in the reduced form
/// `-4m(ξ1² + ξ2² + ξ1ξ2) - 3m²`.
pub fn delta(x1: f64, x2: f64, m: f64) -> Result<f64> {
    if !(m > 0.0) {
        return Err(KgError::BadMass(m));
    }
    Ok(delta_reduced(x1, x2, m))
}

#[inline]
pub fn delta_reduced(x1: f64, x2: f64, m: f64) -> f64 {
    -4.0 * m * (x1 * x1 + x2 * x2 + x1 * x2) - 3.0 * m * m
}

#[inline]
pub fn delta_expanded(x1: f64, x2: f64, m: f64) -> f64 {
    let r = m - 2.0 * x1 * x2;
    r * r - 4.0 * (x1 * x1 + m) * (x2 * x2 + m)
}

/// Closed-form normal-form symbols for one model.
#[derive(Clone, Copy, Debug)]
pub struct NfSymbols {
    pub m: f64,
    pub q: QuadCoeffs,
}

pub fn nf_symbols(model: &ModelSpec) -> NfSymbols {
    NfSymbols {
        m: model.m,
        q: QuadCoeffs::of(model),
    }
}

impl NfSymbols {
    /// Symbol of `A(u, u)`.
    pub fn a(&self, x1: f64, x2: f64) -> C64 {
        let m = self.m;
        let d = delta_reduced(x1, x2, m);
        let pq = (x1 * x1 + m) * (x2 * x2 + m);
        ((m - 2.0 * x1 * x2) * self.q.q11(x1, x2) + 2.0 * pq * self.q.q00(x1, x2)) / d
    }

    /// Symbol of `B(u_t, u_t)`.
    pub fn b(&self, x1: f64, x2: f64) -> C64 {
        let m = self.m;
        let d = delta_reduced(x1, x2, m);
        (2.0 * self.q.q11(x1, x2) + (m - 2.0 * x1 * x2) * self.q.q00(x1, x2)) / d
    }

    /// Symbol of `C(u_t, u)`: `u_t` at `ξ1`, `u` at `ξ2`.
    pub fn c(&self, x1: f64, x2: f64) -> C64 {
        let m = self.m;
        let d = delta_reduced(x1, x2, m);
        ((m - 2.0 * x1 * x2) * self.q.q01(x1, x2) - 2.0 * (x2 * x2 + m) * self.q.q01(x2, x1)) / d
    }

    pub fn a_symbol(&self) -> BilinearSymbol {
        let s = *self;
        BilinearSymbol::new(move |x, y| s.a(x, y))
    }

    pub fn b_symbol(&self) -> BilinearSymbol {
        let s = *self;
        BilinearSymbol::new(move |x, y| s.b(x, y))
    }

    pub fn c_symbol(&self) -> BilinearSymbol {
        let s = *self;
        BilinearSymbol::new(move |x, y| s.c(x, y))
    }

    pub fn taylor(&self) -> NfTaylor {
        NfTaylor {
            m: self.m,
            q: self.q,
        }
    }
}

/// The eight one-frequency multipliers of the low-high expansions
/// `a ≈ a0(ξ1)ξ2 + a1(ξ1)`, `b ≈ b0(ξ1) + b1(ξ1)/ξ2`,
/// `c_lh ≈ c01(ξ1)ξ2 + c11(ξ1)`, `c_hl ≈ c02(ξ2) + c12(ξ2)/ξ1`.
#[derive(Clone, Copy, Debug)]
pub struct NfTaylor {
    pub m: f64,
    pub q: QuadCoeffs,
}

pub fn nf_taylor(model: &ModelSpec) -> NfTaylor {
    nf_symbols(model).taylor()
}

impl NfTaylor {
    pub fn a0(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(
            -q.g11_u / (4.0 * m) * x,
            -0.5 * q.g01_ut - (q.g01_ut + 0.5 * q.g11_ux) * x * x / (2.0 * m),
        )
    }

    pub fn b0(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(
            q.g11_u / (4.0 * m),
            x / (2.0 * m) * (q.g01_ut + 0.5 * q.g11_ux),
        )
    }

    pub fn c01(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(-(q.g11_ut + 2.0 * q.g01_ux) * x / (2.0 * m), q.g01_u / m)
    }

    pub fn c02(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(
            -0.5 * q.g11_ut - (2.0 * q.g01_ux + q.g11_ut) * x * x / (2.0 * m),
            q.g01_u / m * x,
        )
    }

    pub fn a1(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(
            q.g11_u / 8.0 - 0.5 * q.f_utut + x * x / (4.0 * m) * (q.g11_u - 2.0 * q.f_utut),
            q.g11_ux / 8.0 * x,
        )
    }

    pub fn b1(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(x / (4.0 * m) * (2.0 * q.f_utut - q.g11_u), -0.25 * q.g01_ut)
    }

    pub fn c11(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(0.25 * q.g11_ut + q.f_utu / (2.0 * m), -q.g01_u / m * x)
    }

    pub fn c12(&self, x: f64) -> C64 {
        let (q, m) = (&self.q, self.m);
        C64::new(
            0.5 * (q.g11_ut - q.g01_ux + q.f_utu / m) * x,
            -0.5 * q.g01_u - q.g01_u / m * x * x,
        )
    }

    /// `(a0, a1, b0, b1, c01, c11, c02, c12)` at one frequency.
    pub fn all(&self, x: f64) -> [C64; 8] {
        [
            self.a0(x),
            self.a1(x),
            self.b0(x),
            self.b1(x),
            self.c01(x),
            self.c11(x),
            self.c02(x),
            self.c12(x),
        ]
    }
}

/// Splits a symbol by the unshifted cutoffs into its low-high, high-low and
/// high-high pieces.
pub fn region_split(sym: &BilinearSymbol) -> (BilinearSymbol, BilinearSymbol, BilinearSymbol) {
    (
        sym.restrict(Region::Lh),
        sym.restrict(Region::Hl),
        sym.restrict(Region::Hh),
    )
}

/// Solution of the generalized normal-form system for
/// `A(u, w) + B(u_t, w_t) + C(u_t, w) + D(u, w_t)`.
#[derive(Clone, Debug)]
pub struct HSystemSolution {
    pub a: BilinearSymbol,
    pub b: BilinearSymbol,
    pub c: BilinearSymbol,
    pub d: BilinearSymbol,
}

/// Sources: `h00` pairs `(u_t, w_t)`, `h01` pairs `(u_t, w)`, `h10` pairs `(u, w_t)`,
/// `h11` pairs `(u, w)`, with the `u`-type argument at `ξ1`.
pub fn solve_h_system(
    h00: &BilinearSymbol,
    h01: &BilinearSymbol,
    h10: &BilinearSymbol,
    h11: &BilinearSymbol,
    m: f64,
) -> Result<HSystemSolution> {
    if !(m > 0.0) {
        return Err(KgError::BadMass(m));
    }
    let (h00a, h11a) = (h00.clone(), h11.clone());
    let a = BilinearSymbol::new(move |x, y| {
        let d = delta_reduced(x, y, m);
        ((m - 2.0 * x * y) * h11a.eval(x, y) + 2.0 * (x * x + m) * (y * y + m) * h00a.eval(x, y))
            / d
    });
    let (h00b, h11b) = (h00.clone(), h11.clone());
    let b = BilinearSymbol::new(move |x, y| {
        let d = delta_reduced(x, y, m);
        (2.0 * h11b.eval(x, y) + (m - 2.0 * x * y) * h00b.eval(x, y)) / d
    });
    let (h01c, h10c) = (h01.clone(), h10.clone());
    let c = BilinearSymbol::new(move |x, y| {
        let d = delta_reduced(x, y, m);
        ((m - 2.0 * x * y) * h01c.eval(x, y) - 2.0 * (y * y + m) * h10c.eval(x, y)) / d
    });
    let (h01d, h10d) = (h01.clone(), h10.clone());
    let d = BilinearSymbol::new(move |x, y| {
        let dl = delta_reduced(x, y, m);
        ((m - 2.0 * x * y) * h10d.eval(x, y) - 2.0 * (x * x + m) * h01d.eval(x, y)) / dl
    });
    Ok(HSystemSolution { a, b, c, d })
}

/// `q^σ(ξ1, ξ2) = (<ξ1+ξ2>^σ <ξ2>^{-σ} - 1) χ_lh(ξ1, ξ2 + ξ1/2) ξ2/ξ1`,
/// with the limit `σ ξ2²/<ξ2>²` on `ξ1 = 0`.
pub fn q_sigma(sigma: f64, x1: f64, x2: f64) -> f64 {
    let chi = chi_weyl(x1, x2);
    if chi == 0.0 || sigma == 0.0 {
        return 0.0;
    }
    let den = 1.0 + x2 * x2;
    if x1 == 0.0 {
        return sigma * x2 * x2 / den * chi;
    }
    let ratm1 = (0.5 * sigma * (x1 * (x1 + 2.0 * x2) / den).ln_1p()).exp_m1();
    ratm1 * chi * x2 / x1
}

/// The four commutator sources of the `<D>^σ`-conjugated equation.
#[derive(Clone, Debug)]
pub struct HForms {
    pub h00: BilinearSymbol,
    pub h01: BilinearSymbol,
    pub h10: BilinearSymbol,
    pub h11: BilinearSymbol,
}

pub fn conjugation_symbols(sigma: f64, model: &ModelSpec) -> HForms {
    let d: OriginDerivs = model.derivs;
    let i = C64::new(0.0, 1.0);
    // ∂_x -> iξ1 on the low argument, ∂^{-1} -> 1/(iξ2) on the high one.
    let inv2 = |y: f64| if y == 0.0 { 0.0 } else { 1.0 / y };
    let h00 = BilinearSymbol::new(move |x, y| {
        let q = q_sigma(sigma, x, y);
        if q == 0.0 {
            return C64::new(0.0, 0.0);
        }
        q * (2.0 * i * d.g01_ut * x + x * inv2(y) * (2.0 * i * d.g01_ut * x + d.f_utut))
    });
    let h10 = BilinearSymbol::new(move |x, y| {
        let q = q_sigma(sigma, x, y);
        if q == 0.0 {
            return C64::new(0.0, 0.0);
        }
        q * (2.0 * i * x * (d.g01_u + i * d.g01_ux * x)
            + x * inv2(y) * (d.f_uut - d.g11_ut * x * x))
    });
    let h01 = BilinearSymbol::new(move |x, y| {
        let q = q_sigma(sigma, x, y);
        if q == 0.0 {
            return C64::new(0.0, 0.0);
        }
        q * (-d.g11_ut * x * y - 2.0 * d.g01_ux * x * x
            + x * inv2(y) * (2.0 * i * d.g01_u * x + d.f_uut))
    });
    let h11 = BilinearSymbol::new(move |x, y| {
        let q = q_sigma(sigma, x, y);
        if q == 0.0 {
            return C64::new(0.0, 0.0);
        }
        q * (-x * y * (d.g11_u + i * d.g11_ux * x) - i * d.g11_ux * x * x * x
            + x * inv2(y) * (d.f_uu - d.g11_u * x * x))
    });
    HForms { h00, h01, h10, h11 }
}

/// Normal-form symbols tabulated on one grid, with every region split the
/// energies and corrections use.
#[derive(Clone, Debug)]
pub struct NfContext {
    pub model: ModelSpec,
    pub grid: Arc<Grid>,
    pub sym: NfSymbols,
    pub a: SymbolTable,
    pub b: SymbolTable,
    pub c: SymbolTable,
    pub a_lh: SymbolTable,
    pub b_lh: SymbolTable,
    pub c_lh: SymbolTable,
    pub c_hl: SymbolTable,
    pub a_hh: SymbolTable,
    pub b_hh: SymbolTable,
    pub c_hh: SymbolTable,
    /// `2(A_hl + A_hh)` in `(u, v)`.
    pub a_lin: SymbolTable,
    /// `2(B_hl + B_hh)` in `(u_t, v_t)`.
    pub b_lin: SymbolTable,
    /// `C_hl + C_hh` in `(u_t, v)`.
    pub c_lin: SymbolTable,
    /// `C(v_t, u)` off its `v`-high region, written in `(u, v_t)`.
    pub d_lin: SymbolTable,
}

impl NfContext {
    pub fn new(model: &ModelSpec, grid: &Arc<Grid>) -> Result<NfContext> {
        let sym = nf_symbols(model);
        let a = SymbolTable::new(grid, |x, y| sym.a(x, y))?;
        let b = SymbolTable::new(grid, |x, y| sym.b(x, y))?;
        let c = SymbolTable::new(grid, |x, y| sym.c(x, y))?;
        let (a_lh, a_hh) = (a.lh(), a.hh());
        let (b_lh, b_hh) = (b.lh(), b.hh());
        let (c_lh, c_hl, c_hh) = (c.lh(), c.hl(), c.hh());
        let a_lin = a.hl().add(&a_hh).scale(2.0);
        let b_lin = b.hl().add(&b_hh).scale(2.0);
        let c_lin = c_hl.add(&c_hh);
        let d_lin = c_lh.add(&c_hh).transposed();
        Ok(NfContext {
            model: model.clone(),
            grid: grid.clone(),
            sym,
            a,
            b,
            c,
            a_lh,
            b_lh,
            c_lh,
            c_hl,
            a_hh,
            b_hh,
            c_hh,
            a_lin,
            b_lin,
            c_lin,
            d_lin,
        })
    }

    /// `u + A(u,u) + B(u_t,u_t) + C(u_t,u)` with the full symbols.
    pub fn nf_full(&self, s: &State) -> Field {
        let (u, ut) = (&s.pos, &s.vel);
        let mut out = u.clone();
        out.axpy(1.0, &self.a.apply(u, u));
        out.axpy(1.0, &self.b.apply(ut, ut));
        out.axpy(1.0, &self.c.apply(ut, u));
        out
    }

    /// High-high corrected pair `(u_NF, ũ_NF)`; `utt` is the equation's `u_tt`.
    pub fn nf_hh(&self, s: &State, utt: &Field) -> State {
        let (u, ut) = (&s.pos, &s.vel);
        let mut p = u.clone();
        p.axpy(1.0, &self.a_hh.apply(u, u));
        p.axpy(1.0, &self.b_hh.apply(ut, ut));
        p.axpy(1.0, &self.c_hh.apply(ut, u));
        let mut v = ut.clone();
        v.axpy(2.0, &self.a_hh.apply(ut, u));
        v.axpy(2.0, &self.b_hh.apply(utt, ut));
        v.axpy(1.0, &self.c_hh.apply(utt, u));
        v.axpy(1.0, &self.c_hh.apply(ut, ut));
        State {
            pos: p,
            vel: v,
            time: s.time,
        }
    }

    /// Linearized correction `(v_NF, ∂_t v_NF)` given `u_tt` and `v_tt`.
    pub fn nf_linearized(&self, u: &State, utt: &Field, v: &State, vtt: &Field) -> State {
        let (u0, u1) = (&u.pos, &u.vel);
        let (v0, v1) = (&v.pos, &v.vel);
        let mut p = v0.clone();
        p.axpy(1.0, &self.a_lin.apply(u0, v0));
        p.axpy(1.0, &self.b_lin.apply(u1, v1));
        p.axpy(1.0, &self.c_lin.apply(u1, v0));
        p.axpy(1.0, &self.d_lin.apply(u0, v1));
        let mut q = v1.clone();
        q.axpy(1.0, &self.a_lin.apply(u1, v0));
        q.axpy(1.0, &self.a_lin.apply(u0, v1));
        q.axpy(1.0, &self.b_lin.apply(utt, v1));
        q.axpy(1.0, &self.b_lin.apply(u1, vtt));
        q.axpy(1.0, &self.c_lin.apply(utt, v0));
        q.axpy(1.0, &self.c_lin.apply(u1, v1));
        q.axpy(1.0, &self.d_lin.apply(u1, v1));
        q.axpy(1.0, &self.d_lin.apply(u0, vtt));
        State {
            pos: p,
            vel: q,
            time: v.time,
        }
    }
}

/// `𝐮 = u + A(u,u) + B(u_t,u_t) + C(u_t,u)`.
pub fn apply_nf_full(state: &State, model: &ModelSpec) -> Result<Field> {
    let ctx = NfContext::new(model, state.grid())?;
    Ok(ctx.nf_full(state))
}

/// `(u_NF, ũ_NF)` with the high-high symbols.
pub fn apply_nf_hh(state: &State, model: &ModelSpec) -> Result<State> {
    let ctx = NfContext::new(model, state.grid())?;
    let utt = utt_from_state(state, model)?;
    Ok(ctx.nf_hh(state, &utt))
}

/// `v_tt` of the linearized flow along `u`.
pub fn vtt_linearized(
    v: &State,
    g01: &Field,
    g11m1: &Field,
    lin: &LinCoefficients,
    m: f64,
) -> Result<Field> {
    let (v0, v1) = (&v.pos, &v.vel);
    let mut out = v0.map_symbol(|xi| C64::new(-xi * xi - m, 0.0));
    out.axpy(2.0, &g01.mul(&v1.dx(), true)?);
    out.axpy(1.0, &g11m1.mul(&v0.dxx(), true)?);
    out.axpy(1.0, &lin.f0.mul(v1, true)?);
    out.axpy(1.0, &lin.f1.mul(&v0.dx(), true)?);
    out.axpy(1.0, &lin.f.mul(v0, true)?);
    Ok(out)
}

/// `(v_NF, ∂_t v_NF)` along the background `u`.
pub fn apply_nf_linearized(u: &State, v: &State, model: &ModelSpec) -> Result<State> {
    u.pos.same_grid(&v.pos)?;
    let ctx = NfContext::new(model, u.grid())?;
    let utt = utt_from_state(u, model)?;
    let (g01, g11m1) = crate::model::metric_fields(u, model)?;
    let lin = crate::model::linearized_coefficients(u, model)?;
    let vtt = vtt_linearized(v, &g01, &g11m1, &lin, model.m)?;
    Ok(ctx.nf_linearized(u, &utt, v, &vtt))
}
