//! Periodic grids, Fourier fields and the multiplier / Littlewood-Paley substrate.
//!
//! Coefficients are stored in FFT order and scaled by `1/n`, so `cos(kx)`
//! has coefficient `1/2` at `±k`. The Nyquist mode is kept real.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{KgError, Result};

pub type C64 = Complex64;

/// Lazily built per-grid tables shared by the bilinear machinery.
#[derive(Default)]
pub(crate) struct GridCache {
    pub(crate) chi_lh: OnceLock<Vec<f64>>,
    pub(crate) chi_hh: OnceLock<Vec<f64>>,
    pub(crate) para_kernel: OnceLock<Vec<(u32, u32, f64)>>,
}

pub struct Grid {
    n: usize,
    length: f64,
    freqs: Vec<f64>,
    modes: Vec<i64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    pub(crate) cache: GridCache,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

/// Builds a periodic grid of `n` points on `[0, length)`.
pub fn make_grid(n: usize, length: f64) -> Result<Arc<Grid>> {
    if n < 16 || !n.is_power_of_two() {
        return Err(KgError::BadGridSize(n));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(KgError::BadLength(length));
    }
    let dk = 2.0 * std::f64::consts::PI / length;
    let modes: Vec<i64> = (0..n)
        .map(|i| {
            if i < n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            }
        })
        .collect();
    let freqs = modes.iter().map(|&k| k as f64 * dk).collect();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    Ok(Arc::new(Grid {
        n,
        length,
        freqs,
        modes,
        fwd,
        inv,
        cache: GridCache::default(),
    }))
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Wavenumbers in FFT order.
    pub fn frequencies(&self) -> &[f64] {
        &self.freqs
    }

    /// Integer mode numbers in FFT order (`-n/2` is the Nyquist slot).
    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| j as f64 * self.dx()).collect()
    }

    /// FFT slot of integer mode `k`, if representable.
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if k < -h || k >= h {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Largest retained mode under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }
}

/// Japanese bracket `<xi> = (1 + xi^2)^(1/2)`.
#[inline]
pub fn jb(xi: f64) -> f64 {
    (1.0 + xi * xi).sqrt()
}

#[derive(Clone, PartialEq)]
pub struct Field {
    grid: Arc<Grid>,
    coeffs: Vec<C64>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("n", &self.grid.n)
            .field("l2", &self.l2_norm())
            .finish()
    }
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Field {
        Field {
            grid: grid.clone(),
            coeffs: vec![C64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn from_coeffs(grid: &Arc<Grid>, coeffs: Vec<C64>) -> Result<Field> {
        if coeffs.len() != grid.n {
            return Err(KgError::LengthMismatch {
                expected: grid.n,
                got: coeffs.len(),
            });
        }
        Ok(Field {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Field with the given amplitude on integer mode `k` only (and its mirror).
    pub fn mode(grid: &Arc<Grid>, k: i64, amp: C64) -> Field {
        let mut f = Field::zeros(grid);
        if let Some(i) = grid.index_of(k) {
            f.coeffs[i] += amp;
        }
        if k != 0 {
            if let Some(j) = grid.index_of(-k) {
                f.coeffs[j] += amp.conj();
            }
        }
        f
    }

    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut(f64) -> f64) -> Field {
        let xs: Vec<f64> = grid.points().into_iter().map(|x| f(x)).collect();
        to_spectral(&xs, grid).expect("length matches by construction")
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn same_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(KgError::GridMismatch)
        }
    }

    pub fn to_physical(&self) -> Vec<f64> {
        to_physical(self)
    }

    pub fn scale(&self, a: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Field) {
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `∂_x`.
    pub fn dx(&self) -> Field {
        self.map_symbol(|xi| C64::new(0.0, xi))
    }

    /// `∂_x^2`.
    pub fn dxx(&self) -> Field {
        self.map_symbol(|xi| C64::new(-xi * xi, 0.0))
    }

    /// `∂_x^{-1}` with the zero mode removed.
    pub fn dx_inv(&self) -> Field {
        self.map_symbol(|xi| {
            if xi == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, -1.0 / xi)
            }
        })
    }

    /// `<D>^s`.
    pub fn jpow(&self, s: f64) -> Field {
        self.map_symbol(|xi| C64::new(jb(xi).powf(s), 0.0))
    }

    /// Multiplier application for symbols known to be finite.
    pub fn map_symbol(&self, sym: impl Fn(f64) -> C64) -> Field {
        apply_multiplier(self, sym).expect("finite symbol")
    }

    /// Zeroes every mode with `|k| > n/3`, plus the Nyquist slot.
    pub fn dealiased(&self) -> Field {
        let cut = self.grid.dealias_cutoff();
        let mut out = self.clone();
        for (c, &k) in out.coeffs.iter_mut().zip(self.grid.modes()) {
            if k.abs() > cut {
                *c = C64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Pointwise product, optionally filtered by the 2/3 rule.
    pub fn mul(&self, other: &Field, dealias: bool) -> Result<Field> {
        self.same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let p: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let f = to_spectral(&p, &self.grid)?;
        Ok(if dealias { f.dealiased() } else { f })
    }

    /// `∫ f g dx` over one period for real fields.
    pub fn inner(&self, other: &Field) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        s * self.grid.length
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.to_physical()
            .iter()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Largest conjugate-symmetry defect, relative to the largest coefficient.
    pub fn reality_defect(&self) -> f64 {
        let n = self.grid.n;
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut d = self.coeffs[n / 2].im.abs().max(self.coeffs[0].im.abs());
        for i in 1..n / 2 {
            d = d.max((self.coeffs[i] - self.coeffs[n - i].conj()).norm());
        }
        d / scale
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, a: f64) -> Field {
        self.scale(a)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale(-1.0)
    }
}

/// Cauchy pair `(u, u_t)` at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub pos: Field,
    pub vel: Field,
    pub time: f64,
}

impl State {
    pub fn new(pos: Field, vel: Field, time: f64) -> Result<State> {
        pos.same_grid(&vel)?;
        Ok(State { pos, vel, time })
    }

    pub fn zeros(grid: &Arc<Grid>) -> State {
        State {
            pos: Field::zeros(grid),
            vel: Field::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.pos.grid()
    }

    pub fn scale(&self, a: f64) -> State {
        State {
            pos: self.pos.scale(a),
            vel: self.vel.scale(a),
            time: self.time,
        }
    }

    pub fn diff(&self, other: &State) -> State {
        State {
            pos: &self.pos - &other.pos,
            vel: &self.vel - &other.vel,
            time: self.time,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.pos.is_finite() && self.vel.is_finite()
    }
}

pub fn to_spectral(samples: &[f64], grid: &Arc<Grid>) -> Result<Field> {
    let n = grid.n;
    if samples.len() != n {
        return Err(KgError::LengthMismatch {
            expected: n,
            got: samples.len(),
        });
    }
    let mut buf: Vec<C64> = samples.iter().map(|&x| C64::new(x, 0.0)).collect();
    grid.fwd.process(&mut buf);
    let inv_n = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= inv_n;
    }
    buf[n / 2].im = 0.0;
    Ok(Field {
        grid: grid.clone(),
        coeffs: buf,
    })
}

pub fn to_physical(field: &Field) -> Vec<f64> {
    let mut buf = field.coeffs.clone();
    field.grid.inv.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Applies a Fourier multiplier. At the Nyquist slot the symbol is replaced
/// by its even part `(m(ξ) + m(-ξ))/2`, which keeps odd symbols such as
/// `iξ` from producing a non-real Nyquist coefficient.
pub fn apply_multiplier(field: &Field, symbol: impl Fn(f64) -> C64) -> Result<Field> {
    let g = &field.grid;
    let mut out = Vec::with_capacity(g.n);
    for (i, (&c, &xi)) in field.coeffs.iter().zip(&g.freqs).enumerate() {
        let m = if i == g.n / 2 {
            (symbol(xi) + symbol(-xi)) * 0.5
        } else {
            symbol(xi)
        };
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(KgError::NonFiniteSymbol(xi));
        }
        out.push(m * c);
    }
    Ok(Field {
        grid: g.clone(),
        coeffs: out,
    })
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Low-pass profile: 1 for `<ξ> <= 2^k`, 0 for `<ξ> >= 2^(k+1)`.
pub fn lp_low(xi: f64, k: i32) -> f64 {
    1.0 - smoothstep(jb(xi).log2() - k as f64)
}

/// Dyadic bump `ψ_k`; the `ψ_k` sum to one.
pub fn lp_weight(xi: f64, k: u32) -> f64 {
    if k == 0 {
        lp_low(xi, 0)
    } else {
        lp_low(xi, k as i32) - lp_low(xi, k as i32 - 1)
    }
}

pub fn lp_project(field: &Field, k: u32) -> Field {
    field.map_symbol(|xi| C64::new(lp_weight(xi, k), 0.0))
}

/// `(‖<D>^s u‖² + ‖<D>^{s-1} u_t‖²)^{1/2}`.
pub fn sobolev_norm(state: &State, s: f64) -> f64 {
    let a = weighted_l2_sq(&state.pos, s);
    let b = weighted_l2_sq(&state.vel, s - 1.0);
    (a + b).sqrt()
}

pub(crate) fn weighted_l2_sq(f: &Field, s: f64) -> f64 {
    let g = f.grid();
    let sum: f64 = f
        .coeffs()
        .iter()
        .zip(g.frequencies())
        .map(|(c, &xi)| (1.0 + xi * xi).powf(s) * c.norm_sqr())
        .sum();
    sum * g.length()
}

/// `A_k = ‖u‖_∞ + ‖∂u‖_{W^{k,∞}}` with `∂u = (u_t, u_x)` and
/// `‖g‖_{W^{k,∞}} = ‖g‖_∞ + max_{1≤j≤k} ‖∂_x^j g‖_∞`.
pub fn control_params(state: &State, k: usize) -> f64 {
    let mut ut = state.vel.clone();
    let mut ux = state.pos.dx();
    let base = ut.sup_norm().max(ux.sup_norm());
    let mut top = 0.0_f64;
    for _ in 0..k {
        ut = ut.dx();
        ux = ux.dx();
        top = top.max(ut.sup_norm()).max(ux.sup_norm());
    }
    state.pos.sup_norm() + base + top
}
