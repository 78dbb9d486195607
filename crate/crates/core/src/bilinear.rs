//! Translation-invariant bilinear operators, Weyl paraproducts and frequency cutoffs.
//!
//! Every operator here acts on the symmetric band `|k| < n/2`: Nyquist inputs
//! are ignored and pair sums that leave the band are dropped, so outputs are
//! the exact (untruncated-in-range) convolution sums.

use std::fmt;
use std::sync::Arc;

use crate::error::{KgError, Result};
use crate::spectral::{jb, Field, Grid, C64};

const LH_INNER: f64 = 1.0 / 20.0;
const LH_OUTER: f64 = 1.0 / 10.0;

/// Low-high cutoff: 1 when `<ξ1> <= <ξ2>/20`, 0 when `<ξ1> >= <ξ2>/10`,
/// smoothstep in the ratio `<ξ1>/<ξ2>` in between.
pub fn chi_lh(xi1: f64, xi2: f64) -> f64 {
    let r = jb(xi1) / jb(xi2);
    if r <= LH_INNER {
        1.0
    } else if r >= LH_OUTER {
        0.0
    } else {
        let t = (r - LH_INNER) / (LH_OUTER - LH_INNER);
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

pub fn chi_hl(xi1: f64, xi2: f64) -> f64 {
    chi_lh(xi2, xi1)
}

pub fn chi_hh(xi1: f64, xi2: f64) -> f64 {
    1.0 - chi_lh(xi1, xi2) - chi_lh(xi2, xi1)
}

/// Weyl-quantized paraproduct cutoff `χ_lh(ξ1, ξ2 + ξ1/2)`.
pub fn chi_weyl(xi1: f64, xi2: f64) -> f64 {
    chi_lh(xi1, xi2 + 0.5 * xi1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Full,
    Lh,
    Hl,
    Hh,
}

impl Region {
    pub fn cutoff(self, xi1: f64, xi2: f64) -> f64 {
        match self {
            Region::Full => 1.0,
            Region::Lh => chi_lh(xi1, xi2),
            Region::Hl => chi_hl(xi1, xi2),
            Region::Hh => chi_hh(xi1, xi2),
        }
    }
}

type SymFn = dyn Fn(f64, f64) -> C64 + Send + Sync;

/// A symbol `b(ξ1, ξ2)` together with its reality flag and region tag.
#[derive(Clone)]
pub struct BilinearSymbol {
    eval: Arc<SymFn>,
    pub parity_real: bool,
    pub region: Region,
}

impl fmt::Debug for BilinearSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BilinearSymbol")
            .field("parity_real", &self.parity_real)
            .field("region", &self.region)
            .finish()
    }
}

impl BilinearSymbol {
    pub fn new(f: impl Fn(f64, f64) -> C64 + Send + Sync + 'static) -> Self {
        BilinearSymbol {
            eval: Arc::new(f),
            parity_real: true,
            region: Region::Full,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::new(move |_, _| c)
    }

    pub fn eval(&self, xi1: f64, xi2: f64) -> C64 {
        (self.eval)(xi1, xi2)
    }

    /// Multiplies by the cutoff of `region` and retags.
    pub fn restrict(&self, region: Region) -> Self {
        let inner = self.eval.clone();
        BilinearSymbol {
            eval: Arc::new(move |a, b| inner(a, b) * region.cutoff(a, b)),
            parity_real: self.parity_real,
            region,
        }
    }

    /// `(ξ1, ξ2) ↦ b(ξ2, ξ1)`, i.e. the same operator with arguments exchanged.
    pub fn swapped(&self) -> Self {
        let inner = self.eval.clone();
        let region = match self.region {
            Region::Lh => Region::Hl,
            Region::Hl => Region::Lh,
            r => r,
        };
        BilinearSymbol {
            eval: Arc::new(move |a, b| inner(b, a)),
            parity_real: self.parity_real,
            region,
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        let inner = self.eval.clone();
        BilinearSymbol {
            eval: Arc::new(move |a, b| inner(a, b) * c),
            ..self.clone()
        }
    }

    pub fn sum(&self, other: &BilinearSymbol) -> Self {
        let (p, q) = (self.eval.clone(), other.eval.clone());
        let region = if self.region == other.region {
            self.region
        } else {
            Region::Full
        };
        BilinearSymbol {
            eval: Arc::new(move |a, b| p(a, b) + q(a, b)),
            parity_real: self.parity_real && other.parity_real,
            region,
        }
    }

    pub fn tabulate(&self, grid: &Arc<Grid>) -> Result<SymbolTable> {
        SymbolTable::new(grid, |a, b| self.eval(a, b))
    }
}

/// Visits every in-band pair `(i, j)` and its output slot.
#[inline]
fn for_each_pair(grid: &Grid, mut visit: impl FnMut(usize, usize, usize)) {
    let n = grid.n() as i64;
    let h = n / 2;
    let slot = |k: i64| if k < 0 { (k + n) as usize } else { k as usize };
    for k1 in (-h + 1)..h {
        let i = slot(k1);
        let lo = (-h + 1).max(-h + 1 - k1);
        let hi = (h - 1).min(h - 1 - k1);
        for k2 in lo..=hi {
            visit(i, slot(k2), slot(k1 + k2));
        }
    }
}

fn dealias_in_place(grid: &Grid, out: &mut [C64]) {
    let cut = grid.dealias_cutoff();
    for (c, &k) in out.iter_mut().zip(grid.modes()) {
        if k.abs() > cut {
            *c = C64::new(0.0, 0.0);
        }
    }
}

/// A symbol sampled on all frequency pairs of one grid (row `ξ1`, column `ξ2`).
#[derive(Clone)]
pub struct SymbolTable {
    grid: Arc<Grid>,
    vals: Vec<C64>,
}

impl fmt::Debug for SymbolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolTable")
            .field("n", &self.grid.n())
            .finish()
    }
}

impl SymbolTable {
    pub fn new(grid: &Arc<Grid>, sym: impl Fn(f64, f64) -> C64) -> Result<Self> {
        let n = grid.n();
        let fr = grid.frequencies();
        let mut vals = vec![C64::new(0.0, 0.0); n * n];
        for (i, &a) in fr.iter().enumerate() {
            if i == n / 2 {
                continue;
            }
            for (j, &b) in fr.iter().enumerate() {
                if j == n / 2 {
                    continue;
                }
                let v = sym(a, b);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(KgError::NonFiniteBilinear(a, b));
                }
                vals[i * n + j] = v;
            }
        }
        Ok(SymbolTable {
            grid: grid.clone(),
            vals,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.vals[i * self.grid.n() + j]
    }

    /// Pointwise product with a real weight table of the same layout.
    pub fn weighted(&self, w: &[f64]) -> SymbolTable {
        SymbolTable {
            grid: self.grid.clone(),
            vals: self.vals.iter().zip(w).map(|(v, &x)| v * x).collect(),
        }
    }

    pub fn lh(&self) -> SymbolTable {
        self.weighted(chi_lh_table(&self.grid))
    }

    pub fn hl(&self) -> SymbolTable {
        self.weighted(&chi_hl_table(&self.grid))
    }

    pub fn hh(&self) -> SymbolTable {
        self.weighted(chi_hh_table(&self.grid))
    }

    pub fn add(&self, other: &SymbolTable) -> SymbolTable {
        SymbolTable {
            grid: self.grid.clone(),
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> SymbolTable {
        SymbolTable {
            grid: self.grid.clone(),
            vals: self.vals.iter().map(|a| a * c).collect(),
        }
    }

    /// The table of `(ξ1, ξ2) ↦ b(ξ2, ξ1)`.
    pub fn transposed(&self) -> SymbolTable {
        let n = self.grid.n();
        let mut vals = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                vals[i * n + j] = self.vals[j * n + i];
            }
        }
        SymbolTable {
            grid: self.grid.clone(),
            vals,
        }
    }

    /// Direct double sum `Σ_{ξ1+ξ2=ζ} b(ξ1,ξ2) f̂(ξ1) ĝ(ξ2)`.
    pub fn apply(&self, f: &Field, g: &Field) -> Field {
        let n = self.grid.n();
        let (fc, gc) = (f.coeffs(), g.coeffs());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for_each_pair(&self.grid, |i, j, k| {
            out[k] += self.vals[i * n + j] * fc[i] * gc[j];
        });
        Field::from_coeffs(&self.grid, out).expect("length n")
    }

    pub fn apply_checked(&self, f: &Field, g: &Field) -> Result<Field> {
        f.same_grid(g)?;
        if **f.grid() != *self.grid {
            return Err(KgError::GridMismatch);
        }
        Ok(self.apply(f, g))
    }
}

pub(crate) fn chi_lh_table(grid: &Arc<Grid>) -> &[f64] {
    grid.cache.chi_lh.get_or_init(|| {
        let fr = grid.frequencies();
        fr.iter()
            .flat_map(|&a| fr.iter().map(move |&b| chi_lh(a, b)))
            .collect()
    })
}

fn chi_hl_table(grid: &Arc<Grid>) -> Vec<f64> {
    let n = grid.n();
    let lh = chi_lh_table(grid);
    (0..n * n).map(|ij| lh[(ij % n) * n + ij / n]).collect()
}

pub(crate) fn chi_hh_table(grid: &Arc<Grid>) -> &[f64] {
    grid.cache.chi_hh.get_or_init(|| {
        let fr = grid.frequencies();
        fr.iter()
            .flat_map(|&a| fr.iter().map(move |&b| chi_hh(a, b)))
            .collect()
    })
}

/// Reference semantics of a bilinear operator: the O(n²) direct sum.
pub fn apply_bilinear(sym: &BilinearSymbol, f: &Field, g: &Field, dealias: bool) -> Result<Field> {
    f.same_grid(g)?;
    let grid = f.grid().clone();
    let fr = grid.frequencies();
    let (fc, gc) = (f.coeffs(), g.coeffs());
    let mut out = vec![C64::new(0.0, 0.0); grid.n()];
    let mut bad = None;
    for_each_pair(&grid, |i, j, k| {
        let v = sym.eval(fr[i], fr[j]);
        if !(v.re.is_finite() && v.im.is_finite()) {
            bad.get_or_insert((fr[i], fr[j]));
        }
        out[k] += v * fc[i] * gc[j];
    });
    if let Some((a, b)) = bad {
        return Err(KgError::NonFiniteBilinear(a, b));
    }
    if dealias {
        dealias_in_place(&grid, &mut out);
    }
    Field::from_coeffs(&grid, out)
}

fn para_kernel(grid: &Arc<Grid>) -> &[(u32, u32, f64)] {
    grid.cache.para_kernel.get_or_init(|| {
        let fr = grid.frequencies();
        let mut ker = Vec::new();
        for_each_pair(grid, |i, j, k| {
            let w = chi_weyl(fr[i], fr[j]);
            if w > 0.0 {
                ker.push((i as u32, j as u32, w));
                let _ = k;
            }
        });
        ker
    })
}

/// Weyl paraproduct `T_f g`, summed over the support of its cutoff only.
pub fn paraproduct(f: &Field, g: &Field) -> Result<Field> {
    f.same_grid(g)?;
    Ok(paraproduct_unchecked(f, g))
}

pub(crate) fn paraproduct_unchecked(f: &Field, g: &Field) -> Field {
    let grid = f.grid();
    let n = grid.n();
    let modes = grid.modes();
    let (fc, gc) = (f.coeffs(), g.coeffs());
    let mut out = vec![C64::new(0.0, 0.0); n];
    for &(i, j, w) in para_kernel(grid) {
        let (i, j) = (i as usize, j as usize);
        let k = modes[i] + modes[j];
        let slot = if k < 0 {
            (k + n as i64) as usize
        } else {
            k as usize
        };
        out[slot] += fc[i] * gc[j] * w;
    }
    Field::from_coeffs(grid, out).expect("length n")
}

/// `T_{c + h} g = c g + T_h g` with the constant part applied exactly.
pub fn paraproduct_shifted(c: f64, h: &Field, g: &Field) -> Field {
    let mut out = paraproduct_unchecked(h, g);
    out.axpy(c, g);
    out
}

/// Symbol of the balanced product `Π(f, g) = fg - T_f g - T_g f`.
pub fn balanced_symbol() -> BilinearSymbol {
    let mut s = BilinearSymbol::new(|a, b| C64::new(1.0 - chi_weyl(a, b) - chi_weyl(b, a), 0.0));
    s.region = Region::Hh;
    s
}

pub fn balanced_product(f: &Field, g: &Field) -> Result<Field> {
    apply_bilinear(&balanced_symbol(), f, g, false)
}

type MulFn = dyn Fn(f64) -> C64 + Send + Sync;

/// One term `ξ1^j b(ξ1) c(ξ2)` of a separable low-high symbol.
#[derive(Clone)]
pub struct SeparableTerm {
    pub power: u32,
    pub low: Arc<MulFn>,
    pub high: Arc<MulFn>,
}

impl SeparableTerm {
    pub fn new(
        power: u32,
        low: impl Fn(f64) -> C64 + Send + Sync + 'static,
        high: impl Fn(f64) -> C64 + Send + Sync + 'static,
    ) -> Self {
        SeparableTerm {
            power,
            low: Arc::new(low),
            high: Arc::new(high),
        }
    }
}

/// `Σ_j ξ1^j b_j(ξ1) c_j(ξ2) · χ_lh(ξ1, ξ2 + ξ1/2)`.
#[derive(Clone)]
pub struct SeparableSymbol {
    pub terms: Vec<SeparableTerm>,
}

impl SeparableSymbol {
    pub fn new(terms: Vec<SeparableTerm>) -> Self {
        SeparableSymbol { terms }
    }

    pub fn eval(&self, xi1: f64, xi2: f64) -> C64 {
        let s: C64 = self
            .terms
            .iter()
            .map(|t| (t.low)(xi1) * (t.high)(xi2) * xi1.powi(t.power as i32))
            .sum();
        s * chi_weyl(xi1, xi2)
    }

    pub fn to_symbol(&self) -> BilinearSymbol {
        let me = self.clone();
        let mut s = BilinearSymbol::new(move |a, b| me.eval(a, b));
        s.region = Region::Lh;
        s
    }
}

/// Evaluates a separable symbol as a sum of multiplier-then-paraproduct terms.
pub fn apply_bilinear_fast(sym: &SeparableSymbol, f: &Field, g: &Field) -> Result<Field> {
    if sym.terms.is_empty() {
        return Err(KgError::Invalid("separable symbol has no terms".into()));
    }
    f.same_grid(g)?;
    let mut out = Field::zeros(f.grid());
    for t in &sym.terms {
        let p = t.power as i32;
        let low = t.low.clone();
        let fl = crate::spectral::apply_multiplier(f, move |xi| low(xi) * xi.powi(p))?;
        let high = t.high.clone();
        let gh = crate::spectral::apply_multiplier(g, move |xi| high(xi))?;
        out.axpy(1.0, &paraproduct_unchecked(&fl, &gh));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_examples() {
        assert_eq!(chi_lh(1.0, 40.0), 1.0);
        assert_eq!(chi_lh(5.0, 5.0), 0.0);
        assert_eq!(chi_hh(5.0, 5.0), 1.0);
        assert_eq!(chi_lh(0.0, 0.0), 0.0);
        assert_eq!(chi_hh(0.0, 0.0), 1.0);
    }

    #[test]
    fn cutoff_is_monotone_in_ratio() {
        let mut prev = 1.0;
        for k in 0..200 {
            let x1 = 0.05 * k as f64;
            let c = chi_lh(x1, 100.0);
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }
}
