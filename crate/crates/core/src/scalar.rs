//! Scalar functions on the real line: a closed-form Gaussian-polynomial
//! backend and a uniform-grid backend.
//!
//! The classical Fourier transform is `f̂(ζ) = ∫ f(x) e^{-iζx} dx`, with
//! inverse `f(x) = (1/2π) ∫ f̂(ζ) e^{iζx} dζ`. Convolution is
//! `(f*g)(x) = ∫ f(y) g(x-y) dy`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Grid differentiation orders above this are flagged as imprecise.
pub const GRID_DIFF_LIMIT: u32 = 8;

fn horner(poly: &[Complex64], x: Complex64) -> Complex64 {
    poly.iter().rev().fold(ZERO, |acc, c| acc * x + c)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Coefficients of `p(x - s)`.
fn poly_shift(p: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut out = vec![ZERO; p.len()];
    for (k, &pk) in p.iter().enumerate() {
        // (x - s)^k = Σ_j C(k,j) x^j (-s)^{k-j}
        let mut binom = 1.0;
        for j in (0..=k).rev() {
            out[j] += pk * binom * (-s).powu((k - j) as u32);
            binom = binom * j as f64 / (k - j + 1) as f64;
        }
    }
    out
}

fn trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
    while p.last() == Some(&ZERO) {
        p.pop();
    }
    p
}

/// One term `p(x) e^{-α(x-μ)²}` with `Re α > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussTerm {
    /// Coefficients of `p` in powers of `x`, lowest first.
    pub poly: Vec<Complex64>,
    pub alpha: Complex64,
    pub mu: Complex64,
}

impl GaussTerm {
    pub fn new(poly: Vec<Complex64>, alpha: Complex64, mu: Complex64) -> Result<Self> {
        if !(alpha.re > 0.0) || !alpha.im.is_finite() || !mu.re.is_finite() || !mu.im.is_finite() {
            return Err(Error::Invalid(format!("gaussian term needs Re(alpha) > 0, got alpha = {alpha}")));
        }
        if poly.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("non-finite polynomial coefficient".into()));
        }
        Ok(GaussTerm { poly, alpha, mu })
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let d = x - self.mu;
        horner(&self.poly, x) * (-self.alpha * d * d).exp()
    }

    fn derivative(&self) -> GaussTerm {
        // p' - 2α(x - μ) p
        let p = &self.poly;
        let mut q = vec![ZERO; p.len() + 1];
        for k in 1..p.len() {
            q[k - 1] += p[k] * k as f64;
        }
        for (k, &pk) in p.iter().enumerate() {
            q[k + 1] -= pk * self.alpha * 2.0;
            q[k] += pk * self.alpha * self.mu * 2.0;
        }
        GaussTerm { poly: trim(q), alpha: self.alpha, mu: self.mu }
    }

    fn mul(&self, other: &GaussTerm) -> GaussTerm {
        let s = self.alpha + other.alpha;
        let kappa = (self.alpha * self.mu + other.alpha * other.mu) / s;
        let dm = self.mu - other.mu;
        let c = (-self.alpha * other.alpha / s * dm * dm).exp();
        let poly = poly_mul(&self.poly, &other.poly).into_iter().map(|v| v * c).collect();
        GaussTerm { poly, alpha: s, mu: kappa }
    }

    fn integral(&self) -> Complex64 {
        // substitute y = x - μ; ∫ y^{2m} e^{-αy²} dy = Γ(m + 1/2) α^{-(m + 1/2)}
        let q = poly_shift(&self.poly, -self.mu);
        let root = self.alpha.sqrt();
        let mut gamma = PI.sqrt();
        let mut acc = ZERO;
        for (j, c) in q.iter().enumerate() {
            if j % 2 == 0 {
                acc += c * gamma / root.powu(j as u32 + 1);
                gamma *= j as f64 / 2.0 + 0.5;
            }
        }
        acc
    }

    fn fourier(&self) -> GaussTerm {
        let a = self.alpha;
        let base = GaussTerm {
            poly: vec![(Complex64::new(PI, 0.0) / a).sqrt() * (-a * self.mu * self.mu).exp()],
            alpha: ONE / (a * 4.0),
            mu: -I * a * self.mu * 2.0,
        };
        // FT(x^k g) = (i d/dζ)^k ĝ
        let mut acc: Vec<Complex64> = Vec::new();
        let mut cur = base.clone();
        for (k, &pk) in self.poly.iter().enumerate() {
            if k > 0 {
                cur = cur.derivative();
                cur.poly.iter_mut().for_each(|v| *v *= I);
            }
            if acc.len() < cur.poly.len() {
                acc.resize(cur.poly.len(), ZERO);
            }
            for (a, v) in acc.iter_mut().zip(&cur.poly) {
                *a += pk * v;
            }
        }
        GaussTerm { poly: trim(acc), alpha: base.alpha, mu: base.mu }
    }

    /// Center and half-width of the region where the term is non-negligible.
    fn window(&self) -> (f64, f64) {
        let a = self.alpha.re;
        let center = self.mu.re - self.alpha.im * self.mu.im / a;
        let deg = self.poly.len().saturating_sub(1) as f64;
        let half = ((80.0 + 4.0 * deg) / a).sqrt() + deg / a.sqrt();
        (center, half)
    }
}

/// A finite sum of Gaussian-polynomial terms.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GaussPoly {
    pub terms: Vec<GaussTerm>,
}

impl GaussPoly {
    pub fn new(terms: Vec<GaussTerm>) -> Self {
        GaussPoly { terms }
    }

    /// The Gaussian `c e^{-α(x-μ)²}` with real `α` and `μ`.
    pub fn gaussian(c: Complex64, alpha: f64, mu: f64) -> Result<Self> {
        Ok(GaussPoly { terms: vec![GaussTerm::new(vec![c], Complex64::new(alpha, 0.0), Complex64::new(mu, 0.0))?] })
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn derivative(&self) -> GaussPoly {
        GaussPoly { terms: self.terms.iter().map(GaussTerm::derivative).collect() }
    }

    pub fn translate(&self, s: f64) -> GaussPoly {
        let s = Complex64::new(s, 0.0);
        GaussPoly {
            terms: self
                .terms
                .iter()
                .map(|t| GaussTerm { poly: poly_shift(&t.poly, s), alpha: t.alpha, mu: t.mu + s })
                .collect(),
        }
    }

    /// `x ↦ f(-x)`.
    pub fn reflect(&self) -> GaussPoly {
        GaussPoly {
            terms: self
                .terms
                .iter()
                .map(|t| GaussTerm {
                    poly: t.poly.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c } else { -c }).collect(),
                    alpha: t.alpha,
                    mu: -t.mu,
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> GaussPoly {
        if c == ZERO {
            return GaussPoly::default();
        }
        GaussPoly {
            terms: self
                .terms
                .iter()
                .map(|t| GaussTerm { poly: t.poly.iter().map(|v| v * c).collect(), alpha: t.alpha, mu: t.mu })
                .collect(),
        }
    }

    /// Sum, merging terms with identical `(α, μ)`.
    pub fn add(&self, other: &GaussPoly) -> GaussPoly {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            match terms.iter_mut().find(|s| s.alpha == t.alpha && s.mu == t.mu) {
                Some(s) => {
                    if s.poly.len() < t.poly.len() {
                        s.poly.resize(t.poly.len(), ZERO);
                    }
                    for (a, b) in s.poly.iter_mut().zip(&t.poly) {
                        *a += b;
                    }
                }
                None => terms.push(t.clone()),
            }
        }
        terms.retain(|t| t.poly.iter().any(|c| *c != ZERO));
        GaussPoly { terms }
    }

    pub fn mul(&self, other: &GaussPoly) -> GaussPoly {
        let mut out = GaussPoly::default();
        for a in &self.terms {
            for b in &other.terms {
                out = out.add(&GaussPoly { terms: vec![a.mul(b)] });
            }
        }
        out
    }

    /// `∫_ℝ f`.
    pub fn integral(&self) -> Complex64 {
        self.terms.iter().map(GaussTerm::integral).sum()
    }

    /// The classical transform `f̂`, as a Gaussian polynomial in `ζ`.
    pub fn fourier(&self) -> GaussPoly {
        GaussPoly { terms: self.terms.iter().map(GaussTerm::fourier).collect() }
    }

    /// The inverse transform `(1/2π) ∫ A(ζ) e^{iζx} dζ`.
    pub fn inverse_fourier(&self) -> GaussPoly {
        self.fourier().reflect().scale(Complex64::new(1.0 / (2.0 * PI), 0.0))
    }

    /// `f * g` in closed form.
    pub fn convolve(&self, other: &GaussPoly) -> GaussPoly {
        self.fourier().mul(&other.fourier()).inverse_fourier()
    }

    /// Multiplication by `x^k`.
    pub fn mul_x_pow(&self, k: usize) -> GaussPoly {
        GaussPoly {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut poly = vec![ZERO; k];
                    poly.extend_from_slice(&t.poly);
                    GaussTerm { poly, alpha: t.alpha, mu: t.mu }
                })
                .collect(),
        }
    }

    /// An interval outside of which the function is negligible.
    pub fn window(&self) -> Option<(f64, f64)> {
        self.terms.iter().map(GaussTerm::window).fold(None, |acc, (c, h)| {
            let (lo, hi) = (c - h, c + h);
            Some(match acc {
                None => (lo, hi),
                Some((a, b)) => (f64::min(a, lo), f64::max(b, hi)),
            })
        })
    }

    /// Samples on `x0 + k dx`, `k < m`.
    pub fn sample(&self, x0: f64, dx: f64, m: usize) -> Vec<Complex64> {
        (0..m).map(|k| self.eval(Complex64::new(x0 + k as f64 * dx, 0.0))).collect()
    }
}

/// Uniform samples `values[k] = f(x0 + k·dx)`; zero outside the window.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<Complex64>,
    /// Declared support interval, when known.
    pub support: Option<(f64, f64)>,
    diff_order: u32,
}

impl GridFn {
    pub fn new(x0: f64, dx: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(dx > 0.0) || !dx.is_finite() || !x0.is_finite() {
            return Err(Error::Invalid(format!("grid needs finite x0 and dx > 0, got x0 = {x0}, dx = {dx}")));
        }
        if values.len() < 8 {
            return Err(Error::Invalid(format!("grid needs at least 8 samples, got {}", values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Invalid("non-finite grid value".into()));
        }
        Ok(GridFn { x0, dx, values, support: None, diff_order: 0 })
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    /// Samples `f` on a grid.
    pub fn from_fn(x0: f64, dx: f64, m: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(x0, dx, (0..m).map(|k| f(x0 + k as f64 * dx)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn x_end(&self) -> f64 {
        self.x(self.values.len() - 1)
    }

    /// Total number of differentiations applied.
    pub fn diff_order(&self) -> u32 {
        self.diff_order
    }

    /// True once more than [`GRID_DIFF_LIMIT`] finite-difference derivatives were taken.
    pub fn precision_warning(&self) -> bool {
        self.diff_order > GRID_DIFF_LIMIT
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Whether the edge samples are below `1e-10` of the maximum.
    pub fn decays(&self) -> bool {
        let m = self.max_abs();
        let n = self.values.len();
        let edge = [0, 1, n - 2, n - 1].iter().map(|&k| self.values[k].norm()).fold(0.0, f64::max);
        edge <= 1e-10 * m
    }

    /// Linear interpolation; zero outside the window.
    pub fn value_at(&self, x: f64) -> Complex64 {
        let t = (x - self.x0) / self.dx;
        let n = self.values.len();
        if t < -1e-9 || t > (n - 1) as f64 + 1e-9 {
            return ZERO;
        }
        let k = (t.floor().max(0.0) as usize).min(n - 1);
        let frac = t - k as f64;
        if k + 1 >= n || frac.abs() < 1e-12 {
            return self.values[k];
        }
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    /// Fourth-order central differences with zero extension.
    pub fn derivative(&self) -> GridFn {
        let v = &self.values;
        let n = v.len();
        let get = |k: isize| if k < 0 || k as usize >= n { ZERO } else { v[k as usize] };
        let h = 1.0 / (12.0 * self.dx);
        let values = (0..n as isize)
            .map(|k| (get(k - 2) - get(k - 1) * 8.0 + get(k + 1) * 8.0 - get(k + 2)) * h)
            .collect();
        GridFn {
            x0: self.x0,
            dx: self.dx,
            values,
            support: self.support.map(|(a, b)| (a - 2.0 * self.dx, b + 2.0 * self.dx)),
            diff_order: self.diff_order + 1,
        }
    }

    pub fn translate(&self, s: f64) -> GridFn {
        let mut out = self.clone();
        out.x0 += s;
        out.support = self.support.map(|(a, b)| (a + s, b + s));
        out
    }

    pub fn reflect(&self) -> GridFn {
        let mut values = self.values.clone();
        values.reverse();
        GridFn {
            x0: -self.x_end(),
            dx: self.dx,
            values,
            support: self.support.map(|(a, b)| (-b, -a)),
            diff_order: self.diff_order,
        }
    }

    pub fn scale(&self, c: Complex64) -> GridFn {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Offset of `other`'s first sample in units of `dx`, if the grids align.
    fn offset_to(&self, other: &GridFn) -> Result<isize> {
        if (self.dx - other.dx).abs() > 1e-12 * self.dx {
            return Err(Error::Backend(format!("grid spacings differ: {} vs {}", self.dx, other.dx)));
        }
        let t = (other.x0 - self.x0) / self.dx;
        let r = t.round();
        if (t - r).abs() > 1e-6 {
            return Err(Error::Backend(format!("grids are not aligned (offset {t} samples)")));
        }
        Ok(r as isize)
    }

    /// Both functions on the union window.
    fn union(&self, other: &GridFn) -> Result<(f64, Vec<Complex64>, Vec<Complex64>)> {
        let off = self.offset_to(other)?;
        let start = off.min(0);
        let end = (self.values.len() as isize).max(off + other.values.len() as isize);
        let len = (end - start) as usize;
        let mut a = vec![ZERO; len];
        let mut b = vec![ZERO; len];
        for (k, v) in self.values.iter().enumerate() {
            a[(k as isize - start) as usize] = *v;
        }
        for (k, v) in other.values.iter().enumerate() {
            b[(k as isize + off - start) as usize] = *v;
        }
        Ok((self.x0 + start as f64 * self.dx, a, b))
    }

    fn combine_support(&self, other: &GridFn, f: fn((f64, f64), (f64, f64)) -> (f64, f64)) -> Option<(f64, f64)> {
        match (self.support, other.support) {
            (Some(a), Some(b)) => Some(f(a, b)),
            _ => None,
        }
    }

    pub fn add(&self, other: &GridFn) -> Result<GridFn> {
        let (x0, a, b) = self.union(other)?;
        let values = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        Ok(GridFn {
            x0,
            dx: self.dx,
            values,
            support: self.combine_support(other, |a, b| (a.0.min(b.0), a.1.max(b.1))),
            diff_order: self.diff_order.max(other.diff_order),
        })
    }

    pub fn mul(&self, other: &GridFn) -> Result<GridFn> {
        let (x0, a, b) = self.union(other)?;
        let values = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        Ok(GridFn {
            x0,
            dx: self.dx,
            values,
            support: self.combine_support(other, |a, b| (a.0.max(b.0), a.1.min(b.1))),
            diff_order: self.diff_order.max(other.diff_order),
        })
    }

    /// Trapezoid rule over the window.
    pub fn integral(&self) -> Complex64 {
        let n = self.values.len();
        let s: Complex64 = self.values.iter().sum();
        (s - (self.values[0] + self.values[n - 1]) * 0.5) * self.dx
    }

    /// `∫ f(x) e^{-iζx} dx` by the trapezoid rule, at any complex `ζ`.
    pub fn fourier_at(&self, zeta: Complex64) -> Complex64 {
        let n = self.values.len();
        let step = (-I * zeta * self.dx).exp();
        let mut acc = ZERO;
        let mut phase = ONE;
        for (k, v) in self.values.iter().enumerate() {
            if k % 32 == 0 {
                phase = (-I * zeta * self.x(k)).exp();
            }
            let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            acc += v * phase * w;
            phase *= step;
        }
        acc * self.dx
    }

    /// Direct-sum convolution on the Minkowski-sum window.
    pub fn convolve(&self, other: &GridFn) -> Result<GridFn> {
        if (self.dx - other.dx).abs() > 1e-12 * self.dx {
            return Err(Error::Backend(format!("grid spacings differ: {} vs {}", self.dx, other.dx)));
        }
        let (na, nb) = (self.values.len(), other.values.len());
        let mut values = vec![ZERO; na + nb - 1];
        for (i, a) in self.values.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.values.iter().enumerate() {
                values[i + j] += a * b;
            }
        }
        values.iter_mut().for_each(|v| *v *= self.dx);
        Ok(GridFn {
            x0: self.x0 + other.x0,
            dx: self.dx,
            values,
            support: self.combine_support(other, |a, b| (a.0 + b.0, a.1 + b.1)),
            diff_order: self.diff_order.max(other.diff_order),
        })
    }

    /// Keeps only samples inside `[lo, hi]` (rounded outward to the grid).
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<GridFn> {
        let n = self.values.len() as isize;
        let a = (((lo - self.x0) / self.dx).floor() as isize).clamp(0, n - 1);
        let b = (((hi - self.x0) / self.dx).ceil() as isize).clamp(a, n - 1);
        let mut vals: Vec<Complex64> = self.values[a as usize..=b as usize].to_vec();
        while vals.len() < 8 {
            vals.push(ZERO);
        }
        let mut out = GridFn::new(self.x(a as usize), self.dx, vals)?;
        out.support = self.support;
        out.diff_order = self.diff_order;
        Ok(out)
    }
}

/// Default sampling window `[x0, x1)` with `samples` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    pub x0: f64,
    pub x1: f64,
    pub samples: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { x0: -16.0, x1: 16.0, samples: 2048 }
    }
}

/// Name of the environment variable holding `x0,x1,samples`.
pub const GRID_ENV: &str = "HCFT_DEFAULT_GRID";

impl GridConfig {
    pub fn new(x0: f64, x1: f64, samples: usize) -> Result<Self> {
        if !(x1 > x0) || samples < 8 || !x0.is_finite() || !x1.is_finite() {
            return Err(Error::Invalid(format!("bad grid window [{x0}, {x1}) with {samples} samples")));
        }
        Ok(GridConfig { x0, x1, samples })
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / self.samples as f64
    }

    /// Parses `"x0,x1,samples"`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        let bad = || Error::Parse(format!("grid spec must be x0,x1,samples; got {text:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let x0 = parts[0].parse().map_err(|_| bad())?;
        let x1 = parts[1].parse().map_err(|_| bad())?;
        let m = parts[2].parse().map_err(|_| bad())?;
        Self::new(x0, x1, m)
    }

    /// The default, overridden by `HCFT_DEFAULT_GRID` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(GRID_ENV) {
            Ok(v) => Self::parse(&v),
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn sample(&self, f: &GaussPoly) -> GridFn {
        GridFn {
            x0: self.x0,
            dx: self.dx(),
            values: f.sample(self.x0, self.dx(), self.samples),
            support: None,
            diff_order: 0,
        }
    }
}

/// A scalar function in one of the two backends.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarFn {
    Gauss(GaussPoly),
    Grid(GridFn),
}

impl From<GaussPoly> for ScalarFn {
    fn from(g: GaussPoly) -> Self {
        ScalarFn::Gauss(g)
    }
}

impl From<GridFn> for ScalarFn {
    fn from(g: GridFn) -> Self {
        ScalarFn::Grid(g)
    }
}

/// Samples a Gaussian polynomial on a grid aligned with `like` that also covers its own window.
fn gauss_on_grid(g: &GaussPoly, like: &GridFn) -> GridFn {
    let (lo, hi) = g.window().unwrap_or((like.x0, like.x_end()));
    let lo = lo.min(like.x0);
    let hi = hi.max(like.x_end());
    let k0 = ((lo - like.x0) / like.dx).floor() as isize;
    let k1 = ((hi - like.x0) / like.dx).ceil() as isize;
    let x0 = like.x0 + k0 as f64 * like.dx;
    let m = ((k1 - k0 + 1) as usize).max(8);
    GridFn { x0, dx: like.dx, values: g.sample(x0, like.dx, m), support: None, diff_order: 0 }
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn::Gauss(GaussPoly::default())
    }

    pub fn is_gauss(&self) -> bool {
        matches!(self, ScalarFn::Gauss(_))
    }

    /// True when the function is identically zero by construction.
    pub fn is_zero(&self) -> bool {
        match self {
            ScalarFn::Gauss(g) => g.terms.is_empty(),
            ScalarFn::Grid(g) => g.values.iter().all(|v| *v == ZERO),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            ScalarFn::Gauss(g) => g.eval(Complex64::new(x, 0.0)),
            ScalarFn::Grid(g) => g.value_at(x),
        }
    }

    pub fn derivative(&self) -> ScalarFn {
        match self {
            ScalarFn::Gauss(g) => ScalarFn::Gauss(g.derivative()),
            ScalarFn::Grid(g) => ScalarFn::Grid(g.derivative()),
        }
    }

    pub fn nth_derivative(&self, k: usize) -> ScalarFn {
        (0..k).fold(self.clone(), |f, _| f.derivative())
    }

    /// `x ↦ f(x - s)`.
    pub fn translate(&self, s: f64) -> ScalarFn {
        match self {
            ScalarFn::Gauss(g) => ScalarFn::Gauss(g.translate(s)),
            ScalarFn::Grid(g) => ScalarFn::Grid(g.translate(s)),
        }
    }

    pub fn reflect(&self) -> ScalarFn {
        match self {
            ScalarFn::Gauss(g) => ScalarFn::Gauss(g.reflect()),
            ScalarFn::Grid(g) => ScalarFn::Grid(g.reflect()),
        }
    }

    pub fn scale(&self, c: Complex64) -> ScalarFn {
        match self {
            ScalarFn::Gauss(g) => ScalarFn::Gauss(g.scale(c)),
            ScalarFn::Grid(g) => ScalarFn::Grid(g.scale(c)),
        }
    }

    fn binary(
        &self,
        other: &ScalarFn,
        gauss: impl Fn(&GaussPoly, &GaussPoly) -> GaussPoly,
        grid: impl Fn(&GridFn, &GridFn) -> Result<GridFn>,
    ) -> Result<ScalarFn> {
        Ok(match (self, other) {
            (ScalarFn::Gauss(a), ScalarFn::Gauss(b)) => ScalarFn::Gauss(gauss(a, b)),
            (ScalarFn::Grid(a), ScalarFn::Grid(b)) => ScalarFn::Grid(grid(a, b)?),
            (ScalarFn::Gauss(a), ScalarFn::Grid(b)) => ScalarFn::Grid(grid(&gauss_on_grid(a, b), b)?),
            (ScalarFn::Grid(a), ScalarFn::Gauss(b)) => ScalarFn::Grid(grid(a, &gauss_on_grid(b, a))?),
        })
    }

    pub fn add(&self, other: &ScalarFn) -> Result<ScalarFn> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        self.binary(other, GaussPoly::add, GridFn::add)
    }

    pub fn mul(&self, other: &ScalarFn) -> Result<ScalarFn> {
        if self.is_zero() || other.is_zero() {
            return Ok(ScalarFn::zero());
        }
        self.binary(other, GaussPoly::mul, GridFn::mul)
    }

    pub fn convolve(&self, other: &ScalarFn) -> Result<ScalarFn> {
        if self.is_zero() || other.is_zero() {
            return Ok(ScalarFn::zero());
        }
        if let (ScalarFn::Grid(a), ScalarFn::Grid(b)) = (self, other) {
            if !a.decays() && !b.decays() {
                return Err(Error::Divergence("convolution of two non-decaying grid functions".into()));
            }
        }
        self.binary(other, GaussPoly::convolve, GridFn::convolve)
    }

    fn check_decay(&self) -> Result<()> {
        match self {
            ScalarFn::Grid(g) if !g.decays() => {
                Err(Error::Divergence("grid data does not decay at the window edges".into()))
            }
            _ => Ok(()),
        }
    }

    /// `∫_ℝ f`.
    pub fn integral(&self) -> Result<Complex64> {
        self.check_decay()?;
        Ok(match self {
            ScalarFn::Gauss(g) => g.integral(),
            ScalarFn::Grid(g) => g.integral(),
        })
    }

    /// `f̂(ζ)` at any complex `ζ`.
    pub fn fourier_at(&self, zeta: Complex64) -> Result<Complex64> {
        self.check_decay()?;
        Ok(match self {
            ScalarFn::Gauss(g) => g.fourier().eval(zeta),
            ScalarFn::Grid(g) => g.fourier_at(zeta),
        })
    }

    /// Interval carrying the function (window for grids).
    pub fn window(&self) -> Option<(f64, f64)> {
        match self {
            ScalarFn::Gauss(g) => g.window(),
            ScalarFn::Grid(g) => Some(g.support.unwrap_or((g.x0, g.x_end()))),
        }
    }

    /// Largest `|f(x)|` over the points `xs`.
    pub fn max_abs_on(&self, xs: &[f64]) -> f64 {
        xs.iter().map(|&x| self.eval(x).norm()).fold(0.0, f64::max)
    }

    /// Grid derivative orders beyond the limit.
    pub fn precision_warning(&self) -> bool {
        matches!(self, ScalarFn::Grid(g) if g.precision_warning())
    }

    /// Quadrature nodes `(x, weight)` covering the function.
    pub(crate) fn quadrature_nodes(&self, per_unit: f64) -> Vec<(f64, f64)> {
        match self {
            ScalarFn::Grid(g) => {
                let n = g.values.len();
                (0..n).map(|k| (g.x(k), if k == 0 || k == n - 1 { 0.5 * g.dx } else { g.dx })).collect()
            }
            ScalarFn::Gauss(g) => match g.window() {
                None => Vec::new(),
                Some((lo, hi)) => {
                    let m = (((hi - lo) * per_unit).ceil() as usize).max(16);
                    let h = (hi - lo) / m as f64;
                    (0..=m).map(|k| (lo + k as f64 * h, if k == 0 || k == m { 0.5 * h } else { h })).collect()
                }
            },
        }
    }

    /// `‖f‖_p` by the trapezoid rule.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Invalid(format!("p must lie in [1, inf), got {p}")));
        }
        self.check_decay()?;
        let per_unit = match self {
            ScalarFn::Gauss(g) => {
                let a = g.terms.iter().map(|t| t.alpha.norm()).fold(1.0, f64::max);
                400.0 * a.sqrt()
            }
            ScalarFn::Grid(_) => 0.0,
        };
        let s: f64 = self
            .quadrature_nodes(per_unit)
            .iter()
            .map(|&(x, w)| w * self.eval(x).norm().powf(p))
            .sum();
        Ok(s.powf(1.0 / p))
    }

    /// `sup_x |x^j f(x)|` and whether it is finite.
    pub fn weighted_sup(&self, j: u32) -> (f64, bool) {
        match self {
            ScalarFn::Grid(g) => {
                let v = (0..g.values.len()).map(|k| g.x(k).abs().powi(j as i32) * g.values[k].norm()).fold(0.0, f64::max);
                (v, g.decays())
            }
            ScalarFn::Gauss(g) => {
                let Some((lo, hi)) = g.window() else { return (0.0, true) };
                let pad = (j as f64).sqrt() * 4.0;
                let (lo, hi) = (lo - pad, hi + pad);
                let f = |x: f64| x.abs().powi(j as i32) * g.eval(Complex64::new(x, 0.0)).norm();
                let m = 20_000;
                let h = (hi - lo) / m as f64;
                let mut best = (0.0, lo);
                for k in 0..=m {
                    let x = lo + k as f64 * h;
                    let v = f(x);
                    if v > best.0 {
                        best = (v, x);
                    }
                }
                // golden-section polish around the best sample
                let (mut a, mut b) = (best.1 - h, best.1 + h);
                let r = (5f64.sqrt() - 1.0) / 2.0;
                for _ in 0..60 {
                    let c = b - r * (b - a);
                    let d = a + r * (b - a);
                    if f(c) > f(d) {
                        b = d;
                    } else {
                        a = c;
                    }
                }
                (best.0.max(f(0.5 * (a + b))), true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn term(poly: &[(f64, f64)], alpha: (f64, f64), mu: (f64, f64)) -> GaussPoly {
        GaussPoly::new(vec![GaussTerm::new(
            poly.iter().map(|&(a, b)| c(a, b)).collect(),
            c(alpha.0, alpha.1),
            c(mu.0, mu.1),
        )
        .unwrap()])
    }

    fn numeric_integral(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64, m: usize) -> Complex64 {
        let h = (hi - lo) / m as f64;
        (0..=m)
            .map(|k| f(lo + k as f64 * h) * if k == 0 || k == m { 0.5 * h } else { h })
            .sum()
    }

    #[test]
    fn rejects_bad_alpha_and_grids() {
        assert!(GaussTerm::new(vec![ONE], c(0.0, 1.0), ZERO).is_err());
        assert!(GaussTerm::new(vec![ONE], c(-1.0, 0.0), ZERO).is_err());
        assert!(GridFn::new(0.0, 0.1, vec![ONE; 7]).is_err());
        assert!(GridFn::new(0.0, 0.0, vec![ONE; 8]).is_err());
    }

    #[test]
    fn gaussian_closed_forms() {
        let g = GaussPoly::gaussian(ONE, 1.0, 0.0).unwrap();
        assert!((g.integral() - c(PI.sqrt(), 0.0)).norm() < 1e-15);
        let h = GaussPoly::gaussian(ONE, 0.5, 0.0).unwrap();
        // FT of e^{-x²/2} is √(2π) e^{-ζ²/2}
        for z in [-2.0f64, 0.0, 0.7, 3.0] {
            let want = (2.0 * PI).sqrt() * (-z * z / 2.0).exp();
            assert!((h.fourier().eval(c(z, 0.0)) - c(want, 0.0)).norm() < 1e-14);
        }
        // e^{-x²/2} * e^{-x²/2} = √π e^{-x²/4}
        let conv = h.convolve(&h);
        for x in [-3.0f64, -0.5, 0.0, 1.2] {
            let want = PI.sqrt() * (-x * x / 4.0).exp();
            assert!((conv.eval(c(x, 0.0)) - c(want, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn integral_matches_quadrature() {
        let f = term(&[(1.0, 0.5), (-0.3, 0.2), (0.4, 0.0)], (0.8, 0.3), (0.6, -0.4));
        let num = numeric_integral(|x| f.eval(c(x, 0.0)), -20.0, 20.0, 40_000);
        assert!((f.integral() - num).norm() < 1e-10, "{} vs {num}", f.integral());
    }

    #[test]
    fn fourier_matches_quadrature_at_complex_zeta() {
        let f = term(&[(0.2, 0.1), (1.0, -0.5), (0.0, 0.3)], (1.3, -0.2), (-0.4, 0.25));
        let fh = f.fourier();
        for z in [c(0.0, 0.0), c(1.5, 0.0), c(-2.0, 0.7), c(0.3, -1.2)] {
            let num = numeric_integral(|x| f.eval(c(x, 0.0)) * (-I * z * x).exp(), -20.0, 20.0, 40_000);
            assert!((fh.eval(z) - num).norm() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn inverse_fourier_round_trip() {
        let f = term(&[(0.2, 0.1), (1.0, -0.5)], (0.7, 0.1), (0.9, 0.0));
        let back = f.fourier().inverse_fourier();
        for x in [-2.0, 0.0, 0.4, 2.5] {
            assert!((back.eval(c(x, 0.0)) - f.eval(c(x, 0.0))).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let f = term(&[(0.5, 0.0), (0.0, 1.0), (0.2, 0.0)], (0.9, 0.2), (0.3, 0.1));
        let d = f.derivative();
        for x in [-1.0, 0.2, 1.7] {
            let h = 1e-5;
            let fd = (f.eval(c(x + h, 0.0)) - f.eval(c(x - h, 0.0))) / (2.0 * h);
            assert!((d.eval(c(x, 0.0)) - fd).norm() < 1e-8);
        }
    }

    #[test]
    fn translate_and_reflect() {
        let f = term(&[(0.5, 0.0), (1.0, 1.0)], (0.9, 0.0), (0.3, 0.0));
        for x in [-1.0, 0.2, 1.7] {
            assert!((f.translate(0.8).eval(c(x, 0.0)) - f.eval(c(x - 0.8, 0.0))).norm() < 1e-14);
            assert!((f.reflect().eval(c(x, 0.0)) - f.eval(c(-x, 0.0))).norm() < 1e-14);
        }
    }

    #[test]
    fn product_and_scalar_fourier_duality() {
        // (fg)^ = (1/2π)(f̂ * ĝ)
        let f = term(&[(1.0, 0.0), (0.3, 0.2)], (0.6, 0.0), (0.4, 0.0));
        let g = term(&[(0.5, -0.1)], (1.1, 0.2), (-0.2, 0.0));
        let lhs = f.mul(&g).fourier();
        let rhs = f.fourier().convolve(&g.fourier()).scale(c(1.0 / (2.0 * PI), 0.0));
        for z in [-1.5, 0.0, 2.0] {
            assert!((lhs.eval(c(z, 0.0)) - rhs.eval(c(z, 0.0))).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_derivative_and_integral() {
        let g = GaussPoly::gaussian(ONE, 1.0, 0.0).unwrap();
        let grid = GridConfig::default().sample(&g);
        assert!((grid.integral() - c(PI.sqrt(), 0.0)).norm() < 1e-12);
        let d = grid.derivative();
        let exact = g.derivative();
        let err = (0..grid.len())
            .map(|k| (d.values[k] - exact.eval(c(grid.x(k), 0.0))).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
        assert_eq!(d.diff_order(), 1);
        let d9 = (0..9).fold(grid.clone(), |f, _| f.derivative());
        assert!(d9.precision_warning());
        assert!(grid.decays());
    }

    #[test]
    fn grid_fourier_and_convolution() {
        let g = GaussPoly::gaussian(ONE, 0.5, 0.3).unwrap();
        let grid = GridConfig::default().sample(&g);
        for z in [c(0.0, 0.0), c(2.0, 0.0), c(-1.0, 0.5)] {
            assert!((grid.fourier_at(z) - g.fourier().eval(z)).norm() < 1e-12);
        }
        let conv = grid.convolve(&grid).unwrap();
        let exact = g.convolve(&g);
        let err = (0..conv.len())
            .step_by(7)
            .map(|k| (conv.values[k] - exact.eval(c(conv.x(k), 0.0))).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn grid_alignment_rules() {
        let a = GridFn::new(0.0, 0.5, vec![ONE; 8]).unwrap();
        let b = GridFn::new(1.0, 0.5, vec![ONE; 8]).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.len(), 10);
        assert_eq!(s.values[2], c(2.0, 0.0));
        let bad = GridFn::new(0.25, 0.5, vec![ONE; 8]).unwrap();
        assert!(matches!(a.add(&bad), Err(Error::Backend(_))));
        let other_dx = GridFn::new(0.0, 0.25, vec![ONE; 8]).unwrap();
        assert!(a.mul(&other_dx).is_err());
    }

    #[test]
    fn grid_reflect_and_translate() {
        let g = GridFn::from_fn(-1.0, 0.25, 12, |x| c(x, 0.0)).unwrap();
        let r = g.reflect();
        assert_eq!(r.value_at(0.5), c(-0.5, 0.0));
        let t = g.translate(2.0);
        assert_eq!(t.value_at(2.5), c(0.5, 0.0));
        assert_eq!(t.value_at(-5.0), ZERO);
    }

    #[test]
    fn non_decaying_grid_reports_divergence() {
        let g = ScalarFn::Grid(GridFn::new(0.0, 0.1, vec![ONE; 16]).unwrap());
        assert!(matches!(g.integral(), Err(Error::Divergence(_))));
        assert!(matches!(g.convolve(&g), Err(Error::Divergence(_))));
        assert!(!g.weighted_sup(0).1);
    }

    #[test]
    fn mixed_backend_product() {
        let g = GaussPoly::gaussian(ONE, 1.0, 0.0).unwrap();
        let grid = ScalarFn::Grid(GridConfig::default().sample(&g));
        let p = ScalarFn::Gauss(g.clone()).mul(&grid).unwrap();
        assert!(!p.is_gauss());
        assert!((p.eval(0.5) - c((-0.5f64).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn norms_and_sups() {
        let g = ScalarFn::Gauss(GaussPoly::gaussian(ONE, 1.0, 0.0).unwrap());
        assert!((g.lp_norm(1.0).unwrap() - PI.sqrt()).abs() < 1e-9);
        assert!((g.weighted_sup(0).0 - 1.0).abs() < 1e-12);
        let d = g.derivative();
        assert!((d.weighted_sup(0).0 - (2.0 / std::f64::consts::E).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn grid_config_parsing() {
        assert_eq!(GridConfig::parse("-8, 8, 1024").unwrap(), GridConfig::new(-8.0, 8.0, 1024).unwrap());
        assert!(GridConfig::parse("1,0,100").is_err());
        assert!(GridConfig::parse("abc").is_err());
        assert_eq!(GridConfig::default().dx(), 1.0 / 64.0);
    }

    proptest! {
        #[test]
        fn convolution_fourier_closed_form(
            a in 0.3f64..2.0, b in 0.3f64..2.0, m in -1.0f64..1.0, p in -1.0f64..1.0,
            c0 in -1.0f64..1.0, c1 in -1.0f64..1.0, z in -3.0f64..3.0,
        ) {
            let f = term(&[(c0, 0.2), (c1, 0.0)], (a, 0.1), (m, 0.0));
            let g = term(&[(0.5, c1)], (b, -0.1), (p, 0.0));
            let lhs = f.convolve(&g).fourier().eval(c(z, 0.0));
            let rhs = f.fourier().eval(c(z, 0.0)) * g.fourier().eval(c(z, 0.0));
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn derivative_rule_in_frequency(
            a in 0.3f64..2.0, m in -1.0f64..1.0, j in 0usize..4, z in -3.0f64..3.0,
        ) {
            // d^j/dζ^j f̂ = FT((-ix)^j f)
            let f = term(&[(1.0, 0.3), (0.2, 0.0)], (a, 0.0), (m, 0.0));
            let lhs = (0..j).fold(f.fourier(), |h, _| h.derivative()).eval(c(z, 0.0));
            let rhs = f.mul_x_pow(j).scale((-I).powu(j as u32)).fourier().eval(c(z, 0.0));
            prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
        }
    }
}
