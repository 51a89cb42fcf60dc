//! The ℋ-valued Fourier transform `F̂(ζ) = Σ_I f̂_I(ζ) dπ_{-ζ}(*a_I)`, its
//! component functions and inverse, the Fourier–Laplace transform of compact
//! distributions, and a Paley–Wiener growth diagnostic.
//!
//! Classical convention: `f̂(ζ) = ∫ f(x) e^{-iζx} dx`, inverted with `1/2π`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integral::{CompactDistribution, PointDerivative};
use crate::scalar::{GaussPoly, GridConfig, GridFn, ScalarFn};
use crate::spinrep::{
    dpi, dpi_monomial, epsilon, gram, h_pairing, mono_generators, trace_t_times_mono, HMatrix, MonoMatrix, SpinSpec,
};
use crate::superalgebra::{antipode_monomial, hodge_star, IndexSet, PbwElement, PbwMonomial};
use crate::superfunction::{sign, SuperFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// How the scalar coefficients of an image are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form transforms of Gaussian-polynomial components.
    ClosedForm,
    /// Trapezoid quadrature of grid components.
    Sampled,
    /// Fourier–Laplace transform of a point-supported distribution.
    Laplace,
}

#[derive(Clone, Debug)]
enum Coefficient {
    /// Already transformed: evaluate at `ζ`.
    Gauss(GaussPoly),
    Grid(GridFn),
    Points(Vec<PointDerivative>),
}

impl Coefficient {
    fn at(&self, zeta: Complex64) -> Complex64 {
        match self {
            Coefficient::Gauss(g) => g.eval(zeta),
            Coefficient::Grid(g) => g.fourier_at(zeta),
            Coefficient::Points(ps) => ps.iter().map(|p| p.fourier_at(zeta)).sum(),
        }
    }
}

/// One Sweedler term: `sign · coeff(ζ) · dπ_{-ζ}(target)`.
#[derive(Clone, Debug)]
struct Term {
    coeff: Coefficient,
    sign: f64,
    target: PbwMonomial,
}

/// `ζ ↦ A(ζ) ∈ ℋ`, evaluated at real or complex `ζ`.
///
/// `eval(ζ)` lives in the spin module of `dπ_{-ζ}`, so the returned matrix
/// carries the module parameter `-ζ`.
#[derive(Clone, Debug)]
pub struct FourierImage {
    spec: SpinSpec,
    terms: Vec<Term>,
    provenance: Provenance,
}

impl FourierImage {
    pub fn zero(n: usize) -> Result<Self> {
        Ok(FourierImage { spec: SpinSpec::new(n)?, terms: Vec::new(), provenance: Provenance::ClosedForm })
    }

    pub fn spec(&self) -> SpinSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn eval(&self, zeta: Complex64) -> HMatrix {
        let dim = self.spec.dim;
        let gens = mono_generators(self.spec.n, -zeta);
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let c = t.coeff.at(zeta) * t.sign;
            if c != ZERO {
                dpi_monomial(&gens, &t.target, -zeta, dim).add_into(&mut m, c);
            }
        }
        HMatrix::new(self.spec, -zeta, m).expect("dimensions match the spin module")
    }

    /// `A(u; ζ)` through the trace identity `⟨A|dπ(u)⟩ = T(A dπ(S(u)))`; valid at complex `ζ ≠ 0`.
    pub fn component_at(&self, u: &PbwElement, zeta: Complex64) -> Result<Complex64> {
        let a = self.eval(zeta);
        let ctx = TraceContext::new(self.spec, zeta);
        ctx.component(&a, u)
    }

    /// All `A(a_I; ζ)` at once.
    fn components_at_origin(&self) -> Result<Vec<(IndexSet, Complex64)>> {
        const H: f64 = 0.02;
        let mut acc: Vec<(IndexSet, Complex64)> = IndexSet::all(self.spec.n).map(|i| (i, ZERO)).collect();
        for (k, w) in [(1.0, 0.75), (2.0, -0.3), (3.0, 0.05)] {
            for side in [-1.0, 1.0] {
                for (slot, (_, v)) in acc.iter_mut().zip(self.basis_components(Complex64::new(side * k * H, 0.0))?) {
                    slot.1 += v * w;
                }
            }
        }
        Ok(acc)
    }

    fn basis_components(&self, zeta: Complex64) -> Result<Vec<(IndexSet, Complex64)>> {
        let a = self.eval(zeta);
        let ctx = TraceContext::new(self.spec, zeta);
        IndexSet::all(self.spec.n)
            .map(|i| Ok((i, ctx.monomial_component(&a, &PbwMonomial::a(i))?)))
            .collect()
    }
}

/// Cached `dπ_{-ζ}` generators and `ε` at one `ζ`.
struct TraceContext {
    spec: SpinSpec,
    zeta: Complex64,
    gens: Vec<MonoMatrix>,
    eps: Option<MonoMatrix>,
}

impl TraceContext {
    fn new(spec: SpinSpec, zeta: Complex64) -> Self {
        TraceContext { spec, zeta, gens: mono_generators(spec.n, -zeta), eps: epsilon(spec, -zeta) }
    }

    /// `T(A dπ_{-ζ}(m))`.
    fn trace_with(&self, a: &HMatrix, m: &PbwMonomial) -> Complex64 {
        let d = dpi_monomial(&self.gens, m, -self.zeta, self.spec.dim);
        trace_t_times_mono(a, &d, self.eps.as_ref())
    }

    fn normalization(&self) -> Result<Complex64> {
        if self.zeta == ZERO {
            return Err(Error::Singular("component functions are singular at zeta = 0".into()));
        }
        Ok((self.zeta * -2.0).powi(-(self.spec.bracket as i32)))
    }

    fn monomial_component(&self, a: &HMatrix, m: &PbwMonomial) -> Result<Complex64> {
        let s = antipode_monomial(m);
        let graded = sign(m.parity() as usize * self.spec.n % 2 == 1);
        Ok(self.trace_with(a, &s.monomial) * (s.sign as f64 * graded) * self.normalization()?)
    }

    fn component(&self, a: &HMatrix, u: &PbwElement) -> Result<Complex64> {
        check_n(u.n(), self.spec.n)?;
        let mut acc = ZERO;
        for (m, c) in u.terms() {
            acc += c * self.monomial_component(a, m)?;
        }
        Ok(acc)
    }
}

fn check_n(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Dimension(format!("element has n = {got}, expected {want}")));
    }
    Ok(())
}

/// `F̂(ζ) = Σ_I f̂_I(ζ) dπ_{-ζ}(*a_I)`.
pub fn transform(f: &SuperFunction) -> Result<FourierImage> {
    let spec = SpinSpec::new(f.n())?;
    let mut terms = Vec::new();
    let mut sampled = false;
    for (i, fi) in f.components() {
        if fi.is_zero() {
            continue;
        }
        fi.fourier_at(ZERO)?;
        let coeff = match fi {
            ScalarFn::Gauss(g) => Coefficient::Gauss(g.fourier()),
            ScalarFn::Grid(g) => {
                sampled = true;
                Coefficient::Grid(g.clone())
            }
        };
        let star = hodge_star(*i);
        terms.push(Term { coeff, sign: star.sign as f64, target: star.monomial });
    }
    let provenance = if sampled { Provenance::Sampled } else { Provenance::ClosedForm };
    Ok(FourierImage { spec, terms, provenance })
}

/// `Û(ζ) = Σ_I U(a_I)_x(e^{-iζx}) dπ_{-ζ}(*a_I)`, entire in `ζ`.
pub fn transform_dist(u: &CompactDistribution) -> Result<FourierImage> {
    let spec = SpinSpec::new(u.n())?;
    let mut terms = Vec::new();
    for i in IndexSet::all(u.n()) {
        let pts = u.sweedler(i);
        if pts.is_empty() {
            continue;
        }
        let star = hodge_star(i);
        terms.push(Term { coeff: Coefficient::Points(pts), sign: star.sign as f64, target: star.monomial });
    }
    Ok(FourierImage { spec, terms, provenance: Provenance::Laplace })
}

/// `A(u; ζ) = (-1)^{|u||γ|} ⟨A(ζ)|dπ_{-ζ}(u)⟩ (-2ζ)^{-[n]}`, with the form `⟨·|·⟩` of
/// the Gram form at `-ζ`. Extended linearly over the terms of `u`.
pub fn component(a: &FourierImage, u: &PbwElement, zeta: f64) -> Result<Complex64> {
    check_n(u.n(), a.n())?;
    if zeta == 0.0 {
        return Err(Error::Singular("component functions are singular at zeta = 0".into()));
    }
    let spec = a.spec;
    let z = Complex64::new(zeta, 0.0);
    let mat = a.eval(z);
    let form = gram(spec, -zeta)?;
    let norm = (z * -2.0).powi(-(spec.bracket as i32));
    let mut acc = ZERO;
    for (m, c) in u.terms() {
        let d = dpi(&PbwElement::monomial(*m, Complex64::new(1.0, 0.0)), -z)?;
        let graded = sign(m.parity() as usize * spec.n % 2 == 1);
        acc += c * h_pairing(&mat, &d, &form)? * graded;
    }
    Ok(acc * norm)
}

/// Settings for the numerical inverse transform.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseConfig {
    /// The `ζ`-integral runs over `[-zeta_max, zeta_max]`.
    pub zeta_max: f64,
    /// Midpoint nodes; rounded up to even so that `ζ = 0` is never sampled.
    pub zeta_steps: usize,
    /// Output grid.
    pub grid: GridConfig,
}

impl Default for InverseConfig {
    fn default() -> Self {
        InverseConfig { zeta_max: 40.0, zeta_steps: 1600, grid: GridConfig::default() }
    }
}

impl InverseConfig {
    pub fn nodes(&self) -> Vec<f64> {
        let m = self.zeta_steps.max(2).next_multiple_of(2);
        let h = 2.0 * self.zeta_max / m as f64;
        (0..m).map(|j| -self.zeta_max + (j as f64 + 0.5) * h).collect()
    }
}

/// A recovered superfunction, with the relative size of the components at
/// the ends of the `ζ` range.
#[derive(Clone, Debug)]
pub struct Inversion {
    pub function: SuperFunction,
    pub tail: f64,
}

impl Inversion {
    /// True when the components had not decayed at the ends of the `ζ` range.
    pub fn slow_decay(&self) -> bool {
        self.tail > 1e-10
    }
}

/// Component functions sampled on real `ζ` nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentTable {
    pub n: usize,
    pub zetas: Vec<f64>,
    pub components: BTreeMap<IndexSet, Vec<Complex64>>,
}

impl ComponentTable {
    /// Samples `A(a_I; ζ)` of an image. A node at `ζ = 0` is filled in by
    /// even extrapolation from `±h, ±2h, ±3h`.
    pub fn sample(a: &FourierImage, zetas: &[f64]) -> Result<Self> {
        let mut components: BTreeMap<IndexSet, Vec<Complex64>> = BTreeMap::new();
        for &z in zetas {
            let values = if z == 0.0 { a.components_at_origin()? } else { a.basis_components(Complex64::new(z, 0.0))? };
            for (i, v) in values {
                components.entry(i).or_default().push(v);
            }
        }
        Ok(ComponentTable { n: a.n(), zetas: zetas.to_vec(), components })
    }

    fn validate(&self) -> Result<()> {
        SpinSpec::new(self.n)?;
        if self.zetas.len() < 2 {
            return Err(Error::Invalid("component table needs at least two zeta nodes".into()));
        }
        if self.zetas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid("zeta nodes must be strictly increasing".into()));
        }
        for (i, v) in &self.components {
            check_n(i.n(), self.n)?;
            if v.len() != self.zetas.len() {
                return Err(Error::Invalid(format!(
                    "component {i} has {} values for {} zeta nodes",
                    v.len(),
                    self.zetas.len()
                )));
            }
        }
        Ok(())
    }
}

/// `F(a_I; x) = (1/2π) ∫ A(a_I; ζ) e^{ixζ} dζ` on the midpoint grid of `cfg`.
pub fn inverse(a: &FourierImage, cfg: &InverseConfig) -> Result<Inversion> {
    let nodes = cfg.nodes();
    let h = nodes[1] - nodes[0];
    let table = ComponentTable::sample(a, &nodes)?;
    let weights = vec![h; nodes.len()];
    invert(&table, &weights, &cfg.grid)
}

/// Inverse transform of a sampled table, by the trapezoid rule on its nodes.
pub fn inverse_table(t: &ComponentTable, grid: &GridConfig) -> Result<Inversion> {
    t.validate()?;
    let z = &t.zetas;
    let m = z.len();
    let weights: Vec<f64> = (0..m)
        .map(|j| {
            let left = if j > 0 { z[j] - z[j - 1] } else { 0.0 };
            let right = if j + 1 < m { z[j + 1] - z[j] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    invert(t, &weights, grid)
}

fn invert(t: &ComponentTable, weights: &[f64], grid: &GridConfig) -> Result<Inversion> {
    let samples = grid.samples;
    let dx = grid.dx();
    let live: Vec<(&IndexSet, &Vec<Complex64>)> =
        t.components.iter().filter(|(_, v)| v.iter().any(|c| *c != ZERO)).collect();
    let mut out: Vec<Vec<Complex64>> = vec![vec![ZERO; samples]; live.len()];
    let mut tail: f64 = 0.0;
    for (_, v) in &live {
        let peak = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let edge = v[0].norm().max(v[v.len() - 1].norm());
        tail = tail.max(edge / peak);
    }
    for (j, (&zeta, &w)) in t.zetas.iter().zip(weights).enumerate() {
        let step = (I * zeta * dx).exp();
        let mut phase = ZERO;
        for k in 0..samples {
            if k % 32 == 0 {
                phase = (I * zeta * (grid.x0 + k as f64 * dx)).exp();
            }
            for (c, (_, v)) in live.iter().enumerate() {
                out[c][k] += v[j] * phase * w;
            }
            phase *= step;
        }
    }
    let scale = 1.0 / (2.0 * std::f64::consts::PI);
    let mut comps = BTreeMap::new();
    for ((i, _), vals) in live.iter().zip(out) {
        let vals = vals.into_iter().map(|v| v * scale).collect();
        comps.insert(**i, ScalarFn::Grid(GridFn::new(grid.x0, dx, vals)?));
    }
    Ok(Inversion { function: SuperFunction::new(t.n, comps)?, tail })
}

/// Settings for [`paley_wiener_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct PwConfig {
    /// Decay exponents `N` to test.
    pub orders: Vec<u32>,
    /// Monomials `z^k a_I` with `k ≤ max_zpow` are tested.
    pub max_zpow: u32,
    /// Coarse sample box `[-R, R]²`.
    pub half_width: f64,
    /// Points per side of the coarse box.
    pub steps: usize,
    /// Include the `ζ^{-[n]}` prefactor.
    pub prefactor: bool,
}

impl Default for PwConfig {
    fn default() -> Self {
        PwConfig { orders: (0..=6).collect(), max_zpow: 2, half_width: 128.0, steps: 33, prefactor: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PwEntry {
    pub order: u32,
    pub monomial: PbwMonomial,
    pub coarse: f64,
    pub fine: f64,
    pub pass: bool,
}

impl PwEntry {
    pub fn ratio(&self) -> f64 {
        if self.coarse == 0.0 && self.fine == 0.0 {
            1.0
        } else {
            self.fine / self.coarse
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PwReport {
    pub radius: f64,
    pub entries: Vec<PwEntry>,
    pub pass: bool,
}

/// Estimates `Ĉ_N = max |ζ^{-[n]} T(A(ζ) dπ_{-ζ}(u))| (1+|ζ|)^N e^{-a|Im ζ|}` over a
/// square box and over the box of twice the extent and density. An entry passes
/// when both estimates are finite and refinement less than doubles the estimate.
pub fn paley_wiener_check(a: &FourierImage, radius: f64, cfg: &PwConfig) -> Result<PwReport> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Invalid(format!("exponential type must be positive, got {radius}")));
    }
    if cfg.steps < 2 || !(cfg.half_width > 0.0) {
        return Err(Error::Invalid("sample box needs a positive half-width and at least two steps".into()));
    }
    let n = a.n();
    let monomials: Vec<PbwMonomial> = (0..=cfg.max_zpow)
        .flat_map(|k| IndexSet::all(n).map(move |i| PbwMonomial::new(k, i)))
        .collect();
    let coarse = pw_estimates(a, radius, cfg, &monomials, cfg.half_width, cfg.steps);
    let fine = pw_estimates(a, radius, cfg, &monomials, 2.0 * cfg.half_width, 2 * cfg.steps - 1);
    let mut entries = Vec::new();
    for (oi, &order) in cfg.orders.iter().enumerate() {
        for (mi, m) in monomials.iter().enumerate() {
            let (c, f) = (coarse[oi][mi], fine[oi][mi]);
            let finite = c.is_finite() && f.is_finite();
            let pass = finite && (f == 0.0 || f < 2.0 * c);
            entries.push(PwEntry { order, monomial: *m, coarse: c, fine: f, pass });
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(PwReport { radius, entries, pass })
}

fn pw_estimates(
    a: &FourierImage,
    radius: f64,
    cfg: &PwConfig,
    monomials: &[PbwMonomial],
    half_width: f64,
    steps: usize,
) -> Vec<Vec<f64>> {
    let bracket = a.spec.bracket as i32;
    let mut best = vec![vec![0.0f64; monomials.len()]; cfg.orders.len()];
    let h = 2.0 * half_width / (steps - 1) as f64;
    for p in 0..steps {
        for q in 0..steps {
            let zeta = Complex64::new(-half_width + p as f64 * h, -half_width + q as f64 * h);
            let r = zeta.norm();
            if r < 1e-9 {
                continue;
            }
            let mat = a.eval(zeta);
            let ctx = TraceContext::new(a.spec, zeta);
            let mut weight = (-radius * zeta.im.abs()).exp();
            if cfg.prefactor {
                weight *= r.powi(-bracket);
            }
            for (mi, m) in monomials.iter().enumerate() {
                let v = ctx.trace_with(&mat, m).norm() * weight;
                for (oi, &order) in cfg.orders.iter().enumerate() {
                    let w = v * (1.0 + r).powi(order as i32);
                    let slot = &mut best[oi][mi];
                    if !w.is_finite() || !slot.is_finite() {
                        *slot = f64::INFINITY;
                    } else if w > *slot {
                        *slot = w;
                    }
                }
            }
        }
    }
    best
}
