//! Spin module matrices `c_ζ(u)`, the representations `dπ_ζ` and `π_ζ`, the
//! trace functional `T`, Gram forms and super adjoints.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::superalgebra::{check_dim, PbwElement, PbwMonomial};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParityCase {
    Even,
    Odd,
}

/// Shape data of the spin module for `n` odd generators.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SpinSpec {
    pub n: usize,
    pub parity_case: ParityCase,
    /// `[n]`: `n/2` for even `n`, `(n+1)/2` for odd `n`.
    pub bracket: usize,
    /// `N = 2^{[n]-1}`.
    pub n_half: usize,
    /// `2^{[n]}`.
    pub dim: usize,
}

impl SpinSpec {
    pub fn new(n: usize) -> Result<Self> {
        check_dim(n)?;
        let bracket = n.div_ceil(2);
        Ok(SpinSpec {
            n,
            parity_case: if n % 2 == 0 { ParityCase::Even } else { ParityCase::Odd },
            bracket,
            n_half: 1 << (bracket - 1),
            dim: 1 << bracket,
        })
    }

    /// Grading of the standard basis vector `e_i`.
    pub fn basis_parity(&self, i: usize) -> u8 {
        match self.parity_case {
            ParityCase::Even => (i.count_ones() & 1) as u8,
            ParityCase::Odd => (i >> (self.bracket - 1)) as u8,
        }
    }
}

/// Parity of a matrix with respect to the grading of the spin module.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MatrixParity {
    Even,
    Odd,
    Mixed,
}

/// An element of `End(S)` at a fixed `ζ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HMatrix {
    spec: SpinSpec,
    zeta: Complex64,
    entries: DMatrix<Complex64>,
}

impl HMatrix {
    pub fn new(spec: SpinSpec, zeta: Complex64, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != spec.dim || entries.ncols() != spec.dim {
            return Err(Error::Dimension(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                spec.dim,
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(HMatrix { spec, zeta, entries })
    }

    pub fn zeros(spec: SpinSpec, zeta: Complex64) -> Self {
        HMatrix { spec, zeta, entries: DMatrix::zeros(spec.dim, spec.dim) }
    }

    pub fn identity(spec: SpinSpec, zeta: Complex64) -> Self {
        HMatrix { spec, zeta, entries: DMatrix::identity(spec.dim, spec.dim) }
    }

    pub fn spec(&self) -> SpinSpec {
        self.spec
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// Parity with entries of magnitude `<= tol` treated as zero.
    pub fn parity(&self, tol: f64) -> MatrixParity {
        let (mut even, mut odd) = (false, false);
        for r in 0..self.spec.dim {
            for c in 0..self.spec.dim {
                if self.entries[(r, c)].norm() > tol {
                    if self.spec.basis_parity(r) == self.spec.basis_parity(c) {
                        even = true;
                    } else {
                        odd = true;
                    }
                }
            }
        }
        match (even, odd) {
            (_, false) => MatrixParity::Even,
            (false, true) => MatrixParity::Odd,
            (true, true) => MatrixParity::Mixed,
        }
    }

    /// Splits into (even part, odd part).
    pub fn parity_parts(&self) -> (HMatrix, HMatrix) {
        let mut even = self.clone();
        let mut odd = self.clone();
        for r in 0..self.spec.dim {
            for c in 0..self.spec.dim {
                if self.spec.basis_parity(r) == self.spec.basis_parity(c) {
                    odd.entries[(r, c)] = ZERO;
                } else {
                    even.entries[(r, c)] = ZERO;
                }
            }
        }
        (even, odd)
    }

    fn compatible(&self, other: &HMatrix) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Dimension("matrices belong to different spin modules".into()));
        }
        if (self.zeta - other.zeta).norm() > 1e-12 * (1.0 + self.zeta.norm()) {
            return Err(Error::Invalid(format!(
                "matrices carry different zeta ({} vs {})",
                self.zeta, other.zeta
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &HMatrix) -> Result<HMatrix> {
        self.compatible(other)?;
        Ok(HMatrix { spec: self.spec, zeta: self.zeta, entries: &self.entries * &other.entries })
    }

    pub fn add(&self, other: &HMatrix) -> Result<HMatrix> {
        self.compatible(other)?;
        Ok(HMatrix { spec: self.spec, zeta: self.zeta, entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &HMatrix) -> Result<HMatrix> {
        self.compatible(other)?;
        Ok(HMatrix { spec: self.spec, zeta: self.zeta, entries: &self.entries - &other.entries })
    }

    pub fn scale(&self, c: Complex64) -> HMatrix {
        HMatrix { spec: self.spec, zeta: self.zeta, entries: self.entries.map(|v| v * c) }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference; `inf` when the shapes differ.
    pub fn max_abs_diff(&self, other: &HMatrix) -> f64 {
        if self.entries.shape() != other.entries.shape() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |εA - Aε|` for odd `n`, zero for even `n`.
    pub fn d_linearity_defect(&self) -> f64 {
        match epsilon(self.spec, self.zeta) {
            None => 0.0,
            Some(eps) => {
                let e = eps.to_dense(self.spec.dim);
                (&e * &self.entries - &self.entries * &e).iter().map(|v| v.norm()).fold(0.0, f64::max)
            }
        }
    }
}

/// A matrix with exactly one stored entry per row: `(r, col[r]) = val[r]`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct MonoMatrix {
    pub col: Vec<usize>,
    pub val: Vec<Complex64>,
}

impl MonoMatrix {
    fn identity(dim: usize) -> Self {
        MonoMatrix { col: (0..dim).collect(), val: vec![ONE; dim] }
    }

    fn two(c0: usize, v0: Complex64, c1: usize, v1: Complex64) -> Self {
        MonoMatrix { col: vec![c0, c1], val: vec![v0, v1] }
    }

    fn kron(&self, other: &MonoMatrix) -> MonoMatrix {
        let b = other.col.len();
        let dim = self.col.len() * b;
        let mut col = Vec::with_capacity(dim);
        let mut val = Vec::with_capacity(dim);
        for (ca, va) in self.col.iter().zip(&self.val) {
            for (cb, vb) in other.col.iter().zip(&other.val) {
                col.push(ca * b + cb);
                val.push(va * vb);
            }
        }
        MonoMatrix { col, val }
    }

    pub fn mul(&self, other: &MonoMatrix) -> MonoMatrix {
        let col = self.col.iter().map(|&c| other.col[c]).collect();
        let val = self.col.iter().zip(&self.val).map(|(&c, v)| v * other.val[c]).collect();
        MonoMatrix { col, val }
    }

    fn scale(&self, s: Complex64) -> MonoMatrix {
        MonoMatrix { col: self.col.clone(), val: self.val.iter().map(|v| v * s).collect() }
    }

    pub fn add_into(&self, target: &mut DMatrix<Complex64>, coeff: Complex64) {
        for (r, (&c, v)) in self.col.iter().zip(&self.val).enumerate() {
            target[(r, c)] += coeff * v;
        }
    }

    pub fn to_dense(&self, dim: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(dim, dim);
        self.add_into(&mut m, ONE);
        m
    }
}

/// Generators at `ζ = 0` and their `ζ`-derivative; entries are affine in `ζ`.
struct Template {
    constant: Vec<MonoMatrix>,
    slope: Vec<MonoMatrix>,
    eps: Option<(MonoMatrix, MonoMatrix)>,
}

fn even_generators(k: usize, zeta: Complex64) -> Vec<MonoMatrix> {
    let b1 = MonoMatrix::two(1, zeta, 0, ONE);
    let b2 = MonoMatrix::two(1, I * zeta, 0, -I);
    let g = MonoMatrix::two(0, ONE, 1, -ONE);
    let id = MonoMatrix::identity(2);
    let mut out = Vec::with_capacity(2 * k);
    for m in 0..k {
        for b in [&b1, &b2] {
            let mut acc = MonoMatrix::identity(1);
            for q in 0..k {
                let f = if q < m {
                    &g
                } else if q == m {
                    b
                } else {
                    &id
                };
                acc = acc.kron(f);
            }
            out.push(acc);
        }
    }
    out
}

fn chirality(k: usize) -> MonoMatrix {
    let g = MonoMatrix::two(0, ONE, 1, -ONE);
    (0..k).fold(MonoMatrix::identity(1), |acc, _| acc.kron(&g))
}

fn generators_at(n: usize, zeta: Complex64) -> (Vec<MonoMatrix>, Option<MonoMatrix>) {
    if n % 2 == 0 {
        return (even_generators(n / 2, zeta), None);
    }
    let k = (n - 1) / 2;
    let e = MonoMatrix::two(1, zeta, 0, ONE);
    let gam = chirality(k);
    let mut gens = vec![e.kron(&gam)];
    for q in even_generators(k, ONE) {
        gens.push(e.kron(&gam.mul(&q).scale(-I)));
    }
    (gens, Some(e.kron(&MonoMatrix::identity(1 << k))))
}

fn affine_slope(at0: &MonoMatrix, at1: &MonoMatrix) -> MonoMatrix {
    debug_assert_eq!(at0.col, at1.col);
    MonoMatrix {
        col: at0.col.clone(),
        val: at0.val.iter().zip(&at1.val).map(|(a, b)| b - a).collect(),
    }
}

fn template(n: usize) -> Arc<Template> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Template>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let (g0, e0) = generators_at(n, ZERO);
            let (g1, e1) = generators_at(n, ONE);
            let slope = g0.iter().zip(&g1).map(|(a, b)| affine_slope(a, b)).collect();
            let eps = e0.zip(e1).map(|(a, b)| {
                let s = affine_slope(&a, &b);
                (a, s)
            });
            Arc::new(Template { constant: g0, slope, eps })
        })
        .clone()
}

fn instantiate(constant: &MonoMatrix, slope: &MonoMatrix, zeta: Complex64) -> MonoMatrix {
    MonoMatrix {
        col: constant.col.clone(),
        val: constant.val.iter().zip(&slope.val).map(|(c, s)| c + s * zeta).collect(),
    }
}

pub(crate) fn mono_generators(n: usize, zeta: Complex64) -> Vec<MonoMatrix> {
    let t = template(n);
    t.constant.iter().zip(&t.slope).map(|(c, s)| instantiate(c, s, zeta)).collect()
}

pub(crate) fn epsilon(spec: SpinSpec, zeta: Complex64) -> Option<MonoMatrix> {
    template(spec.n).eps.as_ref().map(|(c, s)| instantiate(c, s, zeta))
}

/// `c_ζ(a_I)` as a monomial matrix, from a precomputed generator list.
pub(crate) fn clifford_monomial(gens: &[MonoMatrix], m: &PbwMonomial, dim: usize) -> MonoMatrix {
    let mut acc = MonoMatrix::identity(dim);
    for i in m.idx.members() {
        acc = acc.mul(&gens[i - 1]);
    }
    acc
}

/// The scalar `ζ^k e^{iπ#I/4}` relating `dπ_ζ(z^k a_I)` to `c_ζ(a_I)`, with
/// `ζ` replaced by `iζ` for the `dπ` case.
fn dpi_scalar(m: &PbwMonomial, zeta: Complex64) -> Complex64 {
    (I * zeta).powu(m.zpow) * Complex64::from_polar(1.0, FRAC_PI_4 * m.idx.len() as f64)
}

/// `dπ_ζ(z^k a_I)` as a monomial matrix.
pub(crate) fn dpi_monomial(gens: &[MonoMatrix], m: &PbwMonomial, zeta: Complex64, dim: usize) -> MonoMatrix {
    clifford_monomial(gens, m, dim).scale(dpi_scalar(m, zeta))
}

/// `c_ζ(a_1), ..., c_ζ(a_n)`, followed by the `ε` matrix when `n` is odd.
pub fn build_generators(n: usize, zeta: Complex64) -> Result<Vec<HMatrix>> {
    let spec = SpinSpec::new(n)?;
    let mut out: Vec<HMatrix> = mono_generators(n, zeta)
        .iter()
        .map(|g| HMatrix { spec, zeta, entries: g.to_dense(spec.dim) })
        .collect();
    if let Some(e) = epsilon(spec, zeta) {
        out.push(HMatrix { spec, zeta, entries: e.to_dense(spec.dim) });
    }
    Ok(out)
}

/// The `ε` matrix of the odd case (`ε² = ζ`); `None` for even `n`.
pub fn epsilon_matrix(n: usize, zeta: Complex64) -> Result<Option<HMatrix>> {
    let spec = SpinSpec::new(n)?;
    Ok(epsilon(spec, zeta).map(|e| HMatrix { spec, zeta, entries: e.to_dense(spec.dim) }))
}

fn assemble(u: &PbwElement, zeta: Complex64, scalar: impl Fn(&PbwMonomial) -> Complex64) -> Result<HMatrix> {
    let spec = SpinSpec::new(u.n())?;
    let gens = mono_generators(spec.n, zeta);
    let mut entries = DMatrix::zeros(spec.dim, spec.dim);
    for (m, c) in u.terms() {
        clifford_monomial(&gens, m, spec.dim).add_into(&mut entries, c * scalar(m));
    }
    Ok(HMatrix { spec, zeta, entries })
}

/// `c_ζ(u)`, with `z ↦ ζ`.
pub fn represent(u: &PbwElement, zeta: Complex64) -> Result<HMatrix> {
    assemble(u, zeta, |m| zeta.powu(m.zpow))
}

/// `dπ_ζ(u)`: each odd generator carries `e^{iπ/4}` and `z` acts by `iζ`.
pub fn dpi(u: &PbwElement, zeta: Complex64) -> Result<HMatrix> {
    assemble(u, zeta, |m| dpi_scalar(m, zeta))
}

/// `π_ζ(u; x) = e^{iζx} dπ_ζ(u)`.
pub fn pi(u: &PbwElement, x: f64, zeta: Complex64) -> Result<HMatrix> {
    Ok(dpi(u, zeta)?.scale((I * zeta * x).exp()))
}

/// Phase in the odd-case trace `T(A) = Tr(e^{-iπ/4} ε A)`.
fn odd_trace_phase() -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_4)
}

/// The trace functional: the supertrace for even `n`, `Tr(e^{-iπ/4} ε A)` for odd `n`.
pub fn trace_t(a: &HMatrix) -> Complex64 {
    let spec = a.spec;
    match epsilon(spec, a.zeta) {
        None => (0..spec.dim)
            .map(|i| if spec.basis_parity(i) == 0 { a.entries[(i, i)] } else { -a.entries[(i, i)] })
            .sum(),
        Some(eps) => {
            let tr: Complex64 =
                eps.col.iter().zip(&eps.val).enumerate().map(|(r, (&c, v))| v * a.entries[(c, r)]).sum();
            odd_trace_phase() * tr
        }
    }
}

/// `T(A M)` for a monomial matrix `M`, in `O(dim)`.
pub(crate) fn trace_t_times_mono(a: &HMatrix, m: &MonoMatrix, eps: Option<&MonoMatrix>) -> Complex64 {
    let spec = a.spec;
    let dim = spec.dim;
    // (A M)[s, t] is nonzero only where M has its entry in column t.
    let mut row_of_col = vec![usize::MAX; dim];
    for (r, &c) in m.col.iter().enumerate() {
        row_of_col[c] = r;
    }
    let am = |s: usize, t: usize| -> Complex64 {
        let r = row_of_col[t];
        if r == usize::MAX {
            ZERO
        } else {
            a.entries[(s, r)] * m.val[r]
        }
    };
    match eps {
        None => (0..dim)
            .map(|i| if spec.basis_parity(i) == 0 { am(i, i) } else { -am(i, i) })
            .sum(),
        Some(e) => {
            let tr: Complex64 = e.col.iter().zip(&e.val).enumerate().map(|(r, (&c, v))| v * am(c, r)).sum();
            odd_trace_phase() * tr
        }
    }
}

/// The Hermitian form `(·,·)_ζ` for real nonzero `ζ`; it is diagonal in the standard basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GramForm {
    pub spec: SpinSpec,
    pub zeta: f64,
    pub diag: Vec<f64>,
}

impl GramForm {
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.diag.len(),
            self.diag.iter().map(|&g| Complex64::new(g, 0.0)),
        ))
    }

    /// `(u, v)_ζ = Σ g_i u_i conj(v_i)`.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.diag.iter().zip(u.iter().zip(v)).map(|(g, (a, b))| a * b.conj() * *g).sum()
    }

    /// `G^{-1} A^H G`.
    pub fn adjoint(&self, a: &HMatrix) -> HMatrix {
        let dim = self.spec.dim;
        let mut out = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                out[(r, c)] = a.entries[(c, r)].conj() * (self.diag[c] / self.diag[r]);
            }
        }
        HMatrix { spec: a.spec, zeta: a.zeta, entries: out }
    }
}

/// Gram form of the spin module at real `ζ ≠ 0`.
pub fn gram(spec: SpinSpec, zeta: f64) -> Result<GramForm> {
    if zeta == 0.0 || !zeta.is_finite() {
        return Err(Error::DegenerateForm(format!("Gram form needs a finite nonzero zeta, got {zeta}")));
    }
    let diag = (0..spec.dim)
        .map(|i| match spec.parity_case {
            ParityCase::Even => zeta.powi(i.count_ones() as i32),
            ParityCase::Odd => zeta.powi((i >> (spec.bracket - 1)) as i32),
        })
        .collect();
    Ok(GramForm { spec, zeta, diag })
}

fn check_form(a: &HMatrix, form: &GramForm) -> Result<()> {
    if a.spec != form.spec {
        return Err(Error::Dimension("matrix and Gram form belong to different spin modules".into()));
    }
    if (a.zeta - Complex64::new(form.zeta, 0.0)).norm() > 1e-12 * (1.0 + form.zeta.abs()) {
        return Err(Error::Invalid(format!(
            "matrix zeta {} does not match Gram form zeta {}",
            a.zeta, form.zeta
        )));
    }
    Ok(())
}

/// Super adjoint `A† = A_0* + (-i) A_1*`, applied per parity part.
pub fn super_adjoint(a: &HMatrix, form: &GramForm) -> Result<HMatrix> {
    check_form(a, form)?;
    let (even, odd) = a.parity_parts();
    form.adjoint(&even).add(&form.adjoint(&odd).scale(-I))
}

/// `⟨A|B⟩ = T(A B†)`.
pub fn h_pairing(a: &HMatrix, b: &HMatrix, form: &GramForm) -> Result<Complex64> {
    check_form(a, form)?;
    Ok(trace_t(&a.matmul(&super_adjoint(b, form)?)?))
}
