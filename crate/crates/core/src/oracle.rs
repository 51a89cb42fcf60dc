//! Brute-force reference implementations.
//!
//! Each function transcribes a defining formula directly, without the cached
//! signs or closed forms of the fast paths. They are slow and meant for
//! cross-checking.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::integral::CompactDistribution;
use crate::scalar::{GaussPoly, ScalarFn};
use crate::spinrep::{dpi, HMatrix, SpinSpec};
use crate::superalgebra::{check_dim, hodge_sign, IndexSet, PbwElement, PbwMonomial};
use crate::superfunction::{left_action, SuperFunction};

/// A generator symbol in a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Z,
    /// `a_i`, 1-based.
    A(usize),
}

impl Generator {
    pub fn element(&self, n: usize) -> Result<PbwElement> {
        match *self {
            Generator::Z => PbwElement::z(n),
            Generator::A(i) => PbwElement::a(n, i),
        }
    }

    fn is_odd(&self) -> bool {
        matches!(self, Generator::A(_))
    }
}

/// The word `z^k a_{i_1} ... a_{i_m}` of a monomial.
pub fn word_of(m: &PbwMonomial) -> Vec<Generator> {
    let mut w = vec![Generator::Z; m.zpow as usize];
    w.extend(m.idx.members().into_iter().map(Generator::A));
    w
}

/// Normalizes a word by single adjacent moves: `a_j a_i -> -a_i a_j` for
/// `i < j`, `a_i a_i -> z`, with `z` commuted to the front.
pub fn oracle_normalize(word: &[Generator], n: usize) -> Result<PbwElement> {
    check_dim(n)?;
    let mut zpow = 0u32;
    let mut letters = Vec::new();
    for g in word {
        match *g {
            Generator::Z => zpow += 1,
            Generator::A(i) if i >= 1 && i <= n => letters.push(i),
            Generator::A(i) => {
                return Err(Error::Dimension(format!("generator a_{i} outside 1..={n}")))
            }
        }
    }
    let mut sign = 1.0;
    'outer: loop {
        for p in 0..letters.len().saturating_sub(1) {
            if letters[p] == letters[p + 1] {
                letters.drain(p..p + 2);
                zpow += 1;
                continue 'outer;
            }
            if letters[p] > letters[p + 1] {
                letters.swap(p, p + 1);
                sign = -sign;
                continue 'outer;
            }
        }
        break;
    }
    let idx = IndexSet::new(n, &letters)?;
    Ok(PbwElement::monomial(PbwMonomial::new(zpow, idx), Complex64::new(sign, 0.0)))
}

/// Antipode by word reversal: `S(x_1 ⋯ x_m) = (-1)^{Σ_{i<j}|x_i||x_j|} S(x_m) ⋯ S(x_1)`
/// with `S(x) = -x` on generators.
pub fn antipode_oracle(u: &PbwElement) -> Result<PbwElement> {
    let mut out = PbwElement::zero(u.n())?;
    for (m, c) in u.terms() {
        let mut word = word_of(m);
        let odd = word.iter().filter(|g| g.is_odd()).count();
        let koszul = if (odd * odd.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let negations = if word.len() % 2 == 0 { 1.0 } else { -1.0 };
        word.reverse();
        let normal = oracle_normalize(&word, u.n())?;
        out = out.try_add(&normal.scale(c * koszul * negations))?;
    }
    Ok(out)
}

/// Sign of a permutation of `1..=m` by explicit inversion counting.
pub fn permutation_sign(perm: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `sgn(σ_I)` where `σ_I` lists `I` ascending and then `I^c` ascending.
pub fn hodge_sign_oracle(idx: IndexSet) -> i8 {
    let mut perm = idx.members();
    perm.extend(idx.complement().members());
    permutation_sign(&perm)
}

/// Shuffle sign of listing `I` before `J` relative to the sorted union.
pub fn shuffle_sign_oracle(i: IndexSet, j: IndexSet) -> i8 {
    let mut perm = i.members();
    perm.extend(j.members());
    permutation_sign(&perm)
}

/// Expands `Δ(a_K) = Π_{k∈K} (a_k ⊗ 1 + 1 ⊗ a_k)` in the graded tensor square.
/// Returns the coefficient of `a_L ⊗ a_R` keyed by `(mask L, mask R)`.
pub fn coproduct_oracle(k: IndexSet) -> Result<HashMap<(u16, u16), i32>> {
    let n = k.n();
    let mut acc: HashMap<(u16, u16), i32> = HashMap::from([((0, 0), 1)]);
    for i in k.members() {
        let mut next: HashMap<(u16, u16), i32> = HashMap::new();
        for (&(l, r), &c) in &acc {
            let left = IndexSet::from_mask(n, l)?;
            let right = IndexSet::from_mask(n, r)?;
            // (x ⊗ y)(a_i ⊗ 1) = (-1)^{|y|} x a_i ⊗ y
            let mut w = word_of(&PbwMonomial::a(left));
            w.push(Generator::A(i));
            for (m, s) in oracle_normalize(&w, n)?.terms() {
                let sign = if right.parity() == 1 { -1 } else { 1 };
                *next.entry((m.idx.mask(), r)).or_default() += c * sign * s.re as i32;
            }
            // (x ⊗ y)(1 ⊗ a_i) = x ⊗ y a_i
            let mut w = word_of(&PbwMonomial::a(right));
            w.push(Generator::A(i));
            for (m, s) in oracle_normalize(&w, n)?.terms() {
                *next.entry((l, m.idx.mask())).or_default() += c * s.re as i32;
            }
        }
        next.retain(|_, v| *v != 0);
        acc = next;
    }
    Ok(acc)
}

/// `Δ(γ)` expanded from primitives.
pub fn delta_gamma_oracle(n: usize) -> Result<HashMap<(u16, u16), i32>> {
    coproduct_oracle(IndexSet::full(n)?)
}

/// `(F·G)(u) = μ ∘ (F ⊗ G) ∘ Δ(u)` with `(F ⊗ G)(x ⊗ y) = (-1)^{|G||x|} F(x) G(y)`.
pub fn delta_product(f: &SuperFunction, g: &SuperFunction) -> Result<SuperFunction> {
    if f.n() != g.n() {
        return Err(Error::Dimension("mismatched ambient dimensions".into()));
    }
    let n = f.n();
    let mut out = SuperFunction::zero(n)?;
    for k in IndexSet::all(n) {
        let mut acc = ScalarFn::zero();
        for ((l, r), c) in coproduct_oracle(k)? {
            let (l, r) = (IndexSet::from_mask(n, l)?, IndexSet::from_mask(n, r)?);
            for (pg, gpart) in g.homogeneous_parts() {
                let (Some(fl), Some(gr)) = (f.component(&l), gpart.component(&r)) else { continue };
                let koszul = if pg * l.parity() == 1 { -1.0 } else { 1.0 };
                acc = acc.add(&fl.mul(gr)?.scale(Complex64::new(koszul * c as f64, 0.0)))?;
            }
        }
        out.set_component(k, acc)?;
    }
    Ok(out)
}

fn koszul(odd: bool) -> f64 {
    if odd {
        -1.0
    } else {
        1.0
    }
}

/// Trapezoid quadrature of `∫ f(x) w(x) dx` over the nodes covering `f`.
fn quad(f: &ScalarFn, w: impl Fn(f64) -> Complex64) -> Complex64 {
    f.quadrature_nodes(64.0).into_iter().map(|(x, h)| f.eval(x) * w(x) * h).sum()
}

/// `⟨F, G⟩ = ∫ (F·G)(γ)` with the Δ-based product and quadrature in `x`.
pub fn pairing_oracle(f: &SuperFunction, g: &SuperFunction) -> Result<Complex64> {
    let top = delta_product(f, g)?;
    Ok(match top.component(&IndexSet::full(f.n())?) {
        None => Complex64::new(0.0, 0.0),
        Some(h) => quad(h, |_| Complex64::new(1.0, 0.0)),
    })
}

/// `(F*G)(u; x) = (-1)^{|u|(|G|+|γ|) + |G||γ|} ⟨F, L_{u;x} i^*G⟩` for a monomial `u`,
/// with the pairing from [`pairing_oracle`].
pub fn convolution_oracle(f: &SuperFunction, g: &SuperFunction, u: &PbwMonomial, x: f64) -> Result<Complex64> {
    let n = f.n();
    let mono = PbwElement::monomial(*u, Complex64::new(1.0, 0.0));
    let mut acc = Complex64::new(0.0, 0.0);
    for (pg, part) in g.homogeneous_parts() {
        let (pg, pu) = (pg as usize, u.parity() as usize);
        let s = koszul((pu * (pg + n) + pg * n) % 2 == 1);
        acc += pairing_oracle(f, &left_action(&mono, x, &part.istar())?)? * s;
    }
    Ok(acc)
}

/// `F̂(ζ) = ∫ (F·π_{-ζ})(γ)`, with `π_{-ζ}(u; x) = e^{-iζx} dπ_{-ζ}(u)` an even
/// ℋ-valued function, `Δ(γ)` from [`delta_gamma_oracle`] and quadrature in `x`.
pub fn fourier_pairing_oracle(f: &SuperFunction, zeta: Complex64) -> Result<HMatrix> {
    let n = f.n();
    let spec = SpinSpec::new(n)?;
    let mut acc = DMatrix::zeros(spec.dim, spec.dim);
    for ((l, r), c) in delta_gamma_oracle(n)? {
        let Some(fl) = f.component(&IndexSet::from_mask(n, l)?) else { continue };
        let coeff = quad(fl, |x| (Complex64::new(0.0, -1.0) * zeta * x).exp()) * c as f64;
        let right = PbwElement::basis(0, IndexSet::from_mask(n, r)?);
        acc += dpi(&right, -zeta)?.into_entries() * coeff;
    }
    HMatrix::new(spec, -zeta, acc)
}

/// `⟨F⊗G, m^*Φ⟩` on `HC × HC` with orientation `γ⊗γ`, by double quadrature:
/// `Σ_{I,J} ε ∫∫ F(a_I; x) G(a_J; y) Φ(*a_I *a_J; x+y)` with
/// `ε = (-1)^{|G||I| + |*a_I||J| + (|I|+|J|)(|I^c|+|J^c|)}`.
pub fn mstar_pairing(f: &SuperFunction, g: &SuperFunction, phi: &SuperFunction) -> Result<Complex64> {
    let n = f.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for (pg, part) in g.homogeneous_parts() {
        for (i, fi) in f.components() {
            for (j, gj) in part.components() {
                let (ic, jc) = (i.complement(), j.complement());
                let star = hodge_sign(*i) as f64 * hodge_sign(*j) as f64;
                let word: Vec<Generator> = ic.members().into_iter().chain(jc.members()).map(Generator::A).collect();
                let uv = oracle_normalize(&word, n)?;
                let Some((m, c)) = uv.terms().next() else { continue };
                let Some(p) = phi.component(&m.idx) else { continue };
                let p = p.nth_derivative(m.zpow as usize);
                let (pi, pj) = (i.parity() as usize, j.parity() as usize);
                let e = koszul((pg as usize * pi + ic.parity() as usize * pj + (pi + pj) * (ic.parity() as usize + jc.parity() as usize)) % 2 == 1);
                let xs = fi.quadrature_nodes(64.0);
                let ys = gj.quadrature_nodes(64.0);
                let mut s = Complex64::new(0.0, 0.0);
                for &(x, wx) in &xs {
                    let fx = fi.eval(x) * wx;
                    for &(y, wy) in &ys {
                        s += fx * gj.eval(y) * p.eval(x + y) * wy;
                    }
                }
                acc += s * c * star * e;
            }
        }
    }
    Ok(acc)
}

/// Smooth approximant of `U`: every `c δ_{x0}^{(j)}` replaced by `c ρ_ε^{(j)}(x - x0)` with
/// `ρ_ε(x) = e^{-x²/ε²} / (ε√π)`, placed so that `pairing(U_ε, Φ) → dist_pair(U, Φ)`.
pub fn mollify(u: &CompactDistribution, eps: f64) -> Result<SuperFunction> {
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("mollifier width must be positive, got {eps}")));
    }
    let n = u.n();
    let mut out = SuperFunction::zero(n)?;
    for (j, terms) in u.components() {
        let jc = j.complement();
        let s = hodge_sign(jc) as f64 * koszul(j.parity() * jc.parity() == 1);
        let mut h = ScalarFn::zero();
        for t in terms {
            let c = t.coeff * s / (eps * std::f64::consts::PI.sqrt());
            let rho = ScalarFn::Gauss(GaussPoly::gaussian(c, 1.0 / (eps * eps), t.x0)?);
            h = h.add(&rho.nth_derivative(t.order as usize))?;
        }
        out.set_component(jc, h)?;
    }
    Ok(out)
}

/// `∫ e^{-αx²} dx = √(π/α)`.
pub fn gaussian_integral(alpha: f64) -> f64 {
    (std::f64::consts::PI / alpha).sqrt()
}

/// `∫ e^{-αx²} e^{-iζx} dx = √(π/α) e^{-ζ²/4α}`.
pub fn gaussian_fourier(alpha: f64, zeta: Complex64) -> Complex64 {
    (-zeta * zeta / (4.0 * alpha)).exp() * gaussian_integral(alpha)
}

/// `(e^{-αx²} * e^{-βx²})(x) = √(π/(α+β)) e^{-αβx²/(α+β)}`.
pub fn gaussian_convolution(alpha: f64, beta: f64, x: f64) -> f64 {
    (std::f64::consts::PI / (alpha + beta)).sqrt() * (-alpha * beta * x * x / (alpha + beta)).exp()
}
