//! Superfunctions `F` on the supergroup, stored through their components
//! `f_I = F(a_I)`.
//!
//! The central element acts by differentiation, `F(z^k a_I) = f_I^{(k)}`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::ScalarFn;
use crate::superalgebra::{
    antipode_monomial, check_dim, reorder_sign, IndexSet, PbwElement, PbwMonomial, SignedMonomial,
};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Parity of a superfunction or distribution.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    /// `0` or `1` for homogeneous values.
    pub fn bit(self) -> Option<u8> {
        match self {
            Parity::Even => Some(0),
            Parity::Odd => Some(1),
            Parity::Mixed => None,
        }
    }
}

pub(crate) fn sign(odd: bool) -> f64 {
    if odd {
        -1.0
    } else {
        1.0
    }
}

/// A superfunction with components indexed by subsets of `{1..n}`; absent components are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperFunction {
    n: usize,
    comps: BTreeMap<IndexSet, ScalarFn>,
}

impl SuperFunction {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(SuperFunction { n, comps: BTreeMap::new() })
    }

    pub fn new(n: usize, comps: BTreeMap<IndexSet, ScalarFn>) -> Result<Self> {
        check_dim(n)?;
        if let Some(bad) = comps.keys().find(|i| i.n() != n) {
            return Err(Error::Dimension(format!("component {bad} has n = {}, expected {n}", bad.n())));
        }
        let comps = comps.into_iter().filter(|(_, f)| !f.is_zero()).collect();
        Ok(SuperFunction { n, comps })
    }

    /// `f ⊗ ξ^I`.
    pub fn single(idx: IndexSet, f: impl Into<ScalarFn>) -> Self {
        let mut comps = BTreeMap::new();
        let f = f.into();
        if !f.is_zero() {
            comps.insert(idx, f);
        }
        SuperFunction { n: idx.n(), comps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> impl Iterator<Item = (&IndexSet, &ScalarFn)> {
        self.comps.iter()
    }

    pub fn component(&self, idx: &IndexSet) -> Option<&ScalarFn> {
        self.comps.get(idx)
    }

    pub fn set_component(&mut self, idx: IndexSet, f: ScalarFn) -> Result<()> {
        if idx.n() != self.n {
            return Err(Error::Dimension(format!("component {idx} does not match n = {}", self.n)));
        }
        if f.is_zero() {
            self.comps.remove(&idx);
        } else {
            self.comps.insert(idx, f);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn parity(&self) -> Parity {
        let mut it = self.comps.keys().map(|i| i.parity());
        match it.next() {
            None => Parity::Even,
            Some(p) if it.all(|q| q == p) => {
                if p == 0 {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            }
            _ => Parity::Mixed,
        }
    }

    /// Splits into (even part, odd part).
    pub fn parity_parts(&self) -> (SuperFunction, SuperFunction) {
        let mut even = SuperFunction { n: self.n, comps: BTreeMap::new() };
        let mut odd = even.clone();
        for (i, f) in &self.comps {
            if i.parity() == 0 {
                even.comps.insert(*i, f.clone());
            } else {
                odd.comps.insert(*i, f.clone());
            }
        }
        (even, odd)
    }

    /// Nonzero homogeneous parts with their parity bit.
    pub fn homogeneous_parts(&self) -> Vec<(u8, SuperFunction)> {
        let (e, o) = self.parity_parts();
        [(0, e), (1, o)].into_iter().filter(|(_, f)| !f.is_zero()).collect()
    }

    pub fn map(&self, f: impl Fn(&IndexSet, &ScalarFn) -> ScalarFn) -> SuperFunction {
        let comps = self.comps.iter().map(|(i, g)| (*i, f(i, g))).filter(|(_, g)| !g.is_zero()).collect();
        SuperFunction { n: self.n, comps }
    }

    pub fn scale(&self, c: Complex64) -> SuperFunction {
        self.map(|_, f| f.scale(c))
    }

    pub fn add(&self, other: &SuperFunction) -> Result<SuperFunction> {
        same_n(self.n, other.n)?;
        let mut out = self.clone();
        for (i, g) in &other.comps {
            let sum = match out.comps.get(i) {
                Some(f) => f.add(g)?,
                None => g.clone(),
            };
            out.set_component(*i, sum)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SuperFunction) -> Result<SuperFunction> {
        self.add(&other.scale(-ONE))
    }

    /// `L_x F`: every component shifted, `(L_x F)(u; y) = F(u; y - x)`.
    pub fn translate(&self, x: f64) -> SuperFunction {
        self.map(|_, f| f.translate(x))
    }

    /// `(i^*F)(u; x) = F(S(u); -x)`.
    pub fn istar(&self) -> SuperFunction {
        self.map(|i, f| f.reflect().scale(Complex64::new(sign(i.parity() == 1), 0.0)))
    }

    /// Largest componentwise `|f_I(x) - g_I(x)|` over the points `xs`.
    pub fn max_abs_diff(&self, other: &SuperFunction, xs: &[f64]) -> f64 {
        let mut keys: Vec<&IndexSet> = self.comps.keys().chain(other.comps.keys()).collect();
        keys.sort();
        keys.dedup();
        let zero = ScalarFn::zero();
        keys.into_iter()
            .map(|i| {
                let f = self.comps.get(i).unwrap_or(&zero);
                let g = other.comps.get(i).unwrap_or(&zero);
                xs.iter().map(|&x| (f.eval(x) - g.eval(x)).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|f_I(x)|` over the points `xs`.
    pub fn max_abs_on(&self, xs: &[f64]) -> f64 {
        self.comps.values().map(|f| f.max_abs_on(xs)).fold(0.0, f64::max)
    }

    /// True if any grid component was differentiated beyond the precision limit.
    pub fn precision_warning(&self) -> bool {
        self.comps.values().any(ScalarFn::precision_warning)
    }

    /// Whether every component uses the Gaussian-polynomial backend.
    pub fn is_gauss(&self) -> bool {
        self.comps.values().all(ScalarFn::is_gauss)
    }

    /// `F(±z^k a_I) = ± f_I^{(k)}`.
    pub(crate) fn eval_signed(&self, m: &SignedMonomial) -> Option<ScalarFn> {
        let f = self.comps.get(&m.monomial.idx)?;
        Some(f.nth_derivative(m.monomial.zpow as usize).scale(Complex64::new(m.sign as f64, 0.0)))
    }
}

fn same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("mismatched ambient dimensions {a} and {b}")));
    }
    Ok(())
}

fn sum_all(parts: impl IntoIterator<Item = Result<ScalarFn>>) -> Result<ScalarFn> {
    parts.into_iter().try_fold(ScalarFn::zero(), |acc, f| acc.add(&f?))
}

/// `F(u)`: linear in `u`, with `F(z^k a_I) = f_I^{(k)}`.
pub fn evaluate(f: &SuperFunction, u: &PbwElement) -> Result<ScalarFn> {
    same_n(f.n, u.n())?;
    sum_all(u.terms().filter_map(|(m, c)| {
        f.comps.get(&m.idx).map(|g| Ok(g.nth_derivative(m.zpow as usize).scale(*c)))
    }))
}

/// The pointwise product: `(F·G)(a_K) = Σ_{I⊔J=K} ε(I,J) (-1)^{#I·#J} f_I g_J`,
/// with `ε(I,J)` the shuffle sign of `a_I a_J = ε(I,J) a_K`.
pub fn product(f: &SuperFunction, g: &SuperFunction) -> Result<SuperFunction> {
    same_n(f.n, g.n)?;
    let mut out = SuperFunction::zero(f.n)?;
    for (i, fi) in &f.comps {
        for (j, gj) in &g.comps {
            if i.mask() & j.mask() != 0 {
                continue;
            }
            let k = IndexSet::from_mask(f.n, i.mask() | j.mask())?;
            let s = reorder_sign(i.mask(), j.mask()) as f64 * sign(i.parity() * j.parity() == 1);
            let term = fi.mul(gj)?.scale(Complex64::new(s, 0.0));
            let sum = match out.comps.get(&k) {
                Some(acc) => acc.add(&term)?,
                None => term,
            };
            out.set_component(k, sum)?;
        }
    }
    Ok(out)
}

/// `L_u F` for homogeneous `F` of parity `pf` and a single monomial `m`:
/// `(L_m F)(a_J) = (-1)^{|m| pf} F(S(m) a_J)`.
fn left_action_monomial(f: &SuperFunction, pf: u8, m: &PbwMonomial, c: Complex64) -> Result<SuperFunction> {
    let s_m = antipode_monomial(m);
    let k_sign = sign(m.parity() * pf == 1);
    let mut out = SuperFunction::zero(f.n)?;
    for j in IndexSet::all(f.n) {
        let p = s_m.monomial.mul(&PbwMonomial::a(j));
        let signed = SignedMonomial { sign: p.sign * s_m.sign, monomial: p.monomial };
        if let Some(v) = f.eval_signed(&signed) {
            out.set_component(j, v.scale(c * k_sign))?;
        }
    }
    Ok(out)
}

/// `L_{u;x} F`: `(L_u F)(v; y) = (-1)^{|u||F|} F(S(u) v; y)` followed by a shift by `x`;
/// applied per parity part of `F` and per term of `u`.
pub fn left_action(u: &PbwElement, x: f64, f: &SuperFunction) -> Result<SuperFunction> {
    same_n(f.n, u.n())?;
    let mut out = SuperFunction::zero(f.n)?;
    for (pf, part) in f.homogeneous_parts() {
        for (m, c) in u.terms() {
            out = out.add(&left_action_monomial(&part, pf, m, *c)?)?;
        }
    }
    Ok(out.translate(x))
}

/// Value of a Schwartz seminorm and whether it is finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seminorm {
    pub value: f64,
    pub finite: bool,
}

/// `s_{j,u}(F) = sup_x |x^j (L_u F)(1; x)|`.
pub fn schwartz_seminorm(f: &SuperFunction, j: u32, u: &PbwElement) -> Result<Seminorm> {
    let one = IndexSet::empty(f.n)?;
    let g = left_action(u, 0.0, f)?;
    match g.component(&one) {
        None => Ok(Seminorm { value: 0.0, finite: true }),
        Some(h) => {
            let (value, finite) = h.weighted_sup(j);
            Ok(Seminorm { value: if finite { value } else { f64::INFINITY }, finite })
        }
    }
}
