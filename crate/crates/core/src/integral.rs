//! The invariant (Berezin) integral, the invariant pairing, and compactly
//! supported distributions of finite order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::{ScalarFn, GRID_DIFF_LIMIT};
use crate::superalgebra::{check_dim, delta_gamma, hodge_sign, IndexSet};
use crate::superfunction::{sign, Parity, SuperFunction};

/// `∫ F = ∫_ℝ F(γ; x) dx`.
pub fn berezin_integral(f: &SuperFunction) -> Result<Complex64> {
    match f.component(&IndexSet::full(f.n())?) {
        None => Ok(Complex64::new(0.0, 0.0)),
        Some(top) => top.integral(),
    }
}

/// `⟨F, G⟩ = Σ_I (-1)^{|a_I||*a_I|} ∫ F(a_I) G(*a_I)`, summed over the Sweedler terms of `Δ(γ)`.
pub fn pairing(f: &SuperFunction, g: &SuperFunction) -> Result<Complex64> {
    if f.n() != g.n() {
        return Err(Error::Dimension(format!("mismatched ambient dimensions {} and {}", f.n(), g.n())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (left, right) in delta_gamma(f.n())? {
        let (Some(fi), Some(gi)) = (f.component(&left.idx), g.component(&right.monomial.idx)) else { continue };
        let s = right.sign as f64 * sign(left.parity() * right.monomial.parity() == 1);
        acc += fi.mul(gi)?.integral()? * s;
    }
    Ok(acc)
}

/// `c · δ_{x0}^{(order)}`, acting by `φ ↦ c (-1)^order φ^{(order)}(x0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointDerivative {
    pub order: u32,
    pub x0: f64,
    pub coeff: Complex64,
}

impl PointDerivative {
    pub fn apply(&self, phi: &ScalarFn) -> Complex64 {
        let s = sign(self.order % 2 == 1);
        phi.nth_derivative(self.order as usize).eval(self.x0) * self.coeff * s
    }

    /// `(δ_{x0}^{(j)} * f)(x) = f^{(j)}(x - x0)`, scaled by the coefficient.
    pub fn convolve(&self, f: &ScalarFn) -> ScalarFn {
        f.nth_derivative(self.order as usize).translate(self.x0).scale(self.coeff)
    }

    /// `∫ δ_{x0}^{(j)}(x) e^{-iζx} dx = (iζ)^j e^{-iζ x0}`, scaled by the coefficient.
    pub fn fourier_at(&self, zeta: Complex64) -> Complex64 {
        let i = Complex64::new(0.0, 1.0);
        self.coeff * (i * zeta).powu(self.order) * (-i * zeta * self.x0).exp()
    }
}

/// A compactly supported distribution with point-supported components
/// `U_I = Σ c δ_{x0}^{(j)}`, paired as `⟨U, Φ⟩ = Σ_I U_I(Φ(a_I))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactDistribution {
    n: usize,
    comps: BTreeMap<IndexSet, Vec<PointDerivative>>,
}

impl CompactDistribution {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(CompactDistribution { n, comps: BTreeMap::new() })
    }

    pub fn new(n: usize, comps: BTreeMap<IndexSet, Vec<PointDerivative>>) -> Result<Self> {
        check_dim(n)?;
        for (i, terms) in &comps {
            if i.n() != n {
                return Err(Error::Dimension(format!("component {i} does not match n = {n}")));
            }
            for t in terms {
                if t.order > GRID_DIFF_LIMIT {
                    return Err(Error::OrderOverflow { order: t.order as usize, limit: GRID_DIFF_LIMIT as usize });
                }
                if !t.x0.is_finite() || !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                    return Err(Error::Invalid("non-finite distribution term".into()));
                }
            }
        }
        let comps = comps.into_iter().filter(|(_, t)| !t.is_empty()).collect();
        Ok(CompactDistribution { n, comps })
    }

    /// `δ_0` in the `∅` component: `⟨U, Φ⟩ = Φ(1; 0)`.
    pub fn delta_at_identity(n: usize) -> Result<Self> {
        let term = PointDerivative { order: 0, x0: 0.0, coeff: Complex64::new(1.0, 0.0) };
        Self::new(n, BTreeMap::from([(IndexSet::empty(n)?, vec![term])]))
    }

    /// A single point term in component `I`.
    pub fn point(idx: IndexSet, term: PointDerivative) -> Result<Self> {
        Self::new(idx.n(), BTreeMap::from([(idx, vec![term])]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> impl Iterator<Item = (&IndexSet, &Vec<PointDerivative>)> {
        self.comps.iter()
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

    /// Largest derivative order.
    pub fn max_order(&self) -> u32 {
        self.comps.values().flatten().map(|t| t.order).max().unwrap_or(0)
    }

    /// `U(a_I) = (-1)^{#I #I^c} sgn(σ_I) U_{I^c}`, the value on the basis element `a_I`.
    pub fn sweedler(&self, idx: IndexSet) -> Vec<PointDerivative> {
        let c = idx.complement();
        let s = hodge_sign(idx) as f64 * sign(idx.parity() * c.parity() == 1);
        self.comps
            .get(&c)
            .map(|ts| ts.iter().map(|t| PointDerivative { coeff: t.coeff * s, ..*t }).collect())
            .unwrap_or_default()
    }

    /// Riemann-sum approximation of a smooth superfunction, so that
    /// `dist_pair(U, Φ) ≈ pairing(F, Φ)`.
    pub fn from_smooth(f: &SuperFunction, x0: f64, dx: f64, samples: usize) -> Result<Self> {
        let n = f.n();
        let mut comps = BTreeMap::new();
        for j in IndexSet::all(n) {
            let jc = j.complement();
            let Some(fc) = f.component(&jc) else { continue };
            let s = hodge_sign(jc) as f64 * sign(j.parity() * jc.parity() == 1);
            let terms: Vec<PointDerivative> = (0..samples)
                .map(|k| {
                    let x = x0 + k as f64 * dx;
                    PointDerivative { order: 0, x0: x, coeff: fc.eval(x) * dx * s }
                })
                .collect();
            comps.insert(j, terms);
        }
        Self::new(n, comps)
    }
}

/// `⟨U, Φ⟩ = Σ_I U_I(Φ(a_I))`.
pub fn dist_pair(u: &CompactDistribution, phi: &SuperFunction) -> Result<Complex64> {
    if u.n != phi.n() {
        return Err(Error::Dimension(format!("mismatched ambient dimensions {} and {}", u.n, phi.n())));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, terms) in &u.comps {
        let Some(p) = phi.component(i) else { continue };
        for t in terms {
            acc += t.apply(p);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_superfunction, RandomSpec};
    use crate::scalar::{GaussPoly, GridConfig};
    use crate::superalgebra::{antipode, PbwElement};
    use crate::superfunction::{left_action, product};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn gauss(a: f64) -> ScalarFn {
        ScalarFn::Gauss(GaussPoly::gaussian(ONE, a, 0.0).unwrap())
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn bit(p: Parity) -> u8 {
        p.bit().unwrap()
    }

    #[test]
    fn integral_examples() {
        for n in 1..=5 {
            let f = SuperFunction::single(IndexSet::empty(n).unwrap(), gauss(1.0));
            assert_eq!(berezin_integral(&f).unwrap(), Complex64::new(0.0, 0.0));
            let top = SuperFunction::single(IndexSet::full(n).unwrap(), gauss(1.0));
            assert!((berezin_integral(&top).unwrap() - PI.sqrt()).norm() < 1e-15);
        }
    }

    #[test]
    fn integral_is_left_invariant() {
        let mut r = rng(11);
        for n in 1..=5 {
            for _ in 0..5 {
                let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let base = berezin_integral(&f).unwrap();
                let one = PbwElement::one(n).unwrap();
                let shifted = berezin_integral(&left_action(&one, 0.83, &f).unwrap()).unwrap();
                assert!((shifted - base).norm() < 1e-10);
                assert!(berezin_integral(&left_action(&PbwElement::z(n).unwrap(), 0.0, &f).unwrap()).unwrap().norm() < 1e-10);
                for i in 1..=n {
                    let v = berezin_integral(&left_action(&PbwElement::a(n, i).unwrap(), 0.0, &f).unwrap()).unwrap();
                    assert!(v.norm() < 1e-10, "n={n} i={i} {v}");
                }
            }
        }
    }

    #[test]
    fn pairing_examples() {
        for n in 1..=4 {
            let f = SuperFunction::single(IndexSet::empty(n).unwrap(), gauss(1.0));
            let g = SuperFunction::single(IndexSet::full(n).unwrap(), gauss(1.0));
            assert!((pairing(&f, &g).unwrap() - (PI / 2.0).sqrt()).norm() < 1e-15);
        }
    }

    #[test]
    fn pairing_agrees_with_integral_of_product() {
        let mut r = rng(12);
        let grid = GridConfig::default();
        for n in 1..=4 {
            for _ in 0..8 {
                let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let a = pairing(&f, &g).unwrap();
                let b = berezin_integral(&product(&f, &g).unwrap()).unwrap();
                assert!((a - b).norm() < 1e-12);
                let sample = |h: &SuperFunction| {
                    h.map(|_, s| match s {
                        ScalarFn::Gauss(p) => ScalarFn::Grid(grid.sample(p)),
                        o => o.clone(),
                    })
                };
                let c = pairing(&sample(&f), &sample(&g)).unwrap();
                assert!((a - c).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn pairing_parity_and_symmetry() {
        let mut r = rng(13);
        for n in 1..=4 {
            for (pf, pg) in [(0u8, 0u8), (0, 1), (1, 1)] {
                let f = random_superfunction(n, Some(pf), &mut r, &RandomSpec::default());
                let g = random_superfunction(n, Some(pg), &mut r, &RandomSpec::default());
                let fg = pairing(&f, &g).unwrap();
                if (pf as usize + pg as usize + n) % 2 == 1 {
                    assert_eq!(fg, Complex64::new(0.0, 0.0));
                }
                let gf = pairing(&g, &f).unwrap() * sign(pf * pg == 1);
                assert!((fg - gf).norm() < 1e-12);
                assert_eq!(bit(f.parity()), pf);
            }
        }
    }

    #[test]
    fn pairing_invariance() {
        // ⟨L_{u;x}F, G⟩ = (-1)^{|F||u|} ⟨F, L_{S(u);-x}G⟩
        let mut r = rng(14);
        for n in 1..=4 {
            for pf in [0u8, 1] {
                let f = random_superfunction(n, Some(pf), &mut r, &RandomSpec::default());
                let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
                for u in IndexSet::all(n) {
                    for k in 0..2 {
                        let u = PbwElement::basis(k, u);
                        let x = 0.45;
                        let lhs = pairing(&left_action(&u, x, &f).unwrap(), &g).unwrap();
                        let rhs = pairing(&f, &left_action(&antipode(&u), -x, &g).unwrap()).unwrap()
                            * sign(pf * u.parity().unwrap() == 1);
                        assert!((lhs - rhs).norm() < 1e-11, "n={n} u={u}");
                    }
                }
            }
        }
    }

    #[test]
    fn pairing_is_nondegenerate() {
        for n in 1..=5 {
            for i in IndexSet::all(n) {
                let f = SuperFunction::single(i, gauss(1.0));
                let g = SuperFunction::single(i.complement(), gauss(1.0));
                assert!(pairing(&f, &g).unwrap().norm() > 1e-3);
            }
        }
    }

    #[test]
    fn distribution_examples() {
        let mut r = rng(15);
        for n in 1..=4 {
            let phi = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let one = IndexSet::empty(n).unwrap();
            let phi1 = phi.component(&one).cloned().unwrap_or(ScalarFn::zero());
            let d = CompactDistribution::delta_at_identity(n).unwrap();
            assert!((dist_pair(&d, &phi).unwrap() - phi1.eval(0.0)).norm() < 1e-15);
            assert_eq!(dist_pair(&CompactDistribution::zero(n).unwrap(), &phi).unwrap(), Complex64::new(0.0, 0.0));
            let dp = CompactDistribution::point(one, PointDerivative { order: 1, x0: 0.0, coeff: ONE }).unwrap();
            assert!((dist_pair(&dp, &phi).unwrap() + phi1.derivative().eval(0.0)).norm() < 1e-15);
        }
        let too_high = PointDerivative { order: 9, x0: 0.0, coeff: ONE };
        assert!(matches!(
            CompactDistribution::point(IndexSet::empty(2).unwrap(), too_high),
            Err(Error::OrderOverflow { .. })
        ));
    }

    #[test]
    fn smooth_embedding_matches_pairing() {
        let mut r = rng(16);
        for n in 1..=3 {
            let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let phi = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let u = CompactDistribution::from_smooth(&f, -12.0, 1.0 / 32.0, 768).unwrap();
            let lhs = dist_pair(&u, &phi).unwrap();
            let rhs = pairing(&f, &phi).unwrap();
            assert!((lhs - rhs).norm() < 1e-10, "n={n}: {lhs} vs {rhs}");
            for i in IndexSet::all(n) {
                let sw: Complex64 = u.sweedler(i).iter().map(|t| t.coeff).sum::<Complex64>();
                let want = f.component(&i).map(|h| h.integral().unwrap()).unwrap_or_default();
                assert!((sw - want).norm() < 1e-10);
            }
        }
    }
}
