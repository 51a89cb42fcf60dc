//! Seeded random inputs for property checks.

use num_complex::Complex64;
use rand::Rng;

use crate::scalar::{GaussPoly, GaussTerm, ScalarFn};
use crate::superalgebra::IndexSet;
use crate::superfunction::SuperFunction;

/// Ranges for random Gaussian-polynomial components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub max_degree: usize,
    pub alpha: (f64, f64),
    pub mu: (f64, f64),
    /// Probability that a component of the requested parity is present.
    pub fill: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec { max_degree: 2, alpha: (0.5, 2.0), mu: (-1.5, 1.5), fill: 0.7 }
    }
}

fn coeff(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// One random term `p(x) e^{-α(x-μ)²}` with real `α`, `μ`.
pub fn random_gausspoly(rng: &mut impl Rng, spec: &RandomSpec) -> GaussPoly {
    let deg = rng.gen_range(0..=spec.max_degree);
    let poly = (0..=deg).map(|_| coeff(rng)).collect();
    let alpha = Complex64::new(rng.gen_range(spec.alpha.0..=spec.alpha.1), 0.0);
    let mu = Complex64::new(rng.gen_range(spec.mu.0..=spec.mu.1), 0.0);
    GaussPoly::new(vec![GaussTerm::new(poly, alpha, mu).expect("alpha range is positive")])
}

/// A random superfunction; `parity` restricts components to `#I ≡ parity (mod 2)`.
/// At least one component is always present.
pub fn random_superfunction(n: usize, parity: Option<u8>, rng: &mut impl Rng, spec: &RandomSpec) -> SuperFunction {
    let allowed: Vec<IndexSet> =
        IndexSet::all(n).filter(|i| parity.is_none_or(|p| i.parity() == p)).collect();
    let mut f = SuperFunction::zero(n).expect("valid dimension");
    for i in &allowed {
        if rng.gen_bool(spec.fill) {
            f.set_component(*i, ScalarFn::Gauss(random_gausspoly(rng, spec))).expect("matching n");
        }
    }
    if f.is_zero() {
        let i = allowed[rng.gen_range(0..allowed.len())];
        f.set_component(i, ScalarFn::Gauss(random_gausspoly(rng, spec))).expect("matching n");
    }
    f
}
