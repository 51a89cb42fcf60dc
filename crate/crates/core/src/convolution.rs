//! Convolution of superfunctions and of compact distributions with
//! superfunctions, the Fourier transform of pointwise products, Sobolev norms
//! and the Banach-algebra inequality.
//!
//! Normalization: `(F*G)(u;x) = (-1)^{|u|(|G|+|γ|) + |G||γ|} ⟨F, L_{u;x} i^*G⟩`,
//! so that `(F*G)^ = F̂ Ĝ` for all parities.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::InverseConfig;
use crate::integral::{pairing, CompactDistribution};
use crate::scalar::{GaussPoly, ScalarFn};
use crate::spinrep::{dpi_monomial, mono_generators, HMatrix, SpinSpec};
use crate::superalgebra::{
    antipode_monomial, check_dim, hodge_star, triple_delta, IndexSet, PbwElement, PbwMonomial, SignedMonomial,
};
use crate::superfunction::{left_action, sign, SuperFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `S(*a_I) a_K = sign z^k a_J` for every `(I, K)`, indexed `I.mask << n | K.mask`.
fn sign_table(n: usize) -> Arc<Vec<SignedMonomial>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<SignedMonomial>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut table = Vec::with_capacity(1 << (2 * n));
            for i in IndexSet::all(n) {
                let star = hodge_star(i);
                let s = antipode_monomial(&star.monomial);
                for k in IndexSet::all(n) {
                    let p = s.monomial.mul(&PbwMonomial::a(k));
                    table.push(SignedMonomial { sign: star.sign * s.sign * p.sign, monomial: p.monomial });
                }
            }
            Arc::new(table)
        })
        .clone()
}

fn same_n(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("mismatched ambient dimensions {a} and {b}")));
    }
    Ok(())
}

fn accumulate(out: &mut BTreeMap<IndexSet, ScalarFn>, k: IndexSet, term: ScalarFn) -> Result<()> {
    let sum = match out.remove(&k) {
        Some(acc) => acc.add(&term)?,
        None => term,
    };
    out.insert(k, sum);
    Ok(())
}

/// Shared body of the smooth and distributional fast paths:
/// `(X*G)(a_K) = (-1)^{|G||γ|} Σ_I (-1)^{|I||G|} X(a_I) * G(S(*a_I) a_K)` per parity part of `G`.
fn convolve_with(
    n: usize,
    left: impl Fn(IndexSet, &ScalarFn) -> Result<Option<ScalarFn>>,
    g: &SuperFunction,
) -> Result<SuperFunction> {
    let table = sign_table(n);
    let mut out = BTreeMap::new();
    for (pg, part) in g.homogeneous_parts() {
        let outer = sign(pg as usize * n % 2 == 1);
        for i in IndexSet::all(n) {
            let s = outer * sign(i.parity() * pg == 1);
            for k in IndexSet::all(n) {
                let entry = &table[((i.mask() as usize) << n) | k.mask() as usize];
                let Some(gv) = part.eval_signed(entry) else { continue };
                if let Some(h) = left(i, &gv)? {
                    accumulate(&mut out, k, h.scale(Complex64::new(s, 0.0)))?;
                }
            }
        }
    }
    SuperFunction::new(n, out)
}

/// `F * G` by the coordinate formula.
pub fn convolve(f: &SuperFunction, g: &SuperFunction) -> Result<SuperFunction> {
    same_n(f.n(), g.n())?;
    convolve_with(f.n(), |i, gv| f.component(&i).map(|fi| fi.convolve(gv)).transpose(), g)
}

/// `(F*G)(u; x)` from the defining pairing `⟨F, L_{u;x} i^*G⟩`.
pub fn convolve_via_pairing(f: &SuperFunction, g: &SuperFunction, u: &PbwElement, x: f64) -> Result<Complex64> {
    same_n(f.n(), g.n())?;
    same_n(f.n(), u.n())?;
    let n = f.n();
    let mut acc = ZERO;
    for (pg, part) in g.homogeneous_parts() {
        let ig = part.istar();
        for (m, c) in u.terms() {
            let pu = m.parity() as usize;
            let s = sign((pu * (pg as usize + n) + pg as usize * n) % 2 == 1);
            let mono = PbwElement::monomial(*m, Complex64::new(1.0, 0.0));
            acc += c * pairing(f, &left_action(&mono, x, &ig)?)? * s;
        }
    }
    Ok(acc)
}

/// `U * F` for a point-supported distribution `U`, by the same coordinate formula
/// with `U(a_I)` in place of `F(a_I)`.
pub fn convolve_dist(u: &CompactDistribution, f: &SuperFunction) -> Result<SuperFunction> {
    same_n(u.n(), f.n())?;
    convolve_with(
        u.n(),
        |i, gv| {
            let pts = u.sweedler(i);
            if pts.is_empty() {
                return Ok(None);
            }
            let mut acc = ScalarFn::zero();
            for p in &pts {
                acc = acc.add(&p.convolve(gv))?;
            }
            Ok(Some(acc))
        },
        f,
    )
}

/// `(f̂ * ĝ)(ζ)`: closed form for Gaussian polynomials, midpoint quadrature otherwise.
fn fourier_convolution(f: &ScalarFn, g: &ScalarFn, zeta: f64, quad: &InverseConfig) -> Result<Complex64> {
    if let (ScalarFn::Gauss(a), ScalarFn::Gauss(b)) = (f, g) {
        return Ok(a.fourier().convolve(&b.fourier()).eval(Complex64::new(zeta, 0.0)));
    }
    let nodes = quad.nodes();
    let h = nodes[1] - nodes[0];
    let mut acc = ZERO;
    for eta in nodes {
        acc += f.fourier_at(Complex64::new(eta, 0.0))? * g.fourier_at(Complex64::new(zeta - eta, 0.0))?;
    }
    Ok(acc * h)
}

/// `(F·G)^(ζ) = (1/2π) Σ_{A⊔B⊔C} sgn (-1)^{|A||B|} (f̂_A * ĝ_B)(ζ) dπ_{-ζ}(a_C)`.
pub fn fourier_of_product(f: &SuperFunction, g: &SuperFunction, zeta: f64) -> Result<HMatrix> {
    same_n(f.n(), g.n())?;
    let n = f.n();
    let spec = SpinSpec::new(n)?;
    let z = Complex64::new(-zeta, 0.0);
    let gens = mono_generators(n, z);
    let quad = InverseConfig::default();
    let mut m = DMatrix::zeros(spec.dim, spec.dim);
    for t in triple_delta(n)? {
        let (Some(fa), Some(gb)) = (f.component(&t.a), g.component(&t.b)) else { continue };
        let s = t.sign as f64 * sign(t.a.parity() * t.b.parity() == 1) / (2.0 * std::f64::consts::PI);
        let v = fourier_convolution(fa, gb, zeta, &quad)? * s;
        dpi_monomial(&gens, &PbwMonomial::a(t.c), z, spec.dim).add_into(&mut m, v);
    }
    HMatrix::new(spec, z, m)
}

/// `‖F‖_{k,p} = (Σ_{j+#I≤k} ‖f_I^{(j)}‖_p^p)^{1/p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevNorm {
    pub k: usize,
    pub p: f64,
    pub value: f64,
}

pub fn sobolev_norm(f: &SuperFunction, k: usize, p: f64) -> Result<SobolevNorm> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Invalid(format!("p must lie in [1, inf), got {p}")));
    }
    let mut sum = 0.0;
    for (i, fi) in f.components() {
        let Some(top) = k.checked_sub(i.len()) else { continue };
        let mut d = fi.clone();
        for j in 0..=top {
            if j > 0 {
                d = d.derivative();
            }
            sum += d.lp_norm(p)?.powf(p);
        }
    }
    Ok(SobolevNorm { k, p, value: sum.powf(1.0 / p) })
}

/// `‖F*G‖_{n,1}` against `‖F‖_{n,1} ‖G‖_{n,1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BanachReport {
    pub lhs: f64,
    pub norm_f: f64,
    pub norm_g: f64,
    pub slack: f64,
    pub pass: bool,
}

impl BanachReport {
    pub fn rhs(&self) -> f64 {
        self.norm_f * self.norm_g
    }

    /// `lhs / rhs`, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.rhs() == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs()
        }
    }
}

pub const BANACH_SLACK: f64 = 1e-8;

pub fn banach_check(f: &SuperFunction, g: &SuperFunction) -> Result<BanachReport> {
    same_n(f.n(), g.n())?;
    let n = f.n();
    check_dim(n)?;
    let lhs = sobolev_norm(&convolve(f, g)?, n, 1.0)?.value;
    let norm_f = sobolev_norm(f, n, 1.0)?.value;
    let norm_g = sobolev_norm(g, n, 1.0)?.value;
    let pass = lhs <= norm_f * norm_g + BANACH_SLACK;
    Ok(BanachReport { lhs, norm_f, norm_g, slack: BANACH_SLACK, pass })
}

/// `e^{-x²/2} * e^{-x²/2} = √π e^{-x²/4}`, as a Gaussian polynomial.
pub fn gaussian_self_convolution() -> GaussPoly {
    let g = GaussPoly::gaussian(Complex64::new(1.0, 0.0), 0.5, 0.0).expect("valid Gaussian");
    g.convolve(&g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::transform;
    use crate::integral::PointDerivative;
    use crate::random::{random_superfunction, RandomSpec};
    use crate::scalar::{GridConfig, GridFn};
    use crate::superfunction::{evaluate, product, Parity};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn gauss(a: f64, mu: f64) -> ScalarFn {
        ScalarFn::Gauss(GaussPoly::gaussian(ONE, a, mu).unwrap())
    }

    fn xs() -> Vec<f64> {
        (0..81).map(|k| -8.0 + 0.2 * k as f64).collect()
    }

    fn to_grid(f: &SuperFunction, grid: &GridConfig) -> SuperFunction {
        f.map(|_, s| match s {
            ScalarFn::Gauss(p) => ScalarFn::Grid(grid.sample(p)),
            o => o.clone(),
        })
    }

    #[test]
    fn gaussian_example() {
        let h = gaussian_self_convolution();
        for x in [-2.0, 0.0, 0.5, 3.0] {
            let want = PI.sqrt() * (-x * x / 4.0f64).exp();
            assert!((h.eval(c(x)) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn coordinate_examples() {
        // n = 1: (f ⊗ ξ^∅) * (g ⊗ ξ^∅) = ±(f*g)' ⊗ ξ^{1}
        let e = IndexSet::empty(1).unwrap();
        let f = SuperFunction::single(e, gauss(1.0, 0.3));
        let g = SuperFunction::single(e, gauss(0.7, -0.2));
        let h = convolve(&f, &g).unwrap();
        assert_eq!(h.components().count(), 1);
        let fg = gauss(1.0, 0.3).convolve(&gauss(0.7, -0.2)).unwrap().derivative();
        let got = h.component(&IndexSet::full(1).unwrap()).unwrap();
        let s = (got.eval(0.4) / fg.eval(0.4)).re;
        assert!((s.abs() - 1.0).abs() < 1e-12);
        for x in xs() {
            assert!((got.eval(x) - fg.eval(x) * s).norm() < 1e-12);
        }
        // (f ⊗ ξ^{1..n}) * (g ⊗ ξ^∅) = ±(f*g) ⊗ ξ^∅
        for n in 1..=4 {
            let f = SuperFunction::single(IndexSet::full(n).unwrap(), gauss(1.0, 0.0));
            let g = SuperFunction::single(IndexSet::empty(n).unwrap(), gauss(0.5, 0.0));
            let h = convolve(&f, &g).unwrap();
            let keys: Vec<_> = h.components().map(|(i, _)| *i).collect();
            assert_eq!(keys, vec![IndexSet::empty(n).unwrap()]);
            let fg = gauss(1.0, 0.0).convolve(&gauss(0.5, 0.0)).unwrap();
            let r = h.component(&keys[0]).unwrap().eval(0.1) / fg.eval(0.1);
            assert!((r.norm() - 1.0).abs() < 1e-12 && r.im.abs() < 1e-12);
        }
    }

    #[test]
    fn convolution_theorem_gauss_and_grid() {
        let mut r = rng(31);
        let grid = GridConfig::default();
        for n in 1..=4 {
            for (pf, pg) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                let f = random_superfunction(n, Some(pf), &mut r, &RandomSpec::default());
                let g = random_superfunction(n, Some(pg), &mut r, &RandomSpec::default());
                let lhs = transform(&convolve(&f, &g).unwrap()).unwrap();
                let (tf, tg) = (transform(&f).unwrap(), transform(&g).unwrap());
                let (gf, gg) = (to_grid(&f, &grid), to_grid(&g, &grid));
                let lhs_grid = transform(&convolve(&gf, &gg).unwrap()).unwrap();
                for zeta in [-1.9, -0.6, 0.45, 1.3] {
                    let z = c(zeta);
                    let rhs = tf.eval(z).matmul(&tg.eval(z)).unwrap();
                    assert!(lhs.eval(z).max_abs_diff(&rhs) < 1e-7, "n={n} pf={pf} pg={pg}");
                    assert!(lhs_grid.eval(z).max_abs_diff(&rhs) < 1e-5);
                }
            }
        }
    }

    #[test]
    fn two_paths_agree() {
        let mut r = rng(32);
        for n in 1..=3 {
            let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let h = convolve(&f, &g).unwrap();
            for _ in 0..12 {
                let i = IndexSet::from_mask(n, r.gen_range(0..1u16 << n)).unwrap();
                let u = PbwElement::basis(r.gen_range(0..2), i);
                let x = r.gen_range(-2.0..2.0);
                let fast = evaluate(&h, &u).unwrap().eval(x);
                let slow = convolve_via_pairing(&f, &g, &u, x).unwrap();
                assert!((fast - slow).norm() < 1e-8, "n={n} u={u} x={x}: {fast} vs {slow}");
            }
        }
    }

    #[test]
    fn translation_and_flip_law() {
        let mut r = rng(33);
        for n in 1..=3 {
            for (pf, pg) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                let f = random_superfunction(n, Some(pf), &mut r, &RandomSpec::default());
                let g = random_superfunction(n, Some(pg), &mut r, &RandomSpec::default());
                let h = convolve(&f, &g).unwrap();
                let y = 0.8;
                let shifted = convolve(&f.translate(y), &g).unwrap();
                assert!(shifted.max_abs_diff(&h.translate(y), &xs()) < 1e-11);
                let flip = convolve(&g.istar(), &f.istar()).unwrap().istar();
                let s = sign((pf * pg) as usize % 2 == 1) * sign((pf as usize + pg as usize) * n % 2 == 1);
                assert!(h.max_abs_diff(&flip.scale(c(s)), &xs()) < 1e-11, "n={n} pf={pf} pg={pg}");
            }
        }
    }

    #[test]
    fn associativity_and_parity() {
        let mut r = rng(34);
        for n in 1..=3 {
            for pf in [0u8, 1] {
                let f = random_superfunction(n, Some(pf), &mut r, &RandomSpec::default());
                let g = random_superfunction(n, Some(1), &mut r, &RandomSpec::default());
                let h = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let left = convolve(&convolve(&f, &g).unwrap(), &h).unwrap();
                let right = convolve(&f, &convolve(&g, &h).unwrap()).unwrap();
                assert!(left.max_abs_diff(&right, &xs()) < 1e-10);
                let fg = convolve(&f, &g).unwrap();
                if !fg.is_zero() {
                    let want = (pf as usize + 1 + n) % 2;
                    let got = match fg.parity() {
                        Parity::Even => 0,
                        Parity::Odd => 1,
                        Parity::Mixed => panic!("mixed parity"),
                    };
                    assert_eq!(got, want);
                }
            }
        }
    }

    fn bump(lo: f64, hi: f64, dx: f64) -> ScalarFn {
        let (mid, rad) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let m = ((hi - lo) / dx).round() as usize + 1;
        let g = GridFn::from_fn(lo, dx, m, |x| {
            let t = 1.0 - ((x - mid) / rad).powi(2);
            if t > 0.0 {
                c((-1.0 / t).exp())
            } else {
                ZERO
            }
        })
        .unwrap()
        .with_support(lo, hi);
        ScalarFn::Grid(g)
    }

    #[test]
    fn support_containment() {
        let dx = 1.0 / 128.0;
        for n in 1..=2 {
            let f = SuperFunction::new(
                n,
                IndexSet::all(n).map(|i| (i, bump(-1.0, 0.5, dx))).collect(),
            )
            .unwrap();
            let g = SuperFunction::single(IndexSet::empty(n).unwrap(), bump(2.0, 3.0, dx));
            let h = convolve(&f, &g).unwrap();
            let total: f64 = h.components().map(|(_, s)| s.lp_norm(1.0).unwrap()).sum();
            assert!(total > 0.0);
            for (_, s) in h.components() {
                let ScalarFn::Grid(gr) = s else { panic!("grid expected") };
                let outside: f64 = (0..gr.len())
                    .filter(|&k| gr.x(k) < 1.0 - 1e-9 || gr.x(k) > 3.5 + 1e-9)
                    .map(|k| gr.values[k].norm() * dx)
                    .sum();
                assert!(outside <= 1e-9 * total);
            }
        }
    }

    #[test]
    fn delta_identity_and_shift() {
        let mut r = rng(35);
        for n in 1..=4 {
            let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let d = CompactDistribution::delta_at_identity(n).unwrap();
            assert!(convolve_dist(&d, &f).unwrap().max_abs_diff(&f, &xs()) < 1e-10);
            let shift = CompactDistribution::point(
                IndexSet::empty(n).unwrap(),
                PointDerivative { order: 0, x0: 0.75, coeff: ONE },
            )
            .unwrap();
            assert!(convolve_dist(&shift, &f).unwrap().max_abs_diff(&f.translate(0.75), &xs()) < 1e-10);
        }
    }

    #[test]
    fn embedded_smooth_distribution_convolves_like_function() {
        let mut r = rng(36);
        for n in 1..=2 {
            let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let u = CompactDistribution::from_smooth(&f, -10.0, 1.0 / 16.0, 320).unwrap();
            let want = convolve(&f, &g).unwrap();
            assert!(convolve_dist(&u, &g).unwrap().max_abs_diff(&want, &xs()) < 1e-8);
        }
    }

    #[test]
    fn product_fourier_two_paths() {
        let mut r = rng(37);
        for n in 1..=3 {
            let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let t = transform(&product(&f, &g).unwrap()).unwrap();
            for zeta in [-1.5, -0.2, 0.8, 2.1] {
                let want = t.eval(c(zeta));
                assert!(fourier_of_product(&f, &g, zeta).unwrap().max_abs_diff(&want) < 1e-10);
            }
        }
        // scalar layer: (fg)^ = (1/2π) f̂ * ĝ
        let (a, b) = (gauss(1.0, 0.2), gauss(0.6, -0.4));
        let fg = a.mul(&b).unwrap();
        for zeta in [-1.0, 0.3] {
            let lhs = fg.fourier_at(c(zeta)).unwrap();
            let rhs = fourier_convolution(&a, &b, zeta, &InverseConfig::default()).unwrap() / (2.0 * PI);
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn sobolev_examples() {
        let mut r = rng(38);
        let g = gauss(1.0, 0.0);
        for n in 1..=3 {
            let e = SuperFunction::single(IndexSet::empty(n).unwrap(), g.clone());
            assert!((sobolev_norm(&e, 0, 1.0).unwrap().value - PI.sqrt()).abs() < 1e-10);
            let top = SuperFunction::single(IndexSet::full(n).unwrap(), g.clone());
            assert_eq!(sobolev_norm(&top, n - 1, 1.0).unwrap().value, 0.0);
            assert!((sobolev_norm(&top, n, 1.0).unwrap().value - PI.sqrt()).abs() < 1e-10);
            for p in [1.0, 2.0] {
                let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let h = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let nf = sobolev_norm(&f, n, p).unwrap().value;
                let nh = sobolev_norm(&h, n, p).unwrap().value;
                let sum = sobolev_norm(&f.add(&h).unwrap(), n, p).unwrap().value;
                assert!(sum <= nf + nh + 1e-10);
                let scaled = sobolev_norm(&f.scale(Complex64::new(0.0, -2.5)), n, p).unwrap().value;
                assert!((scaled - 2.5 * nf).abs() < 1e-10 * nf.max(1.0));
            }
        }
        assert!(sobolev_norm(&SuperFunction::zero(1).unwrap(), 1, 0.5).is_err());
    }

    #[test]
    fn banach_inequality() {
        let mut r = rng(39);
        for n in 1..=3 {
            for _ in 0..5 {
                let f = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
                let rep = banach_check(&f, &g).unwrap();
                assert!(rep.pass, "{rep:?}");
            }
            let z = SuperFunction::zero(n).unwrap();
            let g = random_superfunction(n, None, &mut r, &RandomSpec::default());
            let rep = banach_check(&z, &g).unwrap();
            assert_eq!(rep.lhs, 0.0);
            assert!(rep.pass);
        }
    }
}
