//! Verification suites: each runs one family of identities on seeded random
//! inputs and reports the largest observed error against its tolerance.

use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convolution::{banach_check, convolve, convolve_dist, convolve_via_pairing, fourier_of_product};
use crate::error::{Error, Result};
use crate::fourier::{inverse, paley_wiener_check, transform, InverseConfig, PwConfig};
use crate::integral::{berezin_integral, CompactDistribution};
use crate::oracle::{oracle_normalize, word_of, Generator};
use crate::random::{random_superfunction, RandomSpec};
use crate::scalar::{GaussPoly, GridConfig, GridFn, ScalarFn};
use crate::spinrep::{build_generators, dpi, pi, trace_t, HMatrix, SpinSpec};
use crate::superalgebra::{multiply, IndexSet, PbwElement, PbwMonomial};
use crate::superfunction::{evaluate, left_action, product, SuperFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Clifford,
    Trace,
    PbwOracle,
    PropInversion,
    ThmIntertwine,
    ThmConvft,
    ConvTwoPath,
    DeltaIdentity,
    ThmBanach,
    Pw,
    ProductFt,
    IntegralInvariance,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Clifford,
        Suite::Trace,
        Suite::PbwOracle,
        Suite::PropInversion,
        Suite::ThmIntertwine,
        Suite::ThmConvft,
        Suite::ConvTwoPath,
        Suite::DeltaIdentity,
        Suite::ThmBanach,
        Suite::Pw,
        Suite::ProductFt,
        Suite::IntegralInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Clifford => "clifford",
            Suite::Trace => "trace",
            Suite::PbwOracle => "pbw-oracle",
            Suite::PropInversion => "prop-inversion",
            Suite::ThmIntertwine => "thm-intertwine",
            Suite::ThmConvft => "thm-convft",
            Suite::ConvTwoPath => "conv-two-path",
            Suite::DeltaIdentity => "delta-identity",
            Suite::ThmBanach => "thm-banach",
            Suite::Pw => "pw",
            Suite::ProductFt => "product-ft",
            Suite::IntegralInvariance => "integral-invariance",
        }
    }

    /// A suite name, or `all`.
    pub fn parse(name: &str) -> Result<Vec<Suite>> {
        if name == "all" {
            return Ok(Suite::ALL.to_vec());
        }
        Suite::ALL
            .iter()
            .find(|s| s.name() == name)
            .map(|s| vec![*s])
            .ok_or_else(|| Error::Invalid(format!("unknown suite {name}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub seconds: f64,
}

impl VerifyReport {
    pub fn max_error(&self) -> f64 {
        self.checks.iter().map(|c| c.max_error).fold(0.0, f64::max)
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut s = format!("suite {} ({:.2} s)\n", self.suite, self.seconds);
        s += &format!("  {:width$}  {:>10}  {:>10}  result\n", "check", "max error", "tolerance");
        for c in &self.checks {
            s += &format!(
                "  {:width$}  {:>10.3e}  {:>10.3e}  {}\n",
                c.name,
                c.max_error,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        s += if self.pass { "  overall: pass\n" } else { "  overall: FAIL\n" };
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Upper bound on the ambient dimension for the analytic suites.
    pub n_max: usize,
    /// Optional cap on the tolerances of closed-form checks.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { n_max: 4, tol: None, seed: 0 }
    }
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    rng: ChaCha8Rng,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn closed(&self, pinned: f64) -> f64 {
        self.opts.tol.map_or(pinned, |t| pinned.min(t))
    }

    fn ns(&self, hi: usize) -> std::ops::RangeInclusive<usize> {
        1..=hi.min(self.opts.n_max)
    }

    /// A closed-form check: tolerance capped by `--tol`.
    fn push(&mut self, name: impl Into<String>, err: f64, pinned: f64) {
        let tol = self.closed(pinned);
        self.push_pinned(name, err, tol);
    }

    fn push_pinned(&mut self, name: impl Into<String>, err: f64, tol: f64) {
        let pass = err.is_finite() && err < tol;
        self.checks.push(Check { name: name.into(), max_error: err, tolerance: tol, pass });
    }

    fn push_exact(&mut self, name: impl Into<String>, err: f64) {
        self.checks.push(Check { name: name.into(), max_error: err, tolerance: 0.0, pass: err == 0.0 });
    }

    fn random(&mut self, n: usize, parity: Option<u8>) -> SuperFunction {
        random_superfunction(n, parity, &mut self.rng, &RandomSpec::default())
    }
}

pub fn run(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let start = Instant::now();
    let salt = Suite::ALL.iter().position(|s| *s == suite).unwrap_or(0) as u64;
    let mut ctx = Ctx {
        opts,
        rng: ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt),
        checks: Vec::new(),
    };
    match suite {
        Suite::Clifford => clifford(&mut ctx, start)?,
        Suite::Trace => trace(&mut ctx)?,
        Suite::PbwOracle => pbw_oracle(&mut ctx, start)?,
        Suite::PropInversion => prop_inversion(&mut ctx)?,
        Suite::ThmIntertwine => thm_intertwine(&mut ctx)?,
        Suite::ThmConvft => thm_convft(&mut ctx)?,
        Suite::ConvTwoPath => conv_two_path(&mut ctx)?,
        Suite::DeltaIdentity => delta_identity(&mut ctx)?,
        Suite::ThmBanach => thm_banach(&mut ctx)?,
        Suite::Pw => pw(&mut ctx)?,
        Suite::ProductFt => product_ft(&mut ctx)?,
        Suite::IntegralInvariance => integral_invariance(&mut ctx)?,
    }
    let pass = ctx.checks.iter().all(|c| c.pass);
    Ok(VerifyReport { suite: suite.name().into(), checks: ctx.checks, pass, seconds: start.elapsed().as_secs_f64() })
}

/// Runs several suites in order.
pub fn run_all(suites: &[Suite], opts: &VerifyOptions) -> Result<Vec<VerifyReport>> {
    suites.iter().map(|s| run(*s, opts)).collect()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const CLIFFORD_ZETAS: [Complex64; 5] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(2.0, 0.0),
    Complex64::new(-3.0, 0.0),
    Complex64::new(1.0, 1.0),
    Complex64::new(0.5, -2.0),
];

fn clifford(ctx: &mut Ctx, start: Instant) -> Result<()> {
    for n in 1..=8 {
        let mut err: f64 = 0.0;
        let mut d_defect: f64 = 0.0;
        for zeta in CLIFFORD_ZETAS {
            let gens = build_generators(n, zeta)?;
            let spec = SpinSpec::new(n)?;
            let id = HMatrix::identity(spec, zeta);
            for i in 0..n {
                for j in 0..n {
                    let ac = gens[i].matmul(&gens[j])?.add(&gens[j].matmul(&gens[i])?)?;
                    let want = if i == j { id.scale(zeta * 2.0) } else { HMatrix::zeros(spec, zeta) };
                    err = err.max(ac.max_abs_diff(&want));
                }
                d_defect = d_defect.max(gens[i].d_linearity_defect());
            }
        }
        ctx.push(format!("anticommutators n={n}"), err, 1e-12);
        if n % 2 == 1 {
            ctx.push(format!("D-linearity n={n}"), d_defect, 1e-12);
        }
    }
    ctx.push_pinned("runtime (s)", start.elapsed().as_secs_f64(), 5.0);
    Ok(())
}

fn trace(ctx: &mut Ctx) -> Result<()> {
    let zetas = [
        c(1.0),
        c(2.0),
        c(-3.0),
        c(0.25),
        Complex64::new(1.0, 1.0),
        Complex64::new(0.5, -2.0),
        Complex64::new(-0.7, 0.3),
    ];
    for n in 1..=5 {
        let spec = SpinSpec::new(n)?;
        let (mut top, mut proper): (f64, f64) = (0.0, 0.0);
        for zeta in zetas {
            let t = trace_t(&dpi(&PbwElement::gamma(n)?, zeta)?);
            top = top.max((t - (zeta * 2.0).powi(spec.bracket as i32)).norm());
            for i in IndexSet::all(n).filter(|i| i.len() < n) {
                proper = proper.max(trace_t(&dpi(&PbwElement::basis(0, i), zeta)?).norm());
            }
        }
        ctx.push(format!("T(dpi(gamma)) = (2 zeta)^[n], n={n}"), top, 1e-12);
        ctx.push(format!("T(dpi(a_I)) = 0 for proper I, n={n}"), proper, 1e-12);
    }
    Ok(())
}

fn pbw_oracle(ctx: &mut Ctx, start: Instant) -> Result<()> {
    for n in 1..=4 {
        let monos: Vec<PbwMonomial> =
            (0..=1).flat_map(|k| IndexSet::all(n).map(move |i| PbwMonomial::new(k, i))).collect();
        let mut err: f64 = 0.0;
        for a in &monos {
            for b in &monos {
                let one = Complex64::new(1.0, 0.0);
                let fast = multiply(&PbwElement::monomial(*a, one), &PbwElement::monomial(*b, one))?;
                let mut w = word_of(a);
                w.extend(word_of(b));
                err = err.max(fast.max_abs_diff(&oracle_normalize(&w, n)?));
            }
        }
        ctx.push_exact(format!("exhaustive monomial pairs n={n}"), err);
    }
    let mut err: f64 = 0.0;
    for _ in 0..10_000 {
        let n = ctx.rng.gen_range(1..=6);
        let len = ctx.rng.gen_range(0..=8);
        let word: Vec<Generator> = (0..len)
            .map(|_| {
                let g = ctx.rng.gen_range(0..=n);
                if g == 0 {
                    Generator::Z
                } else {
                    Generator::A(g)
                }
            })
            .collect();
        let mut acc = PbwElement::one(n)?;
        for g in &word {
            acc = multiply(&acc, &g.element(n)?)?;
        }
        err = err.max(acc.max_abs_diff(&oracle_normalize(&word, n)?));
    }
    ctx.push_exact("10000 random words n<=6", err);
    ctx.push_pinned("runtime (s)", start.elapsed().as_secs_f64(), 30.0);
    Ok(())
}

fn grid_points(grid: &GridConfig) -> Vec<f64> {
    (0..grid.samples).map(|k| grid.x0 + k as f64 * grid.dx()).collect()
}

fn sampled(f: &SuperFunction, grid: &GridConfig) -> SuperFunction {
    f.map(|_, s| match s {
        ScalarFn::Gauss(p) => ScalarFn::Grid(grid.sample(p)),
        o => o.clone(),
    })
}

fn prop_inversion(ctx: &mut Ctx) -> Result<()> {
    let cfg = InverseConfig::default();
    let xs = grid_points(&cfg.grid);
    for n in ctx.ns(4) {
        let (mut closed, mut grid): (f64, f64) = (0.0, 0.0);
        for _ in 0..20 {
            let f = ctx.random(n, None);
            let back = inverse(&transform(&f)?, &cfg)?.function;
            closed = closed.max(back.max_abs_diff(&f, &xs));
            let g = sampled(&f, &cfg.grid);
            let back = inverse(&transform(&g)?, &cfg)?.function;
            grid = grid.max(back.max_abs_diff(&g, &xs));
        }
        ctx.push(format!("closed form n={n}"), closed, 1e-8);
        ctx.push_pinned(format!("grid n={n}"), grid, 1e-6);
    }
    Ok(())
}

fn real_zetas(count: usize) -> Vec<f64> {
    (0..count).map(|k| -2.5 + 5.0 * (k as f64 + 0.5) / count as f64).collect()
}

fn thm_intertwine(ctx: &mut Ctx) -> Result<()> {
    for n in ctx.ns(4) {
        let mut us = vec![PbwElement::one(n)?, PbwElement::z(n)?];
        for i in 1..=n {
            us.push(PbwElement::a(n, i)?);
        }
        us.push(multiply(&PbwElement::z(n)?, &PbwElement::a(n, 1)?)?);
        if n >= 2 {
            us.push(PbwElement::basis(0, IndexSet::new(n, &[1, 2])?));
        }
        let mut err: f64 = 0.0;
        for _ in 0..2 {
            let f = ctx.random(n, None);
            let t = transform(&f)?;
            for u in &us {
                for x in [0.0, 0.7, -1.3] {
                    let lt = transform(&left_action(u, x, &f)?)?;
                    for zeta in real_zetas(10) {
                        let rhs = pi(u, x, c(-zeta))?.matmul(&t.eval(c(zeta)))?;
                        err = err.max(lt.eval(c(zeta)).max_abs_diff(&rhs));
                    }
                }
            }
        }
        ctx.push(format!("L_(u;x)F hat = pi_(-zeta)(u;x) F hat, n={n}"), err, 1e-9);
    }
    Ok(())
}

fn thm_convft(ctx: &mut Ctx) -> Result<()> {
    let grid = GridConfig::default();
    for n in ctx.ns(4) {
        let (mut closed, mut sampled_err): (f64, f64) = (0.0, 0.0);
        for (pf, pg) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
            let f = ctx.random(n, Some(pf));
            let g = ctx.random(n, Some(pg));
            let (tf, tg) = (transform(&f)?, transform(&g)?);
            let h = transform(&convolve(&f, &g)?)?;
            let hg = transform(&convolve(&sampled(&f, &grid), &sampled(&g, &grid))?)?;
            for zeta in real_zetas(20) {
                let z = c(zeta);
                let rhs = tf.eval(z).matmul(&tg.eval(z))?;
                closed = closed.max(h.eval(z).max_abs_diff(&rhs));
                sampled_err = sampled_err.max(hg.eval(z).max_abs_diff(&rhs));
            }
        }
        ctx.push(format!("gaussian n={n}"), closed, 1e-7);
        ctx.push_pinned(format!("grid n={n}"), sampled_err, 1e-5);
    }
    Ok(())
}

fn conv_two_path(ctx: &mut Ctx) -> Result<()> {
    for n in ctx.ns(3) {
        let mut err: f64 = 0.0;
        let f = ctx.random(n, None);
        let g = ctx.random(n, None);
        let h = convolve(&f, &g)?;
        for _ in 0..50 {
            let i = IndexSet::from_mask(n, ctx.rng.gen_range(0..1u16 << n))?;
            let u = PbwElement::basis(ctx.rng.gen_range(0..=1), i);
            let x = ctx.rng.gen_range(-2.5..2.5);
            let fast = evaluate(&h, &u)?.eval(x);
            err = err.max((fast - convolve_via_pairing(&f, &g, &u, x)?).norm());
        }
        ctx.push(format!("coordinate formula vs pairing, n={n}"), err, 1e-8);
    }
    Ok(())
}

fn sample_points() -> Vec<f64> {
    (0..161).map(|k| -8.0 + 0.1 * k as f64).collect()
}

fn delta_identity(ctx: &mut Ctx) -> Result<()> {
    let xs = sample_points();
    for n in ctx.ns(4) {
        let d = CompactDistribution::delta_at_identity(n)?;
        let mut err: f64 = 0.0;
        for _ in 0..5 {
            let f = ctx.random(n, None);
            err = err.max(convolve_dist(&d, &f)?.max_abs_diff(&f, &xs));
        }
        ctx.push(format!("delta * F = F, n={n}"), err, 1e-10);
    }
    Ok(())
}

fn thm_banach(ctx: &mut Ctx) -> Result<()> {
    for n in ctx.ns(3) {
        let mut excess = f64::NEG_INFINITY;
        let mut worst_ratio: f64 = 0.0;
        for _ in 0..100 {
            let f = ctx.random(n, None);
            let g = ctx.random(n, None);
            let r = banach_check(&f, &g)?;
            excess = excess.max(r.lhs - r.rhs());
            worst_ratio = worst_ratio.max(r.ratio());
        }
        let err = excess.max(0.0);
        ctx.checks.push(Check {
            name: format!("|F*G| <= |F||G| (100 pairs, worst ratio {worst_ratio:.3}), n={n}"),
            max_error: err,
            tolerance: crate::convolution::BANACH_SLACK,
            pass: err <= crate::convolution::BANACH_SLACK,
        });
    }
    Ok(())
}

/// `e^{-1/(1-x²)}` on `[-1, 1]`, `samples` interior points.
pub fn bump(samples: usize) -> Result<ScalarFn> {
    let dx = 2.0 / (samples + 1) as f64;
    let g = GridFn::from_fn(-1.0 + dx, dx, samples, |x| {
        let t = 1.0 - x * x;
        if t > 0.0 {
            c((-1.0 / t).exp())
        } else {
            c(0.0)
        }
    })?;
    Ok(ScalarFn::Grid(g.with_support(-1.0, 1.0)))
}

fn pw(ctx: &mut Ctx) -> Result<()> {
    let cfg = PwConfig::default();
    let b = bump(8191)?;
    let mut cases: Vec<(String, SuperFunction, f64, bool)> = Vec::new();
    let f1 = SuperFunction::single(IndexSet::empty(1)?, b.clone());
    cases.push(("bump n=1, a=1 accepted".into(), f1.clone(), 1.0, true));
    if ctx.opts.n_max >= 2 {
        let f2 = SuperFunction::single(IndexSet::full(2)?, b.clone());
        cases.push(("bump on top component n=2, a=1 accepted".into(), f2, 1.0, true));
    }
    cases.push(("bump n=1, a=0.5 rejected".into(), f1.clone(), 0.5, false));
    cases.push(("bump n=1, a=0.25 rejected".into(), f1, 0.25, false));
    let g = ScalarFn::Gauss(GaussPoly::gaussian(c(1.0), 1.0, 0.0)?);
    cases.push(("gaussian n=1, a=1 rejected".into(), SuperFunction::single(IndexSet::empty(1)?, g), 1.0, false));
    for (name, f, a, expect) in cases {
        let report = paley_wiener_check(&transform(&f)?, a, &cfg)?;
        let worst = report.entries.iter().map(|e| e.ratio()).fold(0.0, |m: f64, r| if r.is_nan() { f64::INFINITY } else { m.max(r) });
        ctx.checks.push(Check { name, max_error: worst, tolerance: 2.0, pass: report.pass == expect });
    }
    Ok(())
}

fn product_ft(ctx: &mut Ctx) -> Result<()> {
    let n = 2;
    let mut err: f64 = 0.0;
    for _ in 0..3 {
        let f = ctx.random(n, None);
        let g = ctx.random(n, None);
        let t = transform(&product(&f, &g)?)?;
        for zeta in real_zetas(10) {
            err = err.max(fourier_of_product(&f, &g, zeta)?.max_abs_diff(&t.eval(c(zeta))));
        }
    }
    ctx.push("transform(F.G) vs convolution of transforms, n=2", err, 1e-7);
    Ok(())
}

fn integral_invariance(ctx: &mut Ctx) -> Result<()> {
    for n in ctx.ns(5) {
        let (mut odd, mut central, mut shift): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..5 {
            let f = ctx.random(n, None);
            let base = berezin_integral(&f)?;
            for x in [0.7, -1.3, 2.0] {
                let moved = berezin_integral(&left_action(&PbwElement::one(n)?, x, &f)?)?;
                shift = shift.max((moved - base).norm());
            }
            central = central.max(berezin_integral(&left_action(&PbwElement::z(n)?, 0.0, &f)?)?.norm());
            for i in 1..=n {
                odd = odd.max(berezin_integral(&left_action(&PbwElement::a(n, i)?, 0.0, &f)?)?.norm());
            }
        }
        ctx.push(format!("|int L_(a_i) F|, n={n}"), odd, 1e-10);
        ctx.push(format!("|int L_z F|, n={n}"), central, 1e-10);
        ctx.push(format!("|int L_x F - int F|, n={n}"), shift, 1e-10);
    }
    Ok(())
}
