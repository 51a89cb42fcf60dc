//! Exact arithmetic in the universal enveloping algebra of the
//! Heisenberg–Clifford superalgebra, in the PBW basis `z^k a_I`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported number of odd generators.
pub const MAX_DIM: usize = 12;

/// A subset of `{1, ..., n}` stored as a bit mask (bit `b` is `a_{b+1}`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IndexSet {
    n: u8,
    mask: u16,
}

impl IndexSet {
    /// Builds a set from 1-based, strictly increasing members.
    pub fn new(n: usize, members: &[usize]) -> Result<Self> {
        check_dim(n)?;
        let mut mask = 0u16;
        let mut last = 0usize;
        for &m in members {
            if m == 0 || m > n {
                return Err(Error::Parse(format!("index {m} outside 1..={n}")));
            }
            if m <= last {
                return Err(Error::Parse(format!(
                    "indices must be strictly increasing, got {members:?}"
                )));
            }
            last = m;
            mask |= 1 << (m - 1);
        }
        Ok(IndexSet { n: n as u8, mask })
    }

    pub fn from_mask(n: usize, mask: u16) -> Result<Self> {
        check_dim(n)?;
        if mask >> n != 0 {
            return Err(Error::Parse(format!("mask {mask:#b} exceeds n = {n}")));
        }
        Ok(IndexSet { n: n as u8, mask })
    }

    pub(crate) fn raw(n: usize, mask: u16) -> Self {
        debug_assert!(n <= MAX_DIM && mask >> n == 0);
        IndexSet { n: n as u8, mask }
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_mask(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(IndexSet::raw(n, full_mask(n)))
    }

    /// The singleton `{i}` (1-based).
    pub fn single(n: usize, i: usize) -> Result<Self> {
        Self::new(n, &[i])
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    /// `#I mod 2`.
    pub fn parity(&self) -> u8 {
        (self.mask.count_ones() & 1) as u8
    }

    pub fn contains(&self, i: usize) -> bool {
        i >= 1 && i <= self.n() && self.mask >> (i - 1) & 1 == 1
    }

    /// Members as 1-based indices in increasing order.
    pub fn members(&self) -> Vec<usize> {
        (0..self.n()).filter(|b| self.mask >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn complement(&self) -> Self {
        IndexSet::raw(self.n(), full_mask(self.n()) & !self.mask)
    }

    /// All `2^n` subsets in mask order.
    pub fn all(n: usize) -> impl Iterator<Item = IndexSet> {
        let n = n.min(MAX_DIM);
        (0..(1u32 << n)).map(move |m| IndexSet::raw(n, m as u16))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Dimension(format!("n must lie in 1..={MAX_DIM}, got {n}")));
    }
    Ok(())
}

pub(crate) fn full_mask(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

/// Sign of moving the ordered block `b` past the ordered block `a` in
/// `a_A a_B`: `(-1)^{#{(i, j) : i in A, j in B, i > j}}`.
pub fn reorder_sign(a: u16, b: u16) -> i8 {
    let mut count = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        count += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if count & 1 == 1 {
        -1
    } else {
        1
    }
}

/// A PBW basis monomial `z^k a_I`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PbwMonomial {
    pub idx: IndexSet,
    pub zpow: u32,
}

impl PbwMonomial {
    pub fn new(zpow: u32, idx: IndexSet) -> Self {
        PbwMonomial { idx, zpow }
    }

    pub fn a(idx: IndexSet) -> Self {
        PbwMonomial { idx, zpow: 0 }
    }

    pub fn n(&self) -> usize {
        self.idx.n()
    }

    pub fn parity(&self) -> u8 {
        self.idx.parity()
    }

    /// Product of two monomials as a signed monomial.
    pub fn mul(&self, other: &PbwMonomial) -> SignedMonomial {
        let (i, j) = (self.idx.mask, other.idx.mask);
        SignedMonomial {
            sign: reorder_sign(i, j),
            monomial: PbwMonomial {
                idx: IndexSet::raw(self.n(), i ^ j),
                zpow: self.zpow + other.zpow + (i & j).count_ones(),
            },
        }
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.zpow, self.idx.is_empty()) {
            (0, true) => write!(f, "1"),
            (0, false) => write!(f, "a{}", self.idx),
            (k, true) => write!(f, "z^{k}"),
            (k, false) => write!(f, "z^{k} a{}", self.idx),
        }
    }
}

/// `±` times a PBW monomial.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SignedMonomial {
    pub sign: i8,
    pub monomial: PbwMonomial,
}

impl SignedMonomial {
    pub fn to_element(&self) -> PbwElement {
        PbwElement::monomial(self.monomial, Complex64::new(self.sign as f64, 0.0))
    }
}

/// A finite complex linear combination of PBW monomials.
#[derive(Clone, PartialEq, Debug)]
pub struct PbwElement {
    n: usize,
    terms: BTreeMap<PbwMonomial, Complex64>,
}

impl PbwElement {
    pub fn zero(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(PbwElement { n, terms: BTreeMap::new() })
    }

    pub fn one(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self::monomial(PbwMonomial::a(IndexSet::raw(n, 0)), Complex64::new(1.0, 0.0)))
    }

    pub fn monomial(m: PbwMonomial, coeff: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != Complex64::new(0.0, 0.0) {
            terms.insert(m, coeff);
        }
        PbwElement { n: m.n(), terms }
    }

    /// The unit-coefficient monomial `z^k a_I`.
    pub fn basis(zpow: u32, idx: IndexSet) -> Self {
        Self::monomial(PbwMonomial::new(zpow, idx), Complex64::new(1.0, 0.0))
    }

    /// The generator `a_i` (1-based).
    pub fn a(n: usize, i: usize) -> Result<Self> {
        Ok(Self::basis(0, IndexSet::single(n, i)?))
    }

    /// The central element `z`.
    pub fn z(n: usize) -> Result<Self> {
        Ok(Self::basis(1, IndexSet::empty(n)?))
    }

    /// The orientation element `γ = a_1 ⋯ a_n`.
    pub fn gamma(n: usize) -> Result<Self> {
        Ok(Self::basis(0, IndexSet::full(n)?))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    /// `Some(p)` if every term has parity `p` (zero counts as even).
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity());
        match it.next() {
            None => Some(0),
            Some(p) => it.all(|q| q == p).then_some(p),
        }
    }

    /// Splits into (even part, odd part).
    pub fn parity_parts(&self) -> (PbwElement, PbwElement) {
        let mut even = PbwElement { n: self.n, terms: BTreeMap::new() };
        let mut odd = even.clone();
        for (m, c) in &self.terms {
            if m.parity() == 0 {
                even.terms.insert(*m, *c);
            } else {
                odd.terms.insert(*m, *c);
            }
        }
        (even, odd)
    }

    pub(crate) fn add_term(&mut self, m: PbwMonomial, c: Complex64) {
        let e = self.terms.entry(m).or_default();
        *e += c;
        if *e == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: Complex64) -> PbwElement {
        let mut out = PbwElement { n: self.n, terms: BTreeMap::new() };
        for (m, v) in &self.terms {
            out.add_term(*m, v * c);
        }
        out
    }

    pub fn try_add(&self, other: &PbwElement) -> Result<PbwElement> {
        same_dim(self.n, other.n)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, *c);
        }
        Ok(out)
    }

    /// Largest `|coefficient|` difference, used for approximate comparisons.
    pub fn max_abs_diff(&self, other: &PbwElement) -> f64 {
        let mut keys: Vec<&PbwMonomial> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.dedup();
        keys.into_iter()
            .map(|m| (self.coeff(m) - other.coeff(m)).norm())
            .fold(0.0, f64::max)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Dimension(format!("mismatched ambient dimensions {a} and {b}")));
    }
    Ok(())
}

/// PBW-normalized product.
pub fn multiply(u: &PbwElement, v: &PbwElement) -> Result<PbwElement> {
    same_dim(u.n, v.n)?;
    let mut out = PbwElement { n: u.n, terms: BTreeMap::new() };
    for (mu, cu) in &u.terms {
        for (mv, cv) in &v.terms {
            let p = mu.mul(mv);
            out.add_term(p.monomial, cu * cv * p.sign as f64);
        }
    }
    Ok(out)
}

/// The antipode: `S(z^k a_I) = (-1)^{k + #I} z^k a_I`.
pub fn antipode(u: &PbwElement) -> PbwElement {
    let mut out = PbwElement { n: u.n, terms: BTreeMap::new() };
    for (m, c) in &u.terms {
        let s = if (m.zpow as usize + m.idx.len()) % 2 == 0 { 1.0 } else { -1.0 };
        out.add_term(*m, c * s);
    }
    out
}

/// Antipode of a single monomial as a signed monomial.
pub fn antipode_monomial(m: &PbwMonomial) -> SignedMonomial {
    let sign = if (m.zpow as usize + m.idx.len()) % 2 == 0 { 1 } else { -1 };
    SignedMonomial { sign, monomial: *m }
}

/// `*a_I = sgn(σ_I) a_{I^c}`, so that `a_I · *a_I = γ`.
pub fn hodge_star(idx: IndexSet) -> SignedMonomial {
    let c = idx.complement();
    SignedMonomial { sign: reorder_sign(idx.mask, c.mask), monomial: PbwMonomial::a(c) }
}

/// The sign `sgn(σ_I)` of `*a_I`.
pub fn hodge_sign(idx: IndexSet) -> i8 {
    reorder_sign(idx.mask, idx.complement().mask)
}

/// Sweedler terms of `Δ(γ) = Σ_I a_I ⊗ *a_I`, in mask order of `I`.
pub fn delta_gamma(n: usize) -> Result<Vec<(PbwMonomial, SignedMonomial)>> {
    check_dim(n)?;
    Ok(IndexSet::all(n).map(|i| (PbwMonomial::a(i), hodge_star(i))).collect())
}

/// One term of the triple coproduct `(Δ ⊗ 1)Δ(γ) = Σ sgn · a_A ⊗ a_B ⊗ a_C`
/// over ordered partitions `A ⊔ B ⊔ C = {1..n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleTerm {
    pub a: IndexSet,
    pub b: IndexSet,
    pub c: IndexSet,
    pub sign: i8,
}

/// All `3^n` triple-coproduct terms of `γ`.
pub fn triple_delta(n: usize) -> Result<Vec<TripleTerm>> {
    check_dim(n)?;
    let full = full_mask(n);
    let mut out = Vec::new();
    for a in 0..=full {
        let rest = full & !a;
        let mut b = rest;
        loop {
            let c = rest & !b;
            let sign = reorder_sign(a, b) * reorder_sign(a | b, c);
            out.push(TripleTerm {
                a: IndexSet::raw(n, a),
                b: IndexSet::raw(n, b),
                c: IndexSet::raw(n, c),
                sign,
            });
            if b == 0 {
                break;
            }
            b = (b - 1) & rest;
        }
    }
    Ok(out)
}

impl Add for &PbwElement {
    type Output = PbwElement;
    fn add(self, rhs: &PbwElement) -> PbwElement {
        self.try_add(rhs).expect("dimension mismatch in PBW addition")
    }
}

impl Sub for &PbwElement {
    type Output = PbwElement;
    fn sub(self, rhs: &PbwElement) -> PbwElement {
        self.try_add(&-rhs).expect("dimension mismatch in PBW subtraction")
    }
}

impl Neg for &PbwElement {
    type Output = PbwElement;
    fn neg(self) -> PbwElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PbwElement {
    type Output = PbwElement;
    fn mul(self, rhs: &PbwElement) -> PbwElement {
        multiply(self, rhs).expect("dimension mismatch in PBW product")
    }
}

impl fmt::Display for PbwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.im == 0.0 && c.re.is_sign_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if c.im == 0.0 {
                write!(f, "{:?}", c.re.abs())?;
            } else {
                write!(f, "({:?},{:?})", c.re, c.im)?;
            }
            if !(m.zpow == 0 && m.idx.is_empty()) {
                write!(f, " {m}")?;
            }
        }
        Ok(())
    }
}

/// Parses the textual element syntax, for example `"2.0 z^1 a{1,3} + (0,1) a{2}"`.
///
/// ```text
/// element := ["-"] term (("+" | "-") term)*
/// term    := [coeff] factor*          (at least one of the two)
/// coeff   := real | "(" real "," real ")"
/// factor  := "z" ["^" uint] | "a{" [uint ("," uint)*] "}" | "1"
/// ```
///
/// Factors are multiplied left to right with [`multiply`], so `a{2} a{1}`
/// normalizes to `-a{1,2}`. Members inside one `a{...}` must be strictly
/// increasing.
pub fn parse_element(text: &str, n: usize) -> Result<PbwElement> {
    check_dim(n)?;
    let mut p = Parser { s: text.as_bytes(), pos: 0, n };
    let el = p.element()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(el)
}

/// Parses `"{}"` or `"{1,3}"` into an index set of dimension `n`.
pub fn parse_index_set(text: &str, n: usize) -> Result<IndexSet> {
    let t = text.trim();
    let inner = t
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| Error::Parse(format!("index set must look like {{1,3}}, got {text:?}")))?;
    let mut members = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        members.push(
            part.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index {part:?} in {text:?}")))?,
        );
    }
    IndexSet::new(n, &members)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at column {}", self.pos + 1))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn element(&mut self) -> Result<PbwElement> {
        let mut acc = PbwElement::zero(self.n)?;
        let mut sign = 1.0;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -1.0;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = acc.try_add(&t.scale(Complex64::new(sign, 0.0)))?;
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn real(&mut self) -> Result<f64> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.s[self.pos - 1], b'e' | b'E');
            let lead_sign = (c == b'-' || c == b'+') && self.pos == start;
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign || lead_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        txt.parse::<f64>().map_err(|_| {
            self.pos = start;
            self.err("expected a number")
        })
    }

    fn uint(&mut self) -> Result<usize> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap_or("")
            .parse()
            .map_err(|_| {
                self.pos = start;
                self.err("expected an unsigned integer")
            })
    }

    fn term(&mut self) -> Result<PbwElement> {
        let mut coeff = None;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let re = self.real()?;
                self.expect(b',')?;
                let im = self.real()?;
                self.expect(b')')?;
                coeff = Some(Complex64::new(re, im));
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                coeff = Some(Complex64::new(self.real()?, 0.0));
            }
            _ => {}
        }
        let mut acc = PbwElement::one(self.n)?;
        let mut factors = 0;
        loop {
            match self.peek() {
                Some(b'z') => {
                    self.pos += 1;
                    let mut k = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        k = self.uint()?;
                    }
                    let f = PbwElement::basis(k as u32, IndexSet::raw(self.n, 0));
                    acc = multiply(&acc, &f)?;
                }
                Some(b'a') => {
                    self.pos += 1;
                    self.expect(b'{')?;
                    let mut members = Vec::new();
                    if self.peek() != Some(b'}') {
                        loop {
                            members.push(self.uint()?);
                            if self.peek() == Some(b',') {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(b'}')?;
                    let idx = IndexSet::new(self.n, &members)?;
                    acc = multiply(&acc, &PbwElement::basis(0, idx))?;
                }
                _ => break,
            }
            factors += 1;
        }
        if coeff.is_none() && factors == 0 {
            return Err(self.err("expected a term"));
        }
        Ok(acc.scale(coeff.unwrap_or(Complex64::new(1.0, 0.0))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_normalize, Generator};
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn set(n: usize, m: &[usize]) -> IndexSet {
        IndexSet::new(n, m).unwrap()
    }

    #[test]
    fn generator_squares_to_z() {
        let a1 = PbwElement::a(3, 1).unwrap();
        assert_eq!(multiply(&a1, &a1).unwrap(), PbwElement::z(3).unwrap());
    }

    #[test]
    fn unit_law() {
        let u = parse_element("2 z a{1,3} + (0,1) a{2}", 3).unwrap();
        let one = PbwElement::one(3).unwrap();
        assert_eq!(multiply(&one, &u).unwrap(), u);
        assert_eq!(multiply(&u, &one).unwrap(), u);
    }

    #[test]
    fn a13_times_a12_matches_oracle() {
        let p = multiply(&PbwElement::basis(0, set(3, &[1, 3])), &PbwElement::basis(0, set(3, &[1, 2])))
            .unwrap();
        let o = oracle_normalize(
            &[Generator::A(1), Generator::A(3), Generator::A(1), Generator::A(2)],
            3,
        )
        .unwrap();
        assert_eq!(p, o);
        assert_eq!(p, PbwElement::basis(1, set(3, &[2, 3])));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let u = PbwElement::one(2).unwrap();
        let v = PbwElement::one(3).unwrap();
        assert!(matches!(multiply(&u, &v), Err(Error::Dimension(_))));
        assert!(PbwElement::one(0).is_err());
        assert!(PbwElement::one(13).is_err());
    }

    #[test]
    fn antipode_examples() {
        let a2 = PbwElement::a(3, 2).unwrap();
        assert_eq!(antipode(&a2), -&a2);
        let one = PbwElement::one(3).unwrap();
        assert_eq!(antipode(&one), one);
        let a12 = PbwElement::basis(0, set(2, &[1, 2]));
        assert_eq!(antipode(&a12), crate::oracle::antipode_oracle(&a12).unwrap());
        assert_eq!(antipode(&a12), a12);
        assert_eq!(antipode(&PbwElement::z(1).unwrap()), -&PbwElement::z(1).unwrap());
    }

    #[test]
    fn hodge_examples() {
        let s = hodge_star(IndexSet::empty(4).unwrap());
        assert_eq!(s.sign, 1);
        assert_eq!(s.monomial.idx, IndexSet::full(4).unwrap());
        let s = hodge_star(set(3, &[2]));
        assert_eq!(s.sign, -1);
        assert_eq!(s.monomial.idx, set(3, &[1, 3]));
        assert_eq!(crate::oracle::permutation_sign(&[2, 1, 3]), -1);
    }

    #[test]
    fn hodge_identity_up_to_eight() {
        for n in 1..=8 {
            let g = PbwElement::gamma(n).unwrap();
            for i in IndexSet::all(n) {
                let lhs = multiply(&PbwElement::basis(0, i), &hodge_star(i).to_element()).unwrap();
                assert_eq!(lhs, g, "n={n} I={i}");
                assert_eq!(hodge_sign(i), crate::oracle::hodge_sign_oracle(i));
            }
        }
    }

    #[test]
    fn delta_gamma_small_cases() {
        let d1 = delta_gamma(1).unwrap();
        assert_eq!(d1.len(), 2);
        assert_eq!(d1[0].0.idx, IndexSet::empty(1).unwrap());
        assert_eq!((d1[0].1.sign, d1[0].1.monomial.idx), (1, set(1, &[1])));
        assert_eq!((d1[1].1.sign, d1[1].1.monomial.idx), (1, IndexSet::empty(1).unwrap()));
        let d2 = delta_gamma(2).unwrap();
        let find = |i: IndexSet| d2.iter().find(|(l, _)| l.idx == i).unwrap().1;
        let r1 = find(set(2, &[1]));
        assert_eq!((r1.sign, r1.monomial.idx), (1, set(2, &[2])));
        let r2 = find(set(2, &[2]));
        assert_eq!((r2.sign, r2.monomial.idx), (-1, set(2, &[1])));
        assert_eq!(delta_gamma(6).unwrap().len(), 64);
    }

    #[test]
    fn delta_gamma_matches_expanded_primitives() {
        for n in 1..=5 {
            let expanded = crate::oracle::delta_gamma_oracle(n).unwrap();
            for (l, r) in delta_gamma(n).unwrap() {
                let sign = expanded[&(l.idx.mask(), r.monomial.idx.mask())];
                assert_eq!(sign, r.sign as i32, "n={n} I={}", l.idx);
            }
            assert_eq!(expanded.len(), 1 << n);
        }
    }

    #[test]
    fn triple_delta_matches_iterated_coproduct() {
        for n in 1..=5 {
            let terms = triple_delta(n).unwrap();
            assert_eq!(terms.len(), 3usize.pow(n as u32));
            for t in terms {
                let s = reorder_sign(t.a.mask(), t.b.mask()) * reorder_sign(t.c.complement().mask(), t.c.mask());
                assert_eq!(t.sign, s);
                let ab = multiply(&PbwElement::basis(0, t.a), &PbwElement::basis(0, t.b)).unwrap();
                let abc = multiply(&ab, &PbwElement::basis(0, t.c)).unwrap();
                assert_eq!(abc, PbwElement::gamma(n).unwrap().scale(c(t.sign as f64)));
            }
        }
    }

    #[test]
    fn anticommutation_exhaustive() {
        for n in 1..=8 {
            for i in 1..=n {
                for j in 1..=n {
                    let ai = PbwElement::a(n, i).unwrap();
                    let aj = PbwElement::a(n, j).unwrap();
                    let s = &(&ai * &aj) + &(&aj * &ai);
                    let want = if i == j {
                        PbwElement::z(n).unwrap().scale(c(2.0))
                    } else {
                        PbwElement::zero(n).unwrap()
                    };
                    assert_eq!(s, want);
                }
            }
        }
    }

    #[test]
    fn exhaustive_pairs_match_oracle_up_to_four() {
        for n in 1..=4 {
            for i in IndexSet::all(n) {
                for j in IndexSet::all(n) {
                    for (k1, k2) in [(0, 0), (1, 2)] {
                        let u = PbwElement::basis(k1, i);
                        let v = PbwElement::basis(k2, j);
                        let mut word = crate::oracle::word_of(&PbwMonomial::new(k1, i));
                        word.extend(crate::oracle::word_of(&PbwMonomial::new(k2, j)));
                        assert_eq!(multiply(&u, &v).unwrap(), oracle_normalize(&word, n).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn parser_round_trip_and_errors() {
        let u = parse_element("2.0 z^1 a{1,3} + (0,1) a{2}", 3).unwrap();
        assert_eq!(u.coeff(&PbwMonomial::new(1, set(3, &[1, 3]))), c(2.0));
        assert_eq!(u.coeff(&PbwMonomial::new(0, set(3, &[2]))), Complex64::new(0.0, 1.0));
        let again = parse_element(&u.to_string(), 3).unwrap();
        assert_eq!(again, u);
        assert_eq!(parse_element("a{2} a{1}", 2).unwrap(), PbwElement::basis(0, set(2, &[1, 2])).scale(c(-1.0)));
        assert_eq!(parse_element("1", 2).unwrap(), PbwElement::one(2).unwrap());
        assert_eq!(parse_element("-z", 2).unwrap(), -&PbwElement::z(2).unwrap());
        assert_eq!(parse_element("1e-3 a{}", 1).unwrap(), PbwElement::one(1).unwrap().scale(c(1e-3)));
        assert!(parse_element("a{3,1}", 3).is_err());
        assert!(parse_element("a{4}", 3).is_err());
        assert!(parse_element("a{1} +", 3).is_err());
        assert!(parse_element("q", 3).is_err());
        assert_eq!(parse_index_set("{1,3}", 3).unwrap(), set(3, &[1, 3]));
        assert_eq!(parse_index_set("{}", 3).unwrap(), IndexSet::empty(3).unwrap());
        assert!(parse_index_set("1,3", 3).is_err());
    }

    fn arb_element(n: usize) -> impl Strategy<Value = PbwElement> {
        prop::collection::vec((0u32..3, 0u16..(1u16 << n), -3i32..=3, -3i32..=3), 1..5).prop_map(
            move |ts| {
                let mut e = PbwElement::zero(n).unwrap();
                for (k, m, re, im) in ts {
                    e.add_term(
                        PbwMonomial::new(k, IndexSet::raw(n, m)),
                        Complex64::new(re as f64, im as f64),
                    );
                }
                e
            },
        )
    }

    fn arb_homogeneous(n: usize) -> impl Strategy<Value = PbwElement> {
        (0u32..3, 0u16..(1u16 << n), -3i32..=3).prop_map(move |(k, m, c0)| {
            PbwElement::monomial(PbwMonomial::new(k, IndexSet::raw(n, m)), Complex64::new(c0 as f64, 1.0))
        })
    }

    proptest! {
        #[test]
        fn associativity(u in arb_element(5), v in arb_element(5), w in arb_element(5)) {
            let l = multiply(&multiply(&u, &v).unwrap(), &w).unwrap();
            let r = multiply(&u, &multiply(&v, &w).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn z_is_central(u in arb_element(4)) {
            let z = PbwElement::z(4).unwrap();
            prop_assert_eq!(multiply(&z, &u).unwrap(), multiply(&u, &z).unwrap());
        }

        #[test]
        fn antipode_is_anti_homomorphism(u in arb_homogeneous(5), v in arb_homogeneous(5)) {
            let pu = u.parity().unwrap();
            let pv = v.parity().unwrap();
            let lhs = antipode(&multiply(&u, &v).unwrap());
            let mut rhs = multiply(&antipode(&v), &antipode(&u)).unwrap();
            if pu * pv == 1 {
                rhs = -&rhs;
            }
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn antipode_is_involution(u in arb_element(6)) {
            prop_assert_eq!(antipode(&antipode(&u)), u);
        }

        #[test]
        fn antipode_matches_word_reversal(u in arb_element(5)) {
            prop_assert_eq!(antipode(&u), crate::oracle::antipode_oracle(&u).unwrap());
        }

        #[test]
        fn random_words_match_oracle(
            n in 1usize..=6,
            raw in prop::collection::vec(0usize..7, 0..9),
        ) {
            let word: Vec<Generator> = raw
                .iter()
                .map(|&g| if g == 0 || g > n { Generator::Z } else { Generator::A(g) })
                .collect();
            let folded = word.iter().try_fold(PbwElement::one(n).unwrap(), |acc, g| {
                multiply(&acc, &g.element(n)?)
            }).unwrap();
            prop_assert_eq!(folded, oracle_normalize(&word, n).unwrap());
        }

        #[test]
        fn display_parse_round_trip(u in arb_element(4)) {
            prop_assert_eq!(parse_element(&u.to_string(), 4).unwrap(), u);
        }
    }
}
