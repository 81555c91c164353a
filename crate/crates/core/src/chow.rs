//! Truncated Chow rings of `P^n` and `P^n x P^r` with integer coefficients,
//! the codimension-graded twist and dual operations on classes, and the ring
//! of a projectivized split bundle over `P^n`.
//!
//! A class is stored densely as `sum c[i][j] H^i h^j` with `H^(n+1) = 0` and
//! `h^(r+1) = 0`. Codimension is always total degree `i + j`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChowError {
    #[error("ambient mismatch: {0:?} vs {1:?}")]
    AmbientMismatch(Ambient, Ambient),
    #[error("constant term {0} is not a unit over the integers")]
    NotInvertible(BigInt),
    #[error("operation needs a product ambient")]
    NotAProduct,
}

/// `P^n` (when `r` is `None`) or `P^n x P^r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ambient {
    pub n: usize,
    pub r: Option<usize>,
}

impl Ambient {
    pub fn projective(n: usize) -> Self {
        Ambient { n, r: None }
    }

    pub fn product(n: usize, r: usize) -> Self {
        Ambient { n, r: Some(r) }
    }

    /// Largest power of `h` that survives truncation.
    pub fn h_max(&self) -> usize {
        self.r.unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.n + self.h_max()
    }

    fn width(&self) -> usize {
        self.h_max() + 1
    }
}

/// A class `sum c_{i,j} H^i h^j` in a truncated ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChowClass {
    ambient: Ambient,
    coeffs: Vec<BigInt>,
}

impl ChowClass {
    pub fn zero(ambient: Ambient) -> Self {
        ChowClass { ambient, coeffs: vec![BigInt::zero(); (ambient.n + 1) * ambient.width()] }
    }

    pub fn one(ambient: Ambient) -> Self {
        Self::term(ambient, 0, 0, 1)
    }

    /// `c * H^i * h^j`, zero when truncated away.
    pub fn term(ambient: Ambient, i: usize, j: usize, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero(ambient);
        if i <= ambient.n && j <= ambient.h_max() && (j == 0 || ambient.r.is_some()) {
            out.coeffs[i * ambient.width() + j] = c.into();
        }
        out
    }

    /// `c0 + a*H + b*h`.
    pub fn linear(ambient: Ambient, c0: i64, a: i64, b: i64) -> Self {
        &(&Self::term(ambient, 0, 0, c0) + &Self::term(ambient, 1, 0, a)) + &Self::term(ambient, 0, 1, b)
    }

    /// Builds a class from `(i, j, c)` triples, silently truncating.
    pub fn from_terms<C: Into<BigInt>>(ambient: Ambient, terms: impl IntoIterator<Item = (usize, usize, C)>) -> Self {
        let mut out = Self::zero(ambient);
        for (i, j, c) in terms {
            if i <= ambient.n && j <= ambient.h_max() {
                let k = i * ambient.width() + j;
                out.coeffs[k] += c.into();
            }
        }
        out
    }

    /// A class on `P^n` from the coefficients of `1, H, H^2, ...`.
    pub fn from_h_coeffs<C: Into<BigInt>>(n: usize, coeffs: impl IntoIterator<Item = C>) -> Self {
        Self::from_terms(Ambient::projective(n), coeffs.into_iter().enumerate().map(|(i, c)| (i, 0, c)))
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        if i > self.ambient.n || j > self.ambient.h_max() {
            return BigInt::zero();
        }
        self.coeffs[i * self.ambient.width() + j].clone()
    }

    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.coeffs[i * self.ambient.width() + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        let w = self.ambient.width();
        &mut self.coeffs[i * w + j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Nonzero coefficients as `(i, j, c)`, ordered by `j` then `i`.
    pub fn terms(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for j in 0..=self.ambient.h_max() {
            for i in 0..=self.ambient.n {
                let c = self.at(i, j);
                if !c.is_zero() {
                    out.push((i, j, c.clone()));
                }
            }
        }
        out
    }

    /// Coefficients of `1, H, ..., H^n` (the `h^0` column).
    pub fn h_coeffs(&self) -> Vec<BigInt> {
        (0..=self.ambient.n).map(|i| self.at(i, 0).clone()).collect()
    }

    /// Degree of the zero-dimensional part: coefficient of `H^n h^r`.
    pub fn degree(&self) -> BigInt {
        self.at(self.ambient.n, self.ambient.h_max()).clone()
    }

    fn check(&self, other: &ChowClass) -> Result<(), ChowError> {
        if self.ambient != other.ambient {
            return Err(ChowError::AmbientMismatch(self.ambient, other.ambient));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &ChowClass) -> Result<ChowClass, ChowError> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(ChowClass { ambient: self.ambient, coeffs })
    }

    pub fn checked_mul(&self, other: &ChowClass) -> Result<ChowClass, ChowError> {
        self.check(other)?;
        let (n, hm) = (self.ambient.n, self.ambient.h_max());
        let mut out = ChowClass::zero(self.ambient);
        for i1 in 0..=n {
            for j1 in 0..=hm {
                let a = self.at(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=(n - i1) {
                    for j2 in 0..=(hm - j1) {
                        let b = other.at(i2, j2);
                        if !b.is_zero() {
                            *out.at_mut(i1 + i2, j1 + j2) += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> ChowClass {
        ChowClass { ambient: self.ambient, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, e: u32) -> ChowClass {
        let mut acc = ChowClass::one(self.ambient);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The codimension-`c` part.
    pub fn codim_part(&self, c: usize) -> ChowClass {
        let mut out = ChowClass::zero(self.ambient);
        for i in 0..=self.ambient.n.min(c) {
            let j = c - i;
            if j <= self.ambient.h_max() {
                *out.at_mut(i, j) = self.at(i, j).clone();
            }
        }
        out
    }

    /// Multiplicative inverse of a class whose constant term is `+1` or `-1`.
    pub fn inverse_unit(&self) -> Result<ChowClass, ChowError> {
        let c0 = self.at(0, 0).clone();
        if !(c0.is_one() || (-&c0).is_one()) {
            return Err(ChowError::NotInvertible(c0));
        }
        // self = c0 (1 + x) with x nilpotent; 1/(1+x) = sum (-x)^k
        let unit = self.scale(&c0);
        let x = &unit - &ChowClass::one(self.ambient);
        let minus_x = -&x;
        let mut acc = ChowClass::one(self.ambient);
        let mut power = ChowClass::one(self.ambient);
        for _ in 0..self.ambient.dim() {
            power = &power * &minus_x;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&c0))
    }

    /// `sum_c alpha^(c) / (1 + c1(L))^c`, with `alpha^(c)` the codimension-`c`
    /// part.
    pub fn aluffi_tensor(&self, line: LineBundleClass) -> ChowClass {
        let inv = line.total_chern(self.ambient).inverse_unit().expect("1 + c1 is a unit");
        let mut out = ChowClass::zero(self.ambient);
        let mut factor = ChowClass::one(self.ambient);
        for c in 0..=self.ambient.dim() {
            let part = self.codim_part(c);
            if !part.is_zero() {
                out = &out + &(&part * &factor);
            }
            factor = &factor * &inv;
        }
        out
    }

    /// `sum_c (-1)^c alpha^(c)`.
    pub fn dual(&self) -> ChowClass {
        let mut out = self.clone();
        for i in 0..=self.ambient.n {
            for j in 0..=self.ambient.h_max() {
                if (i + j) % 2 == 1 {
                    let v = -out.at(i, j);
                    *out.at_mut(i, j) = v;
                }
            }
        }
        out
    }

    /// Pushforward along the projection to `P^n`: the coefficient of `h^r`.
    pub fn pushforward_h(&self) -> Result<ChowClass, ChowError> {
        let r = self.ambient.r.ok_or(ChowError::NotAProduct)?;
        Ok(ChowClass::from_h_coeffs(self.ambient.n, (0..=self.ambient.n).map(|i| self.at(i, r).clone())))
    }
}

/// `(1+H)^(n+1) (1+h)^(r+1)`, the total Chern class of the tangent bundle.
pub fn chern_tangent(ambient: Ambient) -> ChowClass {
    let base = ChowClass::linear(ambient, 1, 1, 0).pow(ambient.n as u32 + 1);
    match ambient.r {
        Some(r) => &base * &ChowClass::linear(ambient, 1, 0, 1).pow(r as u32 + 1),
        None => base,
    }
}

impl std::ops::Add for &ChowClass {
    type Output = ChowClass;
    fn add(self, rhs: &ChowClass) -> ChowClass {
        self.checked_add(rhs).expect("ambient mismatch in class addition")
    }
}

impl std::ops::Sub for &ChowClass {
    type Output = ChowClass;
    fn sub(self, rhs: &ChowClass) -> ChowClass {
        self + &(-rhs)
    }
}

impl std::ops::Neg for &ChowClass {
    type Output = ChowClass;
    fn neg(self) -> ChowClass {
        ChowClass { ambient: self.ambient, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl std::ops::Mul for &ChowClass {
    type Output = ChowClass;
    fn mul(self, rhs: &ChowClass) -> ChowClass {
        self.checked_mul(rhs).expect("ambient mismatch in class product")
    }
}

/// Integer polynomial in `H`, `h`, terms ordered by `j` then `i`.
impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_in(f, "H", "h")
    }
}

impl ChowClass {
    /// Renders the class as a polynomial in the two given variable names.
    pub fn render(&self, x: &str, y: &str) -> String {
        struct Named<'a>(&'a ChowClass, &'a str, &'a str);
        impl fmt::Display for Named<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.write_in(f, self.1, self.2)
            }
        }
        Named(self, x, y).to_string()
    }

    fn write_in(&self, f: &mut fmt::Formatter<'_>, x: &str, y: &str) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, j, c)) in terms.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let has_var = *i > 0 || *j > 0;
            if !has_var || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{x}")?,
                _ => write!(f, "{x}^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "{y}")?,
                _ => write!(f, "{y}^{j}")?,
            }
        }
        Ok(())
    }
}

/// A line bundle through its first Chern class `a*H + b*h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineBundleClass {
    pub a: i64,
    pub b: i64,
}

impl LineBundleClass {
    pub fn new(a: i64, b: i64) -> Self {
        LineBundleClass { a, b }
    }

    pub fn c1(&self, ambient: Ambient) -> ChowClass {
        ChowClass::linear(ambient, 0, self.a, self.b)
    }

    /// `1 + c1`.
    pub fn total_chern(&self, ambient: Ambient) -> ChowClass {
        ChowClass::linear(ambient, 1, self.a, self.b)
    }

    pub fn dual(&self) -> Self {
        LineBundleClass { a: -self.a, b: -self.b }
    }

    /// The tensor product of the two bundles.
    pub fn tensor(&self, other: &Self) -> Self {
        LineBundleClass { a: self.a + other.a, b: self.b + other.b }
    }
}

// ---------------------------------------------------------------------------
// Projectivized split bundles.

/// The Chow ring of `P(E^dual)` for `E = O(d_0) + ... + O(d_r)` over `P^n`:
/// polynomials in `H` and `xi = c1(O(1))` modulo `H^(n+1)` and
/// `prod_i (xi - d_i H)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBundleRing {
    n: usize,
    twists: Vec<i64>,
    // prod_i (xi - d_i H) = sum_k rel[k] H^k xi^(rank-k)
    relation: Vec<BigInt>,
}

/// An element of a [`SplitBundleRing`], `coeffs[k][i]` multiplying
/// `xi^k H^i`. Reduced elements have `xi`-degree at most `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitBundleElement {
    coeffs: Vec<Vec<BigInt>>,
}

impl SplitBundleRing {
    pub fn new(n: usize, twists: &[i64]) -> Self {
        assert!(!twists.is_empty(), "a bundle needs positive rank");
        // expand prod (xi - d H) as a polynomial in H with xi-degrees implied
        let mut rel = vec![BigInt::one()];
        for &d in twists {
            let mut next = vec![BigInt::zero(); rel.len() + 1];
            for (k, c) in rel.iter().enumerate() {
                next[k] += c;
                next[k + 1] -= c * BigInt::from(d);
            }
            rel = next;
        }
        SplitBundleRing { n, twists: twists.to_vec(), relation: rel }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `r`, one less than the rank.
    pub fn r(&self) -> usize {
        self.twists.len() - 1
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    fn raw(&self, xi_deg: usize) -> SplitBundleElement {
        SplitBundleElement { coeffs: vec![vec![BigInt::zero(); self.n + 1]; xi_deg + 1] }
    }

    pub fn zero(&self) -> SplitBundleElement {
        self.raw(self.r())
    }

    /// `c * xi^k * H^i`, reduced.
    pub fn monomial(&self, k: usize, i: usize, c: impl Into<BigInt>) -> SplitBundleElement {
        let mut e = self.raw(k.max(self.r()));
        if i <= self.n {
            e.coeffs[k][i] = c.into();
        }
        self.reduce(e)
    }

    pub fn one(&self) -> SplitBundleElement {
        self.monomial(0, 0, 1)
    }

    pub fn xi(&self) -> SplitBundleElement {
        self.monomial(1, 0, 1)
    }

    pub fn h(&self) -> SplitBundleElement {
        self.monomial(0, 1, 1)
    }

    /// Rewrites `xi^(r+1+m)` from the top down using the Grothendieck relation.
    pub fn reduce(&self, mut e: SplitBundleElement) -> SplitBundleElement {
        let rank = self.twists.len();
        while e.coeffs.len() > rank {
            let top = e.coeffs.len() - 1;
            let row = e.coeffs.pop().unwrap();
            let shift = top - rank;
            // xi^top = -sum_{k>=1} rel[k] H^k xi^(top-k)
            for (k, rk) in self.relation.iter().enumerate().skip(1) {
                if rk.is_zero() {
                    continue;
                }
                let target = shift + rank - k;
                for i in 0..=self.n {
                    if i + k > self.n || row[i].is_zero() {
                        continue;
                    }
                    let v = &row[i] * rk;
                    e.coeffs[target][i + k] -= v;
                }
            }
        }
        while e.coeffs.len() < rank {
            e.coeffs.push(vec![BigInt::zero(); self.n + 1]);
        }
        e
    }

    pub fn add(&self, a: &SplitBundleElement, b: &SplitBundleElement) -> SplitBundleElement {
        let mut out = a.clone();
        for (row, brow) in out.coeffs.iter_mut().zip(&b.coeffs) {
            for (x, y) in row.iter_mut().zip(brow) {
                *x += y;
            }
        }
        out
    }

    pub fn scale(&self, a: &SplitBundleElement, c: &BigInt) -> SplitBundleElement {
        SplitBundleElement { coeffs: a.coeffs.iter().map(|row| row.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn mul(&self, a: &SplitBundleElement, b: &SplitBundleElement) -> SplitBundleElement {
        let mut out = self.raw(a.coeffs.len() + b.coeffs.len() - 2);
        for (k1, r1) in a.coeffs.iter().enumerate() {
            for (i1, c1) in r1.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                for (k2, r2) in b.coeffs.iter().enumerate() {
                    for (i2, c2) in r2.iter().enumerate().take(self.n + 1 - i1) {
                        if !c2.is_zero() {
                            out.coeffs[k1 + k2][i1 + i2] += c1 * c2;
                        }
                    }
                }
            }
        }
        self.reduce(out)
    }

    pub fn pow(&self, a: &SplitBundleElement, e: u32) -> SplitBundleElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// Inverse of `1 + x` for nilpotent `x`.
    pub fn inverse_one_plus(&self, x: &SplitBundleElement) -> SplitBundleElement {
        let minus = self.scale(x, &BigInt::from(-1));
        let mut acc = self.one();
        let mut power = self.one();
        for _ in 0..(self.n + self.r()) {
            power = self.mul(&power, &minus);
            acc = self.add(&acc, &power);
        }
        acc
    }

    /// Pushforward to `P^n`: the coefficient of `xi^r` of the reduced form.
    pub fn pb_pushforward(&self, e: &SplitBundleElement) -> ChowClass {
        let e = self.reduce(e.clone());
        ChowClass::from_h_coeffs(self.n, e.coeffs[self.r()].clone())
    }

    /// Total Chern class of `E` on `P^n`.
    pub fn chern_e(&self) -> ChowClass {
        let amb = Ambient::projective(self.n);
        self.twists.iter().fold(ChowClass::one(amb), |acc, &d| &acc * &ChowClass::linear(amb, 1, d, 0))
    }

    /// Top Chern class of `E` on `P^n`.
    pub fn chern_top(&self) -> ChowClass {
        let amb = Ambient::projective(self.n);
        self.twists.iter().fold(ChowClass::one(amb), |acc, &d| &acc * &ChowClass::linear(amb, 0, d, 0))
    }
}

impl SplitBundleElement {
    pub fn coeff(&self, xi_deg: usize, h_deg: usize) -> BigInt {
        self.coeffs.get(xi_deg).and_then(|row| row.get(h_deg)).cloned().unwrap_or_default()
    }

    pub fn xi_degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// Checks `pi_*( c(pi^*E^dual (x) O(1)) / c(O(1)) ) = 1 - c_top(E)/c(E)` on
/// `P^n` for the split bundle with the given twists.
pub fn bundle_pushforward_check(n: usize, twists: &[i64]) -> bool {
    let ring = SplitBundleRing::new(n, twists);
    let xi = ring.xi();
    let mut numerator = ring.one();
    for &d in twists {
        // 1 + xi - d H
        let factor = ring.add(&ring.add(&ring.one(), &xi), &ring.monomial(0, 1, -d));
        numerator = ring.mul(&numerator, &factor);
    }
    let lhs = ring.pb_pushforward(&ring.mul(&numerator, &ring.inverse_one_plus(&xi)));
    let amb = Ambient::projective(n);
    let ce_inv = ring.chern_e().inverse_unit().expect("c(E) has constant term 1");
    let rhs = &ChowClass::one(amb) - &(&ring.chern_top() * &ce_inv);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, c: &[i64]) -> ChowClass {
        ChowClass::from_h_coeffs(n, c.iter().copied())
    }

    #[test]
    fn truncation_and_inverse_pairs() {
        let amb = Ambient::projective(4);
        let h = ChowClass::term(amb, 1, 0, 1);
        assert!((&h * &ChowClass::term(amb, 4, 0, 1)).is_zero());
        let one_plus = ChowClass::linear(amb, 1, 1, 0);
        let alt = p(4, &[1, -1, 1, -1, 1]);
        assert_eq!(&one_plus * &alt, ChowClass::one(amb));
        assert_eq!(one_plus.inverse_unit().unwrap(), alt);
        assert_eq!(ChowClass::one(amb).inverse_unit().unwrap(), ChowClass::one(amb));
    }

    #[test]
    fn virtual_class_of_the_two_cubics() {
        // (1+H)^7 (1+3H)^(-2) 9H^2 on P^6
        let amb = Ambient::projective(6);
        let num = ChowClass::linear(amb, 1, 1, 0).pow(7);
        let den = ChowClass::linear(amb, 1, 3, 0).pow(2);
        let den_inv = den.inverse_unit().unwrap();
        assert_eq!(&den * &den_inv, ChowClass::one(amb));
        let v = &(&num * &den_inv) * &ChowClass::term(amb, 2, 0, 9);
        assert_eq!(v, p(6, &[0, 0, 9, 9, 54, -90, 369]));
    }

    #[test]
    fn geometric_series() {
        let amb = Ambient::projective(5);
        let inv = ChowClass::linear(amb, 1, 3, 0).inverse_unit().unwrap();
        assert_eq!(inv, p(5, &[1, -3, 9, -27, 81, -243]));
        let minus = ChowClass::linear(amb, -1, 2, 0).inverse_unit().unwrap();
        assert_eq!(&minus * &ChowClass::linear(amb, -1, 2, 0), ChowClass::one(amb));
        assert!(matches!(ChowClass::linear(amb, 2, 1, 0).inverse_unit(), Err(ChowError::NotInvertible(_))));
    }

    #[test]
    fn tensor_basics() {
        let amb = Ambient::product(3, 2);
        let alpha = ChowClass::linear(amb, 7, 0, 0);
        assert_eq!(alpha.aluffi_tensor(LineBundleClass::new(2, 1)), alpha);
        // H^i (x) O(dH) = H^i / (1+dH)^i
        let pn = Ambient::projective(5);
        for i in 0..=5usize {
            let hi = ChowClass::term(pn, i, 0, 1);
            let expect = &hi * &ChowClass::linear(pn, 1, 3, 0).pow(i as u32).inverse_unit().unwrap();
            assert_eq!(hi.aluffi_tensor(LineBundleClass::new(3, 0)), expect);
        }
    }

    #[test]
    fn dual_signs() {
        let amb = Ambient::projective(4);
        assert_eq!(p(4, &[1, 1, 1]).dual(), p(4, &[1, -1, 1]));
        let a = ChowClass::from_terms(Ambient::product(2, 2), [(1, 1, 3), (2, 1, -5), (0, 1, 2)]);
        assert_eq!(a.dual().dual(), a);
        assert_eq!(a.dual(), ChowClass::from_terms(Ambient::product(2, 2), [(1, 1, 3), (2, 1, 5), (0, 1, -2)]));
        let _ = amb;
    }

    #[test]
    fn pushforward_extracts_top_h() {
        let amb = Ambient::product(6, 1);
        let top = [-4, 9, -29, 107, -363];
        let low = [1, -3, 1, -17, 42];
        let mut terms = Vec::new();
        for k in 0..5 {
            terms.push((k + 2, 0, low[k]));
            terms.push((k + 2, 1, top[k]));
        }
        let a = ChowClass::from_terms(amb, terms);
        assert_eq!(a.pushforward_h().unwrap(), p(6, &[0, 0, -4, 9, -29, 107, -363]));
        let no_top = ChowClass::from_terms(amb, [(2, 0, 5)]);
        assert!(no_top.pushforward_h().unwrap().is_zero());
        assert_eq!(ChowClass::one(Ambient::projective(2)).pushforward_h(), Err(ChowError::NotAProduct));
    }

    #[test]
    fn chern_tangent_classes() {
        assert_eq!(chern_tangent(Ambient::projective(1)), p(1, &[1, 2]));
        let t = chern_tangent(Ambient::projective(6));
        assert_eq!(t.degree(), BigInt::from(7));
        let amb = Ambient::product(6, 1);
        let expect = &ChowClass::linear(amb, 1, 1, 0).pow(7) * &ChowClass::linear(amb, 1, 0, 1).pow(2);
        assert_eq!(chern_tangent(amb), expect);
    }

    #[test]
    fn display_order() {
        let amb = Ambient::product(2, 2);
        let s = ChowClass::from_terms(amb, [(1, 1, 1), (2, 0, 1), (1, 2, -1), (2, 1, -2), (2, 2, 3)]);
        assert_eq!(s.to_string(), "H^2 + Hh - 2H^2h - Hh^2 + 3H^2h^2");
        assert_eq!(ChowClass::zero(amb).to_string(), "0");
        assert_eq!(p(2, &[1, -1]).to_string(), "1 - H");
    }

    #[test]
    fn split_bundle_basics() {
        let ring = SplitBundleRing::new(3, &[1, 2]);
        assert_eq!(ring.pb_pushforward(&ring.pow(&ring.xi(), 1)), ChowClass::one(Ambient::projective(3)));
        assert!(ring.pb_pushforward(&ring.one()).is_zero());
        let big = SplitBundleRing::new(2, &[1, 1, 1]);
        assert_eq!(big.pb_pushforward(&big.pow(&big.xi(), 2)), ChowClass::one(Ambient::projective(2)));
        assert!(big.pb_pushforward(&big.xi()).is_zero());
    }

    #[test]
    fn split_pushforward_matches_product_extraction() {
        // E = O(d)^(r+1): P(E^dual) = P^n x P^r with xi = dH + h
        for (n, r, d) in [(3usize, 2usize, 2i64), (2, 2, 1), (4, 1, 3)] {
            let ring = SplitBundleRing::new(n, &vec![d; r + 1]);
            let amb = Ambient::product(n, r);
            for k in 0..=(n + r) {
                for i in 0..=n {
                    let e = ring.mul(&ring.pow(&ring.xi(), k as u32), &ring.monomial(0, i, 1));
                    let c = &ChowClass::linear(amb, 0, d, 1).pow(k as u32) * &ChowClass::term(amb, i, 0, 1);
                    assert_eq!(ring.pb_pushforward(&e), c.pushforward_h().unwrap(), "n={n} r={r} d={d} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn bundle_pushforward_examples() {
        for d in 0..=5 {
            for n in 1..=5 {
                for r in 0..=4 {
                    assert!(bundle_pushforward_check(n, &vec![d; r + 1]));
                }
            }
        }
        assert!(bundle_pushforward_check(3, &[1, 2, 3]));
        // rank beyond n: c_top vanishes and the right side is 1
        let ring = SplitBundleRing::new(2, &[1, 1, 1, 1]);
        assert!(ring.chern_top().is_zero());
        assert!(bundle_pushforward_check(2, &[1, 1, 1, 1]));
    }
}
