//! CSM classes of the schemes `X_N` cut out in every `P^N`, `N >= n`, by one
//! fixed set of forms in `x0..xn`, read off the numerator of the two-variable
//! Segre zeta function of `Y`.
//!
//! `P(t,u)` is the Segre class of `Y` in `P^(n+1) x P^(r+1)` times
//! `(1+dt)^(r+1) (1+(d-1)t+u)^(n+1)`, known modulo `(t^(n+2), u^(r+2))`.
//! The substitution `(t,u) -> (-t, -u)/(1+dt+u)` scaled by
//! `(1+dt+u)^(n+r+2)` turns it into `Q(t,u)`, whose `u^(r+1)` coefficient
//! `gamma(t)` gives `csm(X_N) = (1+H)^(N-n) gamma(H)`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::Zero;
use thiserror::Error;

use crate::charcls::{build_y_ideal, CharClassError, InputSystem};
use crate::chow::{Ambient, ChowClass, LineBundleClass};
use crate::poly::VarSpec;
use crate::segre::{self, SegreError, SegreOptions, SegreResult};

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("target dimension {target} is below the source dimension {n}")]
    BelowSource { target: usize, n: usize },
    #[error("the window must reach u^{need}, got u^{have}")]
    WindowTooSmall { need: usize, have: usize },
    #[error(transparent)]
    CharClass(#[from] CharClassError),
    #[error(transparent)]
    Segre(#[from] SegreError),
    #[error(transparent)]
    Poly(#[from] crate::poly::PolyError),
}

/// The numerator `P(t,u)` modulo `t^(n+2)` and `u^(u_max+1)`, stored as a class
/// on `P^(n+1) x P^(u_max)` with `t = H`, `u = h`.
#[derive(Debug, Clone)]
pub struct ZetaNumerator {
    pub n: usize,
    pub r: usize,
    pub d: u32,
    pub poly: ChowClass,
    pub segre: Option<SegreResult>,
}

impl ZetaNumerator {
    /// Wraps known coefficients `p[a][b]`; the window is taken from their
    /// shape.
    pub fn from_coeffs(n: usize, r: usize, d: u32, p: &[Vec<i64>]) -> Self {
        let u_max = p.iter().map(Vec::len).max().unwrap_or(1).max(r + 2) - 1;
        let ambient = Ambient::product(n + 1, u_max);
        let terms = p.iter().enumerate().flat_map(|(a, row)| row.iter().enumerate().map(move |(b, &c)| (a, b, c)));
        ZetaNumerator { n, r, d, poly: ChowClass::from_terms(ambient, terms), segre: None }
    }

    pub fn p(&self, a: usize, b: usize) -> BigInt {
        self.poly.coeff(a, b)
    }

    pub fn u_max(&self) -> usize {
        self.poly.ambient().h_max()
    }

    /// Restriction to the standard window `u <= r+1`.
    pub fn standard(&self) -> ChowClass {
        ChowClass::from_terms(Ambient::product(self.n + 1, self.r + 1), self.poly.terms())
    }
}

/// `(1+dt)^(r+1) (1+(d-1)t+u)^(n+1)` in the given window.
fn denominator(ambient: Ambient, n: usize, r: usize, d: u32) -> ChowClass {
    let d = d as i64;
    let a = LineBundleClass::new(d, 0).total_chern(ambient).pow(r as u32 + 1);
    let b = LineBundleClass::new(d - 1, 1).total_chern(ambient).pow(n as u32 + 1);
    &a * &b
}

/// Computes `P(t,u)` modulo `(t^(n+2), u^(r+2))`.
pub fn zeta_numerator(sys: &InputSystem, opts: &SegreOptions) -> Result<ZetaNumerator, ZetaError> {
    zeta_numerator_window(sys, sys.r() + 1, opts)
}

/// Computes `P(t,u)` modulo `(t^(n+2), u^(u_max+1))` from the Segre class of
/// `Y` in `P^(n+1) x P^(u_max)`, `u_max >= r+1`.
pub fn zeta_numerator_window(sys: &InputSystem, u_max: usize, opts: &SegreOptions) -> Result<ZetaNumerator, ZetaError> {
    let (n, r) = (sys.n, sys.r());
    if u_max < r + 1 {
        return Err(ZetaError::WindowTooSmall { need: r + 1, have: u_max });
    }
    let big = VarSpec::biprojective(n + 1, u_max);
    let ys = build_y_ideal(sys)?.iter().map(|g| g.embed(big)).collect::<Result<Vec<_>, _>>()?;
    let ambient = Ambient::product(n + 1, u_max);
    let s = segre::segre_class(&ys, ambient, opts)?;
    let poly = &s.cls * &denominator(ambient, n, r, sys.d);
    Ok(ZetaNumerator { n, r, d: sys.d, poly, segre: Some(s) })
}

/// The Segre class of `Y` in `P^(n+1) x P^(u_max)` recovered from `P`.
pub fn segre_from_numerator(p: &ZetaNumerator) -> ChowClass {
    let ambient = p.poly.ambient();
    let inv = denominator(ambient, p.n, p.r, p.d).inverse_unit().expect("constant term 1");
    &p.poly * &inv
}

/// `Q(t,u) = (1+dt+u)^(n+r+2) P(-t/(1+dt+u), -u/(1+dt+u))` modulo the window
/// of `P`.
pub fn involution_q(p: &ZetaNumerator) -> ChowClass {
    let ambient = p.poly.ambient();
    let total = p.n + p.r + 2;
    let base = LineBundleClass::new(p.d as i64, 1).total_chern(ambient);
    let inv = base.inverse_unit().expect("constant term 1");
    let mut out = ChowClass::zero(ambient);
    let scale = base.pow(total as u32);
    for (a, b, c) in p.poly.terms() {
        let sign = if (a + b) % 2 == 0 { c } else { -c };
        let mono = ChowClass::term(ambient, a, b, sign);
        let term = &mono * &inv.pow((a + b) as u32);
        out = &out + &term;
    }
    &out * &scale
}

/// Applies the same substitution to `Q`, returning the `ZetaNumerator` with
/// `Q` in place of `P`. Applying it twice gives back `P`.
pub fn involution(p: &ZetaNumerator) -> ZetaNumerator {
    ZetaNumerator { n: p.n, r: p.r, d: p.d, poly: involution_q(p), segre: None }
}

/// `gamma(t)`, the coefficient of `u^(r+1)` in `Q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPolynomial {
    pub n: usize,
    pub r: usize,
    pub d: u32,
    pub coeffs: Vec<BigInt>,
}

impl GammaPolynomial {
    pub fn from_coeffs(n: usize, r: usize, d: u32, coeffs: &[i64]) -> Self {
        let mut c: Vec<BigInt> = coeffs.iter().map(|&x| BigInt::from(x)).collect();
        c.resize(n + 2, BigInt::zero());
        GammaPolynomial { n, r, d, coeffs: c }
    }

    pub fn as_class(&self) -> ChowClass {
        ChowClass::from_h_coeffs(self.n + 1, self.coeffs.iter().cloned())
    }
}

impl std::fmt::Display for GammaPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_class().render("t", "u"))
    }
}

/// `(1+dt)^k` as coefficients of `t^0..t^k`.
fn one_plus_dt_pow(d: u32, k: usize) -> Vec<BigInt> {
    (0..=k).map(|i| binomial(BigInt::from(k), BigInt::from(i)) * BigInt::from(d).pow(i as u32)).collect()
}

/// `gamma(t) = sum (-1)^(a+b) p_ab C(n+r+2-a-b, r+1-b) t^a (1+dt)^(n+1-a)` over
/// `a <= n+1`, `b <= r+1`.
pub fn gamma_from_numerator(p: &ZetaNumerator) -> GammaPolynomial {
    let (n, r) = (p.n, p.r);
    let mut coeffs = vec![BigInt::zero(); n + 2];
    for a in 0..=n + 1 {
        let expand = one_plus_dt_pow(p.d, n + 1 - a);
        for b in 0..=r + 1 {
            let c = p.p(a, b);
            if c.is_zero() {
                continue;
            }
            let k = binomial(BigInt::from(n + r + 2 - a - b), BigInt::from(r + 1 - b));
            let c = if (a + b) % 2 == 0 { c * k } else { -(c * k) };
            for (i, e) in expand.iter().enumerate() {
                coeffs[a + i] += &c * e;
            }
        }
    }
    GammaPolynomial { n, r, d: p.d, coeffs }
}

/// `gamma(t)` read directly off the expansion of `Q`.
pub fn gamma_from_q(p: &ZetaNumerator) -> GammaPolynomial {
    let q = involution_q(p);
    GammaPolynomial { n: p.n, r: p.r, d: p.d, coeffs: (0..=p.n + 1).map(|a| q.coeff(a, p.r + 1)).collect() }
}

/// `gamma(t)` as the `v^(n+1)` coefficient of
/// `P(-tv/(1+v+dtv), -1/(1+v+dtv))`.
///
/// Every `u`-degree of `P` contributes, so this agrees with the other
/// extractions only when the window of `P` holds all of its `u`-terms.
pub fn gamma_by_series(p: &ZetaNumerator) -> GammaPolynomial {
    let n = p.n;
    let mut coeffs = vec![BigInt::zero(); n + 2];
    for (a, b, c) in p.poly.terms() {
        if a > n + 1 {
            continue;
        }
        // (-1)^(a+b) t^a v^a (1+v(1+dt))^(-(a+b)), coefficient of v^(n+1-a)
        let k = binomial(BigInt::from(n + b), BigInt::from(n + 1 - a));
        let c = if (b + n + 1) % 2 == 0 { c * k } else { -(c * k) };
        for (i, e) in one_plus_dt_pow(p.d, n + 1 - a).iter().enumerate() {
            coeffs[a + i] += &c * e;
        }
    }
    GammaPolynomial { n, r: p.r, d: p.d, coeffs }
}

/// `csm(X_N) = (1+H)^(N-n) gamma(H)` in `A(P^N)`.
pub fn csm_all_n(gamma: &GammaPolynomial, target: usize) -> Result<ChowClass, ZetaError> {
    if target < gamma.n {
        return Err(ZetaError::BelowSource { target, n: gamma.n });
    }
    let ambient = Ambient::projective(target);
    let g = ChowClass::from_h_coeffs(target, gamma.coeffs.iter().cloned());
    let lift = LineBundleClass::new(1, 0).total_chern(ambient).pow((target - gamma.n) as u32);
    Ok(&lift * &g)
}

/// Checks the stabilization property on a truncated power series `s`: if the
/// coefficient of `h^R` in `(1+h)^R s(h)` is one nonzero constant `C` for every
/// `R` from `n` to the end of the known window, then `(1+h)^n s(h)` has no
/// terms above `h^n` in that window and its `h^n` coefficient is `C`. Returns
/// `true` when the hypothesis fails.
pub fn stabilization_holds(s: &[BigInt], n: usize) -> bool {
    let len = s.len();
    if n >= len {
        return true;
    }
    let times = |k: usize| {
        let mut out = vec![BigInt::zero(); len];
        for (i, si) in s.iter().enumerate() {
            for j in 0..=k.min(len - 1 - i) {
                out[i + j] += si * binomial(BigInt::from(k), BigInt::from(j));
            }
        }
        out
    };
    let c = times(n)[n].clone();
    if c.is_zero() || (n..len).any(|k| times(k)[k] != c) {
        return true;
    }
    let base = times(n);
    base[n] == c && base[n + 1..].iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_example() -> ZetaNumerator {
        // the printed terms of P for (x1x2, x0x2, x0x1)
        let mut p = vec![vec![0i64; 4]; 4];
        p[3][0] = 1;
        p[3][1] = 6;
        p[2][2] = 3;
        p[3][2] = 18;
        p[2][3] = 3;
        p[3][3] = 8;
        ZetaNumerator::from_coeffs(2, 2, 2, &p)
    }

    #[test]
    fn gamma_of_the_coordinate_triangle() {
        let p = first_example();
        let g = gamma_from_numerator(&p);
        assert_eq!(g, GammaPolynomial::from_coeffs(2, 2, 2, &[0, 0, 3, 1]));
        assert_eq!(gamma_from_q(&p), g);
        assert_eq!(g.to_string(), "3t^2 + t^3");
        // Q mod t^4 = -t^3 + 3t^3u + (3t^2+3t^3)u^2 + (3t^2+t^3)u^3
        let want_q = ChowClass::from_terms(p.poly.ambient(), [(3, 0, -1), (3, 1, 3), (2, 2, 3), (3, 2, 3), (2, 3, 3), (3, 3, 1)]);
        assert_eq!(involution_q(&p), want_q);
        let csm = csm_all_n(&g, 6).unwrap();
        assert_eq!(csm, ChowClass::from_h_coeffs(6, [0, 0, 3, 13, 22, 18, 7]));
    }

    #[test]
    fn involution_is_an_involution() {
        let p = first_example();
        let back = involution(&involution(&p));
        assert_eq!(back.poly, p.poly);
    }

    #[test]
    fn single_top_term() {
        // p_(0,r+1) u^(r+1) gives p (1+dt)^(n+1) (-1)^(r+1)
        let mut p = vec![vec![0i64; 3]; 3];
        p[0][2] = 5;
        let z = ZetaNumerator::from_coeffs(1, 1, 3, &p);
        let g = gamma_from_numerator(&z);
        assert_eq!(g, GammaPolynomial::from_coeffs(1, 1, 3, &[5, 30, 45]));
        assert_eq!(gamma_from_q(&z), g);
    }

    #[test]
    fn zero_numerator() {
        let z = ZetaNumerator::from_coeffs(2, 1, 2, &[]);
        assert!(involution_q(&z).is_zero());
        assert!(gamma_from_numerator(&z).coeffs.iter().all(Zero::is_zero));
    }

    #[test]
    fn lifting_targets() {
        let g = GammaPolynomial::from_coeffs(3, 1, 3, &[0, 0, 5, 3, 1]);
        assert_eq!(csm_all_n(&g, 3).unwrap(), ChowClass::from_h_coeffs(3, [0, 0, 5, 3]));
        assert_eq!(csm_all_n(&g, 6).unwrap(), ChowClass::from_h_coeffs(6, [0, 0, 5, 18, 25, 17, 6]));
        assert!(matches!(csm_all_n(&g, 2), Err(ZetaError::BelowSource { target: 2, n: 3 })));
    }

    #[test]
    fn stabilization_on_a_rational_series() {
        // s = (2 + 3h + 4h^2) / (1+h)^2
        let num = [2i64, 3, 4];
        let mut s = vec![BigInt::zero(); 10];
        for k in 0..10 {
            // coefficients of (1+h)^(-2) are (-1)^k (k+1)
            let coeff = if k % 2 == 0 { k as i64 + 1 } else { -(k as i64 + 1) };
            for (i, &a) in num.iter().enumerate() {
                if i + k < 10 {
                    s[i + k] += a * coeff;
                }
            }
        }
        assert!(stabilization_holds(&s, 2));
    }
}
