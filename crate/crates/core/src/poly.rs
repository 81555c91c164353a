//! Sparse multivariate polynomials over a prime field or the rationals.
//!
//! Variables are positional: the x-block comes first, then the y-block, then
//! any auxiliary variables. Terms are kept sorted in descending
//! degree-reverse-lexicographic order over the concatenated variable list and
//! no stored coefficient is ever zero, so structural equality is polynomial
//! equality.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;
use thiserror::Error;

/// Default modulus for prime-field work.
pub const DEFAULT_PRIME: u32 = 32003;

/// Largest exponent a single variable may carry.
pub const MAX_EXPONENT: u16 = (1 << 15) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable `{token}` at byte {pos}")]
    UnknownVariable { pos: usize, token: String },
    #[error("exponent overflow (exponents must stay below 2^15)")]
    ExponentOverflow,
    #[error("bad prime {prime}: a denominator vanishes modulo it")]
    BadPrime { prime: u32 },
    #[error("ring or variable mismatch between operands")]
    Mismatch,
    #[error("variable index {index} out of range ({total} variables)")]
    VariableOutOfRange { index: usize, total: usize },
    #[error("invalid variable layout: {0}")]
    InvalidVarSpec(String),
    #[error("operation requires a prime field")]
    NotPrimeField,
}

/// Layout of the variable list: `x_count` x-variables, `y_count` y-variables
/// and `aux_count` auxiliary variables, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarSpec {
    pub x_count: usize,
    pub y_count: usize,
    pub aux_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    X,
    Y,
    Aux,
}

impl VarSpec {
    pub fn new(x_count: usize, y_count: usize, aux_count: usize) -> Result<Self, PolyError> {
        if x_count == 0 {
            return Err(PolyError::InvalidVarSpec("at least one x-variable is required".into()));
        }
        Ok(VarSpec { x_count, y_count, aux_count })
    }

    /// Coordinates `x0..xn` of a single projective space.
    pub fn projective(n: usize) -> Self {
        VarSpec { x_count: n + 1, y_count: 0, aux_count: 0 }
    }

    /// Coordinates `x0..xn, y0..yr` of a product of two projective spaces.
    pub fn biprojective(n: usize, r: usize) -> Self {
        VarSpec { x_count: n + 1, y_count: r + 1, aux_count: 0 }
    }

    pub fn total(&self) -> usize {
        self.x_count + self.y_count + self.aux_count
    }

    pub fn with_aux(&self, aux_count: usize) -> Self {
        VarSpec { aux_count, ..*self }
    }

    pub fn x_index(&self, i: usize) -> usize {
        debug_assert!(i < self.x_count);
        i
    }

    pub fn y_index(&self, j: usize) -> usize {
        debug_assert!(j < self.y_count);
        self.x_count + j
    }

    pub fn aux_index(&self, k: usize) -> usize {
        debug_assert!(k < self.aux_count);
        self.x_count + self.y_count + k
    }

    pub fn block_of(&self, index: usize) -> Block {
        if index < self.x_count {
            Block::X
        } else if index < self.x_count + self.y_count {
            Block::Y
        } else {
            Block::Aux
        }
    }

    pub fn name(&self, index: usize) -> String {
        match self.block_of(index) {
            Block::X => format!("x{index}"),
            Block::Y => format!("y{}", index - self.x_count),
            Block::Aux => format!("z{}", index - self.x_count - self.y_count),
        }
    }
}

/// The coefficient ring of a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ring {
    Prime(u32),
    Rational,
}

/// Degree in the x-block and in the y-block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BiDegree {
    pub a: u32,
    pub b: u32,
}

impl BiDegree {
    pub fn new(a: u32, b: u32) -> Self {
        BiDegree { a, b }
    }

    /// Componentwise maximum.
    pub fn join(self, other: BiDegree) -> BiDegree {
        BiDegree { a: self.a.max(other.a), b: self.b.max(other.b) }
    }

    /// Componentwise partial order.
    pub fn le(self, other: BiDegree) -> bool {
        self.a <= other.a && self.b <= other.b
    }
}

impl std::ops::Add for BiDegree {
    type Output = BiDegree;
    fn add(self, o: BiDegree) -> BiDegree {
        BiDegree { a: self.a + o.a, b: self.b + o.b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BidegreeError {
    #[error("the zero polynomial has no bidegree")]
    Zero,
    #[error("polynomial is not bihomogeneous")]
    NotBihomogeneous,
}

/// An exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u16; 16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        Monomial(SmallVec::from_slice(exps))
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[index] = 1;
        m
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponents_mut(&mut self) -> &mut [u16] {
        &mut self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        let mut out = self.0.clone();
        for (a, &b) in out.iter_mut().zip(other.0.iter()) {
            let s = *a as u32 + b as u32;
            if s > MAX_EXPONENT as u32 {
                return Err(PolyError::ExponentOverflow);
            }
            *a = s as u16;
        }
        Ok(Monomial(out))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.checked_mul(other).expect("exponent overflow in monomial product")
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(self.0.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Degree-reverse-lexicographic comparison of exponent vectors.
pub fn degrevlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

// ---------------------------------------------------------------------------
// Coefficient arithmetic, shared by the two concrete rings.

pub(crate) trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_bigint(&self, a: &BigInt) -> Self::Elem;
}

#[derive(Clone, Copy)]
pub(crate) struct Fp(pub u32);
pub(crate) struct Qq;

impl Field for Fp {
    type Elem = u32;
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a as u64 + *b as u64;
        (s % self.0 as u64) as u32
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.0 as u64) as u32
    }
    fn from_bigint(&self, a: &BigInt) -> u32 {
        let m = BigInt::from(self.0);
        a.mod_floor(&m).to_u32().expect("residue fits")
    }
}

impl Field for Qq {
    type Elem = BigRational;
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_bigint(&self, a: &BigInt) -> BigRational {
        BigRational::from_integer(a.clone())
    }
}

/// Modular inverse in `Z/p`, `p` prime, `a != 0`.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut a: u32, mut e: u32, p: u32) -> u32 {
    let mut acc: u64 = 1 % p as u64;
    let mut base = a as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    a = acc as u32;
    a
}

type Terms<C> = Vec<(Monomial, C)>;

fn sort_and_combine<F: Field>(f: &F, mut terms: Terms<F::Elem>) -> Terms<F::Elem> {
    terms.sort_by(|a, b| degrevlex_cmp(b.0.exponents(), a.0.exponents()));
    let mut out: Terms<F::Elem> = Vec::with_capacity(terms.len());
    for (m, c) in terms {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc = f.add(lc, &c),
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| !f.is_zero(c));
    out
}

fn add_terms<F: Field>(f: &F, a: &[(Monomial, F::Elem)], b: &[(Monomial, F::Elem)]) -> Terms<F::Elem> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match degrevlex_cmp(a[i].0.exponents(), b[j].0.exponents()) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = f.add(&a[i].1, &b[j].1);
                if !f.is_zero(&c) {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn mul_terms<F: Field>(
    f: &F,
    a: &[(Monomial, F::Elem)],
    b: &[(Monomial, F::Elem)],
) -> Result<Terms<F::Elem>, PolyError> {
    let mut acc: Terms<F::Elem> = Vec::with_capacity(a.len() * b.len());
    for (ma, ca) in a {
        for (mb, cb) in b {
            acc.push((ma.checked_mul(mb)?, f.mul(ca, cb)));
        }
    }
    Ok(sort_and_combine(f, acc))
}

fn scale_terms<F: Field>(f: &F, a: &[(Monomial, F::Elem)], c: &F::Elem) -> Terms<F::Elem> {
    if f.is_zero(c) {
        return Vec::new();
    }
    a.iter().map(|(m, x)| (m.clone(), f.mul(x, c))).filter(|(_, x)| !f.is_zero(x)).collect()
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum TermList {
    Prime(u32, Terms<u32>),
    Rational(Terms<BigRational>),
}

/// A sparse polynomial over [`Ring`] in the variables of a [`VarSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarSpec,
    terms: TermList,
}

macro_rules! dispatch2 {
    ($a:expr, $b:expr, |$f:ident, $x:ident, $y:ident| $body:expr, $wrap_p:expr, $wrap_q:expr) => {
        match (&$a.terms, &$b.terms) {
            (TermList::Prime(p, $x), TermList::Prime(q, $y)) if p == q => {
                let $f = Fp(*p);
                ($wrap_p)(*p, $body)
            }
            (TermList::Rational($x), TermList::Rational($y)) => {
                let $f = Qq;
                ($wrap_q)($body)
            }
            _ => panic!("ring mismatch between polynomial operands"),
        }
    };
}

impl MultiPoly {
    pub fn zero(vars: VarSpec, ring: Ring) -> Self {
        let terms = match ring {
            Ring::Prime(p) => TermList::Prime(p, Vec::new()),
            Ring::Rational => TermList::Rational(Vec::new()),
        };
        MultiPoly { vars, terms }
    }

    pub fn constant(vars: VarSpec, ring: Ring, c: i64) -> Self {
        Self::monomial(vars, ring, Monomial::one(vars.total()), c)
    }

    pub fn one(vars: VarSpec, ring: Ring) -> Self {
        Self::constant(vars, ring, 1)
    }

    /// The variable with positional index `index`.
    pub fn var(vars: VarSpec, ring: Ring, index: usize) -> Self {
        Self::monomial(vars, ring, Monomial::var(vars.total(), index), 1)
    }

    pub fn x(vars: VarSpec, ring: Ring, i: usize) -> Self {
        Self::var(vars, ring, vars.x_index(i))
    }

    pub fn y(vars: VarSpec, ring: Ring, j: usize) -> Self {
        Self::var(vars, ring, vars.y_index(j))
    }

    pub fn monomial(vars: VarSpec, ring: Ring, m: Monomial, c: i64) -> Self {
        assert_eq!(m.nvars(), vars.total());
        Self::from_bigint_terms(vars, ring, vec![(m, BigInt::from(c))])
    }

    /// Builds a polynomial from arbitrary (unsorted, possibly repeated) terms.
    pub fn from_bigint_terms(vars: VarSpec, ring: Ring, terms: Vec<(Monomial, BigInt)>) -> Self {
        let terms = match ring {
            Ring::Prime(p) => {
                let f = Fp(p);
                TermList::Prime(
                    p,
                    sort_and_combine(&f, terms.into_iter().map(|(m, c)| (m, f.from_bigint(&c))).collect()),
                )
            }
            Ring::Rational => TermList::Rational(sort_and_combine(
                &Qq,
                terms.into_iter().map(|(m, c)| (m, BigRational::from_integer(c))).collect(),
            )),
        };
        MultiPoly { vars, terms }
    }

    pub fn from_prime_terms(vars: VarSpec, p: u32, terms: Vec<(Monomial, u32)>) -> Self {
        let f = Fp(p);
        let terms = terms.into_iter().map(|(m, c)| (m, c % p)).collect();
        MultiPoly { vars, terms: TermList::Prime(p, sort_and_combine(&f, terms)) }
    }

    pub fn from_rational_terms(vars: VarSpec, terms: Vec<(Monomial, BigRational)>) -> Self {
        MultiPoly { vars, terms: TermList::Rational(sort_and_combine(&Qq, terms)) }
    }

    pub fn vars(&self) -> VarSpec {
        self.vars
    }

    pub fn ring(&self) -> Ring {
        match self.terms {
            TermList::Prime(p, _) => Ring::Prime(p),
            TermList::Rational(_) => Ring::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    pub fn len(&self) -> usize {
        match &self.terms {
            TermList::Prime(_, t) => t.len(),
            TermList::Rational(t) => t.len(),
        }
    }

    /// Monomials in descending order.
    pub fn monomials(&self) -> Vec<&Monomial> {
        match &self.terms {
            TermList::Prime(_, t) => t.iter().map(|(m, _)| m).collect(),
            TermList::Rational(t) => t.iter().map(|(m, _)| m).collect(),
        }
    }

    pub fn prime_terms(&self) -> Option<&[(Monomial, u32)]> {
        match &self.terms {
            TermList::Prime(_, t) => Some(t),
            TermList::Rational(_) => None,
        }
    }

    pub fn rational_terms(&self) -> Option<&[(Monomial, BigRational)]> {
        match &self.terms {
            TermList::Rational(t) => Some(t),
            TermList::Prime(..) => None,
        }
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.monomials().first().copied()
    }

    fn same_space(&self, other: &MultiPoly) -> bool {
        self.vars == other.vars && self.ring() == other.ring()
    }

    pub fn checked_add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        if !self.same_space(other) {
            return Err(PolyError::Mismatch);
        }
        let vars = self.vars;
        Ok(dispatch2!(
            self,
            other,
            |f, a, b| add_terms(&f, a, b),
            |p, t| MultiPoly { vars, terms: TermList::Prime(p, t) },
            |t| MultiPoly { vars, terms: TermList::Rational(t) }
        ))
    }

    pub fn checked_mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        if !self.same_space(other) {
            return Err(PolyError::Mismatch);
        }
        let vars = self.vars;
        dispatch2!(
            self,
            other,
            |f, a, b| mul_terms(&f, a, b),
            |p, t: Result<_, _>| t.map(|t| MultiPoly { vars, terms: TermList::Prime(p, t) }),
            |t: Result<_, _>| t.map(|t| MultiPoly { vars, terms: TermList::Rational(t) })
        )
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale_i64(-1)
    }

    pub fn scale_i64(&self, c: i64) -> MultiPoly {
        self.scale_bigint(&BigInt::from(c))
    }

    pub fn scale_bigint(&self, c: &BigInt) -> MultiPoly {
        let terms = match &self.terms {
            TermList::Prime(p, t) => {
                let f = Fp(*p);
                TermList::Prime(*p, scale_terms(&f, t, &f.from_bigint(c)))
            }
            TermList::Rational(t) => TermList::Rational(scale_terms(&Qq, t, &Qq.from_bigint(c))),
        };
        MultiPoly { vars: self.vars, terms }
    }

    pub fn scale_rational(&self, c: &BigRational) -> MultiPoly {
        match &self.terms {
            TermList::Rational(t) => {
                MultiPoly { vars: self.vars, terms: TermList::Rational(scale_terms(&Qq, t, c)) }
            }
            TermList::Prime(..) => panic!("rational scalar applied to a prime-field polynomial"),
        }
    }

    /// Multiplication by a field element given as a residue (prime field only).
    pub fn scale_residue(&self, c: u32) -> MultiPoly {
        match &self.terms {
            TermList::Prime(p, t) => {
                MultiPoly { vars: self.vars, terms: TermList::Prime(*p, scale_terms(&Fp(*p), t, &(c % p))) }
            }
            TermList::Rational(_) => panic!("residue scalar applied to a rational polynomial"),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Result<MultiPoly, PolyError> {
        let terms = match &self.terms {
            TermList::Prime(p, t) => TermList::Prime(
                *p,
                t.iter().map(|(x, c)| Ok((x.checked_mul(m)?, *c))).collect::<Result<_, PolyError>>()?,
            ),
            TermList::Rational(t) => TermList::Rational(
                t.iter().map(|(x, c)| Ok((x.checked_mul(m)?, c.clone()))).collect::<Result<_, PolyError>>()?,
            ),
        };
        // multiplying by a monomial preserves degrevlex order
        Ok(MultiPoly { vars: self.vars, terms })
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(self.vars, self.ring());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.monomials().iter().map(|m| m.degree()).max()
    }

    /// `Some(d)` if every term has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let ms = self.monomials();
        let d = ms.first()?.degree();
        ms.iter().all(|m| m.degree() == d).then_some(d)
    }

    fn block_degrees(&self, m: &Monomial) -> (u32, u32, u32) {
        let e = m.exponents();
        let xs = self.vars.x_count;
        let ys = xs + self.vars.y_count;
        let a = e[..xs].iter().map(|&v| v as u32).sum();
        let b = e[xs..ys].iter().map(|&v| v as u32).sum();
        let c = e[ys..].iter().map(|&v| v as u32).sum();
        (a, b, c)
    }

    /// The common (x-degree, y-degree) of all terms. Auxiliary variables must
    /// not occur.
    pub fn bidegree(&self) -> Result<BiDegree, BidegreeError> {
        let ms = self.monomials();
        let first = ms.first().ok_or(BidegreeError::Zero)?;
        let (a, b, c) = self.block_degrees(first);
        if c != 0 {
            return Err(BidegreeError::NotBihomogeneous);
        }
        for m in &ms[1..] {
            if self.block_degrees(m) != (a, b, 0) {
                return Err(BidegreeError::NotBihomogeneous);
            }
        }
        Ok(BiDegree { a, b })
    }

    /// Formal partial derivative with respect to the variable at `index`.
    pub fn partial_derivative(&self, index: usize) -> Result<MultiPoly, PolyError> {
        let total = self.vars.total();
        if index >= total {
            return Err(PolyError::VariableOutOfRange { index, total });
        }
        fn diff<F: Field>(f: &F, t: &[(Monomial, F::Elem)], index: usize) -> Terms<F::Elem> {
            let mut out = Vec::new();
            for (m, c) in t {
                let e = m.exponents()[index];
                if e == 0 {
                    continue;
                }
                let mut dm = m.clone();
                dm.exponents_mut()[index] -= 1;
                let k = f.from_bigint(&BigInt::from(e));
                let nc = f.mul(c, &k);
                if !f.is_zero(&nc) {
                    out.push((dm, nc));
                }
            }
            // lowering one exponent can break the order only among terms that
            // collide, which cannot happen; re-sort anyway to stay canonical
            sort_and_combine(f, out)
        }
        let terms = match &self.terms {
            TermList::Prime(p, t) => TermList::Prime(*p, diff(&Fp(*p), t, index)),
            TermList::Rational(t) => TermList::Rational(diff(&Qq, t, index)),
        };
        Ok(MultiPoly { vars: self.vars, terms })
    }

    /// Coefficientwise image in `Z/prime`.
    pub fn reduce_mod_p(&self, prime: u32) -> Result<MultiPoly, PolyError> {
        match &self.terms {
            TermList::Prime(p, _) if *p == prime => Ok(self.clone()),
            TermList::Prime(..) => Err(PolyError::Mismatch),
            TermList::Rational(t) => {
                let f = Fp(prime);
                let mut out = Vec::with_capacity(t.len());
                for (m, c) in t {
                    let den = f.from_bigint(c.denom());
                    if den == 0 {
                        return Err(PolyError::BadPrime { prime });
                    }
                    let num = f.from_bigint(c.numer());
                    let v = f.mul(&num, &inv_mod(den, prime));
                    if v != 0 {
                        out.push((m.clone(), v));
                    }
                }
                Ok(MultiPoly { vars: self.vars, terms: TermList::Prime(prime, out) })
            }
        }
    }

    /// Re-homes the polynomial in a larger variable layout, sending each
    /// x/y/aux variable to the variable with the same block and block index.
    pub fn embed(&self, target: VarSpec) -> Result<MultiPoly, PolyError> {
        let v = self.vars;
        if target.x_count < v.x_count || target.y_count < v.y_count || target.aux_count < v.aux_count {
            return Err(PolyError::InvalidVarSpec("target layout is smaller than the source".into()));
        }
        let map = |m: &Monomial| {
            let mut out = Monomial::one(target.total());
            let e = m.exponents();
            let o = out.exponents_mut();
            o[..v.x_count].copy_from_slice(&e[..v.x_count]);
            o[target.x_count..target.x_count + v.y_count].copy_from_slice(&e[v.x_count..v.x_count + v.y_count]);
            let ta = target.x_count + target.y_count;
            o[ta..ta + v.aux_count].copy_from_slice(&e[v.x_count + v.y_count..]);
            out
        };
        let terms = match &self.terms {
            TermList::Prime(p, t) => {
                TermList::Prime(*p, sort_and_combine(&Fp(*p), t.iter().map(|(m, c)| (map(m), *c)).collect()))
            }
            TermList::Rational(t) => {
                TermList::Rational(sort_and_combine(&Qq, t.iter().map(|(m, c)| (map(m), c.clone())).collect()))
            }
        };
        Ok(MultiPoly { vars: target, terms })
    }

    /// Substitutes `images[k]` for variable `k`. All images share one layout
    /// and ring, which must match this polynomial's ring.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        let total = self.vars.total();
        if images.len() != total {
            return Err(PolyError::Mismatch);
        }
        let target = images[0].vars;
        let ring = self.ring();
        if images.iter().any(|q| q.vars != target || q.ring() != ring) {
            return Err(PolyError::Mismatch);
        }
        let mut max_exp = vec![0u16; total];
        for m in self.monomials() {
            for (k, &e) in m.exponents().iter().enumerate() {
                max_exp[k] = max_exp[k].max(e);
            }
        }
        let powers: Vec<Vec<MultiPoly>> = (0..total)
            .map(|k| {
                let mut ps = vec![MultiPoly::one(target, ring)];
                for e in 1..=max_exp[k] as usize {
                    let next = ps[e - 1].checked_mul(&images[k])?;
                    ps.push(next);
                }
                Ok(ps)
            })
            .collect::<Result<_, PolyError>>()?;
        let mut acc = MultiPoly::zero(target, ring);
        let mut push = |m: &Monomial, coeff: MultiPoly| -> Result<(), PolyError> {
            let mut term = coeff;
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.checked_mul(&powers[k][e as usize])?;
                }
            }
            acc = acc.checked_add(&term)?;
            Ok(())
        };
        match &self.terms {
            TermList::Prime(p, t) => {
                for (m, c) in t {
                    push(m, MultiPoly::from_prime_terms(target, *p, vec![(Monomial::one(target.total()), *c)]))?;
                }
            }
            TermList::Rational(t) => {
                for (m, c) in t {
                    push(m, MultiPoly::from_rational_terms(target, vec![(Monomial::one(target.total()), c.clone())]))?;
                }
            }
        }
        Ok(acc)
    }

    /// Evaluates at a point of `(Z/p)^total` (prime field only).
    pub fn evaluate_mod_p(&self, point: &[u32]) -> Result<u32, PolyError> {
        let (p, t) = match &self.terms {
            TermList::Prime(p, t) => (*p, t),
            TermList::Rational(_) => return Err(PolyError::NotPrimeField),
        };
        let f = Fp(p);
        let mut acc = 0u32;
        for (m, c) in t {
            let mut v = *c;
            for (k, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    v = f.mul(&v, &pow_mod(point[k], e as u32, p));
                }
            }
            acc = f.add(&acc, &v);
        }
        Ok(acc)
    }

    /// Content-free integer multiple of a rational polynomial.
    pub fn primitive_integer_part(&self) -> MultiPoly {
        let Some(t) = self.rational_terms() else {
            return self.clone();
        };
        if t.is_empty() {
            return self.clone();
        }
        let lcm = t.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = t.iter().map(|(_, c)| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let mut g = if g.is_zero() { BigInt::one() } else { g };
        if t[0].1.is_negative() {
            g = -g;
        }
        let terms = t.iter().zip(ints).map(|((m, _), c)| (m.clone(), BigRational::from_integer(c / &g))).collect();
        MultiPoly { vars: self.vars, terms: TermList::Rational(terms) }
    }
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial addition across different rings")
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &rhs.neg()
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial multiplication failed")
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly::neg(self)
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, vars: &VarSpec, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (k, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", vars.name(k))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    vars: &VarSpec,
    first: bool,
    negative: bool,
    magnitude: &str,
    m: &Monomial,
) -> fmt::Result {
    match (first, negative) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    if m.is_one() {
        write!(f, "{magnitude}")
    } else if magnitude == "1" {
        write_monomial(f, vars, m)
    } else {
        write!(f, "{magnitude}*")?;
        write_monomial(f, vars, m)
    }
}

/// Canonical text form, parseable back with [`parse_poly`] when all
/// coefficients are integers.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        match &self.terms {
            TermList::Prime(_, t) => {
                for (k, (m, c)) in t.iter().enumerate() {
                    write_term(f, &self.vars, k == 0, false, &c.to_string(), m)?;
                }
            }
            TermList::Rational(t) => {
                for (k, (m, c)) in t.iter().enumerate() {
                    let mag = c.abs();
                    let s = if mag.is_integer() { mag.numer().to_string() } else { format!("({mag})") };
                    write_term(f, &self.vars, k == 0, c.is_negative(), &s, m)?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing.

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: VarSpec,
    ring: Ring,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> PolyError {
        PolyError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        // an optional leading sign is accepted so that printed output parses back
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.checked_mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let d = self.digits().ok_or_else(|| self.err("expected an exponent"))?;
            let e: u32 = d.parse().map_err(|_| PolyError::ExponentOverflow)?;
            if e > MAX_EXPONENT as u32 {
                let _ = at;
                return Err(PolyError::ExponentOverflow);
            }
            let mut acc = MultiPoly::one(self.vars, self.ring);
            for _ in 0..e {
                acc = acc.checked_mul(&base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().unwrap();
                let v: BigInt = d.parse().expect("digits parse as an integer");
                Ok(MultiPoly::from_bigint_terms(self.vars, self.ring, vec![(Monomial::one(self.vars.total()), v)]))
            }
            Some(c @ (b'x' | b'y')) => {
                let start = self.pos;
                self.pos += 1;
                let idx = self.digits().ok_or_else(|| self.err("expected a variable index"))?;
                let token = format!("{}{}", c as char, idx);
                let unknown = || PolyError::UnknownVariable { pos: start, token: token.clone() };
                let i: usize = idx.parse().map_err(|_| unknown())?;
                let index = match c {
                    b'x' if i < self.vars.x_count => self.vars.x_index(i),
                    b'y' if i < self.vars.y_count => self.vars.y_index(i),
                    _ => return Err(unknown()),
                };
                Ok(MultiPoly::var(self.vars, self.ring, index))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let token = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                Err(PolyError::UnknownVariable { pos: start, token })
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses `text` in the grammar
/// `expr := term (('+'|'-') term)*`, `term := factor ('*' factor)*`,
/// `factor := base ('^' uint)?`, `base := int | var | '(' expr ')'`,
/// `var := 'x' uint | 'y' uint`, with an optional leading sign on an `expr`.
pub fn parse_poly(text: &str, vars: VarSpec, ring: Ring) -> Result<MultiPoly, PolyError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, vars, ring };
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------

/// All exponent vectors of degree `deg` in the variables `range`, embedded in
/// `nvars` variables.
pub fn monomials_in_range(nvars: usize, range: std::ops::Range<usize>, deg: u32) -> Vec<Monomial> {
    fn rec(out: &mut Vec<Monomial>, cur: &mut Monomial, vars: &[usize], left: u32) {
        match vars.split_first() {
            None => {
                if left == 0 {
                    out.push(cur.clone());
                }
            }
            Some((&v, rest)) => {
                if rest.is_empty() {
                    cur.exponents_mut()[v] = left as u16;
                    out.push(cur.clone());
                    cur.exponents_mut()[v] = 0;
                    return;
                }
                for e in (0..=left).rev() {
                    cur.exponents_mut()[v] = e as u16;
                    rec(out, cur, rest, left - e);
                }
                cur.exponents_mut()[v] = 0;
            }
        }
    }
    let vars: Vec<usize> = range.collect();
    let mut out = Vec::new();
    if vars.is_empty() {
        if deg == 0 {
            out.push(Monomial::one(nvars));
        }
        return out;
    }
    rec(&mut out, &mut Monomial::one(nvars), &vars, deg);
    out
}

/// All monomials of bidegree `deg` over the x- and y-blocks of `vars`.
pub fn monomials_of_bidegree(vars: VarSpec, deg: BiDegree) -> Vec<Monomial> {
    let n = vars.total();
    let xs = monomials_in_range(n, 0..vars.x_count, deg.a);
    let ys = monomials_in_range(n, vars.x_count..vars.x_count + vars.y_count, deg.b);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for mx in &xs {
        for my in &ys {
            out.push(mx.mul(my));
        }
    }
    out.sort_by(|a, b| degrevlex_cmp(b.exponents(), a.exponents()));
    out
}

/// A dense bihomogeneous form of bidegree `deg` whose coefficients are drawn
/// uniformly from the nonzero residues mod `p`, reproducibly from `seed`.
pub fn random_form(deg: BiDegree, vars: VarSpec, seed: u64, p: u32) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = monomials_of_bidegree(vars, deg).into_iter().map(|m| (m, rng.gen_range(1..p))).collect();
    MultiPoly::from_prime_terms(vars, p, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str, vars: VarSpec) -> MultiPoly {
        parse_poly(s, vars, Ring::Rational).unwrap()
    }

    #[test]
    fn parses_sums_of_products() {
        let v = VarSpec::projective(6);
        let p = q("x1*x2*x3", v);
        assert_eq!(p.len(), 1);
        assert_eq!(p.leading_monomial().unwrap().exponents(), &[0, 1, 1, 1, 0, 0, 0]);
        assert!(q("0", v).is_zero());
        let c = q("x0*x1^2 + x2^3", v);
        assert_eq!(c.len(), 2);
        assert_eq!(c.homogeneous_degree(), Some(3));
    }

    #[test]
    fn parse_errors() {
        let v = VarSpec::projective(2);
        assert!(matches!(parse_poly("x0 + x7", v, Ring::Rational), Err(PolyError::UnknownVariable { pos: 5, .. })));
        assert!(matches!(parse_poly("x0 + w", v, Ring::Rational), Err(PolyError::UnknownVariable { .. })));
        assert!(matches!(parse_poly("y0", v, Ring::Rational), Err(PolyError::UnknownVariable { .. })));
        assert!(matches!(parse_poly("x0 +", v, Ring::Rational), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("(x0", v, Ring::Rational), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("x0^99999", v, Ring::Rational), Err(PolyError::ExponentOverflow)));
        assert!(matches!(parse_poly("x0^20000*x0^20000", v, Ring::Rational), Err(PolyError::ExponentOverflow)));
    }

    #[test]
    fn arbitrary_precision_literals() {
        let v = VarSpec::projective(1);
        let p = q("123456789012345678901234567890*x0 - 123456789012345678901234567890*x0", v);
        assert!(p.is_zero());
        let r = parse_poly("100000000000000000000*x1", v, Ring::Prime(7)).unwrap();
        // 10^20 mod 7 = 2
        assert_eq!(r.prime_terms().unwrap()[0].1, 2);
    }

    #[test]
    fn partial_derivatives() {
        let v = VarSpec::projective(6);
        assert_eq!(q("x0*x1^2", v).partial_derivative(1).unwrap(), q("2*x0*x1", v));
        assert!(q("x1*x2*x3", v).partial_derivative(0).unwrap().is_zero());
        assert_eq!(q("x0*x1^2 + x2^3", v).partial_derivative(2).unwrap(), q("3*x2^2", v));
        assert!(matches!(q("x0", v).partial_derivative(7), Err(PolyError::VariableOutOfRange { .. })));
    }

    #[test]
    fn bidegrees() {
        let v = VarSpec::biprojective(6, 1);
        assert_eq!(q("x1*x2*x3", v).bidegree(), Ok(BiDegree::new(3, 0)));
        let f = q("x0*x1^2 + x2^3", v);
        let g = &q("y0", v) * &f.partial_derivative(1).unwrap();
        assert_eq!(g.bidegree(), Ok(BiDegree::new(2, 1)));
        assert_eq!(q("x0*y0 + x1", v).bidegree(), Err(BidegreeError::NotBihomogeneous));
        assert_eq!(q("0", v).bidegree(), Err(BidegreeError::Zero));
    }

    #[test]
    fn random_forms_are_reproducible() {
        let v = VarSpec::biprojective(2, 1);
        let a = random_form(BiDegree::new(1, 0), v, 11, DEFAULT_PRIME);
        let b = random_form(BiDegree::new(1, 0), v, 11, DEFAULT_PRIME);
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        let c = random_form(BiDegree::new(0, 0), v, 5, DEFAULT_PRIME);
        assert_eq!(c.len(), 1);
        assert!(c.leading_monomial().unwrap().is_one());
        let d = random_form(BiDegree::new(1, 0), v, 12, DEFAULT_PRIME);
        assert_ne!(a, d);
        assert_eq!(random_form(BiDegree::new(2, 1), v, 1, 101).len(), 6 * 2);
    }

    #[test]
    fn reduction_mod_p() {
        let v = VarSpec::projective(1);
        let a = q("x0^2 + 3*x1", v).reduce_mod_p(7).unwrap();
        assert_eq!(a, parse_poly("x0^2 + 3*x1", v, Ring::Prime(7)).unwrap());
        let half = q("x0", v).scale_rational(&BigRational::new(1.into(), 2.into()));
        assert_eq!(half.reduce_mod_p(2), Err(PolyError::BadPrime { prime: 2 }));
        let m = q("-1*x0", v).reduce_mod_p(5).unwrap();
        assert_eq!(m.prime_terms().unwrap()[0].1, 4);
        assert_eq!(half.reduce_mod_p(7).unwrap().prime_terms().unwrap()[0].1, 4);
    }

    #[test]
    fn printing() {
        let v = VarSpec::biprojective(2, 1);
        let p = q("3*x0^2*y1 - x1 + 7 - 2*x2*y0", v);
        assert_eq!(p.to_string(), "3*x0^2*y1 - 2*x2*y0 - x1 + 7");
        assert_eq!(q("-x0", v).to_string(), "-x0");
        assert_eq!(q("0", v).to_string(), "0");
        let h = q("x0", v).scale_rational(&BigRational::new((-3).into(), 2.into()));
        assert_eq!(h.to_string(), "-(3/2)*x0");
    }

    #[test]
    fn substitution_and_embedding() {
        let v = VarSpec::projective(1);
        let p = q("x0^2 - x1", v);
        let w = VarSpec::projective(0);
        let images = [q("x0 + 1", w), q("2*x0", w)];
        assert_eq!(p.substitute(&images).unwrap(), q("x0^2 + 1", w));
        let big = VarSpec::biprojective(3, 2);
        let src = VarSpec::biprojective(1, 0);
        let e = q("x1*y0", src).embed(big).unwrap();
        assert_eq!(e, q("x1*y0", big));
    }

    #[test]
    fn evaluation() {
        let v = VarSpec::projective(1);
        let p = parse_poly("x0^2 + 3*x1", v, Ring::Prime(7)).unwrap();
        assert_eq!(p.evaluate_mod_p(&[2, 5]).unwrap(), (4 + 15) % 7);
    }

    #[test]
    fn monomial_enumeration_counts() {
        let v = VarSpec::biprojective(6, 1);
        // C(9,3) * 2 monomials of bidegree (3,1) on P^6 x P^1
        assert_eq!(monomials_of_bidegree(v, BiDegree::new(3, 1)).len(), 84 * 2);
        assert_eq!(monomials_in_range(4, 0..0, 0).len(), 1);
        assert_eq!(monomials_in_range(4, 0..0, 2).len(), 0);
    }
}
