//! Buchberger's algorithm over a prime field.
//!
//! Pairs are selected by the normal strategy (smallest lcm first) and pruned
//! with the Gebauer-Moeller installation of the product and chain criteria. The
//! engine only serves the Segre computation: basis computation under
//! degrevlex or a two-block elimination order, saturation by one element, and
//! vector-space dimension of zero-dimensional quotients.
//!
//! Internally monomials are packed into 16-bit lanes, last variable in the
//! most significant lane, so that degrevlex comparison is a comparison of
//! words and divisibility is a borrow test. Reduction accumulates into
//! geobuckets.

use std::cmp::Ordering;
use std::collections::HashSet;

use thiserror::Error;

use crate::poly::{degrevlex_cmp, inv_mod, Monomial, MultiPoly, Ring, VarSpec};

/// Largest number of variables the engine accepts.
pub const MAX_VARIABLES: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    #[error("generators must live over a prime field")]
    NotPrimeField,
    #[error("generators use different primes or variable layouts")]
    Incompatible,
    #[error("the quotient is not zero-dimensional")]
    NotZeroDimensional,
    #[error("saturating element is zero")]
    ZeroSaturator,
    #[error("{0} variables exceed the supported {MAX_VARIABLES}")]
    TooManyVariables(usize),
    #[error("a basis element would exceed degree {MAX_DEGREE}")]
    DegreeTooLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Degrevlex,
    /// Degrevlex on the first `first_block` variables, ties broken by
    /// degrevlex on the remaining ones. Eliminates the first block.
    BlockElimination { first_block: usize },
}

impl MonomialOrder {
    pub fn cmp(&self, a: &[u16], b: &[u16]) -> Ordering {
        match *self {
            MonomialOrder::Degrevlex => degrevlex_cmp(a, b),
            MonomialOrder::BlockElimination { first_block: k } => {
                let k = k.min(a.len());
                degrevlex_cmp(&a[..k], &b[..k]).then_with(|| degrevlex_cmp(&a[k..], &b[k..]))
            }
        }
    }
}

// byte 15: total degree; byte 14 - q: exponent of the variable at position
// q counted from the last one. All bytes stay below 128 so that divisibility
// is a per-byte borrow test.
const HIGH: u64 = 0x8080_8080_8080_8080;
const LANES: u128 = (1u128 << 120) - 1;
/// Largest total degree a monomial may reach inside the engine.
pub const MAX_DEGREE: u32 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Mon {
    hi: u64,
    lo: u64,
}

impl Mon {
    const ONE: Mon = Mon { hi: 0, lo: 0 };

    fn deg(&self) -> u32 {
        (self.hi >> 56) as u32
    }

    fn key(&self) -> u128 {
        ((self.hi as u128) << 64) | self.lo as u128
    }

    fn from_key(k: u128) -> Mon {
        Mon { hi: (k >> 64) as u64, lo: k as u64 }
    }

    fn mul(&self, o: &Mon) -> Mon {
        let m = Mon { hi: self.hi + o.hi, lo: self.lo + o.lo };
        debug_assert!((m.hi | m.lo) & HIGH == 0, "exponent overflow");
        m
    }

    fn divides(&self, o: &Mon) -> bool {
        ((o.hi | HIGH) - self.hi) & HIGH == HIGH && ((o.lo | HIGH) - self.lo) & HIGH == HIGH
    }

    /// `o / self`, assuming divisibility.
    fn quotient_of(&self, o: &Mon) -> Mon {
        Mon { hi: o.hi - self.hi, lo: o.lo - self.lo }
    }

    /// Least common multiple; `None` when its degree exceeds [`MAX_DEGREE`].
    fn lcm(&self, o: &Mon) -> Option<Mon> {
        let (a, b) = (self.key() & LANES, o.key() & LANES);
        let mut out = 0u128;
        let mut deg = 0u32;
        for k in 0..15 {
            let shift = 8 * k;
            let e = ((a >> shift) & 0xff).max((b >> shift) & 0xff);
            deg += e as u32;
            out |= e << shift;
        }
        (deg <= MAX_DEGREE).then(|| Mon::from_key(out | (deg as u128) << 120))
    }

    fn is_coprime(&self, o: &Mon) -> bool {
        let (a, b) = (self.key() & LANES, o.key() & LANES);
        (0..15).all(|k| (a >> (8 * k)) & 0xff == 0 || (b >> (8 * k)) & 0xff == 0)
    }
}

type Terms = Vec<(Mon, u32)>;

struct Engine {
    p: u32,
    barrett: u64,
    order: MonomialOrder,
    nvars: usize,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mon,
}

struct Basis {
    polys: Vec<Terms>,
    active: Vec<bool>,
    // (mask, leading monomial, index) of the active elements
    reducers: Vec<(u64, Mon, usize)>,
}

impl Basis {
    fn new() -> Self {
        Basis { polys: Vec::new(), active: Vec::new(), reducers: Vec::new() }
    }

    fn from_polys(engine: &Engine, polys: Vec<Terms>) -> Self {
        let n = polys.len();
        let reducers = polys.iter().enumerate().map(|(k, t)| (engine.mask(&t[0].0), t[0].0, k)).collect();
        Basis { polys, active: vec![true; n], reducers }
    }

    fn lm(&self, k: usize) -> &Mon {
        &self.polys[k][0].0
    }

    fn find_reducer(&self, m: &Mon, mask: u64) -> Option<usize> {
        self.reducers.iter().find(|(rm, lm, _)| rm & !mask == 0 && lm.divides(m)).map(|r| r.2)
    }

    fn set_active(&mut self, k: usize, on: bool, engine: &Engine) {
        self.active[k] = on;
        if on {
            let lm = self.polys[k][0].0;
            self.reducers.push((engine.mask(&lm), lm, k));
        } else {
            self.reducers.retain(|r| r.2 != k);
        }
    }
}

/// Sum of sorted (ascending) term lists kept in buckets of geometrically
/// growing capacity.
struct Geobucket {
    buckets: Vec<Terms>,
    spare: Terms,
}

impl Geobucket {
    fn new() -> Self {
        Geobucket { buckets: Vec::new(), spare: Vec::new() }
    }
}

fn merge_by(a: &[(Mon, u32)], b: &[(Mon, u32)], out: &mut Terms, p: u32, cmp: impl Fn(&Mon, &Mon) -> Ordering) {
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (&a[i], &b[j]);
        match cmp(&x.0, &y.0) {
            Ordering::Less => {
                out.push(*x);
                i += 1;
            }
            Ordering::Greater => {
                out.push(*y);
                j += 1;
            }
            Ordering::Equal => {
                let s = x.1 + y.1;
                let s = if s >= p { s - p } else { s };
                if s != 0 {
                    out.push((x.0, s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

impl Engine {
    fn new(p: u32, order: MonomialOrder, nvars: usize) -> Result<Self, GbError> {
        let limit = match order {
            MonomialOrder::Degrevlex => MAX_VARIABLES,
            MonomialOrder::BlockElimination { .. } => MAX_VARIABLES - 1,
        };
        if nvars > limit {
            return Err(GbError::TooManyVariables(nvars));
        }
        Ok(Engine { p, barrett: u64::MAX / p as u64, order, nvars })
    }

    fn shift(&self, v: usize) -> u32 {
        8 * (14 - (self.nvars - 1 - v)) as u32
    }

    fn pack(&self, m: &Monomial) -> Result<Mon, GbError> {
        if m.degree() > MAX_DEGREE {
            return Err(GbError::DegreeTooLarge);
        }
        let mut key = (m.degree() as u128) << 120;
        for (v, &e) in m.exponents().iter().enumerate() {
            key |= (e as u128) << self.shift(v);
        }
        Ok(Mon::from_key(key))
    }

    fn exps(&self, m: &Mon) -> [u16; MAX_VARIABLES] {
        let mut e = [0u16; MAX_VARIABLES];
        let key = m.key();
        for (v, slot) in e.iter_mut().enumerate().take(self.nvars) {
            *slot = ((key >> self.shift(v)) & 0xff) as u16;
        }
        e
    }

    fn unpack(&self, m: &Mon) -> Monomial {
        Monomial::from_exponents(&self.exps(m)[..self.nvars])
    }

    /// Divisibility prefilter: bit `4v + t` is set when variable `v` has
    /// exponent above `t`, for `t < 4`.
    fn mask(&self, m: &Mon) -> u64 {
        let e = self.exps(m);
        let mut mask = 0u64;
        for (v, &x) in e.iter().enumerate().take(self.nvars) {
            for t in 0..x.min(4) {
                mask |= 1 << (4 * v + t as usize);
            }
        }
        mask
    }

    /// A key whose integer order is the monomial order.
    fn okey(&self, m: &Mon) -> u128 {
        match self.order {
            MonomialOrder::Degrevlex => m.key() ^ LANES,
            MonomialOrder::BlockElimination { first_block } => {
                // per block: degree byte, then inverted exponents from the
                // block's last variable down
                let e = self.exps(m);
                let k = first_block.min(self.nvars);
                let mut key = 0u128;
                for block in [0..k, k..self.nvars] {
                    let deg: u32 = e[block.clone()].iter().map(|&x| x as u32).sum();
                    key = (key << 8) | deg as u128;
                    for v in block.rev() {
                        key = (key << 8) | (255 - e[v]) as u128;
                    }
                }
                key << (8 * (16 - 2 - self.nvars))
            }
        }
    }

    fn cmp(&self, a: &Mon, b: &Mon) -> Ordering {
        self.okey(a).cmp(&self.okey(b))
    }

    fn to_terms(&self, p: &MultiPoly) -> Result<Terms, GbError> {
        let mut t = p
            .prime_terms()
            .ok_or(GbError::NotPrimeField)?
            .iter()
            .map(|(m, c)| Ok((self.pack(m)?, *c)))
            .collect::<Result<Terms, GbError>>()?;
        t.sort_by(|a, b| self.cmp(&b.0, &a.0));
        Ok(t)
    }

    fn to_poly(&self, vars: VarSpec, t: &Terms) -> MultiPoly {
        MultiPoly::from_prime_terms(vars, self.p, t.iter().map(|(m, c)| (self.unpack(m), *c)).collect())
    }

    fn make_monic(&self, t: &mut Terms) {
        if let Some(&(_, c)) = t.first() {
            if c != 1 {
                let inv = inv_mod(c, self.p) as u64;
                for (_, x) in t.iter_mut() {
                    *x = (*x as u64 * inv % self.p as u64) as u32;
                }
            }
        }
    }

    fn mulmod(&self, a: u32, b: u32) -> u32 {
        // Barrett reduction with m = floor((2^64 - 1) / p)
        let x = a as u64 * b as u64;
        let q = ((x as u128 * self.barrett as u128) >> 64) as u64;
        let mut r = x - q * self.p as u64;
        while r >= self.p as u64 {
            r -= self.p as u64;
        }
        r as u32
    }

    /// Merges two ascending term lists into `out`.
    fn merge_into(&self, a: &[(Mon, u32)], b: &[(Mon, u32)], out: &mut Terms) {
        match self.order {
            MonomialOrder::Degrevlex => merge_by(a, b, out, self.p, |x, y| (x.key() ^ LANES).cmp(&(y.key() ^ LANES))),
            _ => merge_by(a, b, out, self.p, |x, y| self.cmp(x, y)),
        }
    }

    /// `c * q * t` for descending `t`, returned ascending.
    fn scaled_ascending(&self, t: &[(Mon, u32)], c: u32, q: &Mon) -> Terms {
        t.iter().rev().map(|(m, x)| (q.mul(m), self.mulmod(c, *x))).collect()
    }

    fn bucket_add(&self, gb: &mut Geobucket, mut t: Terms) {
        let mut k = 0;
        let cap = |k: usize| 8usize << (2 * k);
        while cap(k) < t.len() {
            k += 1;
        }
        loop {
            while gb.buckets.len() <= k {
                gb.buckets.push(Vec::new());
            }
            if gb.buckets[k].is_empty() {
                gb.buckets[k] = t;
                return;
            }
            let mut out = std::mem::take(&mut gb.spare);
            out.clear();
            self.merge_into(&gb.buckets[k], &t, &mut out);
            // keep the larger consumed buffer for the next merge
            let old = std::mem::take(&mut gb.buckets[k]);
            gb.spare = if old.capacity() >= t.capacity() { old } else { t };
            t = out;
            if t.len() <= cap(k) {
                gb.buckets[k] = t;
                return;
            }
            k += 1;
        }
    }

    fn bucket_pop(&self, gb: &mut Geobucket) -> Option<(Mon, u32)> {
        loop {
            let mut best: Option<u128> = None;
            for b in &gb.buckets {
                if let Some((m, _)) = b.last() {
                    let k = self.okey(m);
                    if best.is_none_or(|x| k > x) {
                        best = Some(k);
                    }
                }
            }
            let best = best?;
            let mut sum = 0u32;
            let mut mon = Mon::ONE;
            for b in gb.buckets.iter_mut() {
                if b.last().is_some_and(|(m, _)| self.okey(m) == best) {
                    let (m, c) = b.pop().unwrap();
                    mon = m;
                    sum += c;
                    if sum >= self.p {
                        sum -= self.p;
                    }
                }
            }
            if sum != 0 {
                return Some((mon, sum));
            }
        }
    }

    fn bucket_of(&self, t: &[(Mon, u32)]) -> Geobucket {
        let mut gb = Geobucket::new();
        self.bucket_add(&mut gb, t.iter().rev().copied().collect());
        gb
    }

    /// Reduces the bucket contents by the active elements of `basis`,
    /// returned descending. Without `full` only the leading term is made
    /// irreducible.
    fn reduce_bucket(&self, mut f: Geobucket, basis: &Basis, full: bool) -> Terms {
        let mut out = Vec::new();
        while let Some((m, c)) = self.bucket_pop(&mut f) {
            match basis.find_reducer(&m, self.mask(&m)) {
                Some(k) => {
                    let g = &basis.polys[k];
                    let q = g[0].0.quotient_of(&m);
                    let t = self.scaled_ascending(&g[1..], self.p - c, &q);
                    self.bucket_add(&mut f, t);
                }
                None => {
                    out.push((m, c));
                    if !full {
                        while let Some(t) = self.bucket_pop(&mut f) {
                            out.push(t);
                        }
                    }
                }
            }
        }
        out
    }

    fn reduce_terms(&self, t: &[(Mon, u32)], basis: &Basis, full: bool) -> Terms {
        self.reduce_bucket(self.bucket_of(t), basis, full)
    }

    fn reduce_pair(&self, basis: &Basis, pair: &Pair, full: bool) -> Terms {
        let f = &basis.polys[pair.i];
        let g = &basis.polys[pair.j];
        let qf = f[0].0.quotient_of(&pair.lcm);
        let qg = g[0].0.quotient_of(&pair.lcm);
        let mut gb = Geobucket::new();
        self.bucket_add(&mut gb, self.scaled_ascending(&f[1..], 1, &qf));
        self.bucket_add(&mut gb, self.scaled_ascending(&g[1..], self.p - 1, &qg));
        self.reduce_bucket(gb, basis, full)
    }

    fn insert(&self, basis: &mut Basis, pairs: &mut Vec<Pair>, h: Terms) -> Result<(), GbError> {
        let hi = basis.polys.len();
        let lh = h[0].0;
        basis.polys.push(h);
        basis.active.push(false);

        // candidate pairs with every active element
        let mut cand: Vec<(usize, Mon, bool)> = (0..hi)
            .filter(|&g| basis.active[g])
            .map(|g| {
                let lg = basis.lm(g);
                Ok((g, lg.lcm(&lh).ok_or(GbError::DegreeTooLarge)?, lg.is_coprime(&lh)))
            })
            .collect::<Result<_, GbError>>()?;

        // chain criterion among the new pairs: drop a pair whose lcm is a
        // proper multiple of another new pair's lcm
        let keep: Vec<bool> = (0..cand.len())
            .map(|a| !(0..cand.len()).any(|b| b != a && cand[b].1 != cand[a].1 && cand[b].1.divides(&cand[a].1)))
            .collect();
        let mut survivors: Vec<(usize, Mon, bool)> =
            cand.drain(..).zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
        // equal lcms: one representative, none at all if any member is coprime
        survivors.sort_by(|a, b| self.cmp(&a.1, &b.1));
        let mut fresh = Vec::new();
        let mut k = 0;
        while k < survivors.len() {
            let mut e = k + 1;
            while e < survivors.len() && survivors[e].1 == survivors[k].1 {
                e += 1;
            }
            if !survivors[k..e].iter().any(|s| s.2) {
                let (g, lcm, _) = survivors[k];
                fresh.push(Pair { i: g, j: hi, lcm });
            }
            k = e;
        }

        // chain criterion on the old pairs
        pairs.retain(|pr| {
            if !lh.divides(&pr.lcm) {
                return true;
            }
            let li = basis.lm(pr.i).lcm(&lh);
            let lj = basis.lm(pr.j).lcm(&lh);
            li == Some(pr.lcm) || lj == Some(pr.lcm)
        });
        pairs.extend(fresh);
        // pop() yields the lowest lcm degree, then the smallest lcm
        pairs.sort_by(|a, b| b.lcm.deg().cmp(&a.lcm.deg()).then_with(|| self.cmp(&b.lcm, &a.lcm)));

        for g in 0..hi {
            if basis.active[g] && lh.divides(basis.lm(g)) {
                basis.set_active(g, false, self);
            }
        }
        basis.set_active(hi, true, self);
        Ok(())
    }

    /// Reduced Groebner basis, monic, sorted by increasing leading monomial.
    fn groebner(&self, gens: Vec<Terms>) -> Result<Vec<Terms>, GbError> {
        let mut basis = Basis::new();
        let mut pairs: Vec<Pair> = Vec::new();
        let mut gens: Vec<Terms> = gens.into_iter().filter(|g| !g.is_empty()).collect();
        gens.sort_by(|a, b| self.cmp(&a[0].0, &b[0].0));
        for g in gens {
            let mut r = self.reduce_terms(&g, &basis, true);
            if r.is_empty() {
                continue;
            }
            if r[0].0 == Mon::ONE {
                return Ok(vec![vec![(Mon::ONE, 1)]]);
            }
            self.make_monic(&mut r);
            self.insert(&mut basis, &mut pairs, r)?;
        }
        while let Some(pair) = pairs.pop() {
            let mut r = self.reduce_pair(&basis, &pair, false);
            if r.is_empty() {
                continue;
            }
            if r[0].0 == Mon::ONE {
                return Ok(vec![vec![(Mon::ONE, 1)]]);
            }
            self.make_monic(&mut r);
            self.insert(&mut basis, &mut pairs, r)?;
        }
        Ok(self.interreduce(basis))
    }

    fn interreduce(&self, basis: Basis) -> Vec<Terms> {
        let mut polys: Vec<Terms> =
            basis.polys.into_iter().zip(basis.active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
        polys.sort_by(|a, b| self.cmp(&a[0].0, &b[0].0));
        let n = polys.len();
        let mut others = Basis::from_polys(self, polys);
        // tails never contain a multiple of their own leading monomial, so one
        // pass against the fixed set of leading monomials suffices
        for k in 0..n {
            others.set_active(k, false, self);
            let tail = others.polys[k][1..].to_vec();
            let tail = self.reduce_terms(&tail, &others, true);
            others.polys[k].truncate(1);
            others.polys[k].extend(tail);
            others.set_active(k, true, self);
        }
        others.polys
    }
}

fn check_inputs(gens: &[MultiPoly]) -> Result<(u32, VarSpec), GbError> {
    let first = gens.first().ok_or(GbError::Incompatible)?;
    let Ring::Prime(p) = first.ring() else {
        return Err(GbError::NotPrimeField);
    };
    let vars = first.vars();
    for g in gens {
        match g.ring() {
            Ring::Prime(q) if q == p && g.vars() == vars => {}
            Ring::Rational => return Err(GbError::NotPrimeField),
            _ => return Err(GbError::Incompatible),
        }
    }
    Ok((p, vars))
}

/// A Groebner basis together with the order it was computed for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    vars: VarSpec,
    prime: u32,
    order: MonomialOrder,
    // each element sorted descending in `order`
    elements: Vec<MultiPoly>,
    reduced: bool,
}

impl GroebnerBasis {
    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn vars(&self) -> VarSpec {
        self.vars
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.elements.len() == 1 && self.elements[0].total_degree() == Some(0)
    }

    /// Leading monomials with respect to [`Self::order`].
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        let order = self.order;
        self.elements
            .iter()
            .map(|g| {
                let ms = g.monomials();
                (*ms.iter().max_by(|a, b| order.cmp(a.exponents(), b.exponents())).unwrap()).clone()
            })
            .collect()
    }

    pub fn generators(&self) -> Vec<MultiPoly> {
        self.elements.clone()
    }
}

/// Reduced Groebner basis of the ideal generated by `gens`.
pub fn buchberger(gens: &[MultiPoly], order: MonomialOrder) -> Result<GroebnerBasis, GbError> {
    let (p, vars) = check_inputs(gens)?;
    let engine = Engine::new(p, order, vars.total())?;
    let input = gens.iter().map(|g| engine.to_terms(g)).collect::<Result<_, _>>()?;
    let basis = engine.groebner(input)?;
    let elements = basis.iter().map(|t| engine.to_poly(vars, t)).collect();
    Ok(GroebnerBasis { vars, prime: p, order, elements, reduced: true })
}

/// The remainder of `p` modulo `basis`; zero exactly for ideal members.
pub fn normal_form(p: &MultiPoly, basis: &GroebnerBasis) -> Result<MultiPoly, GbError> {
    if p.ring() != Ring::Prime(basis.prime) || p.vars() != basis.vars {
        return Err(GbError::Incompatible);
    }
    let engine = Engine::new(basis.prime, basis.order, basis.vars.total())?;
    let polys: Vec<Terms> = basis.elements.iter().map(|g| engine.to_terms(g)).collect::<Result<_, _>>()?;
    let b = Basis::from_polys(&engine, polys);
    let r = engine.reduce_terms(&engine.to_terms(p)?, &b, true);
    Ok(engine.to_poly(basis.vars, &r))
}

/// Generators of the saturation `(I : f^inf)`, via an auxiliary variable `T`,
/// the relation `T*f - 1`, and elimination of `T`.
pub fn saturate(gens: &[MultiPoly], f: &MultiPoly) -> Result<Vec<MultiPoly>, GbError> {
    let mut all: Vec<MultiPoly> = gens.to_vec();
    all.push(f.clone());
    let (p, vars) = check_inputs(&all)?;
    if f.is_zero() {
        return Err(GbError::ZeroSaturator);
    }
    let n = vars.total();
    // engine layout: T first, then the original variables
    let lift = |m: &Monomial, t: u16| {
        let mut e = Vec::with_capacity(n + 1);
        e.push(t);
        e.extend_from_slice(m.exponents());
        Monomial::from_exponents(&e)
    };
    let engine = Engine::new(p, MonomialOrder::BlockElimination { first_block: 1 }, n + 1)?;
    let lifted = |g: &MultiPoly, t: u16| {
        let mut terms = g
            .prime_terms()
            .unwrap()
            .iter()
            .map(|(m, c)| Ok((engine.pack(&lift(m, t))?, *c)))
            .collect::<Result<Terms, GbError>>()?;
        if t == 1 {
            terms.push((Mon::ONE, p - 1));
        }
        terms.sort_by(|a, b| engine.cmp(&b.0, &a.0));
        Ok::<Terms, GbError>(terms)
    };
    let mut input: Vec<Terms> = gens.iter().map(|g| lifted(g, 0)).collect::<Result<_, _>>()?;
    input.push(lifted(f, 1)?);
    let basis = engine.groebner(input)?;
    Ok(basis
        .into_iter()
        .map(|t| t.iter().map(|(m, c)| (engine.unpack(m), *c)).collect::<Vec<_>>())
        .filter(|t| t.iter().all(|(m, _)| m.exponents()[0] == 0))
        .map(|t| {
            let terms = t.into_iter().map(|(m, c)| (Monomial::from_exponents(&m.exponents()[1..]), c)).collect();
            MultiPoly::from_prime_terms(vars, p, terms)
        })
        .collect())
}

fn divides_any(lms: &[Monomial], m: &Monomial) -> bool {
    lms.iter().any(|l| l.divides(m))
}

/// Counts standard monomials of a zero-dimensional leading-term ideal,
/// degree by degree until a degree contributes none.
fn count_standard_monomials(lms: &[Monomial], nvars: usize) -> u64 {
    let one = Monomial::one(nvars);
    if divides_any(lms, &one) {
        return 0;
    }
    let mut total = 1u64;
    let mut layer = vec![one];
    while !layer.is_empty() {
        let mut next: HashSet<Monomial> = HashSet::new();
        for m in &layer {
            for v in 0..nvars {
                let mut e = m.clone();
                e.exponents_mut()[v] += 1;
                if !next.contains(&e) && !divides_any(lms, &e) {
                    next.insert(e);
                }
            }
        }
        total += next.len() as u64;
        layer = next.into_iter().collect();
    }
    total
}

fn is_zero_dimensional(lms: &[Monomial], nvars: usize) -> bool {
    (0..nvars).all(|v| lms.iter().any(|m| m.exponents().iter().enumerate().all(|(k, &e)| (k == v) == (e > 0))))
}

/// Dimension of the quotient by the ideal as a vector space over the field,
/// i.e. the number of degrevlex standard monomials.
pub fn quotient_dimension(gens: &[MultiPoly]) -> Result<u64, GbError> {
    let gb = buchberger(gens, MonomialOrder::Degrevlex)?;
    quotient_dimension_of(&gb)
}

pub fn quotient_dimension_of(gb: &GroebnerBasis) -> Result<u64, GbError> {
    if gb.is_unit() {
        return Ok(0);
    }
    let lms = gb.leading_monomials();
    let nvars = gb.vars.total();
    if !is_zero_dimensional(&lms, nvars) {
        return Err(GbError::NotZeroDimensional);
    }
    Ok(count_standard_monomials(&lms, nvars))
}

/// Krull dimension of the quotient ring (the affine dimension of the zero
/// set); `None` for the unit ideal.
pub fn affine_dimension(gens: &[MultiPoly]) -> Result<Option<usize>, GbError> {
    let gb = buchberger(gens, MonomialOrder::Degrevlex)?;
    if gb.is_unit() {
        return Ok(None);
    }
    let nvars = gb.vars.total();
    let supports: Vec<u64> = gb
        .leading_monomials()
        .iter()
        .map(|m| m.exponents().iter().enumerate().fold(0u64, |a, (k, &e)| if e > 0 { a | 1 << k } else { a }))
        .collect();
    // largest variable subset containing the support of no leading monomial
    let mut best = 0;
    for subset in 0u64..(1u64 << nvars) {
        let size = subset.count_ones() as usize;
        if size > best && supports.iter().all(|&s| s & !subset != 0) {
            best = size;
        }
    }
    Ok(Some(best))
}
