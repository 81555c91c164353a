//! Segre classes of subschemes of `P^n` and `P^n x P^r`, assembled from
//! projective degrees counted on random slices over a prime field.
//!
//! For generators of common bidegree `(a,b)` defining the rational map to
//! projective space, `g[i][j]` counts the points of `i + j` general
//! combinations of the generators restricted to a general linear space of
//! dimension `i` in the first factor times one of dimension `j` in the second,
//! away from the base locus. With `D = aH + bh` the Segre class is
//! `1 - sum g[i][j] H^i h^j / (1+D)^(i+j+1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::chow::{Ambient, ChowClass, LineBundleClass};
use crate::gb::{self, GbError};
use crate::poly::{monomials_of_bidegree, BiDegree, BidegreeError, Monomial, MultiPoly, PolyError, Ring, VarSpec, DEFAULT_PRIME};

/// Attempts per cell before the cell is declared degenerate.
pub const CELL_ATTEMPTS: u32 = 4;
/// Fresh primes tried after the first before giving up.
pub const MAX_ESCALATIONS: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegreError {
    #[error("no generators")]
    NoGenerators,
    #[error("generator {index} is not bihomogeneous")]
    NotBihomogeneous { index: usize },
    #[error("generators do not live in the coordinates of {0:?}")]
    WrongLayout(Ambient),
    #[error("degenerate randomness in cell ({i},{j}) mod {prime}")]
    DegenerateRandomness { i: usize, j: usize, prime: u32 },
    #[error("independent runs disagree after trying primes {primes:?}")]
    Unstable { primes: Vec<u32> },
    #[error("{0} is not an odd prime")]
    BadPrime(u32),
    #[error("at least two trials are required")]
    TooFewTrials,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Gb(#[from] GbError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegreOptions {
    /// Working prime for rational input; ignored for prime-field input.
    pub prime: u32,
    pub seed: u64,
    pub trials: usize,
}

impl Default for SegreOptions {
    fn default() -> Self {
        SegreOptions { prime: DEFAULT_PRIME, seed: 0, trials: 2 }
    }
}

/// Projective degrees of a generator set, `g[i][j]` for `0 <= i <= n`,
/// `0 <= j <= r` (a single column in one projective space).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveDegreeTable {
    pub ambient: Ambient,
    pub g: Vec<Vec<u64>>,
    pub degree: BiDegree,
    pub prime: u32,
    pub seed: u64,
}

impl ProjectiveDegreeTable {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.g.get(i).and_then(|row| row.get(j)).copied().unwrap_or(0)
    }

    /// `1 - sum g[i][j] H^i h^j / (1+D)^(i+j+1)`.
    pub fn assemble(&self) -> ChowClass {
        let amb = self.ambient;
        let mut shadow = ChowClass::zero(amb);
        for (i, row) in self.g.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c != 0 {
                    shadow = &shadow + &ChowClass::term(amb, i, j, c);
                }
            }
        }
        let line = LineBundleClass::new(self.degree.a as i64, self.degree.b as i64);
        let inv = line.total_chern(amb).inverse_unit().expect("1 + D is a unit");
        &ChowClass::one(amb) - &(&inv * &shadow.aluffi_tensor(line))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegreResult {
    pub cls: ChowClass,
    pub degrees: ProjectiveDegreeTable,
    /// Number of independent runs that agreed.
    pub trials: usize,
}

/// Raises every generator to the componentwise maximum bidegree by multiplying
/// with all monomials of the missing degree in each block. Zero generators
/// are dropped.
pub fn prepare_common_bidegree(gens: &[MultiPoly]) -> Result<Vec<MultiPoly>, SegreError> {
    let mut kept = Vec::new();
    for (index, g) in gens.iter().enumerate() {
        match g.bidegree() {
            Ok(d) => kept.push((g, d)),
            Err(BidegreeError::Zero) => {}
            Err(BidegreeError::NotBihomogeneous) => return Err(SegreError::NotBihomogeneous { index }),
        }
    }
    let Some(target) = kept.iter().map(|(_, d)| *d).reduce(BiDegree::join) else {
        return Err(SegreError::NoGenerators);
    };
    let mut out = Vec::new();
    for (g, d) in kept {
        let missing = BiDegree::new(target.a - d.a, target.b - d.b);
        if missing == BiDegree::new(0, 0) {
            out.push(g.clone());
            continue;
        }
        for m in monomials_of_bidegree(g.vars(), missing) {
            out.push(g.mul_monomial(&m)?);
        }
    }
    Ok(out)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent substream seed from a master seed and tags.
pub(crate) fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix(master), |acc, &t| splitmix(acc ^ splitmix(t.wrapping_add(0x5851_f42d))))
}

fn random_combination(gens: &[MultiPoly], rng: &mut ChaCha8Rng, p: u32) -> MultiPoly {
    let mut acc = MultiPoly::zero(gens[0].vars(), gens[0].ring());
    for g in gens {
        acc = &acc + &g.scale_residue(rng.gen_range(1..p));
    }
    acc
}

/// Affine images `base + sum_k t_k dir_k` of the `count` coordinates of one
/// factor, with the parameters `t_k` at positions `offset..offset+dim`.
fn affine_images(count: usize, dim: usize, offset: usize, cell_vars: VarSpec, rng: &mut ChaCha8Rng, p: u32) -> Vec<MultiPoly> {
    let total = cell_vars.total();
    (0..count)
        .map(|_| {
            let mut terms = vec![(Monomial::one(total), rng.gen_range(0..p))];
            for k in 0..dim {
                terms.push((Monomial::var(total, offset + k), rng.gen_range(0..p)));
            }
            MultiPoly::from_prime_terms(cell_vars, p, terms)
        })
        .collect()
}

/// Counts one projective degree. `prepared` must share one bidegree and live
/// over a prime field.
pub fn projective_degree_cell(prepared: &[MultiPoly], i: usize, j: usize, seed: u64) -> Result<u64, SegreError> {
    let first = prepared.first().ok_or(SegreError::NoGenerators)?;
    let p = match first.ring() {
        Ring::Prime(p) => p,
        Ring::Rational => return Err(GbError::NotPrimeField.into()),
    };
    let vars = first.vars();
    if i >= vars.x_count || (j > 0 && j >= vars.y_count) {
        return Err(SegreError::WrongLayout(Ambient { n: vars.x_count.saturating_sub(1), r: vars.y_count.checked_sub(1) }));
    }
    for attempt in 0..CELL_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64, j as u64, attempt as u64]));
        let unknowns = i + j;
        let cell_vars = VarSpec { x_count: unknowns, y_count: 0, aux_count: 1 };
        let mut images = affine_images(vars.x_count, i, 0, cell_vars, &mut rng, p);
        images.extend(affine_images(vars.y_count, j, i, cell_vars, &mut rng, p));
        let saturator = random_combination(prepared, &mut rng, p);
        if unknowns == 0 {
            let point: Vec<u32> = images.iter().map(|q| q.prime_terms().unwrap().first().map_or(0, |t| t.1)).collect();
            if saturator.evaluate_mod_p(&point)? != 0 {
                return Ok(1);
            }
            continue;
        }
        let mut system = Vec::with_capacity(unknowns + 1);
        for _ in 0..unknowns {
            system.push(random_combination(prepared, &mut rng, p).substitute(&images)?);
        }
        let z = MultiPoly::var(cell_vars, first.ring(), cell_vars.aux_index(0));
        let local = &(&z * &saturator.substitute(&images)?) - &MultiPoly::one(cell_vars, first.ring());
        system.push(local);
        match gb::quotient_dimension(&system) {
            Ok(count) => return Ok(count),
            Err(GbError::NotZeroDimensional) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(SegreError::DegenerateRandomness { i, j, prime: p })
}

fn check_layout(gens: &[MultiPoly], ambient: Ambient) -> Result<(), SegreError> {
    let expect = match ambient.r {
        Some(r) => VarSpec::biprojective(ambient.n, r),
        None => VarSpec::projective(ambient.n),
    };
    if gens.iter().any(|g| g.vars() != expect) {
        return Err(SegreError::WrongLayout(ambient));
    }
    Ok(())
}

/// Computes every projective degree of the prepared generators in parallel.
pub fn projective_degree_table(prepared: &[MultiPoly], ambient: Ambient, seed: u64) -> Result<ProjectiveDegreeTable, SegreError> {
    check_layout(prepared, ambient)?;
    let first = prepared.first().ok_or(SegreError::NoGenerators)?;
    let Ring::Prime(prime) = first.ring() else {
        return Err(GbError::NotPrimeField.into());
    };
    let degree = first.bidegree().map_err(|_| SegreError::NotBihomogeneous { index: 0 })?;
    let cells: Vec<(usize, usize)> =
        (0..=ambient.n).flat_map(|i| (0..=ambient.h_max()).map(move |j| (i, j))).collect();
    let counts = cells
        .par_iter()
        .map(|&(i, j)| projective_degree_cell(prepared, i, j, seed))
        .collect::<Result<Vec<u64>, SegreError>>()?;
    let mut g = vec![vec![0u64; ambient.h_max() + 1]; ambient.n + 1];
    for (&(i, j), c) in cells.iter().zip(counts) {
        g[i][j] = c;
    }
    Ok(ProjectiveDegreeTable { ambient, g, degree, prime, seed })
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn fresh_prime(near: u32, seed: u64) -> u32 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = near.saturating_mul(2).min(1 << 30);
    let mut c = rng.gen_range(near / 2 + 1..hi) | 1;
    while !is_prime(c) {
        c += 2;
    }
    c
}

fn reduce_all(gens: &[MultiPoly], prime: u32) -> Option<Vec<MultiPoly>> {
    let mut out = Vec::with_capacity(gens.len());
    for g in gens {
        let g = match g.ring() {
            Ring::Rational => g.primitive_integer_part().reduce_mod_p(prime).ok()?,
            Ring::Prime(_) => g.clone(),
        };
        out.push(g);
    }
    Some(out)
}

/// The Segre class of the subscheme cut out by `gens` in `ambient`.
///
/// Generators may be rational (reduced modulo a working prime, escalating to
/// fresh primes when independent runs disagree) or already over a prime field.
/// Zero generators are ignored; if nothing remains the class is 1.
pub fn segre_class(gens: &[MultiPoly], ambient: Ambient, opts: &SegreOptions) -> Result<SegreResult, SegreError> {
    if opts.trials < 2 {
        return Err(SegreError::TooFewTrials);
    }
    check_layout(gens, ambient)?;
    let gens: Vec<MultiPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let fixed_prime = gens.iter().find_map(|g| match g.ring() {
        Ring::Prime(p) => Some(p),
        Ring::Rational => None,
    });
    if gens.is_empty() {
        let degrees = ProjectiveDegreeTable {
            ambient,
            g: vec![vec![0; ambient.h_max() + 1]; ambient.n + 1],
            degree: BiDegree::new(0, 0),
            prime: fixed_prime.unwrap_or(opts.prime),
            seed: opts.seed,
        };
        return Ok(SegreResult { cls: ChowClass::one(ambient), degrees, trials: opts.trials });
    }
    let mut prime = fixed_prime.unwrap_or(opts.prime);
    if prime < 3 || !is_prime(prime) {
        return Err(SegreError::BadPrime(prime));
    }
    let mut tried = Vec::new();
    for escalation in 0..=MAX_ESCALATIONS {
        if escalation > 0 {
            if fixed_prime.is_some() {
                break;
            }
            prime = fresh_prime(opts.prime, derive_seed(opts.seed, &[0xe5ca, escalation as u64]));
        }
        tried.push(prime);
        let Some(reduced) = reduce_all(&gens, prime) else {
            log::debug!("prime {prime} divides a denominator, escalating");
            continue;
        };
        let reduced: Vec<MultiPoly> = reduced.into_iter().filter(|g| !g.is_zero()).collect();
        if reduced.is_empty() {
            continue;
        }
        let prepared = prepare_common_bidegree(&reduced)?;
        let mut tables: Vec<ProjectiveDegreeTable> = Vec::with_capacity(opts.trials);
        let mut failed = false;
        for t in 0..opts.trials {
            let seed = derive_seed(opts.seed, &[escalation as u64, t as u64]);
            match projective_degree_table(&prepared, ambient, seed) {
                Ok(table) => {
                    if tables.first().is_some_and(|first| first.g != table.g) {
                        log::debug!("trial {t} disagrees mod {prime}");
                        failed = true;
                        break;
                    }
                    tables.push(table);
                }
                Err(SegreError::DegenerateRandomness { i, j, .. }) => {
                    log::debug!("cell ({i},{j}) degenerate mod {prime}");
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            continue;
        }
        let mut degrees = tables.swap_remove(0);
        degrees.seed = opts.seed;
        let cls = degrees.assemble();
        return Ok(SegreResult { cls, degrees, trials: opts.trials });
    }
    Err(SegreError::Unstable { primes: tried })
}

/// `prod_t (a_t H + b_t h) / (1 + a_t H + b_t h)`, the Segre class of a
/// smooth complete intersection with the given bidegrees.
pub fn complete_intersection_segre(ambient: Ambient, bidegrees: &[(i64, i64)]) -> ChowClass {
    bidegrees.iter().fold(ChowClass::one(ambient), |acc, &(a, b)| {
        let line = LineBundleClass::new(a, b);
        let inv = line.total_chern(ambient).inverse_unit().expect("unit");
        &acc * &(&line.c1(ambient) * &inv)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn polys(src: &[&str], vars: VarSpec) -> Vec<MultiPoly> {
        src.iter().map(|s| parse_poly(s, vars, Ring::Rational).unwrap()).collect()
    }

    fn pn(n: usize, c: &[i64]) -> ChowClass {
        ChowClass::from_h_coeffs(n, c.iter().copied())
    }

    #[test]
    fn raising_to_common_bidegree() {
        let v = VarSpec::biprojective(2, 1);
        let g = polys(&["x0^2", "x1*y0", "0"], v);
        let prepared = prepare_common_bidegree(&g).unwrap();
        // x0^2 times y0, y1; x1*y0 times x0, x1, x2
        assert_eq!(prepared.len(), 5);
        assert!(prepared.iter().all(|p| p.bidegree() == Ok(BiDegree::new(2, 1))));
        let same = polys(&["x0*y1", "x2*y0"], v);
        assert_eq!(prepare_common_bidegree(&same).unwrap(), same);
        assert_eq!(prepare_common_bidegree(&polys(&["0"], v)), Err(SegreError::NoGenerators));
        assert!(matches!(prepare_common_bidegree(&polys(&["x0*y0 + x1"], v)), Err(SegreError::NotBihomogeneous { index: 0 })));
        let single = prepare_common_bidegree(&polys(&["x0^2", "x1^3"], VarSpec::projective(2))).unwrap();
        assert_eq!(single.len(), 4);
    }

    #[test]
    fn point_in_the_plane() {
        let v = VarSpec::projective(2);
        let gens: Vec<MultiPoly> = polys(&["x1", "x2"], v).iter().map(|g| g.reduce_mod_p(DEFAULT_PRIME).unwrap()).collect();
        let t = projective_degree_table(&gens, Ambient::projective(2), 11).unwrap();
        assert_eq!(t.g, vec![vec![1], vec![1], vec![0]]);
        let s = segre_class(&polys(&["x1", "x2"], v), Ambient::projective(2), &SegreOptions::default()).unwrap();
        assert_eq!(s.cls, pn(2, &[0, 0, 1]));
    }

    #[test]
    fn divisors_and_multiplicity() {
        let v = VarSpec::projective(3);
        let opts = SegreOptions::default();
        let amb = Ambient::projective(3);
        let line = segre_class(&polys(&["x0"], v), amb, &opts).unwrap().cls;
        assert_eq!(line, complete_intersection_segre(amb, &[(1, 0)]));
        let double = segre_class(&polys(&["x0^2"], v), amb, &opts).unwrap().cls;
        assert_eq!(double, complete_intersection_segre(amb, &[(2, 0)]));
        let cubic = segre_class(&polys(&["x0^3 + x1^3 + x2*x3^2"], v), amb, &opts).unwrap().cls;
        assert_eq!(cubic, pn(3, &[0, 3, -9, 27]));
    }

    #[test]
    fn empty_and_whole() {
        let v = VarSpec::projective(2);
        let amb = Ambient::projective(2);
        let opts = SegreOptions::default();
        assert!(segre_class(&polys(&["x0", "x1", "x2"], v), amb, &opts).unwrap().cls.is_zero());
        assert!(segre_class(&polys(&["1"], v), amb, &opts).unwrap().cls.is_zero());
        assert_eq!(segre_class(&polys(&["0"], v), amb, &opts).unwrap().cls, ChowClass::one(amb));
        assert_eq!(segre_class(&[], amb, &opts).unwrap().cls, ChowClass::one(amb));
    }

    #[test]
    fn linear_subspaces() {
        for n in 1..=4usize {
            let v = VarSpec::projective(n);
            let amb = Ambient::projective(n);
            for c in 1..=n {
                let gens: Vec<String> = (0..c).map(|k| format!("x{k}")).collect();
                let refs: Vec<&str> = gens.iter().map(String::as_str).collect();
                let s = segre_class(&polys(&refs, v), amb, &SegreOptions::default()).unwrap();
                assert_eq!(s.cls, complete_intersection_segre(amb, &vec![(1, 0); c]), "n={n} c={c}");
            }
        }
    }

    #[test]
    fn product_complete_intersection() {
        let v = VarSpec::biprojective(2, 2);
        let amb = Ambient::product(2, 2);
        let gens = polys(&["x0*y0 + x1*y1 + x2*y2", "x0^2*y1 + x2^2*y0 - x1^2*y2"], v);
        let s = segre_class(&gens, amb, &SegreOptions { seed: 5, ..Default::default() }).unwrap();
        assert_eq!(s.cls, complete_intersection_segre(amb, &[(1, 1), (2, 1)]));
    }

    #[test]
    fn singular_scheme_of_a_surface_with_a_double_line() {
        // x^2, xy, 0 with the y-block attached
        let v = VarSpec::biprojective(2, 2);
        let gens = polys(&["2*x0*y0 + x1*y1", "x0*y1", "x0^2", "x0*x1"], v);
        let s = segre_class(&gens, Ambient::product(2, 2), &SegreOptions::default()).unwrap();
        assert_eq!(s.degrees.g, vec![vec![1, 1, 1], vec![2, 3, 4], vec![3, 5, 7]]);
        let amb = Ambient::product(2, 2);
        let expect = ChowClass::from_terms(amb, [(1, 1, 1), (2, 0, 1), (1, 2, -1), (2, 1, -2), (2, 2, 3)]);
        assert_eq!(s.cls, expect);
    }

    #[test]
    fn prime_field_input_and_bad_options() {
        let v = VarSpec::projective(2);
        let gens: Vec<MultiPoly> = polys(&["x0^2"], v).iter().map(|g| g.reduce_mod_p(10007).unwrap()).collect();
        let s = segre_class(&gens, Ambient::projective(2), &SegreOptions::default()).unwrap();
        assert_eq!(s.degrees.prime, 10007);
        assert_eq!(s.cls, pn(2, &[0, 2, -4]));
        let opts = SegreOptions { trials: 1, ..Default::default() };
        assert_eq!(segre_class(&gens, Ambient::projective(2), &opts), Err(SegreError::TooFewTrials));
        let opts = SegreOptions { prime: 32001, ..Default::default() };
        assert_eq!(segre_class(&polys(&["x0"], v), Ambient::projective(2), &opts), Err(SegreError::BadPrime(32001)));
        assert!(matches!(
            segre_class(&polys(&["x0"], v), Ambient::projective(3), &SegreOptions::default()),
            Err(SegreError::WrongLayout(_))
        ));
    }

    #[test]
    fn seeds_are_independent() {
        assert_ne!(derive_seed(1, &[0, 0]), derive_seed(1, &[0, 1]));
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(9, &[3]), derive_seed(9, &[3]));
        let p = fresh_prime(32003, 4);
        assert!(is_prime(p) && p > 16000 && p < 64100);
    }
}
