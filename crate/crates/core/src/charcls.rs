//! Characteristic classes of projective schemes: Chern-Schwartz-MacPherson
//! classes, virtual Chern classes and Milnor classes of complete
//! intersections, all pushed forward to the ambient `P^n`.
//!
//! The main route forms the scheme `Y` in `P^n x P^r` cut out by the
//! generators `F_j` together with `sum_j y_j dF_j/dx_i` for every `i`, and
//! reads the class off its Segre class. Two independent routes serve as
//! oracles: inclusion-exclusion over products of generators with the
//! hypersurface formula, and the hypersurface `sum_j y_j F_j` in `P^n x P^r`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::chow::{chern_tangent, Ambient, ChowClass, ChowError, LineBundleClass};
use crate::gb::{self, GbError};
use crate::poly::{monomials_in_range, parse_poly, MultiPoly, PolyError, Ring, VarSpec};
use crate::segre::{self, SegreError, SegreOptions, SegreResult};

/// Inclusion-exclusion over more generators than this logs a warning.
pub const INCLUSION_EXCLUSION_WARN: usize = 6;

#[derive(Debug, Error)]
pub enum CharClassError {
    #[error("no generators")]
    Empty,
    #[error("generator {index} is not homogeneous")]
    Inhomogeneous { index: usize },
    #[error("generator {index} does not live in the coordinates of P^{n}")]
    WrongVariables { index: usize, n: usize },
    #[error("the formula needs at least n+1 = {need} generators, got {have}")]
    TooFewGenerators { need: usize, have: usize },
    #[error("generators must be nonzero of one common degree")]
    UnequalDegrees,
    #[error("not a complete intersection: expected dimension {expected}, found {found:?}")]
    NotCompleteIntersection { expected: usize, found: Option<usize> },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Segre(#[from] SegreError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Chow(#[from] ChowError),
}

/// Generators of a homogeneous ideal in `x0..xn`, all of degree `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSystem {
    pub n: usize,
    pub gens: Vec<MultiPoly>,
    pub d: u32,
    /// Set once lower-degree generators have been raised to degree `d`.
    pub raised: bool,
}

impl InputSystem {
    /// `r`, where the generators are `F_0..F_r`.
    pub fn r(&self) -> usize {
        self.gens.len() - 1
    }

    pub fn vars(&self) -> VarSpec {
        VarSpec::projective(self.n)
    }

    pub fn nonzero(&self) -> Vec<MultiPoly> {
        self.gens.iter().filter(|g| !g.is_zero()).cloned().collect()
    }

    /// Parses rational generators and normalizes them.
    pub fn parse(n: usize, gens: &[&str], target_count: Option<usize>) -> Result<Self, CharClassError> {
        let vars = VarSpec::projective(n);
        let polys = gens.iter().map(|s| parse_poly(s, vars, Ring::Rational)).collect::<Result<Vec<_>, _>>()?;
        normalize_input(n, &polys, target_count)
    }
}

/// Brings generators to a common degree and pads with zeros.
///
/// Lower-degree generators are replaced by their products with every monomial
/// of the complementary degree, which leaves the ideal unchanged in degrees at
/// least `d`. Zeros are then appended up to `target_count`, which defaults to
/// `max(n+1, count)`.
pub fn normalize_input(n: usize, gens: &[MultiPoly], target_count: Option<usize>) -> Result<InputSystem, CharClassError> {
    if gens.is_empty() {
        return Err(CharClassError::Empty);
    }
    let vars = VarSpec::projective(n);
    let mut degrees = Vec::with_capacity(gens.len());
    for (index, g) in gens.iter().enumerate() {
        if g.vars() != vars {
            return Err(CharClassError::WrongVariables { index, n });
        }
        if g.is_zero() {
            degrees.push(None);
            continue;
        }
        match g.homogeneous_degree() {
            Some(e) => degrees.push(Some(e)),
            None => return Err(CharClassError::Inhomogeneous { index }),
        }
    }
    let d = degrees.iter().flatten().copied().max().unwrap_or(0);
    let mut out = Vec::new();
    let mut raised = false;
    for (g, e) in gens.iter().zip(&degrees) {
        match e {
            Some(e) if *e < d => {
                raised = true;
                for m in monomials_in_range(vars.total(), 0..n + 1, d - e) {
                    out.push(g.mul_monomial(&m)?);
                }
            }
            _ => out.push(g.clone()),
        }
    }
    let target = target_count.unwrap_or(n + 1).max(out.len());
    let ring = gens[0].ring();
    while out.len() < target {
        out.push(MultiPoly::zero(vars, ring));
    }
    Ok(InputSystem { n, gens: out, d, raised })
}

/// Replaces the generators by `k` random integer combinations of them.
///
/// Experimental: whether such combinations still cut out the same scheme is
/// not checked.
pub fn recombine(sys: &InputSystem, k: usize, seed: u64) -> Result<InputSystem, CharClassError> {
    let gens = sys.nonzero();
    let vars = sys.vars();
    let ring = sys.gens[0].ring();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let mut acc = MultiPoly::zero(vars, ring);
        for g in &gens {
            let c: i64 = rng.gen_range(-100..=100);
            acc = acc.checked_add(&g.scale_i64(c))?;
        }
        out.push(acc);
    }
    Ok(InputSystem { n: sys.n, gens: out, d: sys.d, raised: sys.raised })
}

/// Generators of `Y` in `P^n x P^r`: the `F_j` and `sum_j y_j dF_j/dx_i` for
/// each `i`, with zero polynomials dropped.
pub fn build_y_ideal(sys: &InputSystem) -> Result<Vec<MultiPoly>, CharClassError> {
    let r = sys.r();
    let big = VarSpec::biprojective(sys.n, r);
    let ring = sys.gens[0].ring();
    let lifted = sys.gens.iter().map(|f| f.embed(big)).collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<MultiPoly> = lifted.iter().filter(|f| !f.is_zero()).cloned().collect();
    for i in 0..=sys.n {
        let mut acc = MultiPoly::zero(big, ring);
        for (j, f) in lifted.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let df = f.partial_derivative(big.x_index(i))?;
            acc = acc.checked_add(&(&MultiPoly::y(big, ring, j) * &df))?;
        }
        if !acc.is_zero() {
            out.push(acc);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Main,
    InclusionExclusion,
    CalxRoute,
    Zeta,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Main => "main",
            Method::InclusionExclusion => "inclusion-exclusion",
            Method::CalxRoute => "calx-route",
            Method::Zeta => "zeta",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CharClassReport {
    pub n: usize,
    pub r: usize,
    pub csm: ChowClass,
    pub cvir: Option<ChowClass>,
    pub milnor: Option<ChowClass>,
    pub euler: BigInt,
    pub method: Method,
    pub segre: Option<SegreResult>,
    /// The class in `P^n x P^r` whose `h^r` coefficient is `csm` (or whose
    /// signed version is the Milnor class).
    pub product_class: Option<ChowClass>,
}

fn euler_of(csm: &ChowClass) -> BigInt {
    csm.coeff(csm.ambient().n, 0)
}

/// `(1+H)^(n+1) (1+h)^(r+1) (1+dH+h)^(-1) (s^dual tensor O(dH+h))`.
fn main_integrand(s: &ChowClass, d: u32) -> Result<ChowClass, CharClassError> {
    let ambient = s.ambient();
    let line = LineBundleClass::new(d as i64, 1);
    let inv = line.total_chern(ambient).inverse_unit()?;
    let twisted = s.dual().aluffi_tensor(line);
    Ok(&(&chern_tangent(ambient) * &inv) * &twisted)
}

/// The CSM class from the Segre class of `Y`; needs `r >= n`.
pub fn csm_main(sys: &InputSystem, opts: &SegreOptions) -> Result<CharClassReport, CharClassError> {
    let (n, r) = (sys.n, sys.r());
    if r < n {
        return Err(CharClassError::TooFewGenerators { need: n + 1, have: r + 1 });
    }
    let ambient = Ambient::product(n, r);
    let ys = build_y_ideal(sys)?;
    let s = segre::segre_class(&ys, ambient, opts)?;
    let full = main_integrand(&s.cls, sys.d)?;
    let csm = full.pushforward_h()?;
    Ok(CharClassReport {
        n,
        r,
        euler: euler_of(&csm),
        csm,
        cvir: None,
        milnor: None,
        method: Method::Main,
        segre: Some(s),
        product_class: Some(full),
    })
}

/// `(1+H)^(n+1) (dH)^(r+1) / (1+dH)^(r+1)` in `A(P^n)`.
pub fn c_vir_ci(n: usize, d: u32, r: usize) -> ChowClass {
    let ambient = Ambient::projective(n);
    let line = LineBundleClass::new(d as i64, 0);
    let inv = line.total_chern(ambient).inverse_unit().expect("constant term 1").pow(r as u32 + 1);
    let top = line.c1(ambient).pow(r as u32 + 1);
    &(&chern_tangent(ambient) * &inv) * &top
}

/// `(1+H)^(n+1) prod_i d_i H / (1+d_i H)`: the virtual class of a complete
/// intersection of hypersurfaces of degrees `d_i`.
pub fn c_vir_degrees(n: usize, degrees: &[u32]) -> ChowClass {
    let ambient = Ambient::projective(n);
    degrees.iter().fold(chern_tangent(ambient), |acc, &d| {
        let line = LineBundleClass::new(d as i64, 0);
        let inv = line.total_chern(ambient).inverse_unit().expect("constant term 1");
        &(&acc * &line.c1(ambient)) * &inv
    })
}

/// Projective dimension of `V(gens)`, computed over the working prime;
/// `None` when the zero set is empty.
pub fn projective_dimension(gens: &[MultiPoly], prime: u32) -> Result<Option<usize>, CharClassError> {
    let mut reduced = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let g = match g.ring() {
            Ring::Rational => g.primitive_integer_part().reduce_mod_p(prime)?,
            Ring::Prime(_) => g.clone(),
        };
        reduced.push(g);
    }
    if reduced.is_empty() {
        return Ok(gens.first().map(|g| g.vars().x_count - 1));
    }
    Ok(gb::affine_dimension(&reduced)?.and_then(|a| a.checked_sub(1)))
}

/// Milnor class of a complete intersection of `r+1` hypersurfaces of degree
/// `d`, together with its CSM and virtual classes.
pub fn milnor_ci(sys: &InputSystem, opts: &SegreOptions) -> Result<CharClassReport, CharClassError> {
    if sys.raised || sys.gens.iter().any(|g| g.is_zero()) {
        return Err(CharClassError::UnequalDegrees);
    }
    let (n, r) = (sys.n, sys.r());
    let expected = n.checked_sub(r + 1).ok_or(CharClassError::NotCompleteIntersection { expected: 0, found: None })?;
    let found = projective_dimension(&sys.gens, opts.prime)?;
    if found != Some(expected) {
        return Err(CharClassError::NotCompleteIntersection { expected, found });
    }
    let ambient = Ambient::product(n, r);
    let ys = build_y_ideal(sys)?;
    let s = segre::segre_class(&ys, ambient, opts)?;
    let full = main_integrand(&s.cls, sys.d)?;
    let pushed = full.pushforward_h()?;
    // (-1)^(dim X + 1)
    let milnor = if expected % 2 == 1 { pushed } else { -&pushed };
    let cvir = c_vir_ci(n, sys.d, r);
    let signed = if expected % 2 == 0 { milnor.clone() } else { -&milnor };
    let csm = &cvir - &signed;
    Ok(CharClassReport {
        n,
        r,
        euler: euler_of(&csm),
        csm,
        cvir: Some(cvir),
        milnor: Some(milnor),
        method: Method::Main,
        segre: Some(s),
        product_class: Some(full),
    })
}

/// CSM class of a hypersurface `G = 0` in `ambient`, `G` of bidegree
/// `(a,b)`: `c(T) (s(X) + c(O(X))^(-1) (s(JX)^dual tensor O(X)))` with
/// `s(X) = X/(1+X)` and `JX` generated by `G` and its partials.
fn hypersurface_class(g: &MultiPoly, ambient: Ambient, a: u32, b: u32, opts: &SegreOptions) -> Result<ChowClass, CharClassError> {
    let line = LineBundleClass::new(a as i64, b as i64);
    let inv = line.total_chern(ambient).inverse_unit()?;
    let mut jac = vec![g.clone()];
    for k in 0..g.vars().total() {
        jac.push(g.partial_derivative(k)?);
    }
    let sj = segre::segre_class(&jac, ambient, opts)?.cls;
    let sx = &line.c1(ambient) * &inv;
    let inner = &sx + &(&inv * &sj.dual().aluffi_tensor(line));
    Ok(&chern_tangent(ambient) * &inner)
}

/// CSM class of the hypersurface `F = 0` in `P^n`.
pub fn csm_hypersurface(f: &MultiPoly, n: usize, opts: &SegreOptions) -> Result<ChowClass, CharClassError> {
    if f.vars() != VarSpec::projective(n) {
        return Err(CharClassError::WrongVariables { index: 0, n });
    }
    let d = f.homogeneous_degree().ok_or(CharClassError::Inhomogeneous { index: 0 })?;
    hypersurface_class(f, Ambient::projective(n), d, 0, opts)
}

/// CSM class of `V(F_1..F_m)` as the signed sum over nonempty subsets `S` of
/// the hypersurface classes of `prod_{i in S} F_i`.
pub fn csm_inclusion_exclusion(gens: &[MultiPoly], n: usize, opts: &SegreOptions) -> Result<ChowClass, CharClassError> {
    let gens: Vec<&MultiPoly> = gens.iter().filter(|g| !g.is_zero()).collect();
    if gens.is_empty() {
        // the zero ideal cuts out all of P^n
        return Ok(chern_tangent(Ambient::projective(n)));
    }
    let m = gens.len();
    if m > INCLUSION_EXCLUSION_WARN {
        log::warn!("inclusion-exclusion over {m} generators needs {} hypersurface classes", (1u64 << m) - 1);
    }
    let terms = (1u64..1 << m)
        .into_par_iter()
        .map(|subset| {
            let mut prod = MultiPoly::one(gens[0].vars(), gens[0].ring());
            for (k, g) in gens.iter().enumerate() {
                if subset >> k & 1 == 1 {
                    prod = prod.checked_mul(g)?;
                }
            }
            let cls = csm_hypersurface(&prod, n, opts).map_err(|e| {
                log::error!("hypersurface class for subset {subset:#b} failed: {e}");
                e
            })?;
            Ok(if subset.count_ones() % 2 == 1 { cls } else { -&cls })
        })
        .collect::<Result<Vec<ChowClass>, CharClassError>>()?;
    Ok(terms.iter().fold(ChowClass::zero(Ambient::projective(n)), |acc, t| &acc + t))
}

/// CSM class of `X` via the hypersurface `sum_j y_j F_j` in `P^n x P^r`: its
/// class pushed to `P^n` equals `r c(TP^n) + csm(X)`.
pub fn csm_via_calx(sys: &InputSystem, opts: &SegreOptions) -> Result<ChowClass, CharClassError> {
    let (n, r) = (sys.n, sys.r());
    let big = VarSpec::biprojective(n, r);
    let ring = sys.gens[0].ring();
    let mut g = MultiPoly::zero(big, ring);
    for (j, f) in sys.gens.iter().enumerate() {
        g = g.checked_add(&(&MultiPoly::y(big, ring, j) * &f.embed(big)?))?;
    }
    let tangent = chern_tangent(Ambient::projective(n));
    if g.is_zero() {
        return Ok(tangent);
    }
    let total = hypersurface_class(&g, Ambient::product(n, r), sys.d, 1, opts)?;
    let pushed = total.pushforward_h()?;
    Ok(&pushed - &tangent.scale(&BigInt::from(r)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SegreOptions {
        SegreOptions::default()
    }

    fn h(n: usize, c: &[i64]) -> ChowClass {
        ChowClass::from_h_coeffs(n, c.iter().copied())
    }

    #[test]
    fn normalization_raises_and_pads() {
        let sys = InputSystem::parse(2, &["x0", "x1^2"], None).unwrap();
        assert_eq!(sys.d, 2);
        assert!(sys.raised);
        // x0 becomes x0^2, x0x1, x0x2, then x1^2
        assert_eq!(sys.gens.len(), 4);
        assert_eq!(sys.r(), 3);
        let padded = InputSystem::parse(2, &["x0^2", "x0*x1"], None).unwrap();
        assert_eq!(padded.r(), 2);
        assert!(padded.gens[2].is_zero());
        let kept = InputSystem::parse(6, &["x1*x2*x3", "x0*x1^2 + x2^3"], Some(2)).unwrap();
        assert_eq!((kept.d, kept.r(), kept.raised), (3, 1, false));
    }

    #[test]
    fn normalization_rejects_bad_input() {
        assert!(matches!(normalize_input(2, &[], None), Err(CharClassError::Empty)));
        assert!(matches!(InputSystem::parse(2, &["x0^2 + x1"], None), Err(CharClassError::Inhomogeneous { index: 0 })));
    }

    #[test]
    fn y_ideal_of_a_double_line_pair() {
        let sys = InputSystem::parse(2, &["x0^2", "x0*x1"], None).unwrap();
        let ys = build_y_ideal(&sys).unwrap();
        let big = VarSpec::biprojective(2, 2);
        let want: Vec<MultiPoly> = ["x0^2", "x0*x1", "2*y0*x0 + y1*x1", "y1*x0"]
            .iter()
            .map(|s| parse_poly(s, big, Ring::Rational).unwrap())
            .collect();
        assert_eq!(ys, want);
    }

    #[test]
    fn csm_of_a_line_from_two_presentations() {
        let a = csm_main(&InputSystem::parse(2, &["x0^2", "x0*x1"], None).unwrap(), &opts()).unwrap();
        let b = csm_main(&InputSystem::parse(2, &["x0"], None).unwrap(), &opts()).unwrap();
        assert_eq!(a.csm, h(2, &[0, 1, 2]));
        assert_eq!(b.csm, h(2, &[0, 1, 2]));
        assert_eq!(a.euler, BigInt::from(2));
    }

    #[test]
    fn full_classes_of_the_line_presentations() {
        let v = Ambient::product(2, 2);
        let a = csm_main(&InputSystem::parse(2, &["x0^2", "x0*x1"], None).unwrap(), &opts()).unwrap();
        let want_s = ChowClass::from_terms(v, [(1, 1, 1), (2, 0, 1), (1, 2, -1), (2, 1, -2), (2, 2, 3)]);
        assert_eq!(a.segre.unwrap().cls, want_s);
        let want_a = ChowClass::from_terms(v, [(2, 0, 1), (1, 1, 1), (2, 1, -1), (1, 2, 1), (2, 2, 2)]);
        assert_eq!(a.product_class.unwrap(), want_a);
        let b = csm_main(&InputSystem::parse(2, &["x0"], None).unwrap(), &opts()).unwrap();
        let want_b = ChowClass::from_terms(v, [(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 2)]);
        assert_eq!(b.product_class.unwrap(), want_b);
    }

    #[test]
    fn smooth_quadric_surface() {
        let sys = InputSystem::parse(3, &["x0*x1 - x2*x3"], None).unwrap();
        let want = h(3, &[0, 2, 4, 4]);
        assert_eq!(csm_main(&sys, &opts()).unwrap().csm, want);
        assert_eq!(csm_hypersurface(&sys.gens[0], 3, &opts()).unwrap(), want);
        assert_eq!(csm_via_calx(&sys, &opts()).unwrap(), want);
    }

    #[test]
    fn plane_curves() {
        let v = VarSpec::projective(2);
        let conic = parse_poly("x0^2 + x1^2 + x2^2", v, Ring::Rational).unwrap();
        assert_eq!(csm_hypersurface(&conic, 2, &opts()).unwrap(), h(2, &[0, 2, 2]));
        let nodal = parse_poly("x1^2*x2 - x0^3 - x0^2*x2", v, Ring::Rational).unwrap();
        assert_eq!(csm_hypersurface(&nodal, 2, &opts()).unwrap(), h(2, &[0, 3, 1]));
        let line = parse_poly("x0", v, Ring::Rational).unwrap();
        assert_eq!(csm_hypersurface(&line, 2, &opts()).unwrap(), h(2, &[0, 1, 2]));
    }

    #[test]
    fn whole_space_and_empty_set() {
        let whole = normalize_input(2, &[MultiPoly::zero(VarSpec::projective(2), Ring::Rational)], None).unwrap();
        assert_eq!(csm_main(&whole, &opts()).unwrap().csm, h(2, &[1, 3, 3]));
        assert_eq!(csm_via_calx(&whole, &opts()).unwrap(), h(2, &[1, 3, 3]));
        let v = VarSpec::projective(2);
        let coords: Vec<MultiPoly> = (0..3).map(|i| MultiPoly::x(v, Ring::Rational, i)).collect();
        assert!(csm_inclusion_exclusion(&coords, 2, &opts()).unwrap().is_zero());
    }

    #[test]
    fn virtual_class_of_a_linear_space_is_its_tangent_class() {
        // (1+H)^(n-r) H^(r+1)
        let c = c_vir_ci(4, 1, 1);
        assert_eq!(c, h(4, &[0, 0, 1, 3, 3]));
        assert_eq!(c_vir_degrees(6, &[3, 3]), c_vir_ci(6, 3, 1));
    }

    #[test]
    fn milnor_requires_a_complete_intersection() {
        let sys = InputSystem::parse(3, &["x0*x1", "x0*x2"], Some(2)).unwrap();
        assert!(matches!(milnor_ci(&sys, &opts()), Err(CharClassError::NotCompleteIntersection { expected: 1, found: Some(2) })));
        let raised = InputSystem::parse(3, &["x0", "x1^2"], Some(2)).unwrap();
        assert!(matches!(milnor_ci(&raised, &opts()), Err(CharClassError::UnequalDegrees)));
    }

    #[test]
    fn milnor_class_vanishes_only_when_smooth() {
        // two disjoint lines in P^3 are a smooth complete intersection of two quadrics
        let sys = InputSystem::parse(3, &["x0*x2", "x1*x3"], Some(2)).unwrap();
        // x0x2 = x1x3 = 0 is four lines forming a cycle, singular at four points
        let rep = milnor_ci(&sys, &opts()).unwrap();
        assert_eq!(rep.csm, h(3, &[0, 0, 4, 4]));
        assert!(!rep.milnor.unwrap().is_zero());
        let smooth = InputSystem::parse(3, &["x0^2 + x1^2 + x2^2 + x3^2", "x0^2 + 2*x1^2 + 3*x2^2 + 4*x3^2"], Some(2)).unwrap();
        let rep = milnor_ci(&smooth, &opts()).unwrap();
        assert!(rep.milnor.unwrap().is_zero());
        assert_eq!(rep.euler, BigInt::from(0));
    }
}
