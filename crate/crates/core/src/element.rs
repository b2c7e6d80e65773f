//! Finite complex linear combinations of monomials.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SpanBasis};
use crate::monomial::{adjoint_monomial, mul_monomials, Monomial, SiteIndex};
use crate::oracle::{self, QubitWindow};

/// Coefficients below this modulus are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;
/// Default tolerance for algebraic identities.
pub const DEFAULT_TOL: f64 = 1e-9;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// An element of the quasilocal algebra with finite support.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    terms: BTreeMap<Monomial, Complex64>,
    prune_threshold: f64,
}

impl Default for AlgebraElement {
    fn default() -> Self {
        Self::zero()
    }
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement { terms: BTreeMap::new(), prune_threshold: PRUNE_THRESHOLD }
    }

    pub fn identity() -> Self {
        Self::scalar(c64(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::from_terms([(Monomial::IDENTITY, c)])
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::from_terms([(m, c64(1.0, 0.0))])
    }

    /// The generator `U_i`.
    pub fn generator(site: SiteIndex) -> Self {
        Self::monomial(Monomial::generator(site))
    }

    /// Product of generators at the given doubled sites, taken in the given order.
    pub fn product_of(doubled: &[i32]) -> Result<Self> {
        let mut out = Self::identity();
        for &d in doubled {
            out = &out * &Self::generator(SiteIndex::from_doubled(d)?);
        }
        Ok(out)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Complex64)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in terms {
            *out.terms.entry(m).or_default() += c;
        }
        out.prune();
        out
    }

    pub fn with_prune_threshold(mut self, threshold: f64) -> Self {
        self.prune_threshold = threshold;
        self.prune();
        self
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune_threshold
    }

    fn prune(&mut self) {
        let t = self.prune_threshold;
        self.terms.retain(|_, c| c.norm() >= t);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> Complex64 {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest and highest site over all monomials; `None` for scalars.
    pub fn support(&self) -> Option<(SiteIndex, SiteIndex)> {
        self.terms.keys().filter_map(|m| m.support()).fold(None, |acc, (lo, hi)| match acc {
            None => Some((lo, hi)),
            Some((a, b)) => Some((a.min(lo), b.max(hi))),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (*m, v * c))).with_prune_threshold(self.prune_threshold)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(c64(c, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| {
            let (s, m) = adjoint_monomial(*m);
            (m, c.conj() * s.value())
        });
        Self::from_terms(terms).with_prune_threshold(self.prune_threshold)
    }

    /// Normalized trace: the identity coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(Monomial::IDENTITY)
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &AlgebraElement) -> Complex64 {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = Complex64::default();
        for (m, x) in &small.terms {
            if let Some(y) = large.terms.get(m) {
                let (s, _) = mul_monomials(*m, *m);
                acc += x * y * s.value();
            }
        }
        acc
    }

    /// Euclidean norm of the coefficient vector (equals the normalized
    /// Hilbert-Schmidt norm, since monomials are orthonormal).
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn sup_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient sup-norm distance.
    pub fn distance(&self, other: &AlgebraElement) -> f64 {
        (self - other).sup_norm()
    }

    pub fn approx_eq(&self, other: &AlgebraElement, tol: f64) -> bool {
        self.distance(other) <= tol
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        self.approx_eq(&self.adjoint(), tol)
    }

    pub fn is_projection(&self, tol: f64) -> bool {
        self.is_selfadjoint(tol) && (self * self).approx_eq(self, tol)
    }

    /// Checks `-1 <= x <= 1` through the dense representation on the
    /// smallest window covering the support.
    pub fn is_selfadjoint_contraction(&self, tol: f64) -> Result<bool> {
        if !self.is_selfadjoint(tol) {
            return Ok(false);
        }
        let window = QubitWindow::covering(self)?;
        let (lo, hi) = oracle::spectrum_bounds(self, &window)?;
        Ok(lo >= -1.0 - tol && hi <= 1.0 + tol)
    }

    /// Space translation by `doubled_shift` half-sites.
    pub fn shifted(&self, doubled_shift: i32) -> Result<Self> {
        let terms = self.terms.iter().map(|(m, c)| Ok((m.shifted(doubled_shift)?, *c))).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_terms(terms).with_prune_threshold(self.prune_threshold))
    }

    pub fn real_trace(&self) -> f64 {
        self.trace().re
    }
}

pub fn commutator(x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
    &(x * y) - &(y * x)
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<'a> Add<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&AlgebraElement> for AlgebraElement {
    fn add_assign(&mut self, rhs: &AlgebraElement) {
        for (m, c) in &rhs.terms {
            *self.terms.entry(*m).or_default() += c;
        }
        self.prune();
    }
}

impl<'a> Sub<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            *out.terms.entry(*m).or_default() -= c;
        }
        out.prune();
        out
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale_real(-1.0)
    }
}

impl<'a> Mul<&'a AlgebraElement> for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut terms: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let (s, p) = mul_monomials(*ma, *mb);
                let v = ca * cb;
                *terms.entry(p).or_default() += if s.value() < 0.0 { -v } else { v };
            }
        }
        let mut out = AlgebraElement { terms, prune_threshold: self.prune_threshold.max(rhs.prune_threshold) };
        out.prune();
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<AlgebraElement> for AlgebraElement {
            type Output = AlgebraElement;
            fn $f(self, rhs: AlgebraElement) -> AlgebraElement {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a AlgebraElement> for AlgebraElement {
            type Output = AlgebraElement;
            fn $f(self, rhs: &AlgebraElement) -> AlgebraElement {
                (&self).$f(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| (m.degree(), m.doubled_sites()));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}{:+}i)", c.re, c.im)?;
            }
            if !m.is_identity() {
                write!(f, " {m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    sites: Monomial,
    re: f64,
    im: f64,
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.terms.iter().map(|(m, c)| TermRecord { sites: *m, re: c.re, im: c.im }))
    }
}

impl<'de> Deserialize<'de> for AlgebraElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        Ok(Self::from_terms(records.into_iter().map(|r| (r.sites, c64(r.re, r.im)))))
    }
}

/// An inclusive range of lattice sites, e.g. a Cauchy-surface interval `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteRange {
    pub lo: SiteIndex,
    pub hi: SiteIndex,
}

impl SiteRange {
    pub fn new(lo: SiteIndex, hi: SiteIndex) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow);
        }
        Ok(SiteRange { lo, hi })
    }

    pub fn from_doubled(lo: i32, hi: i32) -> Result<Self> {
        Self::new(SiteIndex::from_doubled(lo)?, SiteIndex::from_doubled(hi)?)
    }

    pub fn len(&self) -> usize {
        (self.hi.doubled() - self.lo.doubled() + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: SiteIndex) -> bool {
        self.lo <= s && s <= self.hi
    }

    pub fn contains_element(&self, x: &AlgebraElement) -> bool {
        x.support().is_none_or(|(a, b)| self.contains(a) && self.contains(b))
    }

    /// Shrinks by `margin` whole sites on each side.
    pub fn shrink(&self, margin: u32) -> Result<Self> {
        let m = 2 * margin as i32;
        Self::from_doubled(self.lo.doubled() + m, self.hi.doubled() - m)
    }

    /// All `2^len` monomials supported in the range.
    pub fn monomials(&self) -> Vec<Monomial> {
        let sites: Vec<i32> = (self.lo.doubled()..=self.hi.doubled()).collect();
        assert!(sites.len() <= 20, "site range too long to enumerate");
        (0u32..(1 << sites.len()))
            .map(|mask| {
                let chosen: Vec<i32> = sites.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &d)| d).collect();
                Monomial::from_doubled(&chosen).expect("sites in range")
            })
            .collect()
    }
}

/// Linear dimension of the span of `xs`.
pub fn span_dimension(xs: &[AlgebraElement]) -> usize {
    let index = linalg::monomial_index(xs);
    linalg::numerical_rank(&linalg::coefficient_matrix(xs, &index))
}

fn elements_from_rows(rows: Vec<Vec<Complex64>>, basis: &[AlgebraElement]) -> Vec<AlgebraElement> {
    rows.into_iter()
        .map(|row| {
            let mut x = AlgebraElement::zero();
            for (coef, b) in row.into_iter().zip(basis) {
                if coef.norm() > 0.0 {
                    x += &b.scale(coef);
                }
            }
            x.with_prune_threshold(1e-10)
        })
        .collect()
}

/// Elements supported in `window` shrunk by `margin` sites per side that
/// commute with every generator.
///
/// Each generator `g` gives the linear constraints `[g, x] = 0` on the
/// coefficients of `x` over the monomials of the shrunken window.
pub fn relative_commutant_basis(generators: &[AlgebraElement], window: SiteRange, margin: u32) -> Result<Vec<AlgebraElement>> {
    for g in generators {
        if !window.contains_element(g) {
            return Err(Error::UnrepresentableSupport {
                lo: g.support().map_or(0, |s| s.0.doubled()),
                hi: g.support().map_or(0, |s| s.1.doubled()),
                window_lo: window.lo.doubled(),
                window_hi: window.hi.doubled(),
            });
        }
    }
    let inner = window.shrink(margin)?;
    let candidates: Vec<AlgebraElement> = inner.monomials().into_iter().map(AlgebraElement::monomial).collect();
    Ok(commutant_within_span(generators, &candidates))
}

/// Elements of `span(candidates)` commuting with every generator.
pub fn commutant_within_span(generators: &[AlgebraElement], candidates: &[AlgebraElement]) -> Vec<AlgebraElement> {
    // Independent subset of the candidate span.
    let mut basis_check = SpanBasis::new();
    let basis: Vec<AlgebraElement> = candidates.iter().filter(|c| basis_check.insert(c)).cloned().collect();
    if basis.is_empty() {
        return Vec::new();
    }
    if generators.is_empty() {
        return basis;
    }
    // Column j holds the stacked coefficients of [g, b_j] over all g.
    let commutators: Vec<Vec<AlgebraElement>> = basis.iter().map(|b| generators.iter().map(|g| commutator(g, b)).collect()).collect();
    let mut row_index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for col in &commutators {
        for (gi, c) in col.iter().enumerate() {
            for (m, _) in c.terms() {
                let next = row_index.len();
                row_index.entry((gi, *m)).or_insert(next);
            }
        }
    }
    let mut mat = nalgebra::DMatrix::<Complex64>::zeros(row_index.len(), basis.len());
    for (j, col) in commutators.iter().enumerate() {
        for (gi, c) in col.iter().enumerate() {
            for (m, v) in c.terms() {
                mat[(row_index[&(gi, *m)], j)] = *v;
            }
        }
    }
    let null = linalg::row_reduce(linalg::null_space(&mat), 1e-10);
    elements_from_rows(null, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{rep_element, QubitWindow};
    use proptest::prelude::*;

    fn u(d: i32) -> AlgebraElement {
        AlgebraElement::generator(SiteIndex::from_doubled(d).unwrap())
    }

    fn one() -> AlgebraElement {
        AlgebraElement::identity()
    }

    fn i_c() -> Complex64 {
        c64(0.0, 1.0)
    }

    #[test]
    fn projection_idempotent() {
        let p = (&one() + &u(0)).scale_real(0.5);
        assert!((&p * &p).approx_eq(&p, 1e-15));
        assert!(p.is_projection(DEFAULT_TOL));
    }

    #[test]
    fn pauli_like_monomial_squares_to_one() {
        let y = (&u(0) * &u(1)).scale(i_c());
        assert!((&y * &y).approx_eq(&one(), 1e-15));
        assert!(y.is_selfadjoint(1e-15));
    }

    #[test]
    fn commutator_of_neighbours() {
        let c = commutator(&u(0), &u(1));
        assert!(c.approx_eq(&(&u(0) * &u(1)).scale_real(2.0), 1e-15));
        assert!(commutator(&u(0), &u(2)).is_empty());
    }

    #[test]
    fn trace_is_identity_coefficient() {
        assert_eq!(one().trace(), c64(1.0, 0.0));
        assert_eq!(u(3).trace(), c64(0.0, 0.0));
        let x = &one().scale_real(0.25) + &u(-2);
        assert_eq!(x.trace(), c64(0.25, 0.0));
    }

    #[test]
    fn unitary_from_projection_is_contraction() {
        let p = (&one() + &u(-2)).scale_real(0.5);
        let unitary = &p.scale_real(2.0) - &one();
        assert!(unitary.is_selfadjoint_contraction(DEFAULT_TOL).unwrap());
        assert!(!u(0).scale_real(1.5).is_selfadjoint_contraction(DEFAULT_TOL).unwrap());
    }

    #[test]
    fn span_dimensions() {
        let two_point = vec![one(), u(0), u(1), (&u(0) * &u(1)).scale(i_c())];
        assert_eq!(span_dimension(&two_point), 4);
        assert_eq!(span_dimension(&[one(), one()]), 1);
        let three_point = vec![
            one(),
            u(-1),
            u(0),
            u(1),
            (&u(-1) * &u(0)).scale(i_c()),
            (&u(0) * &u(1)).scale(i_c()),
            &u(-1) * &u(1),
            &(&u(-1) * &u(0)) * &u(1),
        ];
        assert_eq!(span_dimension(&three_point), 8);
        assert_eq!(span_dimension(&[]), 0);
    }

    #[test]
    fn cauchy_interval_dimension() {
        // interval (i, j) carries 2(j - i) + 1 generators
        for (lo, hi) in [(0, 0), (-1, 0), (-2, 1), (-1, 3)] {
            let r = SiteRange::from_doubled(lo, hi).unwrap();
            let xs: Vec<_> = r.monomials().into_iter().map(AlgebraElement::monomial).collect();
            assert_eq!(span_dimension(&xs), 1 << (hi - lo + 1));
        }
    }

    #[test]
    fn commutant_without_generators_is_everything() {
        let w = SiteRange::from_doubled(-1, 1).unwrap();
        let basis = relative_commutant_basis(&[], w, 0).unwrap();
        assert_eq!(basis.len(), 8);
    }

    #[test]
    fn haag_surrogate_commutant() {
        // window [-3, 3]; generators are all U_j with |j| >= 1
        let w = SiteRange::from_doubled(-6, 6).unwrap();
        let gens: Vec<_> = (-6..=6).filter(|d: &i32| d.abs() >= 2).map(u).collect();
        let basis = relative_commutant_basis(&gens, w, 1).unwrap();
        assert_eq!(basis.len(), 2);
        let expected = vec![one(), u(0)];
        let mut all = basis.clone();
        all.extend(expected);
        assert_eq!(span_dimension(&all), 2);
    }

    #[test]
    fn commutant_rejects_generator_outside_window() {
        let w = SiteRange::from_doubled(-2, 2).unwrap();
        assert!(relative_commutant_basis(&[u(4)], w, 0).is_err());
        assert!(relative_commutant_basis(&[], w, 2).is_err());
    }

    fn arb_element() -> impl Strategy<Value = AlgebraElement> {
        proptest::collection::vec((proptest::collection::btree_set(-4i32..4, 0..5), -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(|terms| {
            AlgebraElement::from_terms(
                terms.into_iter().map(|(s, re, im)| (Monomial::from_doubled(&s.into_iter().collect::<Vec<_>>()).unwrap(), c64(re, im))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_is_cyclic(x in arb_element(), y in arb_element()) {
            let d = (&x * &y).trace() - (&y * &x).trace();
            prop_assert!(d.norm() < 1e-9);
            prop_assert!(((&x * &y).trace() - x.trace_product(&y)).norm() < 1e-12);
        }

        #[test]
        fn trace_is_positive(x in arb_element()) {
            let t = (&x.adjoint() * &x).trace();
            prop_assert!(t.re >= -1e-12 && t.im.abs() < 1e-12);
        }

        #[test]
        fn ring_laws(x in arb_element(), y in arb_element(), z in arb_element()) {
            prop_assert!((&(&x * &y) * &z).approx_eq(&(&x * &(&y * &z)), 1e-9));
            prop_assert!((&x * &(&y + &z)).approx_eq(&(&(&x * &y) + &(&x * &z)), 1e-9));
            prop_assert!((&x * &y).adjoint().approx_eq(&(&y.adjoint() * &x.adjoint()), 1e-9));
            prop_assert!(x.adjoint().adjoint().approx_eq(&x, 0.0));
        }

        #[test]
        fn product_matches_matrices(x in arb_element(), y in arb_element()) {
            let w = QubitWindow::new(-2, 2).unwrap();
            let lhs = rep_element(&(&x * &y), &w).unwrap();
            let rhs = rep_element(&x, &w).unwrap() * rep_element(&y, &w).unwrap();
            prop_assert!((lhs - rhs).camax() < 1e-9);
        }
    }
}
