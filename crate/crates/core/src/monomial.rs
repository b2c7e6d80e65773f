//! Generator monomials `U_{i1} U_{i2} ... U_{ip}` of the lattice algebra.
//!
//! Generators sit on the half-integer lattice. Neighbouring generators
//! (distance one half) anticommute, all other pairs commute, and every
//! generator squares to the identity. A monomial is therefore a finite set of
//! sites, written in ascending order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest representable doubled site index.
pub const MIN_DOUBLED: i32 = -64;
/// Largest representable doubled site index.
pub const MAX_DOUBLED: i32 = 63;

/// A lattice site `i` of the half-integer lattice, stored as `2i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct SiteIndex(i32);

impl SiteIndex {
    pub fn from_doubled(doubled: i32) -> Result<Self> {
        if (MIN_DOUBLED..=MAX_DOUBLED).contains(&doubled) {
            Ok(SiteIndex(doubled))
        } else {
            Err(Error::SiteOutOfRange(doubled))
        }
    }

    /// The integer site `x`. Panics outside the representable range.
    pub fn integer(x: i32) -> Self {
        Self::from_doubled(2 * x).expect("integer site out of range")
    }

    /// The half-integer site `x + 1/2`. Panics outside the representable range.
    pub fn half(x: i32) -> Self {
        Self::from_doubled(2 * x + 1).expect("half-integer site out of range")
    }

    #[inline]
    pub fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    #[inline]
    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Sites at distance one half.
    #[inline]
    pub fn is_adjacent(self, other: SiteIndex) -> bool {
        (self.0 - other.0).abs() == 1
    }

    pub fn shifted(self, doubled_shift: i32) -> Result<Self> {
        Self::from_doubled(self.0 + doubled_shift)
    }

    #[inline]
    fn bit(self) -> u32 {
        (self.0 - MIN_DOUBLED) as u32
    }
}

impl TryFrom<i32> for SiteIndex {
    type Error = Error;
    fn try_from(doubled: i32) -> Result<Self> {
        Self::from_doubled(doubled)
    }
}

impl From<SiteIndex> for i32 {
    fn from(s: SiteIndex) -> i32 {
        s.0
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else if self.0 == -1 {
            write!(f, "-1/2")
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Sign of a monomial product, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

/// Canonical (ascending) product of distinct generators.
///
/// Stored as a bitset over the representable doubled range; bit `k` is the
/// doubled site `MIN_DOUBLED + k`. The empty set is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const IDENTITY: Monomial = Monomial(0);

    pub fn generator(site: SiteIndex) -> Self {
        Monomial(1u128 << site.bit())
    }

    /// Builds the canonical monomial from strictly ascending sites.
    pub fn from_sites(sites: &[SiteIndex]) -> Result<Self> {
        let mut bits = 0u128;
        for w in sites.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::NonCanonicalMonomial);
            }
        }
        for s in sites {
            bits |= 1u128 << s.bit();
        }
        Ok(Monomial(bits))
    }

    pub fn from_doubled(doubled: &[i32]) -> Result<Self> {
        let sites = doubled.iter().map(|&d| SiteIndex::from_doubled(d)).collect::<Result<Vec<_>>>()?;
        Self::from_sites(&sites)
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, site: SiteIndex) -> bool {
        self.0 & (1u128 << site.bit()) != 0
    }

    /// Sites in ascending order.
    pub fn sites(self) -> impl Iterator<Item = SiteIndex> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let k = bits.trailing_zeros();
            bits &= bits - 1;
            Some(SiteIndex(k as i32 + MIN_DOUBLED))
        })
    }

    pub fn doubled_sites(self) -> Vec<i32> {
        self.sites().map(SiteIndex::doubled).collect()
    }

    /// Lowest and highest site, `None` for the identity.
    pub fn support(self) -> Option<(SiteIndex, SiteIndex)> {
        if self.0 == 0 {
            return None;
        }
        let lo = self.0.trailing_zeros() as i32 + MIN_DOUBLED;
        let hi = 127 - self.0.leading_zeros() as i32 + MIN_DOUBLED;
        Some((SiteIndex(lo), SiteIndex(hi)))
    }

    /// Space translation by `doubled_shift` half-sites.
    pub fn shifted(self, doubled_shift: i32) -> Result<Self> {
        if let Some((lo, hi)) = self.support() {
            lo.shifted(doubled_shift)?;
            hi.shifted(doubled_shift)?;
        }
        Ok(if doubled_shift >= 0 { Monomial(self.0 << doubled_shift as u32) } else { Monomial(self.0 >> (-doubled_shift) as u32) })
    }

    /// Raw bitset; useful as a compact key.
    #[inline]
    pub fn bits(self) -> u128 {
        self.0
    }

    /// Whether the two monomials commute (otherwise they anticommute).
    pub fn commutes_with(self, other: Monomial) -> bool {
        let adjacent = (self.0 & (other.0 << 1)).count_ones() + (self.0 & (other.0 >> 1)).count_ones();
        adjacent.is_multiple_of(2)
    }
}

/// Multiplies two canonical monomials.
///
/// Factors of `right` are inserted one at a time, in ascending order, into the
/// running canonical product. A factor `U_f` travels left past every factor
/// above it; of those only `U_{f+1/2}` anticommutes with it (factors of
/// `right` that were inserted earlier are all below `f`). Equal sites meet and
/// cancel. The total sign is thus the parity of `|{f in right : f + 1/2 in left}|`
/// and the product is the symmetric difference.
#[inline]
pub fn mul_monomials(left: Monomial, right: Monomial) -> (Sign, Monomial) {
    let flips = (left.0 & (right.0 << 1)).count_ones();
    (Sign::from_parity(flips % 2 == 1), Monomial(left.0 ^ right.0))
}

/// Normalized trace: 1 on the identity, 0 on every other monomial.
#[inline]
pub fn monomial_trace(m: Monomial) -> f64 {
    if m.is_identity() {
        1.0
    } else {
        0.0
    }
}

/// `M*` is the reversed product; reordering it costs one sign per adjacent pair.
#[inline]
pub fn adjoint_monomial(m: Monomial) -> (Sign, Monomial) {
    let pairs = (m.0 & (m.0 << 1)).count_ones();
    (Sign::from_parity(pairs % 2 == 1), m)
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for s in self.sites() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "U[{s}]")?;
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.sites().map(SiteIndex::doubled))
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doubled = Vec::<i32>::deserialize(deserializer)?;
        Monomial::from_doubled(&doubled).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(d: &[i32]) -> Monomial {
        Monomial::from_doubled(d).unwrap()
    }

    /// Literal insertion of each right factor, walking left past larger sites.
    fn insertion_product(left: &[i32], right: &[i32]) -> (i32, Vec<i32>) {
        let mut seq = left.to_vec();
        let mut sign = 1;
        for &f in right {
            let mut pos = seq.len();
            while pos > 0 && seq[pos - 1] > f {
                if seq[pos - 1] - f == 1 {
                    sign = -sign;
                }
                pos -= 1;
            }
            if pos > 0 && seq[pos - 1] == f {
                seq.remove(pos - 1);
            } else {
                seq.insert(pos, f);
            }
        }
        (sign, seq)
    }

    #[test]
    fn neighbour_anticommutes() {
        // U_{1/2} U_0 = -U_0 U_{1/2}
        assert_eq!(mul_monomials(m(&[1]), m(&[0])), (Sign::Minus, m(&[0, 1])));
        assert_eq!(mul_monomials(m(&[0]), m(&[1])), (Sign::Plus, m(&[0, 1])));
    }

    #[test]
    fn identity_is_neutral() {
        let x = m(&[-3, 0, 1, 4]);
        assert_eq!(mul_monomials(Monomial::IDENTITY, x), (Sign::Plus, x));
        assert_eq!(mul_monomials(x, Monomial::IDENTITY), (Sign::Plus, x));
    }

    #[test]
    fn three_site_example() {
        // U_{-1/2} (U_{-1} U_0) = -U_{-1} U_{-1/2} U_0
        assert_eq!(mul_monomials(m(&[-1]), m(&[-2, 0])), (Sign::Minus, m(&[-2, -1, 0])));
    }

    #[test]
    fn squares_cancel() {
        let x = m(&[-1, 0, 1]);
        let (s, p) = mul_monomials(x, x);
        assert!(p.is_identity());
        assert_eq!(s, Sign::from_parity(insertion_product(&[-1, 0, 1], &[-1, 0, 1]).0 < 0));
    }

    #[test]
    fn traces() {
        assert_eq!(monomial_trace(Monomial::IDENTITY), 1.0);
        assert_eq!(monomial_trace(m(&[0])), 0.0);
        assert_eq!(monomial_trace(m(&[-1, 1])), 0.0);
    }

    #[test]
    fn adjoints() {
        assert_eq!(adjoint_monomial(m(&[0, 1])), (Sign::Minus, m(&[0, 1])));
        assert_eq!(adjoint_monomial(Monomial::IDENTITY), (Sign::Plus, Monomial::IDENTITY));
        assert_eq!(adjoint_monomial(m(&[-2, 0, 2])), (Sign::Plus, m(&[-2, 0, 2])));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SiteIndex::from_doubled(64).is_err());
        assert!(SiteIndex::from_doubled(-65).is_err());
        assert!(Monomial::from_doubled(&[1, 0]).is_err());
        assert!(Monomial::from_doubled(&[2, 2]).is_err());
    }

    #[test]
    fn support_and_shift() {
        let x = m(&[-3, 0, 5]);
        assert_eq!(x.support().map(|(a, b)| (a.doubled(), b.doubled())), Some((-3, 5)));
        assert_eq!(x.shifted(2).unwrap(), m(&[-1, 2, 7]));
        assert!(m(&[63]).shifted(2).is_err());
        assert_eq!(Monomial::IDENTITY.support(), None);
    }

    #[test]
    fn display() {
        assert_eq!(m(&[-2, -1, 0]).to_string(), "U[-1] U[-1/2] U[0]");
        assert_eq!(Monomial::IDENTITY.to_string(), "1");
    }

    fn small_monomial() -> impl Strategy<Value = Monomial> {
        proptest::collection::btree_set(-12i32..12, 0..8).prop_map(|s| Monomial::from_doubled(&s.into_iter().collect::<Vec<_>>()).unwrap())
    }

    proptest! {
        #[test]
        fn matches_literal_insertion(a in small_monomial(), b in small_monomial()) {
            let (s, p) = mul_monomials(a, b);
            let (ls, lp) = insertion_product(&a.doubled_sites(), &b.doubled_sites());
            prop_assert_eq!(s.value() as i32, ls);
            prop_assert_eq!(p.doubled_sites(), lp);
        }

        #[test]
        fn associative(a in small_monomial(), b in small_monomial(), c in small_monomial()) {
            let (s1, ab) = mul_monomials(a, b);
            let (s2, left) = mul_monomials(ab, c);
            let (s3, bc) = mul_monomials(b, c);
            let (s4, right) = mul_monomials(a, bc);
            prop_assert_eq!(left, right);
            prop_assert_eq!(s1 * s2, s3 * s4);
        }

        #[test]
        fn adjoint_is_involution(a in small_monomial()) {
            let (s1, a1) = adjoint_monomial(a);
            let (s2, a2) = adjoint_monomial(a1);
            prop_assert_eq!(a2, a);
            prop_assert_eq!(s1 * s2, Sign::Plus);
        }

        #[test]
        fn generator_commutation(i in -20i32..20, j in -20i32..20) {
            let ui = Monomial::from_doubled(&[i]).unwrap();
            let uj = Monomial::from_doubled(&[j]).unwrap();
            let (s1, p1) = mul_monomials(ui, uj);
            let (s2, p2) = mul_monomials(uj, ui);
            prop_assert_eq!(p1, p2);
            prop_assert_eq!(s1 != s2, (i - j).abs() == 1);
            prop_assert_eq!(ui.commutes_with(uj), (i - j).abs() != 1);
        }
    }
}
