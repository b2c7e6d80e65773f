//! Dense matrix representation of the lattice algebra on a finite window of
//! qubits.
//!
//! Integer site `x` carries one qubit. The generator `U_x` acts as Pauli-Z on
//! that qubit, and `U_{x+1/2}` as Pauli-X on qubits `x` and `x+1`. These
//! satisfy the generator relations, and distinct monomials map to distinct
//! Pauli strings. Kronecker factors are ordered by ascending qubit, most
//! significant first.
//!
//! Products of generators are formed qubit by qubit: every generator is a
//! tensor product of single-qubit operators, so the image of a word is the
//! tensor product of the per-qubit 2x2 products. No sign bookkeeping from the
//! symbolic side is reused here.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::monomial::Monomial;

/// Default cap on the number of qubits in a window.
pub const DEFAULT_QUBIT_CAP: u32 = 13;

/// Integer sites `lo..=hi`, one qubit each.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitWindow {
    pub lo: i32,
    pub hi: i32,
}

impl QubitWindow {
    pub fn new(lo: i32, hi: i32) -> Result<Self> {
        Self::with_cap(lo, hi, DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(lo: i32, hi: i32, cap: u32) -> Result<Self> {
        if hi < lo {
            return Err(Error::EmptyWindow);
        }
        let qubits = (hi - lo + 1) as u32;
        if qubits > cap {
            return Err(Error::WindowTooLarge { qubits, cap });
        }
        Ok(QubitWindow { lo, hi })
    }

    /// Smallest window representing every monomial of `x`.
    pub fn covering(x: &AlgebraElement) -> Result<Self> {
        match x.support() {
            None => Self::new(0, 0),
            Some((lo, hi)) => Self::new(lo.doubled().div_euclid(2), (hi.doubled() + 1).div_euclid(2)),
        }
    }

    pub fn qubits(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    /// Representable doubled sites: `[2 lo, 2 hi]`.
    pub fn can_represent(&self, m: Monomial) -> bool {
        m.support().is_none_or(|(a, b)| a.doubled() >= 2 * self.lo && b.doubled() <= 2 * self.hi)
    }

    fn check(&self, m: Monomial) -> Result<()> {
        if self.can_represent(m) {
            Ok(())
        } else {
            let (a, b) = m.support().expect("identity is always representable");
            Err(Error::UnrepresentableSupport { lo: a.doubled(), hi: b.doubled(), window_lo: self.lo, window_hi: self.hi })
        }
    }
}

fn pauli_z() -> Matrix2<Complex64> {
    Matrix2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0))
}

fn pauli_x() -> Matrix2<Complex64> {
    Matrix2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
}

fn kron_all(factors: &[Matrix2<Complex64>]) -> DMatrix<Complex64> {
    let mut out = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for f in factors {
        let dyn_f = DMatrix::from_column_slice(2, 2, f.as_slice());
        out = out.kronecker(&dyn_f);
    }
    out
}

/// Per-qubit factors of the ordered product of generators in `m`.
fn qubit_factors(m: Monomial, w: &QubitWindow) -> Vec<Matrix2<Complex64>> {
    let mut factors = vec![Matrix2::identity(); w.qubits()];
    for site in m.sites() {
        let d = site.doubled();
        if d % 2 == 0 {
            let q = (d / 2 - w.lo) as usize;
            factors[q] *= pauli_z();
        } else {
            let x = (d - 1) / 2;
            let q = (x - w.lo) as usize;
            factors[q] *= pauli_x();
            factors[q + 1] *= pauli_x();
        }
    }
    factors
}

pub fn rep_monomial(m: Monomial, w: &QubitWindow) -> Result<DMatrix<Complex64>> {
    w.check(m)?;
    Ok(kron_all(&qubit_factors(m, w)))
}

pub fn rep_element(x: &AlgebraElement, w: &QubitWindow) -> Result<DMatrix<Complex64>> {
    let mut out = DMatrix::zeros(w.dim(), w.dim());
    for (m, c) in x.terms() {
        out += rep_monomial(*m, w)? * *c;
    }
    Ok(out)
}

/// `trace / dimension`.
pub fn normalized_trace(mat: &DMatrix<Complex64>) -> Complex64 {
    mat.trace() / mat.nrows() as f64
}

/// Hermitian eigenvalue range of the representation of `x`.
pub fn spectrum_bounds(x: &AlgebraElement, w: &QubitWindow) -> Result<(f64, f64)> {
    let dev = x.distance(&x.adjoint());
    if dev > crate::element::DEFAULT_TOL {
        return Err(Error::NonHermitian(dev));
    }
    let mat = rep_element(x, w)?;
    let eig = mat.symmetric_eigenvalues();
    let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Largest singular value of the representation.
pub fn operator_norm(x: &AlgebraElement, w: &QubitWindow) -> Result<f64> {
    let mat = rep_element(x, w)?;
    Ok(mat.singular_values().iter().cloned().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{span_dimension, SiteRange};
    use crate::monomial::{mul_monomials, SiteIndex};

    fn m(d: &[i32]) -> Monomial {
        Monomial::from_doubled(d).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn integer_generator_is_z() {
        let w = QubitWindow::new(0, 1).unwrap();
        let z = rep_monomial(m(&[0]), &w).unwrap();
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(1.0), c(-1.0), c(-1.0)]));
        assert_eq!(z, expected);
    }

    #[test]
    fn bond_generator_is_xx() {
        let w = QubitWindow::new(0, 1).unwrap();
        let xx = rep_monomial(m(&[1]), &w).unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let v = if r ^ col == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(r, col)], c(v));
            }
        }
    }

    #[test]
    fn neighbours_anticommute_as_matrices() {
        let w = QubitWindow::new(0, 1).unwrap();
        let a = rep_monomial(m(&[0]), &w).unwrap();
        let b = rep_monomial(m(&[1]), &w).unwrap();
        assert!((&a * &b + &b * &a).camax() < 1e-15);
    }

    #[test]
    fn identity_and_traces() {
        let w = QubitWindow::new(-1, 1).unwrap();
        assert_eq!(rep_element(&AlgebraElement::identity(), &w).unwrap(), DMatrix::identity(8, 8));
        let x = rep_monomial(m(&[-2, 2]), &w).unwrap();
        assert!(normalized_trace(&x).norm() < 1e-15);
    }

    #[test]
    fn projection_spectrum() {
        let w = QubitWindow::new(0, 0).unwrap();
        let p = (&AlgebraElement::identity() + &AlgebraElement::generator(SiteIndex::integer(0))).scale_real(0.5);
        let (lo, hi) = spectrum_bounds(&p, &w).unwrap();
        assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian_and_out_of_window() {
        let w = QubitWindow::new(0, 1).unwrap();
        let y = AlgebraElement::product_of(&[0, 1]).unwrap();
        assert!(matches!(spectrum_bounds(&y, &w), Err(Error::NonHermitian(_))));
        assert!(rep_monomial(m(&[3]), &w).is_err());
        assert!(rep_monomial(m(&[-1]), &w).is_err());
        assert!(QubitWindow::new(0, 13).is_err());
        assert!(QubitWindow::new(1, 0).is_err());
    }

    #[test]
    fn covering_window() {
        let x = AlgebraElement::product_of(&[-3, 2]).unwrap();
        let w = QubitWindow::covering(&x).unwrap();
        assert_eq!((w.lo, w.hi), (-2, 1));
        assert!(w.can_represent(m(&[-3, 2])));
    }

    #[test]
    fn all_monomial_products_match_on_small_window() {
        let w = QubitWindow::new(-1, 1).unwrap();
        let monos = SiteRange::from_doubled(-2, 2).unwrap().monomials();
        let reps: Vec<_> = monos.iter().map(|x| rep_monomial(*x, &w).unwrap()).collect();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let (s, p) = mul_monomials(*a, *b);
                let lhs = &reps[i] * &reps[j];
                let rhs = rep_monomial(p, &w).unwrap() * c(s.value());
                assert_eq!(lhs, rhs, "{a} * {b}");
            }
        }
    }

    #[test]
    fn representation_is_injective() {
        let w = QubitWindow::new(-1, 1).unwrap();
        let monos = SiteRange::from_doubled(-2, 2).unwrap().monomials();
        let reps: Vec<_> = monos.iter().map(|x| rep_monomial(*x, &w).unwrap()).collect();
        // rows are the flattened images
        let mat = DMatrix::from_fn(monos.len(), w.dim() * w.dim(), |r, k| reps[r][(k / w.dim(), k % w.dim())]);
        assert_eq!(crate::linalg::numerical_rank(&mat), monos.len());
        let elements: Vec<_> = monos.iter().map(|x| AlgebraElement::monomial(*x)).collect();
        assert_eq!(span_dimension(&elements), monos.len());
    }
}
