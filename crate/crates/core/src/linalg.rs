//! Rank, null space and span-membership over monomial coefficient vectors.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::element::AlgebraElement;
use crate::monomial::Monomial;

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Column index for every monomial occurring in `xs`.
pub(crate) fn monomial_index<'a>(xs: impl IntoIterator<Item = &'a AlgebraElement>) -> BTreeMap<Monomial, usize> {
    let mut index = BTreeMap::new();
    for x in xs {
        for (m, _) in x.terms() {
            let next = index.len();
            index.entry(*m).or_insert(next);
        }
    }
    index
}

/// Rows are the elements, columns the monomials in `index`.
pub(crate) fn coefficient_matrix(xs: &[AlgebraElement], index: &BTreeMap<Monomial, usize>) -> DMatrix<Complex64> {
    let mut mat = DMatrix::zeros(xs.len(), index.len());
    for (r, x) in xs.iter().enumerate() {
        for (m, c) in x.terms() {
            mat[(r, index[m])] = *c;
        }
    }
    mat
}

pub fn numerical_rank(mat: &DMatrix<Complex64>) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0;
    }
    let sv = mat.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_CUTOFF * max).count()
}

/// Orthonormal basis (as rows) of the right null space of `mat`.
pub fn null_space(mat: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    let n = mat.ncols();
    if n == 0 {
        return Vec::new();
    }
    // Pad so the thin SVD returns a full set of right singular vectors.
    let rows = mat.nrows().max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (mat.nrows(), n)).copy_from(mat);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let threshold = if max == 0.0 { f64::INFINITY } else { RANK_CUTOFF * max };
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| max == 0.0 || s <= threshold)
        .map(|(k, _)| v_t.row(k).iter().cloned().collect())
        .collect()
}

/// Gauss-Jordan reduction with partial pivoting; returns the nonzero rows.
///
/// Used to put null-space bases in a canonical, readable form.
pub fn row_reduce(mut rows: Vec<Vec<Complex64>>, tol: f64) -> Vec<Vec<Complex64>> {
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == rows.len() {
            break;
        }
        let (best, best_abs) =
            (pivot_row..rows.len()).map(|r| (r, rows[r][col].norm())).fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tol {
            continue;
        }
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        for v in rows[pivot_row].iter_mut() {
            *v /= p;
        }
        let pivot = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row {
                let f = row[col];
                if f.norm() > 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot) {
                        *v -= f * pv;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    for row in rows.iter_mut() {
        for v in row.iter_mut() {
            if v.norm() <= tol {
                *v = Complex64::new(0.0, 0.0);
            }
        }
    }
    rows
}

/// Incrementally grown orthonormal basis of sparse coefficient vectors.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    vectors: Vec<BTreeMap<Monomial, Complex64>>,
}

fn inner(a: &BTreeMap<Monomial, Complex64>, b: &BTreeMap<Monomial, Complex64>) -> Complex64 {
    let (small, large, conj_small) = if a.len() <= b.len() { (a, b, true) } else { (b, a, false) };
    let mut acc = Complex64::new(0.0, 0.0);
    for (m, x) in small {
        if let Some(y) = large.get(m) {
            // <a, b> = sum conj(a_m) b_m
            acc += if conj_small { x.conj() * y } else { y.conj() * x };
        }
    }
    acc
}

fn norm(a: &BTreeMap<Monomial, Complex64>) -> f64 {
    a.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Residual of `x` after projection onto the span, as a coefficient vector.
    fn residual_vector(&self, x: &AlgebraElement) -> BTreeMap<Monomial, Complex64> {
        let mut r: BTreeMap<Monomial, Complex64> = x.terms().map(|(m, c)| (*m, *c)).collect();
        // Two Gram-Schmidt passes keep the projection accurate.
        for _ in 0..2 {
            for q in &self.vectors {
                let coeff = inner(q, &r);
                if coeff.norm() == 0.0 {
                    continue;
                }
                for (m, qv) in q {
                    *r.entry(*m).or_default() -= coeff * qv;
                }
            }
        }
        r
    }

    /// Euclidean distance from `x` to the span (least-squares residual).
    pub fn distance(&self, x: &AlgebraElement) -> f64 {
        norm(&self.residual_vector(x))
    }

    /// Adds `x` if it is independent; returns whether the span grew.
    pub fn insert(&mut self, x: &AlgebraElement) -> bool {
        let scale = x.coefficient_norm();
        if scale == 0.0 {
            return false;
        }
        let r = self.residual_vector(x);
        let rn = norm(&r);
        if rn <= RANK_CUTOFF * scale {
            return false;
        }
        let q = r.into_iter().filter(|(_, v)| v.norm() > 1e-15 * rn).map(|(m, v)| (m, v / rn)).collect();
        self.vectors.push(q);
        true
    }

    pub fn contains(&self, x: &AlgebraElement, tol: f64) -> bool {
        self.distance(x) <= tol
    }
}
