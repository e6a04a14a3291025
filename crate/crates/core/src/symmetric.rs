//! Exact symmetric matrices over the rationals.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::indexing::IndexBasis;
use crate::rational::{determinant, format_rational, from_f64};

/// Symmetric matrix with exact entries; only the upper triangle is stored.
///
/// Moment and localizing matrices carry the [`IndexBasis`] labelling their
/// rows so that diagnostics can map a row back to its monomial.
#[derive(Clone, Debug)]
pub struct SymMatrixQ {
    size: usize,
    upper: Vec<BigRational>,
    basis: Option<Arc<IndexBasis>>,
}

impl PartialEq for SymMatrixQ {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.upper == other.upper
    }
}

impl Eq for SymMatrixQ {}

impl SymMatrixQ {
    pub fn zeros(size: usize) -> Self {
        SymMatrixQ {
            size,
            upper: vec![BigRational::zero(); size * (size + 1) / 2],
            basis: None,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Builds from the upper triangle `f(i, j)` with `i <= j`.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> BigRational) -> Self {
        let mut upper = Vec::with_capacity(size * (size + 1) / 2);
        for i in 0..size {
            for j in i..size {
                upper.push(f(i, j));
            }
        }
        SymMatrixQ {
            size,
            upper,
            basis: None,
        }
    }

    /// Builds from full rows, rejecting non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<BigRational>]) -> Result<Self> {
        let size = rows.len();
        for row in rows {
            if row.len() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    found: row.len(),
                });
            }
        }
        for i in 0..size {
            for j in i + 1..size {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper: format_rational(&rows[i][j]),
                        lower: format_rational(&rows[j][i]),
                    });
                }
            }
        }
        Ok(Self::from_fn(size, |i, j| rows[i][j].clone()))
    }

    /// Exact image of a symmetric `f64` matrix given by rows.
    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let exact = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| from_f64(x).ok_or(Error::NonFinite))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        Self::from_rows(&exact)
    }

    /// `[[a, b], [b, c]]`.
    pub fn from_abc(a: BigRational, b: BigRational, c: BigRational) -> Self {
        SymMatrixQ {
            size: 2,
            upper: vec![a, b, c],
            basis: None,
        }
    }

    pub fn with_basis(mut self, basis: Arc<IndexBasis>) -> Self {
        debug_assert_eq!(basis.len(), self.size);
        self.basis = Some(basis);
        self
    }

    pub fn basis(&self) -> Option<&IndexBasis> {
        self.basis.as_deref()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        assert!(i < self.size && j < self.size, "index out of bounds");
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // rows 0..i hold size + (size - 1) + ... + (size - i + 1) entries
        i * (2 * self.size + 1 - i) / 2 + (j - i)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.upper[self.slot(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        let k = self.slot(i, j);
        self.upper[k] = value;
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn upper(&self) -> &[BigRational] {
        &self.upper
    }

    fn check_same_size(&self, other: &SymMatrixQ) -> Result<()> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &SymMatrixQ) -> Result<SymMatrixQ> {
        self.check_same_size(other)?;
        Ok(SymMatrixQ {
            size: self.size,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a + b)
                .collect(),
            basis: self.basis.clone(),
        })
    }

    pub fn scale(&self, factor: &BigRational) -> SymMatrixQ {
        SymMatrixQ {
            size: self.size,
            upper: self.upper.iter().map(|a| a * factor).collect(),
            basis: self.basis.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(Zero::is_zero)
    }

    pub fn max_abs(&self) -> BigRational {
        self.upper
            .iter()
            .map(|a| a.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }

    /// `trace(A B) = Σ_ij a_ij b_ij`.
    pub fn trace_product(&self, other: &SymMatrixQ) -> Result<BigRational> {
        self.check_same_size(other)?;
        let mut total = BigRational::zero();
        for i in 0..self.size {
            total += self.get(i, i) * other.get(i, i);
            for j in i + 1..self.size {
                total += BigRational::from_integer(2.into()) * self.get(i, j) * other.get(i, j);
            }
        }
        Ok(total)
    }

    pub fn determinant(&self) -> BigRational {
        determinant(&self.to_rows())
    }

    /// Determinant of the leading `k × k` block.
    pub fn leading_minor(&self, k: usize) -> BigRational {
        let rows: Vec<Vec<BigRational>> = (0..k)
            .map(|i| (0..k).map(|j| self.get(i, j).clone()).collect())
            .collect();
        determinant(&rows)
    }

    /// `Bᵀ A B` for a square `B` given by rows.
    pub fn congruence(&self, b: &[Vec<BigRational>]) -> Result<SymMatrixQ> {
        if b.len() != self.size || b.iter().any(|r| r.len() != self.size) {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: b.len(),
            });
        }
        let n = self.size;
        // ab = A B
        let ab: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.get(i, k) * &b[k][j]).sum())
                    .collect()
            })
            .collect();
        Ok(SymMatrixQ::from_fn(n, |i, j| {
            (0..n).map(|k| &b[k][i] * &ab[k][j]).sum()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[i64]]) -> SymMatrixQ {
        SymMatrixQ::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn packed_storage_is_symmetric() {
        let a = SymMatrixQ::from_fn(4, |i, j| int((10 * i + j) as i64));
        for i in 0..4 {
            for j in 0..4 {
                let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
                assert_eq!(a.get(i, j), &int((10 * lo + hi) as i64));
            }
        }
    }

    #[test]
    fn asymmetric_rows_rejected() {
        let rows = vec![vec![int(1), int(2)], vec![int(3), int(1)]];
        let err = SymMatrixQ::from_rows(&rows).unwrap_err();
        assert!(matches!(err, Error::NotSymmetric { row: 0, col: 1, .. }));
    }

    #[test]
    fn trace_products() {
        assert_eq!(
            SymMatrixQ::identity(2)
                .trace_product(&SymMatrixQ::identity(2))
                .unwrap(),
            int(2)
        );
        let x = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(x.trace_product(&x).unwrap(), int(2));
        let a = m(&[&[1, -1], &[-1, 1]]);
        let g = m(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.trace_product(&g).unwrap(), int(0));
        assert!(a.trace_product(&SymMatrixQ::identity(3)).is_err());
    }

    #[test]
    fn congruence_by_scaled_identity() {
        let a = SymMatrixQ::from_abc(int(1), ratio(-3, 2), int(1));
        let b = vec![vec![int(2), int(0)], vec![int(0), int(2)]];
        assert_eq!(a.congruence(&b).unwrap(), a.scale(&int(4)));
        let swap = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        let s = m(&[&[1, 2], &[2, 5]]).congruence(&swap).unwrap();
        assert_eq!(s, m(&[&[5, 2], &[2, 1]]));
    }

    #[test]
    fn minors() {
        let a = m(&[&[4, 8, 8], &[8, 28, 12], &[8, 12, 28]]);
        assert_eq!(a.leading_minor(1), int(4));
        assert_eq!(a.leading_minor(2), int(48));
        assert_eq!(a.leading_minor(3), int(512));
        assert_eq!(a.determinant(), int(512));
    }
}
