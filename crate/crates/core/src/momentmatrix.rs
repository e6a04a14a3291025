//! Moment and localizing matrices, assembled in exact arithmetic.
//!
//! For a sequence `y` and polynomial `f`, the localizing matrix `M_d(f y)`
//! has entry `Σ_γ f_γ y_{α+β+γ}` at `(α, β) ∈ N^n_d × N^n_d`. It equals the
//! moment matrix of the shifted sequence `z_α = Σ_γ f_γ y_{α+γ}`.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::indexing::{IndexBasis, MultiIndex};
use crate::measures::{MeasureDescriptor, MomentSequence};
use crate::poly::Polynomial;
use crate::symmetric::SymMatrixQ;

/// `f_A(x) = xᵀ A x`: coefficient `a_ii` on `x_i^2` and `2 a_ij` on `x_i x_j`.
pub fn quadratic_form(a: &SymMatrixQ) -> Polynomial {
    let n = a.size();
    let two = BigRational::from_integer(2.into());
    let terms = (0..n).flat_map(|i| {
        let two = two.clone();
        (i..n).map(move |j| {
            let c = if i == j {
                a.get(i, i).clone()
            } else {
                &two * a.get(i, j)
            };
            (MultiIndex::pair(n, i, j), c)
        })
    });
    Polynomial::from_terms(n, terms).expect("indices built with matching dimension")
}

/// `M_d(y)` with entry `y_{α+β}`.
pub fn moment_matrix(y: &MomentSequence, d: usize) -> Result<SymMatrixQ> {
    localizing_matrix(&Polynomial::one(y.n()), y, d)
}

/// `M_d(f y)`; requires moments up to degree `2d + deg f`.
pub fn localizing_matrix(f: &Polynomial, y: &MomentSequence, d: usize) -> Result<SymMatrixQ> {
    if f.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: y.n(),
            found: f.n(),
        });
    }
    y.require_degree(2 * d + f.degree())?;
    let basis = Arc::new(IndexBasis::new(y.n(), d)?);
    let terms: Vec<_> = f.terms().collect();
    let m = SymMatrixQ::from_fn(basis.len(), |i, j| {
        let ab = basis.get(i).add(basis.get(j));
        let mut entry = BigRational::zero();
        for (gamma, c) in &terms {
            let moment = y.get(&ab.add(gamma)).expect("degree checked above");
            entry += *c * moment;
        }
        entry
    });
    Ok(m.with_basis(basis))
}

/// `z = f·y`, covering degrees up to `y.max_degree - deg f`.
pub fn shifted_sequence(f: &Polynomial, y: &MomentSequence) -> Result<MomentSequence> {
    if f.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: y.n(),
            found: f.n(),
        });
    }
    let max_degree = y
        .max_degree()
        .checked_sub(f.degree())
        .ok_or(Error::InsufficientDegree {
            required: f.degree(),
            available: y.max_degree(),
        })?;
    let terms: Vec<_> = f.terms().collect();
    MomentSequence::from_fn(
        y.n(),
        max_degree,
        MeasureDescriptor::Shifted {
            base: Box::new(y.descriptor().clone()),
        },
        |alpha| {
            let mut z = BigRational::zero();
            for (gamma, c) in &terms {
                z += *c * y.get(&alpha.add(gamma)).expect("degree checked above");
            }
            z
        },
    )
}
