//! Independent references for copositivity: the closed-form 2×2 test, the
//! level-1 determinant polynomial, and a brute-force simplex grid search.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::indexing::homogeneous_layer;
use crate::symmetric::SymMatrixQ;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Copositivity {
    Yes,
    No,
    Inconclusive,
}

impl Copositivity {
    pub fn as_str(self) -> &'static str {
        match self {
            Copositivity::Yes => "yes",
            Copositivity::No => "no",
            Copositivity::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleMethod {
    Exact2x2,
    /// Grid `{α/m : |α| = m}` with the smallest form value found.
    Grid {
        resolution: usize,
        min_value: BigRational,
    },
}

/// Oracle answer. A witness is present exactly when the answer is `No`; it
/// lies on the simplex (`x ≥ 0`, `Σ x_i = 1`) and has `xᵀ A x < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleVerdict {
    pub copositive: Copositivity,
    pub witness: Option<Vec<BigRational>>,
    pub method: OracleMethod,
}

pub fn evaluate_form(a: &SymMatrixQ, x: &[BigRational]) -> BigRational {
    let n = a.size();
    let mut total = BigRational::zero();
    for i in 0..n {
        total += a.get(i, i) * &x[i] * &x[i];
        for j in i + 1..n {
            total += BigRational::from_integer(2.into()) * a.get(i, j) * &x[i] * &x[j];
        }
    }
    total
}

/// `[[a, b], [b, c]]` is copositive iff `a, c ≥ 0` and `b + √(ac) ≥ 0`,
/// decided here as `b ≥ 0 or b² ≤ ac` to stay in exact arithmetic.
pub fn exact_2x2(m: &SymMatrixQ) -> Result<OracleVerdict> {
    if m.size() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.size(),
        });
    }
    let (a, b, c) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
    let one = || BigRational::from_integer(1.into());
    let verdict = |witness: Option<Vec<BigRational>>| OracleVerdict {
        copositive: if witness.is_some() {
            Copositivity::No
        } else {
            Copositivity::Yes
        },
        witness,
        method: OracleMethod::Exact2x2,
    };
    if a.is_negative() {
        return Ok(verdict(Some(vec![one(), BigRational::zero()])));
    }
    if c.is_negative() {
        return Ok(verdict(Some(vec![BigRational::zero(), one()])));
    }
    if !b.is_negative() || b * b <= a * c {
        return Ok(verdict(None));
    }
    // Minimize q(t) = f_A(t, 1 - t); here a - 2b + c > 0 and the minimizer lies in (0, 1).
    let t = (c - b) / (a - BigRational::from_integer(2.into()) * b + c);
    let witness = vec![t.clone(), one() - t];
    debug_assert!(evaluate_form(m, &witness).is_negative());
    Ok(verdict(Some(witness)))
}

/// `3a³ + 15a²b + 29a²c + 16ab² + 50abc + 29ac² + 4b³ + 16b²c + 15bc² + 3c³`,
/// which is `det M_1(f_A y) / 8` for the exponential measure.
pub fn det_c1(a: &BigRational, b: &BigRational, c: &BigRational) -> BigRational {
    let k = |v: i64| BigRational::from_integer(v.into());
    k(3) * a * a * a
        + k(15) * a * a * b
        + k(29) * a * a * c
        + k(16) * a * b * b
        + k(50) * a * b * c
        + k(29) * a * c * c
        + k(4) * b * b * b
        + k(16) * b * b * c
        + k(15) * b * c * c
        + k(3) * c * c * c
}

/// Evaluates `f_A` at every grid point `α/m` of the standard simplex.
///
/// A negative value proves `A` is not copositive. Nonnegativity on the grid
/// proves nothing, so the answer is then `Inconclusive`, never `Yes`.
pub fn grid_copositivity(m: &SymMatrixQ, resolution: usize) -> Result<OracleVerdict> {
    if resolution == 0 {
        return Err(Error::InvalidArgument(
            "grid resolution must be at least 1".into(),
        ));
    }
    let n = m.size();
    let denom = BigRational::from_integer(resolution.into());
    let mut best: Option<(BigRational, Vec<BigRational>)> = None;
    for alpha in homogeneous_layer(n, resolution)? {
        let x: Vec<BigRational> = alpha
            .exponents()
            .iter()
            .map(|&e| BigRational::from_integer(e.into()) / &denom)
            .collect();
        let value = evaluate_form(m, &x);
        if best.as_ref().map_or(true, |(v, _)| value < *v) {
            best = Some((value, x));
        }
    }
    let (min_value, point) = best.expect("grid is nonempty");
    let negative = min_value.is_negative();
    Ok(OracleVerdict {
        copositive: if negative {
            Copositivity::No
        } else {
            Copositivity::Inconclusive
        },
        witness: negative.then_some(point),
        method: OracleMethod::Grid {
            resolution,
            min_value,
        },
    })
}
