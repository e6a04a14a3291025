//! Sparse polynomials with exact rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::indexing::{IndexBasis, MultiIndex};
use crate::measures::MomentSequence;

/// `Σ f_α x^α`, stored sparsely with no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        Self::monomial(MultiIndex::zero(n), c)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigRational::one())
    }

    pub fn monomial(alpha: MultiIndex, c: BigRational) -> Self {
        let mut p = Polynomial::zero(alpha.n());
        p.add_term(alpha, c);
        p
    }

    /// Sums duplicate exponents and drops zero coefficients.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (MultiIndex, BigRational)>,
    ) -> Result<Self> {
        let mut p = Polynomial::zero(n);
        for (alpha, c) in terms {
            if alpha.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: alpha.n(),
                });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    /// Polynomial whose coefficient vector in `basis` is `coefficients`.
    pub fn from_coefficients(basis: &IndexBasis, coefficients: &[BigRational]) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coefficients.len(),
            });
        }
        Self::from_terms(
            basis.n(),
            basis.iter().cloned().zip(coefficients.iter().cloned()),
        )
    }

    /// Coefficient vector in `basis`; fails if a term lies outside it.
    pub fn coefficients(&self, basis: &IndexBasis) -> Result<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); basis.len()];
        for (alpha, c) in &self.terms {
            let i = basis.position(alpha).ok_or(Error::DegreeTooHigh {
                degree: alpha.degree(),
                bound: basis.degree(),
            })?;
            out[i] = c.clone();
        }
        Ok(out)
    }

    fn add_term(&mut self, alpha: MultiIndex, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest `|α|` in the support (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(MultiIndex::degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> BigRational {
        self.terms
            .get(alpha)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.add_term(alpha.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &BigRational) -> Polynomial {
        if factor.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), c * factor))
                .collect(),
        }
    }

    /// Multiplies by the monomial `x^γ`.
    pub fn shift(&self, gamma: &MultiIndex) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.add(gamma), c.clone()))
                .collect(),
        }
    }

    /// `g^2` by sparse self-convolution.
    pub fn square(&self) -> Polynomial {
        let terms: Vec<_> = self.terms.iter().collect();
        let mut out = Polynomial::zero(self.n);
        let two = BigRational::from_integer(2.into());
        for (k, (a, ca)) in terms.iter().enumerate() {
            out.add_term(a.doubled(), *ca * *ca);
            for (b, cb) in &terms[k + 1..] {
                out.add_term(a.add(b), &two * *ca * *cb);
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[BigRational]) -> Result<BigRational> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let mut total = BigRational::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (xi, &e) in x.iter().zip(alpha.exponents()) {
                for _ in 0..e {
                    term *= xi;
                }
            }
            total += term;
        }
        Ok(total)
    }
}

impl MomentSequence {
    /// The Riesz functional `L_y(h) = Σ h_α y_α`.
    pub fn apply(&self, h: &Polynomial) -> Result<BigRational> {
        if h.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: h.n(),
            });
        }
        self.require_degree(h.degree())?;
        let mut total = BigRational::zero();
        for (alpha, c) in h.terms() {
            total += c * self.moment(alpha)?;
        }
        Ok(total)
    }
}
