//! Multi-indices and graded-lex monomial bases.
//!
//! Rows of every moment and localizing matrix are indexed by an
//! [`IndexBasis`]. The basis for degree `d` is a prefix of the basis for
//! degree `d + 1`, so `M_d` is always the leading principal block of `M_{d+1}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector `α ∈ N^n` with its cached total degree `|α|`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        MultiIndex { exponents, degree }
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex::new(vec![0; n])
    }

    /// `e_i`, the exponent of the monomial `x_i`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        MultiIndex::new(e)
    }

    /// Exponent of `x_i x_j` (which is `x_i^2` when `i == j`).
    pub fn pair(n: usize, i: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[i] += 1;
        e[j] += 1;
        MultiIndex::new(e)
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Exponent of the product of the two monomials.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.n(), other.n());
        MultiIndex {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
            degree: self.degree + other.degree,
        }
    }

    pub fn doubled(&self) -> MultiIndex {
        self.add(self)
    }
}

/// Graded lexicographic: lower total degree first, then larger leading
/// exponents first (`1, x1, x2, x1^2, x1 x2, x2^2, ...`).
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.exponents.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Number of monomials of degree at most `d` in `n` variables, `C(n+d, d)`.
pub fn basis_size(n: usize, d: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    // After step i the accumulator holds C(n+i, i), so each division is exact.
    let mut acc: u128 = 1;
    for i in 1..=d as u128 {
        acc = acc
            .checked_mul(n as u128 + i)
            .ok_or(Error::Overflow("basis size"))?
            / i;
    }
    usize::try_from(acc).map_err(|_| Error::Overflow("basis size"))
}

/// All multi-indices of degree at most `d`, in graded lex order, with an
/// inverse position lookup.
#[derive(Clone, Debug)]
pub struct IndexBasis {
    n: usize,
    d: usize,
    indices: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
}

impl IndexBasis {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        enumerate_basis(n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.positions.get(alpha).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }

    pub fn as_slice(&self) -> &[MultiIndex] {
        &self.indices
    }
}

impl<'a> IntoIterator for &'a IndexBasis {
    type Item = &'a MultiIndex;
    type IntoIter = std::slice::Iter<'a, MultiIndex>;

    fn into_iter(self) -> Self::IntoIter {
        self.indices.iter()
    }
}

/// Enumerates `N^n_d` in graded lex order.
pub fn enumerate_basis(n: usize, d: usize) -> Result<IndexBasis> {
    let size = basis_size(n, d)?;
    let mut indices = Vec::with_capacity(size);
    for k in 0..=d as u32 {
        let mut current = vec![0u32; n];
        push_compositions(k, 0, &mut current, &mut indices);
    }
    debug_assert_eq!(indices.len(), size);
    let positions = indices
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i))
        .collect();
    Ok(IndexBasis {
        n,
        d,
        indices,
        positions,
    })
}

/// All exponent vectors with `|α| == k` (the homogeneous layer), in the same order.
pub fn homogeneous_layer(n: usize, k: usize) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    push_compositions(k as u32, 0, &mut current, &mut out);
    Ok(out)
}

fn push_compositions(
    remaining: u32,
    slot: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<MultiIndex>,
) {
    let n = current.len();
    if slot == n - 1 {
        current[slot] = remaining;
        out.push(MultiIndex::new(current.clone()));
        current[slot] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[slot] = e;
        push_compositions(remaining - e, slot + 1, current, out);
    }
    current[slot] = 0;
}
