//! Exact moment sequences of the reference measures.
//!
//! Two measures with support equal to the nonnegative orthant (or a base of
//! it) are built in: the product of unit exponentials on `R^n_+`, with
//! `y_α = ∏ α_i!`, and Lebesgue measure on the simplex
//! `{x ≥ 0, Σ x_i ≤ 1}`, with `y_α = ∏ α_i! / (n + |α|)!`. The simplex
//! moments are the raw Lebesgue ones (total mass `1/n!`); positive scaling
//! does not change any cone membership decision.
//!
//! For a polyhedral cone `K` the caller can supply Lebesgue moments of any
//! simplex via [`affine_simplex_moments`], or an arbitrary sequence through
//! the JSON moment file format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::{IndexBasis, MultiIndex};
use crate::rational::{determinant, factorial, format_rational, parse_rational};

/// Where a moment sequence came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasureDescriptor {
    Exponential,
    Simplex,
    AffineSimplex {
        vertices: Vec<Vec<BigRational>>,
    },
    External {
        source: PathBuf,
    },
    /// `z = f·y` for a polynomial `f` and a base sequence `y`.
    Shifted {
        base: Box<MeasureDescriptor>,
    },
}

impl fmt::Display for MeasureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureDescriptor::Exponential => write!(f, "exponential"),
            MeasureDescriptor::Simplex => write!(f, "simplex"),
            MeasureDescriptor::AffineSimplex { vertices } => {
                write!(f, "affine-simplex[")?;
                for (k, v) in vertices.iter().enumerate() {
                    if k > 0 {
                        write!(f, ";")?;
                    }
                    let coords: Vec<String> = v.iter().map(format_rational).collect();
                    write!(f, "{}", coords.join(","))?;
                }
                write!(f, "]")
            }
            MeasureDescriptor::External { source } => write!(f, "file:{}", source.display()),
            MeasureDescriptor::Shifted { base } => write!(f, "shifted({base})"),
        }
    }
}

/// Moments `y_α` for every `|α| ≤ max_degree`, stored in graded-lex order.
#[derive(Clone, Debug)]
pub struct MomentSequence {
    basis: IndexBasis,
    values: Vec<BigRational>,
    descriptor: MeasureDescriptor,
}

impl PartialEq for MomentSequence {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.max_degree() == other.max_degree()
            && self.values == other.values
    }
}

impl MomentSequence {
    /// Builds a sequence by evaluating `moment` at every index of degree at most `max_degree`.
    pub fn from_fn(
        n: usize,
        max_degree: usize,
        descriptor: MeasureDescriptor,
        moment: impl Fn(&MultiIndex) -> BigRational,
    ) -> Result<Self> {
        let basis = IndexBasis::new(n, max_degree)?;
        let values = basis.iter().map(moment).collect();
        Ok(MomentSequence {
            basis,
            values,
            descriptor,
        })
    }

    /// Builds a sequence from explicit values; every index up to `max_degree`
    /// must be present and no index above it may appear.
    pub fn from_values(
        n: usize,
        max_degree: usize,
        descriptor: MeasureDescriptor,
        mut values: HashMap<MultiIndex, BigRational>,
    ) -> Result<Self> {
        let basis = IndexBasis::new(n, max_degree)?;
        let mut ordered = Vec::with_capacity(basis.len());
        for alpha in &basis {
            match values.remove(alpha) {
                Some(v) => ordered.push(v),
                None => {
                    return Err(Error::Schema(format!(
                        "missing moment for alpha {alpha:?} (max_degree {max_degree})"
                    )))
                }
            }
        }
        if let Some(extra) = values.keys().next() {
            return Err(Error::Schema(format!(
                "moment for alpha {extra:?} lies outside n = {n}, max_degree = {max_degree}"
            )));
        }
        Ok(MomentSequence {
            basis,
            values: ordered,
            descriptor,
        })
    }

    pub fn exponential(n: usize, max_degree: usize) -> Result<Self> {
        Self::from_fn(
            n,
            max_degree,
            MeasureDescriptor::Exponential,
            exponential_moment,
        )
    }

    pub fn simplex(n: usize, max_degree: usize) -> Result<Self> {
        Self::from_fn(n, max_degree, MeasureDescriptor::Simplex, simplex_moment)
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn max_degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn descriptor(&self) -> &MeasureDescriptor {
        &self.descriptor
    }

    pub fn basis(&self) -> &IndexBasis {
        &self.basis
    }

    /// `y_α`, or `None` when `|α|` exceeds the covered degree.
    pub fn get(&self, alpha: &MultiIndex) -> Option<&BigRational> {
        self.basis.position(alpha).map(|i| &self.values[i])
    }

    /// `y_α`, failing with [`Error::InsufficientDegree`] when not covered.
    pub fn moment(&self, alpha: &MultiIndex) -> Result<&BigRational> {
        if alpha.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: alpha.n(),
            });
        }
        self.get(alpha).ok_or(Error::InsufficientDegree {
            required: alpha.degree(),
            available: self.max_degree(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &BigRational)> {
        self.basis.iter().zip(&self.values)
    }

    /// Fails unless the sequence covers moments up to `degree`.
    pub fn require_degree(&self, degree: usize) -> Result<()> {
        if self.max_degree() < degree {
            Err(Error::InsufficientDegree {
                required: degree,
                available: self.max_degree(),
            })
        } else {
            Ok(())
        }
    }

    /// Restriction to moments of degree at most `max_degree`.
    pub fn truncated(&self, max_degree: usize) -> Result<Self> {
        self.require_degree(max_degree)?;
        let basis = IndexBasis::new(self.n(), max_degree)?;
        let values = self.values[..basis.len()].to_vec();
        Ok(MomentSequence {
            basis,
            values,
            descriptor: self.descriptor.clone(),
        })
    }

    pub fn with_descriptor(mut self, descriptor: MeasureDescriptor) -> Self {
        self.descriptor = descriptor;
        self
    }

    pub fn to_file(&self) -> MomentFile {
        MomentFile {
            n: self.n(),
            max_degree: self.max_degree(),
            moments: self
                .iter()
                .map(|(alpha, value)| MomentEntry {
                    alpha: alpha.exponents().to_vec(),
                    value: format_rational(value),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("moment file serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn from_file(file: MomentFile, descriptor: MeasureDescriptor) -> Result<Self> {
        if file.n == 0 {
            return Err(Error::Schema("n must be positive".into()));
        }
        let mut values = HashMap::with_capacity(file.moments.len());
        for entry in file.moments {
            if entry.alpha.len() != file.n {
                return Err(Error::Schema(format!(
                    "alpha {:?} has length {}, expected n = {}",
                    entry.alpha,
                    entry.alpha.len(),
                    file.n
                )));
            }
            let value = parse_rational(&entry.value)?;
            let alpha = MultiIndex::new(entry.alpha);
            if let Some(previous) = values.insert(alpha.clone(), value) {
                if &previous != values.get(&alpha).unwrap() {
                    return Err(Error::Schema(format!(
                        "conflicting values for alpha {alpha:?}"
                    )));
                }
            }
        }
        Self::from_values(file.n, file.max_degree, descriptor, values)
    }

    pub fn from_json(text: &str, descriptor: MeasureDescriptor) -> Result<Self> {
        let file: MomentFile = serde_json::from_str(text)
            .map_err(|e| Error::Schema(format!("malformed moment file: {e}")))?;
        Self::from_file(file, descriptor)
    }
}

/// On-disk moment file: `{"n", "max_degree", "moments": [{"alpha", "value"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentFile {
    pub n: usize,
    pub max_degree: usize,
    pub moments: Vec<MomentEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentEntry {
    pub alpha: Vec<u32>,
    pub value: String,
}

/// Reads a moment file; values are parsed exactly from their rational strings.
pub fn load_moments(path: impl AsRef<Path>) -> Result<MomentSequence> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MomentSequence::from_json(
        &text,
        MeasureDescriptor::External {
            source: path.to_path_buf(),
        },
    )
}

fn factorial_product(alpha: &MultiIndex) -> BigInt {
    alpha
        .exponents()
        .iter()
        .fold(BigInt::one(), |acc, &a| acc * factorial(a))
}

/// `∏ α_i!`, the moments of `n` i.i.d. unit exponentials.
pub fn exponential_moment(alpha: &MultiIndex) -> BigRational {
    BigRational::from_integer(factorial_product(alpha))
}

/// `∏ α_i! / (n + |α|)!`, the Lebesgue moments of the standard simplex in `R^n`.
pub fn simplex_moment(alpha: &MultiIndex) -> BigRational {
    BigRational::new(
        factorial_product(alpha),
        factorial((alpha.n() + alpha.degree()) as u32),
    )
}

/// Lebesgue moments of the simplex `conv{v_0, ..., v_n}`.
///
/// Substitutes `x = v_0 + E λ` with edge matrix `E = [v_1 - v_0, ..., v_n - v_0]`,
/// expands each monomial `x^α` as a polynomial in `λ`, integrates it over
/// the standard simplex and multiplies by `|det E|`.
pub fn affine_simplex_moments(
    vertices: &[Vec<BigRational>],
    max_degree: usize,
) -> Result<MomentSequence> {
    let n = vertices.len().checked_sub(1).ok_or(Error::ZeroDimension)?;
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    for v in vertices {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: v.len(),
            });
        }
    }
    let origin = &vertices[0];
    // edges[i][k] = (v_{k+1} - v_0)_i
    let edges: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (1..=n).map(|k| &vertices[k][i] - &origin[i]).collect())
        .collect();
    let volume_factor = determinant(&edges).abs();
    if volume_factor.is_zero() {
        return Err(Error::DegenerateSimplex);
    }

    // x_i as an affine polynomial in λ.
    let coordinate: Vec<LambdaPoly> = (0..n)
        .map(|i| {
            let mut p = LambdaPoly::new();
            add_term(&mut p, MultiIndex::zero(n), origin[i].clone());
            for k in 0..n {
                add_term(&mut p, MultiIndex::unit(n, k), edges[i][k].clone());
            }
            p
        })
        .collect();

    let basis = IndexBasis::new(n, max_degree)?;
    // Graded order guarantees that α - e_i precedes α.
    let mut expansions: Vec<LambdaPoly> = Vec::with_capacity(basis.len());
    let mut values = Vec::with_capacity(basis.len());
    for alpha in &basis {
        let expansion = match alpha.exponents().iter().position(|&e| e > 0) {
            None => {
                let mut one = LambdaPoly::new();
                one.insert(MultiIndex::zero(n), BigRational::one());
                one
            }
            Some(i) => {
                let mut lower = alpha.exponents().to_vec();
                lower[i] -= 1;
                let prev = &expansions[basis.position(&MultiIndex::new(lower)).unwrap()];
                multiply(prev, &coordinate[i])
            }
        };
        let integral: BigRational = expansion
            .iter()
            .map(|(beta, c)| c * simplex_moment(beta))
            .sum();
        values.push(integral * &volume_factor);
        expansions.push(expansion);
    }
    Ok(MomentSequence {
        basis,
        values,
        descriptor: MeasureDescriptor::AffineSimplex {
            vertices: vertices.to_vec(),
        },
    })
}

type LambdaPoly = BTreeMap<MultiIndex, BigRational>;

fn add_term(p: &mut LambdaPoly, alpha: MultiIndex, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(alpha).or_insert_with(BigRational::zero);
    *entry += c;
}

fn multiply(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let mut out = LambdaPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            add_term(&mut out, ea.add(eb), ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}
