//! Floating-point stage: conversion of exact matrices and symmetric eigensolving.
//!
//! Eigenvalues come from a cyclic Jacobi iteration with a fixed row-by-row
//! sweep order, so results are bit-for-bit reproducible on one platform.
//! Iteration stops once the Frobenius norm of the off-diagonal part drops
//! below `tol · ‖M‖_F`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::to_f64;
use crate::symmetric::SymMatrixQ;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Dense symmetric `f64` matrix. `scale` is the positive factor the entries
/// were divided by during conversion (1 when no normalization happened,
/// `+inf` when the factor is beyond the `f64` range).
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrixF {
    size: usize,
    data: Vec<f64>,
    scale: f64,
}

impl SymMatrixF {
    pub fn zeros(size: usize) -> Self {
        SymMatrixF {
            size,
            data: vec![0.0; size * size],
            scale: 1.0,
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size);
        for i in 0..size {
            m.data[i * size + i] = 1.0;
        }
        m
    }

    /// Builds from rows; entries must be finite and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::DimensionMismatch {
                    expected: size,
                    found: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
            data.extend_from_slice(row);
        }
        for i in 0..size {
            for j in i + 1..size {
                if data[i * size + j] != data[j * size + i] {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        upper: data[i * size + j].to_string(),
                        lower: data[j * size + i].to_string(),
                    });
                }
            }
        }
        Ok(SymMatrixF {
            size,
            data,
            scale: 1.0,
        })
    }

    /// Builds from the upper triangle `f(i, j)`, `i <= j`, mirrored below.
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            for j in i..size {
                let v = f(i, j);
                data[i * size + j] = v;
                data[j * size + i] = v;
            }
        }
        SymMatrixF {
            size,
            data,
            scale: 1.0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.size.max(1))
            .map(<[f64]>::to_vec)
            .take(self.size)
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.size).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `trace(A B)`.
    pub fn dot(&self, other: &SymMatrixF) -> f64 {
        debug_assert_eq!(self.size, other.size);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &SymMatrixF) -> Result<SymMatrixF> {
        if self.size != other.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(SymMatrixF {
            size: self.size,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            scale: self.scale,
        })
    }

    pub fn scaled(&self, factor: f64) -> SymMatrixF {
        SymMatrixF {
            size: self.size,
            data: self.data.iter().map(|x| x * factor).collect(),
            scale: self.scale,
        }
    }

    /// `v vᵀ`.
    pub fn outer(v: &[f64]) -> SymMatrixF {
        SymMatrixF::from_fn(v.len(), |i, j| v[i] * v[j])
    }
}

/// Converts to `f64`, optionally dividing by the largest absolute entry
/// first. The division is done exactly, so normalized entries lie in `[-1, 1]`.
pub fn to_float(m: &SymMatrixQ, normalize: bool) -> Result<SymMatrixF> {
    let n = m.size();
    let max = m.max_abs();
    let (divisor, scale) = if normalize && !max.is_zero() {
        // the factor itself may exceed the f64 range even though entries do not
        let scale = to_f64(&max).unwrap_or(f64::INFINITY);
        (Some(max), scale)
    } else {
        (None, 1.0)
    };
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let entry = match &divisor {
                Some(d) => to_f64(&(m.get(i, j) / d)),
                None => to_f64(m.get(i, j)),
            }
            .ok_or(Error::NonFinite)?;
            data[i * n + j] = entry;
            data[j * n + i] = entry;
        }
    }
    Ok(SymMatrixF {
        size: n,
        data,
        scale,
    })
}

/// Converts `D^{-1/2} M D^{-1/2}` with `D = diag(weights)` to `f64`, then
/// normalizes by the largest absolute entry.
///
/// Positive diagonal congruence preserves the inertia of `M`, so the sign of
/// every eigenvalue is unchanged. Each entry is formed as
/// `sign(m_ij) · sqrt(m_ij² / (w_i w_j))` from an exact rational, which keeps
/// the per-entry error at a few ulps regardless of how large the weights are.
pub fn to_float_balanced(m: &SymMatrixQ, weights: &[BigRational]) -> Result<SymMatrixF> {
    let n = m.size();
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_positive()) {
        return Err(Error::InvalidArgument(
            "balancing weights must be positive".into(),
        ));
    }
    let mut out = SymMatrixF::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mij = m.get(i, j);
            let magnitude = if mij.is_zero() {
                0.0
            } else {
                let ratio = (mij * mij) / (&weights[i] * &weights[j]);
                to_f64(&ratio).ok_or(Error::NonFinite)?.sqrt()
            };
            let v = if mij.is_negative() {
                -magnitude
            } else {
                magnitude
            };
            out.data[i * n + j] = v;
            out.data[j * n + i] = v;
        }
    }
    let max = out.max_abs();
    if max > 0.0 {
        for x in &mut out.data {
            *x /= max;
        }
        out.scale = max;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct JacobiOptions {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            tol: DEFAULT_TOLERANCE,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Achieved `‖offdiag‖_F / ‖M‖_F`.
    pub off_diagonal_residual: f64,
    /// Number of full sweeps performed.
    pub iterations: usize,
}

impl SpectralResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Eigenvalues (ascending) with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub spectrum: SpectralResult,
    /// `vectors[k]` is the unit eigenvector for `spectrum.eigenvalues[k]`.
    pub vectors: Vec<Vec<f64>>,
}

fn jacobi(m: &SymMatrixF, opts: JacobiOptions, with_vectors: bool) -> Result<EigenDecomposition> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let n = m.size;
    let mut a = m.data.clone();
    let mut v = if with_vectors {
        SymMatrixF::identity(n).data
    } else {
        Vec::new()
    };
    let norm = m.frobenius_norm();
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += a[p * n + q] * a[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    let residual = loop {
        let off = off_norm(&a);
        let residual = if norm > 0.0 { off / norm } else { 0.0 };
        if residual <= opts.tol {
            break residual;
        }
        if sweeps == opts.max_sweeps {
            return Err(Error::NonConvergence { sweeps, residual });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if with_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = if with_vectors {
        order
            .iter()
            .map(|&col| (0..n).map(|k| v[k * n + col]).collect())
            .collect()
    } else {
        Vec::new()
    };
    Ok(EigenDecomposition {
        spectrum: SpectralResult {
            eigenvalues,
            off_diagonal_residual: residual,
            iterations: sweeps,
        },
        vectors,
    })
}

/// Full spectrum of `m`; the smallest eigenvalue is `result.min()`.
pub fn min_eigenvalue(m: &SymMatrixF, tol: f64) -> Result<SpectralResult> {
    eigenvalues(
        m,
        JacobiOptions {
            tol,
            ..JacobiOptions::default()
        },
    )
}

pub fn eigenvalues(m: &SymMatrixF, opts: JacobiOptions) -> Result<SpectralResult> {
    jacobi(m, opts, false).map(|e| e.spectrum)
}

pub fn eigen_decomposition(m: &SymMatrixF, opts: JacobiOptions) -> Result<EigenDecomposition> {
    jacobi(m, opts, true)
}

/// Nearest PSD matrix in Frobenius norm: clamps negative eigenvalues to zero.
pub fn psd_projection(m: &SymMatrixF) -> Result<SymMatrixF> {
    psd_projection_with(m, JacobiOptions::default())
}

pub fn psd_projection_with(m: &SymMatrixF, opts: JacobiOptions) -> Result<SymMatrixF> {
    let eig = eigen_decomposition(m, opts)?;
    let n = m.size;
    let kept: Vec<(f64, &Vec<f64>)> = eig
        .spectrum
        .eigenvalues
        .iter()
        .zip(&eig.vectors)
        .filter(|(l, _)| **l > 0.0)
        .map(|(l, v)| (*l, v))
        .collect();
    let out = SymMatrixF::from_fn(n, |i, j| kept.iter().map(|(l, v)| l * v[i] * v[j]).sum());
    Ok(out.with_scale(m.scale))
}
