//! Inner cones `C*_d`, generated by second moments of `σ dμ` for s.o.s.
//! densities `σ` of degree `2d`.
//!
//! A density `g²` gives the generator `G_ij = L_y(g² x_i x_j)`. A general
//! `σ = Σ_k g_k²` corresponds to a PSD Gram matrix `X` and yields
//! `G_ij = ⟨X, M_d(x_i x_j y)⟩`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::{basis_size, MultiIndex};
use crate::measures::{MeasureDescriptor, MomentSequence};
use crate::momentmatrix::localizing_matrix;
use crate::poly::Polynomial;
use crate::spectra::{
    eigen_decomposition, eigenvalues, psd_projection, to_float, JacobiOptions, SymMatrixF,
};
use crate::symmetric::SymMatrixQ;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 5000;
/// Relative slack allowed below zero when checking that an input `X` is PSD.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// `M_d(x_i x_j y)` for every pair `i ≤ j`, in row-major pair order.
#[derive(Clone, Debug)]
pub struct PairingMatrices {
    pub n: usize,
    pub d: usize,
    pub pairs: Vec<(usize, usize)>,
    pub matrices: Vec<SymMatrixQ>,
}

impl PairingMatrices {
    pub fn get(&self, i: usize, j: usize) -> &SymMatrixQ {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let k = self
            .pairs
            .iter()
            .position(|&p| p == (i, j))
            .expect("pair in range");
        &self.matrices[k]
    }
}

pub fn pairing_matrices(y: &MomentSequence, d: usize) -> Result<PairingMatrices> {
    let n = y.n();
    y.require_degree(2 * d + 2)?;
    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    let mut matrices = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let f = Polynomial::monomial(
                MultiIndex::pair(n, i, j),
                BigRational::from_integer(1.into()),
            );
            pairs.push((i, j));
            matrices.push(localizing_matrix(&f, y, d)?);
        }
    }
    Ok(PairingMatrices {
        n,
        d,
        pairs,
        matrices,
    })
}

/// `G_ij = L_y(g² x_i x_j)`, exact.
pub fn generator_from_poly(g: &Polynomial, y: &MomentSequence, d: usize) -> Result<SymMatrixQ> {
    let n = y.n();
    if g.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.n(),
        });
    }
    if g.degree() > d {
        return Err(Error::DegreeTooHigh {
            degree: g.degree(),
            bound: d,
        });
    }
    y.require_degree(2 * d + 2)?;
    let g2 = g.square();
    let mut out = SymMatrixQ::zeros(n);
    for i in 0..n {
        for j in i..n {
            out.set(i, j, y.apply(&g2.shift(&MultiIndex::pair(n, i, j)))?);
        }
    }
    Ok(out)
}

fn exact_to_f64(m: &SymMatrixQ) -> Result<SymMatrixF> {
    to_float(m, false)
}

fn check_psd(x: &SymMatrixF) -> Result<()> {
    let min = eigenvalues(x, JacobiOptions::default())?.min();
    let norm = x.max_abs().max(1.0);
    if min < -PSD_TOLERANCE * norm {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

/// `G_ij = ⟨X, M_d(x_i x_j y)⟩` for a PSD `X` indexed by the degree-`d` basis.
pub fn generator_from_psd(x: &SymMatrixF, y: &MomentSequence, d: usize) -> Result<SymMatrixF> {
    let mats = pairing_matrices(y, d)?;
    let floats = mats
        .matrices
        .iter()
        .map(exact_to_f64)
        .collect::<Result<Vec<_>>>()?;
    generator_from_psd_with(x, &mats.pairs, mats.n, &floats)
}

fn generator_from_psd_with(
    x: &SymMatrixF,
    pairs: &[(usize, usize)],
    n: usize,
    mats: &[SymMatrixF],
) -> Result<SymMatrixF> {
    let expected = mats.first().map_or(0, SymMatrixF::size);
    if x.size() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: x.size(),
        });
    }
    check_psd(x)?;
    let mut g = vec![vec![0.0; n]; n];
    for (&(i, j), m) in pairs.iter().zip(mats) {
        let v = x.dot(m);
        g[i][j] = v;
        g[j][i] = v;
    }
    SymMatrixF::from_rows(&g)
}

/// `trace(A G)`, exact.
pub fn pairing(a: &SymMatrixQ, g: &SymMatrixQ) -> Result<BigRational> {
    a.trace_product(g)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DualMethod {
    /// Semismooth Newton on the dual of projecting `0` onto the feasible set.
    /// Each step is one PSD projection plus a small linear solve in the
    /// `n(n+1)/2` multipliers.
    #[default]
    Newton,
    /// Alternating projections between the PSD cone and the affine set,
    /// started from `X = 0`.
    AlternatingProjections,
}

#[derive(Clone, Copy, Debug)]
pub struct DualOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: DualMethod,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            method: DualMethod::default(),
        }
    }
}

/// A PSD Gram matrix `X` whose generator reproduces the target matrix.
#[derive(Clone, Debug)]
pub struct SosCertificate {
    pub d: usize,
    pub x: SymMatrixF,
    /// Largest entrywise gap between the re-expanded generator and the target,
    /// relative to the target's largest entry.
    pub residual: f64,
    pub iterations: usize,
    pub measure: MeasureDescriptor,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    d: usize,
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    residual: f64,
}

impl SosCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CertificateFile {
            d: self.d,
            x: self.x.rows(),
            residual: self.residual,
        })
        .expect("certificate serializes")
    }

    /// Reads `{"d", "X", "residual"}`; the measure is supplied by the caller.
    pub fn from_json(text: &str, measure: MeasureDescriptor) -> Result<Self> {
        let file: CertificateFile =
            serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Ok(SosCertificate {
            d: file.d,
            x: SymMatrixF::from_rows(&file.x)?,
            residual: file.residual,
            iterations: 0,
            measure,
        })
    }
}

#[derive(Clone, Debug)]
pub enum DualOutcome {
    Member(SosCertificate),
    /// No certificate found. This does not mean `A ∉ C*_d`.
    Undetermined {
        iterations: usize,
        residual: f64,
    },
}

impl DualOutcome {
    pub fn certificate(&self) -> Option<&SosCertificate> {
        match self {
            DualOutcome::Member(c) => Some(c),
            DualOutcome::Undetermined { .. } => None,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, DualOutcome::Member(_))
    }
}

/// The pairing matrices of one `(n, d, measure)` triple in floating point,
/// scaled to unit Frobenius norm, with the pseudo-inverse of their Gram
/// matrix. Reusable across targets.
#[derive(Clone, Debug)]
pub struct DualProblem {
    n: usize,
    d: usize,
    pairs: Vec<(usize, usize)>,
    mats: Vec<SymMatrixF>,
    unit: Vec<SymMatrixF>,
    norms: Vec<f64>,
    gram_pinv: Vec<Vec<f64>>,
    measure: MeasureDescriptor,
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
fn solve_spd(mut a: Vec<Vec<f64>>, b: &[f64]) -> Option<Vec<f64>> {
    let k = b.len();
    for j in 0..k {
        let mut diag = a[j][j];
        for p in 0..j {
            diag -= a[j][p] * a[j][p];
        }
        if !(diag > 0.0) {
            return None;
        }
        let diag = diag.sqrt();
        a[j][j] = diag;
        for i in j + 1..k {
            let mut v = a[i][j];
            for p in 0..j {
                v -= a[i][p] * a[j][p];
            }
            a[i][j] = v / diag;
        }
    }
    let mut z = b.to_vec();
    for i in 0..k {
        for p in 0..i {
            z[i] -= a[i][p] * z[p];
        }
        z[i] /= a[i][i];
    }
    for i in (0..k).rev() {
        for p in i + 1..k {
            z[i] -= a[p][i] * z[p];
        }
        z[i] /= a[i][i];
    }
    Some(z)
}

impl DualProblem {
    pub fn new(y: &MomentSequence, d: usize) -> Result<Self> {
        let exact = pairing_matrices(y, d)?;
        let mats = exact
            .matrices
            .iter()
            .map(exact_to_f64)
            .collect::<Result<Vec<_>>>()?;
        let norms: Vec<f64> = mats.iter().map(SymMatrixF::frobenius_norm).collect();
        let unit: Vec<SymMatrixF> = mats
            .iter()
            .zip(&norms)
            .map(|(m, nrm)| m.scaled(1.0 / nrm))
            .collect();
        let k = unit.len();
        let gram = SymMatrixF::from_fn(k, |p, q| unit[p].dot(&unit[q]));
        // Gram may be singular (at d = 0 all constraints share one scalar X)
        let eig = eigen_decomposition(&gram, JacobiOptions::default())?;
        let top = eig.spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        let cut = top * 1e-12;
        let mut gram_pinv = vec![vec![0.0; k]; k];
        for (l, v) in eig.spectrum.eigenvalues.iter().zip(&eig.vectors) {
            if *l > cut {
                for p in 0..k {
                    for q in 0..k {
                        gram_pinv[p][q] += v[p] * v[q] / l;
                    }
                }
            }
        }
        Ok(DualProblem {
            n: y.n(),
            d,
            pairs: exact.pairs,
            mats,
            unit,
            norms,
            gram_pinv,
            measure: y.descriptor().clone(),
        })
    }

    pub fn level(&self) -> usize {
        self.d
    }

    pub fn basis_len(&self) -> Result<usize> {
        basis_size(self.n, self.d)
    }

    /// Targets `a_ij / ‖M_ij‖_F` for the unit-norm constraints.
    fn targets(&self, a: &SymMatrixF) -> Vec<f64> {
        self.pairs
            .iter()
            .zip(&self.norms)
            .map(|(&(i, j), nrm)| a.get(i, j) / nrm)
            .collect()
    }

    fn constraint_gap(&self, x: &SymMatrixF, targets: &[f64]) -> Vec<f64> {
        self.unit
            .iter()
            .zip(targets)
            .map(|(m, t)| x.dot(m) - t)
            .collect()
    }

    fn combine(&self, lambda: &[f64]) -> Result<SymMatrixF> {
        let mut z = SymMatrixF::zeros(self.unit[0].size());
        for (m, l) in self.unit.iter().zip(lambda) {
            z = z.add(&m.scaled(*l))?;
        }
        Ok(z)
    }

    fn least_squares_multipliers(&self, gap: &[f64]) -> Vec<f64> {
        self.gram_pinv
            .iter()
            .map(|row| row.iter().zip(gap).map(|(g, r)| g * r).sum())
            .collect()
    }

    /// Least-squares projection onto `{X : ⟨X, M_ij⟩ = a_ij}`.
    fn project_affine(&self, x: &SymMatrixF, targets: &[f64]) -> Result<SymMatrixF> {
        let lambda = self.least_squares_multipliers(&self.constraint_gap(x, targets));
        Ok(x.add(&self.combine(&lambda)?.scaled(-1.0))?)
    }

    pub fn generator(&self, x: &SymMatrixF) -> Result<SymMatrixF> {
        generator_from_psd_with(x, &self.pairs, self.n, &self.mats)
    }

    /// Largest entrywise gap between the generator of `x` and `a`, relative
    /// to `scale`.
    fn verify(&self, x: &SymMatrixF, a: &SymMatrixF, scale: f64) -> Result<f64> {
        let g = self.generator(x)?;
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((g.get(i, j) - a.get(i, j)).abs() / scale);
            }
        }
        Ok(worst)
    }

    /// Searches for a PSD `X` with `⟨X, M_d(x_i x_j y)⟩ = a_ij` for all `i ≤ j`.
    pub fn solve(&self, a: &SymMatrixF, opts: DualOptions) -> Result<DualOutcome> {
        if !(opts.tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                opts.tol
            )));
        }
        if a.size() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.size(),
            });
        }
        let scale = match a.max_abs() {
            m if m > 0.0 => m,
            _ => 1.0,
        };
        let targets = self.targets(a);
        let relative_gap = |x: &SymMatrixF| {
            self.constraint_gap(x, &targets)
                .iter()
                .zip(&self.norms)
                .fold(0.0f64, |acc, (r, nrm)| acc.max((r * nrm).abs()))
                / scale
        };
        let mut accept = |x: SymMatrixF, iterations: usize| -> Result<Option<DualOutcome>> {
            if relative_gap(&x) >= opts.tol {
                return Ok(None);
            }
            // independent re-expansion through the unscaled pairing matrices
            let worst = self.verify(&x, a, scale)?;
            Ok((worst <= 10.0 * opts.tol).then(|| {
                DualOutcome::Member(SosCertificate {
                    d: self.d,
                    x,
                    residual: worst,
                    iterations,
                    measure: self.measure.clone(),
                })
            }))
        };
        match opts.method {
            DualMethod::AlternatingProjections => {
                let mut x = SymMatrixF::zeros(self.basis_len()?);
                for iter in 1..=opts.max_iter {
                    let affine = self.project_affine(&x, &targets)?;
                    x = psd_projection(&affine)?.with_scale(1.0);
                    if let Some(out) = accept(x.clone(), iter)? {
                        return Ok(out);
                    }
                }
                Ok(DualOutcome::Undetermined {
                    iterations: opts.max_iter,
                    residual: relative_gap(&x),
                })
            }
            DualMethod::Newton => self.solve_newton(&targets, opts, &relative_gap, &mut accept),
        }
    }

    /// Minimizes `θ(λ) = ½‖P₊(Σ λ_k M_k)‖² − ⟨b, λ⟩`, whose gradient is the
    /// constraint gap of `X = P₊(Σ λ_k M_k)`. A stationary point makes `X` the
    /// minimum-norm certificate.
    fn solve_newton(
        &self,
        targets: &[f64],
        opts: DualOptions,
        relative_gap: &dyn Fn(&SymMatrixF) -> f64,
        accept: &mut dyn FnMut(SymMatrixF, usize) -> Result<Option<DualOutcome>>,
    ) -> Result<DualOutcome> {
        let k = self.unit.len();
        let s = self.basis_len()?;
        let theta = |lambda: &[f64]| -> Result<f64> {
            let z = self.combine(lambda)?;
            let eig = eigenvalues(&z, JacobiOptions::default())?;
            let norm2: f64 = eig
                .eigenvalues
                .iter()
                .filter(|l| **l > 0.0)
                .map(|l| l * l)
                .sum();
            Ok(0.5 * norm2 - lambda.iter().zip(targets).map(|(l, b)| l * b).sum::<f64>())
        };
        let mut lambda = self.least_squares_multipliers(targets);
        let mut x = SymMatrixF::zeros(s);
        for iter in 1..=opts.max_iter {
            let z = self.combine(&lambda)?;
            let eig = eigen_decomposition(&z, JacobiOptions::default())?;
            let values = &eig.spectrum.eigenvalues;
            let vecs = &eig.vectors;
            x = SymMatrixF::from_fn(s, |i, j| {
                values
                    .iter()
                    .zip(vecs)
                    .filter(|(l, _)| **l > 0.0)
                    .map(|(l, v)| l * v[i] * v[j])
                    .sum()
            });
            if let Some(out) = accept(x.clone(), iter)? {
                return Ok(out);
            }
            let grad = self.constraint_gap(&x, targets);
            // generalized Jacobian of λ ↦ gap: V_kl = ⟨PᵀM_kP, Ω ∘ PᵀM_lP⟩
            let rotated: Vec<Vec<f64>> = self
                .unit
                .iter()
                .map(|m| {
                    let mut h = vec![0.0; s * s];
                    for p in 0..s {
                        for q in 0..s {
                            let mut acc = 0.0;
                            for i in 0..s {
                                for j in 0..s {
                                    acc += vecs[p][i] * m.get(i, j) * vecs[q][j];
                                }
                            }
                            h[p * s + q] = acc;
                        }
                    }
                    h
                })
                .collect();
            let omega = |p: usize, q: usize| {
                let (a, b) = (values[p], values[q]);
                match (a > 0.0, b > 0.0) {
                    (true, true) => 1.0,
                    (false, false) => 0.0,
                    _ => (a.max(0.0) - b.max(0.0)) / (a - b),
                }
            };
            let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            let mu = (1e-6 * grad_norm).max(1e-16);
            let v: Vec<Vec<f64>> = (0..k)
                .map(|r| {
                    (0..k)
                        .map(|c| {
                            let mut acc = 0.0;
                            for p in 0..s {
                                for q in 0..s {
                                    acc +=
                                        rotated[r][p * s + q] * omega(p, q) * rotated[c][p * s + q];
                                }
                            }
                            acc + if r == c { mu } else { 0.0 }
                        })
                        .collect()
                })
                .collect();
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let step = solve_spd(v, &rhs).unwrap_or(rhs);
            let slope: f64 = grad.iter().zip(&step).map(|(g, d)| g * d).sum();
            let base = theta(&lambda)?;
            let mut alpha = 1.0;
            loop {
                let trial: Vec<f64> = lambda
                    .iter()
                    .zip(&step)
                    .map(|(l, d)| l + alpha * d)
                    .collect();
                // near the solution the Armijo decrease drops below the rounding
                // noise of θ, so a full step that shrinks the gradient also counts
                let accepted = theta(&trial)? <= base + 1e-4 * alpha * slope
                    || (alpha == 1.0 && {
                        let next = psd_projection(&self.combine(&trial)?)?;
                        let gap = self.constraint_gap(&next, targets);
                        gap.iter().map(|g| g * g).sum::<f64>().sqrt() < 0.9 * grad_norm
                    });
                if accepted {
                    lambda = trial;
                    break;
                }
                alpha *= 0.5;
                if alpha < 1e-12 {
                    return Ok(DualOutcome::Undetermined {
                        iterations: iter,
                        residual: relative_gap(&x),
                    });
                }
            }
        }
        Ok(DualOutcome::Undetermined {
            iterations: opts.max_iter,
            residual: relative_gap(&x),
        })
    }
}

/// Searches for a certificate of `A ∈ C*_d`. Never concludes `A ∉ C*_d`.
pub fn dual_membership(
    a: &SymMatrixF,
    d: usize,
    y: &MomentSequence,
    opts: DualOptions,
) -> Result<DualOutcome> {
    if a.size() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: y.n(),
            found: a.size(),
        });
    }
    DualProblem::new(y, d)?.solve(a, opts)
}
