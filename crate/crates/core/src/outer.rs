//! Membership in the outer cones `C_d = { A : M_d(f_A y) ⪰ 0 }`.
//!
//! Each level is one exact assembly followed by one smallest-eigenvalue
//! computation. A negative eigenvalue beyond the decision band certifies
//! `A ∉ C_d ⊇ C`, so `A` is not copositive. A positive one only says `A ∈ C_d`.

use std::fmt;
use std::io::Write;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::indexing::IndexBasis;
use crate::measures::{MeasureDescriptor, MomentSequence};
use crate::momentmatrix::{localizing_matrix, quadratic_form};
use crate::oracles::{exact_2x2, Copositivity};
use crate::rational::to_f64;
use crate::spectra::{eigenvalues, to_float, to_float_balanced, JacobiOptions, SymMatrixF};
use crate::symmetric::SymMatrixQ;

pub const DEFAULT_BAND: f64 = 1e-9;
pub const DEFAULT_MAX_LEVEL: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Member,
    Rejected,
    Undetermined,
}

impl Decision {
    pub fn classify(min_eigenvalue: f64, band: f64) -> Decision {
        if min_eigenvalue > band {
            Decision::Member
        } else if min_eigenvalue < -band {
            Decision::Rejected
        } else {
            Decision::Undetermined
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Member => "member",
            Decision::Rejected => "rejected",
            Decision::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the exact localizing matrix is brought to `f64` before the eigensolve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scaling {
    /// `D^{-1/2} M D^{-1/2}` with `D_αα = y_{2α}`, then divided by the largest
    /// entry. Falls back to `MaxEntry` when some `y_{2α} ≤ 0`, which only
    /// happens for sequences that do not come from a measure.
    #[default]
    MomentDiagonal,
    /// Divide by the largest absolute entry only.
    MaxEntry,
}

#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    pub band: f64,
    pub scaling: Scaling,
    pub jacobi: JacobiOptions,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        MembershipOptions {
            band: DEFAULT_BAND,
            scaling: Scaling::default(),
            jacobi: JacobiOptions::default(),
        }
    }
}

impl MembershipOptions {
    pub fn with_band(band: f64) -> Self {
        MembershipOptions {
            band,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct MembershipVerdict {
    pub level: usize,
    /// Smallest eigenvalue of the normalized localizing matrix; NaN when the
    /// eigensolver did not converge.
    pub min_eigenvalue: f64,
    pub decision: Decision,
    pub band: f64,
    pub measure: MeasureDescriptor,
    /// Rows of `B` when the verdict is about `K = B·R^n_+`.
    pub cone: Option<Vec<Vec<BigRational>>>,
    pub diagnostic: Option<String>,
}

fn balancing_weights(y: &MomentSequence, basis: &IndexBasis) -> Option<Vec<BigRational>> {
    let w: Vec<BigRational> = basis
        .iter()
        .map(|alpha| {
            y.get(&alpha.doubled())
                .cloned()
                .unwrap_or_else(BigRational::zero)
        })
        .collect();
    w.iter().all(|x| x.is_positive()).then_some(w)
}

/// Normalized float image of `M_d(f_A y)` as used by [`membership_with`].
pub fn normalized_localizing(
    a: &SymMatrixQ,
    d: usize,
    y: &MomentSequence,
    scaling: Scaling,
) -> Result<SymMatrixF> {
    if a.size() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: y.n(),
            found: a.size(),
        });
    }
    let m = localizing_matrix(&quadratic_form(a), y, d)?;
    match scaling {
        Scaling::MomentDiagonal => {
            let basis = IndexBasis::new(y.n(), d)?;
            match balancing_weights(y, &basis) {
                Some(w) => to_float_balanced(&m, &w),
                None => to_float(&m, true),
            }
        }
        Scaling::MaxEntry => to_float(&m, true),
    }
}

pub fn membership(
    a: &SymMatrixQ,
    d: usize,
    y: &MomentSequence,
    band: f64,
) -> Result<MembershipVerdict> {
    membership_with(a, d, y, &MembershipOptions::with_band(band))
}

pub fn membership_with(
    a: &SymMatrixQ,
    d: usize,
    y: &MomentSequence,
    opts: &MembershipOptions,
) -> Result<MembershipVerdict> {
    if !(opts.band >= 0.0) || !opts.band.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "decision band must be nonnegative, got {}",
            opts.band
        )));
    }
    let m = normalized_localizing(a, d, y, opts.scaling)?;
    let (min_eigenvalue, decision, diagnostic) = match eigenvalues(&m, opts.jacobi) {
        Ok(spectrum) => {
            let min = spectrum.min();
            (min, Decision::classify(min, opts.band), None)
        }
        Err(err @ Error::NonConvergence { .. }) => {
            (f64::NAN, Decision::Undetermined, Some(err.to_string()))
        }
        Err(err) => return Err(err),
    };
    Ok(MembershipVerdict {
        level: d,
        min_eigenvalue,
        decision,
        band: opts.band,
        measure: y.descriptor().clone(),
        cone: None,
        diagnostic,
    })
}

#[derive(Clone, Debug)]
pub struct HierarchyReport {
    pub verdicts: Vec<MembershipVerdict>,
    pub first_rejection: Option<usize>,
}

impl HierarchyReport {
    pub fn max_level(&self) -> usize {
        self.verdicts.last().map_or(0, |v| v.level)
    }

    pub fn all_undetermined(&self) -> bool {
        self.verdicts
            .iter()
            .all(|v| v.decision == Decision::Undetermined)
    }

    pub fn summary(&self) -> String {
        match self.first_rejection {
            Some(d) => format!("first rejection at d = {d}"),
            None => format!("no rejection up to d = {}", self.max_level()),
        }
    }
}

pub fn hierarchy_scan(
    a: &SymMatrixQ,
    d_max: usize,
    y: &MomentSequence,
    band: f64,
) -> Result<HierarchyReport> {
    hierarchy_scan_with(a, d_max, y, &MembershipOptions::with_band(band))
}

/// Levels `0..=d_max`. Fails with [`Error::Inconsistent`] if a level after
/// the first rejection does not reject as well.
pub fn hierarchy_scan_with(
    a: &SymMatrixQ,
    d_max: usize,
    y: &MomentSequence,
    opts: &MembershipOptions,
) -> Result<HierarchyReport> {
    y.require_degree(2 * d_max + 2)?;
    let mut verdicts = Vec::with_capacity(d_max + 1);
    let mut first_rejection = None;
    for d in 0..=d_max {
        let v = membership_with(a, d, y, opts)?;
        match (first_rejection, v.decision) {
            (None, Decision::Rejected) => first_rejection = Some(d),
            (Some(r), decision) if decision != Decision::Rejected => {
                return Err(Error::Inconsistent(format!(
                    "rejected at d = {r} but {decision} at d = {d} (min eigenvalue {:e})",
                    v.min_eigenvalue
                )));
            }
            _ => {}
        }
        verdicts.push(v);
    }
    Ok(HierarchyReport {
        verdicts,
        first_rejection,
    })
}

/// `A ∈ C_d` for the cone `K = B·R^n_+`, tested as `Bᵀ A B ∈ C_d`.
pub fn simplicial_cone_membership(
    a: &SymMatrixQ,
    b: &[Vec<BigRational>],
    d: usize,
    y: &MomentSequence,
    band: f64,
) -> Result<MembershipVerdict> {
    let transformed = a.congruence(b)?;
    if crate::rational::determinant(b).is_zero() {
        return Err(Error::SingularBasis);
    }
    let mut v = membership(&transformed, d, y, band)?;
    v.cone = Some(b.to_vec());
    Ok(v)
}

/// Inclusive arithmetic progression `lo, lo + step, …` not exceeding `hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub lo: BigRational,
    pub hi: BigRational,
    pub step: BigRational,
}

impl GridAxis {
    pub fn new(lo: BigRational, hi: BigRational, step: BigRational) -> Result<Self> {
        if !step.is_positive() {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        if hi < lo {
            return Err(Error::InvalidArgument("grid range is empty".into()));
        }
        Ok(GridAxis { lo, hi, step })
    }

    pub fn len(&self) -> usize {
        let count = ((&self.hi - &self.lo) / &self.step).floor().to_integer();
        count.to_usize().expect("grid too large") + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> BigRational {
        &self.lo + &self.step * BigRational::from_integer(i.into())
    }

    pub fn points(&self) -> Vec<BigRational> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SliceRow {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub level: usize,
    pub min_eigenvalue: f64,
    pub verdict: Decision,
    pub oracle: Copositivity,
}

/// Tests `[[a, b], [b, c]]` for every `(a, b)` on the grid with `c` fixed.
/// Rows come out with `a` varying slowest.
pub fn slice_scan_2x2(
    a_axis: &GridAxis,
    b_axis: &GridAxis,
    c: &BigRational,
    d: usize,
    y: &MomentSequence,
    band: f64,
) -> Result<Vec<SliceRow>> {
    if y.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: y.n(),
        });
    }
    y.require_degree(2 * d + 2)?;
    let a_points = a_axis.points();
    let b_points = b_axis.points();
    let nb = b_points.len();
    (0..a_points.len() * nb)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (&a_points[k / nb], &b_points[k % nb]);
            let m = SymMatrixQ::from_abc(a.clone(), b.clone(), c.clone());
            let v = membership(&m, d, y, band)?;
            Ok(SliceRow {
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
                level: d,
                min_eigenvalue: v.min_eigenvalue,
                verdict: v.decision,
                oracle: exact_2x2(&m)?.copositive,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "a,b,c,d_level,min_eig,verdict,oracle_verdict";

/// `%.17g`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let strip = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-4..17).contains(&exp) {
        strip(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip(mantissa.to_string()), sign, exp.abs())
    }
}

pub fn write_slice_csv<W: Write>(rows: &[SliceRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let g = |q: &BigRational| format_g17(to_f64(q).unwrap_or(f64::NAN));
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            g(&r.a),
            g(&r.b),
            g(&r.c),
            r.level,
            format_g17(r.min_eigenvalue),
            r.verdict,
            r.oracle.as_str()
        )?;
    }
    Ok(())
}
