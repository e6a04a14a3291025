//! Command-line front end: `check`, `dual`, `sample`, `scan` and `moments`.
//!
//! [`run`] parses arguments, writes to the given streams and returns the
//! process exit code, so the binary is a one-line wrapper.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexing::IndexBasis;
use crate::inner::{dual_membership, generator_from_poly, DualMethod, DualOptions, DualOutcome};
use crate::measures::{affine_simplex_moments, load_moments, MomentSequence};
use crate::oracles::Copositivity;
use crate::outer::{
    format_g17, hierarchy_scan_with, slice_scan_2x2, write_slice_csv, Decision, GridAxis,
    MembershipOptions, Scaling,
};
use crate::poly::Polynomial;
use crate::rational::{format_rational, parse_rational};
use crate::spectra::to_float;
use crate::symmetric::SymMatrixQ;

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_UNDETERMINED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NUMERICAL: i32 = 70;

/// `exponential`, `simplex` or `file:PATH`.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureArg {
    Exponential,
    Simplex,
    File(PathBuf),
}

impl FromStr for MeasureArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exponential" => Ok(MeasureArg::Exponential),
            "simplex" => Ok(MeasureArg::Simplex),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(MeasureArg::File(PathBuf::from(path))),
                _ => Err(format!(
                    "unknown measure {s:?}; expected exponential, simplex or file:PATH"
                )),
            },
        }
    }
}

impl MeasureArg {
    /// Moments in `n` variables up to `degree`.
    pub fn sequence(&self, n: usize, degree: usize) -> Result<MomentSequence> {
        match self {
            MeasureArg::Exponential => MomentSequence::exponential(n, degree),
            MeasureArg::Simplex => MomentSequence::simplex(n, degree),
            MeasureArg::File(path) => {
                let y = load_moments(path)?;
                if y.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: y.n(),
                    });
                }
                y.require_degree(degree)?;
                Ok(y)
            }
        }
    }
}

/// `{"n": int, "entries": [[strings]]}`; entries are decimals or `p/q`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &SymMatrixQ) -> Self {
        MatrixFile {
            n: m.size(),
            entries: m
                .to_rows()
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<SymMatrixQ> {
        if self.n == 0 {
            return Err(Error::ZeroDimension);
        }
        if self.entries.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.entries.len(),
            });
        }
        let rows = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        SymMatrixQ::from_rows(&rows)
    }
}

pub fn read_matrix(path: &Path) -> Result<SymMatrixQ> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))?;
    file.to_matrix()
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn nonnegative_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be a nonnegative finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn rational_arg(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn positive_rational(s: &str) -> std::result::Result<BigRational, String> {
    let q = rational_arg(s)?;
    if q > BigRational::from_integer(0.into()) {
        Ok(q)
    } else {
        Err("must be positive".into())
    }
}

/// `LO:HI`.
fn range_arg(s: &str) -> std::result::Result<(BigRational, BigRational), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let (lo, hi) = (rational_arg(lo)?, rational_arg(hi)?);
    if hi < lo {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

/// Comma-separated rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalList(pub Vec<BigRational>);

fn rational_list(s: &str) -> std::result::Result<RationalList, String> {
    s.split(',')
        .map(|t| rational_arg(t.trim()))
        .collect::<std::result::Result<_, _>>()
        .map(RationalList)
}

/// Vertices separated by `;`, coordinates by `,`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexList(pub Vec<Vec<BigRational>>);

fn vertex_list(s: &str) -> std::result::Result<VertexList, String> {
    s.split(';')
        .map(|v| rational_list(v).map(|l| l.0))
        .collect::<std::result::Result<_, _>>()
        .map(VertexList)
}

fn scaling_arg(s: &str) -> std::result::Result<Scaling, String> {
    match s {
        "moment-diagonal" => Ok(Scaling::MomentDiagonal),
        "max-entry" => Ok(Scaling::MaxEntry),
        _ => Err("expected moment-diagonal or max-entry".into()),
    }
}

fn method_arg(s: &str) -> std::result::Result<DualMethod, String> {
    match s {
        "newton" => Ok(DualMethod::Newton),
        "alternating-projections" => Ok(DualMethod::AlternatingProjections),
        _ => Err("expected newton or alternating-projections".into()),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "copos",
    version,
    about = "Moment hierarchies for copositive and completely positive matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test A ∈ C_d for d = 0..=LEVEL and report the first rejection.
    Check(CheckArgs),
    /// Search for a certificate of A ∈ C*_d.
    Dual(DualArgs),
    /// Emit random generators of C*_d as JSON lines.
    Sample(SampleArgs),
    /// Scan the (a, b) plane of [[a, b], [b, c]] and write CSV.
    Scan(ScanArgs),
    /// Write a moment file.
    Moments(MomentsArgs),
}

#[derive(Debug, Args)]
pub struct MeasureOpt {
    /// exponential, simplex or file:PATH
    #[arg(long, default_value = "exponential")]
    pub measure: MeasureArg,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub level: usize,
    #[command(flatten)]
    pub measure: MeasureOpt,
    #[arg(long, default_value_t = crate::outer::DEFAULT_BAND, value_parser = nonnegative_f64)]
    pub band: f64,
    /// moment-diagonal or max-entry
    #[arg(long, default_value = "moment-diagonal", value_parser = scaling_arg)]
    pub scaling: Scaling,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[command(flatten)]
    pub measure: MeasureOpt,
    #[arg(long, default_value_t = crate::inner::DEFAULT_TOL, value_parser = positive_f64)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::inner::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// newton or alternating-projections.
    #[arg(long, default_value = "newton", value_parser = method_arg)]
    pub method: DualMethod,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[command(flatten)]
    pub measure: MeasureOpt,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Fixed coefficients of g in graded-lex order (e.g. 1,1,1) instead of random ones.
    #[arg(long, value_parser = rational_list, allow_hyphen_values = true)]
    pub g: Option<RationalList>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, default_value = "1", value_parser = rational_arg, allow_hyphen_values = true)]
    pub c: BigRational,
    /// LO:HI for both a and b.
    #[arg(long, default_value = "-1.5:1.5", value_parser = range_arg, allow_hyphen_values = true)]
    pub range: (BigRational, BigRational),
    #[arg(long, default_value = "0.05", value_parser = positive_rational, allow_hyphen_values = true)]
    pub step: BigRational,
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    #[command(flatten)]
    pub measure: MeasureOpt,
    #[arg(long, default_value_t = crate::outer::DEFAULT_BAND, value_parser = nonnegative_f64)]
    pub band: f64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub measure: MeasureOpt,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    /// Vertices v0;v1;...;vn of a simplex, e.g. "0,0;1,0;1,1". Overrides --measure.
    #[arg(long, value_parser = vertex_list, allow_hyphen_values = true)]
    pub k_base: Option<VertexList>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotSymmetric { .. } | Error::InvalidArgument(_) => EXIT_USAGE,
        Error::NonConvergence { .. } | Error::Inconsistent(_) | Error::NonFinite => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_ACCEPT
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Check(a) => cmd_check(&a, out),
        Command::Dual(a) => cmd_dual(&a, out),
        Command::Sample(a) => cmd_sample(&a, out),
        Command::Scan(a) => cmd_scan(&a, out),
        Command::Moments(a) => cmd_moments(&a, out),
    }
}

fn io(path: &str) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(Path::new(path), e)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let a = read_matrix(&args.matrix)?;
    let y = args
        .measure
        .measure
        .sequence(a.size(), 2 * args.level + 2)?;
    let opts = MembershipOptions {
        band: args.band,
        scaling: args.scaling,
        ..Default::default()
    };
    let report = hierarchy_scan_with(&a, args.level, &y, &opts)?;
    let w = io("<stdout>");
    writeln!(out, "measure: {}", y.descriptor()).map_err(&w)?;
    for v in &report.verdicts {
        write!(
            out,
            "d = {}  min_eig = {}  {}",
            v.level,
            format_g17(v.min_eigenvalue),
            v.decision
        )
        .map_err(&w)?;
        if let Some(diag) = &v.diagnostic {
            write!(out, "  ({diag})").map_err(&w)?;
        }
        writeln!(out).map_err(&w)?;
    }
    writeln!(out, "{}", report.summary()).map_err(&w)?;
    Ok(if report.first_rejection.is_some() {
        EXIT_REJECT
    } else if report.all_undetermined() {
        EXIT_UNDETERMINED
    } else {
        EXIT_ACCEPT
    })
}

pub fn cmd_dual(args: &DualArgs, out: &mut dyn Write) -> Result<i32> {
    let a = read_matrix(&args.matrix)?;
    let y = args
        .measure
        .measure
        .sequence(a.size(), 2 * args.level + 2)?;
    let af = to_float(&a, false)?;
    let opts = DualOptions {
        tol: args.tol,
        max_iter: args.max_iter,
        method: args.method,
    };
    let w = io("<stdout>");
    match dual_membership(&af, args.level, &y, opts)? {
        DualOutcome::Member(cert) => {
            let json = cert.to_json();
            match &args.out {
                Some(path) => {
                    let mut f = create(path)?;
                    writeln!(f, "{json}")
                        .and_then(|_| f.flush())
                        .map_err(|e| Error::io(path, e))?;
                    writeln!(
                        out,
                        "member at d = {} (residual {:e}, {} iterations)",
                        cert.d, cert.residual, cert.iterations
                    )
                    .map_err(&w)?;
                }
                None => writeln!(out, "{json}").map_err(&w)?,
            }
            Ok(EXIT_ACCEPT)
        }
        DualOutcome::Undetermined {
            iterations,
            residual,
        } => {
            writeln!(
                out,
                "undetermined after {iterations} iterations (residual {residual:e})"
            )
            .map_err(&w)?;
            Ok(EXIT_UNDETERMINED)
        }
    }
}

#[derive(Serialize)]
struct SampleRecord {
    n: usize,
    d: usize,
    measure: String,
    /// Coefficients of g in the graded-lex basis of degree ≤ d.
    g: Vec<String>,
    entries: Vec<Vec<String>>,
}

/// Random rational `p/q` with `|p| ≤ 9`, `1 ≤ q ≤ 4`.
fn random_coefficient(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(
        rng.gen_range(-9i64..=9).into(),
        rng.gen_range(1i64..=4).into(),
    )
}

pub fn cmd_sample(args: &SampleArgs, out: &mut dyn Write) -> Result<i32> {
    let basis = IndexBasis::new(args.n, args.level)?;
    let y = args.measure.measure.sequence(args.n, 2 * args.level + 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let count = if args.g.is_some() { 1 } else { args.count };
    let w = io("<stdout>");
    for _ in 0..count {
        let coeffs = match &args.g {
            Some(g) => g.0.clone(),
            None => (0..basis.len())
                .map(|_| random_coefficient(&mut rng))
                .collect(),
        };
        let g = Polynomial::from_coefficients(&basis, &coeffs)?;
        let m = generator_from_poly(&g, &y, args.level)?;
        let record = SampleRecord {
            n: args.n,
            d: args.level,
            measure: y.descriptor().to_string(),
            g: coeffs.iter().map(format_rational).collect(),
            entries: MatrixFile::from_matrix(&m).entries,
        };
        let line = serde_json::to_string(&record)?;
        writeln!(out, "{line}").map_err(&w)?;
    }
    Ok(EXIT_ACCEPT)
}

pub fn cmd_scan(args: &ScanArgs, out: &mut dyn Write) -> Result<i32> {
    let (lo, hi) = args.range.clone();
    let axis = GridAxis::new(lo, hi, args.step.clone())?;
    let y = args.measure.measure.sequence(2, 2 * args.level + 2)?;
    let rows = slice_scan_2x2(&axis, &axis, &args.c, args.level, &y, args.band)?;
    match &args.out {
        Some(path) => {
            let mut f = create(path)?;
            write_slice_csv(&rows, &mut f)
                .and_then(|_| f.flush())
                .map_err(|e| Error::io(path, e))?;
            let count = |d: Decision| rows.iter().filter(|r| r.verdict == d).count();
            let copositive = rows
                .iter()
                .filter(|r| r.oracle == Copositivity::Yes)
                .count();
            writeln!(
                out,
                "{} rows: {} member, {} rejected, {} undetermined; {} copositive",
                rows.len(),
                count(Decision::Member),
                count(Decision::Rejected),
                count(Decision::Undetermined),
                copositive
            )
            .map_err(io("<stdout>"))?;
        }
        None => write_slice_csv(&rows, out).map_err(io("<stdout>"))?,
    }
    Ok(EXIT_ACCEPT)
}

pub fn cmd_moments(args: &MomentsArgs, out: &mut dyn Write) -> Result<i32> {
    let y = match &args.k_base {
        Some(vertices) => affine_simplex_moments(&vertices.0, args.max_degree)?,
        None => args
            .measure
            .measure
            .sequence(args.n, args.max_degree)?
            .truncated(args.max_degree)?,
    };
    let json = y.to_json();
    match &args.out {
        Some(path) => {
            let mut f = create(path)?;
            writeln!(f, "{json}")
                .and_then(|_| f.flush())
                .map_err(|e| Error::io(path, e))?;
        }
        None => writeln!(out, "{json}").map_err(io("<stdout>"))?,
    }
    Ok(EXIT_ACCEPT)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("copos").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn measure_argument() {
        assert_eq!(
            "simplex".parse::<MeasureArg>().unwrap(),
            MeasureArg::Simplex
        );
        assert_eq!(
            "file:m.json".parse::<MeasureArg>().unwrap(),
            MeasureArg::File("m.json".into())
        );
        assert!("file:".parse::<MeasureArg>().is_err());
        assert!("gaussian".parse::<MeasureArg>().is_err());
    }

    #[test]
    fn range_argument() {
        let (lo, hi) = range_arg("-1.5:1.5").unwrap();
        assert_eq!(lo, parse_rational("-3/2").unwrap());
        assert_eq!(hi, parse_rational("3/2").unwrap());
        assert!(range_arg("1:0").is_err());
        assert!(range_arg("1").is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["scan", "--step", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["scan", "--step=-0.1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["dual", "m.json", "--tol", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            run_args(&["check", "m.json", "--measure", "gaussian"]).0,
            EXIT_USAGE
        );
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("check"));
    }

    #[test]
    fn sample_fixed_g() {
        let (code, out, _) = run_args(&["sample", "--level", "1", "--g", "1,1,1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(
            v["entries"],
            serde_json::json!([["58", "29"], ["29", "58"]])
        );
        assert_eq!(v["g"], serde_json::json!(["1", "1", "1"]));
    }

    #[test]
    fn sample_wrong_g_length() {
        assert_eq!(run_args(&["sample", "--g", "1,1"]).0, EXIT_DATA);
    }

    #[test]
    fn matrix_file_round_trip() {
        let m = SymMatrixQ::from_abc(
            parse_rational("1").unwrap(),
            parse_rational("-1.5").unwrap(),
            parse_rational("1/3").unwrap(),
        );
        let f = MatrixFile::from_matrix(&m);
        assert_eq!(f.entries[0][1], "-3/2");
        assert_eq!(f.to_matrix().unwrap(), m);
        let bad = MatrixFile {
            n: 3,
            entries: f.entries.clone(),
        };
        assert!(bad.to_matrix().is_err());
    }
}
