//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use copos::cli;
use copos::indexing::IndexBasis;
use copos::inner::{
    generator_from_poly, generator_from_psd, pairing, DualOptions, DualOutcome, DualProblem,
};
use copos::measures::MomentSequence;
use copos::momentmatrix::{localizing_matrix, moment_matrix, quadratic_form, shifted_sequence};
use copos::oracles::{det_c1, exact_2x2, Copositivity};
use copos::outer::{hierarchy_scan, membership, Decision, DEFAULT_BAND};
use copos::poly::Polynomial;
use copos::rational::{from_f64, int, parse_rational, ratio, to_f64};
use copos::spectra::to_float;
use copos::SymMatrixQ;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

fn abc(a: &BigRational, b: &BigRational, c: &BigRational) -> SymMatrixQ {
    SymMatrixQ::from_abc(a.clone(), b.clone(), c.clone())
}

fn sym3(rows: [[BigRational; 3]; 3]) -> SymMatrixQ {
    SymMatrixQ::from_rows(&rows.map(|r| r.to_vec()).to_vec()).unwrap()
}

/// Level-1 localizing matrix of `[[a,b],[b,c]]` under the exponential measure, written out by hand.
fn displayed_exponential(a: &BigRational, b: &BigRational, c: &BigRational) -> SymMatrixQ {
    let lin = |x: i64, y: i64, z: i64| int(2) * (int(x) * a + int(y) * b + int(z) * c);
    sym3([
        [lin(1, 1, 1), lin(3, 2, 1), lin(1, 2, 3)],
        [lin(3, 2, 1), lin(12, 6, 2), lin(3, 4, 3)],
        [lin(1, 2, 3), lin(3, 4, 3), lin(2, 6, 12)],
    ])
}

/// Same under the uniform simplex measure, with the common `1/360` factor.
fn displayed_simplex(a: &BigRational, b: &BigRational, c: &BigRational) -> SymMatrixQ {
    let lin =
        |k: i64, x: i64, y: i64, z: i64| ratio(k, 360) * (int(x) * a + int(y) * b + int(z) * c);
    sym3([
        [lin(30, 1, 1, 1), lin(6, 3, 2, 1), lin(6, 1, 2, 3)],
        [lin(6, 3, 2, 1), lin(1, 12, 6, 2), lin(1, 3, 4, 3)],
        [lin(6, 1, 2, 3), lin(1, 3, 4, 3), lin(1, 2, 6, 12)],
    ])
}

/// Cofactor expansion along the first row.
fn det3(m: &SymMatrixQ) -> BigRational {
    let e = |i, j| m.get(i, j).clone();
    e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
}

fn unit_triples() -> [[BigRational; 3]; 3] {
    [
        [int(1), int(0), int(0)],
        [int(0), int(1), int(0)],
        [int(0), int(0), int(1)],
    ]
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    ratio(rng.gen_range(-20..=20), rng.gen_range(1..=7))
}

fn random_2x2(rng: &mut ChaCha8Rng) -> SymMatrixQ {
    let mut e = || from_f64(rng.gen_range(-2.0..=2.0)).unwrap();
    let (a, b, c) = (e(), e(), e());
    SymMatrixQ::from_abc(a, b, c)
}

fn frobenius(m: &SymMatrixQ) -> f64 {
    let f = to_float(m, false).unwrap();
    f.frobenius_norm()
}

fn within(limit: Duration, start: Instant) -> Result<f64, String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!(
            "took {:.2} s, limit {:.0} s",
            t.as_secs_f64(),
            limit.as_secs_f64()
        ))
    } else {
        Ok(t.as_secs_f64())
    }
}

fn c1_exponential_matrix() -> Outcome {
    let start = Instant::now();
    let y = MomentSequence::exponential(2, 4).unwrap();
    for [a, b, c] in unit_triples() {
        let m = localizing_matrix(&quadratic_form(&abc(&a, &b, &c)), &y, 1).unwrap();
        if m != displayed_exponential(&a, &b, &c) {
            return Err(format!("mismatch at ({a},{b},{c}): {:?}", m.to_rows()));
        }
    }
    // linearity then gives equality for every (a, b, c); spot-check one general point
    let (a, b, c) = (q("7/3"), q("-1.25"), q("4"));
    let m = localizing_matrix(&quadratic_form(&abc(&a, &b, &c)), &y, 1).unwrap();
    if m != displayed_exponential(&a, &b, &c) {
        return Err("mismatch at a general point".into());
    }
    let t = within(Duration::from_secs(1), start)?;
    Ok(format!("3 coefficient matrices equal exactly ({t:.3} s)"))
}

fn c2_simplex_matrix() -> Outcome {
    let y = MomentSequence::simplex(2, 4).unwrap();
    for [a, b, c] in unit_triples() {
        let m = localizing_matrix(&quadratic_form(&abc(&a, &b, &c)), &y, 1).unwrap();
        if m != displayed_simplex(&a, &b, &c) {
            return Err(format!("mismatch at ({a},{b},{c}): {:?}", m.to_rows()));
        }
    }
    Ok("3 coefficient matrices equal exactly, 1/360 scaling".into())
}

fn c3_determinant_proportionality() -> Outcome {
    let y = MomentSequence::exponential(2, 4).unwrap();
    let (one, zero) = (int(1), int(0));
    let constant = det3(&displayed_exponential(&one, &zero, &zero)) / det_c1(&one, &zero, &zero);
    if constant != int(8) {
        return Err(format!("constant at (1,0,0) is {constant}, expected 8"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let (a, b, c) = (
            random_rational(&mut rng),
            random_rational(&mut rng),
            random_rational(&mut rng),
        );
        let assembled = localizing_matrix(&quadratic_form(&abc(&a, &b, &c)), &y, 1).unwrap();
        let lhs = det3(&assembled);
        if lhs != int(8) * det_c1(&a, &b, &c) || lhs != assembled.determinant() {
            return Err(format!("failed at ({a},{b},{c})"));
        }
    }
    Ok("det = 8 · det_c1 at 10 random rational triples".into())
}

fn c4_generator_formula() -> Outcome {
    let y = MomentSequence::exponential(2, 4).unwrap();
    let basis = IndexBasis::new(2, 1).unwrap();
    let points = [
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
        (1, 1, 0),
        (1, 0, 1),
        (0, 1, 1),
    ];
    for (g00, g10, g01) in points {
        let (g00, g10, g01) = (int(g00), int(g10), int(g01));
        let g = Polynomial::from_coefficients(&basis, &[g00.clone(), g10.clone(), g01.clone()])
            .unwrap();
        let m = generator_from_poly(&g, &y, 1).unwrap();
        let g11 = int(2) * &g00 * &g00
            + int(12) * &g10 * (&g00 + &g01)
            + int(4) * &g01 * (&g00 + &g01)
            + int(24) * &g10 * &g10;
        let g12 = &g00 * &g00
            + int(4) * &g00 * (&g10 + &g01)
            + int(6) * (&g10 * &g10 + &g01 * &g01)
            + int(8) * &g10 * &g01;
        let g22 = int(2) * &g00 * &g00
            + int(4) * &g10 * (&g00 + &g10)
            + int(12) * &g01 * (&g00 + &g10)
            + int(24) * &g01 * &g01;
        if m != SymMatrixQ::from_abc(g11, g12, g22) {
            return Err(format!("mismatch at g = ({g00},{g10},{g01})"));
        }
    }
    Ok("6 evaluation points equal exactly".into())
}

/// Decisions at levels 0..=3 for 1000 seeded matrices under both measures.
fn sweep() -> Vec<(SymMatrixQ, Copositivity, [Vec<Decision>; 2])> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let measures = [
        MomentSequence::exponential(2, 8).unwrap(),
        MomentSequence::simplex(2, 8).unwrap(),
    ];
    (0..1000)
        .map(|_| {
            let a = random_2x2(&mut rng);
            let oracle = exact_2x2(&a).unwrap().copositive;
            let decisions = measures.clone().map(|y| {
                (0..=3)
                    .map(|d| membership(&a, d, &y, DEFAULT_BAND).unwrap().decision)
                    .collect()
            });
            (a, oracle, decisions)
        })
        .collect()
}

fn c5_soundness(
    results: &[(SymMatrixQ, Copositivity, [Vec<Decision>; 2])],
    elapsed: f64,
) -> Outcome {
    let copositive = results.iter().filter(|r| r.1 == Copositivity::Yes).count();
    let bad = results
        .iter()
        .filter(|(_, oracle, ds)| {
            *oracle == Copositivity::Yes && ds.iter().flatten().any(|d| *d == Decision::Rejected)
        })
        .count();
    if bad > 0 {
        return Err(format!("{bad} copositive matrices rejected"));
    }
    if elapsed > 30.0 {
        return Err(format!("took {elapsed:.2} s, limit 30 s"));
    }
    Ok(format!(
        "0 of {copositive} copositive matrices rejected at d ≤ 3, both measures ({elapsed:.2} s)"
    ))
}

fn c6_nesting(results: &[(SymMatrixQ, Copositivity, [Vec<Decision>; 2])]) -> Outcome {
    let mut violations = 0;
    let mut rejected_somewhere = 0;
    for (_, _, ds) in results {
        for levels in ds {
            if let Some(first) = levels.iter().position(|d| *d == Decision::Rejected) {
                rejected_somewhere += 1;
                if levels[first..].iter().any(|d| *d != Decision::Rejected) {
                    violations += 1;
                }
            }
        }
    }
    if violations > 0 {
        return Err(format!("{violations} non-monotone sequences"));
    }
    Ok(format!(
        "0 violations across {rejected_somewhere} rejecting sequences"
    ))
}

fn c7_measure_parity() -> Outcome {
    let e = MomentSequence::exponential(2, 4).unwrap();
    let s = MomentSequence::simplex(2, 4).unwrap();
    let (lo, step) = (q("-1.5"), q("3/40"));
    let (mut compared, mut skipped) = (0, 0);
    for i in 0..41 {
        for j in 0..41 {
            let a = &lo + &step * int(i);
            let b = &lo + &step * int(j);
            let m = abc(&a, &b, &int(1));
            let de = membership(&m, 1, &e, DEFAULT_BAND).unwrap().decision;
            let ds = membership(&m, 1, &s, DEFAULT_BAND).unwrap().decision;
            if de == Decision::Undetermined || ds == Decision::Undetermined {
                skipped += 1;
            } else if de != ds {
                return Err(format!("disagreement at (a,b) = ({a},{b}): {de} vs {ds}"));
            } else {
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{compared} points agree, {skipped} in the undetermined band"
    ))
}

fn c8_convergence_probe() -> Outcome {
    const BOUND: usize = 9;
    let a = abc(&int(1), &q("-1.05"), &int(1));
    if exact_2x2(&a).unwrap().copositive != Copositivity::No {
        return Err("oracle should reject".into());
    }
    let mut found = Vec::new();
    for y in [
        MomentSequence::exponential(2, 2 * BOUND + 2).unwrap(),
        MomentSequence::simplex(2, 2 * BOUND + 2).unwrap(),
    ] {
        let report = hierarchy_scan(&a, BOUND, &y, DEFAULT_BAND).map_err(|e| e.to_string())?;
        match report.first_rejection {
            Some(d) => found.push(format!("{} at d = {d}", y.descriptor())),
            None => {
                return Err(format!(
                    "{}: no rejection up to d = {BOUND}",
                    y.descriptor()
                ))
            }
        }
    }
    Ok(format!(
        "first rejection {} (bound {BOUND})",
        found.join(", ")
    ))
}

fn c9_duality_pairing() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        [
            "copos", "sample", "--level", "1", "--seed", "9", "--count", "200",
        ],
        &mut out,
        &mut err,
    );
    if code != 0 {
        return Err(format!(
            "sample exited {code}: {}",
            String::from_utf8_lossy(&err)
        ));
    }
    let samples: Vec<SymMatrixQ> = String::from_utf8(out)
        .unwrap()
        .lines()
        .map(|line| {
            serde_json::from_str::<cli::MatrixFile>(line)
                .unwrap()
                .to_matrix()
                .unwrap()
        })
        .collect();
    if samples.len() != 200 {
        return Err(format!("expected 200 samples, got {}", samples.len()));
    }
    let y = MomentSequence::exponential(2, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let mut worst = f64::INFINITY;
    for g in &samples {
        let a = loop {
            let a = random_2x2(&mut rng);
            if membership(&a, 1, &y, DEFAULT_BAND).unwrap().decision == Decision::Member {
                break a;
            }
        };
        let p = pairing(&a, g).unwrap();
        let bound = 1e-8 * frobenius(&a) * frobenius(g);
        let value = to_f64(&p).unwrap();
        if value < -bound {
            return Err(format!("trace(AG) = {value:e} below -{bound:e}"));
        }
        worst = worst.min(value / (frobenius(&a) * frobenius(g)));
    }
    Ok(format!("200 pairs, min normalized trace(AG) = {worst:.3e}"))
}

fn c10_dual_round_trip() -> Outcome {
    let start = Instant::now();
    let y = MomentSequence::exponential(2, 4).unwrap();
    let basis = IndexBasis::new(2, 1).unwrap();
    let problem = DualProblem::new(&y, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    let mut max_iter = 0;
    for k in 0..50 {
        let coeffs: Vec<BigRational> = (0..3).map(|_| random_rational(&mut rng)).collect();
        if coeffs.iter().all(Zero::is_zero) {
            continue;
        }
        let g = Polynomial::from_coefficients(&basis, &coeffs).unwrap();
        let exact = generator_from_poly(&g, &y, 1).unwrap();
        let target = to_float(&exact, false).unwrap();
        let cert = match problem.solve(&target, DualOptions::default()).unwrap() {
            DualOutcome::Member(c) => c,
            DualOutcome::Undetermined { residual, .. } => {
                return Err(format!(
                    "sample {k}: no certificate (residual {residual:e})"
                ))
            }
        };
        max_iter = max_iter.max(cert.iterations);
        let back = generator_from_psd(&cert.x, &y, 1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let t = target.get(i, j);
                let rel = (back.get(i, j) - t).abs() / t.abs();
                worst = worst.max(rel);
                if !(rel <= 1e-6) {
                    return Err(format!(
                        "sample {k}: entry ({i},{j}) relative error {rel:e}"
                    ));
                }
            }
        }
    }
    let t = within(Duration::from_secs(60), start)?;
    Ok(format!("50 certificates, worst entrywise relative error {worst:.2e}, ≤ {max_iter} iterations ({t:.2} s)"))
}

fn c11_slice_geometry() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("slice.csv");
    let path_s = path.to_str().unwrap();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = [
        "copos",
        "scan",
        "--c",
        "1",
        "--range=-1.5:1.5",
        "--step",
        "0.05",
        "--level",
        "1",
        "--out",
        path_s,
    ];
    let code = cli::run(args, &mut out, &mut err);
    if code != 0 {
        return Err(format!(
            "scan exited {code}: {}",
            String::from_utf8_lossy(&err)
        ));
    }
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    if lines.next() != Some("a,b,c,d_level,min_eig,verdict,oracle_verdict") {
        return Err("unexpected header".into());
    }
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    if rows.len() != 3721 {
        return Err(format!("{} rows, expected 3721", rows.len()));
    }
    let member = rows.iter().filter(|r| r[5] == "member").count();
    let copositive = rows.iter().filter(|r| r[6] == "yes").count();
    let escaped = rows
        .iter()
        .filter(|r| r[6] == "yes" && r[5] != "member")
        .count();
    if escaped > 0 || member <= copositive {
        return Err(format!(
            "member {member}, copositive {copositive}, copositive but not member {escaped}"
        ));
    }
    let at = |a: f64, b: f64| {
        rows.iter()
            .find(|r| r[0].parse::<f64>().unwrap() == a && r[1].parse::<f64>().unwrap() == b)
            .map(|r| (r[5], r[6]))
    };
    if at(1.0, 0.0) != Some(("member", "yes")) {
        return Err(format!("(1,0): {:?}", at(1.0, 0.0)));
    }
    if at(-1.0, 0.0) != Some(("rejected", "no")) {
        return Err(format!("(-1,0): {:?}", at(-1.0, 0.0)));
    }
    Ok(format!(
        "{member} member rows ⊋ {copositive} copositive rows; (1,0) inside, (-1,0) outside"
    ))
}

fn c12_localizing_is_moment_matrix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in 0..20 {
        let n = rng.gen_range(1..=3);
        let d = rng.gen_range(0..=2);
        let a = SymMatrixQ::from_fn(n, |_, _| random_rational(&mut rng));
        let f = quadratic_form(&a);
        let y = if k % 2 == 0 {
            MomentSequence::exponential(n, 2 * d + 2).unwrap()
        } else {
            MomentSequence::simplex(n, 2 * d + 2).unwrap()
        };
        let lhs = moment_matrix(&shifted_sequence(&f, &y).unwrap(), d).unwrap();
        if lhs != localizing_matrix(&f, &y, d).unwrap() || (lhs.is_zero() && !a.is_zero()) {
            return Err(format!("form {k} (n = {n}, d = {d}) differs"));
        }
    }
    Ok("20 random forms equal exactly".into())
}

fn main() {
    let sweep_start = Instant::now();
    let results = sweep();
    let sweep_time = sweep_start.elapsed().as_secs_f64();

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "exponential level-1 localizing matrix",
            Box::new(c1_exponential_matrix),
        ),
        (
            "simplex level-1 localizing matrix",
            Box::new(c2_simplex_matrix),
        ),
        (
            "determinant proportionality",
            Box::new(c3_determinant_proportionality),
        ),
        ("level-1 generator formula", Box::new(c4_generator_formula)),
        (
            "soundness sweep",
            Box::new(|| c5_soundness(&results, sweep_time)),
        ),
        ("nesting", Box::new(|| c6_nesting(&results))),
        ("measure parity", Box::new(c7_measure_parity)),
        ("convergence probe", Box::new(c8_convergence_probe)),
        ("duality pairing", Box::new(c9_duality_pairing)),
        ("dual round trip", Box::new(c10_dual_round_trip)),
        ("slice geometry", Box::new(c11_slice_geometry)),
        (
            "localizing as moment matrix",
            Box::new(c12_localizing_is_moment_matrix),
        ),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
