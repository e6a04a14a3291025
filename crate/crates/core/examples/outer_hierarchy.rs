//! Walks the outer hierarchy for a matrix just outside the copositive cone.
//! It only gets rejected at a fairly high level.

use copos::outer::{hierarchy_scan, DEFAULT_BAND};
use copos::rational::parse_rational;
use copos::{exact_2x2, MomentSequence, SymMatrixQ};

fn main() -> copos::Result<()> {
    let a = SymMatrixQ::from_abc(
        parse_rational("1")?,
        parse_rational("-1.05")?,
        parse_rational("1")?,
    );
    println!("exact test: {}", exact_2x2(&a)?.copositive.as_str());
    let d_max = 9;
    for y in [
        MomentSequence::exponential(2, 2 * d_max + 2)?,
        MomentSequence::simplex(2, 2 * d_max + 2)?,
    ] {
        let report = hierarchy_scan(&a, d_max, &y, DEFAULT_BAND)?;
        println!("measure: {}", y.descriptor());
        for v in &report.verdicts {
            println!(
                "  d = {}  min_eig = {:+.3e}  {}",
                v.level, v.min_eigenvalue, v.decision
            );
        }
        println!("  {}", report.summary());
    }
    Ok(())
}
