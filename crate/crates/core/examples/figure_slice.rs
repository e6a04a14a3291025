//! The `c = 1` slice of the level-1 outer cone next to the copositive cone.
//! Writes `slice.csv` (or the path given as the first argument) and prints
//! a coarse ASCII picture: `#` both, `+` outer cone only or inside the band,
//! `.` neither.

use copos::outer::{slice_scan_2x2, write_slice_csv, Decision, GridAxis, DEFAULT_BAND};
use copos::rational::{int, parse_rational};
use copos::{Copositivity, MomentSequence};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "slice.csv".into());
    let axis = GridAxis::new(
        parse_rational("-1.5")?,
        parse_rational("1.5")?,
        parse_rational("0.05")?,
    )?;
    let y = MomentSequence::exponential(2, 4)?;
    let rows = slice_scan_2x2(&axis, &axis, &int(1), 1, &y, DEFAULT_BAND)?;
    write_slice_csv(&rows, std::fs::File::create(&path)?)?;
    println!("{} rows written to {path}", rows.len());

    // rows run a-major; print b upward, a rightward, every 4th point
    let n = axis.len();
    for bi in (0..n).rev().step_by(4) {
        let line: String = (0..n)
            .step_by(4)
            .map(|ai| {
                let r = &rows[ai * n + bi];
                match (r.verdict, r.oracle) {
                    (Decision::Member, Copositivity::Yes) => '#',
                    (Decision::Member, _) | (Decision::Undetermined, _) => '+',
                    _ => '.',
                }
            })
            .collect();
        println!("{line}");
    }
    Ok(())
}
