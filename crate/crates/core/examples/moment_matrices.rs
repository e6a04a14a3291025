//! Moment and localizing matrices of a 2×2 quadratic form under both
//! reference measures, in exact arithmetic.

use copos::momentmatrix::{localizing_matrix, moment_matrix, quadratic_form};
use copos::rational::{format_rational, parse_rational};
use copos::{MomentSequence, SymMatrixQ};

fn show(title: &str, m: &SymMatrixQ) {
    println!("{title}:");
    for row in m.to_rows() {
        let cells: Vec<String> = row
            .iter()
            .map(|v| format!("{:>8}", format_rational(v)))
            .collect();
        println!("  [{}]", cells.join(" "));
    }
}

fn main() -> copos::Result<()> {
    let a = SymMatrixQ::from_abc(
        parse_rational("1")?,
        parse_rational("-1/2")?,
        parse_rational("2")?,
    );
    let f = quadratic_form(&a);
    for y in [
        MomentSequence::exponential(2, 4)?,
        MomentSequence::simplex(2, 4)?,
    ] {
        println!("measure: {}", y.descriptor());
        show("M_1(y)", &moment_matrix(&y, 1)?);
        show("M_1(f_A y)", &localizing_matrix(&f, &y, 1)?);
        println!();
    }
    Ok(())
}
