//! Inner-cone generators from squared densities, plus a random mixture
//! recovered by the dual solver.

use copos::indexing::IndexBasis;
use copos::rational::{format_rational, int};
use copos::spectra::to_float;
use copos::{
    dual_membership, generator_from_poly, DualOptions, DualOutcome, MomentSequence, Polynomial,
};

fn main() -> copos::Result<()> {
    let y = MomentSequence::exponential(2, 4)?;
    let basis = IndexBasis::new(2, 1)?;
    let g = Polynomial::from_coefficients(&basis, &[int(1), int(1), int(1)])?;
    let gen = generator_from_poly(&g, &y, 1)?;
    println!("g = 1 + x1 + x2 gives");
    for row in gen.to_rows() {
        println!(
            "  {:?}",
            row.iter().map(format_rational).collect::<Vec<_>>()
        );
    }

    let h = Polynomial::from_coefficients(&basis, &[int(2), int(-3), int(1)])?;
    let sum = gen.add(&generator_from_poly(&h, &y, 1)?)?;
    match dual_membership(&to_float(&sum, false)?, 1, &y, DualOptions::default())? {
        DualOutcome::Member(cert) => {
            println!(
                "mixture certified after {} iterations, residual {:.2e}",
                cert.iterations, cert.residual
            );
            println!("{}", cert.to_json());
        }
        DualOutcome::Undetermined {
            iterations,
            residual,
        } => {
            println!("no certificate after {iterations} iterations (residual {residual:.2e})")
        }
    }
    Ok(())
}
