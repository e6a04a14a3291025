//! Pairs outer-cone members with inner-cone generators. Every pairing is
//! nonnegative.

use copos::indexing::IndexBasis;
use copos::outer::{membership, Decision, DEFAULT_BAND};
use copos::rational::{from_f64, ratio, to_f64};
use copos::{generator_from_poly, pairing, MomentSequence, Polynomial, SymMatrixQ};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> copos::Result<()> {
    let y = MomentSequence::exponential(2, 4)?;
    let basis = IndexBasis::new(2, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut members = Vec::new();
    while members.len() < 5 {
        let mut e = || from_f64(rng.gen_range(-2.0..2.0)).unwrap();
        let a = SymMatrixQ::from_abc(e(), e(), e());
        if membership(&a, 1, &y, DEFAULT_BAND)?.decision == Decision::Member {
            members.push(a);
        }
    }
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let coeffs: Vec<_> = (0..3)
            .map(|_| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
            .collect();
        let g = generator_from_poly(&Polynomial::from_coefficients(&basis, &coeffs)?, &y, 1)?;
        for a in &members {
            worst = worst.min(to_f64(&pairing(a, &g)?).unwrap());
        }
    }
    println!(
        "smallest <A, G> over {} pairs: {worst:.4e}",
        members.len() * 20
    );
    Ok(())
}
