//! Copositivity with respect to a simplicial cone `K = B·R^2_+`, two ways:
//! by congruence onto the orthant, and with moments of the triangle spanned
//! by the origin and the rows of `B`.

use copos::outer::{membership, simplicial_cone_membership, DEFAULT_BAND};
use copos::rational::int;
use copos::{affine_simplex_moments, MomentSequence, SymMatrixQ};

fn main() -> copos::Result<()> {
    // x1 x2 form: copositive on the orthant, not on K
    let a = SymMatrixQ::from_abc(int(0), int(1), int(0));
    let b = vec![vec![int(1), int(0)], vec![int(1), int(-1)]];
    let y = MomentSequence::exponential(2, 4)?;
    for d in 0..=1 {
        let v = simplicial_cone_membership(&a, &b, d, &y, DEFAULT_BAND)?;
        println!(
            "congruence, d = {d}: {} ({:+.3e})",
            v.decision, v.min_eigenvalue
        );
    }

    let triangle = vec![
        vec![int(0), int(0)],
        vec![int(1), int(0)],
        vec![int(1), int(-1)],
    ];
    let z = affine_simplex_moments(&triangle, 4)?;
    for d in 0..=1 {
        let v = membership(&a, d, &z, DEFAULT_BAND)?;
        println!(
            "triangle moments, d = {d}: {} ({:+.3e})",
            v.decision, v.min_eigenvalue
        );
    }
    Ok(())
}
