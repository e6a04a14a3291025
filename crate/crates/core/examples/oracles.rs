//! Reference oracles: the closed-form 2×2 test, the level-1 determinant
//! polynomial and a brute-force simplex grid.

use copos::oracles::evaluate_form;
use copos::rational::{format_rational, parse_rational};
use copos::{det_c1, exact_2x2, grid_copositivity, SymMatrixQ};

fn main() -> copos::Result<()> {
    for (a, b, c) in [("1", "-1", "1"), ("1", "-1.5", "1"), ("2", "-3/4", "-1/8")] {
        let (a, b, c) = (parse_rational(a)?, parse_rational(b)?, parse_rational(c)?);
        let m = SymMatrixQ::from_abc(a.clone(), b.clone(), c.clone());
        let exact = exact_2x2(&m)?;
        print!(
            "({}, {}, {}): {}  det_c1 = {}",
            format_rational(&a),
            format_rational(&b),
            format_rational(&c),
            exact.copositive.as_str(),
            format_rational(&det_c1(&a, &b, &c))
        );
        if let Some(w) = &exact.witness {
            print!(
                "  f_A{:?} = {}",
                w.iter().map(format_rational).collect::<Vec<_>>(),
                format_rational(&evaluate_form(&m, w))
            );
        }
        println!();
    }

    // (x1 - x2 + x3)^2 is PSD, yet the grid can only ever refute
    let horn = SymMatrixQ::from_rows(&[
        vec![
            parse_rational("1")?,
            parse_rational("-1")?,
            parse_rational("1")?,
        ],
        vec![
            parse_rational("-1")?,
            parse_rational("1")?,
            parse_rational("-1")?,
        ],
        vec![
            parse_rational("1")?,
            parse_rational("-1")?,
            parse_rational("1")?,
        ],
    ])?;
    let v = grid_copositivity(&horn, 20)?;
    println!("grid on 3×3: {}", v.copositive.as_str());
    Ok(())
}
