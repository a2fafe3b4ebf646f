use std::fmt::Write;

use super::CoverageLp;

/// Numeric field of at most 12 characters.
fn number(v: f64) -> String {
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    for prec in (1..=6).rev() {
        let s = format!("{v:.prec$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{v:.0e}")
}

fn entry(out: &mut String, column: &str, row: &str, value: f64) {
    let _ = writeln!(out, "    {column:<8}  {row:<8}  {:>12}", number(value));
}

/// Rows `C<i>`: `sum_j alpha(i,j) X<j> - PMIN >= 0`; row `MASS`: `sum_j X<j> = 1`.
/// The objective minimizes `-PMIN`.
pub(super) fn render(lp: &CoverageLp<'_>) -> String {
    let n = lp.num_states();
    let alpha = lp.alpha();
    let mut out = String::new();
    out.push_str("NAME          COVERAGE\nROWS\n N  OBJ\n");
    for i in 0..n {
        let _ = writeln!(out, " G  C{}", i + 1);
    }
    out.push_str(" E  MASS\nCOLUMNS\n");
    for j in 0..n {
        let col = format!("X{}", j + 1);
        for i in 0..n {
            let a = alpha.get(i, j);
            if a != 0.0 {
                entry(&mut out, &col, &format!("C{}", i + 1), a);
            }
        }
        entry(&mut out, &col, "MASS", 1.0);
    }
    entry(&mut out, "PMIN", "OBJ", -1.0);
    for i in 0..n {
        entry(&mut out, "PMIN", &format!("C{}", i + 1), -1.0);
    }
    out.push_str("RHS\n");
    entry(&mut out, "RHS", "MASS", 1.0);
    out.push_str("BOUNDS\n");
    if lp.floor() > 0.0 {
        for j in 0..n {
            let _ = writeln!(
                out,
                " LO BND       {:<8}  {:>12}",
                format!("X{}", j + 1),
                number(lp.floor())
            );
        }
    }
    out.push_str(" FR BND       PMIN\nENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::AlphaMatrix;
    use crate::lp::build_lp;

    #[test]
    fn numbers_fit_the_field() {
        for v in [1.0, -1.0, 0.25, 1.0 / 13.0, -1e-10 / 3.0, 123456.789] {
            assert!(number(v).len() <= 12, "{v}");
            let back: f64 = number(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-5 * v.abs());
        }
    }

    #[test]
    fn identity_layout() {
        let alpha = AlphaMatrix::identity(2);
        let text = build_lp(&alpha, Some(0.1)).unwrap().to_mps();
        let expected = "\
NAME          COVERAGE
ROWS
 N  OBJ
 G  C1
 G  C2
 E  MASS
COLUMNS
    X1        C1                   1
    X1        MASS                 1
    X2        C2                   1
    X2        MASS                 1
    PMIN      OBJ                 -1
    PMIN      C1                  -1
    PMIN      C2                  -1
RHS
    RHS       MASS                 1
BOUNDS
 LO BND       X1                 0.1
 LO BND       X2                 0.1
 FR BND       PMIN
ENDATA
";
        assert_eq!(text, expected);
    }
}
