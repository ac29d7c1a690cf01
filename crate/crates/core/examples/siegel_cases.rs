// Sorts Siegel-domain generators into the convergence case table and
// compares the closed-form verdict with the numeric tail fit.

use orbitlens::automorphism::{Generator, SiegelAffine};
use orbitlens::domain::{ComplexVector, UnitaryMatrix, C64};
use orbitlens::series::{closed_form_verdict, poincare_series, TermForm};
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let a = || ComplexVector::new(vec![C64::new(0.5, 0.2)]);
    let gens = [
        ("dilation", SiegelAffine::dilation(2, 2.0, 1.0)?),
        ("translation", SiegelAffine::dilation(2, 1.0, 2.0)?),
        (
            "heisenberg",
            SiegelAffine::new(1.0, 0.3, a()?, UnitaryMatrix::identity(1))?,
        ),
        (
            "rotated, theta = 1",
            SiegelAffine::new(1.0, 0.3, a()?, UnitaryMatrix::diagonal_phases(&[1.0]))?,
        ),
        (
            "rotated, theta = pi",
            SiegelAffine::new(
                1.0,
                0.3,
                a()?,
                UnitaryMatrix::diagonal_phases(&[std::f64::consts::PI]),
            )?,
        ),
    ];
    let mut out = String::new();
    for (name, g) in gens {
        let g = Generator::Siegel(g);
        let (case, verdict) = closed_form_verdict(&g)?;
        let rep = poincare_series(&g, &ComplexVector::zeros(2), 1.0, TermForm::Gap, 10_000)?;
        let _ = writeln!(
            out,
            "{name:>20}: {case:?} closed form {verdict:?}, numeric {:?}, slope {}",
            rep.numeric_verdict,
            rep.tail_exponent.map_or("-".into(), |s| format!("{s:.3}")),
        );
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("case table"));
}
