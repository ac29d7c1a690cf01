// Partial sums of sum_k (1 - |gamma^k(0)|^2) for the Siegel translation by 2,
// whose value is pi coth pi.

use orbitlens::automorphism::{Generator, SiegelAffine};
use orbitlens::domain::ComplexVector;
use orbitlens::series::{poincare_series, TermForm};
use std::f64::consts::PI;
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let g = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 2.0)?);
    let rep = poincare_series(&g, &ComplexVector::zeros(2), 1.0, TermForm::Defect, 10_000)?;
    let exact = PI / PI.tanh();
    let mut out = String::new();
    for c in &rep.checkpoints {
        let _ = writeln!(
            out,
            "K = {:>5}: {:.9} (gap to pi coth pi {:.3e})",
            c.k,
            c.partial_sum,
            exact - c.partial_sum
        );
    }
    let _ = writeln!(out, "verdict {:?} by {:?}", rep.verdict, rep.method);
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("series"));
}
