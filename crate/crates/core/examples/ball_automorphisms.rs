// Ball automorphisms U phi_a: composition, inverse, powers and the defect
// identity 1 - |phi_a(z)|^2 = (1 - |a|^2)(1 - |z|^2) / |1 - <z, a>|^2.

use orbitlens::automorphism::{phi, BallMoebius};
use orbitlens::domain::{hermitian_inner, one_minus_sq_norm, ComplexVector, UnitaryMatrix, C64};
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let mut out = String::new();
    let a = ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0)])?;
    let g = BallMoebius::new(
        UnitaryMatrix::diagonal_phases(&[std::f64::consts::PI, 2.5]),
        a.clone(),
    )?;
    let z = ComplexVector::new(vec![C64::new(0.1, -0.3), C64::new(0.2, 0.4)])?;

    let back = g.inverse().apply(&g.apply(&z)?)?;
    let _ = writeln!(out, "inverse round trip error {:.3e}", back.distance(&z));

    let mut iterate = z.clone();
    for _ in 0..5 {
        iterate = g.apply(&iterate)?;
    }
    let _ = writeln!(
        out,
        "g^5 vs iterate {:.3e}",
        g.power(5)?.apply(&z)?.distance(&iterate)
    );

    let lhs = one_minus_sq_norm(&phi(&a, &z)?);
    let rhs = one_minus_sq_norm(&a) * one_minus_sq_norm(&z)
        / (C64::new(1.0, 0.0) - hermitian_inner(&z, &a)?).norm_sqr();
    let _ = writeln!(out, "defect identity residual {:.3e}", (lhs - rhs).abs());

    let class = g.classify(10_000)?;
    let _ = writeln!(
        out,
        "class {:?} with {} boundary fixed points",
        class.kind,
        class.boundary_fixed_points().count()
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("ball example"));
}
