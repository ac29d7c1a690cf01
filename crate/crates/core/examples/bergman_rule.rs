// Transformation rule of the Bergman kernel of the ball,
// K(z) = |det J_gamma(z)|^2 K(gamma z), and the Jacobian closed form
// against a finite-difference determinant.

use orbitlens::automorphism::BallMoebius;
use orbitlens::domain::{ComplexVector, UnitaryMatrix, C64};
use orbitlens::potential::{bergman_kernel_ball, jacobian_ball, jacobian_fd, rule7_residual};
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let m = BallMoebius::new(
        UnitaryMatrix::diagonal_phases(&[0.3, -1.2]),
        ComplexVector::new(vec![C64::new(0.4, 0.3), C64::new(-0.2, 0.5)])?,
    )?;
    let z = ComplexVector::new(vec![C64::new(0.1, -0.6), C64::new(0.35, 0.2)])?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "K(z) = {:.9}, K(gamma z) = {:.9}",
        bergman_kernel_ball(&z)?,
        bergman_kernel_ball(&m.apply(&z)?)?
    );
    let _ = writeln!(
        out,
        "relative rule residual {:.3e}",
        rule7_residual(&m, &z)?
    );
    let exact = jacobian_ball(&m, &z)?;
    let fd = jacobian_fd(&m, &z, 1e-5)?;
    let _ = writeln!(
        out,
        "|det J| closed form {exact:.12}, finite difference {fd:.12}"
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("bergman"));
}
