// The invariant potential u(z) = sum_k (|gamma^k z|^2 - 1), its invariance,
// its Levi form, and the orbit sum of Green functions.

use orbitlens::automorphism::{DiscMoebius, Generator, SiegelAffine};
use orbitlens::domain::{ComplexVector, C64};
use orbitlens::potential::{green_orbit_potential, invariant_u, levi_report, LeviProbe};
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let mut out = String::new();
    let g = Generator::Siegel(SiegelAffine::dilation(2, 1.0, 1.5)?);
    let z = ComplexVector::new(vec![C64::new(0.3, 0.1), C64::new(0.2, -0.2)])?;
    let u0 = invariant_u(&g, &z, 2000)?;
    let u1 = invariant_u(&g, &g.apply(&z)?, 2000)?;
    let _ = writeln!(
        out,
        "u(z) = {:.9}, u(gamma z) = {:.9}, tail bound {:.2e}",
        u0.value, u1.value, u0.tail_bound
    );

    let dil = Generator::Siegel(SiegelAffine::dilation(2, 2.0, 0.0)?);
    let u = |p: &ComplexVector| invariant_u(&dil, p, 60).map(|x| x.value);
    let levi = levi_report(&u, &z, &LeviProbe::standard(2), 1e-6)?;
    let _ = writeln!(
        out,
        "dilation: smallest Levi eigenvalue {:.6} (half step {:.6})",
        levi.min_eigen, levi.min_eigen_half_step
    );

    let disc = Generator::Disc(DiscMoebius::new(
        C64::new(1.5, 0.0),
        C64::new(1.25f64.sqrt(), 0.0),
    )?);
    let a = ComplexVector::new(vec![C64::new(0.1, 0.2)])?;
    let w = ComplexVector::new(vec![C64::new(-0.3, 0.1)])?;
    let gp = green_orbit_potential(&disc, &a, &w, 200)?;
    let _ = writeln!(
        out,
        "disc: sum of Green functions {:.9}, tail bound {:.2e}",
        gp.value, gp.tail_bound
    );
    let pole = green_orbit_potential(&disc, &a, &disc.apply(&a)?, 200)?;
    let _ = writeln!(out, "on the orbit of the pole: {}", pole.value);
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("potentials"));
}
