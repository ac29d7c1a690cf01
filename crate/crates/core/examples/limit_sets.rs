// Cluster sets of orbits: a loxodromic ball map, a bidisc swap and a
// parabolic Siegel translation.

use orbitlens::automorphism::{BallMoebius, BidiscAuto, DiscMoebius, Generator, SiegelAffine};
use orbitlens::domain::{ComplexVector, UnitaryMatrix, C64};
use orbitlens::orbit::orbit_clusters;
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let ball = BallMoebius::new(
        UnitaryMatrix::diagonal_phases(&[std::f64::consts::PI, 2.5]),
        ComplexVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.0)])?,
    )?;
    let g1 = DiscMoebius::new(C64::new(1.5, 0.0), C64::new(1.25f64.sqrt(), 0.0))?;
    let g2 = DiscMoebius::new(C64::new(2.0, 0.5), C64::new(0.0, 3.25f64.sqrt()))?;
    let gens = [
        ("ball", Generator::Ball(ball)),
        (
            "bidisc swap",
            Generator::Bidisc(BidiscAuto::new(g1, g2, true)),
        ),
        (
            "translation",
            Generator::Siegel(SiegelAffine::dilation(2, 1.0, 2.0)?),
        ),
    ];
    let mut out = String::new();
    for (name, g) in gens {
        let rep = orbit_clusters(&g, &ComplexVector::zeros(g.dim()), 5000)?;
        let _ = writeln!(out, "{name}: {} clusters", rep.clusters.len());
        for c in &rep.clusters {
            let coords: Vec<String> = c
                .point
                .point
                .entries()
                .iter()
                .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                .collect();
            let _ = writeln!(
                out,
                "  ({}) {:?}, {} hits",
                coords.join(", "),
                c.side,
                c.hits
            );
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("clusters"));
}
