// Renders a hyperbolic disc orbit and its two cluster points as SVG and PPM
// into the system temp directory.

use orbitlens::automorphism::{DiscMoebius, Generator};
use orbitlens::domain::{ComplexVector, DomainTag, C64};
use orbitlens::orbit::{cluster_points, orbit};
use orbitlens::render::Scene;
use std::path::PathBuf;

pub fn run_example() -> orbitlens::Result<Vec<PathBuf>> {
    let g = Generator::Disc(DiscMoebius::new(
        C64::new(2f64.sqrt(), 0.3),
        C64::new(0.6, 0.73f64.sqrt()),
    )?);
    let a = ComplexVector::new(vec![C64::new(0.1, 0.2)])?;
    let samples = orbit(&g, &a, 400)?;
    let clusters = cluster_points(&DomainTag::Disc, &samples, 1e-4, 1e-6)?.clusters;
    let scene = Scene {
        domain: &DomainTag::Disc,
        samples: &samples,
        clusters: &clusters,
    };
    let dir = std::env::temp_dir();
    let paths = vec![
        dir.join("orbitlens_disc_orbit.svg"),
        dir.join("orbitlens_disc_orbit.ppm"),
    ];
    for p in &paths {
        scene.write(p)?;
    }
    Ok(paths)
}

#[allow(dead_code)]
fn main() {
    for p in run_example().expect("render") {
        println!("wrote {}", p.display());
    }
}
