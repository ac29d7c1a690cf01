// The dilation of the weighted domain Im z1 > |z2|^4: its orbit clusters at
// (1, 0) and (-1, 0), where the barrier |z1|^2 - 1 vanishes.

use orbitlens::automorphism::Generator;
use orbitlens::domain::{ComplexVector, Weights};
use orbitlens::orbit::{theorem_checks, TheoremKind, TheoremParams};
use orbitlens::potential::{barrier_witness, BarrierKind};
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let weights = Weights::new(vec![2, 1])?;
    let g = Generator::weighted_dilation(weights, 2.0)?;
    let rep = theorem_checks(TheoremKind::WeightedExample, &g, &TheoremParams::default())?;
    let mut out = String::new();
    for c in &rep.clusters[0].clusters {
        let p = &c.point.point;
        let _ = writeln!(
            out,
            "cluster ({:.6}, {:.6}) {:?}, barrier {:.3e}",
            p.get(0).re,
            p.get(1).norm(),
            c.side,
            barrier_witness(&BarrierKind::WeightedExample, p)?
        );
    }
    let inside = ComplexVector::zeros(2);
    let _ = writeln!(
        out,
        "barrier at the origin {:.6}",
        barrier_witness(&BarrierKind::WeightedExample, &inside)?
    );
    for c in &rep.checks {
        let _ = writeln!(
            out,
            "{}: {:.3e} <= {:.1e} {}",
            c.name,
            c.value,
            c.threshold,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("weighted example"));
}
