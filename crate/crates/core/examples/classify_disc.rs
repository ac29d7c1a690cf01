// Classifies a few disc automorphisms and prints their fixed points.

use orbitlens::automorphism::DiscMoebius;
use orbitlens::domain::C64;
use std::fmt::Write;

pub fn run_example() -> orbitlens::Result<String> {
    let mut out = String::new();
    let cases = [
        ("sqrt2", C64::new(2f64.sqrt(), 0.0), C64::new(1.0, 0.0)),
        ("parabolic", C64::new(1.0, 1.0), C64::new(1.0, 0.0)),
        ("rotation", C64::from_polar(1.0, 0.35), C64::new(0.0, 0.0)),
    ];
    for (name, p, q) in cases {
        let m = DiscMoebius::new(p, q)?;
        let class = m.classify();
        let _ = write!(
            out,
            "{name}: {:?}, trace test {:.6}",
            class.kind,
            m.trace_test()
        );
        for f in &class.fixed_points {
            let z = f.point.get(0);
            let _ = write!(
                out,
                " [{:.6}{:+.6}i{}]",
                z.re,
                z.im,
                if f.interior { " interior" } else { "" }
            );
        }
        out.push('\n');
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example().expect("classification"));
}
