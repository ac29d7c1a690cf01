//! Every example runs and prints what it claims.

mod classify_disc {
    include!("../examples/classify_disc.rs");
}
mod ball_automorphisms {
    include!("../examples/ball_automorphisms.rs");
}
mod siegel_cases {
    include!("../examples/siegel_cases.rs");
}
mod poincare_series {
    include!("../examples/poincare_series.rs");
}
mod limit_sets {
    include!("../examples/limit_sets.rs");
}
mod potentials {
    include!("../examples/potentials.rs");
}
mod bergman_rule {
    include!("../examples/bergman_rule.rs");
}
mod weighted_example {
    include!("../examples/weighted_example.rs");
}
mod render_orbit {
    include!("../examples/render_orbit.rs");
}

#[test]
fn classify_disc_covers_three_classes() {
    let out = classify_disc::run_example().unwrap();
    for class in ["Hyperbolic", "Parabolic", "Elliptic"] {
        assert!(out.contains(class), "{out}");
    }
}

#[test]
fn ball_automorphisms_round_trip() {
    let out = ball_automorphisms::run_example().unwrap();
    assert!(
        out.contains("class Hyperbolic with 2 boundary fixed points"),
        "{out}"
    );
}

#[test]
fn siegel_cases_show_the_rotated_disagreement() {
    let out = siegel_cases::run_example().unwrap();
    assert!(
        out.contains("I23 closed form Diverges, numeric Converges"),
        "{out}"
    );
    assert!(
        out.contains("I1 closed form Converges, numeric Converges"),
        "{out}"
    );
}

#[test]
fn poincare_series_gap_halves() {
    let out = poincare_series::run_example().unwrap();
    assert!(out.contains("K = 10000: 3.153148105"), "{out}");
    assert!(out.contains("verdict Converges by Both"), "{out}");
}

#[test]
fn limit_sets_counts() {
    let out = limit_sets::run_example().unwrap();
    assert!(
        out.contains("ball: 2 clusters") && out.contains("translation: 1 clusters"),
        "{out}"
    );
}

#[test]
fn potentials_invariance_and_pole() {
    let out = potentials::run_example().unwrap();
    assert!(
        out.contains("u(z) = -4.903945431, u(gamma z) = -4.903945431"),
        "{out}"
    );
    assert!(out.contains("-inf"), "{out}");
}

#[test]
fn bergman_rule_agrees() {
    let out = bergman_rule::run_example().unwrap();
    assert!(out.contains("finite difference 0.17552835"), "{out}");
}

#[test]
fn weighted_example_checks_pass() {
    let out = weighted_example::run_example().unwrap();
    assert_eq!(out.matches(" ok").count(), 3, "{out}");
}

#[test]
fn render_orbit_writes_both_formats() {
    let paths = render_orbit::run_example().unwrap();
    assert_eq!(paths.len(), 2);
    let ppm = std::fs::read(&paths[1]).unwrap();
    assert!(ppm.starts_with(b"P6\n"));
    assert!(std::fs::read_to_string(&paths[0]).unwrap().contains("<svg"));
}
