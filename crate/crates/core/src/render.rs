//! Static pictures of orbits and cluster sets: SVG 1.1 or binary PPM (P6).

use std::fmt::Write as _;
use std::path::Path;

use crate::domain::{ComplexVector, DomainTag};
use crate::error::{Error, Result};
use crate::orbit::{Cluster, OrbitSample};

const PANEL: f64 = 480.0;
const MARGIN: f64 = 0.1;

type Rgb = [u8; 3];

const FORWARD: Rgb = [214, 39, 40];
const BACKWARD: Rgb = [31, 119, 180];
const BASE: Rgb = [0, 0, 0];
const CLUSTER: Rgb = [44, 160, 44];
const OUTLINE: Rgb = [110, 110, 110];
const BACKGROUND: Rgb = [255, 255, 255];

/// Points and cluster markers to draw, with the domain fixing the layout.
#[derive(Debug, Clone)]
pub struct Scene<'a> {
    pub domain: &'a DomainTag,
    pub samples: &'a [OrbitSample],
    pub clusters: &'a [Cluster],
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
        color: Rgb,
    },
    Dot {
        x: f64,
        y: f64,
        color: Rgb,
    },
    Marker {
        x: f64,
        y: f64,
        color: Rgb,
    },
}

fn sign_color(k: i64) -> Rgb {
    match k.signum() {
        1 => FORWARD,
        -1 => BACKWARD,
        _ => BASE,
    }
}

/// Dark blue at 0 to orange at 1.
fn ramp(t: f64) -> Rgb {
    let t = t.clamp(0.0, 1.0);
    let mix = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    [mix(40.0, 250.0), mix(30.0, 150.0), mix(120.0, 20.0)]
}

/// Maps `[-1-m, 1+m]^2` of panel `i` to pixels, imaginary axis up.
fn to_px(panel: usize, re: f64, im: f64) -> (f64, f64) {
    let scale = PANEL / (2.0 + 2.0 * MARGIN);
    (
        panel as f64 * PANEL + (re + 1.0 + MARGIN) * scale,
        (1.0 + MARGIN - im) * scale,
    )
}

fn tail_norm(p: &ComplexVector) -> f64 {
    p.tail().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl Scene<'_> {
    fn panels(&self) -> usize {
        if *self.domain == DomainTag::Bidisc {
            2
        } else {
            1
        }
    }

    fn shapes(&self) -> Result<Vec<Shape>> {
        if self.samples.is_empty() && self.clusters.is_empty() {
            return Err(Error::Render(
                "nothing to draw: no orbit samples and no clusters".into(),
            ));
        }
        let scale = PANEL / (2.0 + 2.0 * MARGIN);
        let mut out = Vec::new();
        for panel in 0..self.panels() {
            let (cx, cy) = to_px(panel, 0.0, 0.0);
            out.push(Shape::Circle {
                cx,
                cy,
                r: scale,
                color: OUTLINE,
            });
        }
        let coords = |p: &ComplexVector| -> Vec<(usize, f64, f64)> {
            if *self.domain == DomainTag::Bidisc {
                (0..2).map(|j| (j, p.get(j).re, p.get(j).im)).collect()
            } else {
                vec![(0, p.get(0).re, p.get(0).im)]
            }
        };
        let multi = self.domain.dim() >= 2 && *self.domain != DomainTag::Bidisc;
        for s in self.samples {
            let color = if multi {
                ramp(tail_norm(&s.point))
            } else {
                sign_color(s.k)
            };
            for (panel, re, im) in coords(&s.point) {
                let (x, y) = to_px(panel, re, im);
                out.push(Shape::Dot { x, y, color });
            }
        }
        for c in self.clusters {
            for (panel, re, im) in coords(&c.point.point) {
                let (x, y) = to_px(panel, re, im);
                out.push(Shape::Marker {
                    x,
                    y,
                    color: CLUSTER,
                });
            }
        }
        Ok(out)
    }

    fn size(&self) -> (usize, usize) {
        ((PANEL as usize) * self.panels(), PANEL as usize)
    }

    pub fn to_svg(&self) -> Result<String> {
        let shapes = self.shapes()?;
        let (w, h) = self.size();
        let hex = |c: Rgb| format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{w}" height="{h}" fill="{}"/>"#,
            hex(BACKGROUND)
        );
        for shape in shapes {
            let _ = match shape {
                Shape::Circle { cx, cy, r, color } => writeln!(
                    s,
                    r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r:.3}" fill="none" stroke="{}" stroke-width="1"/>"#,
                    hex(color)
                ),
                Shape::Dot { x, y, color } => {
                    writeln!(
                        s,
                        r#"<circle cx="{x:.3}" cy="{y:.3}" r="1.5" fill="{}"/>"#,
                        hex(color)
                    )
                }
                Shape::Marker { x, y, color } => writeln!(
                    s,
                    r#"<rect x="{:.3}" y="{:.3}" width="10" height="10" fill="none" stroke="{}" stroke-width="2"/>"#,
                    x - 5.0,
                    y - 5.0,
                    hex(color)
                ),
            };
        }
        s.push_str("</svg>\n");
        Ok(s)
    }

    pub fn to_ppm(&self) -> Result<Vec<u8>> {
        let shapes = self.shapes()?;
        let (w, h) = self.size();
        let mut px = vec![BACKGROUND; w * h];
        let mut put = |x: i64, y: i64, c: Rgb| {
            if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                px[y as usize * w + x as usize] = c;
            }
        };
        for shape in shapes {
            match shape {
                Shape::Circle { cx, cy, r, color } => {
                    let steps = (8.0 * r) as usize;
                    for i in 0..steps {
                        let t = std::f64::consts::TAU * i as f64 / steps as f64;
                        put(
                            (cx + r * t.cos()).round() as i64,
                            (cy + r * t.sin()).round() as i64,
                            color,
                        );
                    }
                }
                Shape::Dot { x, y, color } => {
                    let (x, y) = (x.round() as i64, y.round() as i64);
                    for dx in -1..=1 {
                        for dy in -1..=1 {
                            put(x + dx, y + dy, color);
                        }
                    }
                }
                Shape::Marker { x, y, color } => {
                    let (x, y) = (x.round() as i64, y.round() as i64);
                    for d in -5..=5 {
                        for t in [-5, -4, 4, 5] {
                            put(x + d, y + t, color);
                            put(x + t, y + d, color);
                        }
                    }
                }
            }
        }
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        out.extend(px.iter().flatten());
        Ok(out)
    }

    /// Writes SVG or PPM according to the extension of `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = match path.extension().and_then(|e| e.to_str()) {
            Some("svg") => self.to_svg()?.into_bytes(),
            Some("ppm") => self.to_ppm()?,
            _ => {
                return Err(Error::Render(format!(
                    "{} must end in .svg or .ppm",
                    path.display()
                )))
            }
        };
        std::fs::write(path, bytes)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::{DiscMoebius, Generator};
    use crate::domain::C64;
    use crate::orbit::{cluster_points, orbit};

    fn disc_scene_parts() -> (DomainTag, Vec<OrbitSample>, Vec<Cluster>) {
        let g = Generator::Disc(
            DiscMoebius::new(C64::new(2f64.sqrt(), 0.0), C64::new(1.0, 0.0)).unwrap(),
        );
        let samples = orbit(&g, &ComplexVector::zeros(1), 200).unwrap();
        let rep = cluster_points(&DomainTag::Disc, &samples, 1e-4, 1e-6).unwrap();
        (DomainTag::Disc, samples, rep.clusters)
    }

    #[test]
    fn empty_scene_is_rejected() {
        let scene = Scene {
            domain: &DomainTag::Disc,
            samples: &[],
            clusters: &[],
        };
        assert!(matches!(scene.to_svg(), Err(Error::Render(_))));
        assert!(matches!(scene.to_ppm(), Err(Error::Render(_))));
    }

    #[test]
    fn hyperbolic_disc_orbit_piles_up_at_both_fixed_points() {
        let (d, samples, clusters) = disc_scene_parts();
        assert_eq!(clusters.len(), 2);
        let scene = Scene {
            domain: &d,
            samples: &samples,
            clusters: &clusters,
        };
        let ppm = scene.to_ppm().unwrap();
        assert!(ppm.starts_with(b"P6\n480 480\n255\n"));
        let header = b"P6\n480 480\n255\n".len();
        assert_eq!(ppm.len(), header + 480 * 480 * 3);
        // forward points crowd near +1, backward near -1
        let pixel = |x: f64, y: f64| {
            let (px, py) = to_px(0, x, y);
            let i = header + 3 * (py.round() as usize * 480 + px.round() as usize);
            [ppm[i], ppm[i + 1], ppm[i + 2]]
        };
        assert_eq!(pixel(0.99, 0.0), FORWARD);
        assert_eq!(pixel(-0.99, 0.0), BACKWARD);
        let svg = scene.to_svg().unwrap();
        assert!(svg.contains("<svg") && svg.matches("<rect").count() == 3);
    }

    #[test]
    fn extension_selects_format() {
        let (d, samples, clusters) = disc_scene_parts();
        let scene = Scene {
            domain: &d,
            samples: &samples,
            clusters: &clusters,
        };
        let dir = tempfile::tempdir().unwrap();
        scene.write(&dir.path().join("o.ppm")).unwrap();
        assert!(std::fs::read(dir.path().join("o.ppm"))
            .unwrap()
            .starts_with(b"P6"));
        assert!(matches!(
            scene.write(&dir.path().join("o.png")),
            Err(Error::Render(_))
        ));
    }
}
