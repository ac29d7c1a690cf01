//! Small floating-point helpers: compensated accumulation, exact products and
//! least-squares slope fits used by the series diagnostics.

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Error-free product: `a * b == hi + lo` exactly (barring over/underflow).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    (hi, lo)
}

/// Computes `1 - sum(x_i^2)` where each square is split exactly before the
/// compensated accumulation.
pub fn one_minus_sum_of_squares<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    for x in xs {
        let (hi, lo) = two_prod(x, x);
        acc.add(-hi);
        acc.add(-lo);
    }
    acc.value()
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// `1 - |z|` recovered from the defect `d = 1 - |z|^2` without cancellation.
#[inline]
pub fn radial_gap_from_defect(d: f64) -> f64 {
    if d <= 0.0 {
        return d.max(0.0);
    }
    d / (1.0 + (1.0 - d).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut xs = vec![1.0];
        xs.extend(std::iter::repeat_n(1e-16, 10_000));
        xs.push(-1.0);
        let naive: f64 = xs.iter().sum();
        let comp = compensated_sum(xs.iter().copied());
        assert!((comp - 1e-12).abs() < 1e-24);
        assert!((naive - 1e-12).abs() > 1e-13);
    }

    #[test]
    fn two_prod_is_exact() {
        let (hi, lo) = two_prod(0.1, 0.3);
        assert_eq!(hi, 0.1 * 0.3);
        assert!(lo != 0.0);
    }

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = (10..100).map(|k| (k as f64).ln()).collect();
        let ys: Vec<f64> = (10..100).map(|k| -2.0 * (k as f64).ln() + 0.3).collect();
        assert!((ls_slope(&xs, &ys).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn radial_gap_matches_direct() {
        for &r in &[0.0, 0.3, 0.9, 0.999] {
            let d = 1.0 - r * r;
            assert!((radial_gap_from_defect(d) - (1.0 - r)).abs() < 1e-15);
        }
    }
}
