//! Compensated summation.
//!
//! Both accumulators use Neumaier's variant of Kahan summation, which stays
//! exact-to-rounding when a term is larger in magnitude than the running sum.

use num_complex::Complex64;
use std::iter::Sum;
use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl Sum<f64> for KahanSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of reals.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().sum::<KahanSum>().total()
}

/// Componentwise compensated accumulator for complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexKahanSum {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

impl Sum<Complex64> for ComplexKahanSum {
    fn sum<I: Iterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexKahanSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let terms = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(kahan_sum(terms), 2.0);
    }

    #[test]
    fn harmonic_partial_sum_matches_reverse_order() {
        let forward = kahan_sum((1..=100_000).map(|n| 1.0 / n as f64));
        let mut reverse = 0.0;
        for n in (1..=100_000).rev() {
            reverse += 1.0 / n as f64;
        }
        assert!((forward - reverse).abs() < 1e-13);
    }

    #[test]
    fn complex_accumulator() {
        let s: ComplexKahanSum = (0..10)
            .map(|k| Complex64::new(0.1, -0.1 * k as f64))
            .sum();
        let t = s.total();
        assert!((t.re - 1.0).abs() < 1e-15);
        assert!((t.im + 4.5).abs() < 1e-14);
    }
}
