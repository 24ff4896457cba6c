//! Truncated Taylor jets at a point.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest derivative order carried by a jet.
pub const MAX_ORDER: usize = 8;

const SLOTS: usize = MAX_ORDER + 1;

/// Taylor coefficients `(f(z), f′(z)/1!, …, f^(L)(z)/L!)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > SLOTS {
            return Err(Error::Order(coeffs.len().saturating_sub(1)));
        }
        Ok(Self { coeffs })
    }

    /// The jet of the constant `c`.
    pub fn constant(c: Complex64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        Ok(Self { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `f^(k)(z) = k!·coeffs[k]`.
    pub fn derivative(&self, k: usize) -> Complex64 {
        self.coeffs[k] * factorial(k)
    }

    /// Truncated Cauchy product; the result has the smaller of the two orders.
    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let len = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum())
            .collect();
        Jet { coeffs }
    }
}

impl Mul for &Jet {
    type Output = Jet;

    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        Err(Error::Order(order))
    } else {
        Ok(())
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Scale `x` by `2^e` without intermediate overflow for `|e|` up to a few thousand.
pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// Binary exponent `e` with `2^e ≤ |x| < 2^{e+1}` for normal positive `x`.
fn exponent_of(x: f64) -> i64 {
    let bits = x.to_bits();
    ((bits >> 52) & 0x7ff) as i64 - 1023
}

/// Fixed-capacity jet carrying a separate power-of-two scale, so that long
/// products of factors with modulus below one do not underflow.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledJet {
    coeffs: [Complex64; SLOTS],
    len: usize,
    exp2: i64,
}

impl ScaledJet {
    pub(crate) fn one(order: usize) -> Self {
        let mut coeffs = [Complex64::new(0.0, 0.0); SLOTS];
        coeffs[0] = Complex64::new(1.0, 0.0);
        Self { coeffs, len: order + 1, exp2: 0 }
    }

    #[inline]
    pub(crate) fn mul_assign_factor(&mut self, f: &[Complex64; SLOTS]) {
        let n = self.len;
        for k in (0..n).rev() {
            let mut acc = self.coeffs[k] * f[0];
            for j in 0..k {
                acc += self.coeffs[j] * f[k - j];
            }
            self.coeffs[k] = acc;
        }
    }

    pub(crate) fn mul_assign_unit(&mut self, u: Complex64) {
        for c in &mut self.coeffs[..self.len] {
            *c *= u;
        }
    }

    /// Moves the largest coefficient component into `[1, 2)` and records the
    /// shift. An identically zero jet is left alone.
    #[inline]
    pub(crate) fn renormalize(&mut self) {
        let m = self.coeffs[..self.len]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.re.abs()).max(c.im.abs()));
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let e = exponent_of(m);
        if e == 0 {
            return;
        }
        let s = ldexp(1.0, -e);
        for c in &mut self.coeffs[..self.len] {
            *c *= s;
        }
        self.exp2 += e;
    }

    /// `|coeff k|` with the scale folded back in.
    pub(crate) fn abs_coeff(&self, k: usize) -> f64 {
        ldexp(self.coeffs[k].norm(), self.exp2)
    }

    pub(crate) fn to_jet(self) -> Jet {
        let coeffs = self.coeffs[..self.len]
            .iter()
            .map(|c| Complex64::new(ldexp(c.re, self.exp2), ldexp(c.im, self.exp2)))
            .collect();
        Jet { coeffs }
    }
}
