//! Pointwise evaluation of finite Blaschke products, their derivatives and the
//! logarithmic-derivative series.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{check_order, Jet, ScaledJet, MAX_ORDER};
use crate::kahan::{ComplexKahanSum, KahanSum};
use crate::sequences::{one_minus_conj_product, ZeroSequence};

/// Distance below which the log-derivative series reports a pole.
pub const POLE_DISTANCE: f64 = 1e-14;

/// A point of the open disc held as `(1 − |z|, e^{i arg z})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    gap: f64,
    dir: Complex64,
    z: Complex64,
}

impl DiscPoint {
    /// `z = (1 − one_minus_r) e^{iθ}`, with `one_minus_r ∈ (0, 1]`.
    pub fn polar(one_minus_r: f64, theta: f64) -> Result<Self> {
        if !(one_minus_r > 0.0 && one_minus_r <= 1.0) || !theta.is_finite() {
            return Err(Error::Domain(format!(
                "point with 1 - |z| = {one_minus_r}, arg = {theta} is not in the open disc"
            )));
        }
        let dir = Complex64::from_polar(1.0, theta);
        Ok(Self { gap: one_minus_r, dir, z: dir * (1.0 - one_minus_r) })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::Domain(format!("|z| = {r} >= 1")));
        }
        let dir = if r == 0.0 { Complex64::new(1.0, 0.0) } else { z / r };
        Ok(Self { gap: 1.0 - r, dir, z })
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn one_minus_r(&self) -> f64 {
        self.gap
    }

    pub fn r(&self) -> f64 {
        1.0 - self.gap
    }

    /// `e^{i arg z}` (1 at the origin).
    pub fn direction(&self) -> Complex64 {
        self.dir
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationPolicy {
    /// Use the stored zeros and ignore the generator tail.
    AllStored,
    /// Fail when the multiplicative tail uncertainty exceeds the tolerance.
    TailTol(f64),
}

/// A value with the multiplicative uncertainty caused by omitted zeros:
/// the full product equals `value·(1 + ε)` with `|ε| ≤ tail_uncertainty`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub tail_uncertainty: f64,
}

/// `exp(Σ_{tail} |1 − b_n(z)|) − 1` from `|1 − b_n(z)| ≤ (1+|z|)/(1−|z|)·(1 − |z_n|)`.
pub fn tail_uncertainty(seq: &ZeroSequence, p: &DiscPoint) -> f64 {
    let tail = seq.tail_bound();
    if tail == 0.0 {
        return 0.0;
    }
    ((2.0 - p.gap) / p.gap * tail).exp_m1()
}

fn apply_policy(seq: &ZeroSequence, p: &DiscPoint, policy: TruncationPolicy, value: f64) -> Result<f64> {
    let eps = tail_uncertainty(seq, p);
    if let TruncationPolicy::TailTol(tol) = policy {
        if !(tol > 0.0) {
            return Err(Error::Domain(format!("tail tolerance {tol} must be positive")));
        }
        if !(eps <= tol) {
            return Err(Error::ToleranceNotMet { value, error_estimate: eps });
        }
    }
    Ok(eps)
}

/// Zero data laid out for repeated evaluation.
#[derive(Debug, Clone)]
pub struct PreparedProduct {
    gap: Vec<f64>,
    dir: Vec<Complex64>,
    point: Vec<Complex64>,
    conj_point: Vec<Complex64>,
    one_minus_sq: Vec<f64>,
}

impl PreparedProduct {
    pub fn new(seq: &ZeroSequence) -> Self {
        let zs = seq.zeros();
        Self {
            gap: zs.iter().map(|z| z.one_minus_r()).collect(),
            dir: zs.iter().map(|z| z.direction()).collect(),
            point: zs.iter().map(|z| z.point()).collect(),
            conj_point: zs.iter().map(|z| z.point().conj()).collect(),
            one_minus_sq: zs.iter().map(|z| z.one_minus_r_sq()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.gap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gap.is_empty()
    }

    /// Jet of the product at `p`; `with_phase = false` drops the unimodular
    /// normalising constants, which does not change any modulus.
    pub(crate) fn scaled_jet(&self, p: &DiscPoint, order: usize, with_phase: bool) -> ScaledJet {
        let mut acc = ScaledJet::one(order);
        let mut f = [Complex64::new(0.0, 0.0); MAX_ORDER + 1];
        let every = if order <= 1 { 8 } else { 1 };
        let mut phase = Complex64::new(1.0, 0.0);
        for n in 0..self.gap.len() {
            let w = one_minus_conj_product(p.gap, p.dir, self.gap[n], self.dir[n]);
            let inv = w.inv();
            f[0] = (self.point[n] - p.z) * inv;
            if order >= 1 {
                f[1] = inv * inv * (-self.one_minus_sq[n]);
                let step = self.conj_point[n] * inv;
                for k in 2..=order {
                    f[k] = f[k - 1] * step;
                }
            }
            acc.mul_assign_factor(&f);
            if with_phase {
                phase *= self.dir[n].conj();
            }
            if n % every == every - 1 {
                acc.renormalize();
            }
        }
        acc.renormalize();
        if with_phase {
            acc.mul_assign_unit(phase);
        }
        acc
    }

    pub fn jet(&self, p: &DiscPoint, order: usize) -> Result<Jet> {
        check_order(order)?;
        Ok(self.scaled_jet(p, order, true).to_jet())
    }

    /// `|B^(ℓ)(z)|`.
    pub fn derivative_abs(&self, p: &DiscPoint, order: usize) -> Result<f64> {
        check_order(order)?;
        let jet = self.scaled_jet(p, order, false);
        Ok(jet.abs_coeff(order) * crate::jet::factorial(order))
    }

    /// `Σ (1 − |z_n|²)/|1 − conj(z_n) z|²`.
    pub fn upper_bound(&self, p: &DiscPoint) -> f64 {
        let mut acc = KahanSum::new();
        for n in 0..self.gap.len() {
            let w = one_minus_conj_product(p.gap, p.dir, self.gap[n], self.dir[n]);
            acc.add(self.one_minus_sq[n] / w.norm_sqr());
        }
        acc.total()
    }

    pub fn logderiv(&self, p: &DiscPoint) -> Result<Complex64> {
        let mut acc = ComplexKahanSum::new();
        for n in 0..self.gap.len() {
            let d = p.z - self.point[n];
            let dist = d.norm();
            if dist < POLE_DISTANCE {
                return Err(Error::Pole { distance: dist });
            }
            let w = one_minus_conj_product(p.gap, p.dir, self.gap[n], self.dir[n]);
            acc.add(d.inv());
            acc.add(self.conj_point[n] / w);
        }
        Ok(acc.total())
    }
}

/// `B(z)` over the stored zeros.
pub fn eval_b(seq: &ZeroSequence, z: Complex64) -> Result<Complex64> {
    Ok(eval_b_with_policy(seq, z, TruncationPolicy::AllStored)?.value)
}

pub fn eval_b_with_policy(seq: &ZeroSequence, z: Complex64, policy: TruncationPolicy) -> Result<Evaluation> {
    let p = DiscPoint::from_complex(z)?;
    let value = PreparedProduct::new(seq).scaled_jet(&p, 0, true).to_jet().value();
    let tail_uncertainty = apply_policy(seq, &p, policy, value.norm())?;
    Ok(Evaluation { value, tail_uncertainty })
}

/// `S(z) = B′(z)/B(z) = Σ (1 − |z_n|²)/((1 − conj(z_n) z)(z − z_n))`.
pub fn eval_logderiv_sum(seq: &ZeroSequence, z: Complex64) -> Result<Complex64> {
    let p = DiscPoint::from_complex(z)?;
    PreparedProduct::new(seq).logderiv(&p)
}

/// Jet of `B` of order `order ≤ 8` at `z`.
pub fn eval_b_jet(seq: &ZeroSequence, z: Complex64, order: usize, policy: TruncationPolicy) -> Result<Jet> {
    check_order(order)?;
    let p = DiscPoint::from_complex(z)?;
    let jet = PreparedProduct::new(seq).jet(&p, order)?;
    apply_policy(seq, &p, policy, jet.value().norm())?;
    Ok(jet)
}

/// `Σ (1 − |z_n|²)/|1 − conj(z_n) z|²`, which dominates `|B′(z)|`.
pub fn eval_upper_bound(seq: &ZeroSequence, z: Complex64) -> Result<f64> {
    let p = DiscPoint::from_complex(z)?;
    Ok(PreparedProduct::new(seq).upper_bound(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{gen_geometric, gen_radial_power, AngleMode};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(a: f64) -> ZeroSequence {
        ZeroSequence::from_polar(&[(a, 0.0)]).unwrap()
    }

    #[test]
    fn single_zero_values() {
        let s = single(0.5);
        assert!((eval_b(&s, c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-16);
        assert_eq!(eval_b(&s, c(0.5, 0.0)).unwrap().norm(), 0.0);
        let jet = eval_b_jet(&s, c(0.0, 0.0), 2, TruncationPolicy::AllStored).unwrap();
        assert!((jet.derivative(1) - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((jet.derivative(2) - c(-0.75, 0.0)).norm() < 1e-15);
        assert!((eval_logderiv_sum(&s, c(0.0, 0.0)).unwrap() - c(-1.5, 0.0)).norm() < 1e-15);
        assert!((eval_upper_bound(&s, c(0.0, 0.0)).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn two_zero_hand_product() {
        let s = ZeroSequence::from_polar(&[(0.5, 0.0), (0.8, 0.0)]).unwrap();
        let expected = ((0.5 - 0.9) / (1.0 - 0.45)) * ((0.8 - 0.9) / (1.0 - 0.72));
        let got = eval_b(&s, c(0.9, 0.0)).unwrap();
        assert!((got.re - expected).abs() < 1e-15 && got.im.abs() < 1e-16);
        assert!((expected - 0.259_740_259_740_26).abs() < 1e-13);
    }

    #[test]
    fn pole_reported() {
        let s = single(0.5);
        assert!(matches!(eval_logderiv_sum(&s, c(0.5, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(eval_b(&s, c(1.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn order_cap_enforced() {
        let s = single(0.5);
        assert!(matches!(
            eval_b_jet(&s, c(0.0, 0.0), 9, TruncationPolicy::AllStored),
            Err(Error::Order(9))
        ));
    }

    #[test]
    fn tail_policy() {
        let s = gen_radial_power(1.5, 0.5, 50, AngleMode::Radial, false).unwrap();
        let ok = eval_b_with_policy(&s, c(0.1, 0.0), TruncationPolicy::TailTol(1e-2)).unwrap();
        assert!(ok.tail_uncertainty > 0.0 && ok.tail_uncertainty < 1e-2);
        assert!(matches!(
            eval_b_with_policy(&s, c(0.999, 0.0), TruncationPolicy::TailTol(1e-2)),
            Err(Error::ToleranceNotMet { .. })
        ));
        let geo = gen_geometric(0.5, 40, AngleMode::Radial).unwrap();
        let e = eval_b_with_policy(&geo, c(0.9, 0.0), TruncationPolicy::TailTol(1e-9)).unwrap();
        assert!(e.tail_uncertainty < 1e-9);
    }

    #[test]
    fn deep_zero_product_does_not_underflow() {
        let s = gen_geometric(0.5, 40, AngleMode::Golden).unwrap();
        let p = DiscPoint::polar(1e-6, 0.3).unwrap();
        let prepared = PreparedProduct::new(&s);
        let v = prepared.derivative_abs(&p, 3).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }
}
