//! Hardy (circle) and weighted Bergman integral means with peak-seeded
//! adaptive quadrature, and the two reference kernel integrals.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::eval::{DiscPoint, PreparedProduct};
use crate::jet::MAX_ORDER;
use crate::quad::{integrate, merge_breaks, QuadOptions, QuadResult};
use crate::sequences::ZeroSequence;

const TWO_PI: f64 = 2.0 * PI;

/// Minimum number of uniform background panels on the circle.
pub const BACKGROUND_PANELS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanKind {
    Circle,
    Bergman { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSpec {
    pub kind: MeanKind,
    pub p: f64,
    pub ell: usize,
}

impl MeanSpec {
    pub fn circle(p: f64, ell: usize) -> Result<Self> {
        Self::validated(MeanKind::Circle, p, ell)
    }

    pub fn bergman(p: f64, ell: usize, gamma: f64) -> Result<Self> {
        Self::validated(MeanKind::Bergman { gamma }, p, ell)
    }

    fn validated(kind: MeanKind, p: f64, ell: usize) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("exponent p = {p} must be positive")));
        }
        if ell > MAX_ORDER {
            return Err(Error::Order(ell));
        }
        if let MeanKind::Bergman { gamma } = kind {
            if !(gamma > -1.0 && gamma.is_finite()) {
                return Err(Error::Domain(format!("Bergman weight gamma = {gamma} must exceed -1")));
            }
        }
        Ok(Self { kind, p, ell })
    }
}

/// A function on the disc whose modulus is integrated.
pub trait DiscIntegrand: Sync {
    fn modulus(&self, z: &DiscPoint) -> f64;

    /// `(argument, 1 − modulus)` of points where `|g|` concentrates.
    fn peaks(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
}

/// `|B^(ℓ)|` for a finite Blaschke product.
pub struct BlaschkeDerivative {
    prepared: PreparedProduct,
    peaks: Vec<(f64, f64)>,
    order: usize,
}

impl BlaschkeDerivative {
    pub fn new(seq: &ZeroSequence, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::Order(order));
        }
        Ok(Self {
            prepared: PreparedProduct::new(seq),
            peaks: seq.zeros().iter().map(|z| (z.theta(), z.one_minus_r())).collect(),
            order,
        })
    }
}

impl DiscIntegrand for BlaschkeDerivative {
    fn modulus(&self, z: &DiscPoint) -> f64 {
        self.prepared.derivative_abs(z, self.order).expect("order checked at construction")
    }

    fn peaks(&self) -> Vec<(f64, f64)> {
        self.peaks.clone()
    }
}

/// The constant function 1.
pub struct UnitIntegrand;

impl DiscIntegrand for UnitIntegrand {
    fn modulus(&self, _z: &DiscPoint) -> f64 {
        1.0
    }
}

/// Breakpoints on `[0, 2π]`: uniform background panels plus, for each peak
/// narrower than a background panel, the peak argument and offsets
/// `± w·4^k` with `w = (1 − r) + (1 − r_n)`. The grading stops at half a
/// background panel or at the angular distance to the neighbouring peaks,
/// whichever is smaller.
pub fn seeded_breaks(peaks: &[(f64, f64)], one_minus_r: f64) -> Vec<f64> {
    let panel = TWO_PI / BACKGROUND_PANELS as f64;
    let mut sorted: Vec<(f64, f64)> = peaks
        .iter()
        .map(|&(theta, gap)| (theta.rem_euclid(TWO_PI), one_minus_r + gap))
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = sorted.len();
    let mut extra = Vec::new();
    for i in 0..n {
        let (theta, w) = sorted[i];
        let mut reach = 0.5 * panel;
        if n > 1 {
            let next = (sorted[(i + 1) % n].0 - theta).rem_euclid(TWO_PI);
            let prev = (theta - sorted[(i + n - 1) % n].0).rem_euclid(TWO_PI);
            reach = reach.min(next.max(prev));
        }
        if w >= reach {
            continue;
        }
        extra.push(theta);
        let mut d = w;
        while d < reach {
            extra.push((theta + d).rem_euclid(TWO_PI));
            extra.push((theta - d).rem_euclid(TWO_PI));
            d *= 4.0;
        }
    }
    merge_breaks(0.0, TWO_PI, BACKGROUND_PANELS, extra)
}

fn circle_options(p: f64, quad_tol: f64) -> QuadOptions {
    let mut opts = QuadOptions::relative(quad_tol);
    opts.split_near_zeros = p < 1.0;
    opts
}

/// `∫₀^{2π} |g((1 − one_minus_r) e^{iθ})|^p dθ`.
pub fn circle_mean_of<G: DiscIntegrand + ?Sized>(
    g: &G,
    one_minus_r: f64,
    p: f64,
    quad_tol: f64,
) -> Result<QuadResult> {
    if !(one_minus_r > 0.0 && one_minus_r <= 1.0) {
        return Err(Error::Domain(format!("radius with 1 - r = {one_minus_r} outside [0,1)")));
    }
    let breaks = seeded_breaks(&g.peaks(), one_minus_r);
    let f = |theta: f64| {
        let z = DiscPoint::polar(one_minus_r, theta).expect("validated radius");
        let m = g.modulus(&z);
        if p == 1.0 {
            m
        } else {
            m.powf(p)
        }
    };
    integrate(f, &breaks, &circle_options(p, quad_tol))
}

/// Outer radial integral `∫₀¹ M(rρ) ρ (1 − ρ²)^γ dρ` for a circle-mean
/// functional `M` given through the gap `1 − rρ`.
///
/// With `u = 1 − ρ²` and, for `γ < 0`, `v = u^{γ+1}`, the endpoint
/// singularity disappears; the `u`-breakpoints are graded towards `u = 0`
/// at the scale `1 − r`.
pub fn radial_weighted_integral<M>(one_minus_r: f64, gamma: f64, quad_tol: f64, inner: M) -> Result<QuadResult>
where
    M: Fn(f64) -> Result<QuadResult>,
{
    if !(gamma > -1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} must exceed -1")));
    }
    if !(one_minus_r > 0.0 && one_minus_r <= 1.0) {
        return Err(Error::Domain(format!("radius with 1 - r = {one_minus_r} outside [0,1)")));
    }
    let t = one_minus_r;
    let r = 1.0 - t;
    let use_v = gamma < 0.0;
    let to_u = |x: f64| if use_v { x.powf(1.0 / (gamma + 1.0)) } else { x };
    let from_u = |u: f64| if use_v { u.powf(gamma + 1.0) } else { u };
    let mut u_breaks = Vec::new();
    let mut u = t.min(0.25);
    while u < 0.5 {
        u_breaks.push(u);
        u *= 4.0;
    }
    let breaks = merge_breaks(0.0, 1.0, 4, u_breaks.into_iter().map(from_u));

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_err = RefCell::new(0.0f64);
    let f = |x: f64| {
        if failure.borrow().is_some() {
            return 0.0;
        }
        let u = to_u(x);
        let rho = (1.0 - u).max(0.0).sqrt();
        let gap = t * rho + u / (1.0 + rho);
        let gap = if r == 0.0 { 1.0 } else { gap.min(1.0) };
        match inner(gap) {
            Ok(q) => {
                let w = if use_v { 1.0 } else { u.powf(gamma) };
                let mut e = inner_err.borrow_mut();
                *e = e.max(q.abs_error_estimate / q.value.abs().max(f64::MIN_POSITIVE));
                q.value * w
            }
            Err(err) => {
                *failure.borrow_mut() = Some(err);
                0.0
            }
        }
    };
    let scale = if use_v { 0.5 / (gamma + 1.0) } else { 0.5 };
    let mut opts = QuadOptions::relative(quad_tol);
    opts.max_panels = 4000;
    let outer = integrate(f, &breaks, &opts);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let outer = outer?;
    let value = outer.value * scale;
    Ok(QuadResult {
        value,
        abs_error_estimate: outer.abs_error_estimate * scale + inner_err.into_inner() * value.abs(),
        panels_used: outer.panels_used,
    })
}

/// `∫₀¹∫₀^{2π} |g(rρe^{iθ})|^p ρ (1 − ρ²)^γ dθ dρ`.
pub fn bergman_mean_of<G: DiscIntegrand + ?Sized>(
    g: &G,
    one_minus_r: f64,
    p: f64,
    gamma: f64,
    quad_tol: f64,
) -> Result<QuadResult> {
    let inner_tol = 0.25 * quad_tol;
    radial_weighted_integral(one_minus_r, gamma, quad_tol, |gap| circle_mean_of(g, gap, p, inner_tol))
}

fn radius_gap(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius r = {r} outside [0,1)")));
    }
    Ok(1.0 - r)
}

/// Circle mean `∫₀^{2π} |B^(ℓ)(re^{iθ})|^p dθ`.
pub fn circle_mean(seq: &ZeroSequence, r: f64, spec: &MeanSpec, quad_tol: f64) -> Result<QuadResult> {
    circle_mean_gap(seq, radius_gap(r)?, spec, quad_tol)
}

/// As [`circle_mean`], with the radius given by `1 − r`.
pub fn circle_mean_gap(seq: &ZeroSequence, one_minus_r: f64, spec: &MeanSpec, quad_tol: f64) -> Result<QuadResult> {
    let g = BlaschkeDerivative::new(seq, spec.ell)?;
    circle_mean_of(&g, one_minus_r, spec.p, quad_tol)
}

/// Weighted Bergman mean of `|B^(ℓ)|^p` over the disc of radius `r`.
pub fn bergman_mean(seq: &ZeroSequence, r: f64, spec: &MeanSpec, quad_tol: f64) -> Result<QuadResult> {
    bergman_mean_gap(seq, radius_gap(r)?, spec, quad_tol)
}

pub fn bergman_mean_gap(seq: &ZeroSequence, one_minus_r: f64, spec: &MeanSpec, quad_tol: f64) -> Result<QuadResult> {
    let MeanKind::Bergman { gamma } = spec.kind else {
        return Err(Error::Domain("bergman_mean needs a Bergman mean spec".into()));
    };
    let g = BlaschkeDerivative::new(seq, spec.ell)?;
    bergman_mean_of(&g, one_minus_r, spec.p, gamma, quad_tol)
}

/// Dispatches on the mean kind.
pub fn mean_gap(seq: &ZeroSequence, one_minus_r: f64, spec: &MeanSpec, quad_tol: f64) -> Result<QuadResult> {
    match spec.kind {
        MeanKind::Circle => circle_mean_gap(seq, one_minus_r, spec, quad_tol),
        MeanKind::Bergman { .. } => bergman_mean_gap(seq, one_minus_r, spec, quad_tol),
    }
}

/// `∫₀^{2π} dθ / |1 − re^{iθ}|^ν` with `1 − r = one_minus_r`.
pub fn ref_kernel_integral_gap(one_minus_r: f64, nu: f64, quad_tol: f64) -> Result<QuadResult> {
    if !(one_minus_r > 0.0 && one_minus_r <= 1.0) {
        return Err(Error::Domain(format!("radius with 1 - r = {one_minus_r} outside [0,1)")));
    }
    if !(nu > 1.0) {
        return Err(Error::Domain(format!("kernel exponent nu = {nu} must exceed 1")));
    }
    let t = one_minus_r;
    let r = 1.0 - t;
    let f = |theta: f64| {
        let s = (0.5 * theta).sin();
        let d2 = t * t + 4.0 * r * s * s;
        d2.powf(-0.5 * nu)
    };
    let mut extra = vec![0.0];
    let mut d = t;
    while d < 0.5 {
        extra.push(d);
        extra.push(-d);
        d *= 4.0;
    }
    let breaks = merge_breaks(-PI, PI, 16, extra);
    integrate(f, &breaks, &QuadOptions::relative(quad_tol))
}

pub fn ref_kernel_integral(r: f64, nu: f64, quad_tol: f64) -> Result<QuadResult> {
    ref_kernel_integral_gap(radius_gap(r)?, nu, quad_tol)
}

/// `∫₀¹∫₀^{2π} (1 − ρ²)^γ / |1 − rρe^{iθ}|^ν ρ dθ dρ`.
pub fn ref_bergman_kernel_integral_gap(one_minus_r: f64, nu: f64, gamma: f64, quad_tol: f64) -> Result<QuadResult> {
    if !(nu > 1.0) {
        return Err(Error::Domain(format!("kernel exponent nu = {nu} must exceed 1")));
    }
    let inner_tol = 0.25 * quad_tol;
    radial_weighted_integral(one_minus_r, gamma, quad_tol, |gap| ref_kernel_integral_gap(gap, nu, inner_tol))
}

pub fn ref_bergman_kernel_integral(r: f64, nu: f64, gamma: f64, quad_tol: f64) -> Result<QuadResult> {
    ref_bergman_kernel_integral_gap(radius_gap(r)?, nu, gamma, quad_tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(a: f64) -> ZeroSequence {
        ZeroSequence::from_polar(&[(a, 0.0)]).unwrap()
    }

    #[test]
    fn single_zero_closed_form() {
        let spec = MeanSpec::circle(1.0, 1).unwrap();
        let q = circle_mean(&single(0.5), 0.5, &spec, 1e-12).unwrap();
        let exact = 8.0 * PI / 5.0;
        assert!((q.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn unit_integrand_self_tests() {
        for &p in &[0.3, 1.0, 2.5] {
            let q = circle_mean_of(&UnitIntegrand, 1e-3, p, 1e-12).unwrap();
            assert!((q.value - TWO_PI).abs() < 1e-12);
        }
        for &gamma in &[-0.5, 0.0, 1.5] {
            let q = bergman_mean_of(&UnitIntegrand, 0.01, 1.0, gamma, 1e-10).unwrap();
            let exact = PI / (gamma + 1.0);
            assert!((q.value - exact).abs() < 1e-9 * exact, "gamma {gamma}: {}", q.value);
        }
    }

    #[test]
    fn poisson_kernel() {
        let q = ref_kernel_integral(0.5, 2.0, 1e-13).unwrap();
        assert!((q.value - TWO_PI / 0.75).abs() < 1e-10 * q.value);
        let q = ref_kernel_integral(0.0, 2.0, 1e-13).unwrap();
        assert!((q.value - TWO_PI).abs() < 1e-12);
        let t = 1e-6;
        let q = ref_kernel_integral_gap(t, 2.0, 1e-13).unwrap();
        let exact = TWO_PI / (t * (2.0 - t));
        assert!((q.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn bergman_kernel_at_origin() {
        let q = ref_bergman_kernel_integral(0.0, 4.0, -0.5, 1e-10).unwrap();
        assert!((q.value - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn spec_validation() {
        assert!(MeanSpec::circle(0.0, 1).is_err());
        assert!(MeanSpec::bergman(1.0, 1, -1.0).is_err());
        assert!(matches!(MeanSpec::circle(1.0, 9), Err(Error::Order(9))));
    }
}
