//! Admissible weight functions `h` and numerical monotonicity certificates.
//!
//! The prototype weight is the log-power family
//!
//! ```text
//! h(t) = t^α · (log 1/t)^{α₁} · (log log 1/t)^{α₂} ⋯ (log_m 1/t)^{α_m}
//! ```
//!
//! which is only eventually positive and monotone, so every weight carries an
//! upper end `t_max` of its validity interval `(0, t_max]`. Monotonicity of
//! `h(t)/t^p` is certified on a sample grid rather than symbolically.

use crate::error::{Error, Result};

/// A positive continuous weight on `(0, t_max]` with `h(t) → 0` as `t → 0⁺`.
pub trait Weight {
    fn eval(&self, t: f64) -> Result<f64>;
    fn t_max(&self) -> f64;
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogPowerWeight {
    alpha: f64,
    log_exponents: Vec<f64>,
    t_max: f64,
}

/// Default validity bound for a weight with `m` iterated logarithms.
///
/// `1/e` for `m = 1`, `e^{-e}` for `m = 2` and in general the reciprocal of the
/// exponential tower of height `m`, so that `log_m(1/t) ≥ 1` on `(0, t_max]`.
pub fn default_t_max(m: usize) -> f64 {
    if m == 0 {
        return 0.5;
    }
    // log(1/t_max) = tower(m-1) where tower(0) = 1, tower(k) = e^{tower(k-1)}.
    let mut log_inv = 1.0f64;
    for _ in 1..m {
        log_inv = log_inv.exp();
    }
    (-log_inv).exp()
}

impl LogPowerWeight {
    pub fn new(alpha: f64, log_exponents: Vec<f64>) -> Result<Self> {
        let t_max = default_t_max(log_exponents.len());
        Self::with_t_max(alpha, log_exponents, t_max)
    }

    /// Pure power weight `t^α`.
    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(alpha, Vec::new())
    }

    pub fn with_t_max(alpha: f64, log_exponents: Vec<f64>, t_max: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("weight exponent alpha = {alpha} not in (0,1)")));
        }
        if log_exponents.iter().any(|a| !a.is_finite()) {
            return Err(Error::Domain("non-finite log exponent".into()));
        }
        if !(t_max > 0.0 && t_max < 1.0) {
            return Err(Error::Domain(format!("t_max = {t_max} not in (0,1)")));
        }
        let h = Self { alpha, log_exponents, t_max };
        // every iterated log must be positive on the whole interval; it is
        // increasing as t decreases, so checking the right end suffices
        h.iterated_logs(t_max)?;
        Ok(h)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_exponents(&self) -> &[f64] {
        &self.log_exponents
    }

    pub fn is_pure_power(&self) -> bool {
        self.log_exponents.iter().all(|&a| a == 0.0)
    }

    /// `(log 1/t, log log 1/t, …)` up to the number of stored exponents.
    fn iterated_logs(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.log_exponents.len());
        let mut l = -t.ln();
        for k in 0..self.log_exponents.len() {
            if k > 0 {
                l = l.ln();
            }
            if !(l > 0.0) {
                return Err(Error::Domain(format!(
                    "iterated log of order {} is {l} <= 0 at t = {t}",
                    k + 1
                )));
            }
            out.push(l);
        }
        Ok(out)
    }

    /// The logarithmic factor `Π_k (log_k 1/t)^{α_k}` alone.
    pub fn log_factor(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("t = {t} must be positive")));
        }
        let logs = self.iterated_logs(t)?;
        Ok(logs
            .iter()
            .zip(&self.log_exponents)
            .map(|(l, a)| l.powf(*a))
            .product())
    }
}

impl Weight for LogPowerWeight {
    fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t <= self.t_max) {
            return Err(Error::Domain(format!(
                "t = {t} outside (0, {}]",
                self.t_max
            )));
        }
        Ok(t.powf(self.alpha) * self.log_factor(t)?)
    }

    fn t_max(&self) -> f64 {
        self.t_max
    }
}

/// Strictly increasing sample points in `(0, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    points: Vec<f64>,
}

impl SampleGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Degenerate("sample grid needs at least 2 points".into()));
        }
        if points[0] <= 0.0 || points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Degenerate(
                "sample grid must be positive and strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// `n` geometrically spaced points between `t_min` and `t_max` inclusive.
    pub fn geometric(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max) || n < 2 {
            return Err(Error::Degenerate(format!(
                "invalid geometric grid [{t_min}, {t_max}] with {n} points"
            )));
        }
        let (lo, hi) = (t_min.ln(), t_max.ln());
        let mut points: Vec<f64> = (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect();
        points[0] = t_min;
        points[n - 1] = t_max;
        Self::new(points)
    }

    /// The default certification grid: 512 points from `t_max` down to `1e-9`.
    pub fn certification(t_max: f64) -> Self {
        Self::geometric(1e-9, t_max, 512).expect("valid default grid")
    }

    /// A grid reaching far enough toward 0 that slowly vanishing powers
    /// (`t^{0.1}` and slower-than-log corrections) show a decisive decrease
    /// over its last 32 points.
    pub fn deep(t_max: f64) -> Self {
        Self::geometric(1e-300, t_max, 512).expect("valid deep grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Decreasing,
    Increasing,
}

/// Outcome of checking `t ↦ h(t)/t^p` for monotonicity on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub exponent: f64,
    pub direction: Direction,
    pub holds_strictly: bool,
    pub holds_boundedly: bool,
    /// Smallest `C ≥ 1` with `φ(y) ≤ C φ(x)` (decreasing) or `φ(x) ≤ C φ(y)`
    /// (increasing) for all grid points `x ≤ y`.
    pub constant: f64,
    /// Grid pair `(x, y)`, `x ≤ y`, attaining `constant`.
    pub witness: (f64, f64),
}

/// Largest bounded-monotonicity constant accepted as "boundedly monotone".
pub const DEFAULT_BOUNDED_LIMIT: f64 = 10.0;

/// Relative slack absorbing rounding in consecutive comparisons.
const MONOTONE_SLACK: f64 = 1e-12;

pub fn eval_weight<W: Weight + ?Sized>(h: &W, t: f64) -> Result<f64> {
    h.eval(t)
}

pub fn check_monotone<W: Weight + ?Sized>(
    h: &W,
    p: f64,
    direction: Direction,
    grid: &SampleGrid,
) -> Result<MonotoneReport> {
    check_monotone_with_limit(h, p, direction, grid, DEFAULT_BOUNDED_LIMIT)
}

pub fn check_monotone_with_limit<W: Weight + ?Sized>(
    h: &W,
    p: f64,
    direction: Direction,
    grid: &SampleGrid,
    bounded_limit: f64,
) -> Result<MonotoneReport> {
    let ts = grid.points();
    let phi = ts
        .iter()
        .map(|&t| Ok(h.eval(t)? / t.powf(p)))
        .collect::<Result<Vec<f64>>>()?;

    let holds_strictly = phi.windows(2).all(|w| match direction {
        Direction::Decreasing => w[1] <= w[0] * (1.0 + MONOTONE_SLACK),
        Direction::Increasing => w[0] <= w[1] * (1.0 + MONOTONE_SLACK),
    });

    // Sweep x ≤ y keeping the extreme earlier value: for "decreasing" the worst
    // pair maximises φ(y)/φ(x), for "increasing" it maximises φ(x)/φ(y).
    let mut constant = 1.0f64;
    let mut witness = (ts[0], ts[0]);
    let mut best_idx = 0usize;
    for j in 1..phi.len() {
        let better_prefix = match direction {
            Direction::Decreasing => phi[j - 1] < phi[best_idx],
            Direction::Increasing => phi[j - 1] > phi[best_idx],
        };
        if better_prefix {
            best_idx = j - 1;
        }
        let c = match direction {
            Direction::Decreasing => phi[j] / phi[best_idx],
            Direction::Increasing => phi[best_idx] / phi[j],
        };
        if c > constant {
            constant = c;
            witness = (ts[best_idx], ts[j]);
        }
    }
    if holds_strictly {
        constant = 1.0;
    }

    Ok(MonotoneReport {
        exponent: p,
        direction,
        holds_strictly,
        holds_boundedly: holds_strictly || constant <= bounded_limit,
        constant,
        witness,
    })
}

/// Numerical proxy for `lim_{t→0⁺} h(t)/t^e = 0`.
///
/// Looks at the 32 grid points closest to 0. Returns `Ok(true)` when the ratio
/// decreases monotonically toward 0 across them by a factor of at least 10,
/// `Ok(false)` when it is monotone but does not decrease that much (plateau or
/// growth), and [`Error::Inconclusive`] when the tail is not monotone.
pub fn limit_ratio_is_zero<W: Weight + ?Sized>(h: &W, e: f64, grid: &SampleGrid) -> Result<bool> {
    const TAIL: usize = 32;
    let ts = grid.points();
    let tail = &ts[..ts.len().min(TAIL)];
    // ordered from the largest t toward 0
    let vals = tail
        .iter()
        .rev()
        .map(|&t| Ok(h.eval(t)? / t.powf(e)))
        .collect::<Result<Vec<f64>>>()?;
    let non_increasing = vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK));
    let non_decreasing = vals.windows(2).all(|w| w[0] <= w[1] * (1.0 + MONOTONE_SLACK));
    if non_increasing {
        let first = vals[0];
        let last = *vals.last().expect("non-empty tail");
        Ok(last * 10.0 <= first)
    } else if non_decreasing {
        Ok(false)
    } else {
        Err(Error::Inconclusive(format!(
            "h(t)/t^{e} is not monotone over the last {} grid points",
            vals.len()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn pure_power_values() {
        let h = LogPowerWeight::power(0.5).unwrap();
        assert_eq!(h.eval(0.25).unwrap(), 0.5);
        assert_eq!(h.t_max(), 0.5);
    }

    #[test]
    fn log_factor_one_at_inverse_e() {
        let h = LogPowerWeight::new(0.5, vec![-1.0]).unwrap();
        let v = h.eval((-1.0f64).exp()).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn log_power_at_e_minus_two() {
        // independent evaluation: t^0.4 = e^{-0.8}, log(1/t) = 2
        let h = LogPowerWeight::new(0.4, vec![2.0]).unwrap();
        let t = (-2.0f64).exp();
        let oracle = (-0.8f64).exp() * 4.0;
        assert!((h.eval(t).unwrap() - oracle).abs() < 1e-14);
        assert!((oracle - 1.79732).abs() < 1e-5);
    }

    #[test]
    fn domain_errors() {
        let h = LogPowerWeight::power(0.5).unwrap();
        assert!(matches!(h.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(h.eval(0.6), Err(Error::Domain(_))));
        assert!(LogPowerWeight::with_t_max(0.5, vec![1.0, 1.0], 0.5).is_err());
        assert!(LogPowerWeight::power(1.0).is_err());
    }

    #[test]
    fn default_t_max_values() {
        assert_eq!(default_t_max(0), 0.5);
        assert!((default_t_max(1) - 1.0 / E).abs() < 1e-16);
        assert!((default_t_max(2) - (-E).exp()).abs() < 1e-16);
        // three iterated logs stay positive at their default bound
        assert!(LogPowerWeight::new(0.3, vec![1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn power_law_ratio_exact() {
        let h = LogPowerWeight::power(0.37).unwrap();
        for &(a, b) in &[(1e-8, 1e-3), (0.01, 0.4), (1e-5, 1e-5 * 1.0001)] {
            let ratio = h.eval(a).unwrap() / h.eval(b).unwrap();
            let exact = (a / b).powf(0.37);
            assert!((ratio / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_examples() {
        let h = LogPowerWeight::power(0.5).unwrap();
        let grid = SampleGrid::certification(h.t_max());
        let r = check_monotone(&h, 0.7, Direction::Decreasing, &grid).unwrap();
        assert!(r.holds_strictly && r.holds_boundedly && r.constant == 1.0);
        let r = check_monotone(&h, 0.3, Direction::Decreasing, &grid).unwrap();
        assert!(!r.holds_strictly);
        // t^{0.2} over [1e-9, 0.5]: sup ratio (0.5/1e-9)^{0.2}
        let expected = (0.5f64 / 1e-9).powf(0.2);
        assert!((r.constant / expected - 1.0).abs() < 1e-9);
        assert!(!r.holds_boundedly);
        assert_eq!(r.witness, (1e-9, 0.5));
    }

    #[test]
    fn inverse_log_correction_is_increasing() {
        // φ(t) = (log 1/t)^{-1}; φ'(t) = 1 / (t (log 1/t)^2) > 0 on (0, 1)
        let h = LogPowerWeight::with_t_max(0.4, vec![-1.0], (-2.0f64).exp()).unwrap();
        let grid = SampleGrid::certification(h.t_max());
        let derivative_sign_positive = grid.points().iter().all(|&t| {
            let l = -t.ln();
            1.0 / (t * l * l) > 0.0
        });
        assert!(derivative_sign_positive);
        let inc = check_monotone(&h, 0.4, Direction::Increasing, &grid).unwrap();
        assert!(inc.holds_strictly);
        let dec = check_monotone(&h, 0.4, Direction::Decreasing, &grid).unwrap();
        assert!(!dec.holds_strictly);
        // the bounded constant is the ratio range log(1e9) / 2 on the grid
        assert!((dec.constant - 1e9f64.ln() / 2.0).abs() < 1e-9);
        assert!(!dec.holds_boundedly);
    }

    #[test]
    fn limit_examples() {
        let h = LogPowerWeight::power(0.4).unwrap();
        let deep = SampleGrid::deep(h.t_max());
        assert!(limit_ratio_is_zero(&h, 0.3, &deep).unwrap());
        assert!(!limit_ratio_is_zero(&h, 0.4, &deep).unwrap());
        let hl = LogPowerWeight::new(0.4, vec![1.0]).unwrap();
        let deep = SampleGrid::deep(hl.t_max());
        assert!(!limit_ratio_is_zero(&hl, 0.4, &deep).unwrap());
    }

    #[test]
    fn limit_inconclusive_on_oscillation() {
        struct Wiggle;
        impl Weight for Wiggle {
            fn eval(&self, t: f64) -> Result<f64> {
                Ok(t * (2.0 + (1.0 / t).ln().sin()))
            }
            fn t_max(&self) -> f64 {
                0.5
            }
        }
        let grid = SampleGrid::geometric(1e-40, 1e-20, 64).unwrap();
        assert!(matches!(
            limit_ratio_is_zero(&Wiggle, 1.0, &grid),
            Err(Error::Inconclusive(_))
        ));
    }

    #[test]
    fn decreasing_and_increasing_only_both_when_constant() {
        let h = LogPowerWeight::power(0.45).unwrap();
        let grid = SampleGrid::certification(h.t_max());
        for &p in &[0.2, 0.45, 0.7] {
            let d = check_monotone(&h, p, Direction::Decreasing, &grid).unwrap();
            let i = check_monotone(&h, p, Direction::Increasing, &grid).unwrap();
            assert_eq!(d.holds_strictly && i.holds_strictly, p == 0.45);
        }
    }
}
