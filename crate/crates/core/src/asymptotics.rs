//! Estimation-lemma sums, growth-exponent fits on radial grids, and the
//! theorem-verification harness.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::means::{mean_gap, MeanSpec};
use crate::modelspace::{
    bergman_sigma_mean_gap, model_hypotheses, random_unit_betas, sigma_mean_gap, ModelFunction, SigmaSpec,
};
use crate::sequences::{check_conditions, gen_geometric, gen_radial_power, GeneratorKind, ZeroSequence};
use crate::weights::{
    check_monotone, limit_ratio_is_zero, Direction, LogPowerWeight, MonotoneReport, SampleGrid, Weight,
};

/// Smallest admissible `1 − r` on a radial grid.
pub const MIN_GRID_GAP: f64 = 1e-7;

/// Dead-band on the tail slope of a ratio series that separates
/// "decreasing" from "plateau".
pub const TREND_DEAD_BAND: f64 = 0.02;

/// Radii `r_k` with `1 − r_k = 10^{−k}` on a log-spaced set of exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    gaps: Vec<f64>,
    k_min: f64,
    k_max: f64,
}

impl RadialGrid {
    pub fn log_spaced(k_min: f64, k_max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(k_min > 0.0 && k_max > k_min) {
            return Err(Error::Domain(format!(
                "radial grid needs 0 < k_min < k_max and at least 2 points (got {k_min}, {k_max}, {n})"
            )));
        }
        let gaps = (0..n)
            .map(|i| 10f64.powf(-(k_min + (k_max - k_min) * i as f64 / (n - 1) as f64)))
            .collect();
        Self::checked(gaps, k_min, k_max)
    }

    /// `1 − r ∈ {10^{−1.5}, …, 10^{−6}}`, ten points.
    pub fn standard() -> Self {
        Self::log_spaced(1.5, 6.0, 10).expect("standard grid is valid")
    }

    /// From explicit gaps `1 − r`, which must strictly decrease.
    pub fn from_gaps(gaps: Vec<f64>) -> Result<Self> {
        let (Some(&first), Some(&last)) = (gaps.first(), gaps.last()) else {
            return Err(Error::Domain("empty radial grid".into()));
        };
        Self::checked(gaps, -first.log10(), -last.log10())
    }

    fn checked(gaps: Vec<f64>, k_min: f64, k_max: f64) -> Result<Self> {
        if gaps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Domain("radial grid must be strictly increasing in r".into()));
        }
        if gaps.iter().any(|&t| !(t >= MIN_GRID_GAP && t < 1.0)) {
            return Err(Error::Domain(format!("radial grid gaps must lie in [{MIN_GRID_GAP}, 1)")));
        }
        Ok(Self { gaps, k_min, k_max })
    }

    /// `1 − r` per point, in grid order.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn radii(&self) -> Vec<f64> {
        self.gaps.iter().map(|t| 1.0 - t).collect()
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn k_range(&self) -> (f64, f64) {
        (self.k_min, self.k_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    /// Tail slope below the dead-band: evidence for `o(1)`.
    Decreasing,
    /// Tail slope inside the dead-band: `O(1)`.
    Plateau,
    Increasing,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Decreasing => "decreasing",
            Trend::Plateau => "plateau",
            Trend::Increasing => "increasing",
        })
    }
}

/// Sign of the least-squares slope of `log values` against `log 1/(1 − r)`
/// over the last three grid points, with dead-band [`TREND_DEAD_BAND`].
pub fn decide_trend(gaps: &[f64], values: &[f64]) -> Trend {
    let n = gaps.len().min(values.len());
    if n < 2 {
        return Trend::Plateau;
    }
    let lo = n.saturating_sub(3);
    let tail = &values[lo..n];
    if tail.iter().any(|&v| !(v > 0.0)) {
        return if tail.last().is_some_and(|&v| v <= 0.0) { Trend::Decreasing } else { Trend::Increasing };
    }
    let x: Vec<f64> = gaps[lo..n].iter().map(|t| -t.ln()).collect();
    let y: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    let (slope, _) = line_fit(&x, &y);
    if slope < -TREND_DEAD_BAND {
        Trend::Decreasing
    } else if slope > TREND_DEAD_BAND {
        Trend::Increasing
    } else {
        Trend::Plateau
    }
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaParams {
    pub p: f64,
    pub q: f64,
}

impl LemmaParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && q > 0.0) {
            return Err(Error::Domain(format!("lemma exponents must be positive (p = {p}, q = {q})")));
        }
        Ok(Self { p, q })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaSum {
    /// Exact sum over the stored zeros.
    pub value: f64,
    /// Upper bound on the contribution of the zeros the generator would add.
    pub tail_bound: f64,
}

/// `Σ (1 − r_n)^p / (1 − r r_n)^q` with `1 − r = one_minus_r`.
///
/// The generator tail is bounded by `Σ_{n>N} (1 − r_n)^p / (1 − r)^q`.
pub fn lemma_sum_gap(seq: &ZeroSequence, params: &LemmaParams, one_minus_r: f64) -> Result<LemmaSum> {
    if !(one_minus_r > 0.0 && one_minus_r <= 1.0) {
        return Err(Error::Domain(format!("radius with 1 - r = {one_minus_r} outside [0,1)")));
    }
    let t = one_minus_r;
    let mut acc = KahanSum::new();
    for z in seq.zeros() {
        let tn = z.one_minus_r();
        let denom = t + tn - t * tn;
        acc.add(tn.powf(params.p) / denom.powf(params.q));
    }
    let tail_bound = seq.generator().tail_power_sum(params.p) / t.powf(params.q);
    Ok(LemmaSum { value: acc.total(), tail_bound })
}

pub fn lemma_sum(seq: &ZeroSequence, params: &LemmaParams, r: f64) -> Result<LemmaSum> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius r = {r} outside [0,1)")));
    }
    lemma_sum_gap(seq, params, 1.0 - r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    /// `lemma_sum(r)·(1 − r)^{q−p}·h(1 − r)` per grid point.
    pub ratios: Vec<f64>,
    pub tail_bounds: Vec<f64>,
    pub sup_ratio: f64,
    pub trend: Trend,
    /// Whether the sampled ratio `h(t)/t^{p−q}` tends to zero (`None` when
    /// the sampled tail is not monotone).
    pub limit_zero: Option<bool>,
    pub decreasing: MonotoneReport,
    pub increasing: MonotoneReport,
    /// Every sampled `(n, r)` satisfies the per-term inequality.
    pub per_term_ok: bool,
    /// Largest `lhs / rhs` of the per-term inequality.
    pub per_term_worst: f64,
}

/// Checks the lemma's growth bound along a radial grid.
///
/// Requires `h(t)/t^p` (boundedly) decreasing and `h(t)/t^{p−q}` (boundedly)
/// increasing on the certification grid.
pub fn lemma_bound_check(
    seq: &ZeroSequence,
    h: &LogPowerWeight,
    params: &LemmaParams,
    grid: &RadialGrid,
) -> Result<LemmaReport> {
    let (p, q) = (params.p, params.q);
    let cert = SampleGrid::certification(h.t_max());
    let decreasing = check_monotone(h, p, Direction::Decreasing, &cert)?;
    let increasing = check_monotone(h, p - q, Direction::Increasing, &cert)?;
    if !(decreasing.holds_boundedly && increasing.holds_boundedly) {
        return Err(Error::Hypothesis(format!(
            "h(t)/t^{p} decreasing: {} (C = {:.3}); h(t)/t^{} increasing: {} (C = {:.3})",
            decreasing.holds_boundedly,
            decreasing.constant,
            p - q,
            increasing.holds_boundedly,
            increasing.constant
        )));
    }
    let limit_zero = match limit_ratio_is_zero(h, p - q, &SampleGrid::deep(h.t_max())) {
        Ok(b) => Some(b),
        Err(Error::Inconclusive(_)) => None,
        Err(e) => return Err(e),
    };

    let mut ratios = Vec::with_capacity(grid.len());
    let mut tail_bounds = Vec::with_capacity(grid.len());
    for &t in grid.gaps() {
        let s = lemma_sum_gap(seq, params, t)?;
        let scale = t.powf(q - p) * h.eval(t)?;
        ratios.push(s.value * scale);
        tail_bounds.push(s.tail_bound * scale);
    }

    let c = decreasing.constant * increasing.constant;
    let mut per_term_worst = 0.0f64;
    let h_terms: Vec<(f64, f64)> = seq
        .zeros()
        .iter()
        .filter(|z| z.one_minus_r() <= h.t_max())
        .map(|z| Ok((z.one_minus_r(), h.eval(z.one_minus_r())?)))
        .collect::<Result<_>>()?;
    for &t in grid.gaps() {
        let denom_r = t.powf(q - p) * h.eval(t)?;
        for &(tn, htn) in &h_terms {
            let lhs = tn.powf(p) / (t + tn - t * tn).powf(q);
            let rhs = c * htn / denom_r;
            per_term_worst = per_term_worst.max(lhs / rhs);
        }
    }

    let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let trend = decide_trend(grid.gaps(), &ratios);
    Ok(LemmaReport {
        ratios,
        tail_bounds,
        sup_ratio,
        trend,
        limit_zero,
        decreasing,
        increasing,
        per_term_ok: per_term_worst <= 1.0 + 1e-12,
        per_term_worst,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    /// Exponent of `1/(1 − r)`.
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    /// Grid indices used.
    pub window: Range<usize>,
    /// Fitted exponents of `log_k 1/(1 − r)`, `k = 1, …` (empty for a plain fit).
    pub log_exponents: Vec<f64>,
}

fn window_of(n: usize, window_fraction: f64) -> Result<Range<usize>> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Domain(format!("window fraction {window_fraction} not in (0,1]")));
    }
    let len = ((n as f64) * window_fraction).ceil() as usize;
    let len = len.min(n);
    Ok(n - len..n)
}

/// Least-squares line of `log value` against `log 1/(1 − r)` over the tail
/// window of the grid.
pub fn fit_growth(gaps: &[f64], values: &[f64], window_fraction: f64) -> Result<GrowthFit> {
    fit_growth_log_corrected(gaps, values, window_fraction, 0)
}

/// As [`fit_growth`], with `log_terms` extra regressors
/// `log(log_k 1/(1 − r))`, `k = 1..=log_terms`.
pub fn fit_growth_log_corrected(
    gaps: &[f64],
    values: &[f64],
    window_fraction: f64,
    log_terms: usize,
) -> Result<GrowthFit> {
    if gaps.len() != values.len() {
        return Err(Error::Domain("grid and values differ in length".into()));
    }
    let window = window_of(gaps.len(), window_fraction)?;
    let cols = 2 + log_terms;
    if window.len() < 3.max(cols) {
        return Err(Error::Degenerate(format!(
            "{} points in the fit window, need at least {}",
            window.len(),
            3.max(cols)
        )));
    }
    let mut rows = Vec::with_capacity(window.len());
    let mut ys = Vec::with_capacity(window.len());
    for i in window.clone() {
        let (t, v) = (gaps[i], values[i]);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("non-positive value {v} at grid index {i}")));
        }
        let mut row = vec![1.0, -t.ln()];
        let mut l = -t.ln();
        for _ in 0..log_terms {
            if !(l > 1.0) {
                return Err(Error::Domain(format!("iterated log not above 1 at 1 - r = {t}")));
            }
            row.push(l.ln());
            l = l.ln();
        }
        rows.push(row);
        ys.push(v.ln());
    }
    let coef = least_squares(&rows, &ys)?;
    let resid: f64 = rows
        .iter()
        .zip(&ys)
        .map(|(row, y)| {
            let fit: f64 = row.iter().zip(&coef).map(|(a, b)| a * b).sum();
            (y - fit).powi(2)
        })
        .sum();
    Ok(GrowthFit {
        slope: coef[1],
        intercept: coef[0],
        residual_rms: (resid / rows.len() as f64).sqrt(),
        window,
        log_exponents: coef[2..].to_vec(),
    })
}

/// Solves the normal equations with column centring and partial pivoting.
fn least_squares(rows: &[Vec<f64>], ys: &[f64]) -> Result<Vec<f64>> {
    let m = rows.len() as f64;
    let k = rows[0].len();
    // centre every non-constant column for conditioning
    let means: Vec<f64> = (0..k).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m).collect();
    let ymean = ys.iter().sum::<f64>() / m;
    let p = k - 1;
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, y) in rows.iter().zip(ys) {
        for i in 0..p {
            let xi = row[i + 1] - means[i + 1];
            for j in 0..p {
                a[i][j] += xi * (row[j + 1] - means[j + 1]);
            }
            a[i][p] += xi * (y - ymean);
        }
    }
    for col in 0..p {
        let piv = (col..p)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("non-empty");
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::Degenerate("singular least-squares system".into()));
        }
        a.swap(col, piv);
        for r in 0..p {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let slopes: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
    let intercept = ymean - slopes.iter().zip(&means[1..]).map(|(s, m)| s * m).sum::<f64>();
    let mut out = vec![intercept];
    out.extend(slopes);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// Circle means of `B′`.
    T31,
    /// Circle means of `B^(ℓ)`.
    T41,
    /// Weighted Bergman means of `B′`.
    T51,
    /// Circle σ-means of `f′`, `f ∈ K_B`.
    T61,
    /// Weighted Bergman σ-means of `f′`, `f ∈ K_B`.
    T62,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::T31 => "T3.1",
            TheoremId::T41 => "T4.1",
            TheoremId::T51 => "T5.1",
            TheoremId::T61 => "T6.1",
            TheoremId::T62 => "T6.2",
        })
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T3.1" => Ok(TheoremId::T31),
            "T4.1" => Ok(TheoremId::T41),
            "T5.1" => Ok(TheoremId::T51),
            "T6.1" => Ok(TheoremId::T61),
            "T6.2" => Ok(TheoremId::T62),
            other => Err(Error::Parse(format!("unknown theorem id {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    I,
    II,
    III,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseId::I => "I",
            CaseId::II => "II",
            CaseId::III => "III",
        })
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" => Ok(CaseId::I),
            "II" => Ok(CaseId::II),
            "III" => Ok(CaseId::III),
            other => Err(Error::Parse(format!("unknown case id {other:?}"))),
        }
    }
}

/// Outcome of the weight certification for a theorem case.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    /// The auxiliary exponent `q` used (`None` for the model-space theorems).
    pub q: Option<f64>,
    pub decreasing: MonotoneReport,
    pub increasing: MonotoneReport,
    /// Whether the increasing ratio tends to zero, i.e. `o(1)` is predicted.
    pub small_o: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCase {
    pub theorem: TheoremId,
    pub case: CaseId,
    pub h: LogPowerWeight,
    pub p: f64,
    pub ell: usize,
    pub gamma: Option<f64>,
    pub expected_exponent: f64,
    pub expect_small_o: bool,
}

/// Closed-form growth exponent of the bound, in powers of `1/(1 − r)`.
pub fn expected_exponent(theorem: TheoremId, alpha: f64, p: f64, ell: usize, gamma: f64) -> f64 {
    let l = ell as f64;
    match theorem {
        TheoremId::T31 => p - 1.0 + alpha,
        TheoremId::T41 => l * p - 1.0 + alpha,
        TheoremId::T51 => p + alpha - gamma - 2.0,
        TheoremId::T61 => (alpha + p - 1.0) / p,
        TheoremId::T62 => (alpha - (1.0 - p) - (1.0 + gamma) * (1.0 + p / 2.0)) / p,
    }
}

const Q_SCAN: usize = 256;

impl TheoremCase {
    /// Validates parameter ranges, certifies the weight hypotheses and fills
    /// in the expected exponent. Fails with a hypothesis error when no
    /// admissible auxiliary exponent exists.
    pub fn new(
        theorem: TheoremId,
        case: CaseId,
        h: LogPowerWeight,
        p: f64,
        ell: usize,
        gamma: Option<f64>,
    ) -> Result<Self> {
        let mut tc = Self::unchecked(theorem, case, h, p, ell, gamma)?;
        tc.expect_small_o = tc.certify()?.small_o;
        Ok(tc)
    }

    /// Validates parameter ranges only.
    pub fn unchecked(
        theorem: TheoremId,
        case: CaseId,
        h: LogPowerWeight,
        p: f64,
        ell: usize,
        gamma: Option<f64>,
    ) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p = {p} must be positive")));
        }
        let need_gamma = matches!(theorem, TheoremId::T51 | TheoremId::T62);
        let g = match (need_gamma, gamma) {
            (true, Some(g)) => g,
            (true, None) => return Err(Error::Domain(format!("{theorem} needs a Bergman weight gamma"))),
            (false, _) => 0.0,
        };
        match theorem {
            TheoremId::T31 | TheoremId::T51 | TheoremId::T61 | TheoremId::T62 if ell != 1 => {
                return Err(Error::Domain(format!("{theorem} concerns the first derivative (ell = 1)")));
            }
            TheoremId::T41 if ell == 0 || ell > crate::jet::MAX_ORDER => return Err(Error::Order(ell)),
            _ => {}
        }
        if theorem == TheoremId::T51 && !(g > -1.0 && g < 0.0) {
            return Err(Error::Domain(format!("{theorem} needs gamma in (-1, 0), got {g}")));
        }
        if matches!(theorem, TheoremId::T61 | TheoremId::T62) {
            let spec = SigmaSpec::new(p)?;
            if theorem == TheoremId::T62 && !(g > -1.0 && g < spec.gamma_max()) {
                return Err(Error::Domain(format!(
                    "{theorem} needs gamma in (-1, {:.6}), got {g}",
                    spec.gamma_max()
                )));
            }
        }
        let expected = expected_exponent(theorem, h.alpha(), p, ell, g);
        Ok(Self {
            theorem,
            case,
            h,
            p,
            ell,
            gamma: need_gamma.then_some(g),
            expected_exponent: expected,
            expect_small_o: false,
        })
    }

    fn gamma_or_zero(&self) -> f64 {
        self.gamma.unwrap_or(0.0)
    }

    /// Exponents `(dec, inc)` for "`h/t^dec` decreasing, `h/t^inc` increasing"
    /// at auxiliary exponent `q`.
    fn exponents(&self, q: f64) -> (f64, f64) {
        let l = self.ell as f64;
        let p = self.p;
        let g = self.gamma_or_zero();
        match self.theorem {
            TheoremId::T31 => (q, 1.0 - q),
            TheoremId::T41 => (q, 1.0 - l * q),
            TheoremId::T51 => (q, 2.0 + g - q),
            TheoremId::T61 => (p / 2.0, 1.0 - p),
            TheoremId::T62 => (p / 2.0, (1.0 - p) + (1.0 + g) * (1.0 + p / 2.0)),
        }
    }

    /// Interval `(lo, hi]` for the auxiliary exponent, already capped by `p`.
    fn q_range(&self) -> Option<(f64, f64)> {
        let l = self.ell as f64;
        let (lo, hi) = match self.theorem {
            TheoremId::T31 => (0.5, 1.0),
            TheoremId::T41 => (1.0 / (l + 1.0), 1.0 / l),
            TheoremId::T51 => (1.0 + self.gamma_or_zero() / 2.0, 1.0),
            TheoremId::T61 | TheoremId::T62 => return None,
        };
        Some((lo, hi.min(self.p)))
    }

    fn certify_at(&self, q: f64) -> Result<Certificate> {
        let (dec, inc) = self.exponents(q);
        let grid = SampleGrid::certification(self.h.t_max());
        let decreasing = check_monotone(&self.h, dec, Direction::Decreasing, &grid)?;
        let increasing = check_monotone(&self.h, inc, Direction::Increasing, &grid)?;
        let small_o = matches!(limit_ratio_is_zero(&self.h, inc, &SampleGrid::deep(self.h.t_max())), Ok(true));
        Ok(Certificate { q: self.q_range().map(|_| q), decreasing, increasing, small_o })
    }

    /// Finds an admissible auxiliary exponent, preferring one that predicts
    /// `o(1)`.
    pub fn certify(&self) -> Result<Certificate> {
        let Some((lo, hi)) = self.q_range() else {
            let c = self.certify_at(0.0)?;
            return if c.decreasing.holds_boundedly && c.increasing.holds_boundedly {
                Ok(c)
            } else {
                Err(Error::Hypothesis(format!(
                    "{}: h(t)/t^{} decreasing = {}, h(t)/t^{} increasing = {}",
                    self.theorem,
                    self.exponents(0.0).0,
                    c.decreasing.holds_boundedly,
                    self.exponents(0.0).1,
                    c.increasing.holds_boundedly
                )))
            };
        };
        if !(hi > lo) {
            return Err(Error::Hypothesis(format!(
                "{}: no auxiliary exponent in ({lo}, {hi}] (p = {} is too small)",
                self.theorem, self.p
            )));
        }
        let a = self.h.alpha();
        let l = self.ell as f64;
        let g = self.gamma_or_zero();
        let mut candidates: Vec<f64> = vec![hi, self.p, a, 1.0 - a, (1.0 - a) / l, 2.0 + g - a];
        candidates.extend((1..=Q_SCAN).map(|k| lo + (hi - lo) * k as f64 / Q_SCAN as f64));
        let mut first_admissible = None;
        for q in candidates.into_iter().filter(|&q| q > lo && q <= hi) {
            let c = self.certify_at(q)?;
            if c.decreasing.holds_boundedly && c.increasing.holds_boundedly {
                if c.small_o {
                    return Ok(c);
                }
                first_admissible.get_or_insert(c);
            }
        }
        first_admissible.ok_or_else(|| {
            Error::Hypothesis(format!(
                "{}: no q in ({lo}, {hi}] makes h(t)/t^q decreasing and the companion ratio increasing",
                self.theorem
            ))
        })
    }

    /// Power applied to the log part of `h` in the predicted bound.
    fn log_power(&self) -> f64 {
        match self.theorem {
            TheoremId::T61 | TheoremId::T62 => 1.0 / self.p,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quad_tol: f64,
    pub slope_tol: f64,
    pub window_fraction: f64,
    /// Seed of the model-space coefficients.
    pub seed: u64,
    /// Added to the expected exponent (harness mutation checks).
    pub expected_offset: f64,
    /// Re-measure the deepest grid point with twice as many zeros.
    pub truncation_check: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quad_tol: 1e-6,
            slope_tol: 0.05,
            window_fraction: 1.0,
            seed: 0,
            expected_offset: 0.0,
            truncation_check: false,
        }
    }
}

/// One CSV row of a radial run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub r: f64,
    pub one_minus_r: f64,
    pub mean_value: f64,
    pub quad_error: f64,
    pub ratio: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub theorem: TheoremId,
    pub case: CaseId,
    pub measured_slope: f64,
    pub expected_exponent: f64,
    pub slope_tol: f64,
    pub pass: bool,
    pub fit: GrowthFit,
    pub rows: Vec<ReportRow>,
    /// Tail trend of `mean / predicted`.
    pub trend: Trend,
    pub certificate: Certificate,
    /// Relative change of the deepest mean when the stored zeros double.
    pub truncation_change: Option<f64>,
}

/// Pass rule of a slope comparison.
pub fn slope_matches(measured: f64, expected: f64, tol: f64) -> bool {
    (measured - expected).abs() <= tol
}

impl VerifyReport {
    /// The same measurements judged against `expected_exponent + offset`.
    pub fn with_expected_offset(&self, offset: f64) -> VerifyReport {
        let expected = self.expected_exponent + offset;
        let mut out = self.clone();
        out.expected_exponent = expected;
        out.pass = slope_matches(self.measured_slope, expected, self.slope_tol);
        let first = self.rows[0];
        for row in &mut out.rows {
            row.predicted *= (row.one_minus_r / first.one_minus_r).powf(-offset);
            row.ratio = row.mean_value / row.predicted;
        }
        let gaps: Vec<f64> = out.rows.iter().map(|r| r.one_minus_r).collect();
        let ratios: Vec<f64> = out.rows.iter().map(|r| r.ratio).collect();
        out.trend = decide_trend(&gaps, &ratios);
        out
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {} measured={:.4} expected={:.4} tol={}",
            if self.pass { "PASS" } else { "FAIL" },
            self.theorem,
            self.measured_slope,
            self.expected_exponent,
            self.slope_tol
        )
    }
}

/// Mean value and quadrature error of the quantity a theorem bounds.
fn measure(case: &TheoremCase, seq: &ZeroSequence, one_minus_r: f64, opts: &VerifyOptions) -> Result<(f64, f64)> {
    match case.theorem {
        TheoremId::T31 | TheoremId::T41 => {
            let q = mean_gap(seq, one_minus_r, &MeanSpec::circle(case.p, case.ell)?, opts.quad_tol)?;
            Ok((q.value, q.abs_error_estimate))
        }
        TheoremId::T51 => {
            let spec = MeanSpec::bergman(case.p, 1, case.gamma_or_zero())?;
            let q = mean_gap(seq, one_minus_r, &spec, opts.quad_tol)?;
            Ok((q.value, q.abs_error_estimate))
        }
        TheoremId::T61 | TheoremId::T62 => {
            let spec = SigmaSpec::new(case.p)?;
            let mf = ModelFunction::new(seq, random_unit_betas(seq.len(), opts.seed))?;
            let m = if case.theorem == TheoremId::T61 {
                sigma_mean_gap(&mf, one_minus_r, &spec, opts.quad_tol)?
            } else {
                bergman_sigma_mean_gap(&mf, one_minus_r, &spec, case.gamma_or_zero(), opts.quad_tol)?
            };
            // error of the 1/σ-th power, to first order
            let rel = m.integral.abs_error_estimate / m.integral.value;
            Ok((m.value, m.value * rel / spec.sigma()))
        }
    }
}

fn doubled(seq: &ZeroSequence) -> Option<ZeroSequence> {
    let g = seq.generator();
    let n = 2 * g.count;
    match g.kind {
        GeneratorKind::RadialPower { s, alpha } => gen_radial_power(s, alpha, n, g.angles, true).ok(),
        GeneratorKind::Geometric { q } => gen_geometric(q, n, g.angles).ok(),
        GeneratorKind::AdHoc => None,
    }
}

/// Measures the theorem's mean over the grid, divides out the log part of
/// the predicted bound, fits the growth exponent and compares it with the
/// closed-form exponent.
pub fn verify_theorem(
    case: &TheoremCase,
    seq: &ZeroSequence,
    grid: &RadialGrid,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let certificate = case.certify()?;
    let h = &case.h;
    if seq.zeros().iter().any(|z| z.one_minus_r() > h.t_max()) {
        return Err(Error::Hypothesis(format!(
            "zeros with 1 - r above the weight's validity bound {}",
            h.t_max()
        )));
    }
    let conditions = check_conditions(seq, h)?;
    if !conditions.weighted_sum.is_finite() {
        return Err(Error::Hypothesis("weighted zero sum is not finite".into()));
    }
    if matches!(case.theorem, TheoremId::T61 | TheoremId::T62) {
        let (dec, inc) = case.exponents(0.0);
        let hyp = model_hypotheses(seq, h, dec, inc)?;
        if !hyp.carleson {
            return Err(Error::Hypothesis(format!(
                "zero sequence is not certified interpolating (ratio {:.3}, delta {:.3})",
                hyp.separation_ratio, hyp.pseudohyperbolic_delta
            )));
        }
    }

    let gaps = grid.gaps();
    let measured: Vec<(f64, f64)> = gaps
        .par_iter()
        .map(|&t| measure(case, seq, t, opts))
        .collect::<Result<Vec<_>>>()?;

    let kappa = case.log_power();
    let logs: Vec<f64> = gaps
        .iter()
        .map(|&t| Ok(h.log_factor(t)?.powf(kappa)))
        .collect::<Result<_>>()?;
    let corrected: Vec<f64> = measured.iter().zip(&logs).map(|((v, _), l)| v * l).collect();
    let fit = fit_growth(gaps, &corrected, opts.window_fraction)?;
    let expected = case.expected_exponent + opts.expected_offset;

    let (t0, v0, l0) = (gaps[0], measured[0].0, logs[0]);
    let rows: Vec<ReportRow> = gaps
        .iter()
        .zip(&measured)
        .zip(&logs)
        .map(|((&t, &(v, e)), &l)| {
            let predicted = v0 * (t / t0).powf(-expected) * (l0 / l);
            ReportRow { r: 1.0 - t, one_minus_r: t, mean_value: v, quad_error: e, ratio: v / predicted, predicted }
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let trend = decide_trend(gaps, &ratios);

    let truncation_change = if opts.truncation_check {
        match doubled(seq) {
            Some(big) => {
                let t = *gaps.last().expect("grid is non-empty");
                let (v_big, _) = measure(case, &big, t, opts)?;
                let v = measured.last().expect("grid is non-empty").0;
                Some(((v_big - v) / v).abs())
            }
            None => None,
        }
    } else {
        None
    };

    let measured_slope = fit.slope;
    Ok(VerifyReport {
        theorem: case.theorem,
        case: case.case,
        measured_slope,
        expected_exponent: expected,
        slope_tol: opts.slope_tol,
        pass: slope_matches(measured_slope, expected, opts.slope_tol),
        fit,
        rows,
        trend,
        certificate,
        truncation_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid() {
        let g = RadialGrid::standard();
        assert_eq!(g.len(), 10);
        assert!((g.gaps()[0] - 10f64.powf(-1.5)).abs() < 1e-17);
        assert!((g.gaps()[9] - 1e-6).abs() < 1e-21);
        assert!(RadialGrid::log_spaced(1.0, 8.0, 5).is_err());
    }

    #[test]
    fn fit_exact_power() {
        let g = RadialGrid::standard();
        let v: Vec<f64> = g.gaps().iter().map(|t| t.powf(-0.3)).collect();
        let f = fit_growth(g.gaps(), &v, 1.0).unwrap();
        assert!((f.slope - 0.3).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
        let c = vec![2.5; 10];
        assert!(fit_growth(g.gaps(), &c, 1.0).unwrap().slope.abs() < 1e-12);
        assert!(matches!(fit_growth(g.gaps(), &v, 0.2), Err(Error::Degenerate(_))));
    }

    #[test]
    fn log_corrected_fit() {
        let g = RadialGrid::standard();
        let v: Vec<f64> = g.gaps().iter().map(|t| t.powf(-0.2) * (-t.ln())).collect();
        let plain = fit_growth(g.gaps(), &v, 1.0).unwrap();
        assert!(plain.slope > 0.25);
        let corr = fit_growth_log_corrected(g.gaps(), &v, 1.0, 1).unwrap();
        assert!((corr.slope - 0.2).abs() < 0.02);
        assert!((corr.log_exponents[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn theorem_ids_round_trip() {
        for id in [TheoremId::T31, TheoremId::T41, TheoremId::T51, TheoremId::T61, TheoremId::T62] {
            assert_eq!(id.to_string().parse::<TheoremId>().unwrap(), id);
        }
        assert!("T7.1".parse::<TheoremId>().is_err());
    }

    #[test]
    fn expected_exponent_table() {
        assert!((expected_exponent(TheoremId::T31, 0.4, 0.8, 1, 0.0) - 0.2).abs() < 1e-15);
        assert!(expected_exponent(TheoremId::T31, 0.3, 0.7, 1, 0.0).abs() < 1e-15);
        assert!(expected_exponent(TheoremId::T41, 0.2, 0.4, 2, 0.0).abs() < 1e-15);
        assert!((expected_exponent(TheoremId::T51, 0.8, 1.6, 1, -0.5) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn trend_dead_band() {
        let g = RadialGrid::standard();
        let flat = vec![1.0; 10];
        assert_eq!(decide_trend(g.gaps(), &flat), Trend::Plateau);
        let dec: Vec<f64> = g.gaps().iter().map(|t| t.powf(0.1)).collect();
        assert_eq!(decide_trend(g.gaps(), &dec), Trend::Decreasing);
        let slow: Vec<f64> = g.gaps().iter().map(|t| t.powf(0.01)).collect();
        assert_eq!(decide_trend(g.gaps(), &slow), Trend::Plateau);
    }
}
