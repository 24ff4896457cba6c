//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a seeded partition.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::kahan::KahanSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub panels_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Target `abs_error_estimate ≤ rel_tol·|value|`.
    pub rel_tol: f64,
    /// Absolute error that is always accepted.
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Split panels at nodes where the integrand falls below `1e-12` of the
    /// largest value seen, instead of plain bisection.
    pub split_near_zeros: bool,
}

impl QuadOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: 0.0, max_panels: 200_000, split_near_zeros: false }
    }
}

/// Relative threshold for near-zero detection.
pub const NEAR_ZERO: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Interior node with the smallest integrand value, with that value.
    low_node: (f64, f64),
    peak: f64,
}

#[derive(Debug, Clone, Copy)]
struct Ranked(Panel, usize);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .total_cmp(&other.0.error)
            .then_with(|| other.1.cmp(&self.1))
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[7] * fc;
    let mut res_g = WG[3] * fc;
    let mut res_abs = res_k.abs();
    let mut fv = [(0.0, 0.0); 7];
    let mut low_node = (center, fc.abs());
    let mut peak = fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let (x1, x2) = (center - dx, center + dx);
        let (f1, f2) = (f(x1), f(x2));
        fv[j] = (f1, f2);
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
        for (x, v) in [(x1, f1.abs()), (x2, f2.abs())] {
            if v < low_node.1 {
                low_node = (x, v);
            }
            peak = peak.max(v);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j].0 - mean).abs() + (fv[j].1 - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if roundoff > f64::MIN_POSITIVE {
        error = error.max(roundoff);
    }
    Panel { a, b, value, error, low_node, peak }
}

/// Integrates `f` over `[breaks[0], breaks.last()]` starting from the panels
/// delimited by `breaks` (strictly increasing, at least two points).
pub fn integrate<F: Fn(f64) -> f64>(f: F, breaks: &[f64], opts: &QuadOptions) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("quadrature breakpoints must be strictly increasing".into()));
    }
    if !(opts.rel_tol > 0.0) && !(opts.abs_tol > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }
    let mut heap = BinaryHeap::with_capacity(2 * breaks.len());
    let mut serial = 0usize;
    let mut peak = 0.0f64;
    for w in breaks.windows(2) {
        let p = gk15(&f, w[0], w[1]);
        peak = peak.max(p.peak);
        heap.push(Ranked(p, serial));
        serial += 1;
    }

    let totals = |heap: &BinaryHeap<Ranked>| {
        let mut v = KahanSum::new();
        let mut e = KahanSum::new();
        for r in heap.iter() {
            v.add(r.0.value);
            e.add(r.0.error);
        }
        (v.total(), e.total())
    };
    let (mut value, mut error) = totals(&heap);
    let mut since_refresh = 0usize;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol {
            let (v, e) = totals(&heap);
            value = v;
            error = e;
            if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
                break;
            }
        }
        if heap.len() >= opts.max_panels {
            break;
        }
        let Some(Ranked(worst, _)) = heap.peek().copied() else { break };
        let mut mid = 0.5 * (worst.a + worst.b);
        if opts.split_near_zeros {
            let (x, v) = worst.low_node;
            let width = worst.b - worst.a;
            if v < NEAR_ZERO * peak && x > worst.a + 1e-3 * width && x < worst.b - 1e-3 * width {
                mid = x;
            }
        }
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()) {
            // cannot subdivide further
            break;
        }
        heap.pop();
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        peak = peak.max(left.peak).max(right.peak);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(Ranked(left, serial));
        heap.push(Ranked(right, serial + 1));
        serial += 2;
        since_refresh += 1;
        if since_refresh == 64 {
            let (v, e) = totals(&heap);
            value = v;
            error = e;
            since_refresh = 0;
        }
    }

    let mut panels: Vec<Panel> = heap.into_iter().map(|r| r.0).collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut v = KahanSum::new();
    let mut e = KahanSum::new();
    for p in &panels {
        v.add(p.value);
        e.add(p.error);
    }
    let result = QuadResult { value: v.total(), abs_error_estimate: e.total(), panels_used: panels.len() };
    if result.abs_error_estimate <= opts.abs_tol.max(opts.rel_tol * result.value.abs()) {
        Ok(result)
    } else {
        Err(Error::ToleranceNotMet { value: result.value, error_estimate: result.abs_error_estimate })
    }
}

/// `n` equal panels on `[a, b]` merged with extra interior breakpoints.
pub fn merge_breaks(a: f64, b: f64, n: usize, extra: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let n = n.max(1);
    let mut pts: Vec<f64> = (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect();
    pts[n] = b;
    pts.extend(extra.into_iter().filter(|x| *x > a && *x < b));
    pts.sort_by(f64::total_cmp);
    let min_gap = 1e-14 * (b - a).abs().max(1.0);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for x in pts {
        match out.last() {
            Some(&last) if x - last <= min_gap => {}
            _ => out.push(x),
        }
    }
    if let Some(last) = out.last_mut() {
        *last = b;
    }
    if out.len() >= 2 && out[out.len() - 2] >= b {
        out.remove(out.len() - 2);
    }
    out
}
