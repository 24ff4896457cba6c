//! Zero sequences of Blaschke products: generators, condition reports and the
//! `blaschke-zeros v1` text format.
//!
//! Zeros are stored by their distance to the boundary `1 − r_n` as well as by
//! `r_n`, so that quantities such as `1 − r r_n` stay accurate when both
//! radii are within `1e-12` of the circle.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kahan::{kahan_sum, KahanSum};
use crate::weights::Weight;

const TWO_PI: f64 = 2.0 * PI;

/// Golden angle `π(3 − √5)`.
pub const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    r: f64,
    one_minus_r: f64,
    theta: f64,
    point: Complex64,
    direction: Complex64,
}

impl Zero {
    /// Builds a zero from its distance to the unit circle and its argument.
    pub fn from_gap(one_minus_r: f64, theta: f64) -> Result<Self> {
        if !(one_minus_r > 0.0 && one_minus_r < 1.0) {
            return Err(Error::Domain(format!("1 - r = {one_minus_r} not in (0,1)")));
        }
        if !theta.is_finite() {
            return Err(Error::Domain("non-finite argument".into()));
        }
        let theta = theta.rem_euclid(TWO_PI);
        let r = 1.0 - one_minus_r;
        let direction = Complex64::from_polar(1.0, theta);
        Ok(Self { r, one_minus_r, theta, point: direction * r, direction })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("zero modulus r = {r} not in (0,1)")));
        }
        Self::from_gap(1.0 - r, theta)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn one_minus_r(&self) -> f64 {
        self.one_minus_r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn point(&self) -> Complex64 {
        self.point
    }

    /// `e^{iθ_n}`.
    pub fn direction(&self) -> Complex64 {
        self.direction
    }

    /// `1 − r_n²` computed from the gap.
    pub fn one_minus_r_sq(&self) -> f64 {
        self.one_minus_r * (2.0 - self.one_minus_r)
    }

    pub fn rotated(&self, phi: f64) -> Self {
        Self::from_gap(self.one_minus_r, self.theta + phi).expect("rotation keeps gap valid")
    }
}

/// `1 − conj(w) z` for two points given in gap/angle form, accurate when both
/// points are close to the boundary.
pub(crate) fn one_minus_conj_product(
    z_gap: f64,
    z_dir: Complex64,
    w_gap: f64,
    w_dir: Complex64,
) -> Complex64 {
    let rz = 1.0 - z_gap;
    let rw = 1.0 - w_gap;
    // e^{i(θz − θw)}; 1 − cos φ = |e^{iθz} − e^{iθw}|² / 2
    let rot = z_dir * w_dir.conj();
    let chord_sq = (z_dir - w_dir).norm_sqr();
    let one_minus_rr = z_gap + w_gap - z_gap * w_gap;
    Complex64::new(one_minus_rr + rz * rw * 0.5 * chord_sq, -rz * rw * rot.im)
}

/// Pseudohyperbolic distance `|z − w| / |1 − conj(w) z|`.
pub fn pseudo_hyperbolic(a: &Zero, b: &Zero) -> f64 {
    let chord_sq = (a.direction - b.direction).norm_sqr();
    let rr = a.r * b.r;
    let diff_sq = (a.one_minus_r - b.one_minus_r).powi(2) + rr * chord_sq;
    let one_minus_rr = a.one_minus_r + b.one_minus_r - a.one_minus_r * b.one_minus_r;
    let denom_sq = one_minus_rr * one_minus_rr + rr * chord_sq;
    (diff_sq / denom_sq).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleMode {
    /// All zeros on the positive real axis.
    Radial,
    /// `θ_n = n · golden angle (mod 2π)`, an equidistributed deterministic spread.
    Golden,
    /// Independent uniform angles from a seeded generator.
    Random { seed: u64 },
}

impl AngleMode {
    fn angles(&self, n: usize) -> Vec<f64> {
        match *self {
            AngleMode::Radial => vec![0.0; n],
            AngleMode::Golden => (0..n)
                .map(|k| (k as f64 * GOLDEN_ANGLE).rem_euclid(TWO_PI))
                .collect(),
            AngleMode::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n).map(|_| rng.gen_range(0.0..TWO_PI)).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    /// `1 − r_n = n^{−s/α}` for `n = 2, …, N+1`.
    RadialPower { s: f64, alpha: f64 },
    /// `1 − r_n = q^n` for `n = 1, …, N`.
    Geometric { q: f64 },
    /// An explicit list (read from a file or built by hand).
    AdHoc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub angles: AngleMode,
    pub count: usize,
}

impl Generator {
    /// Upper bound on `Σ_{n>N} (1 − r_n)^e` over the zeros the generator
    /// would produce beyond the stored prefix (0 for ad-hoc lists).
    pub fn tail_power_sum(&self, exponent: f64) -> f64 {
        let n = self.count as f64;
        match self.kind {
            GeneratorKind::RadialPower { s, alpha } => {
                let decay = exponent * s / alpha;
                if decay <= 1.0 {
                    f64::INFINITY
                } else {
                    // Σ_{n ≥ N+2} n^{-decay} ≤ ∫_{N+1}^∞ x^{-decay} dx
                    (n + 1.0).powf(1.0 - decay) / (decay - 1.0)
                }
            }
            GeneratorKind::Geometric { q } => {
                let qe = q.powf(exponent);
                qe.powf(n + 1.0) / (1.0 - qe)
            }
            GeneratorKind::AdHoc => 0.0,
        }
    }

    /// The stored-prefix-independent tail bound on `Σ_{n>N} (1 − r_n)`.
    pub fn tail_bound(&self) -> f64 {
        match self.kind {
            GeneratorKind::RadialPower { s, alpha } => {
                let beta = s / alpha;
                if beta <= 1.0 {
                    f64::INFINITY
                } else {
                    (self.count as f64).powf(1.0 - beta) / (beta - 1.0)
                }
            }
            _ => self.tail_power_sum(1.0),
        }
    }

    /// Whether the angles make a ratio test on moduli conclusive.
    pub fn is_radial(&self) -> bool {
        matches!(self.angles, AngleMode::Radial)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSequence {
    zeros: Vec<Zero>,
    generator: Generator,
    tail_bound: f64,
}

fn canonical_sort(zeros: &mut [Zero]) {
    zeros.sort_by(|a, b| {
        b.one_minus_r
            .total_cmp(&a.one_minus_r)
            .then(a.theta.total_cmp(&b.theta))
    });
}

impl ZeroSequence {
    /// An explicit finite list; reordered canonically (increasing `r`, then `θ`).
    pub fn from_zeros(mut zeros: Vec<Zero>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Degenerate("empty sequence".into()));
        }
        canonical_sort(&mut zeros);
        let count = zeros.len();
        let radial = zeros.iter().all(|z| z.theta == 0.0);
        Ok(Self {
            zeros,
            generator: Generator {
                kind: GeneratorKind::AdHoc,
                angles: if radial { AngleMode::Radial } else { AngleMode::Random { seed: 0 } },
                count,
            },
            tail_bound: 0.0,
        })
    }

    pub fn from_polar(points: &[(f64, f64)]) -> Result<Self> {
        let zeros = points
            .iter()
            .map(|&(r, t)| Zero::from_polar(r, t))
            .collect::<Result<Vec<_>>>()?;
        Self::from_zeros(zeros)
    }

    fn from_generator(gaps: Vec<f64>, generator: Generator) -> Result<Self> {
        let angles = generator.angles.angles(gaps.len());
        let mut zeros = gaps
            .into_iter()
            .zip(angles)
            .map(|(g, t)| Zero::from_gap(g, t))
            .collect::<Result<Vec<_>>>()?;
        canonical_sort(&mut zeros);
        let tail_bound = generator.tail_bound();
        Ok(Self { zeros, generator, tail_bound })
    }

    pub fn zeros(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// All zeros multiplied by `e^{iφ}`.
    pub fn rotated(&self, phi: f64) -> Self {
        let mut zeros: Vec<Zero> = self.zeros.iter().map(|z| z.rotated(phi)).collect();
        canonical_sort(&mut zeros);
        let mut generator = self.generator.clone();
        if phi.rem_euclid(TWO_PI) != 0.0 && generator.is_radial() {
            generator.angles = AngleMode::Random { seed: 0 };
        }
        Self { zeros, generator, tail_bound: self.tail_bound }
    }

    /// Smallest distance `1 − r_n` among stored zeros.
    pub fn min_gap(&self) -> f64 {
        self.zeros.iter().map(|z| z.one_minus_r).fold(f64::INFINITY, f64::min)
    }
}

/// `1 − r_n = n^{−s/α}`, `n = 2, …, N+1`, so that `Σ (1 − r_n)^α = Σ n^{−s}`.
///
/// Rejects `s ≤ 1` unless `allow_divergent` is set.
pub fn gen_radial_power(
    s: f64,
    alpha: f64,
    count: usize,
    angles: AngleMode,
    allow_divergent: bool,
) -> Result<ZeroSequence> {
    if count == 0 {
        return Err(Error::Degenerate("empty sequence".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} not in (0,1)")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("s = {s} must be positive")));
    }
    if s <= 1.0 && !allow_divergent {
        return Err(Error::Divergent(format!(
            "s = {s} <= 1 makes the target sum diverge"
        )));
    }
    let beta = s / alpha;
    let gaps = (2..count + 2).map(|n| (n as f64).powf(-beta)).collect();
    ZeroSequence::from_generator(
        gaps,
        Generator { kind: GeneratorKind::RadialPower { s, alpha }, angles, count },
    )
}

/// `1 − r_n = q^n`, `n = 1, …, N`: the standard exponentially separated sequence.
pub fn gen_geometric(q: f64, count: usize, angles: AngleMode) -> Result<ZeroSequence> {
    if count == 0 {
        return Err(Error::Degenerate("empty sequence".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Domain(format!("q = {q} not in (0,1)")));
    }
    let gaps = (1..=count).map(|n| q.powi(n as i32)).collect();
    ZeroSequence::from_generator(
        gaps,
        Generator { kind: GeneratorKind::Geometric { q }, angles, count },
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub blaschke_sum: f64,
    pub weighted_sum: f64,
    pub separation_ratio: f64,
    pub pseudohyperbolic_delta: f64,
}

/// `sup_n (1 − r_{n+1}) / (1 − r_n)` over consecutive stored zeros (0 for one zero).
pub fn separation_ratio(seq: &ZeroSequence) -> f64 {
    seq.zeros
        .windows(2)
        .map(|w| w[1].one_minus_r / w[0].one_minus_r)
        .fold(0.0, f64::max)
}

/// `inf_n Π_{m≠n} ρ(z_m, z_n)` by direct double loop.
///
/// Each row product is accumulated as a sum of logarithms in index order.
pub fn pseudohyperbolic_delta(seq: &ZeroSequence) -> f64 {
    let zs = &seq.zeros;
    let mut min_log = 0.0f64;
    for (n, zn) in zs.iter().enumerate() {
        let mut acc = KahanSum::new();
        for (m, zm) in zs.iter().enumerate() {
            if m != n {
                acc.add(pseudo_hyperbolic(zm, zn).ln());
            }
        }
        min_log = min_log.min(acc.total());
    }
    min_log.exp()
}

pub fn check_conditions<W: Weight + ?Sized>(seq: &ZeroSequence, h: &W) -> Result<ConditionReport> {
    let blaschke_sum = kahan_sum(seq.zeros.iter().map(|z| z.one_minus_r));
    let weighted_sum = seq
        .zeros
        .iter()
        .map(|z| h.eval(z.one_minus_r))
        .collect::<Result<Vec<_>>>()
        .map(kahan_sum)?;
    Ok(ConditionReport {
        blaschke_sum,
        weighted_sum,
        separation_ratio: separation_ratio(seq),
        pseudohyperbolic_delta: pseudohyperbolic_delta(seq),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarlesonVerdict {
    Carleson,
    NotCarleson,
    /// Non-radial angles: the ratio test failed, but angular separation could
    /// still make the sequence interpolating.
    Indeterminate,
}

/// Default threshold of the exponential-separation ratio test.
pub const DEFAULT_CARLESON_THRESHOLD: f64 = 0.99;

/// Ratio test `sup (1 − r_{n+1})/(1 − r_n) ≤ threshold`.
///
/// A uniform ratio below 1 makes any sequence interpolating, whatever its
/// angles; a ratio test failure is conclusive only for radial sequences.
pub fn is_carleson_radial(seq: &ZeroSequence, threshold: f64) -> Result<CarlesonVerdict> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!("threshold {threshold} not in (0,1)")));
    }
    let ratio = separation_ratio(seq);
    Ok(if ratio <= threshold {
        CarlesonVerdict::Carleson
    } else if seq.zeros.iter().all(|z| z.theta == 0.0) {
        CarlesonVerdict::NotCarleson
    } else {
        CarlesonVerdict::Indeterminate
    })
}

const FILE_MAGIC: &str = "# blaschke-zeros v1 N=";

/// Serialises to the `blaschke-zeros v1` text format.
///
/// The format stores `r`, so zeros whose modulus rounds to 1 cannot be
/// written.
pub fn write_zero_file(seq: &ZeroSequence) -> Result<String> {
    let mut out = String::with_capacity(48 * (seq.len() + 1));
    let _ = writeln!(out, "{FILE_MAGIC}{}", seq.len());
    for z in &seq.zeros {
        if !(z.r < 1.0) {
            return Err(Error::Domain(format!(
                "zero with 1 - r = {:e} is not representable in the r/theta file format",
                z.one_minus_r
            )));
        }
        let _ = writeln!(out, "{:.16e}\t{:.16e}", z.r, z.theta);
    }
    Ok(out)
}

pub fn read_zero_file(text: &str) -> Result<ZeroSequence> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    let count: usize = header
        .strip_prefix(FILE_MAGIC)
        .ok_or_else(|| Error::Parse(format!("bad header line: {header:?}")))?
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad count in header: {e}")))?;
    let mut zeros = Vec::with_capacity(count);
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(r), Some(t), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse(format!("line {}: expected r<TAB>theta", i + 2)));
        };
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
        };
        let (r, theta) = (parse(r)?, parse(t)?);
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Parse(format!("line {}: r = {r} outside (0,1)", i + 2)));
        }
        zeros.push(Zero::from_polar(r, theta)?);
    }
    if zeros.len() != count {
        return Err(Error::Parse(format!(
            "header announces {count} zeros, found {}",
            zeros.len()
        )));
    }
    ZeroSequence::from_zeros(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::LogPowerWeight;

    fn approx(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn radial_power_starts_at_two() {
        let seq = gen_radial_power(2.0, 0.5, 3, AngleMode::Radial, false).unwrap();
        let rs: Vec<f64> = seq.zeros().iter().map(|z| z.r()).collect();
        assert!(approx(rs[0], 0.9375, 1e-15));
        assert!(approx(rs[1], 1.0 - 3f64.powi(-4), 1e-15));
        assert!(approx(rs[2], 1.0 - 4f64.powi(-4), 1e-15));
    }

    #[test]
    fn radial_power_rejects_divergent_unless_requested() {
        assert!(matches!(
            gen_radial_power(1.0, 0.5, 10, AngleMode::Radial, false),
            Err(Error::Divergent(_))
        ));
        assert!(gen_radial_power(0.9, 0.5, 10, AngleMode::Radial, true).is_ok());
    }

    #[test]
    fn single_zero_blaschke_sum() {
        let h = LogPowerWeight::power(0.5).unwrap();
        for &(s, a) in &[(1.5, 0.5), (3.0, 0.25), (1.1, 0.9)] {
            let seq = gen_radial_power(s, a, 1, AngleMode::Radial, false).unwrap();
            let rep = check_conditions(&seq, &h).unwrap();
            assert!(approx(rep.blaschke_sum, 2f64.powf(-s / a), 1e-14));
            assert_eq!(rep.pseudohyperbolic_delta, 1.0);
            assert_eq!(rep.separation_ratio, 0.0);
        }
    }

    #[test]
    fn weighted_sum_approaches_zeta() {
        // Σ_{n≥2} n^{-1.5} = ζ(1.5) − 1; tail beyond N+1 via the integral oracle
        let zeta_1_5 = 2.612_375_348_685_488;
        let seq = gen_radial_power(1.5, 0.5, 1000, AngleMode::Radial, false).unwrap();
        let h = LogPowerWeight::power(0.5).unwrap();
        let rep = check_conditions(&seq, &h).unwrap();
        let tail = seq.generator().tail_power_sum(0.5);
        let estimate = rep.weighted_sum + tail;
        // the integral tail over-counts by at most half the first omitted term
        assert!((estimate - (zeta_1_5 - 1.0)).abs() < 1002f64.powf(-1.5));
        assert!((estimate - 1.612).abs() < 1e-3);
    }

    #[test]
    fn geometric_sums() {
        let h = LogPowerWeight::power(0.5).unwrap();
        let seq = gen_geometric(0.9, 50, AngleMode::Radial).unwrap();
        let rep = check_conditions(&seq, &LogPowerWeight::with_t_max(0.5, vec![], 0.95).unwrap()).unwrap();
        let closed = 0.9 * (1.0 - 0.9f64.powi(50)) / 0.1;
        assert!(approx(rep.blaschke_sum, closed, 1e-10));
        assert!((closed - 8.9536).abs() < 1e-4);
        // blaschke_sum + tail reproduces the full geometric series
        assert!(approx(rep.blaschke_sum + seq.tail_bound(), 9.0, 1e-10));

        let seq = gen_geometric(0.5, 20, AngleMode::Radial).unwrap();
        let rep = check_conditions(&seq, &h).unwrap();
        assert!(approx(rep.separation_ratio, 0.5, 1e-15));
        assert!(approx(rep.blaschke_sum + seq.tail_bound(), 1.0, 1e-10));
    }

    #[test]
    fn geometric_half_delta_matches_brute_force() {
        let seq = gen_geometric(0.5, 10, AngleMode::Radial).unwrap();
        let delta = pseudohyperbolic_delta(&seq);
        // independent oracle: |z − w| / |1 − conj(w) z| in plain complex arithmetic
        let zs: Vec<Complex64> = seq.zeros().iter().map(|z| z.point()).collect();
        let brute = (0..zs.len())
            .map(|n| {
                (0..zs.len())
                    .filter(|&m| m != n)
                    .map(|m| (zs[m] - zs[n]).norm() / (1.0 - zs[n].conj() * zs[m]).norm())
                    .product::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(approx(delta, brute, 1e-12));
        assert!((delta - 0.019_135_243_301_794).abs() < 1e-12);
        // neighbours on both sides: Π_k ((1 − 2^{-k}) / (1 + 2^{-k}))² bounds the row products
        let one_side: f64 = (1..60)
            .map(|k| {
                let x = 2f64.powi(-k);
                (1.0 - x) / (1.0 + x)
            })
            .product();
        assert!(delta > one_side * one_side);
    }

    #[test]
    fn angular_spread_raises_delta() {
        let seq = gen_geometric(0.5, 20, AngleMode::Golden).unwrap();
        let delta = pseudohyperbolic_delta(&seq);
        assert!((delta - 0.726_092_458_983).abs() < 1e-9);
    }

    #[test]
    fn delta_invariances() {
        let seq = gen_radial_power(1.5, 0.5, 30, AngleMode::Random { seed: 3 }, false).unwrap();
        let d = pseudohyperbolic_delta(&seq);
        let rot = pseudohyperbolic_delta(&seq.rotated(1.234));
        assert!((d - rot).abs() < 1e-12);
    }

    #[test]
    fn polynomial_ratio_not_separated() {
        // 1 − r_n = n^{-2}, N = 50 zeros starting at n = 2
        let pts: Vec<(f64, f64)> = (2..=51).map(|n| (1.0 - 1.0 / (n * n) as f64, 0.0)).collect();
        let seq = ZeroSequence::from_polar(&pts).unwrap();
        let ratio = separation_ratio(&seq);
        assert!(approx(ratio, (50.0f64 / 51.0).powi(2), 1e-12));
        assert!((ratio - 0.9612).abs() < 1e-4);
    }

    #[test]
    fn carleson_ratio_test() {
        let geo = gen_geometric(0.5, 20, AngleMode::Radial).unwrap();
        assert_eq!(is_carleson_radial(&geo, 0.9).unwrap(), CarlesonVerdict::Carleson);
        let geo95 = gen_geometric(0.95, 40, AngleMode::Radial).unwrap();
        assert_eq!(is_carleson_radial(&geo95, 0.9).unwrap(), CarlesonVerdict::NotCarleson);
        // (n/(n+1))^4 exceeds 0.99 once n > 398
        let poly = gen_radial_power(2.0, 0.5, 1000, AngleMode::Radial, false).unwrap();
        assert_eq!(
            is_carleson_radial(&poly, DEFAULT_CARLESON_THRESHOLD).unwrap(),
            CarlesonVerdict::NotCarleson
        );
        let spread = gen_radial_power(2.0, 0.5, 1000, AngleMode::Golden, false).unwrap();
        assert_eq!(
            is_carleson_radial(&spread, DEFAULT_CARLESON_THRESHOLD).unwrap(),
            CarlesonVerdict::Indeterminate
        );
    }

    #[test]
    fn zero_file_round_trip_and_rejection() {
        let seq = gen_radial_power(1.3, 0.4, 25, AngleMode::Random { seed: 7 }, false).unwrap();
        let text = write_zero_file(&seq).unwrap();
        assert!(text.starts_with("# blaschke-zeros v1 N=25\n"));
        let back = read_zero_file(&text).unwrap();
        for (a, b) in seq.zeros().iter().zip(back.zeros()) {
            assert_eq!(a.r(), b.r());
            assert_eq!(a.theta(), b.theta());
        }
        assert!(read_zero_file("# blaschke-zeros v1 N=1\n1.0\t0.0\n").is_err());
        assert!(read_zero_file("# blaschke-zeros v1 N=1\n-0.5\t0.0\n").is_err());
        assert!(read_zero_file("# blaschke-zeros v1 N=2\n0.5\t0.0\n").is_err());
        assert!(read_zero_file("# other v1 N=1\n0.5\t0.0\n").is_err());
    }

    #[test]
    fn canonical_order_is_increasing_r() {
        let seq = ZeroSequence::from_polar(&[(0.9, 1.0), (0.5, 2.0), (0.9, 0.5), (0.7, 0.0)]).unwrap();
        let got: Vec<(f64, f64)> = seq.zeros().iter().map(|z| (z.r(), z.theta())).collect();
        assert_eq!(got[0], (0.5, 2.0));
        assert_eq!(got[1].0, 0.7);
        assert_eq!(got[2], (0.9, 0.5));
        assert_eq!(got[3], (0.9, 1.0));
    }
}
