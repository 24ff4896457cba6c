//! Functions in the model space `K_B` spanned by the normalised Cauchy
//! kernels `f_n(z) = (1 − r_n)^{1/2} / (1 − conj(z_n) z)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::asymptotics::{decide_trend, RadialGrid, Trend};
use crate::error::{Error, Result};
use crate::eval::DiscPoint;
use crate::kahan::{ComplexKahanSum, KahanSum};
use crate::means::{bergman_mean_of, circle_mean_of, DiscIntegrand};
use crate::quad::QuadResult;
use crate::sequences::{
    is_carleson_radial, one_minus_conj_product, pseudohyperbolic_delta, separation_ratio, CarlesonVerdict,
    ZeroSequence,
};
use crate::weights::{check_monotone, Direction, LogPowerWeight, MonotoneReport, SampleGrid, Weight};

/// Largest separation ratio accepted for model-space experiments.
pub const CARLESON_RATIO_MAX: f64 = 0.9;
/// Smallest pseudohyperbolic separation accepted for model-space experiments.
pub const CARLESON_DELTA_MIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaSpec {
    p: f64,
    sigma: f64,
    p_conj: f64,
    q_conj: f64,
}

impl SigmaSpec {
    /// `σ = 2p/(p+2)` for `p ∈ (2/3, 1)`.
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 2.0 / 3.0 && p < 1.0) {
            return Err(Error::Domain(format!("p = {p} not in (2/3, 1)")));
        }
        let sigma = 2.0 * p / (p + 2.0);
        let p_conj = 2.0 / sigma;
        let q_conj = (p + 2.0) / 2.0;
        debug_assert!((1.0 / p_conj + 1.0 / q_conj - 1.0).abs() < 1e-14);
        debug_assert!((sigma * q_conj - p).abs() < 1e-14);
        debug_assert!(((2.0 * sigma - 1.0) * q_conj - (1.5 * p - 1.0)).abs() < 1e-14);
        Ok(Self { p, sigma, p_conj, q_conj })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `p′ = 2/σ`.
    pub fn p_conj(&self) -> f64 {
        self.p_conj
    }

    /// `q′ = (p+2)/2`, the exponent conjugate to `p′`.
    pub fn q_conj(&self) -> f64 {
        self.q_conj
    }

    /// Upper end `2σ − 2` of the admissible Bergman weights.
    pub fn gamma_max(&self) -> f64 {
        2.0 * self.sigma - 2.0
    }
}

/// `f = Σ β_n f_n` over the stored zeros of a sequence.
#[derive(Debug, Clone)]
pub struct ModelFunction {
    gap: Vec<f64>,
    dir: Vec<Complex64>,
    point: Vec<Complex64>,
    betas: Vec<Complex64>,
    /// `β_n (1 − r_n)^{1/2}`.
    scaled: Vec<Complex64>,
}

impl ModelFunction {
    pub fn new(seq: &ZeroSequence, betas: Vec<Complex64>) -> Result<Self> {
        if betas.len() != seq.len() {
            return Err(Error::Domain(format!(
                "{} coefficients for {} zeros",
                betas.len(),
                seq.len()
            )));
        }
        if betas.iter().all(|b| *b == Complex64::new(0.0, 0.0)) {
            return Err(Error::Degenerate("all coefficients are zero".into()));
        }
        let zs = seq.zeros();
        let scaled = zs.iter().zip(&betas).map(|(z, b)| b * z.one_minus_r().sqrt()).collect();
        Ok(Self {
            gap: zs.iter().map(|z| z.one_minus_r()).collect(),
            dir: zs.iter().map(|z| z.direction()).collect(),
            point: zs.iter().map(|z| z.point()).collect(),
            betas,
            scaled,
        })
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    fn kernel_denominator(&self, n: usize, p: &DiscPoint) -> Complex64 {
        one_minus_conj_product(p.one_minus_r(), p.direction(), self.gap[n], self.dir[n])
    }

    pub(crate) fn value_at(&self, p: &DiscPoint) -> Complex64 {
        let mut acc = ComplexKahanSum::new();
        for n in 0..self.len() {
            acc.add(self.scaled[n] / self.kernel_denominator(n, p));
        }
        acc.total()
    }

    pub(crate) fn deriv_at(&self, p: &DiscPoint) -> Complex64 {
        let mut acc = ComplexKahanSum::new();
        for n in 0..self.len() {
            let w = self.kernel_denominator(n, p);
            acc.add(self.point[n].conj() * self.scaled[n] / (w * w));
        }
        acc.total()
    }

    /// Gram matrix `G_{mn} = ⟨f_n, f_m⟩ = (1 − r_m)^{1/2}(1 − r_n)^{1/2} / (1 − z_m conj(z_n))`.
    pub fn gram(&self) -> Vec<Vec<Complex64>> {
        let n = self.len();
        let mut g = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for m in 0..n {
            for k in 0..n {
                let w = one_minus_conj_product(self.gap[m], self.dir[m], self.gap[k], self.dir[k]);
                g[m][k] = (self.gap[m] * self.gap[k]).sqrt() / w;
            }
        }
        g
    }
}

/// `f(z)`.
pub fn eval_model(mf: &ModelFunction, z: Complex64) -> Result<Complex64> {
    Ok(mf.value_at(&DiscPoint::from_complex(z)?))
}

/// `f′(z) = Σ conj(z_n) β_n (1 − r_n)^{1/2} / (1 − conj(z_n) z)²`.
pub fn eval_model_deriv(mf: &ModelFunction, z: Complex64) -> Result<Complex64> {
    Ok(mf.deriv_at(&DiscPoint::from_complex(z)?))
}

/// Lower-triangular `L` with `G = L L*`; a pivot that is not safely positive
/// is a degenerate-matrix error.
pub fn cholesky(g: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let n = g.len();
    let mut l = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        let mut d = KahanSum::new();
        d.add(g[j][j].re);
        for k in 0..j {
            d.add(-l[j][k].norm_sqr());
        }
        let pivot = d.total();
        if !(pivot > 1e-14 * g[j][j].re.abs()) {
            return Err(Error::Degenerate(format!(
                "Gram matrix not positive definite at pivot {j} (value {pivot:e}); coincident zeros?"
            )));
        }
        let ljj = pivot.sqrt();
        l[j][j] = Complex64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = ComplexKahanSum::new();
            s.add(g[i][j]);
            for k in 0..j {
                s.add(-(l[i][k] * l[j][k].conj()));
            }
            l[i][j] = s.total() / ljj;
        }
    }
    Ok(l)
}

/// `‖f‖₂ = (β* G β)^{1/2}` through the Cholesky factor.
pub fn norm2(mf: &ModelFunction) -> Result<f64> {
    let l = cholesky(&mf.gram())?;
    let n = mf.len();
    // ‖f‖² = ‖L* β‖²
    let mut acc = KahanSum::new();
    for j in 0..n {
        let mut s = ComplexKahanSum::new();
        for i in j..n {
            s.add(l[i][j].conj() * mf.betas[i]);
        }
        acc.add(s.total().norm_sqr());
    }
    Ok(acc.total().sqrt())
}

/// Coefficients uniformly distributed on the unit sphere of `C^n`.
pub fn random_unit_betas(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// `|f′|` as a disc integrand.
pub struct ModelDerivative<'a>(pub &'a ModelFunction);

impl DiscIntegrand for ModelDerivative<'_> {
    fn modulus(&self, z: &DiscPoint) -> f64 {
        self.0.deriv_at(z).norm()
    }

    fn peaks(&self) -> Vec<(f64, f64)> {
        self.0.dir.iter().zip(&self.0.gap).map(|(d, g)| (d.arg(), *g)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMean {
    /// `(∫ |f′|^σ)^{1/σ}`.
    pub value: f64,
    /// The underlying integral of `|f′|^σ`.
    pub integral: QuadResult,
}

fn root(integral: QuadResult, sigma: f64) -> SigmaMean {
    SigmaMean { value: integral.value.powf(1.0 / sigma), integral }
}

/// `(∫₀^{2π} |f′(re^{iθ})|^σ dθ)^{1/σ}` with the radius given by `1 − r`.
pub fn sigma_mean_gap(mf: &ModelFunction, one_minus_r: f64, spec: &SigmaSpec, quad_tol: f64) -> Result<SigmaMean> {
    let q = circle_mean_of(&ModelDerivative(mf), one_minus_r, spec.sigma, quad_tol)?;
    Ok(root(q, spec.sigma))
}

pub fn sigma_mean(mf: &ModelFunction, r: f64, spec: &SigmaSpec, quad_tol: f64) -> Result<SigmaMean> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain(format!("radius r = {r} outside [0,1)")));
    }
    sigma_mean_gap(mf, 1.0 - r, spec, quad_tol)
}

/// Weighted Bergman analogue of [`sigma_mean_gap`].
pub fn bergman_sigma_mean_gap(
    mf: &ModelFunction,
    one_minus_r: f64,
    spec: &SigmaSpec,
    gamma: f64,
    quad_tol: f64,
) -> Result<SigmaMean> {
    let q = bergman_mean_of(&ModelDerivative(mf), one_minus_r, spec.sigma, gamma, quad_tol)?;
    Ok(root(q, spec.sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisPolicy {
    /// Certificate failures are errors.
    Enforce,
    /// Certificate failures are recorded in the report only.
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelHypotheses {
    pub separation_ratio: f64,
    pub pseudohyperbolic_delta: f64,
    pub carleson: bool,
    pub decreasing: MonotoneReport,
    pub increasing: MonotoneReport,
}

impl ModelHypotheses {
    pub fn weights_ok(&self) -> bool {
        self.decreasing.holds_boundedly && self.increasing.holds_boundedly
    }

    pub fn all_ok(&self) -> bool {
        self.carleson && self.weights_ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelReport {
    pub norm: f64,
    /// `sigma mean × normalising factor / ‖f‖₂` per grid point.
    pub ratios: Vec<f64>,
    pub means: Vec<SigmaMean>,
    pub sup_c: f64,
    pub trend: Trend,
    pub hypotheses: ModelHypotheses,
}

/// Carleson certificates of the zero sequence plus the two weight certificates
/// `h(t)/t^{dec}` decreasing and `h(t)/t^{inc}` increasing.
pub fn model_hypotheses(seq: &ZeroSequence, h: &LogPowerWeight, dec: f64, inc: f64) -> Result<ModelHypotheses> {
    let grid = SampleGrid::certification(h.t_max());
    let ratio = separation_ratio(seq);
    let delta = pseudohyperbolic_delta(seq);
    let ratio_ok = is_carleson_radial(seq, CARLESON_RATIO_MAX)? == CarlesonVerdict::Carleson;
    Ok(ModelHypotheses {
        separation_ratio: ratio,
        pseudohyperbolic_delta: delta,
        carleson: ratio_ok && delta >= CARLESON_DELTA_MIN,
        decreasing: check_monotone(h, dec, Direction::Decreasing, &grid)?,
        increasing: check_monotone(h, inc, Direction::Increasing, &grid)?,
    })
}

fn enforce(h: &ModelHypotheses, policy: HypothesisPolicy) -> Result<()> {
    if policy == HypothesisPolicy::Enforce && !h.all_ok() {
        return Err(Error::Hypothesis(format!(
            "model-space certificates failed: carleson={} (ratio {:.3}, delta {:.3}), decreasing={}, increasing={}",
            h.carleson,
            h.separation_ratio,
            h.pseudohyperbolic_delta,
            h.decreasing.holds_boundedly,
            h.increasing.holds_boundedly
        )));
    }
    Ok(())
}

fn assemble(norm: f64, means: Vec<SigmaMean>, factors: Vec<f64>, grid: &RadialGrid, hyp: ModelHypotheses) -> ModelReport {
    let ratios: Vec<f64> = means.iter().zip(&factors).map(|(m, f)| m.value * f / norm).collect();
    let sup_c = ratios.iter().copied().fold(0.0, f64::max);
    let trend = decide_trend(grid.gaps(), &ratios);
    ModelReport { norm, ratios, means, sup_c, trend, hypotheses: hyp }
}

/// Empirical constant in `σ-mean(f′) ≤ C ‖f‖₂ / ((1 − r)^{p−1} h(1 − r))^{1/p}`.
pub fn check_thm61(
    seq: &ZeroSequence,
    mf: &ModelFunction,
    h: &LogPowerWeight,
    spec: &SigmaSpec,
    grid: &RadialGrid,
    quad_tol: f64,
    policy: HypothesisPolicy,
) -> Result<ModelReport> {
    let p = spec.p;
    let hyp = model_hypotheses(seq, h, p / 2.0, 1.0 - p)?;
    enforce(&hyp, policy)?;
    let norm = norm2(mf)?;
    let means = grid
        .gaps()
        .iter()
        .map(|&t| sigma_mean_gap(mf, t, spec, quad_tol))
        .collect::<Result<Vec<_>>>()?;
    let factors = grid
        .gaps()
        .iter()
        .map(|&t| Ok((t.powf(p - 1.0) * h.eval(t)?).powf(1.0 / p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(norm, means, factors, grid, hyp))
}

/// Bergman analogue with
/// `C ‖f‖₂ / ((1 − r)^{−(1−p)−(1+γ)(1+p/2)} h(1 − r))^{1/p}`.
#[allow(clippy::too_many_arguments)]
pub fn check_thm62(
    seq: &ZeroSequence,
    mf: &ModelFunction,
    h: &LogPowerWeight,
    spec: &SigmaSpec,
    gamma: f64,
    grid: &RadialGrid,
    quad_tol: f64,
    policy: HypothesisPolicy,
) -> Result<ModelReport> {
    let p = spec.p;
    if !(gamma > -1.0 && gamma < spec.gamma_max()) {
        return Err(Error::Domain(format!(
            "gamma = {gamma} outside (-1, {:.6})",
            spec.gamma_max()
        )));
    }
    let shift = (1.0 - p) + (1.0 + gamma) * (1.0 + p / 2.0);
    let hyp = model_hypotheses(seq, h, p / 2.0, shift)?;
    enforce(&hyp, policy)?;
    let norm = norm2(mf)?;
    let means = grid
        .gaps()
        .iter()
        .map(|&t| bergman_sigma_mean_gap(mf, t, spec, gamma, quad_tol))
        .collect::<Result<Vec<_>>>()?;
    let factors = grid
        .gaps()
        .iter()
        .map(|&t| Ok((t.powf(-shift) * h.eval(t)?).powf(1.0 / p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(norm, means, factors, grid, hyp))
}
