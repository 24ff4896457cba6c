use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blaschke_core::asymptotics::RadialGrid;
use blaschke_core::eval::DiscPoint;
use blaschke_core::means::{circle_mean_of, ref_bergman_kernel_integral_gap, ref_kernel_integral_gap, DiscIntegrand};
use blaschke_core::modelspace::{
    bergman_sigma_mean_gap, check_thm61, cholesky, eval_model, eval_model_deriv, norm2, random_unit_betas,
    sigma_mean_gap, HypothesisPolicy, ModelFunction, SigmaSpec,
};
use blaschke_core::sequences::{gen_geometric, gen_radial_power, AngleMode, ZeroSequence};
use blaschke_core::weights::LogPowerWeight;

fn geometric(n: usize) -> ZeroSequence {
    gen_geometric(0.5, n, AngleMode::Golden).unwrap()
}

#[test]
fn gram_is_hermitian_positive_definite() {
    let seqs = [geometric(5), geometric(20), geometric(40), gen_radial_power(2.0, 0.5, 30, AngleMode::Golden, false).unwrap()];
    for seq in &seqs {
        let mf = ModelFunction::new(seq, random_unit_betas(seq.len(), 1)).unwrap();
        let g = mf.gram();
        for i in 0..g.len() {
            for j in 0..g.len() {
                assert!((g[i][j] - g[j][i].conj()).norm() <= 1e-14 * g[i][i].norm().max(g[j][j].norm()));
            }
        }
        assert!(cholesky(&g).is_ok());
    }
}

#[test]
fn riesz_frame_bounds_are_uniform() {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for n in [5usize, 10, 20] {
        let seq = geometric(n);
        for seed in 0..100 {
            let betas = random_unit_betas(n, seed);
            let mf = ModelFunction::new(&seq, betas.clone()).unwrap();
            let energy: f64 = betas.iter().map(|b| b.norm_sqr()).sum();
            let ratio = norm2(&mf).unwrap().powi(2) / energy;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    assert!(lo > 0.2, "lower frame bound {lo}");
    assert!(hi < 5.0, "upper frame bound {hi}");
}

#[test]
fn derivative_matches_finite_differences() {
    let seq = geometric(12);
    let mf = ModelFunction::new(&seq, random_unit_betas(12, 7)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let z = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..2.0 * PI));
        let h = 1e-5 * (1.0 - z.norm());
        let fd = (eval_model(&mf, z + h).unwrap() - eval_model(&mf, z - h).unwrap()) / (2.0 * h);
        let exact = eval_model_deriv(&mf, z).unwrap();
        assert!((fd - exact).norm() <= 1e-7 * exact.norm(), "{fd} vs {exact}");
    }
}

#[test]
fn sigma_power_is_subadditive() {
    let spec = SigmaSpec::new(0.8).unwrap();
    let seq = geometric(10);
    let betas = random_unit_betas(10, 5);
    let mf = ModelFunction::new(&seq, betas.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let z = Complex64::from_polar(1.0 - 10f64.powf(-rng.gen_range(0.5..6.0)), rng.gen_range(0.0..2.0 * PI));
        let terms: Vec<Complex64> = seq
            .zeros()
            .iter()
            .zip(&betas)
            .map(|(zn, b)| {
                let w = Complex64::new(1.0, 0.0) - zn.point().conj() * z;
                zn.point().conj() * b * zn.one_minus_r().sqrt() / (w * w)
            })
            .collect();
        let total = eval_model_deriv(&mf, z).unwrap();
        let direct: Complex64 = terms.iter().sum();
        assert!((total - direct).norm() <= 1e-9 * direct.norm().max(1.0));
        let rhs: f64 = terms.iter().map(|a| a.norm().powf(spec.sigma())).sum();
        assert!(total.norm().powf(spec.sigma()) <= rhs * (1.0 + 1e-12));
    }
}

struct ModelValue<'a>(&'a ModelFunction, Vec<(f64, f64)>);

impl DiscIntegrand for ModelValue<'_> {
    fn modulus(&self, z: &DiscPoint) -> f64 {
        eval_model(self.0, z.z()).unwrap().norm()
    }

    fn peaks(&self) -> Vec<(f64, f64)> {
        self.1.clone()
    }
}

#[test]
fn gram_norm_matches_boundary_quadrature() {
    for (n, seed) in [(3usize, 1u64), (8, 2), (15, 3)] {
        let seq = geometric(n);
        let mf = ModelFunction::new(&seq, random_unit_betas(n, seed)).unwrap();
        let peaks = seq.zeros().iter().map(|z| (z.theta(), z.one_minus_r())).collect();
        let boundary = circle_mean_of(&ModelValue(&mf, peaks), 1e-6, 2.0, 1e-10).unwrap().value / (2.0 * PI);
        let gram = norm2(&mf).unwrap();
        assert!((boundary.sqrt() / gram - 1.0).abs() < 1e-3, "n = {n}: {} vs {gram}", boundary.sqrt());
    }
}

#[test]
fn single_kernel_sigma_mean_matches_kernel_integral() {
    let spec = SigmaSpec::new(0.8).unwrap();
    let s = spec.sigma();
    for &(r1, t) in &[(0.5, 1e-2), (0.9, 1e-4), (0.999, 1e-6)] {
        let seq = ZeroSequence::from_polar(&[(r1, 0.0)]).unwrap();
        let mf = ModelFunction::new(&seq, vec![Complex64::new(1.0, 0.0)]).unwrap();
        let v = sigma_mean_gap(&mf, t, &spec, 1e-11).unwrap().value;
        let gap = 1.0 - r1 * (1.0 - t);
        let k = ref_kernel_integral_gap(gap, 2.0 * s, 1e-12).unwrap().value;
        let exact = (r1.powf(s) * (1.0 - r1).powf(0.5 * s) * k).powf(1.0 / s);
        assert!(((v - exact) / exact).abs() < 1e-8, "{v} vs {exact}");

        let gamma = -0.95;
        let vb = bergman_sigma_mean_gap(&mf, t, &spec, gamma, 1e-9).unwrap().value;
        let kb = ref_bergman_kernel_integral_gap(gap, 2.0 * s, gamma, 1e-11).unwrap().value;
        let exact_b = (r1.powf(s) * (1.0 - r1).powf(0.5 * s) * kb).powf(1.0 / s);
        assert!(((vb - exact_b) / exact_b).abs() < 1e-6, "{vb} vs {exact_b}");
    }
}

#[test]
fn normalised_ratio_is_homogeneous() {
    let spec = SigmaSpec::new(0.8).unwrap();
    let h = LogPowerWeight::power(0.2).unwrap();
    let seq = geometric(10);
    let grid = RadialGrid::log_spaced(1.0, 4.0, 4).unwrap();
    let betas = random_unit_betas(10, 9);
    let doubled: Vec<Complex64> = betas.iter().map(|b| 2.0 * b).collect();
    let a = check_thm61(&seq, &ModelFunction::new(&seq, betas).unwrap(), &h, &spec, &grid, 1e-9, HypothesisPolicy::Enforce)
        .unwrap();
    let b = check_thm61(&seq, &ModelFunction::new(&seq, doubled).unwrap(), &h, &spec, &grid, 1e-9, HypothesisPolicy::Enforce)
        .unwrap();
    for (x, y) in a.ratios.iter().zip(&b.ratios) {
        assert!(((x - y) / x).abs() < 1e-7);
    }
    assert!(a.hypotheses.all_ok());
}

#[test]
fn violated_weight_hypothesis_is_reported() {
    let spec = SigmaSpec::new(0.8).unwrap();
    let h = LogPowerWeight::power(0.55).unwrap();
    let seq = geometric(10);
    let mf = ModelFunction::new(&seq, random_unit_betas(10, 0)).unwrap();
    let grid = RadialGrid::log_spaced(1.0, 3.0, 3).unwrap();
    assert!(check_thm61(&seq, &mf, &h, &spec, &grid, 1e-8, HypothesisPolicy::Enforce).is_err());
    let rep = check_thm61(&seq, &mf, &h, &spec, &grid, 1e-8, HypothesisPolicy::ReportOnly).unwrap();
    assert!(!rep.hypotheses.decreasing.holds_boundedly);
    assert!(rep.hypotheses.carleson);
}
