use blaschke_core::asymptotics::{lemma_bound_check, lemma_sum, LemmaParams, RadialGrid, Trend};
use blaschke_core::sequences::{gen_geometric, gen_radial_power, AngleMode, ZeroSequence};
use blaschke_core::weights::LogPowerWeight;
use blaschke_core::Error;

/// Unevaluated sum `hi + lo` of two doubles.
#[derive(Clone, Copy)]
struct DoubleDouble(f64, f64);

fn two_sum(a: f64, b: f64) -> DoubleDouble {
    let s = a + b;
    let bb = s - a;
    DoubleDouble(s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> DoubleDouble {
    let p = a * b;
    DoubleDouble(p, a.mul_add(b, -p))
}

impl DoubleDouble {
    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let s = two_sum(self.0, o.0);
        let lo = s.1 + self.1 + o.1;
        two_sum(s.0, lo)
    }

    fn neg(self) -> DoubleDouble {
        DoubleDouble(-self.0, -self.1)
    }

    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let p = two_prod(self.0, o.0);
        let lo = p.1 + self.0 * o.1 + self.1 * o.0;
        two_sum(p.0, lo)
    }

    fn div(self, o: DoubleDouble) -> DoubleDouble {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul(DoubleDouble(q1, 0.0)).neg());
        let q2 = r.0 / o.0;
        two_sum(q1, q2)
    }
}

#[test]
fn geometric_lemma_sum_matches_extended_precision() {
    // q = 1/2, N = 30, p = 1/2, q = 1, r = 1 - 10^-3
    let seq = gen_geometric(0.5, 30, AngleMode::Radial).unwrap();
    let params = LemmaParams::new(0.5, 1.0).unwrap();
    let r = 1.0 - 1e-3;
    let got = lemma_sum(&seq, &params, r).unwrap().value;

    let one = DoubleDouble(1.0, 0.0);
    let rr = DoubleDouble(r, 0.0);
    let mut acc = DoubleDouble(0.0, 0.0);
    for n in 1..=30 {
        let tn = 0.5f64.powi(n);
        let rn = DoubleDouble(1.0 - tn, 0.0); // exact for dyadic tn
        let denom = one.add(rr.mul(rn).neg());
        // sqrt(2^-n): exact for even n, sqrt(1/2) times a power of two otherwise
        let num = if n % 2 == 0 {
            DoubleDouble(0.5f64.powi(n / 2), 0.0)
        } else {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            // residual of the rounded sqrt(1/2)
            let err = (0.5 - s * s) / (2.0 * s);
            DoubleDouble(s, err).mul(DoubleDouble(0.5f64.powi(n / 2), 0.0))
        };
        acc = acc.add(num.div(denom));
    }
    let oracle = acc.0 + acc.1;
    assert!(((got - oracle) / oracle).abs() < 1e-12, "{got} vs {oracle}");
}

#[test]
fn lemma_bound_is_finite_and_small_o() {
    let seq = gen_radial_power(1.2, 0.5, 2000, AngleMode::Radial, false).unwrap();
    let h = LogPowerWeight::power(0.5).unwrap();
    let rep = lemma_bound_check(&seq, &h, &LemmaParams::new(0.6, 1.0).unwrap(), &RadialGrid::standard()).unwrap();
    assert!(rep.sup_ratio.is_finite() && rep.sup_ratio > 0.0);
    assert_eq!(rep.trend, Trend::Decreasing);
    assert_eq!(rep.limit_zero, Some(true));
    assert!(rep.per_term_ok, "worst per-term ratio {}", rep.per_term_worst);
}

#[test]
fn single_zero_ratio_vanishes() {
    let seq = ZeroSequence::from_polar(&[(0.9, 0.3)]).unwrap();
    let h = LogPowerWeight::power(0.5).unwrap();
    let rep = lemma_bound_check(&seq, &h, &LemmaParams::new(0.6, 1.0).unwrap(), &RadialGrid::standard()).unwrap();
    for w in rep.ratios.windows(2) {
        assert!(w[1] < w[0]);
    }
    // closed form h(t) t^{q-p} (1 - r_1)^p / (1 - r r_1)^q
    let t = *RadialGrid::standard().gaps().last().unwrap();
    let exact = t.powf(0.5) * t.powf(0.4) * 0.1f64.powf(0.6) / (1.0 - (1.0 - t) * 0.9);
    assert!((rep.ratios.last().unwrap() / exact - 1.0).abs() < 1e-12);
    assert!(exact < 1e-4);
}

#[test]
fn failed_certificate_is_a_hypothesis_error() {
    // h/t^p = t^{-0.9} is decreasing, but h/t^{p-q} = t^{-0.8} is far from increasing
    let seq = gen_geometric(0.5, 20, AngleMode::Radial).unwrap();
    let h = LogPowerWeight::power(0.3).unwrap();
    let err = lemma_bound_check(&seq, &h, &LemmaParams::new(1.2, 0.1).unwrap(), &RadialGrid::standard()).unwrap_err();
    assert!(matches!(err, Error::Hypothesis(_)));
}
