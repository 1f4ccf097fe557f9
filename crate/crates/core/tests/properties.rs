use num_traits::{One, Zero};
use proptest::prelude::*;

use symbinom::coherent::{normalization_n, spin_cs, CoherentData};
use symbinom::dist::{pmf, pmf_float_closed, wigner_limit_probe, Binning};
use symbinom::model::{build_model, GeneratingFamily, SeedSeries};
use symbinom::qpoly::{q_functional_check, q_polynomials, QFamily};
use symbinom::series::{binomial_q, rat, series_exp, series_log, PowerSeries, Rational};
use symbinom::structure::{bg_entropy, leibniz_residuals, tsallis_entropy, varpi};

fn small_rational(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi, 1i64..=9).prop_map(|(p, q)| rat(p, q))
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=12).prop_flat_map(|q| (0..=q).prop_map(move |p| rat(p, q)))
}

fn named_family() -> impl Strategy<Value = GeneratingFamily> {
    prop_oneof![
        Just(GeneratingFamily::Exponential),
        (1i64..=12, 1i64..=4).prop_map(|(p, q)| GeneratingFamily::QExponential(rat(p, q))),
        (1i64..=12, 1i64..=4).prop_map(|(p, q)| GeneratingFamily::AbelLambert(rat(p, q))),
        (1i64..=8).prop_map(|p| GeneratingFamily::HermiteGauss(rat(p, 9))),
    ]
}

fn custom_family() -> impl Strategy<Value = GeneratingFamily> {
    prop::collection::vec(0i64..=5, 1..5).prop_map(|tail| {
        let mut a = vec![Rational::one()];
        a.extend(tail.into_iter().map(|v| rat(v, 7)));
        GeneratingFamily::Custom(SeedSeries::new(a))
    })
}

fn qf(fam: GeneratingFamily, order: usize) -> QFamily {
    q_polynomials(&build_model(fam, order).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_inverts_exp(coeffs in prop::collection::vec(small_rational(-5, 5), 1..8)) {
        let mut c = vec![Rational::zero()];
        c.extend(coeffs);
        let f = PowerSeries::new(c).unwrap();
        let g = series_exp(&f).unwrap();
        prop_assert_eq!(series_log(&g).unwrap(), f);
    }

    #[test]
    fn pmf_is_normalized_and_symmetric(
        fam in prop_oneof![named_family(), custom_family()],
        n in 0usize..12,
        eta in unit_rational(),
    ) {
        let q = qf(fam, 12);
        let p = pmf(&q, n, &eta).unwrap();
        let p = p.exact().unwrap();
        let comp = Rational::one() - &eta;
        let r = pmf(&q, n, &comp).unwrap();
        let r = r.exact().unwrap();
        prop_assert!(p.iter().fold(Rational::zero(), |a, x| a + x).is_one());
        for k in 0..=n {
            prop_assert!(p[k] >= Rational::zero());
            prop_assert_eq!(&p[k], &r[n - k]);
        }
    }

    #[test]
    fn functional_relation(
        fam in prop_oneof![named_family(), custom_family()],
        z1 in small_rational(-6, 6),
        z2 in small_rational(-6, 6),
    ) {
        prop_assert!(q_functional_check(&qf(fam, 8), &z1, &z2).holds());
    }

    #[test]
    fn varpi_times_binomial_is_pmf(fam in named_family(), n in 0usize..10, eta in unit_rational()) {
        let q = qf(fam, 10);
        let w = varpi(&q, n, &eta).unwrap();
        let p = pmf(&q, n, &eta).unwrap();
        for (k, pk) in p.exact().unwrap().iter().enumerate() {
            prop_assert_eq!(&w[k] * binomial_q(n, k), pk.clone());
        }
    }

    #[test]
    fn qexp_leibniz_rule_is_exact(alpha in small_rational(1, 20), eta in unit_rational()) {
        let q = qf(GeneratingFamily::QExponential(alpha), 12);
        prop_assert!(leibniz_residuals(&q, 12, &eta).unwrap().all_zero());
    }

    #[test]
    fn entropy_is_symmetric_and_positive(fam in named_family(), n in 1usize..300, eta in 0.01f64..0.99) {
        let q = qf(fam, 2);
        let a = bg_entropy(&q, n, eta).unwrap();
        let b = bg_entropy(&q, n, 1.0 - eta).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        let t = tsallis_entropy(&q, n, eta, 1.05).unwrap();
        let u = tsallis_entropy(&q, n, 1.0 - eta, 1.05).unwrap();
        prop_assert!((t - u).abs() <= 1e-12 * t.abs().max(1.0));
    }

    #[test]
    fn float_pmf_sums_to_one(fam in named_family(), n in 0usize..2000, eta in 0.0f64..=1.0) {
        let p = pmf_float_closed(&fam, n, eta).unwrap().to_f64();
        let total: f64 = p.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9, "total {}", total);
    }

    #[test]
    fn histogram_mass_at_most_one(n in 1usize..500, bins in 5usize..150) {
        let fam = GeneratingFamily::QExponential(rat(3, 1));
        for binning in [Binning::LatticeCell, Binning::PointMass] {
            let probe = wigner_limit_probe(&fam, n, bins, binning).unwrap();
            let h = 2.1 / bins as f64;
            let mass: f64 = probe.density.iter().map(|d| d * h).sum();
            prop_assert!(mass <= 1.0 + 1e-9);
            prop_assert!(probe.sup_distance >= 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn beta_table_is_symmetric(fam in prop_oneof![
        Just(GeneratingFamily::Exponential),
        (3i64..=12).prop_map(|a| GeneratingFamily::QExponential(rat(a, 2))),
        (1i64..=8).prop_map(|p| GeneratingFamily::HermiteGauss(rat(p, 9))),
    ]) {
        let data = CoherentData::new(qf(fam, 10), 10).unwrap();
        for m in 0..=10 {
            for n in 0..=10 - m {
                prop_assert_eq!(data.b(m, n).unwrap(), data.b(n, m).unwrap());
            }
        }
        prop_assert!(data.inequalities().holds());
    }

    #[test]
    fn spin_states_have_unit_norm(
        two_j in 0usize..=8,
        theta in 0.0f64..=std::f64::consts::PI,
        phi in 0.0f64..std::f64::consts::TAU,
        a in 1i64..=8,
    ) {
        let data = CoherentData::new(qf(GeneratingFamily::HermiteGauss(rat(a, 9)), 8), 8).unwrap();
        let v = spin_cs(&data, two_j, theta, phi).unwrap();
        prop_assert!((v.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_encloses_longer_sums(u in 0.0f64..3.0, alpha in 2i64..=6) {
        let data = CoherentData::new(qf(GeneratingFamily::QExponential(rat(alpha, 1)), 64), 1).unwrap();
        let coarse = normalization_n(&data, u, 1e-4).unwrap();
        let fine = normalization_n(&data, u, 1e-13).unwrap();
        prop_assert!(fine.value >= coarse.value - 1e-12);
        prop_assert!(fine.value <= coarse.value + coarse.bound + 1e-12);
    }
}
