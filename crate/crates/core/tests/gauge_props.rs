use metrifract::gauge::{hat_transform, ord_estimate, remetrize, Gauge};
use metrifract::metric::{code_dist, CodePoint, PointCloud};
use metrifract::schedule::{GSpec, SlowSchedule};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn hat_of_a_power_has_order_beta(alpha in 0.3f64..2.5, frac in 0.3f64..1.0) {
        let beta = alpha * frac;
        let h = Gauge::pow(alpha).unwrap();
        let report = hat_transform(&h, beta, 40).unwrap();
        prop_assert!(report.all_ok(), "{:?}", report.checks);
        prop_assert!((report.ord_hat - beta).abs() <= 0.05);
    }

    #[test]
    fn hat_of_a_log_power(beta in 0.5f64..2.0, gamma_frac in 0.0f64..1.0, frac in 0.5f64..0.9) {
        let h = Gauge::logpow(beta, beta * gamma_frac).unwrap();
        let target = beta * frac;
        let report = hat_transform(&h, target, 40).unwrap();
        prop_assert!(report.all_ok(), "{:?}", report.checks);
        prop_assert!((report.ord_hat - target).abs() <= 0.05);
    }

    #[test]
    fn ord_of_a_power_is_its_exponent(beta in 0.1f64..3.0) {
        let est = ord_estimate(&Gauge::pow(beta).unwrap(), 40).unwrap();
        prop_assert!((est.estimate - beta).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn remetrized_ultrametric_stays_ultrametric(
        words in prop::collection::vec(any::<u64>(), 2..20),
        alpha in 0.1f64..1.0,
    ) {
        let mut words: Vec<u64> = words.into_iter().map(|w| w & (u64::MAX << 56)).collect();
        words.sort_unstable();
        words.dedup();
        prop_assume!(words.len() >= 2);
        let s = SlowSchedule::new("const:1".parse::<GSpec>().unwrap(), 0).unwrap();
        let codes: Vec<CodePoint> = words.iter().map(|&w| CodePoint::new(vec![w], 8).unwrap()).collect();
        let rows: Vec<Vec<f64>> = codes
            .iter()
            .map(|x| codes.iter().map(|y| code_dist(x, y, &s).unwrap()).collect())
            .collect();
        let cloud = PointCloud::from_matrix(rows).unwrap();
        let r = remetrize(&cloud, &Gauge::pow(alpha).unwrap()).unwrap();
        prop_assert!(r.metric.ok);
        prop_assert!(r.ultrametric.ok);
    }
}
