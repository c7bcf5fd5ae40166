use metrifract::curves::{hilbert_adjacent, hilbert_cell_coverage, interleave_modulus};
use metrifract::gauge::Gauge;
use metrifract::holder::{mcshane_extend, modulus_fit, SampledMap};
use metrifract::metric::PointCloud;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mcshane_agrees_and_keeps_the_modulus(
        xs in prop::collection::vec(0.0f64..1.0, 2..40),
        anchor_count in 1usize..6,
        alpha in 0.2f64..1.0,
    ) {
        let cloud = PointCloud::from_line(&xs).unwrap();
        let h = Gauge::pow(alpha).unwrap();
        // x^α is α-Hölder with constant 1, so anchor data are admissible
        let anchors: Vec<(usize, Vec<f64>)> = (0..anchor_count.min(xs.len()))
            .map(|i| (i, vec![xs[i].powf(alpha), -xs[i].powf(alpha)]))
            .collect();
        let map = SampledMap::new(anchors.clone());
        prop_assume!(map.is_ok());
        let queries: Vec<usize> = (0..xs.len()).collect();
        let ext = mcshane_extend(&map.unwrap(), &h, &cloud, &queries);
        prop_assume!(ext.is_ok());
        let ext = ext.unwrap();
        prop_assert!(ext.agreement_ok && ext.modulus_ok);
        for (i, v) in &anchors {
            prop_assert_eq!(&ext.values[*i], v);
        }
        for a in 0..xs.len() {
            for b in 0..xs.len() {
                let bound = h.evaluate(cloud.dist(a, b)).unwrap();
                for c in 0..2 {
                    let (u, v) = (ext.values[a][c], ext.values[b][c]);
                    prop_assert!(u <= v + bound && v <= u + bound);
                }
            }
        }
    }

    #[test]
    fn fitted_envelope_covers_every_pair(pairs in prop::collection::vec((1e-6f64..1.0, 1e-6f64..1.0), 10..200)) {
        let fit = modulus_fit(&pairs).unwrap();
        prop_assert!(fit.max_residual <= 1e-12);
        for &(dx, dy) in &pairs {
            prop_assert!(dy <= fit.c * dx.powf(fit.beta_hat) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn interleave_modulus_off_the_mesh(m in 1usize..4, p in 4usize..12, seed in any::<u64>()) {
        let r = interleave_modulus(m, p, 300, seed).unwrap();
        prop_assert_eq!(r.violations, 0);
        prop_assert!(r.max_ratio <= 2.0);
    }
}

#[test]
fn hilbert_is_adjacent_and_covering() {
    for (m, max_order) in [(2, 6), (3, 4), (4, 3)] {
        for order in 1..=max_order {
            assert!(hilbert_adjacent(m, order).unwrap(), "m={m} order={order}");
            let (hit, total) = hilbert_cell_coverage(m, order).unwrap();
            assert_eq!(hit, total);
        }
    }
}
