use metrifract::covering::{greedy_cover_count, maximal_separated, nonexploding_profile};
use metrifract::embedding::{distortion_report, embed_cloud};
use metrifract::metric::PointCloud;
use proptest::prelude::*;

fn cloud(max: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..max)
        .prop_map(|pts| PointCloud::from_points(pts).unwrap().normalized().0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nets_are_separated_and_maximal(c in cloud(60), eps in 0.01f64..1.0) {
        let net = maximal_separated(&c, eps);
        prop_assert!(net.is_valid_for(&c));
        prop_assert_eq!(net.members[0], 0);
    }

    #[test]
    fn greedy_cover_is_bounded_by_size(c in cloud(60), r in 0.0f64..1.0) {
        let n = greedy_cover_count(&c, r);
        prop_assert!(n >= 1 && n <= c.len());
        prop_assert_eq!(greedy_cover_count(&c, 1.0), 1);
    }

    #[test]
    fn claim_holds_on_every_cloud(c in cloud(50)) {
        let profile = nonexploding_profile(&c, 0..=6);
        prop_assert!(profile.claim_all_ok);
        for row in &profile.rows {
            let product = row.qhat8 as u128 * row.qhat4 as u128 * row.qhat2 as u128 * row.qhat1 as u128;
            prop_assert!(row.g as u128 <= product);
        }
    }

    #[test]
    fn embedding_distortion_holds(c in cloud(40)) {
        let emb = embed_cloud(&c, 0, 6).unwrap();
        for stage in &emb.stages {
            prop_assert!(stage.coloring_is_valid(&c));
            prop_assert!(stage.colors_used() <= stage.palette);
        }
        let report = distortion_report(&c, &emb).unwrap();
        prop_assert!(report.lipschitz_ok && report.band_ok);
        prop_assert!(report.phi_upper_ok && report.phi_lower_ok);
    }
}

#[test]
fn net_size_across_radii_on_a_line() {
    let xs: Vec<f64> = (0..50).map(|i| (i as f64 / 49.0).powi(2)).collect();
    let c = PointCloud::from_line(&xs).unwrap();
    let sizes: Vec<usize> = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5]
        .iter()
        .map(|&e| maximal_separated(&c, e).len())
        .collect();
    assert!(sizes.windows(2).all(|w| w[0] >= w[1]), "{sizes:?}");
}

#[test]
fn net_size_is_not_monotone_in_general() {
    let pts = vec![vec![0.0, 0.1], vec![0.4, 0.4], vec![0.5, 0.7], vec![0.3, 0.9], vec![0.8, 0.2]];
    let c = PointCloud::from_points(pts).unwrap();
    assert_eq!(maximal_separated(&c, 0.7).len(), 2);
    assert_eq!(maximal_separated(&c, 0.8).len(), 3);
}
