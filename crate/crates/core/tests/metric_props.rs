use metrifract::metric::{
    code_dist, torus_dist, ultrametric_to_tree, validate_metric, CodePoint, MetricMode, PointCloud,
    TorusPoint,
};
use metrifract::schedule::{GSpec, SlowSchedule};
use proptest::prelude::*;

fn schedule() -> SlowSchedule {
    SlowSchedule::new("list:1,2,3".parse::<GSpec>().unwrap(), 3).unwrap()
}

/// Dyadic coordinates keep mod-1 addition exact.
fn dyadic_point(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u32..1 << 20).prop_map(|i| i as f64 / (1u32 << 20) as f64), k)
}

fn code(k: usize, depth: usize) -> impl Strategy<Value = CodePoint> {
    prop::collection::vec(any::<u64>(), k).prop_map(move |words| {
        let mask = if depth == 0 { 0 } else { u64::MAX << (64 - depth) };
        CodePoint::new(words.into_iter().map(|w| w & mask).collect(), depth).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn torus_dist_is_a_metric(a in dyadic_point(9), b in dyadic_point(9), c in dyadic_point(9)) {
        let s = schedule();
        let (a, b, c) = (TorusPoint::new(a).unwrap(), TorusPoint::new(b).unwrap(), TorusPoint::new(c).unwrap());
        let d = |x: &TorusPoint, y: &TorusPoint| torus_dist(x, y, &s).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert!(d(&a, &b) <= 0.5);
    }

    #[test]
    fn torus_dist_is_shift_invariant(a in dyadic_point(9), b in dyadic_point(9), c in dyadic_point(9)) {
        let s = schedule();
        let (a, b, c) = (TorusPoint::new(a).unwrap(), TorusPoint::new(b).unwrap(), TorusPoint::new(c).unwrap());
        let before = torus_dist(&a, &b, &s).unwrap();
        let after = torus_dist(&a.shifted(&c).unwrap(), &b.shifted(&c).unwrap(), &s).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn code_dist_is_an_ultrametric(a in code(9, 12), b in code(9, 12), c in code(9, 12)) {
        let s = schedule();
        let d = |x: &CodePoint, y: &CodePoint| code_dist(x, y, &s).unwrap();
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert!(d(&a, &c) <= d(&a, &b).max(d(&b, &c)));
        prop_assert_eq!(d(&a, &b) == 0.0, a == b);
    }

    #[test]
    fn ultrametric_tree_round_trips(codes in prop::collection::vec(code(2, 6), 1..24)) {
        let s = SlowSchedule::new("const:2".parse::<GSpec>().unwrap(), 0).unwrap();
        let rows: Vec<Vec<f64>> = codes
            .iter()
            .map(|x| codes.iter().map(|y| code_dist(x, y, &s).unwrap()).collect())
            .collect();
        // repeated codes give zero off-diagonal entries, which a metric forbids
        prop_assume!((0..rows.len()).all(|i| (0..i).all(|j| rows[i][j] > 0.0)));
        let cloud = PointCloud::from_matrix(rows.clone()).unwrap();
        prop_assert!(validate_metric(&cloud, MetricMode::Ultra).ok);
        let tree = ultrametric_to_tree(&cloud).unwrap();
        prop_assert_eq!(tree.to_matrix(rows.len()), rows);
    }

    #[test]
    fn euclidean_clouds_validate(pts in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 3), 2..30)) {
        let cloud = PointCloud::from_points(pts).unwrap();
        prop_assert!(validate_metric(&cloud, MetricMode::Triangle).ok);
        let (norm, diam) = cloud.normalized();
        prop_assert!(norm.diameter() <= 1.0);
        prop_assert!(diam >= 0.0);
    }
}
