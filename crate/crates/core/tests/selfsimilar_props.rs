use metrifract::gauge::Gauge;
use metrifract::selfsimilar::{
    attractor_points, box_dimension, dyadic_radii, hausdorff_premeasure_upper, moran_dimension,
    moran_root, Ifs, Similarity,
};
use proptest::prelude::*;

fn ratios() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..0.95, 2..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn moran_residual_is_tiny(r in ratios(), dim in 1usize..4) {
        let s = moran_root(&r, dim);
        let residual: f64 = r.iter().map(|c| c.powf(s)).sum::<f64>() - 1.0;
        if s < dim as f64 {
            prop_assert!(residual.abs() <= 1e-10);
        } else {
            prop_assert!(residual <= 1e-10);
        }
    }

    /// Conjugating by `g(x) = λ P x + u` keeps every ratio, so the dimension.
    #[test]
    fn moran_ignores_global_similarities(
        r in prop::collection::vec(0.05f64..0.45, 2..5),
        lambda in 0.1f64..10.0,
        u in prop::collection::vec(-3.0f64..3.0, 2),
        flip in any::<bool>(),
    ) {
        let base: Vec<Similarity> = r
            .iter()
            .enumerate()
            .map(|(i, &c)| Similarity::new(c, Similarity::identity_perm(2), vec![i as f64 * 0.1, 0.0]).unwrap())
            .collect();
        let perm: Vec<i64> = if flip { vec![-2, 1] } else { vec![1, 2] };
        let conj: Vec<Similarity> = base
            .iter()
            .map(|f| {
                // g f g⁻¹ has ratio c, the same orthogonal part up to conjugation
                // and translation u + λ P t − c u
                let pt: Vec<f64> = perm
                    .iter()
                    .map(|&i| i.signum() as f64 * f.translate[i.unsigned_abs() as usize - 1])
                    .collect();
                let t: Vec<f64> = (0..2).map(|i| u[i] + lambda * pt[i] - f.ratio * u[i]).collect();
                Similarity::new(f.ratio, Similarity::identity_perm(2), t).unwrap()
            })
            .collect();
        let a = Ifs::new(base, None).unwrap();
        let b = Ifs::new(conj, None).unwrap();
        prop_assert_eq!(moran_dimension(&a), moran_dimension(&b));
    }

    #[test]
    fn premeasure_is_an_upper_bound(
        pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..60),
        delta in 0.01f64..2.0,
        s in 0.5f64..2.0,
    ) {
        let cloud = metrifract::metric::PointCloud::from_points(pts).unwrap();
        let g = Gauge::pow(s).unwrap();
        let b = hausdorff_premeasure_upper(&cloud, &g, delta).unwrap();
        prop_assert!(b.sets >= 1 && b.sets <= cloud.len());
        prop_assert!(b.upper_bound >= 0.0);
        prop_assert!(b.upper_bound <= b.sets as f64 * delta.powf(s) * (1.0 + 1e-12));
    }
}

#[test]
fn box_dimension_tracks_the_similarity_dimension() {
    for ifs in [Ifs::cantor_ternary(), Ifs::sierpinski()] {
        let s = moran_dimension(&ifs);
        let errors: Vec<f64> = [6, 8, 10]
            .iter()
            .map(|&depth| {
                let pts = attractor_points(&ifs, depth).unwrap().points;
                (box_dimension(&pts, &dyadic_radii(2, depth as u32)).unwrap().slope - s).abs()
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{errors:?}");
        assert!(errors[2] <= 0.08, "{errors:?}");
    }
}

#[test]
fn nested_cantor_covers_shrink_the_bound() {
    // at δ = 3^-q (slightly enlarged) the greedy cover is the level-q intervals
    let ifs = Ifs::cantor_ternary();
    let cloud = attractor_points(&ifs, 8).unwrap().cloud().unwrap();
    let g = Gauge::pow(2f64.ln() / 3f64.ln()).unwrap();
    let bounds: Vec<f64> = (2..=6)
        .map(|q| {
            let delta = 3f64.powi(-q) * (1.0 + 1e-9);
            hausdorff_premeasure_upper(&cloud, &g, 2.0 * delta).unwrap().upper_bound
        })
        .collect();
    assert!(bounds.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{bounds:?}");
    assert!(bounds.iter().all(|&b| b <= 1.0 + 0.01), "{bounds:?}");
}
