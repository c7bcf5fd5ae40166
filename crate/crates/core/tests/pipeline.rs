use metrifract::pipeline::{dense_resolution, pipeline_map_onto_cube, PipelineParams};
use metrifract::selfsimilar::{attractor_points, Ifs};

#[test]
fn cantor_sample_is_fully_captured() {
    let cloud = attractor_points(&Ifs::cantor_ternary(), 8).unwrap().cloud().unwrap();
    let r = pipeline_map_onto_cube(&cloud, &PipelineParams { m: 1, ..Default::default() }).unwrap();
    assert_eq!(r.captured, r.points);
    assert_eq!(r.distinct_codes, r.points);
    assert!(r.substitute_construction && !r.degenerate);
    assert!(r.image.iter().all(|y| (0.0..=1.0).contains(&y[0])));
    assert_eq!(dense_resolution(&r.image, 1, 10), r.grid_resolution);
    assert!(r.grid_resolution >= 6);
}

#[test]
fn square_target_is_filled_by_the_curve() {
    let cloud = attractor_points(&Ifs::sierpinski(), 6).unwrap().cloud().unwrap();
    let r = pipeline_map_onto_cube(&cloud, &PipelineParams { m: 2, ..Default::default() }).unwrap();
    assert!(r.curve_order.is_some());
    assert!(r.stage_moduli.curve.is_some());
    assert!(r.grid_resolution >= 3, "{}", r.grid_resolution);
}
