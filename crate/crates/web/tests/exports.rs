use metrifract_web::{attractor_inner, cantor_intervals_inner, hilbert_polyline_inner};

#[test]
fn hilbert_polyline_visits_every_cell() {
    let pts = hilbert_polyline_inner(3).unwrap();
    assert_eq!(pts.len(), 2 * 64);
    assert_eq!(&pts[..2], &[1.0 / 16.0, 1.0 / 16.0]);
    for w in pts.chunks(2).collect::<Vec<_>>().windows(2) {
        let step = (w[0][0] - w[1][0]).abs() + (w[0][1] - w[1][1]).abs();
        assert!((step - 0.125).abs() < 1e-12);
    }
    assert!(hilbert_polyline_inner(0).is_err());
    assert!(hilbert_polyline_inner(11).is_err());
}

#[test]
fn attractor_reports_dimensions() {
    let out = attractor_inner("sierpinski", 6).unwrap();
    let (dim, slope, count) = (out[out.len() - 3], out[out.len() - 2], out[out.len() - 1]);
    assert_eq!(count, 729.0);
    assert_eq!(out.len(), 2 * 729 + 3);
    assert!((dim - 3f64.log2()).abs() < 1e-10);
    assert!((slope - dim).abs() < 0.15);
    assert!(attractor_inner("koch", 3).is_err());
    assert!(attractor_inner("square", 10).is_err());
}

#[test]
fn cantor_intervals_nest() {
    // ε = 1/2, G ≡ 1, block 0: b = 1/8, J_∅ = [0, 7/8], J_1 = [15/32, 7/8]
    let out = cantor_intervals_inner("1/2", "const:1", 0, 2).unwrap();
    let rows: Vec<&[f64]> = out.chunks(3).collect();
    assert_eq!(rows.len(), 1 + 2 + 4);
    assert_eq!(rows[0], &[0.0, 0.0, 0.875]);
    assert_eq!(rows[2], &[1.0, 15.0 / 32.0, 0.875]);
    assert!(cantor_intervals_inner("pi", "const:1", 0, 2).is_err());
    assert!(cantor_intervals_inner("1/2", "list:1,0", 1, 2).is_err());
}
