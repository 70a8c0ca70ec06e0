use graded_weyl_demo::{cover_plane, trace_diagonal, weyl_line};

#[test]
fn isotropic_trace_is_one_over_four_pi() {
    let r = trace_diagonal(1, 1).unwrap();
    assert_eq!(r.weights, vec![1, 1]);
    assert!((r.anisotropic - 0.25 / std::f64::consts::PI).abs() < 1e-10);
    assert!((r.direct - r.anisotropic).abs() < 1e-8);
    assert!((r.residue - 0.5 / std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn anisotropic_trace_agrees_with_direct_integral() {
    let r = trace_diagonal(1, 2).unwrap();
    assert_eq!((r.weights.clone(), r.order, r.homogeneous_dimension), (vec![2, 1], 4, 3));
    assert!((r.anisotropic - r.direct).abs() < 1e-7 * r.direct);
}

#[test]
fn line_fit_tracks_prediction() {
    let r = weyl_line(2.0, 1.0, 4096).unwrap();
    assert!((r.measured - r.predicted).abs() < 0.05 * r.predicted);
    assert!(r.values.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn cover_respects_multiplicity_bound() {
    for seed in 0..5 {
        let r = cover_plane(0.5, seed, 1).unwrap();
        assert_eq!(r.centers.len(), 2 * r.multiplicity.len());
        assert!(r.max_multiplicity as f64 <= r.bound);
    }
}
