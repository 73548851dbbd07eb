use bouncing_billiard_demo::{ellipse_figure, orbit_figure, rotation_figure, shape_from};

#[test]
fn orbit_figures_for_every_shape() {
    for (kind, param) in [("segment", 0.0), ("square", 0.0), ("disc", 1.0), ("ellipse", 0.4), ("parabola", 0.5)] {
        let svg = orbit_figure(kind, param, 0.4, 1.6, 0.1, 500).unwrap();
        assert!(svg.contains("<circle"), "{kind}");
        assert_eq!(svg, orbit_figure(kind, param, 0.4, 1.6, 0.1, 500).unwrap());
    }
}

#[test]
fn bad_inputs_are_reported() {
    assert!(shape_from("hexagon", 1.0).is_err());
    assert!(shape_from("disc", -1.0).is_err());
    assert!(orbit_figure("disc", 1.0, 0.1, 0.1, 0.0, 10).is_err());
    assert!(orbit_figure("disc", 1.0, 2.0, 0.0, 0.5, 10).is_err());
    assert!(ellipse_figure(0.0, 3, 10).is_err());
    assert!(rotation_figure(f64::NAN, 10).is_err());
}

#[test]
fn ellipse_figure_has_one_group_per_ellipse() {
    let svg = ellipse_figure(0.6, 5, 200).unwrap();
    assert_eq!(svg.matches("<g ").count(), 5);
    assert_eq!(svg.matches("<circle").count(), 1000);
}

#[test]
fn rotation_figure_labels_the_limit() {
    let svg = rotation_figure(1.0, 100).unwrap();
    assert!(svg.contains("ρ(h) = 4.71239"));
}
