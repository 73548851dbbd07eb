use bouncing_billiard::dynamics::{orbit, OrbitOptions};
use bouncing_billiard::io::{
    export_orbit_csv, parse_orbit_csv, parse_scenario, parse_sweep, render_svg, run_scenario, run_sweep,
    AnalysisOptions, ConfigError, InitialSpec, OutputPaths, PhaseInit, ScenarioConfig, SegmentInit,
    ShapeSpec, SvgStyle, CSV_HEADER,
};
use bouncing_billiard::{SegmentState, Shape};
use proptest::prelude::*;

fn shape_spec() -> impl Strategy<Value = ShapeSpec> {
    prop_oneof![
        Just(ShapeSpec::Segment),
        (0.1..5.0f64, -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(radius, x, y)| ShapeSpec::Disc { center: [x, y], radius }),
        (0.5..3.0f64, 0.1..1.0f64).prop_map(|(a, f)| ShapeSpec::Ellipse { a, b: a * f }),
        (0.1..2.0f64).prop_map(|height| ShapeSpec::Parabola { height }),
        Just(ShapeSpec::Polygon {
            vertices: vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]
        }),
    ]
}

fn scenario() -> impl Strategy<Value = ScenarioConfig> {
    (
        shape_spec(),
        prop::collection::vec((-1.0..1.0f64, 0.0..std::f64::consts::TAU), 1..4),
        (0usize..5000, 1usize..20, any::<u64>(), any::<bool>()),
        (any::<bool>(), any::<bool>(), 1usize..30, 1e-12..1e-3f64),
        "[a-z][a-z0-9_]{0,12}",
    )
        .prop_map(|(shape, inits, (steps, record_every, seed, restart), (lyap, per, max_period, tol), id)| {
            let initial = match shape {
                ShapeSpec::Segment => inits
                    .iter()
                    .map(|&(x, t)| {
                        let h = 0.3 + 0.2 * t;
                        InitialSpec::Segment(SegmentInit { x: 0.8 * x, h, theta: (-0.4 * x / h).atan() })
                    })
                    .collect(),
                _ => inits
                    .iter()
                    .map(|&(x, t)| InitialSpec::Phase(PhaseInit { x: 50.0 + x, y: 40.0, angle: t - 3.0 }))
                    .collect(),
            };
            ScenarioConfig {
                version: 1,
                id,
                shape,
                initial,
                steps,
                record_every,
                seed,
                restart_on_degenerate: restart,
                analysis: AnalysisOptions { lyapunov: lyap, periodic: per, jacobian: false, max_period, tol },
                output: OutputPaths { csv: Some("o.csv".into()), svg: None, report: None },
            }
        })
}

proptest! {
    #[test]
    fn emitted_config_parses_back_identically(cfg in scenario()) {
        let back = parse_scenario(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn csv_round_trip_is_bit_exact(x in -0.9..0.9f64, h in 0.2..2.0f64, w in -0.9..0.9f64, n in 1usize..60) {
        let s = SegmentState { x, h, theta: ((w - x) / h).atan() };
        let rec = orbit(&Shape::segment(), &s.to_phase_point(), n, 1, OrbitOptions::default());
        let rows = parse_orbit_csv(&export_orbit_csv(&rec)).unwrap();
        prop_assert_eq!(rows.len(), rec.samples.len());
        for (row, sample) in rows.iter().zip(&rec.samples) {
            prop_assert_eq!(row.step, sample.step);
            prop_assert_eq!(row.p.x.to_bits(), sample.point.p.x.to_bits());
            prop_assert_eq!(row.p.y.to_bits(), sample.point.p.y.to_bits());
            prop_assert_eq!(row.angle.to_bits(), sample.point.v.radians().to_bits());
            prop_assert_eq!(row.bounce.map(|b| b.x.to_bits()), sample.bounce.map(|b| b.x.to_bits()));
            // the height is exactly conserved on the segment
            prop_assert_eq!(row.p.y.to_bits(), h.to_bits());
        }
    }
}

#[test]
fn fixed_point_csv_repeats_one_row() {
    let s = SegmentState::new(0.0, 0.7, 0.0).unwrap();
    let rec = orbit(&Shape::segment(), &s.to_phase_point(), 2, 1, OrbitOptions::default());
    let text = export_orbit_csv(&rec);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').skip(1).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r == &rows[0]));
}

#[test]
fn svg_is_deterministic() {
    let cfg = parse_scenario(
        r#"{"shape":{"type":"ellipse","a":1,"b":0.5},"initial":[{"x":0.3,"y":1.7,"angle":-1.4},{"x":2.5,"y":0,"angle":3.0}],"steps":300}"#,
    )
    .unwrap();
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    let style = SvgStyle::default();
    let svg = render_svg(&a.shape, &a.records, &style);
    assert_eq!(svg, render_svg(&b.shape, &b.records, &style));
    assert!(svg.starts_with("<?xml") && svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 602);
    let empty = render_svg(&a.shape, &[], &style);
    assert!(!empty.contains("<circle") && empty.contains("<path"));
}

fn period4_sweep() -> &'static str {
    r#"{
        "base": {"shape":{"type":"segment"},"initial":[{"x":0,"h":0.5,"theta":0.1}],"steps":0},
        "task": "period4",
        "axes": [{"param":"height","values":[0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9]}]
    }"#
}

#[test]
fn sweep_result_is_independent_of_thread_count() {
    let cfg = parse_sweep(
        r#"{
            "base": {"shape":{"type":"segment"},"initial":[{"x":0.1,"h":0.5,"theta":0.1}],"steps":500,"analysis":{"lyapunov":true}},
            "task": "orbit",
            "axes": [
                {"param":"height","values":[0.3,0.6,0.9,1.2,1.5]},
                {"param":"launch_angle","values":[-0.4,0.0,0.3,0.7]}
            ]
        }"#,
    )
    .unwrap();
    let one = run_sweep(&cfg, 1).unwrap();
    let four = run_sweep(&cfg, 4).unwrap();
    assert_eq!(one.rows.len(), 20);
    assert_eq!(one.to_csv(), four.to_csv());
    let p4 = parse_sweep(period4_sweep()).unwrap();
    assert_eq!(run_sweep(&p4, 1).unwrap().to_csv(), run_sweep(&p4, 3).unwrap().to_csv());
}

#[test]
fn single_cell_sweep_matches_single_run() {
    let cfg = parse_sweep(
        r#"{
            "base": {"shape":{"type":"segment"},"initial":[{"x":0.2,"h":0.8,"theta":0.3}],"steps":400},
            "task": "orbit",
            "axes": [{"param":"height","values":[0.8]}]
        }"#,
    )
    .unwrap();
    let sweep = run_sweep(&cfg, 2).unwrap();
    let run = run_scenario(&cfg.base).unwrap();
    let summary = &run.records[0].summary;
    let row = &sweep.rows[0];
    assert_eq!(row.fields["max_radius"].to_bits(), summary.max_radius.to_bits());
    assert_eq!(row.fields["invariant_drift"].to_bits(), summary.invariant_drift.unwrap().to_bits());
    assert_eq!(row.fields["steps_completed"], summary.steps_completed as f64);
}

#[test]
fn rotation_sweep_decreases_with_semi_axis() {
    let values: Vec<String> = (1..40).map(|i| format!("{}", i as f64 / 40.0)).collect();
    let cfg = parse_sweep(&format!(
        r#"{{
            "base": {{"shape":{{"type":"segment"}},"initial":[{{"x":0,"h":0.5,"theta":0}}],"steps":0}},
            "task": "rotation",
            "axes": [{{"param":"height","values":[0.5]}},{{"param":"invariant_a","values":[{}]}}]
        }}"#,
        values.join(",")
    ))
    .unwrap();
    let report = run_sweep(&cfg, 0).unwrap();
    let phi: Vec<f64> = report.column("phi").into_iter().map(Option::unwrap).collect();
    assert_eq!(phi.len(), 39);
    assert!(phi.windows(2).all(|w| w[1] < w[0]));
    let csv = report.to_csv();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let mut unique = header.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), header.len(), "{header:?}");
}

#[test]
fn failing_cells_are_recorded_not_fatal() {
    let cfg = parse_sweep(
        r#"{
            "base": {"shape":{"type":"segment"},"initial":[{"x":0,"h":0.5,"theta":0}],"steps":0},
            "task": "rotation",
            "axes": [{"param":"height","values":[0.5]},{"param":"invariant_a","values":[0.5,1.5,0.7]}]
        }"#,
    )
    .unwrap();
    let report = run_sweep(&cfg, 2).unwrap();
    let errors: Vec<bool> = report.rows.iter().map(|r| r.error.is_some()).collect();
    assert_eq!(errors, [false, true, false]);
    assert!(report.to_csv().lines().nth(2).unwrap().ends_with('"'));
}

#[test]
fn period4_sweep_residuals_are_tiny() {
    let report = run_sweep(&parse_sweep(period4_sweep()).unwrap(), 0).unwrap();
    for name in ["m_circle_residual", "w_ellipse_residual"] {
        assert!(report.column(name).iter().all(|v| v.unwrap() < 1e-12), "{name}");
    }
}

#[test]
fn schema_errors_name_the_offending_field() {
    let cases = [
        (r#"{"shape":{"type":"hexagon"},"initial":[],"steps":1}"#, "shape"),
        (r#"{"shape":{"type":"segment"},"initial":[{"x":0,"h":"high","theta":0}],"steps":1}"#, "initial"),
        (r#"{"shape":{"type":"segment"},"initial":[{"x":0,"h":1,"theta":0}],"steps":-3}"#, "steps"),
        (r#"{"shape":{"type":"segment"},"initial":[{"x":0,"h":1,"theta":0}],"steps":1,"output":{"png":"x"}}"#, "output"),
    ];
    for (text, prefix) in cases {
        match parse_scenario(text).unwrap_err() {
            ConfigError::Schema { path, .. } => assert!(path.starts_with(prefix), "{text}: {path}"),
            other => panic!("{text}: {other}"),
        }
    }
    let bad = [
        r#"{"version":2,"shape":{"type":"segment"},"initial":[{"x":0,"h":1,"theta":0}],"steps":1}"#,
        r#"{"shape":{"type":"segment"},"initial":[{"x":0,"h":-1,"theta":0}],"steps":1}"#,
        r#"{"shape":{"type":"disc","radius":2},"initial":[{"x":0,"y":1,"angle":0}],"steps":1}"#,
        r#"{"shape":{"type":"segment"},"initial":[{"x":0,"h":1,"theta":0}],"steps":1,"record_every":0}"#,
    ];
    for text in bad {
        assert!(matches!(parse_scenario(text), Err(ConfigError::Validation(_))), "{text}");
    }
}

#[test]
fn oversized_sweeps_are_rejected() {
    let cfg = parse_sweep(
        r#"{
            "base": {"shape":{"type":"segment"},"initial":[{"x":0,"h":0.5,"theta":0}],"steps":0},
            "task": "period4",
            "max_cells": 3,
            "axes": [{"param":"height","values":[0.2,0.3]},{"param":"launch_angle","values":[0,1]}]
        }"#,
    );
    assert!(matches!(cfg, Err(ConfigError::Validation(_))));
}
