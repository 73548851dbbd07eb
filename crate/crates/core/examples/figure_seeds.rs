//! Regenerates the unselected random starts in the `data/*_figure.json` corpora and
//! reports how far each orbit wanders in a million steps.

// sampling ranges are kept exactly as the corpora were generated
#![allow(clippy::approx_constant)]

use bouncing_billiard::dynamics::{in_visibility_domain, orbit, OrbitOptions};
use bouncing_billiard::{Angle, PhasePoint, Shape, Vec2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn six_digits(v: f64) -> f64 {
    format!("{v:.6}").parse().unwrap()
}

fn main() {
    let shapes = [
        ("ellipse-1-0.4", Shape::ellipse(1.0, 0.4).unwrap()),
        ("parabola-0.3", Shape::parabola(0.3).unwrap()),
        ("parabola-0.5", Shape::parabola(0.5).unwrap()),
        ("parabola-1", Shape::parabola(1.0).unwrap()),
    ];
    let mut rng = StdRng::seed_from_u64(5);
    for (name, shape) in &shapes {
        for _ in 0..6 {
            let p = loop {
                let p = match shape {
                    Shape::Ellipse { .. } => {
                        let t: f64 = rng.gen_range(0.0..6.28);
                        let r = rng.gen_range(1.2..2.0);
                        Vec2::new(r * t.cos(), r * 0.8 * t.sin())
                    }
                    _ => Vec2::new(rng.gen_range(-0.8..0.8), rng.gen_range(0.2..1.5)),
                };
                if !shape.contains(p) && shape.visual_cone(p).is_ok() {
                    break p;
                }
            };
            let cone = shape.visual_cone(p).unwrap();
            let v = cone.bisector + rng.gen_range(-0.35..0.35) * cone.width();
            let pp = PhasePoint::new(
                Vec2::new(six_digits(p.x), six_digits(p.y)),
                Angle::new(six_digits(v.radians())),
            );
            if !in_visibility_domain(shape, &pp) {
                continue;
            }
            let rec = orbit(shape, &pp, 1_000_000, 1_000_000, OrbitOptions::default());
            println!(
                "{name}: {{\"x\": {}, \"y\": {}, \"angle\": {}}} max |p| {:.4} {:?}",
                pp.p.x,
                pp.p.y,
                pp.v.radians(),
                rec.summary.max_radius,
                rec.termination
            );
        }
    }
}
