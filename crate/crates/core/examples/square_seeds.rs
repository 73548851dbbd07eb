//! Regenerates the seed lists in `data/square_periodic.json` and `data/square_chaotic.json`.
//!
//! Periodic seeds come from random visible starts that nearly return within 16 steps,
//! polished and kept only when closure is tight and the monodromy is insensitive to the
//! finite-difference step (orbits grazing a corner are dropped). No eigenvalue filtering.

// sampling ranges are kept exactly as the corpora were generated
#![allow(clippy::approx_constant)]

use std::collections::BTreeMap;

use bouncing_billiard::analysis::{detect_periodic, finite_diff_jacobian, lyapunov_exponent, polish_periodic, Matrix3};
use bouncing_billiard::dynamics::{apply, in_visibility_domain};
use bouncing_billiard::{Angle, PhasePoint, Shape, Vec2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Rounds through the 17-digit text form so the printed seed is the value tested.
fn round_trip(v: f64) -> f64 {
    format!("{v:.16e}").parse().unwrap()
}

fn seed_json(z: &PhasePoint) -> String {
    format!(
        "{{\"x\": {:.16e}, \"y\": {:.16e}, \"angle\": {:.16e}}}",
        z.p.x,
        z.p.y,
        z.v.radians()
    )
}

fn periodic_seeds(sq: &Shape) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut by_period: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for _ in 0..6000 {
        let r = rng.gen_range(1.5..4.0);
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let p = Vec2::new(r * t.cos(), r * t.sin());
        let Ok(cone) = sq.visual_cone(p) else { continue };
        let pp = PhasePoint::new(p, cone.bisector + rng.gen_range(-0.45..0.45) * cone.width());
        if !in_visibility_domain(sq, &pp) {
            continue;
        }
        let mut cur = pp;
        let mut best = (f64::INFINITY, 0);
        for q in 1..=16 {
            match apply(sq, &cur) {
                Ok(next) => cur = next,
                Err(_) => break,
            }
            let d = cur.distance(&pp);
            if d < best.0 {
                best = (d, q);
            }
        }
        if best.0 > 0.02 {
            continue;
        }
        let z = polish_periodic(sq, &pp, best.1);
        let z = PhasePoint::new(
            Vec2::new(round_trip(z.p.x), round_trip(z.p.y)),
            Angle::new(round_trip(z.v.radians())),
        );
        let Some(rep) = detect_periodic(sq, &z, 16, 1e-8) else { continue };
        if rep.closure_error > 1e-12 {
            continue;
        }
        let mut coarse = Matrix3::IDENTITY;
        let mut ok = true;
        for pt in &rep.points {
            match finite_diff_jacobian(sq, pt, 1e-5) {
                Ok(j) => coarse = j.mul(&coarse),
                Err(_) => ok = false,
            }
        }
        if !ok || (coarse.det() - rep.monodromy.det()).abs() > 1e-6 || (rep.monodromy.det() - 1.0).abs() > 1e-6 {
            continue;
        }
        let ev = rep.eigenvalues;
        let hyperbolic = rep.is_hyperbolic(1e-6) && (ev[2].norm() - 1.0) > 1e-2;
        let kept = by_period.entry(rep.period).or_default();
        if kept.len() < 3 || (hyperbolic && kept.len() < 5) {
            eprintln!(
                "period {} hyperbolic {hyperbolic} |λ| = ({:.4}, {:.4}, {:.4})",
                rep.period,
                ev[0].norm(),
                ev[1].norm(),
                ev[2].norm()
            );
            kept.push(seed_json(&z));
        }
    }
    by_period.into_values().flatten().collect()
}

fn chaotic_seeds(sq: &Shape) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(99);
    let mut seeds = Vec::new();
    while seeds.len() < 3 {
        let r = rng.gen_range(1.5..3.5);
        let t: f64 = rng.gen_range(0.0..6.283);
        let p = Vec2::new(round_trip(r * t.cos()), round_trip(r * t.sin()));
        let cone = sq.visual_cone(p).unwrap();
        let v = cone.bisector + rng.gen_range(-0.45..0.45) * cone.width();
        let pp = PhasePoint::new(p, Angle::new(round_trip(v.radians())));
        let l = lyapunov_exponent(sq, &pp, 100_000);
        if l.terminated.is_none() && l.exponent > 0.05 {
            seeds.push(seed_json(&pp));
        }
    }
    seeds
}

fn main() {
    let sq = Shape::square();
    println!("periodic:\n    {}", periodic_seeds(&sq).join(",\n    "));
    println!("chaotic:\n    {}", chaotic_seeds(&sq).join(",\n    "));
}
