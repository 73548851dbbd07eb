//! Integrable structure of the billiard on the segment.
//!
//! In the coordinates `w = x + h tan θ` (bounce point) and `d = h tan θ` the map is a
//! rational map of the `(w, d)` plane that preserves
//! `a² = (h²w² + d²)/(h² + d²)` and `b² = (h²w² + d²)/(1 - w²)`; every orbit lies on the
//! ellipse `w²/a² + d²/b² = 1` and moves along it by the constant phase step
//! `φ = π + 2 atan(a/b)` in the parametrization `(a cos t, b sin t)`.

use std::f64::consts::{PI, TAU};

use crate::dynamics::{step_segment, SegmentState};
use crate::error::{Error, Result};

/// Bisection stops once the bracket on `a` is this narrow.
pub const BISECTION_TOL: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseCoords {
    pub w: f64,
    pub h: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants {
    pub a_sq: f64,
    pub b_sq: f64,
}

impl Invariants {
    pub fn a(&self) -> f64 {
        self.a_sq.sqrt()
    }

    pub fn b(&self) -> f64 {
        self.b_sq.sqrt()
    }

    /// Invariants of the ellipse with semi-axis `a` at height `h`.
    pub fn from_a(a: f64, h: f64) -> Self {
        let a_sq = a * a;
        Self {
            a_sq,
            b_sq: h * h * a_sq / (1.0 - a_sq),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationData {
    /// Phase advance per step, in (π, 2π).
    pub phi: f64,
    /// `∂φ/∂a` at fixed `b`.
    pub phi_prime: f64,
}

pub fn to_ellipse_coords(s: &SegmentState) -> EllipseCoords {
    let d = s.h * s.theta.tan();
    EllipseCoords { w: s.x + d, h: s.h, d }
}

pub fn from_ellipse_coords(e: &EllipseCoords) -> SegmentState {
    SegmentState {
        x: e.w - e.d,
        h: e.h,
        theta: (e.d / e.h).atan(),
    }
}

/// The segment map written directly in `(w, h, d)`.
pub fn step_ellipse(e: &EllipseCoords) -> EllipseCoords {
    let EllipseCoords { w, h, d } = *e;
    let (w2, d2, h2) = (w * w, d * d, h * h);
    let den = w2 - d2 - h2 - 1.0;
    let d1 = (d2 * d + 2.0 * h2 * w + 2.0 * d2 * w + d * w2 + h2 * d - d) / den;
    let w1 = (w2 * w + d2 * w + h2 * w + 2.0 * d * w2 - w - 2.0 * d) / den;
    EllipseCoords { w: w1, h, d: d1 }
}

pub fn a_squared(e: &EllipseCoords) -> f64 {
    let h2 = e.h * e.h;
    (h2 * e.w * e.w + e.d * e.d) / (h2 + e.d * e.d)
}

pub fn invariants(e: &EllipseCoords) -> Result<Invariants> {
    if e.w == 0.0 && e.d == 0.0 {
        return Err(Error::DegenerateOrbit);
    }
    let num = e.h * e.h * e.w * e.w + e.d * e.d;
    Ok(Invariants {
        a_sq: num / (e.h * e.h + e.d * e.d),
        b_sq: num / (1.0 - e.w * e.w),
    })
}

/// `w²/a² + d²/b²`; equals 1 on the invariant ellipse.
pub fn ellipse_membership(e: &EllipseCoords, inv: &Invariants) -> f64 {
    e.w * e.w / inv.a_sq + e.d * e.d / inv.b_sq
}

/// Phase `t` of `(w, d) = (a cos t, b sin t)`.
pub fn ellipse_phase(e: &EllipseCoords, inv: &Invariants) -> f64 {
    (e.d / inv.b()).atan2(e.w / inv.a())
}

/// The point of the invariant ellipse `(a, b(a, h))` at phase `t`.
pub fn state_on_ellipse(h: f64, a: f64, t: f64) -> Result<SegmentState> {
    let inv = Invariants::from_a(a, h);
    let e = EllipseCoords {
        w: a * t.cos(),
        h,
        d: inv.b() * t.sin(),
    };
    let s = from_ellipse_coords(&e);
    s.validate()?;
    Ok(s)
}

/// Semi-axis `b` of the invariant ellipse with semi-axis `a` at height `h`.
pub fn b_of(a: f64, h: f64) -> f64 {
    h * a / (1.0 - a * a).sqrt()
}

/// Rotation number on the ellipse with semi-axes `a`, `b`.
pub fn rotation_number(a: f64, b: f64) -> RotationData {
    let phi = if a == b {
        1.5 * PI
    } else {
        let base = (2.0 * a * b / (b * b - a * a)).atan();
        if a < b {
            base + PI
        } else {
            // negative arctangent: shift into (3π/2, 2π)
            base + TAU
        }
    };
    RotationData {
        phi,
        phi_prime: 2.0 * b / (b * b + a * a),
    }
}

/// Signature shared by the rotation formula and test doubles of it.
pub type RotationFormula = fn(f64, f64) -> RotationData;

/// Rotation number as a function of `a` along a fixed height.
pub fn phi_at_height(a: f64, h: f64) -> f64 {
    rotation_number(a, b_of(a, h)).phi
}

/// Upper end of the rotation interval at height `h`: `2π - 2 atan(h)`.
pub fn rho(h: f64) -> f64 {
    TAU - 2.0 * h.atan()
}

/// `sup_a φ(a, b(a, h))` by golden-section search over `a ∈ (0, 1)`.
pub fn rho_numeric(h: f64) -> f64 {
    let f = |a: f64| phi_at_height(a, h);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = f1.max(f2);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo < BISECTION_TOL {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        best = best.max(f1).max(f2);
    }
    best
}

/// Interval `(π, ρ(h))` of rotation numbers realised at height `h`.
pub fn rotation_range(h: f64) -> (f64, f64) {
    (PI, rho(h))
}

/// Starting state (ellipse vertex `(w, d) = (a, 0)`) of an orbit with rotation number
/// `target_phi` at height `h`, or `None` if that rotation is not realised at this height.
pub fn build_periodic_orbit(h: f64, target_phi: f64) -> Option<SegmentState> {
    let a = solve_semi_axis(h, target_phi)?;
    Some(from_ellipse_coords(&EllipseCoords { w: a, h, d: 0.0 }))
}

/// Solves `φ(a, b(a, h)) = target` for `a` by bisection.
pub fn solve_semi_axis(h: f64, target_phi: f64) -> Option<f64> {
    if !(h > 0.0) || !(target_phi > PI) || target_phi >= rho(h) {
        return None;
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let increasing = phi_at_height(0.75, h) > phi_at_height(0.25, h);
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo < BISECTION_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let above = phi_at_height(mid, h) > target_phi;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    (a > 0.0 && a < 1.0).then_some(a)
}

/// Phase increments (each in `[0, 2π)`) of `n` steps along the invariant ellipse.
pub fn rotation_increments(e: &EllipseCoords, n: usize) -> Result<Vec<f64>> {
    let inv = invariants(e)?;
    let mut cur = *e;
    let mut last = ellipse_phase(&cur, &inv);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let s = step_segment(&from_ellipse_coords(&cur))?;
        cur = to_ellipse_coords(&s);
        let phase = ellipse_phase(&cur, &inv);
        out.push((phase - last).rem_euclid(TAU));
        last = phase;
    }
    Ok(out)
}

/// Mean phase advance per step over `n` steps.
pub fn measured_rotation(e: &EllipseCoords, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::DegenerateOrbit);
    }
    let inc = rotation_increments(e, n)?;
    Ok(inc.iter().sum::<f64>() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(w: f64, h: f64, d: f64) -> EllipseCoords {
        EllipseCoords { w, h, d }
    }

    #[test]
    fn coordinate_change_examples() {
        let s = |x, h, t| SegmentState { x, h, theta: t };
        assert_eq!(to_ellipse_coords(&s(0.0, 1.0, 0.0)), e(0.0, 1.0, 0.0));
        let c = to_ellipse_coords(&s(0.0, 1.0, PI / 4.0));
        assert_relative_eq!(c.w, 1.0, epsilon = 1e-15);
        assert_relative_eq!(c.d, 1.0, epsilon = 1e-15);
        let c = to_ellipse_coords(&s(0.3, 1.0, 0.2f64.atan()));
        assert_relative_eq!(c.w, 0.5, epsilon = 1e-15);
        assert_relative_eq!(c.d, 0.2, epsilon = 1e-15);

        let back = from_ellipse_coords(&e(1.0, 1.0, 1.0));
        assert_relative_eq!(back.x, 0.0);
        assert_relative_eq!(back.theta, PI / 4.0, epsilon = 1e-15);
        let back = from_ellipse_coords(&e(0.5, 1.0, 0.2));
        assert_relative_eq!(back.x, 0.3, epsilon = 1e-15);
        assert_relative_eq!(back.theta, 0.197_395_559_849_880_76, epsilon = 1e-15);
    }

    #[test]
    fn step_ellipse_example() {
        let next = step_ellipse(&e(0.5, 1.0, 0.2));
        assert_relative_eq!(next.d, 1.098 / -1.79, epsilon = 1e-15);
        assert_relative_eq!(next.w, -0.155 / -1.79, epsilon = 1e-15);
        assert_relative_eq!(next.w, 0.086_592_2, epsilon = 1e-7);
        assert_relative_eq!(next.d, -0.613_407_8, epsilon = 1e-7);
        // x' = w + d and w' = x' + d'
        assert_relative_eq!(next.w, 0.5 + 0.2 + next.d, epsilon = 1e-15);
        assert_eq!(step_ellipse(&e(0.0, 0.7, 0.0)), e(0.0, 0.7, 0.0));
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(invariants(&e(0.0, 2.0, 0.0)), Err(Error::DegenerateOrbit));
        let inv = invariants(&e(0.5, 1.0, 0.2)).unwrap();
        assert_relative_eq!(inv.a_sq, 0.29 / 1.04, epsilon = 1e-15);
        assert_relative_eq!(inv.b_sq, 0.29 / 0.75, epsilon = 1e-15);
        assert_relative_eq!(inv.b_sq * (1.0 - inv.a_sq), inv.a_sq, max_relative = 1e-12);
        let next = invariants(&step_ellipse(&e(0.5, 1.0, 0.2))).unwrap();
        assert_relative_eq!(next.a_sq, inv.a_sq, max_relative = 1e-12);
        assert_relative_eq!(next.b_sq, inv.b_sq, max_relative = 1e-12);
    }

    #[test]
    fn membership_examples() {
        let p = e(0.5, 1.0, 0.2);
        let inv = invariants(&p).unwrap();
        assert_relative_eq!(ellipse_membership(&p, &inv), 1.0, epsilon = 1e-14);
        let vertex = Invariants::from_a(0.6, 1.0);
        assert_relative_eq!(ellipse_membership(&e(0.6, 1.0, 0.0), &vertex), 1.0, epsilon = 1e-15);
        assert!((ellipse_membership(&e(0.5, 1.0, 0.3), &inv) - 1.0).abs() > 0.1);
    }

    #[test]
    fn rotation_number_cases() {
        for a in [0.1, 0.5, 3.0] {
            assert_eq!(rotation_number(a, a).phi, 1.5 * PI);
        }
        let inv = invariants(&e(0.5, 1.0, 0.2)).unwrap();
        let r = rotation_number(inv.a(), inv.b());
        let direct = PI + (2.0 * inv.a() * inv.b() / (inv.b_sq - inv.a_sq)).atan();
        assert_relative_eq!(r.phi, direct, epsilon = 1e-15);
        assert_relative_eq!(r.phi, 4.549_660_568_236_917, epsilon = 1e-12);
        assert_relative_eq!(rotation_number(1.0, 1.0).phi_prime, 1.0);
        // the a > b branch stays in (3π/2, 2π)
        let r = rotation_number(0.8, 0.3);
        assert!(r.phi > 1.5 * PI && r.phi < TAU);
    }

    #[test]
    fn rho_checkpoints() {
        assert_relative_eq!(rho(1.0), 1.5 * PI, epsilon = 1e-15);
        assert_relative_eq!(rho(3f64.sqrt()), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(rho(0.5), 5.355_890_089_177_974, epsilon = 1e-12);
        for h in [0.5, 1.0, 3f64.sqrt(), 4.0] {
            assert_relative_eq!(rho_numeric(h), rho(h), epsilon = 1e-9);
        }
    }

    #[test]
    fn periodic_orbit_builder() {
        let s = build_periodic_orbit(0.6, 1.5 * PI).unwrap();
        assert_relative_eq!(s.x, 0.8, epsilon = 1e-11);
        assert_relative_eq!(b_of(s.x, 0.6), 0.8, epsilon = 1e-10);
        assert!(build_periodic_orbit(1.0, 1.5 * PI).is_none());
        assert!(build_periodic_orbit(1.0, PI).is_none());

        let target = 10.0 * PI / 7.0;
        let s = build_periodic_orbit(1.0, target).unwrap();
        // closed form of the inversion: a = sqrt(1 - h² tan²((φ - π)/2))
        let closed = (1.0 - ((target - PI) / 2.0).tan().powi(2)).sqrt();
        assert_relative_eq!(s.x, closed, epsilon = 1e-11);
        let mut cur = s;
        for _ in 0..7 {
            cur = step_segment(&cur).unwrap();
        }
        assert!((cur.x - s.x).abs() < 1e-8 && (cur.theta - s.theta).abs() < 1e-8);
    }

    #[test]
    fn measured_rotation_examples() {
        assert_eq!(measured_rotation(&e(0.0, 1.0, 0.0), 10), Err(Error::DegenerateOrbit));
        let m = measured_rotation(&e(0.5, 1.0, 0.2), 10_000).unwrap();
        assert!((m - 4.549_660_568_236_917).abs() < 1e-4);
        let s = state_on_ellipse(0.6, 0.8, 0.0).unwrap();
        let total: f64 = rotation_increments(&to_ellipse_coords(&s), 4).unwrap().iter().sum();
        assert_relative_eq!(total, 6.0 * PI, epsilon = 1e-9);
    }
}
