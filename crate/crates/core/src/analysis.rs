//! Numerical analysis of the billiard map: fixed-point search, the curvature inequality
//! behind it, Jacobians and measure preservation, Lyapunov exponents, and periodic orbits
//! with their monodromy spectra.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{apply, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::{Shape, Vec2};

/// Default finite-difference step.
pub const FD_EPS: f64 = 1e-6;
pub const DEFAULT_LOOP_SAMPLES: usize = 720;
pub const DEFAULT_GAUSS_NODES: usize = 512;
const MONOTONE_SAMPLES: usize = 256;
const GAUSS_PANEL_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix3(pub [[f64; 3]; 3]);

impl Matrix3 {
    pub const IDENTITY: Matrix3 = Matrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_columns(cols: [[f64; 3]; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (j, col) in cols.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[i][j] = v;
            }
        }
        Matrix3(m)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Sum of the principal 2x2 minors.
    fn minor_sum(&self) -> f64 {
        let m = &self.0;
        (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1])
    }

    pub fn mul(&self, rhs: &Matrix3) -> Matrix3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        Matrix3(out)
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| self.0[i][k] * v[k]).sum();
        }
        out
    }

    /// Eigenvalues from the characteristic cubic, sorted by modulus.
    pub fn eigenvalues(&self) -> [Complex64; 3] {
        // λ³ - tr λ² + m λ - det = 0
        let mut roots = cubic_roots(-self.trace(), self.minor_sum(), -self.det());
        roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        roots
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Roots of `x³ + c2 x² + c1 x + c0`, closed form plus one Newton polish each.
pub fn cubic_roots(c2: f64, c1: f64, c0: f64) -> [Complex64; 3] {
    let shift = c2 / 3.0;
    // depressed cubic t³ + p t + q with x = t - c2/3
    let p = c1 - c2 * c2 / 3.0;
    let q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut roots = if disc < 0.0 {
        // three real roots, trigonometric form
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        [0.0, 1.0, 2.0].map(|k| Complex64::new(2.0 * r * ((phi + TAU * k) / 3.0).cos(), 0.0))
    } else {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        let re = -(u + v) / 2.0;
        let im = (u - v) * 3f64.sqrt() / 2.0;
        [
            Complex64::new(u + v, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    };
    for r in roots.iter_mut() {
        *r -= shift;
        let f = ((*r + c2) * *r + c1) * *r + c0;
        let df = (3.0 * *r + 2.0 * c2) * *r + c1;
        if df.norm() > 1e-300 {
            let next = *r - f / df;
            let f_next = ((next + c2) * next + c1) * next + c0;
            if f_next.norm() <= f.norm() {
                *r = next;
            }
        }
    }
    roots
}

/// Signed angle between the reflected bisector ray and the direction back to `p`.
///
/// Zero exactly when the ray launched along the visual-cone bisector from `p` is
/// retro-reflected, which makes `(p, bisector)` a fixed point of the map.
pub fn retro_deviation(shape: &Shape, p: Vec2) -> Result<f64> {
    let v = shape.bisector_direction(p)?;
    let bounce = shape.ray_intersect(p, v)?.ok_or(Error::NotVisible)?;
    let d = Vec2::from_angle(v);
    let t = Vec2::from_angle(bounce.tangent_dir);
    let r = t * (2.0 * d.dot(t)) - d;
    Ok(r.angle().diff((p - bounce.point).angle()))
}

/// Circle around the shape along which fixed points are searched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLoop {
    pub center: Vec2,
    pub radius: f64,
}

impl SearchLoop {
    pub fn around(shape: &Shape, radius: f64) -> Self {
        Self {
            center: shape.centroid(),
            radius,
        }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.center + Vec2::new(t.cos(), t.sin()) * self.radius
    }
}

/// Fixed points of the map on a loop: sign changes of [`retro_deviation`] are bracketed
/// on `n_samples` equally spaced loop points and bisected.
pub fn find_fixed_points(shape: &Shape, lp: &SearchLoop, n_samples: usize) -> Vec<PhasePoint> {
    const ZERO: f64 = 1e-13;
    const PARAM_TOL: f64 = 1e-10;
    let n = n_samples.max(3);
    let dt = TAU / n as f64;
    let psi = |t: f64| retro_deviation(shape, lp.point(t)).unwrap_or(f64::NAN);
    let values: Vec<f64> = (0..n).into_par_iter().map(|i| psi(i as f64 * dt)).collect();

    let mut params = Vec::new();
    for i in 0..n {
        let (t0, f0) = (i as f64 * dt, values[i]);
        let f1 = values[(i + 1) % n];
        if f0.abs() <= ZERO {
            params.push(t0);
            continue;
        }
        if f1.abs() <= ZERO || !(f0 * f1 < 0.0) {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (t0, t0 + dt, f0);
        while hi - lo > PARAM_TOL {
            let mid = 0.5 * (lo + hi);
            let fm = psi(mid);
            if fm.is_nan() {
                break;
            }
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm < 0.0) == (flo < 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        let t = if psi(lo).abs() <= psi(hi).abs() { lo } else { hi };
        params.push(t);
    }
    params
        .into_iter()
        .filter_map(|t| {
            let p = lp.point(t);
            shape.bisector_direction(p).ok().map(|v| PhasePoint::new(p, v))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcDirection {
    /// Boundary parameter increases from `s0` to `s2`.
    Increasing,
    Decreasing,
}

/// A boundary arc of a smooth shape, given by boundary parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSpec {
    pub shape: Shape,
    pub s0: f64,
    pub s2: f64,
    pub direction: ArcDirection,
}

impl ArcSpec {
    fn span(&self) -> f64 {
        let raw = match self.direction {
            ArcDirection::Increasing => self.s2 - self.s0,
            ArcDirection::Decreasing => self.s0 - self.s2,
        };
        match self.shape {
            Shape::ParabolaArc { .. } => raw,
            _ => raw.rem_euclid(TAU),
        }
    }

    fn param(&self, u: f64) -> f64 {
        match self.direction {
            ArcDirection::Increasing => self.s0 + u,
            ArcDirection::Decreasing => self.s0 - u,
        }
    }

    /// Curvature and `|dr/dparam|` at a boundary parameter.
    fn local(&self, t: f64) -> Result<(f64, f64)> {
        match self.shape {
            Shape::Disc { radius, .. } => Ok((1.0 / radius, radius)),
            Shape::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                let q = a * a * s * s + b * b * c * c;
                Ok((a * b / q.powf(1.5), q.sqrt()))
            }
            Shape::ParabolaArc { height } => {
                let slope = 2.0 * height * t;
                let g = 1.0 + slope * slope;
                Ok((2.0 * height / g.powf(1.5), g.sqrt()))
            }
            _ => Err(Error::NotSmooth),
        }
    }
}

/// Composite Gauss–Legendre rule on `[0, span]`.
struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel: f64,
    panels: usize,
}

impl PanelRule {
    fn new(span: f64, total_nodes: usize) -> Self {
        let (nodes, weights) = gauss_legendre(GAUSS_PANEL_NODES);
        let panels = (total_nodes / GAUSS_PANEL_NODES).max(1);
        Self {
            nodes,
            weights,
            panel: span / panels as f64,
            panels,
        }
    }

    fn integrate_interval(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Integral over `[a, b]` split on the panel grid.
    fn integrate(&self, f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = (((b - a) / self.panel).ceil() as usize).clamp(1, 4 * self.panels);
        let h = (b - a) / n as f64;
        (0..n)
            .map(|i| self.integrate_interval(f, a + i as f64 * h, a + (i + 1) as f64 * h))
            .sum()
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Both sides of the curvature inequality on an arc:
/// `lhs = ∫_{s1}^{s2} sin(K(s2) - K(s)) ds`, `rhs = ∫_{s0}^{s1} sin K(s) ds`, where `K` is
/// the turning angle from `s0` (running integral of curvature over arc length) and
/// `K(s1) = K(s2)/2`. With strictly increasing curvature `lhs < rhs`.
pub fn lemma_quadrature(arc: &ArcSpec, n_nodes: usize) -> Result<(f64, f64)> {
    let span = arc.span();
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::InvalidShape("arc has zero length".into()));
    }
    let ks: Vec<f64> = (0..MONOTONE_SAMPLES)
        .map(|i| arc.local(arc.param(span * i as f64 / (MONOTONE_SAMPLES - 1) as f64)).map(|l| l.0))
        .collect::<Result<_>>()?;
    let increasing = ks.windows(2).all(|w| w[1] > w[0]);
    let decreasing = ks.windows(2).all(|w| w[1] < w[0]);
    let constant = ks.iter().all(|&k| (k - ks[0]).abs() <= 1e-14 * ks[0].abs());
    if !(increasing || decreasing || constant) {
        return Err(Error::NotMonotone);
    }

    let rule = PanelRule::new(span, n_nodes);
    let density = |u: f64| {
        let (k, speed) = arc.local(arc.param(u)).expect("shape checked above");
        k * speed
    };
    let speed = |u: f64| arc.local(arc.param(u)).expect("shape checked above").1;

    // turning angle at panel starts, then one panel-local rule for any u
    let mut starts = Vec::with_capacity(rule.panels + 1);
    starts.push(0.0);
    for i in 0..rule.panels {
        let a = i as f64 * rule.panel;
        let prev = *starts.last().unwrap();
        starts.push(prev + rule.integrate_interval(&density, a, a + rule.panel));
    }
    let turning = |u: f64| {
        let idx = ((u / rule.panel).floor() as usize).min(rule.panels - 1);
        let a = idx as f64 * rule.panel;
        starts[idx] + rule.integrate_interval(&density, a, u)
    };
    let k2 = starts[rule.panels];
    if k2 >= PI {
        return Err(Error::InvalidShape("arc turns by π or more".into()));
    }

    let (mut lo, mut hi) = (0.0, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if turning(mid) < 0.5 * k2 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * span {
            break;
        }
    }
    let u1 = 0.5 * (lo + hi);
    let lhs = rule.integrate(&|u| (k2 - turning(u)).sin() * speed(u), u1, span);
    let rhs = rule.integrate(&|u| turning(u).sin() * speed(u), 0.0, u1);
    Ok((lhs, rhs))
}

/// Differential of the bounce plus point reflection in coordinates centred at the bounce
/// point with the boundary tangent along the x-axis and the body below it:
/// `(a, b, θ0) -> (-a, b, -θ0)`, `k` the curvature at the bounce point, `c² = a² + b²`.
/// Its determinant is -1; the final reflection of the direction makes the full step's +1.
pub fn bounce_jacobian_closed_form(k: f64, a: f64, b: f64) -> Matrix3 {
    let c2 = a * a + b * b;
    Matrix3([
        [1.0 + 2.0 * k * b, -2.0 * k * a - 2.0 * a / b, 2.0 * c2 / b + 2.0 * k * c2],
        [2.0 * k * a, 1.0 - 2.0 * k * a * a / b, 2.0 * k * a * c2 / b],
        [-2.0 * k, 2.0 * k * a / b, -1.0 - 2.0 * k * c2 / b],
    ])
}

fn perturbed(pp: &PhasePoint, j: usize, delta: f64) -> PhasePoint {
    let mut q = *pp;
    match j {
        0 => q.p.x += delta,
        1 => q.p.y += delta,
        _ => q.v = q.v + delta,
    }
    q
}

fn central_difference(shape: &Shape, pp: &PhasePoint, eps: f64) -> Result<Matrix3> {
    let mut cols = [[0.0; 3]; 3];
    for (j, col) in cols.iter_mut().enumerate() {
        let plus = apply(shape, &perturbed(pp, j, eps)).map_err(|_| Error::PerturbationLeftDomain)?;
        let minus =
            apply(shape, &perturbed(pp, j, -eps)).map_err(|_| Error::PerturbationLeftDomain)?;
        *col = [
            (plus.p.x - minus.p.x) / (2.0 * eps),
            (plus.p.y - minus.p.y) / (2.0 * eps),
            plus.v.diff(minus.v) / (2.0 * eps),
        ];
    }
    Ok(Matrix3::from_columns(cols))
}

/// Differential of the map in `(x, y, angle)` by central differences with one
/// Richardson extrapolation level (`eps` and `eps/2`).
pub fn finite_diff_jacobian(shape: &Shape, pp: &PhasePoint, eps: f64) -> Result<Matrix3> {
    let coarse = central_difference(shape, pp, eps)?;
    let fine = central_difference(shape, pp, 0.5 * eps)?;
    Ok(Matrix3(std::array::from_fn(|i| {
        std::array::from_fn(|j| (4.0 * fine.0[i][j] - coarse.0[i][j]) / 3.0)
    })))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub exponent: f64,
    pub steps: usize,
    /// Set when the orbit ended early; `exponent` then averages over `steps` only.
    pub terminated: Option<Error>,
}

/// Largest Lyapunov exponent by pushing a tangent vector forward with per-step
/// finite-difference Jacobians and renormalising every step.
pub fn lyapunov_exponent(shape: &Shape, pp: &PhasePoint, n: usize) -> LyapunovEstimate {
    let mut v = [1.0, 1.0, 1.0].map(|c: f64| c / 3f64.sqrt());
    let mut sum = 0.0;
    let mut cur = *pp;
    for i in 0..n {
        let jac = finite_diff_jacobian(shape, &cur, FD_EPS);
        let next = apply(shape, &cur);
        let (jac, next) = match (jac, next) {
            (Ok(j), Ok(x)) => (j, x),
            (Err(e), _) | (_, Err(e)) => {
                return LyapunovEstimate {
                    exponent: if i > 0 { sum / i as f64 } else { 0.0 },
                    steps: i,
                    terminated: Some(e),
                }
            }
        };
        let w = jac.mul_vec(v);
        let norm = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        sum += norm.ln();
        v = w.map(|c| c / norm);
        cur = next;
    }
    LyapunovEstimate {
        exponent: if n > 0 { sum / n as f64 } else { 0.0 },
        steps: n,
        terminated: None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbitReport {
    pub period: usize,
    pub points: Vec<PhasePoint>,
    pub monodromy: Matrix3,
    pub eigenvalues: [Complex64; 3],
    pub closure_error: f64,
}

impl PeriodicOrbitReport {
    /// Distance from 1 of the eigenvalue closest to 1.
    pub fn unit_eigenvalue_gap(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| (l - 1.0).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Real eigenvalues off the unit circle mark a hyperbolic orbit.
    pub fn is_hyperbolic(&self, tol: f64) -> bool {
        self.eigenvalues
            .iter()
            .any(|l| l.im.abs() <= tol && (l.norm() - 1.0).abs() > 10.0 * tol)
    }
}

fn iterate(shape: &Shape, pp: &PhasePoint, n: usize) -> Result<PhasePoint> {
    let mut cur = *pp;
    for _ in 0..n {
        cur = apply(shape, &cur)?;
    }
    Ok(cur)
}

fn residual(shape: &Shape, pp: &PhasePoint, q: usize) -> Result<[f64; 3]> {
    let out = iterate(shape, pp, q)?;
    Ok([out.p.x - pp.p.x, out.p.y - pp.p.y, out.v.diff(pp.v)])
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Monodromy of `F^q` at `pp`: the product of per-step Jacobians along the orbit.
pub fn monodromy(shape: &Shape, pp: &PhasePoint, q: usize) -> Result<(Matrix3, Vec<PhasePoint>)> {
    let mut m = Matrix3::IDENTITY;
    let mut cur = *pp;
    let mut points = Vec::with_capacity(q);
    for _ in 0..q {
        points.push(cur);
        let j = finite_diff_jacobian(shape, &cur, FD_EPS)?;
        m = j.mul(&m);
        cur = apply(shape, &cur)?;
    }
    Ok((m, points))
}

/// Solves the symmetric positive definite 3x3 system by Cholesky.
fn solve_spd(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = [0.0; 3];
    for i in 0..3 {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        x[i] = (y[i] - (i + 1..3).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

/// Refines an approximate period-`q` point. Each round takes a Levenberg–Marquardt step
/// on `F^q(z) - z = 0` (regularised because `DF^q - I` is singular along families), then
/// halves the step until the residual drops.
pub fn polish_periodic(shape: &Shape, start: &PhasePoint, q: usize) -> PhasePoint {
    const ROUNDS: usize = 100;
    const CONVERGED: f64 = 1e-12;
    let mut z = *start;
    let Ok(mut r) = residual(shape, &z, q) else {
        return z;
    };
    for _ in 0..ROUNDS {
        let rn = norm3(r);
        if rn < CONVERGED {
            break;
        }
        let Ok((m, _)) = monodromy(shape, &z, q) else {
            break;
        };
        let mut j = m.0;
        for (i, row) in j.iter_mut().enumerate() {
            row[i] -= 1.0;
        }
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for a in 0..3 {
            for b in 0..3 {
                jtj[a][b] = (0..3).map(|k| j[k][a] * j[k][b]).sum();
            }
            jtr[a] = -(0..3).map(|k| j[k][a] * r[k]).sum::<f64>();
        }
        let mu = 1e-12 * (jtj[0][0] + jtj[1][1] + jtj[2][2]).max(1e-300);
        for (a, row) in jtj.iter_mut().enumerate() {
            row[a] += mu;
        }
        let Some(delta) = solve_spd(jtj, jtr) else {
            break;
        };
        let mut scale = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand = PhasePoint::new(
                Vec2::new(z.p.x + scale * delta[0], z.p.y + scale * delta[1]),
                z.v + scale * delta[2],
            );
            if let Ok(rc) = residual(shape, &cand, q) {
                if norm3(rc) < rn {
                    z = cand;
                    r = rc;
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    z
}

/// Looks for the smallest `q <= max_period` with `|F^q(z) - z| < tol`, polishes the
/// periodic point and reports its monodromy spectrum.
pub fn detect_periodic(
    shape: &Shape,
    pp: &PhasePoint,
    max_period: usize,
    tol: f64,
) -> Option<PeriodicOrbitReport> {
    let mut cur = *pp;
    let mut period = None;
    for q in 1..=max_period {
        cur = apply(shape, &cur).ok()?;
        if cur.distance(pp) < tol {
            period = Some(q);
            break;
        }
    }
    let q = period?;
    let z = polish_periodic(shape, pp, q);
    let closure_error = iterate(shape, &z, q).ok()?.distance(&z);
    let (monodromy, points) = monodromy(shape, &z, q).ok()?;
    Some(PeriodicOrbitReport {
        period: q,
        points,
        eigenvalues: monodromy.eigenvalues(),
        monodromy,
        closure_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Angle;
    use approx::assert_relative_eq;

    #[test]
    fn cubic_roots_known() {
        // (x-1)(x-2)(x-3)
        let r = cubic_roots(-6.0, 11.0, -6.0);
        let mut re: Vec<f64> = r.iter().map(|c| c.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }
        // (x-2)(x²+1)
        let r = cubic_roots(-2.0, 1.0, -2.0);
        assert!(r.iter().any(|c| (c - Complex64::new(2.0, 0.0)).norm() < 1e-12));
        assert!(r.iter().any(|c| (c - Complex64::new(0.0, 1.0)).norm() < 1e-12));
    }

    #[test]
    fn eigenvalues_of_diagonal_and_rotation() {
        let m = Matrix3([[0.5, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]);
        let ev = m.eigenvalues();
        assert_relative_eq!(ev[0].re, 0.5, epsilon = 1e-12);
        assert_relative_eq!(ev[2].re, 2.0, epsilon = 1e-12);
        let (s, c) = 0.3f64.sin_cos();
        let rot = Matrix3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
        for l in rot.eigenvalues() {
            assert_relative_eq!(l.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_form_bounce_jacobian() {
        let m = bounce_jacobian_closed_form(0.0, 0.0, 1.0);
        assert_eq!(m.0, [[1.0, 0.0, 2.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert_relative_eq!(m.det(), -1.0, epsilon = 1e-15);
        let m = bounce_jacobian_closed_form(1.0, 0.0, 1.0);
        assert_eq!(m.0, [[3.0, 0.0, 4.0], [0.0, 1.0, 0.0], [-2.0, 0.0, -3.0]]);
        assert_relative_eq!(m.det(), -1.0, epsilon = 1e-15);
    }

    /// Bounce plus point reflection off the disc of curvature `k` tangent to the x-axis at
    /// the origin (body below), as `(x, y, angle) -> (x', y', reflected angle)`.
    fn pre_reflection_map(k: f64, s: [f64; 3]) -> [f64; 3] {
        let shape = Shape::disc(Vec2::new(0.0, -1.0 / k), 1.0 / k).unwrap();
        let p = Vec2::new(s[0], s[1]);
        let b = shape.ray_intersect(p, Angle::new(s[2])).unwrap().unwrap();
        let d = Vec2::from_angle(Angle::new(s[2]));
        let t = Vec2::from_angle(b.tangent_dir);
        let r = t * (2.0 * d.dot(t)) - d;
        let q = b.point + r * p.distance(b.point);
        [q.x, q.y, r.y.atan2(r.x)]
    }

    #[test]
    fn closed_form_matches_finite_differences() {
        for (k, a, b) in [(1.0f64, 0.0f64, 1.0f64), (0.7, 0.4, 1.3), (2.0, -0.5, 0.6), (0.3, 1.2, 0.4)] {
            let s = [a, b, (-b).atan2(-a)];
            let eps = 1e-6;
            let mut cols = [[0.0; 3]; 3];
            for (j, col) in cols.iter_mut().enumerate() {
                let (mut sp, mut sm) = (s, s);
                sp[j] += eps;
                sm[j] -= eps;
                let (fp, fm) = (pre_reflection_map(k, sp), pre_reflection_map(k, sm));
                for i in 0..3 {
                    let mut d = fp[i] - fm[i];
                    if i == 2 {
                        d = crate::geometry::normalize_angle(d);
                    }
                    col[i] = d / (2.0 * eps);
                }
            }
            let fd = Matrix3::from_columns(cols);
            let closed = bounce_jacobian_closed_form(k, a, b);
            for i in 0..3 {
                for j in 0..3 {
                    assert!(
                        (fd.0[i][j] - closed.0[i][j]).abs() < 1e-6 * closed.max_abs(),
                        "k={k} a={a} b={b} entry ({i},{j}): {} vs {}",
                        fd.0[i][j],
                        closed.0[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn retro_deviation_on_axes() {
        let e = Shape::ellipse(1.0, 0.4).unwrap();
        assert!(retro_deviation(&e, Vec2::new(2.0, 0.0)).unwrap().abs() < 1e-14);
        assert!(retro_deviation(&e, Vec2::new(0.0, 2.0)).unwrap().abs() < 1e-14);
        let plus = retro_deviation(&e, Vec2::new(2.0 * 0.01f64.cos(), 2.0 * 0.01f64.sin())).unwrap();
        let minus =
            retro_deviation(&e, Vec2::new(2.0 * 0.01f64.cos(), -2.0 * 0.01f64.sin())).unwrap();
        assert!(plus * minus < 0.0);
        assert_relative_eq!(plus, -minus, epsilon = 1e-12);
    }

    #[test]
    fn disc_loop_is_all_fixed() {
        let d = Shape::disc(Vec2::ZERO, 1.0).unwrap();
        let fps = find_fixed_points(&d, &SearchLoop::around(&d, 1.8), 60);
        assert_eq!(fps.len(), 60);
    }

    #[test]
    fn circular_arc_balances() {
        let arc = ArcSpec {
            shape: Shape::disc(Vec2::ZERO, 1.3).unwrap(),
            s0: 0.2,
            s2: 1.7,
            direction: ArcDirection::Increasing,
        };
        let (lhs, rhs) = lemma_quadrature(&arc, DEFAULT_GAUSS_NODES).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn ellipse_arc_inequality_both_ways() {
        let e = Shape::ellipse(1.0, 0.4).unwrap();
        let inc = ArcSpec {
            shape: e.clone(),
            s0: PI / 2.0,
            s2: 0.0,
            direction: ArcDirection::Decreasing,
        };
        let (lhs, rhs) = lemma_quadrature(&inc, DEFAULT_GAUSS_NODES).unwrap();
        assert!(lhs < rhs, "{lhs} {rhs}");
        let dec = ArcSpec {
            shape: e.clone(),
            s0: 0.0,
            s2: PI / 2.0,
            direction: ArcDirection::Increasing,
        };
        let (lhs, rhs) = lemma_quadrature(&dec, DEFAULT_GAUSS_NODES).unwrap();
        assert!(lhs > rhs);
        let across = ArcSpec {
            shape: e,
            s0: -0.5,
            s2: 0.5,
            direction: ArcDirection::Increasing,
        };
        assert_eq!(lemma_quadrature(&across, DEFAULT_GAUSS_NODES), Err(Error::NotMonotone));
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(16);
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(integral, 2.0 / 31.0, epsilon = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
    }
}
