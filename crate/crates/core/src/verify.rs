//! The battery of checkable claims, at full or reduced budgets.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::analysis::{self, ArcDirection, ArcSpec, SearchLoop};
use crate::dynamics::{self, OrbitOptions, PhasePoint, SegmentState};
use crate::geometry::{Shape, Vec2};
use crate::io::{self, ScenarioConfig, SweepAxis, SweepConfig, SweepParam, SweepTask};
use crate::segment_theory::{self, RotationFormula};

pub const SQUARE_PERIODIC: &str = include_str!("../data/square_periodic.json");
pub const SQUARE_CHAOTIC: &str = include_str!("../data/square_chaotic.json");
pub const FIGURE_SEEDS: [&str; 4] = [
    include_str!("../data/ellipse_figure.json"),
    include_str!("../data/parabola_0.3_figure.json"),
    include_str!("../data/parabola_0.5_figure.json"),
    include_str!("../data/parabola_1_figure.json"),
];

pub const CLAIM_COUNT: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

/// Replaceable pieces of the theory, for negative controls.
#[derive(Debug, Clone, Copy)]
pub struct Hooks {
    pub rotation: RotationFormula,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            rotation: segment_theory::rotation_number,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl ClaimResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub level: Level,
    pub claims: Vec<ClaimResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out: String = self.claims.iter().map(|c| c.line() + "\n").collect();
        let passed = self.claims.iter().filter(|c| c.passed).count();
        out.push_str(&format!("{passed}/{} claims passed\n", self.claims.len()));
        out
    }
}

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "invariant conservation",
        2 => "invariant ellipse membership",
        3 => "rotation number formula",
        4 => "rotation derivative",
        5 => "period thresholds",
        6 => "M/W loci",
        7 => "period-7 construction",
        8 => "segment oracle equivalence",
        9 => "measure preservation",
        10 => "disc rigidity",
        11 => "fixed-point families",
        12 => "curvature inequality",
        13 => "polygon eigenvalue structure",
        14 => "chaos vs integrability",
        15 => "boundedness evidence",
        _ => "unknown claim",
    }
}

/// Runs one claim.
pub fn run_claim(id: u32, level: Level, hooks: &Hooks) -> ClaimResult {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => invariant_conservation(level),
        2 => ellipse_membership(level),
        3 => rotation_formula(level, hooks),
        4 => rotation_derivative(level, hooks),
        5 => period_thresholds(),
        6 => mw_loci(),
        7 => period_seven(),
        8 => oracle_equivalence(level),
        9 => measure_preservation(level),
        10 => disc_rigidity(level),
        11 => fixed_point_families(level),
        12 => curvature_inequality(level),
        13 => polygon_eigenvalues(level),
        14 => chaos_vs_integrability(level),
        15 => boundedness(level),
        _ => (false, format!("no claim {id}")),
    };
    ClaimResult {
        id,
        title: title(id),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn verify_suite(level: Level, hooks: &Hooks) -> VerifyReport {
    VerifyReport {
        level,
        claims: (1..=CLAIM_COUNT).map(|id| run_claim(id, level, hooks)).collect(),
    }
}

pub fn rng(stream: u64) -> StdRng {
    StdRng::seed_from_u64(0x0b0b_b111 ^ stream)
}

/// Segment state with height in [0.2, 2] whose ray lands in [-0.95, 0.95].
pub fn random_segment_state(rng: &mut StdRng) -> SegmentState {
    let x = rng.gen_range(-0.9..0.9);
    let h = rng.gen_range(0.2..2.0);
    let w: f64 = rng.gen_range(-0.95..0.95);
    SegmentState {
        x,
        h,
        theta: ((w - x) / h).atan(),
    }
}

/// Point at distance [1.2, 3] from the centre, direction inside the middle 80% of the cone.
pub fn random_visible_point(shape: &Shape, rng: &mut StdRng) -> PhasePoint {
    loop {
        let r = rng.gen_range(1.2..3.0);
        let t: f64 = rng.gen_range(0.0..TAU);
        let p = shape.centroid() + Vec2::new(t.cos(), t.sin()) * r;
        let off = rng.gen_range(-0.4..0.4);
        if let Ok(cone) = shape.visual_cone(p) {
            return PhasePoint::new(p, cone.bisector + off * cone.width());
        }
    }
}

pub fn unit_disc() -> Shape {
    Shape::disc(Vec2::ZERO, 1.0).expect("valid disc")
}

pub fn reference_ellipse() -> Shape {
    Shape::ellipse(1.0, 0.4).expect("valid ellipse")
}

struct SegmentRun {
    invariant_drift: f64,
    membership: f64,
}

fn segment_runs(level: Level) -> Result<Vec<SegmentRun>, String> {
    let (n_orbits, n_steps) = level.pick((10, 10_000), (100, 100_000));
    let mut r = rng(1);
    let starts: Vec<SegmentState> = (0..n_orbits).map(|_| random_segment_state(&mut r)).collect();
    starts
        .par_iter()
        .map(|s0| {
            let e0 = segment_theory::to_ellipse_coords(s0);
            let inv = segment_theory::invariants(&e0).map_err(|e| e.to_string())?;
            let mut s = *s0;
            let mut run = SegmentRun {
                invariant_drift: 0.0,
                membership: 0.0,
            };
            for _ in 0..n_steps {
                s = dynamics::step_segment(&s).map_err(|e| e.to_string())?;
                let e = segment_theory::to_ellipse_coords(&s);
                let a_sq = segment_theory::a_squared(&e);
                run.invariant_drift = run.invariant_drift.max(((a_sq - inv.a_sq) / inv.a_sq).abs());
                run.membership = run
                    .membership
                    .max((segment_theory::ellipse_membership(&e, &inv) - 1.0).abs());
            }
            Ok(run)
        })
        .collect()
}

fn invariant_conservation(level: Level) -> (bool, String) {
    match segment_runs(level) {
        Ok(runs) => {
            let worst = runs.iter().map(|r| r.invariant_drift).fold(0.0, f64::max);
            (worst < 1e-9, format!("max relative drift of a² = {worst:.3e} over {} orbits", runs.len()))
        }
        Err(e) => (false, e),
    }
}

fn ellipse_membership(level: Level) -> (bool, String) {
    match segment_runs(level) {
        Ok(runs) => {
            let worst = runs.iter().map(|r| r.membership).fold(0.0, f64::max);
            (worst < 1e-9, format!("max |w²/a² + d²/b² - 1| = {worst:.3e}"))
        }
        Err(e) => (false, e),
    }
}

fn rotation_formula(level: Level, hooks: &Hooks) -> (bool, String) {
    let (n_ellipses, n_steps) = level.pick((10, 1_000), (50, 10_000));
    let mut r = rng(3);
    let mut worst_phi: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    for _ in 0..n_ellipses {
        let h = r.gen_range(0.2..2.0);
        let a = r.gen_range(0.05..0.95);
        let t = r.gen_range(0.0..TAU);
        let Ok(s) = segment_theory::state_on_ellipse(h, a, t) else {
            return (false, format!("no state on ellipse a={a}, h={h}"));
        };
        let e = segment_theory::to_ellipse_coords(&s);
        let inc = match segment_theory::rotation_increments(&e, n_steps) {
            Ok(inc) => inc,
            Err(err) => return (false, err.to_string()),
        };
        let mean = inc.iter().sum::<f64>() / n_steps as f64;
        let predicted = (hooks.rotation)(a, segment_theory::b_of(a, h)).phi;
        worst_phi = worst_phi.max((mean - predicted).abs());
        worst_spread = worst_spread.max(inc.iter().map(|i| (i - inc[0]).abs()).fold(0.0, f64::max));
    }
    (
        worst_phi < 1e-4 && worst_spread < 1e-9,
        format!("max |measured - φ| = {worst_phi:.3e}, max increment spread = {worst_spread:.3e}"),
    )
}

fn rotation_derivative(level: Level, hooks: &Hooks) -> (bool, String) {
    let (na, nb) = level.pick((10, 10), (40, 25));
    let mut worst: f64 = 0.0;
    for i in 0..na {
        for j in 0..nb {
            let a = 0.05 + 1.95 * (i as f64 + 0.5) / na as f64;
            let b = 0.05 + 1.95 * (j as f64 + 0.37) / nb as f64;
            let da = 1e-5 * b;
            let phi = |a: f64| (hooks.rotation)(a, b).phi;
            let fd = (phi(a + da) - phi(a - da)) / (2.0 * da);
            worst = worst.max((fd - 2.0 * b / (b * b + a * a)).abs());
        }
    }
    (worst < 1e-6, format!("max |FD - 2b/(b²+a²)| = {worst:.3e} on {} points", na * nb))
}

fn built_rotation(h: f64, target: f64) -> Option<f64> {
    let s = segment_theory::build_periodic_orbit(h, target)?;
    segment_theory::measured_rotation(&segment_theory::to_ellipse_coords(&s), 64).ok()
}

fn period_thresholds() -> (bool, String) {
    let checks = [
        (0.99, 1.5 * PI, true),
        (1.01, 1.5 * PI, false),
        (1.7, 4.0 * PI / 3.0, true),
        (1.75, 4.0 * PI / 3.0, false),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (h, target, expect) in checks {
        let got = built_rotation(h, target);
        let fine = match got {
            Some(m) => expect && (m - target).abs() < 1e-9,
            None => !expect,
        };
        ok &= fine;
        notes.push(format!("h={h}:{}", if got.is_some() { "built" } else { "none" }));
    }
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let h = 0.1 + 0.2 * i as f64;
        worst = worst.max((segment_theory::rho(h) - segment_theory::rho_numeric(h)).abs());
    }
    ok &= worst < 1e-9;
    (ok, format!("{}; max |ρ - sup φ| = {worst:.3e}", notes.join(" ")))
}

fn mw_loci() -> (bool, String) {
    let base: ScenarioConfig = io::parse_scenario(
        r#"{"shape":{"type":"segment"},"initial":[{"x":0,"h":1,"theta":0}],"steps":0}"#,
    )
    .expect("literal scenario");
    let cfg = SweepConfig {
        base,
        task: SweepTask::Period4,
        axes: vec![SweepAxis {
            param: SweepParam::Height,
            values: (2..=9).map(|i| i as f64 / 10.0).collect(),
        }],
        max_cells: 100,
        fixed_point_samples: None,
    };
    let report = match io::run_sweep(&cfg, 0) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    if let Some(row) = report.rows.iter().find(|r| r.error.is_some()) {
        return (false, format!("cell {} failed: {:?}", row.cell, row.error));
    }
    let max_of = |name: &str| {
        report
            .column(name)
            .into_iter()
            .map(|v| v.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };
    let (m, w, c) = (max_of("m_circle_residual"), max_of("w_ellipse_residual"), max_of("closure_error"));
    (
        m < 1e-8 && w < 1e-8 && c < 1e-8,
        format!("M circle residual {m:.3e}, W ellipse residual {w:.3e}, closure {c:.3e}"),
    )
}

fn period_seven() -> (bool, String) {
    let target = 10.0 * PI / 7.0;
    let Some(s0) = segment_theory::build_periodic_orbit(1.0, target) else {
        return (false, "rotation 10π/7 not realised at h=1".into());
    };
    let shape = Shape::segment();
    let start = s0.to_phase_point();
    let mut cur = start;
    let mut early: f64 = f64::INFINITY;
    for q in 1..=7 {
        cur = match dynamics::apply(&shape, &cur) {
            Ok(c) => c,
            Err(e) => return (false, e.to_string()),
        };
        if q < 7 {
            early = early.min(cur.distance(&start));
        }
    }
    let closure = cur.distance(&start);
    (
        closure < 1e-8 && early > 1e-3,
        format!("closure after 7 steps {closure:.3e}; closest earlier return {early:.3e}"),
    )
}

fn oracle_equivalence(level: Level) -> (bool, String) {
    let n = level.pick(1_000, 10_000);
    let mut r = rng(8);
    let shape = Shape::segment();
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let s = random_segment_state(&mut r);
        let closed = match dynamics::step_segment(&s) {
            Ok(c) => c,
            Err(e) => return (false, e.to_string()),
        };
        let general = dynamics::apply(&shape, &s.to_phase_point())
            .and_then(|pp| SegmentState::from_phase_point(&pp));
        match general {
            Ok(g) => {
                let d = (g.x - closed.x).abs() + (g.h - closed.h).abs() + (g.theta - closed.theta).abs();
                worst = worst.max(d);
            }
            Err(e) => return (false, format!("general map failed at {s:?}: {e}")),
        }
    }
    (worst < 1e-10, format!("max state difference {worst:.3e} over {n} states"))
}

fn measure_preservation(level: Level) -> (bool, String) {
    let n = level.pick(20, 100);
    let mut worst_fd: f64 = 0.0;
    for (k, shape) in [unit_disc(), reference_ellipse()].iter().enumerate() {
        let mut r = rng(90 + k as u64);
        for _ in 0..n {
            let pp = random_visible_point(shape, &mut r);
            match analysis::finite_diff_jacobian(shape, &pp, analysis::FD_EPS) {
                Ok(m) => worst_fd = worst_fd.max((m.det() - 1.0).abs()),
                Err(e) => return (false, format!("{e} at {pp:?}")),
            }
        }
    }
    let mut r = rng(99);
    let mut worst_closed: f64 = 0.0;
    for _ in 0..n {
        let k = r.gen_range(0.0..2.0);
        let a = r.gen_range(-1.0..1.0);
        let b = r.gen_range(0.5..2.0);
        let m = analysis::bounce_jacobian_closed_form(k, a, b);
        worst_closed = worst_closed.max((m.det() + 1.0).abs());
    }
    (
        worst_fd < 1e-5 && worst_closed < 1e-12,
        format!("max |det DF - 1| = {worst_fd:.3e}; max |det B + 1| = {worst_closed:.3e}"),
    )
}

fn disc_rigidity(level: Level) -> (bool, String) {
    let (n_orbits, n_steps) = level.pick((5, 1_000), (20, 10_000));
    let disc = unit_disc();
    let mut r = rng(10);
    let starts: Vec<PhasePoint> = (0..n_orbits).map(|_| random_visible_point(&disc, &mut r)).collect();
    let drifts: Result<Vec<f64>, String> = starts
        .par_iter()
        .map(|pp| {
            let r0 = pp.p.norm();
            let mut cur = *pp;
            let mut drift: f64 = 0.0;
            for _ in 0..n_steps {
                cur = dynamics::apply(&disc, &cur).map_err(|e| e.to_string())?;
                drift = drift.max((cur.p.norm() - r0).abs());
            }
            Ok(drift)
        })
        .collect();
    match drifts {
        Ok(d) => {
            let worst = d.into_iter().fold(0.0, f64::max);
            (worst < 1e-9, format!("max ||p| drift| = {worst:.3e}"))
        }
        Err(e) => (false, e),
    }
}

fn fixed_point_families(level: Level) -> (bool, String) {
    let samples = level.pick(180, analysis::DEFAULT_LOOP_SAMPLES);
    let shape = reference_ellipse();
    let mut ok = true;
    let mut notes = Vec::new();
    for radius in [1.5, 2.0, 3.0] {
        let fps = analysis::find_fixed_points(&shape, &SearchLoop::around(&shape, radius), samples);
        let residual = fps
            .iter()
            .map(|z| dynamics::apply(&shape, z).map(|o| o.distance(z)).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        let axes = [(radius, 0.0), (0.0, radius), (-radius, 0.0), (0.0, -radius)]
            .iter()
            .all(|&(x, y)| fps.iter().any(|z| z.p.distance(Vec2::new(x, y)) < 1e-8));
        ok &= fps.len() >= 4 && residual < 1e-8 && axes;
        notes.push(format!("r={radius}: {} points, residual {residual:.1e}, axes {axes}", fps.len()));
    }
    (ok, notes.join("; "))
}

fn curvature_inequality(level: Level) -> (bool, String) {
    let n = level.pick(5, 20);
    let mut r = rng(12);
    let mut ok = true;
    let mut min_gap = f64::INFINITY;
    for _ in 0..n {
        let a = r.gen_range(1.0..2.0);
        let b = a * r.gen_range(0.3..0.9);
        let s0 = r.gen_range(0.1..FRAC_PI_2);
        let s2 = r.gen_range(0.0..s0 - 0.05);
        let arc = ArcSpec {
            shape: Shape::ellipse(a, b).expect("valid ellipse"),
            s0,
            s2,
            direction: ArcDirection::Decreasing,
        };
        match analysis::lemma_quadrature(&arc, analysis::DEFAULT_GAUSS_NODES) {
            Ok((lhs, rhs)) => {
                min_gap = min_gap.min(rhs - lhs);
                ok &= lhs < rhs;
            }
            Err(e) => return (false, format!("{e} on {arc:?}")),
        }
    }
    let mut worst_circle: f64 = 0.0;
    for _ in 0..n {
        let arc = ArcSpec {
            shape: Shape::disc(Vec2::ZERO, r.gen_range(0.3..3.0)).expect("valid disc"),
            s0: r.gen_range(-PI..PI),
            s2: 0.0,
            direction: ArcDirection::Increasing,
        };
        let arc = ArcSpec {
            s2: arc.s0 + r.gen_range(0.1..3.0),
            ..arc
        };
        match analysis::lemma_quadrature(&arc, analysis::DEFAULT_GAUSS_NODES) {
            Ok((lhs, rhs)) => worst_circle = worst_circle.max((lhs - rhs).abs()),
            Err(e) => return (false, format!("{e} on {arc:?}")),
        }
    }
    ok &= worst_circle < 1e-8;
    (
        ok,
        format!("min rhs - lhs on elliptical arcs {min_gap:.3e}; max |lhs - rhs| on circular arcs {worst_circle:.3e}"),
    )
}

fn polygon_eigenvalues(level: Level) -> (bool, String) {
    let cfg = io::parse_scenario(SQUARE_PERIODIC).expect("bundled corpus parses");
    let shape = cfg.shape().expect("bundled shape");
    let mut seeds = cfg.initial_points();
    if level == Level::Quick {
        seeds.truncate(10);
    }
    let reports: Vec<_> = seeds
        .par_iter()
        .map(|pp| analysis::detect_periodic(&shape, pp, cfg.analysis.max_period, cfg.analysis.tol))
        .collect();
    let mut detected = 0;
    let mut hyperbolic = 0;
    let mut failures = Vec::new();
    let (mut worst_gap, mut worst_det, mut worst_prod): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for (i, rep) in reports.iter().enumerate() {
        let Some(rep) = rep else { continue };
        detected += 1;
        let gap = rep.unit_eigenvalue_gap();
        let det = (rep.monodromy.det().abs() - 1.0).abs();
        let moduli = rep.eigenvalues.map(|l| l.norm());
        let is_hyp = moduli[2] > 1.0 + 1e-3 && rep.eigenvalues[2].im == 0.0;
        let prod = if is_hyp { (moduli[0] * moduli[2] - 1.0).abs() } else { 0.0 };
        hyperbolic += is_hyp as usize;
        worst_gap = worst_gap.max(gap);
        worst_det = worst_det.max(det);
        worst_prod = worst_prod.max(prod);
        if gap >= 1e-4 || det >= 1e-3 || prod >= 1e-3 {
            let ev: Vec<String> = rep
                .eigenvalues
                .iter()
                .map(|l| if l.im == 0.0 { format!("{:.4}", l.re) } else { format!("{:.4}{:+.4}i", l.re, l.im) })
                .collect();
            failures.push(format!("seed {i} (period {}, eigenvalues {})", rep.period, ev.join(", ")));
        }
    }
    let mut detail = format!(
        "{detected}/{} seeds periodic, {hyperbolic} hyperbolic; max unit-eigenvalue gap {worst_gap:.1e}, max ||det|-1| {worst_det:.1e}, max |λmax·λmin - 1| {worst_prod:.1e}",
        seeds.len()
    );
    if !failures.is_empty() {
        detail.push_str(&format!("; violations: {}", failures.join("; ")));
    }
    (detected > 0 && failures.is_empty(), detail)
}

fn chaos_vs_integrability(level: Level) -> (bool, String) {
    let n_regular = 10_000;
    let (n_orbits, n_chaos) = level.pick((2, 10_000), (5, 100_000));
    let mut r = rng(14);
    let segment = Shape::segment();
    let disc = unit_disc();
    let mut regular: Vec<(&Shape, PhasePoint)> = Vec::new();
    for _ in 0..n_orbits {
        regular.push((&segment, random_segment_state(&mut r).to_phase_point()));
        regular.push((&disc, random_visible_point(&disc, &mut r)));
    }
    let regular: Vec<analysis::LyapunovEstimate> = regular
        .par_iter()
        .map(|(shape, pp)| analysis::lyapunov_exponent(shape, pp, n_regular))
        .collect();
    let worst_seg = regular.iter().step_by(2).map(|l| l.exponent.abs()).fold(0.0, f64::max);
    let worst_disc = regular.iter().skip(1).step_by(2).map(|l| l.exponent.abs()).fold(0.0, f64::max);
    let regular_ok = regular.iter().all(|l| l.terminated.is_none()) && worst_seg < 1e-3 && worst_disc < 1e-3;

    let cfg = io::parse_scenario(SQUARE_CHAOTIC).expect("bundled corpus parses");
    let shape = cfg.shape().expect("bundled shape");
    let chaotic: Vec<analysis::LyapunovEstimate> = cfg
        .initial_points()
        .par_iter()
        .map(|pp| analysis::lyapunov_exponent(&shape, pp, n_chaos))
        .collect();
    let best = chaotic
        .iter()
        .filter(|l| l.terminated.is_none())
        .map(|l| l.exponent)
        .fold(f64::NEG_INFINITY, f64::max);
    (
        regular_ok && best > 0.01,
        format!(
            "max |λ| segment {worst_seg:.3e}, disc {worst_disc:.3e} ({n_regular} steps); best square λ {best:.4} ({n_chaos} steps)"
        ),
    )
}

fn boundedness(level: Level) -> (bool, String) {
    let steps = level.pick(10_000, 1_000_000);
    let mut notes = Vec::new();
    let mut ok = true;
    for text in FIGURE_SEEDS {
        let cfg = io::parse_scenario(text).expect("bundled corpus parses");
        let shape = cfg.shape().expect("bundled shape");
        let runs: Vec<(f64, bool)> = cfg
            .initial_points()
            .par_iter()
            .map(|pp| {
                let rec = dynamics::orbit(&shape, pp, steps, steps, OrbitOptions::default());
                (rec.summary.max_radius, rec.summary.steps_completed == steps)
            })
            .collect();
        let max_r = runs.iter().map(|r| r.0).fold(0.0, f64::max);
        let completed = runs.iter().all(|r| r.1);
        ok &= completed && max_r < 10.0;
        notes.push(format!("{}: max |p| {max_r:.3}{}", cfg.id, if completed { "" } else { " (terminated)" }));
    }
    (ok, format!("{steps} steps; {}", notes.join(", ")))
}
