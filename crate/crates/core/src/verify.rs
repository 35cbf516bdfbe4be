//! Property suites over random draws, grouped the way the CLI exposes them.
//!
//! Each check is numbered; the numbering is shared with the acceptance test
//! target and the README.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::caratheodory::{
    car_metric, circle_profile, classify, extremal_omegas, extremality_check, objective, objective_closed_form,
    pushforward, Config, ExtremalSet, ScalarMap, TangentKind,
};
use crate::disc::MoebiusMap;
use crate::error::{Error, Result};
use crate::families::{
    balanced_extremal, bidisc_interpolant, royal_extremal, standard_schur_bidisc, standard_schur_g, SchurG,
};
use crate::numeric::{angular_distance, unit, ONE, ZERO};
use crate::realization::{model_residual, random_unitary_colligation, realize, FiniteModel, ModelOperator};
use crate::sampling::{automorphism, complex_box, direction, disc_point, g_point, seeded, tangent, unit_circle, SeededRng};
use crate::symdisc::{jacobian_phi_pair, line_avoidance_check, make_tangent, phi_raw, GPoint, GTangent, TangentSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{status}] {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Metric,
    Classify,
    Families,
    Realization,
    All,
}

impl Suite {
    pub fn ids(self) -> &'static [u8] {
        match self {
            Suite::Metric => &[1, 2, 3, 6, 7, 12],
            Suite::Classify => &[4, 5, 13],
            Suite::Families => &[8, 9, 10],
            Suite::Realization => &[11],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(Suite::Metric),
            "classify" => Ok(Suite::Classify),
            "families" => Ok(Suite::Families),
            "realization" => Ok(Suite::Realization),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidParameter(format!("unknown suite {other:?}"))),
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &Config) -> Vec<CheckReport> {
    suite.ids().iter().map(|&id| run_check(id, cfg)).collect()
}

/// Run a single numbered check. Unknown numbers produce a failing report.
pub fn run_check(id: u8, cfg: &Config) -> CheckReport {
    let (name, outcome) = match id {
        1 => ("royal metric", royal_metric(cfg)),
        2 => ("flat metric", flat_metric(cfg)),
        3 => ("balanced fingerprint", balanced_fingerprint(cfg)),
        4 => ("exceptional fingerprint", exceptional_fingerprint(cfg)),
        5 => ("purely unbalanced fingerprint", unbalanced_fingerprint(cfg)),
        6 => ("closed-form agreement", closed_form_agreement(cfg)),
        7 => ("injectivity and jacobian", injectivity_and_jacobian(cfg)),
        8 => ("royal family extremality", royal_family(cfg)),
        9 => ("balanced family alignment", balanced_family(cfg)),
        10 => ("bidisc interpolation", bidisc_interpolation(cfg)),
        11 => ("realization schur bound", realization_bound(cfg)),
        12 => ("generic uniqueness", generic_uniqueness(cfg)),
        13 => ("classifier round trip", classifier_round_trip(cfg)),
        _ => ("unknown", Err(Error::InvalidParameter(format!("no check numbered {id}")))),
    };
    let (passed, detail) = match outcome {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckReport { id, name: name.to_string(), passed, detail }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn rng_for(cfg: &Config, id: u8) -> SeededRng {
    seeded(cfg.seed.wrapping_mul(1_000_003).wrapping_add(id as u64))
}

fn nonzero_box(rng: &mut SeededRng, a: f64) -> Complex64 {
    loop {
        let c = complex_box(rng, a);
        if c.norm() > 1e-2 {
            return c;
        }
    }
}

/// Two points on the circle at least `gap` apart.
fn separated_pair(rng: &mut SeededRng, gap: f64) -> (Complex64, Complex64) {
    let a = rng.random_range(0.0..TAU);
    let d = rng.random_range(gap..TAU - gap);
    (unit(a), unit(a + d))
}

fn max_relative<T>(items: impl Iterator<Item = T>, mut f: impl FnMut(T) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for x in items {
        worst = worst.max(f(x)?);
    }
    Ok(worst)
}

fn metric_against(cfg: &Config, delta: &GTangent, expected: f64) -> Result<(f64, f64)> {
    let car = car_metric(delta, cfg)?;
    Ok(((car.value - expected).abs() / expected, car.profile.relative_spread()))
}

fn royal_metric(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 1);
    let (mut err, mut spread): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let z = disc_point(&mut rng, 0.95);
        let c = nonzero_box(&mut rng, 2.0);
        let delta = make_tangent(&TangentSpec::Royal { z, c })?;
        let (e, s) = metric_against(cfg, &delta, c.norm() / (1.0 - z.norm_sqr()))?;
        err = err.max(e);
        spread = spread.max(s);
    }
    outcome(err < 1e-9 && spread < 1e-9, format!("100 draws, max rel err {err:.2e}, max spread {spread:.2e}"))
}

fn flat_metric(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 2);
    let (mut err, mut spread): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let beta = disc_point(&mut rng, 0.95);
        let z = disc_point(&mut rng, 0.95);
        let c = nonzero_box(&mut rng, 2.0);
        let delta = make_tangent(&TangentSpec::Flat { beta, z, c })?;
        let (e, s) = metric_against(cfg, &delta, c.norm() / (1.0 - z.norm_sqr()))?;
        err = err.max(e);
        spread = spread.max(s);
    }
    outcome(err < 1e-9 && spread < 1e-9, format!("100 draws, max rel err {err:.2e}, max spread {spread:.2e}"))
}

/// Angular distance between two finite sets matched greedily; infinite when sizes differ.
fn set_distance(found: &[Complex64], expected: &[Complex64]) -> f64 {
    if found.len() != expected.len() {
        return f64::INFINITY;
    }
    expected
        .iter()
        .map(|e| found.iter().map(|f| angular_distance(f.arg(), e.arg())).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn random_hyperbolic(rng: &mut SeededRng) -> Result<(MoebiusMap, Complex64, Complex64)> {
    let (w1, w2) = separated_pair(rng, 0.5);
    let k = rng.random_range(0.1..0.9);
    Ok((MoebiusMap::hyperbolic(w1, w2, k)?, w1, w2))
}

fn balanced_fingerprint(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 3);
    let mut worst: f64 = 0.0;
    let mut misses = 0;
    for _ in 0..50 {
        let (m, w1, w2) = random_hyperbolic(&mut rng)?;
        let delta = make_tangent(&TangentSpec::Balanced { m, z: disc_point(&mut rng, 0.9), c: nonzero_box(&mut rng, 1.0) })?;
        match extremal_omegas(&car_metric(&delta, cfg)?.profile, cfg) {
            ExtremalSet::Finite(ws) => {
                let d = set_distance(&ws, &[w1.conj(), w2.conj()]);
                if d.is_finite() {
                    worst = worst.max(d);
                } else {
                    misses += 1;
                }
            }
            ExtremalSet::All => misses += 1,
        }
    }
    let base = GPoint::new(Complex64::new(0.5, 0.0), ZERO)?;
    let worked = GTangent::new(base, [Complex64::new(1.75, 0.0), Complex64::new(0.5, 0.0)]);
    let car = car_metric(&worked, cfg)?;
    let car_err = (car.value - 1.0).abs();
    let set_err = match extremal_omegas(&car.profile, cfg) {
        ExtremalSet::Finite(ws) => set_distance(&ws, &[ONE, -ONE]),
        ExtremalSet::All => f64::INFINITY,
    };
    outcome(
        misses == 0 && worst < 1e-5 && car_err < 1e-9 && set_err < 1e-9,
        format!(
            "50 draws, {misses} wrong counts, max angular err {worst:.2e}; worked car err {car_err:.2e}, ω err {set_err:.2e}"
        ),
    )
}

fn exceptional_fingerprint(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 4);
    let (mut worst_angle, mut worst_kappa): (f64, f64) = (0.0, 0.0);
    let mut misses = 0;
    for _ in 0..20 {
        let w = unit_circle(&mut rng);
        let s = rng.random_range(0.2..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let m = MoebiusMap::parabolic(w, s)?;
        let delta = make_tangent(&TangentSpec::Exceptional { m, z: disc_point(&mut rng, 0.8), c: nonzero_box(&mut rng, 1.0) })?;
        let ty = classify(&delta, cfg)?;
        match (&ty.diagnostics.extremal, ty.diagnostics.normalized_curvature) {
            (ExtremalSet::Finite(ws), Some(kappa)) if ws.len() == 1 => {
                worst_angle = worst_angle.max(angular_distance(ws[0].arg(), w.conj().arg()));
                worst_kappa = worst_kappa.max(kappa.abs());
            }
            _ => misses += 1,
        }
    }
    outcome(
        misses == 0 && worst_angle < 1e-4 && worst_kappa < 1e-3,
        format!("20 draws, {misses} non-unique, max angular err {worst_angle:.2e}, max |f''/f| {worst_kappa:.2e}"),
    )
}

/// Tangent of the unbalanced normal form at its origin, `k_*(0, c0)`.
///
/// `f''/f` is not invariant under automorphisms of `G`: moving the base point
/// along the geodesic toward the boundary, or letting `α -> 0` (the royal
/// limit), drives it to zero. Draws stay at `z0 = 0` with `|α| >= 0.1`.
fn random_unbalanced(rng: &mut SeededRng) -> Result<GTangent> {
    let c = unit_circle(rng);
    let alpha = Complex64::from_polar(rng.random_range(0.1..0.95), rng.random_range(0.0..TAU));
    make_tangent(&TangentSpec::Unbalanced { c, alpha, z0: ZERO, c0: nonzero_box(rng, 1.0) })
}

fn unbalanced_fingerprint(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 5);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut misses = 0;
    for _ in 0..50 {
        let delta = random_unbalanced(&mut rng)?;
        let car = car_metric(&delta, cfg)?;
        match (extremal_omegas(&car.profile, cfg), car.profile.maxima.first()) {
            (ExtremalSet::Finite(ws), Some(top)) if ws.len() == 1 => worst = worst.max(top.second_derivative / top.value),
            _ => misses += 1,
        }
    }
    outcome(misses == 0 && worst < -1e-3, format!("50 draws, {misses} non-unique, max f''/f {worst:.3e}"))
}

fn closed_form_agreement(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 6);
    let worst = max_relative(0..10_000, |_| {
        let delta = tangent(&mut rng, 0.98);
        let w = unit_circle(&mut rng);
        let a = objective(&delta, w)?;
        let b = objective_closed_form(&delta, w);
        Ok((a - b).abs() / a.max(b).max(1e-300))
    })?;
    outcome(worst < 1e-9, format!("10^4 draws, max rel diff {worst:.2e}"))
}

fn injectivity_and_jacobian(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 7);
    let (mut min_ratio, mut worst_fd, mut min_det, mut min_line) = (f64::INFINITY, 0.0f64, f64::INFINITY, f64::INFINITY);
    for _ in 0..10_000 {
        let (w1, w2) = separated_pair(&mut rng, 0.05);
        let (s, t) = (g_point(&mut rng, 0.95), g_point(&mut rng, 0.95));
        let image = |p: &GPoint| [phi_raw(w1, p.s1, p.s2), phi_raw(w2, p.s1, p.s2)];
        let (a, b) = (image(&s), image(&t));
        let din = ((s.s1 - t.s1).norm_sqr() + (s.s2 - t.s2).norm_sqr()).sqrt();
        let dout = ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr()).sqrt();
        if din > 0.0 {
            min_ratio = min_ratio.min(dout / din);
        }
        let j = jacobian_phi_pair(w1, w2, &s)?;
        let h = 1e-6;
        let d = |w: Complex64, e: usize| {
            let (mut p, mut m) = ([s.s1, s.s2], [s.s1, s.s2]);
            p[e] += h;
            m[e] -= h;
            (phi_raw(w, p[0], p[1]) - phi_raw(w, m[0], m[1])) / (2.0 * h)
        };
        let fd = d(w1, 0) * d(w2, 1) - d(w1, 1) * d(w2, 0);
        worst_fd = worst_fd.max((fd - j).norm() / j.norm());
        min_det = min_det.min(j.norm());
        min_line = min_line.min(line_avoidance_check(w1, w2, &s).margin);
    }
    outcome(
        min_ratio > 0.0 && worst_fd < 1e-6 && min_det > 0.0,
        format!(
            "10^4 pairs, min |ΔΦ|/|Δs| {min_ratio:.2e}, max jacobian rel err {worst_fd:.2e}, min |J| {min_det:.2e}, min line margin {min_line:.2e}"
        ),
    )
}

fn royal_family(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 8);
    let catalog = standard_schur_g();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let z = disc_point(&mut rng, 0.9);
        let c = nonzero_box(&mut rng, 1.0);
        let m = automorphism(&mut rng, 0.9);
        let psi = if k % 5 == 4 { SchurG::Phi { eta: unit_circle(&mut rng) } } else { catalog[k % catalog.len()].clone() };
        let f = royal_extremal(m, psi);
        let delta = make_tangent(&TangentSpec::Royal { z, c })?;
        let r = extremality_check(&f, &delta, cfg)?;
        worst = worst.max(r.gap.abs() / r.car.max(1.0));
    }
    outcome(worst < 1e-8, format!("50 members, max |gap| {worst:.2e}"))
}

fn balanced_family(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 9);
    let catalog = standard_schur_bidisc();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let (m, _, _) = random_hyperbolic(&mut rng)?;
        let delta = make_tangent(&TangentSpec::Balanced { m, z: disc_point(&mut rng, 0.9), c: nonzero_box(&mut rng, 1.0) })?;
        let t = rng.random_range(0.0..=1.0);
        let member = balanced_extremal(&delta, t, catalog[k % catalog.len()].clone(), cfg)?;
        let pushed = pushforward(&member, &delta)?;
        let err = pushed.base.norm().max((pushed.vec - member.car).norm());
        worst = worst.max(err);
    }
    outcome(worst < 1e-8, format!("50 members, max alignment err {worst:.2e}"))
}

/// 64 points of the disc: 8 radii times 8 angles.
pub fn disc_grid() -> Vec<Complex64> {
    (0..8)
        .flat_map(|i| (0..8).map(move |j| Complex64::from_polar(0.99 * (i as f64 + 1.0) / 8.0, TAU * (j as f64 + 0.5 * (i % 2) as f64) / 8.0)))
        .collect()
}

fn bidisc_interpolation(_cfg: &Config) -> Result<Outcome> {
    let grid = disc_grid();
    let half = Complex64::new(0.5, 0.0);
    let (mut cond_err, mut sup): (f64, f64) = (0.0, 0.0);
    let mut members = 0;
    for theta in standard_schur_bidisc() {
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let f = bidisc_interpolant(t, theta.clone())?;
            members += 1;
            cond_err = cond_err.max(f.eval([ZERO, ZERO])?.norm());
            cond_err = cond_err.max((f.eval([half, half])? - half).norm());
            for &a in &grid {
                for &b in &grid {
                    sup = sup.max(f.eval([a, b])?.norm());
                }
            }
        }
    }
    outcome(
        cond_err < 1e-12 && sup <= 1.0 + 1e-10,
        format!("{members} members on a 64x64 grid, max condition err {cond_err:.2e}, sup |f| {sup:.12}"),
    )
}

fn realization_bound(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 11);
    let sizes = [1, 2, 3, 5];
    let mut sup: f64 = 0.0;
    for k in 0..100u64 {
        let n = sizes[k as usize % sizes.len()];
        let seed = cfg.seed.wrapping_add(k);
        let phi = realize(random_unitary_colligation(n, seed)?, ModelOperator::random_diagonal(n, seed ^ 0x5eed)?)?;
        for _ in 0..1000 {
            sup = sup.max(phi.eval(g_point(&mut rng, 0.999).coords())?.norm());
        }
    }
    let pairs: Vec<(GPoint, GPoint)> = (0..1000).map(|_| (g_point(&mut rng, 0.99), g_point(&mut rng, 0.99))).collect();
    let w = unit_circle(&mut rng);
    let r1 = model_residual(&crate::caratheodory::PhiMap { omega: w }, &FiniteModel::scalar(w)?, &pairs)?;
    let half = crate::caratheodory::FnMap(|p: [Complex64; 2]| 0.5 * p[0]);
    let r2 = model_residual(&half, &FiniteModel::scalar(ZERO)?, &pairs)?;
    outcome(
        sup <= 1.0 + 1e-10 && r1 < 1e-12 && r2 < 1e-12,
        format!("100 colligations x 10^3 points, sup |φ| {sup:.12}; model residuals {r1:.2e}, {r2:.2e}"),
    )
}

fn generic_uniqueness(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 12);
    let mut worst_share: f64 = 1.0;
    for _ in 0..10 {
        let base = g_point(&mut rng, 0.9);
        let mut unique = 0;
        for _ in 0..1000 {
            let delta = GTangent::new(base, direction(&mut rng));
            let profile = circle_profile(&delta, cfg)?;
            if extremal_omegas(&profile, cfg).count() == Some(1) {
                unique += 1;
            }
        }
        worst_share = worst_share.min(unique as f64 / 1000.0);
    }
    outcome(worst_share >= 0.95, format!("10 base points x 10^3 directions, min unique share {:.1}%", 100.0 * worst_share))
}

/// `curv_tol` used for exceptional draws in the round trip.
pub const EXCEPTIONAL_CURV_TOL: f64 = 1e-3;

fn draw(kind: TangentKind, rng: &mut SeededRng) -> Result<GTangent> {
    let spec = match kind {
        TangentKind::Royal => TangentSpec::Royal { z: disc_point(rng, 0.95), c: nonzero_box(rng, 1.0) },
        TangentKind::Flat => {
            TangentSpec::Flat { beta: disc_point(rng, 0.95), z: disc_point(rng, 0.95), c: nonzero_box(rng, 1.0) }
        }
        TangentKind::PurelyBalanced => {
            TangentSpec::Balanced { m: random_hyperbolic(rng)?.0, z: disc_point(rng, 0.9), c: nonzero_box(rng, 1.0) }
        }
        TangentKind::Exceptional => {
            let s = rng.random_range(0.2..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            TangentSpec::Exceptional {
                m: MoebiusMap::parabolic(unit_circle(rng), s)?,
                z: disc_point(rng, 0.8),
                c: nonzero_box(rng, 1.0),
            }
        }
        TangentKind::PurelyUnbalanced => return random_unbalanced(rng),
    };
    make_tangent(&spec)
}

fn classifier_round_trip(cfg: &Config) -> Result<Outcome> {
    let mut rng = rng_for(cfg, 13);
    let kinds = [
        TangentKind::Royal,
        TangentKind::Flat,
        TangentKind::PurelyBalanced,
        TangentKind::Exceptional,
        TangentKind::PurelyUnbalanced,
    ];
    let mut wrong = Vec::new();
    for kind in kinds {
        let local = if kind == TangentKind::Exceptional {
            Config { curv_tol: EXCEPTIONAL_CURV_TOL, ..cfg.clone() }
        } else {
            cfg.clone()
        };
        let mut bad = 0;
        for _ in 0..100 {
            let delta = draw(kind, &mut rng)?;
            match classify(&delta, &local) {
                Ok(t) if t.kind == kind => {}
                _ => bad += 1,
            }
        }
        if bad > 0 {
            wrong.push(format!("{kind:?}: {bad}/100"));
        }
    }
    let detail = if wrong.is_empty() {
        "100 draws per kind, all recovered".to_string()
    } else {
        format!("misclassified {}", wrong.join(", "))
    };
    outcome(wrong.is_empty(), detail)
}
