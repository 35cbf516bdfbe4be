//! Acceptance suite: thirteen criteria, one PASS/FAIL line each.
//!
//! Oracles here are written independently of the library: the objective is
//! recomputed from `Φ_ω` by hand, pushforwards of family members by central
//! differences of their values, and metrics by a brute-force angle search.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use symcar::caratheodory::{car_metric, classify, extremal_omegas, objective, Config, ExtremalSet, PhiMap, ScalarMap, TangentKind};
use symcar::disc::MoebiusMap;
use symcar::families::{balanced_extremal, bidisc_interpolant, royal_extremal, standard_schur_bidisc, standard_schur_g};
use symcar::realization::{model_residual, random_unitary_colligation, realize, s_t, FiniteModel, ModelOperator};
use symcar::sampling::{automorphism, complex_box, direction, disc_point, g_point, seeded, tangent, unit_circle, SeededRng};
use symcar::symdisc::{jacobian_phi_pair, make_tangent, GPoint, GTangent, TangentSpec};
use symcar::Complex64;

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn cis(t: f64) -> C {
    C::from_polar(1.0, t)
}

fn ang(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

// ---- independent oracles -------------------------------------------------

fn phi(w: C, s1: C, s2: C) -> C {
    (2.0 * w * s2 - s1) / (2.0 - w * s1)
}

/// `|D_v Φ_ω| / (1 - |Φ_ω|²)`, with `D_v Φ_ω` by the quotient rule.
fn oracle_objective(d: &GTangent, w: C) -> f64 {
    let (s1, s2) = (d.base.s1, d.base.s2);
    let [v1, v2] = d.vec;
    let num = 2.0 * w * s2 - s1;
    let den = 2.0 - w * s1;
    let dnum = 2.0 * w * v2 - v1;
    let dden = -w * v1;
    let dphi = (dnum * den - num * dden) / (den * den);
    dphi.norm() / (1.0 - (num / den).norm_sqr())
}

/// `|v1(1-ω²s2) - v2 ω(2-ω s1)| / |(s1 - conj(s1)s2)ω² - 2(1-|s2|²)ω + conj(s1) - conj(s2)s1|`.
fn oracle_closed_form(d: &GTangent, w: C) -> f64 {
    let (s1, s2) = (d.base.s1, d.base.s2);
    let [v1, v2] = d.vec;
    let n = v1 * (1.0 - w * w * s2) - v2 * w * (2.0 - w * s1);
    let q = (s1 - s1.conj() * s2) * w * w - 2.0 * (1.0 - s2.norm_sqr()) * w + s1.conj() - s2.conj() * s1;
    n.norm() / q.norm()
}

/// Dense scan plus ternary refinement around the best sample.
fn brute_car(d: &GTangent, n: usize) -> f64 {
    let f = |t: f64| oracle_objective(d, cis(t));
    let h = TAU / n as f64;
    let (best, _) = (0..n).map(|k| (k, f(k as f64 * h))).fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let (mut lo, mut hi) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    while hi - lo > 1e-13 {
        let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    f(0.5 * (lo + hi))
}

/// `f''(t)/f(t)` by a plain 5-point stencil.
fn oracle_curvature(d: &GTangent, t: f64) -> f64 {
    let f = |t: f64| oracle_objective(d, cis(t));
    let h = 1e-3;
    let f2 = (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h);
    f2 / f(t)
}

/// `(F(λ), D_v F(λ))` with the derivative by central differences.
fn fd_pushforward(f: &dyn ScalarMap, d: &GTangent) -> (C, C) {
    let p = [d.base.s1, d.base.s2];
    let h = 1e-6;
    let at = |sign: f64| f.eval([p[0] + sign * h * d.vec[0], p[1] + sign * h * d.vec[1]]).unwrap();
    (f.eval(p).unwrap(), (at(1.0) - at(-1.0)) / (2.0 * h))
}

fn poincare_length(value: C, deriv: C) -> f64 {
    deriv.norm() / (1.0 - value.norm_sqr())
}

fn nonzero(rng: &mut SeededRng) -> C {
    loop {
        let z = complex_box(rng, 1.0);
        if z.norm() > 1e-2 {
            return z;
        }
    }
}

fn finite(set: ExtremalSet) -> Vec<C> {
    match set {
        ExtremalSet::Finite(v) => v,
        ExtremalSet::All => Vec::new(),
    }
}

/// Largest distance from an expected angle to the nearest found one; infinite on a size mismatch.
fn match_angles(found: &[C], expected: &[C]) -> f64 {
    if found.len() != expected.len() {
        return f64::INFINITY;
    }
    expected
        .iter()
        .map(|e| found.iter().map(|f| ang(f.arg(), e.arg())).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn hyperbolic(rng: &mut SeededRng) -> (MoebiusMap, C, C) {
    let a = rng.random_range(0.0..TAU);
    let (w1, w2) = (cis(a), cis(a + rng.random_range(0.5..TAU - 0.5)));
    (MoebiusMap::hyperbolic(w1, w2, rng.random_range(0.1..0.9)).unwrap(), w1, w2)
}

fn parabolic(rng: &mut SeededRng) -> (MoebiusMap, C) {
    let w = unit_circle(rng);
    let s = rng.random_range(0.2..2.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
    (MoebiusMap::parabolic(w, s).unwrap(), w)
}

fn unbalanced(rng: &mut SeededRng) -> GTangent {
    let alpha = C::from_polar(rng.random_range(0.1..0.95), rng.random_range(0.0..TAU));
    make_tangent(&TangentSpec::Unbalanced { c: unit_circle(rng), alpha, z0: c(0.0, 0.0), c0: nonzero(rng) }).unwrap()
}

// ---- criteria --------------------------------------------------------------

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn royal_metric(cfg: &Config) -> Verdict {
    let mut rng = seeded(101);
    let (mut err, mut spread) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (z, cc) = (disc_point(&mut rng, 0.95), nonzero(&mut rng));
        let d = make_tangent(&TangentSpec::Royal { z, c: cc }).unwrap();
        let expected = cc.norm() / (1.0 - z.norm_sqr());
        err = err.max((car_metric(&d, cfg).unwrap().value - expected).abs() / expected);
        let vals: Vec<f64> = (0..1024).map(|k| oracle_objective(&d, cis(TAU * k as f64 / 1024.0))).collect();
        let (hi, lo) = vals.iter().fold((f64::MIN, f64::MAX), |(a, b), &v| (a.max(v), b.min(v)));
        spread = spread.max((hi - lo) / hi);
    }
    verdict(err < 1e-9 && spread < 1e-9, format!("max rel err {err:.2e}, profile spread {spread:.2e}"))
}

fn flat_metric(cfg: &Config) -> Verdict {
    let mut rng = seeded(102);
    let (mut err, mut spread) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let (beta, z, cc) = (disc_point(&mut rng, 0.95), disc_point(&mut rng, 0.95), nonzero(&mut rng));
        let d = make_tangent(&TangentSpec::Flat { beta, z, c: cc }).unwrap();
        let expected = cc.norm() / (1.0 - z.norm_sqr());
        err = err.max((car_metric(&d, cfg).unwrap().value - expected).abs() / expected);
        let vals: Vec<f64> = (0..1024).map(|k| oracle_objective(&d, cis(TAU * k as f64 / 1024.0))).collect();
        let (hi, lo) = vals.iter().fold((f64::MIN, f64::MAX), |(a, b), &v| (a.max(v), b.min(v)));
        spread = spread.max((hi - lo) / hi);
    }
    verdict(err < 1e-9 && spread < 1e-9, format!("max rel err {err:.2e}, profile spread {spread:.2e}"))
}

fn balanced_fingerprint(cfg: &Config) -> Verdict {
    let mut rng = seeded(103);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let (m, w1, w2) = hyperbolic(&mut rng);
        let d = make_tangent(&TangentSpec::Balanced { m, z: disc_point(&mut rng, 0.9), c: nonzero(&mut rng) }).unwrap();
        let found = finite(extremal_omegas(&car_metric(&d, cfg).unwrap().profile, cfg));
        worst = worst.max(match_angles(&found, &[w1.conj(), w2.conj()]));
    }
    let worked = GTangent::new(GPoint::new(c(0.5, 0.0), c(0.0, 0.0)).unwrap(), [c(1.75, 0.0), c(0.5, 0.0)]);
    let car = car_metric(&worked, cfg).unwrap();
    let car_err = (car.value - 1.0).abs().max((brute_car(&worked, 1 << 16) - 1.0).abs());
    let set_err = match_angles(&finite(extremal_omegas(&car.profile, cfg)), &[c(1.0, 0.0), c(-1.0, 0.0)]);
    verdict(
        worst < 1e-5 && car_err < 1e-9 && set_err < 1e-9,
        format!("50 draws, max angular err {worst:.2e}; worked car err {car_err:.2e}, ω err {set_err:.2e}"),
    )
}

fn exceptional_fingerprint(cfg: &Config) -> Verdict {
    let mut rng = seeded(104);
    let (mut worst_angle, mut worst_kappa) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let (m, w) = parabolic(&mut rng);
        let d = make_tangent(&TangentSpec::Exceptional { m, z: disc_point(&mut rng, 0.8), c: nonzero(&mut rng) }).unwrap();
        let found = finite(classify(&d, cfg).unwrap().diagnostics.extremal);
        if found.len() != 1 {
            return verdict(false, format!("{} maximizers for a parabolic draw", found.len()));
        }
        worst_angle = worst_angle.max(ang(found[0].arg(), w.conj().arg()));
        worst_kappa = worst_kappa.max(oracle_curvature(&d, found[0].arg()).abs());
    }
    verdict(
        worst_angle < 1e-4 && worst_kappa < 1e-3,
        format!("20 draws, max angular err {worst_angle:.2e}, max |f''/f| {worst_kappa:.2e}"),
    )
}

fn unbalanced_fingerprint(cfg: &Config) -> Verdict {
    let mut rng = seeded(105);
    let mut worst = f64::MIN;
    for _ in 0..50 {
        let d = unbalanced(&mut rng);
        let found = finite(extremal_omegas(&car_metric(&d, cfg).unwrap().profile, cfg));
        if found.len() != 1 {
            return verdict(false, format!("{} maximizers for an unbalanced draw", found.len()));
        }
        worst = worst.max(oracle_curvature(&d, found[0].arg()));
    }
    verdict(worst < -1e-3, format!("50 draws, max f''/f {worst:.3e}"))
}

fn oracle_agreement(_cfg: &Config) -> Verdict {
    let mut rng = seeded(106);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let d = tangent(&mut rng, 0.98);
        let w = unit_circle(&mut rng);
        let (a, b) = (objective(&d, w).unwrap(), oracle_closed_form(&d, w));
        worst = worst.max((a - b).abs() / a.max(b));
    }
    verdict(worst < 1e-9, format!("10^4 draws, max rel diff {worst:.2e}"))
}

fn injectivity_jacobian(_cfg: &Config) -> Verdict {
    let mut rng = seeded(107);
    let (mut collisions, mut worst_fd, mut min_det) = (0, 0.0f64, f64::INFINITY);
    for _ in 0..10_000 {
        let a = rng.random_range(0.0..TAU);
        let (w1, w2) = (cis(a), cis(a + rng.random_range(0.05..TAU - 0.05)));
        let (s, t) = (g_point(&mut rng, 0.95), g_point(&mut rng, 0.95));
        let (is, it) = ([phi(w1, s.s1, s.s2), phi(w2, s.s1, s.s2)], [phi(w1, t.s1, t.s2), phi(w2, t.s1, t.s2)]);
        if (is[0] - it[0]).norm() + (is[1] - it[1]).norm() < 1e-14 * ((s.s1 - t.s1).norm() + (s.s2 - t.s2).norm()) {
            collisions += 1;
        }
        let h = 1e-6;
        let d = |w: C, e: usize| {
            let (mut p, mut m) = ([s.s1, s.s2], [s.s1, s.s2]);
            p[e] += h;
            m[e] -= h;
            (phi(w, p[0], p[1]) - phi(w, m[0], m[1])) / (2.0 * h)
        };
        let fd = d(w1, 0) * d(w2, 1) - d(w1, 1) * d(w2, 0);
        let j = jacobian_phi_pair(w1, w2, &s).unwrap();
        worst_fd = worst_fd.max((j - fd).norm() / fd.norm());
        min_det = min_det.min(j.norm());
    }
    verdict(
        collisions == 0 && worst_fd < 1e-6 && min_det > 0.0,
        format!("10^4 pairs, {collisions} collisions, jacobian rel err {worst_fd:.2e}, min |J| {min_det:.2e}"),
    )
}

fn royal_family(_cfg: &Config) -> Verdict {
    let mut rng = seeded(108);
    let catalog = standard_schur_g();
    let mut worst = 0.0f64;
    for k in 0..50 {
        let (z, cc) = (disc_point(&mut rng, 0.9), nonzero(&mut rng));
        let f = royal_extremal(automorphism(&mut rng, 0.9), catalog[k % catalog.len()].clone());
        let d = make_tangent(&TangentSpec::Royal { z, c: cc }).unwrap();
        let (value, deriv) = fd_pushforward(&f, &d);
        let car = cc.norm() / (1.0 - z.norm_sqr());
        worst = worst.max((car - poincare_length(value, deriv)).abs() / car.max(1.0));
    }
    verdict(worst < 1e-8, format!("50 members, max |gap| {worst:.2e}"))
}

fn balanced_family(cfg: &Config) -> Verdict {
    let mut rng = seeded(109);
    let catalog = standard_schur_bidisc();
    let mut worst = 0.0f64;
    for k in 0..50 {
        let (m, _, _) = hyperbolic(&mut rng);
        let d = make_tangent(&TangentSpec::Balanced { m, z: disc_point(&mut rng, 0.9), c: nonzero(&mut rng) }).unwrap();
        let t = rng.random_range(0.0..=1.0);
        let f = match balanced_extremal(&d, t, catalog[k % catalog.len()].clone(), cfg) {
            Ok(f) => f,
            Err(e) => return verdict(false, format!("construction failed: {e}")),
        };
        let (value, deriv) = fd_pushforward(&f, &d);
        let car = brute_car(&d, 1 << 14);
        worst = worst.max(value.norm()).max((deriv - car).norm() / car.max(1.0));
    }
    verdict(worst < 1e-8, format!("50 members, max alignment err {worst:.2e}"))
}

fn bidisc_interpolation(_cfg: &Config) -> Verdict {
    let disc: Vec<C> = (0..8)
        .flat_map(|i| (0..8).map(move |j| C::from_polar(0.99 * (i + 1) as f64 / 8.0, TAU * (j as f64 + 0.25 * i as f64) / 8.0)))
        .collect();
    let half = c(0.5, 0.0);
    let (mut cond, mut sup) = (0.0f64, 0.0f64);
    for theta in standard_schur_bidisc() {
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let f = bidisc_interpolant(t, theta.clone()).unwrap();
            cond = cond.max(f.eval([c(0.0, 0.0), c(0.0, 0.0)]).unwrap().norm());
            cond = cond.max((f.eval([half, half]).unwrap() - half).norm());
            for &a in &disc {
                for &b in &disc {
                    sup = sup.max(f.eval([a, b]).unwrap().norm());
                }
            }
        }
    }
    verdict(cond < 1e-12 && sup <= 1.0 + 1e-10, format!("conditions err {cond:.2e}, sup |f| {sup:.12}"))
}

fn realization_bound(_cfg: &Config) -> Verdict {
    let mut rng = seeded(111);
    let sizes = [1, 2, 3, 5];
    let mut sup = 0.0f64;
    for k in 0..100u64 {
        let n = sizes[k as usize % 4];
        let phi_r = realize(random_unitary_colligation(n, 1000 + k).unwrap(), ModelOperator::random_diagonal(n, 2000 + k).unwrap()).unwrap();
        for _ in 0..1000 {
            sup = sup.max(phi_r.eval(g_point(&mut rng, 0.999).coords()).unwrap().norm());
        }
    }
    let pairs: Vec<(GPoint, GPoint)> = (0..1000).map(|_| (g_point(&mut rng, 0.99), g_point(&mut rng, 0.99))).collect();
    let w = unit_circle(&mut rng);
    let r1 = model_residual(&PhiMap { omega: w }, &FiniteModel::scalar(w).unwrap(), &pairs).unwrap();
    let half = symcar::caratheodory::FnMap(|p: [C; 2]| 0.5 * p[0]);
    let r2 = model_residual(&half, &FiniteModel::scalar(c(0.0, 0.0)).unwrap(), &pairs).unwrap();
    // s_T of the two scalar models against the hand-written substitutions
    let (wm, zm) = (FiniteModel::scalar(w).unwrap(), FiniteModel::scalar(c(0.0, 0.0)).unwrap());
    let mut direct = 0.0f64;
    for (s, _) in &pairs {
        direct = direct.max((s_t(&wm, s).unwrap()[(0, 0)] - phi(w, s.s1, s.s2)).norm());
        direct = direct.max((s_t(&zm, s).unwrap()[(0, 0)] + 0.5 * s.s1).norm());
    }
    verdict(
        sup <= 1.0 + 1e-10 && r1 < 1e-12 && r2 < 1e-12 && direct < 1e-12,
        format!("sup |φ| {sup:.12} over 10^5 points; model residuals {r1:.2e}, {r2:.2e}; s_T err {direct:.2e}"),
    )
}

fn generic_uniqueness(cfg: &Config) -> Verdict {
    let mut rng = seeded(112);
    let mut worst = 1.0f64;
    for _ in 0..10 {
        let base = g_point(&mut rng, 0.9);
        let unique = (0..1000)
            .filter(|_| {
                let d = GTangent::new(base, direction(&mut rng));
                extremal_omegas(&car_metric(&d, cfg).unwrap().profile, cfg).count() == Some(1)
            })
            .count();
        worst = worst.min(unique as f64 / 1000.0);
    }
    verdict(worst >= 0.95, format!("min unique share {:.1}%", 100.0 * worst))
}

fn round_trip(cfg: &Config) -> Verdict {
    let mut rng = seeded(113);
    let mut misses = Vec::new();
    for kind in [TangentKind::Royal, TangentKind::Flat, TangentKind::PurelyBalanced, TangentKind::Exceptional, TangentKind::PurelyUnbalanced] {
        let local = if kind == TangentKind::Exceptional { Config { curv_tol: 1e-3, ..cfg.clone() } } else { cfg.clone() };
        let mut bad = 0;
        for _ in 0..100 {
            let d = match kind {
                TangentKind::Royal => make_tangent(&TangentSpec::Royal { z: disc_point(&mut rng, 0.95), c: nonzero(&mut rng) }),
                TangentKind::Flat => make_tangent(&TangentSpec::Flat {
                    beta: disc_point(&mut rng, 0.95),
                    z: disc_point(&mut rng, 0.95),
                    c: nonzero(&mut rng),
                }),
                TangentKind::PurelyBalanced => {
                    let m = hyperbolic(&mut rng).0;
                    make_tangent(&TangentSpec::Balanced { m, z: disc_point(&mut rng, 0.9), c: nonzero(&mut rng) })
                }
                TangentKind::Exceptional => {
                    let m = parabolic(&mut rng).0;
                    make_tangent(&TangentSpec::Exceptional { m, z: disc_point(&mut rng, 0.8), c: nonzero(&mut rng) })
                }
                TangentKind::PurelyUnbalanced => Ok(unbalanced(&mut rng)),
            }
            .unwrap();
            if classify(&d, &local).map(|t| t.kind).ok() != Some(kind) {
                bad += 1;
            }
        }
        if bad > 0 {
            misses.push(format!("{kind:?} {bad}/100"));
        }
    }
    verdict(misses.is_empty(), if misses.is_empty() { "500 draws recovered".into() } else { misses.join(", ") })
}

fn main() -> ExitCode {
    let cfg = Config::default();
    let criteria: [(&str, fn(&Config) -> Verdict); 13] = [
        ("royal metric", royal_metric),
        ("flat metric", flat_metric),
        ("balanced fingerprint", balanced_fingerprint),
        ("exceptional fingerprint", exceptional_fingerprint),
        ("purely unbalanced fingerprint", unbalanced_fingerprint),
        ("oracle agreement", oracle_agreement),
        ("injectivity and jacobian", injectivity_jacobian),
        ("royal family extremality", royal_family),
        ("balanced family well-alignment", balanced_family),
        ("bidisc interpolation", bidisc_interpolation),
        ("realization schur bound", realization_bound),
        ("generic uniqueness", generic_uniqueness),
        ("classifier round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check(&cfg);
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {} [{:.2}s]", i + 1, v.detail, start.elapsed().as_secs_f64());
        if !v.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
