//! The circle objective `t -> |(Φ_{e^{it}})_*(δ)|` and its global maximization.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{objective_raw, Config};
use crate::error::Result;
use crate::numeric::{angular_distance, bisect_decreasing, golden_section_max, second_derivative, unit, wrap_angle};
use crate::symdisc::GTangent;

/// Angular width at which golden-section refinement stops.
pub const REFINE_WIDTH: f64 = 1e-12;

/// Step of the 5-point stencil used for the curvature at a maximizer.
pub const CURVATURE_STEP: f64 = 1e-3;

/// Maxima with `|f''/f|` below this are re-centered by [`level_set_center`].
pub const FLAT_CURVATURE: f64 = 1e-2;

/// Distance from `t0` where `f` first drops below `target`, searching outward
/// in direction `dir`.
fn crossing(f: &impl Fn(f64) -> f64, t0: f64, target: f64, dir: f64) -> Option<f64> {
    let mut prev = 0.0;
    let mut step = 1e-4;
    while step <= 0.5 {
        if f(t0 + dir * step) < target {
            return Some(bisect_decreasing(|y| f(t0 + dir * y) - target, prev, step, 1e-15));
        }
        prev = step;
        step *= 2.0;
    }
    None
}

/// Argmax of a flat maximum as the midpoint of two level sets, extrapolated in
/// the squared half-width. Locating the zero of `f'` directly only reaches
/// about `eps^(1/3)` when `f'' = 0`.
fn level_set_center(f: impl Fn(f64) -> f64, t0: f64, f0: f64) -> Option<f64> {
    let mut mids = [(0.0, 0.0); 2];
    for (k, rel) in [1e-8, 1.6e-7].into_iter().enumerate() {
        let target = f0 * (1.0 - rel);
        let r = crossing(&f, t0, target, 1.0)?;
        let l = crossing(&f, t0, target, -1.0)?;
        mids[k] = (t0 + 0.5 * (r - l), 0.5 * (r + l));
    }
    let [(m1, w1), (m2, w2)] = mids;
    let (a, b) = (w1 * w1, w2 * w2);
    if !(b > a) {
        return None;
    }
    let t = (m1 * b - m2 * a) / (b - a);
    ((t - t0).abs() < 1e-3).then_some(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub omega: Complex64,
    pub objective: f64,
}

/// A refined local maximum of the circle objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedMax {
    pub t: f64,
    pub omega: Complex64,
    pub value: f64,
    /// `d²/dt²` of the objective at `t`.
    pub second_derivative: f64,
}

/// Samples of the circle objective plus its refined local maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleProfile {
    pub grid: Vec<ProfileSample>,
    /// Sorted by value, descending. Empty when the profile is constant.
    pub maxima: Vec<RefinedMax>,
    /// The objective is constant over the grid within `tol` (relative).
    pub constant: bool,
}

impl CircleProfile {
    pub fn max_value(&self) -> f64 {
        let grid_max = self.grid.iter().map(|s| s.objective).fold(0.0, f64::max);
        self.maxima.iter().map(|m| m.value).fold(grid_max, f64::max)
    }

    /// `(max - min) / max` over the grid.
    pub fn relative_spread(&self) -> f64 {
        let max = self.grid.iter().map(|s| s.objective).fold(f64::NEG_INFINITY, f64::max);
        let min = self.grid.iter().map(|s| s.objective).fold(f64::INFINITY, f64::min);
        (max - min) / max
    }

    /// CSV rendering: a versioned `#` header line, the column line, one row per
    /// grid sample. Refined maxima follow as `# max,...` comment lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# symcar circle-profile v1\n");
        out.push_str("t,omega_re,omega_im,objective\n");
        for s in &self.grid {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", s.t, s.omega.re, s.omega.im, s.objective);
        }
        for m in &self.maxima {
            let _ = writeln!(
                out,
                "# max,{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                m.t, m.omega.re, m.omega.im, m.value, m.second_derivative
            );
        }
        out
    }
}

/// Analytic `d/dt` of the objective, from the fractional-quadratic form
/// `|N(ω)| / |D(ω)|` with `ω = e^{it}`.
pub(crate) fn objective_dt(delta: &GTangent, t: f64) -> f64 {
    let (s1, s2) = (delta.base.s1, delta.base.s2);
    let [v1, v2] = delta.vec;
    let w = unit(t);
    let n = v1 * (1.0 - w * w * s2) - v2 * w * (2.0 - w * s1);
    let dn = -2.0 * w * s2 * v1 - 2.0 * v2 + 2.0 * w * s1 * v2;
    let a = s1 - s1.conj() * s2;
    let b = 2.0 * (1.0 - s2.norm_sqr());
    let d = a * w * w - b * w + s1.conj() - s2.conj() * s1;
    let dd = 2.0 * a * w - b;
    let iw = Complex64::new(0.0, 1.0) * w;
    let (nn, dn_abs) = (n.norm(), d.norm());
    if nn == 0.0 {
        return 0.0;
    }
    let dn_dt = (n.conj() * dn * iw).re / nn;
    let dd_dt = (d.conj() * dd * iw).re / dn_abs;
    (dn_dt * dn_abs - nn * dd_dt) / (dn_abs * dn_abs)
}

/// Evaluate the objective on the grid and refine every local maximum.
pub fn circle_profile(delta: &GTangent, cfg: &Config) -> Result<CircleProfile> {
    delta.require_nondegenerate()?;
    cfg.validate()?;
    let n = cfg.grid_size;
    let f = |t: f64| objective_raw(delta, unit(t));
    let grid: Vec<ProfileSample> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            ProfileSample { t, omega: unit(t), objective: f(t) }
        })
        .collect();
    let max = grid.iter().map(|s| s.objective).fold(f64::NEG_INFINITY, f64::max);
    let min = grid.iter().map(|s| s.objective).fold(f64::INFINITY, f64::min);
    if max - min <= cfg.tol * max {
        return Ok(CircleProfile { grid, maxima: Vec::new(), constant: true });
    }

    let h = TAU / n as f64;
    let mut maxima = Vec::new();
    for k in 0..n {
        let prev = grid[(k + n - 1) % n].objective;
        let next = grid[(k + 1) % n].objective;
        let here = grid[k].objective;
        if !(here > prev && here >= next) {
            continue;
        }
        let (lo, hi) = (grid[k].t - h, grid[k].t + h);
        let (tg, vg) = golden_section_max(f, lo, hi, REFINE_WIDTH);
        // Polish on the sign change of the derivative: golden section only
        // resolves the argmax to about sqrt(eps), worse at flat maxima.
        let g = |t: f64| objective_dt(delta, t);
        let t = if g(lo) > 0.0 && g(hi) < 0.0 {
            let tb = bisect_decreasing(g, lo, hi, 1e-15);
            if f(tb) >= vg * (1.0 - 1e-14) {
                tb
            } else {
                tg
            }
        } else {
            tg
        };
        let mut value = f(t);
        let mut curvature = second_derivative(f, t, CURVATURE_STEP);
        let mut t = t;
        if (curvature / value).abs() < FLAT_CURVATURE {
            if let Some(tc) = level_set_center(f, t, value) {
                t = tc;
                value = f(tc);
                curvature = second_derivative(f, t, CURVATURE_STEP);
            }
        }
        let t = wrap_angle(t);
        maxima.push(RefinedMax { t, omega: unit(t), value, second_derivative: curvature });
    }
    maxima.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.t.total_cmp(&b.t)));
    Ok(CircleProfile { grid, maxima, constant: false })
}

/// The set of `ω` at which `Φ_ω` attains the metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "omegas", rename_all = "snake_case")]
pub enum ExtremalSet {
    /// The objective is constant on the circle: every `ω` is extremal.
    All,
    Finite(Vec<Complex64>),
}

impl ExtremalSet {
    pub fn count(&self) -> Option<usize> {
        match self {
            ExtremalSet::All => None,
            ExtremalSet::Finite(v) => Some(v.len()),
        }
    }
}

/// Refined maximizers within `rel_tie` of the maximum, merged when closer than `cluster`.
pub fn extremal_omegas(profile: &CircleProfile, cfg: &Config) -> ExtremalSet {
    if profile.constant {
        return ExtremalSet::All;
    }
    let top = profile.max_value();
    let mut kept: Vec<&RefinedMax> = Vec::new();
    for m in profile.maxima.iter().filter(|m| m.value >= top * (1.0 - cfg.rel_tie)) {
        if kept.iter().all(|k| angular_distance(k.t, m.t) > cfg.cluster) {
            kept.push(m);
        }
    }
    ExtremalSet::Finite(kept.into_iter().map(|m| m.omega).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symdisc::GPoint;

    #[test]
    fn analytic_dt_matches_differences() {
        let base = GPoint::new(Complex64::new(0.3, -0.2), Complex64::new(0.1, 0.25)).unwrap();
        let delta = GTangent::new(base, [Complex64::new(0.7, 0.1), Complex64::new(-0.3, 0.9)]);
        for k in 0..32 {
            let t = k as f64 * 0.2;
            let h = 1e-6;
            let fd = (objective_raw(&delta, unit(t + h)) - objective_raw(&delta, unit(t - h))) / (2.0 * h);
            assert!((fd - objective_dt(&delta, t)).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn csv_layout() {
        let base = GPoint::new(Complex64::new(0.3, 0.0), Complex64::new(0.1, 0.0)).unwrap();
        let delta = GTangent::new(base, [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
        let cfg = Config { grid_size: 64, ..Config::default() };
        let p = circle_profile(&delta, &cfg).unwrap();
        let csv = p.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "t,omega_re,omega_im,objective");
        let data = lines.iter().filter(|l| !l.starts_with('#')).count() - 1;
        assert_eq!(data, 64);
    }
}
