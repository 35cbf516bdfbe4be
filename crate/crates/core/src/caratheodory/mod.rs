//! The Carathéodory metric on `G`.
//!
//! For a nondegenerate tangent `δ = (λ, v)` the metric is the maximum over
//! `ω` on the unit circle of the Poincaré length of `(Φ_ω)_*(δ)`. This module
//! computes that maximum, the set of maximizing `ω`, the five-way tangent
//! classification, and pushforward utilities for arbitrary [`ScalarMap`]s.

mod classify;
mod map;
mod profile;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{align_to_origin, DiscTangent};
use crate::error::{Error, Result};
use crate::symdisc::{phi_directional_raw, phi_raw, GTangent};

pub use classify::{classify, Diagnostics, TangentKind, TangentType};
pub use map::{central_difference, ConstantMap, FnMap, MapRef, MoebiusComposed, PhiMap, ScalarMap, FD_STEP};
pub use profile::{
    circle_profile, extremal_omegas, CircleProfile, ExtremalSet, ProfileSample, RefinedMax, CURVATURE_STEP,
    REFINE_WIDTH,
};

/// Numerical settings for the metric engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Number of equally spaced angles sampled before refinement.
    pub grid_size: usize,
    /// Relative spread below which the circle profile counts as constant.
    pub tol: f64,
    /// Relative value tolerance for two maxima to count as tied.
    pub rel_tie: f64,
    /// Angular radius for merging maximizers.
    pub cluster: f64,
    /// Threshold on the normalized curvature `f''/f` at a unique maximizer.
    pub curv_tol: f64,
    /// Maximum metric gap for a map to count as extremal.
    pub ext_tol: f64,
    /// Tolerance of the algebraic royal and flat pre-tests.
    pub alg_tol: f64,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            grid_size: 4096,
            tol: 1e-10,
            rel_tie: 1e-8,
            cluster: 1e-6,
            curv_tol: 1e-4,
            ext_tol: 1e-8,
            alg_tol: 1e-10,
            seed: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 64 {
            return Err(Error::InvalidParameter(format!("grid_size {} is below 64", self.grid_size)));
        }
        let tols = [
            ("tol", self.tol),
            ("rel_tie", self.rel_tie),
            ("cluster", self.cluster),
            ("curv_tol", self.curv_tol),
            ("ext_tol", self.ext_tol),
            ("alg_tol", self.alg_tol),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn objective_raw(delta: &GTangent, omega: Complex64) -> f64 {
    let (s1, s2) = (delta.base.s1, delta.base.s2);
    let value = phi_raw(omega, s1, s2);
    let d = phi_directional_raw(omega, s1, s2, delta.vec);
    d.norm() / (1.0 - value.norm_sqr())
}

/// `|D_v Φ_ω(λ)| / (1 - |Φ_ω(λ)|^2)`, the Poincaré length of `(Φ_ω)_*(δ)`.
pub fn objective(delta: &GTangent, omega: Complex64) -> Result<f64> {
    delta.require_nondegenerate()?;
    let value = crate::symdisc::phi(omega, &delta.base)?;
    let d = phi_directional_raw(omega, delta.base.s1, delta.base.s2, delta.vec);
    Ok(d.norm() / (1.0 - value.norm_sqr()))
}

/// The same quantity via the fractional-quadratic closed form
/// `|v1(1 - ω² s2) - v2 ω(2 - ω s1)| / |(s1 - conj(s1) s2) ω² - 2(1 - |s2|²) ω + conj(s1) - conj(s2) s1|`.
///
/// Independent of [`objective`]; used to cross-check it.
pub fn objective_closed_form(delta: &GTangent, omega: Complex64) -> f64 {
    let (s1, s2) = (delta.base.s1, delta.base.s2);
    let [v1, v2] = delta.vec;
    let w = omega;
    let num = v1 * (1.0 - w * w * s2) - v2 * w * (2.0 - w * s1);
    let den = (s1 - s1.conj() * s2) * w * w - 2.0 * (1.0 - s2.norm_sqr()) * w + s1.conj() - s2.conj() * s1;
    num.norm() / den.norm()
}

/// Result of [`car_metric`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarResult {
    pub value: f64,
    pub profile: CircleProfile,
}

/// The Carathéodory metric of `δ` with its circle profile.
pub fn car_metric(delta: &GTangent, cfg: &Config) -> Result<CarResult> {
    let profile = circle_profile(delta, cfg)?;
    Ok(CarResult { value: profile.max_value(), profile })
}

/// `F_*(δ) = (F(λ), D_v F(λ))`.
pub fn pushforward(f: &dyn ScalarMap, delta: &GTangent) -> Result<DiscTangent> {
    let p = delta.base.coords();
    let value = f.eval(p)?;
    if !(value.norm() < 1.0) {
        return Err(Error::Domain(format!("F(λ) = {value} is not inside the unit disc")));
    }
    Ok(DiscTangent { base: value, vec: f.directional(p, delta.vec)? })
}

/// `m ∘ F` with `m` the automorphism making `(m ∘ F)_*(δ) = (0, |F_*(δ)|)`.
pub fn well_align(f: MapRef, delta: &GTangent) -> Result<MoebiusComposed> {
    let pushed = pushforward(f.as_ref(), delta)?;
    let m = align_to_origin(pushed.base, pushed.vec)?;
    Ok(MoebiusComposed { outer: m, inner: f })
}

/// Convenience for [`well_align`] with a concrete map.
pub fn well_align_map<F: ScalarMap + 'static>(f: F, delta: &GTangent) -> Result<MoebiusComposed> {
    well_align(Arc::new(f), delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub is_extremal: bool,
    /// `car(δ) - |F_*(δ)|`.
    pub gap: f64,
    pub car: f64,
    pub pushforward_length: f64,
}

/// Compare `|F_*(δ)|` with `car(δ)`.
pub fn extremality_check(f: &dyn ScalarMap, delta: &GTangent, cfg: &Config) -> Result<ExtremalityReport> {
    let car = car_metric(delta, cfg)?.value;
    let p = delta.base.coords();
    let value = f.eval(p)?;
    let deriv = f.directional(p, delta.vec)?;
    let length = if value.norm() < 1.0 {
        deriv.norm() / (1.0 - value.norm_sqr())
    } else if deriv == Complex64::new(0.0, 0.0) {
        // Unimodular constant.
        0.0
    } else {
        return Err(Error::Domain(format!("F(λ) = {value} is not inside the unit disc")));
    };
    let gap = car - length;
    Ok(ExtremalityReport { is_extremal: gap <= cfg.ext_tol, gap, car, pushforward_length: length })
}
