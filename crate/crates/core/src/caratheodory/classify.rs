//! Classification of nondegenerate tangents into the five types.
//!
//! Royal and flat tangents are detected algebraically. All other tangents are
//! classified from the circle profile: two maximizers mean purely balanced,
//! one maximizer with strictly negative curvature means purely unbalanced,
//! one maximizer with vanishing curvature means exceptional.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{car_metric, extremal_omegas, Config, ExtremalSet};
use crate::error::{Error, Result};
use crate::symdisc::GTangent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TangentKind {
    Royal,
    Flat,
    PurelyBalanced,
    Exceptional,
    PurelyUnbalanced,
}

/// Evidence collected while classifying.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub car: f64,
    pub extremal: ExtremalSet,
    /// `|(s1)^2 - 4 s2|`.
    pub royal_point_defect: f64,
    /// `|2 v2 - v1 s1| / |v|`.
    pub royal_direction_defect: f64,
    /// `β = (s1 - conj(s1) s2) / (1 - |s2|^2)`, the flat geodesic through `λ`.
    pub beta: Complex64,
    /// `|v1 - conj(β) v2| / |v|`.
    pub flat_defect: f64,
    /// `f''(t0)` at the top maximizer, when the profile is not constant.
    pub second_derivative: Option<f64>,
    /// `f''(t0) / f(t0)`.
    pub normalized_curvature: Option<f64>,
    /// Relative gap between the top maximum and the best maximum outside its
    /// cluster; small values mean the tangent is close to balanced.
    pub tie_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentType {
    pub kind: TangentKind,
    pub diagnostics: Diagnostics,
}

pub fn classify(delta: &GTangent, cfg: &Config) -> Result<TangentType> {
    delta.require_nondegenerate()?;
    let (s1, s2) = (delta.base.s1, delta.base.s2);
    let [v1, v2] = delta.vec;
    let vnorm = delta.vec_norm();

    let royal_point_defect = delta.base.royal_defect();
    let royal_direction_defect = (2.0 * v2 - v1 * s1).norm() / vnorm;
    let beta = (s1 - s1.conj() * s2) / (1.0 - s2.norm_sqr());
    let flat_defect = (v1 - beta.conj() * v2).norm() / vnorm;

    let car = car_metric(delta, cfg)?;
    let extremal = extremal_omegas(&car.profile, cfg);
    let top = car.profile.maxima.first();
    let second_derivative = top.map(|m| m.second_derivative);
    let normalized_curvature = top.map(|m| m.second_derivative / m.value);
    let tie_margin = top.map(|t| {
        car.profile
            .maxima
            .iter()
            .skip(1)
            .find(|m| crate::numeric::angular_distance(m.t, t.t) > cfg.cluster)
            .map_or(1.0, |m| (t.value - m.value) / t.value)
    });
    let diagnostics = Diagnostics {
        car: car.value,
        extremal: extremal.clone(),
        royal_point_defect,
        royal_direction_defect,
        beta,
        flat_defect,
        second_derivative,
        normalized_curvature,
        tie_margin,
    };

    let kind = if royal_point_defect < cfg.alg_tol && royal_direction_defect < cfg.alg_tol {
        TangentKind::Royal
    } else if flat_defect < cfg.alg_tol {
        TangentKind::Flat
    } else {
        match extremal {
            ExtremalSet::All => {
                return Err(Error::Inconsistent(format!(
                    "constant circle profile but the royal/flat tests fail (royal {royal_point_defect:.2e}/{royal_direction_defect:.2e}, flat {flat_defect:.2e})"
                )))
            }
            ExtremalSet::Finite(ref ws) if ws.len() == 2 => TangentKind::PurelyBalanced,
            ExtremalSet::Finite(ref ws) if ws.len() == 1 => {
                let kappa = normalized_curvature.expect("a maximizer exists");
                if kappa < -cfg.curv_tol {
                    TangentKind::PurelyUnbalanced
                } else if kappa <= cfg.curv_tol {
                    TangentKind::Exceptional
                } else {
                    return Err(Error::Inconsistent(format!("positive curvature {kappa:.3e} at a maximizer")));
                }
            }
            ExtremalSet::Finite(ref ws) => {
                return Err(Error::Inconsistent(format!("{} extremal angles without royal/flat structure", ws.len())))
            }
        }
    };
    Ok(TangentType { kind, diagnostics })
}
