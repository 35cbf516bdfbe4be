//! Function theory of the unit disc: the Poincaré metric on tangents,
//! automorphisms (Möbius maps) and finite Blaschke products.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{quadratic_roots, ONE, ZERO};

/// Default strict-interior margin for points of the disc and of `G`.
pub const DEFAULT_MARGIN: f64 = 1e-12;

/// Tolerance on `|phase| = 1` for automorphisms.
const PHASE_TOL: f64 = 1e-12;

/// Threshold on `||tr| - 2|` for the unit-determinant representative.
///
/// Parabolicity is a measure-zero condition, so a generic map is never
/// classified parabolic; maps built by [`MoebiusMap::parabolic`] land well
/// inside this band.
pub const PARABOLIC_TOL: f64 = 1e-9;

/// A tangent `(z, v)` to the unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscTangent {
    pub base: Complex64,
    pub vec: Complex64,
}

impl DiscTangent {
    pub fn new(base: Complex64, vec: Complex64) -> Result<Self> {
        Self::with_margin(base, vec, DEFAULT_MARGIN)
    }

    pub fn with_margin(base: Complex64, vec: Complex64, margin: f64) -> Result<Self> {
        if !(base.norm() < 1.0 - margin) {
            return Err(Error::Domain(format!("disc tangent base {base} is not inside the unit disc")));
        }
        Ok(Self { base, vec })
    }

    /// Poincaré length `|v| / (1 - |z|^2)`.
    pub fn poincare(&self) -> f64 {
        self.vec.norm() / (1.0 - self.base.norm_sqr())
    }
}

/// Poincaré length of a disc tangent.
pub fn poincare(t: &DiscTangent) -> f64 {
    t.poincare()
}

/// Dynamical type of a disc automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoebiusKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub point: Complex64,
    pub multiplicity: u8,
}

/// Disc automorphism `m(z) = phase * (z - center) / (1 - conj(center) z)`.
///
/// Kind and fixed points are computed once at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MoebiusParams", into = "MoebiusParams")]
pub struct MoebiusMap {
    phase: Complex64,
    center: Complex64,
    kind: MoebiusKind,
    fixed_points: Vec<FixedPoint>,
}

/// Serialized form of a [`MoebiusMap`]: only the defining parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MoebiusParams {
    pub phase: Complex64,
    pub center: Complex64,
}

impl TryFrom<MoebiusParams> for MoebiusMap {
    type Error = Error;
    fn try_from(p: MoebiusParams) -> Result<Self> {
        MoebiusMap::new(p.phase, p.center)
    }
}

impl From<MoebiusMap> for MoebiusParams {
    fn from(m: MoebiusMap) -> Self {
        MoebiusParams { phase: m.phase, center: m.center }
    }
}

impl MoebiusMap {
    pub fn new(phase: Complex64, center: Complex64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > PHASE_TOL {
            return Err(Error::InvalidParameter(format!("automorphism phase {phase} is not unimodular")));
        }
        if !(center.norm() < 1.0) {
            return Err(Error::InvalidParameter(format!("automorphism center {center} is not in the disc")));
        }
        let phase = phase / phase.norm();
        let (kind, fixed_points) = classify_parts(phase, center);
        Ok(Self { phase, center, kind, fixed_points })
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO).expect("identity is valid")
    }

    /// Rotation `z -> phase * z`.
    pub fn rotation(phase: Complex64) -> Result<Self> {
        Self::new(phase, ZERO)
    }

    /// Build from `(a z + b) / (c z + d)`, verifying that the map is a disc automorphism.
    pub fn from_coefficients(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        if a == ZERO || d == ZERO {
            return Err(Error::InvalidParameter("not a disc automorphism (a = 0 or d = 0)".into()));
        }
        let center = -b / a;
        let ratio = c / d;
        let scale = 1.0 + ratio.norm() + center.norm();
        if (ratio + center.conj()).norm() > 1e-10 * scale {
            return Err(Error::InvalidParameter(format!(
                "coefficients do not define a disc automorphism (c/d = {ratio}, center = {center})"
            )));
        }
        let phase = a / d;
        if (phase.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("coefficient phase {phase} is not unimodular")));
        }
        Self::new(phase / phase.norm(), center)
    }

    /// Hyperbolic automorphism with fixed points `w1 != w2` on the circle and
    /// real multiplier `k > 0`, `k != 1`:
    /// `(m(z) - w1) / (m(z) - w2) = k (z - w1) / (z - w2)`.
    pub fn hyperbolic(w1: Complex64, w2: Complex64, k: f64) -> Result<Self> {
        if (w1.norm() - 1.0).abs() > 1e-12 || (w2.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("hyperbolic fixed points must be unimodular".into()));
        }
        if (w1 - w2).norm() < 1e-12 || !(k > 0.0) || (k - 1.0).abs() < 1e-12 {
            return Err(Error::InvalidParameter("need distinct fixed points and a multiplier k > 0, k != 1".into()));
        }
        let kc = Complex64::new(k, 0.0);
        Self::from_coefficients(w1 - kc * w2, (kc - 1.0) * w1 * w2, 1.0 - kc, kc * w1 - w2)
    }

    /// Parabolic automorphism with double fixed point `w` on the circle,
    /// conjugate to the translation `1/(z - w) -> 1/(z - w) + i s conj(w)`, `s != 0` real.
    pub fn parabolic(w: Complex64, s: f64) -> Result<Self> {
        if (w.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("parabolic fixed point must be unimodular".into()));
        }
        if s == 0.0 || !s.is_finite() {
            return Err(Error::InvalidParameter("parabolic shift must be a nonzero real".into()));
        }
        let is = Complex64::new(0.0, s);
        Self::from_coefficients(1.0 + is, -is * w, is * w.conj(), 1.0 - is)
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn kind(&self) -> MoebiusKind {
        self.kind
    }

    pub fn fixed_points(&self) -> &[FixedPoint] {
        &self.fixed_points
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.phase * (z - self.center) / (1.0 - self.center.conj() * z)
    }

    /// `m'(z) = phase (1 - |center|^2) / (1 - conj(center) z)^2`.
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let den = 1.0 - self.center.conj() * z;
        self.phase * (1.0 - self.center.norm_sqr()) / (den * den)
    }

    /// Second derivative, used by chain-rule consumers.
    pub fn deriv2(&self, z: Complex64) -> Complex64 {
        let a_bar = self.center.conj();
        let den = 1.0 - a_bar * z;
        2.0 * a_bar * self.phase * (1.0 - self.center.norm_sqr()) / (den * den * den)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.phase.conj(), -self.phase * self.center).expect("inverse of an automorphism")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MoebiusMap) -> Self {
        let [a1, b1, c1, d1] = self.matrix();
        let [a2, b2, c2, d2] = inner.matrix();
        Self::from_coefficients(a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
            .expect("composition of automorphisms")
    }

    /// Coefficients `[a, b, c, d]` of `(a z + b)/(c z + d)`, unnormalized.
    pub fn matrix(&self) -> [Complex64; 4] {
        [self.phase, -self.phase * self.center, -self.center.conj(), ONE]
    }

    /// `|trace|` of the determinant-one representative in SU(1,1) (up to sign).
    pub fn su11_trace_abs(&self) -> f64 {
        trace_abs(self.phase, self.center)
    }

    pub fn pushforward(&self, t: &DiscTangent) -> DiscTangent {
        DiscTangent { base: self.eval(t.base), vec: self.deriv(t.base) * t.vec }
    }
}

fn trace_abs(phase: Complex64, center: Complex64) -> f64 {
    (1.0 + phase).norm() / (1.0 - center.norm_sqr()).sqrt()
}

fn classify_parts(phase: Complex64, center: Complex64) -> (MoebiusKind, Vec<FixedPoint>) {
    if (phase - 1.0).norm() < PHASE_TOL && center.norm() < PHASE_TOL {
        return (MoebiusKind::Identity, Vec::new());
    }
    let tr = trace_abs(phase, center);
    // Fixed points solve conj(a) z^2 + (p - 1) z - p a = 0.
    let a_bar = center.conj();
    if (tr - 2.0).abs() < PARABOLIC_TOL && center != ZERO {
        let w = -(phase - 1.0) / (2.0 * a_bar);
        let w = w / w.norm();
        return (MoebiusKind::Parabolic, vec![FixedPoint { point: w, multiplicity: 2 }]);
    }
    if tr < 2.0 {
        let point = if center == ZERO {
            ZERO
        } else {
            let (r1, r2) = quadratic_roots(a_bar, phase - 1.0, -phase * center).expect("nondegenerate quadratic");
            if r1.norm() <= r2.norm() {
                r1
            } else {
                r2
            }
        };
        return (MoebiusKind::Elliptic, vec![FixedPoint { point, multiplicity: 1 }]);
    }
    let (r1, r2) = quadratic_roots(a_bar, phase - 1.0, -phase * center).expect("nondegenerate quadratic");
    let points = [r1, r2]
        .into_iter()
        .map(|r| FixedPoint { point: r / r.norm(), multiplicity: 1 })
        .collect();
    (MoebiusKind::Hyperbolic, points)
}

/// Kind and fixed points of `m` (as computed at construction).
pub fn classify_moebius(m: &MoebiusMap) -> (MoebiusKind, Vec<FixedPoint>) {
    (m.kind, m.fixed_points.clone())
}

/// The unique automorphism with `m(w0) = 0` and `m'(w0) d > 0`.
pub fn align_to_origin(w0: Complex64, d: Complex64) -> Result<MoebiusMap> {
    if d == ZERO || !d.is_finite() {
        return Err(Error::DegenerateDirection);
    }
    if !(w0.norm() < 1.0) {
        return Err(Error::Domain(format!("alignment base {w0} is not inside the unit disc")));
    }
    // m'(w0) = phase / (1 - |w0|^2), so phase = conj(d)/|d| makes m'(w0) d positive.
    MoebiusMap::new(d.conj() / d.norm(), w0)
}

/// Finite Blaschke product `phase * prod (z - a_k)/(1 - conj(a_k) z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    phase: Complex64,
    zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn new(phase: Complex64, zeros: Vec<Complex64>) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > PHASE_TOL {
            return Err(Error::InvalidParameter(format!("Blaschke phase {phase} is not unimodular")));
        }
        if let Some(z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
            return Err(Error::InvalidParameter(format!("Blaschke zero {z} is not in the disc")));
        }
        Ok(Self { phase: phase / phase.norm(), zeros })
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.phase, |acc, a| acc * (z - a) / (1.0 - a.conj() * z))
    }
}

pub fn blaschke_eval(b: &BlaschkeProduct, z: Complex64) -> Complex64 {
    b.eval(z)
}

/// A holomorphic self-map of the disc, evaluated pointwise.
pub trait DiscMap: Send + Sync {
    fn eval(&self, w: Complex64) -> Complex64;
}

impl DiscMap for MoebiusMap {
    fn eval(&self, w: Complex64) -> Complex64 {
        MoebiusMap::eval(self, w)
    }
}

impl DiscMap for BlaschkeProduct {
    fn eval(&self, w: Complex64) -> Complex64 {
        BlaschkeProduct::eval(self, w)
    }
}

impl<F> DiscMap for F
where
    F: Fn(Complex64) -> Complex64 + Send + Sync,
{
    fn eval(&self, w: Complex64) -> Complex64 {
        self(w)
    }
}
