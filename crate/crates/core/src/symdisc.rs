//! The symmetrized bidisc `G = {(z + w, z w) : |z|, |w| < 1}`.
//!
//! Membership, the symmetrization map and its derivative, the functions
//! `Φ_ω`, the normal forms of complex geodesics and constructors for the
//! five kinds of tangent.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disc::{MoebiusKind, MoebiusMap, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::numeric::{quadratic_roots, ONE, ZERO};

/// A pair of complex numbers, used for points and directions in `C^2`.
pub type C2 = [Complex64; 2];

/// Tolerance on `|ω| = 1` for the arguments of `Φ_ω`.
pub const OMEGA_TOL: f64 = 1e-10;

/// A point `(s1, s2)` of `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct GPoint {
    pub s1: Complex64,
    pub s2: Complex64,
}

#[derive(Deserialize)]
struct RawPoint {
    s1: Complex64,
    s2: Complex64,
}

impl TryFrom<RawPoint> for GPoint {
    type Error = Error;
    fn try_from(p: RawPoint) -> Result<Self> {
        GPoint::new(p.s1, p.s2)
    }
}

/// Outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub inside: bool,
    /// `min(1 - |root|)` over the two roots of `λ^2 - s1 λ + s2`.
    pub margin: f64,
}

/// Roots of `λ^2 - s1 λ + s2`, ordered lexicographically by (re, im).
pub fn symmetric_roots(s1: Complex64, s2: Complex64) -> (Complex64, Complex64) {
    let (a, b) = quadratic_roots(ONE, -s1, s2).expect("monic quadratic");
    let key = |z: &Complex64| (z.re, z.im);
    if key(&a) <= key(&b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Membership in `G` with the default margin.
pub fn g_contains(s1: Complex64, s2: Complex64) -> Membership {
    g_contains_with_margin(s1, s2, DEFAULT_MARGIN)
}

pub fn g_contains_with_margin(s1: Complex64, s2: Complex64, margin: f64) -> Membership {
    if !(s1.is_finite() && s2.is_finite()) {
        return Membership { inside: false, margin: f64::NEG_INFINITY };
    }
    let (a, b) = symmetric_roots(s1, s2);
    let m = (1.0 - a.norm()).min(1.0 - b.norm());
    Membership { inside: m > margin, margin: m }
}

impl GPoint {
    pub fn new(s1: Complex64, s2: Complex64) -> Result<Self> {
        Self::with_margin(s1, s2, DEFAULT_MARGIN)
    }

    pub fn with_margin(s1: Complex64, s2: Complex64, margin: f64) -> Result<Self> {
        let m = g_contains_with_margin(s1, s2, margin);
        if !m.inside {
            return Err(Error::Domain(format!(
                "({s1}, {s2}) is not in G (boundary margin {:.3e})",
                m.margin
            )));
        }
        Ok(Self { s1, s2 })
    }

    /// Skips the membership test. Callers guarantee `(s1, s2) ∈ G`.
    pub fn new_unchecked(s1: Complex64, s2: Complex64) -> Self {
        Self { s1, s2 }
    }

    pub fn coords(&self) -> C2 {
        [self.s1, self.s2]
    }

    /// The unordered pair `(z, w)` with `π(z, w) = self`, canonically ordered.
    pub fn roots(&self) -> (Complex64, Complex64) {
        symmetric_roots(self.s1, self.s2)
    }

    pub fn margin(&self) -> f64 {
        g_contains(self.s1, self.s2).margin
    }

    /// `|(s1)^2 - 4 s2|`, zero exactly on the royal variety.
    pub fn royal_defect(&self) -> f64 {
        (self.s1 * self.s1 - 4.0 * self.s2).norm()
    }
}

/// A tangent `(λ, v)` to `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GTangent {
    pub base: GPoint,
    pub vec: C2,
}

impl GTangent {
    pub fn new(base: GPoint, vec: C2) -> Self {
        Self { base, vec }
    }

    pub fn is_degenerate(&self) -> bool {
        self.vec[0] == ZERO && self.vec[1] == ZERO
    }

    pub fn vec_norm(&self) -> f64 {
        (self.vec[0].norm_sqr() + self.vec[1].norm_sqr()).sqrt()
    }

    /// The tangent `(λ, t v)`.
    pub fn scaled(&self, t: Complex64) -> Self {
        Self { base: self.base, vec: [t * self.vec[0], t * self.vec[1]] }
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::DegenerateTangent)
        } else {
            Ok(())
        }
    }
}

fn check_disc(z: Complex64, what: &str) -> Result<()> {
    if z.norm() < 1.0 - DEFAULT_MARGIN {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} = {z} is not inside the unit disc")))
    }
}

/// The symmetrization `π(z, w) = (z + w, z w)`.
pub fn symmetrize(z: Complex64, w: Complex64) -> Result<GPoint> {
    check_disc(z, "z")?;
    check_disc(w, "w")?;
    Ok(GPoint::new_unchecked(z + w, z * w))
}

/// `π_*((z, w), u) = (π(z, w), (u1 + u2, w u1 + z u2))`.
pub fn symmetrize_pushforward(z: Complex64, w: Complex64, u: C2) -> Result<GTangent> {
    let base = symmetrize(z, w)?;
    Ok(GTangent::new(base, [u[0] + u[1], w * u[0] + z * u[1]]))
}

fn check_omega(omega: Complex64) -> Result<()> {
    if (omega.norm() - 1.0).abs() > OMEGA_TOL {
        return Err(Error::Domain(format!("ω = {omega} is not on the unit circle")));
    }
    Ok(())
}

/// `Φ_ω(s) = (2 ω s2 - s1) / (2 - ω s1)`.
pub fn phi(omega: Complex64, s: &GPoint) -> Result<Complex64> {
    check_omega(omega)?;
    Ok(phi_raw(omega, s.s1, s.s2))
}

#[inline]
pub(crate) fn phi_raw(omega: Complex64, s1: Complex64, s2: Complex64) -> Complex64 {
    (2.0 * omega * s2 - s1) / (2.0 - omega * s1)
}

/// Partial derivatives `(∂Φ_ω/∂s1, ∂Φ_ω/∂s2)`.
#[inline]
pub(crate) fn phi_partials(omega: Complex64, s1: Complex64, s2: Complex64) -> C2 {
    let den = 2.0 - omega * s1;
    [-2.0 * (1.0 - omega * omega * s2) / (den * den), 2.0 * omega / den]
}

#[inline]
pub(crate) fn phi_directional_raw(omega: Complex64, s1: Complex64, s2: Complex64, v: C2) -> Complex64 {
    let [d1, d2] = phi_partials(omega, s1, s2);
    d1 * v[0] + d2 * v[1]
}

/// Directional derivative `D_v Φ_ω(s)`.
pub fn phi_directional(omega: Complex64, s: &GPoint, v: C2) -> Result<Complex64> {
    check_omega(omega)?;
    Ok(phi_directional_raw(omega, s.s1, s.s2, v))
}

/// `h_m(z) = (z + m(z), z m(z))`.
pub fn h_m(m: &MoebiusMap, z: Complex64) -> Result<GPoint> {
    check_disc(z, "z")?;
    let mz = m.eval(z);
    Ok(GPoint::new_unchecked(z + mz, z * mz))
}

/// `h_m'(z) = (1 + m'(z), m(z) + z m'(z))`.
pub fn h_m_deriv(m: &MoebiusMap, z: Complex64) -> C2 {
    let d = m.deriv(z);
    [1.0 + d, m.eval(z) + z * d]
}

/// Parameters for the tangent constructors, one variant per tangent type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TangentSpec {
    /// `((2z, z^2), 2c(1, z))`.
    Royal { z: Complex64, c: Complex64 },
    /// `((β + conj(β) z, z), c(conj(β), 1))`.
    Flat { beta: Complex64, z: Complex64, c: Complex64 },
    /// `(h_m(z), c h_m'(z))` with `m` hyperbolic.
    Balanced { m: MoebiusMap, z: Complex64, c: Complex64 },
    /// `(h_m(z), c h_m'(z))` with `m` parabolic.
    Exceptional { m: MoebiusMap, z: Complex64, c: Complex64 },
    /// Tangent at `z0` with speed `c0` to the degree-two geodesic with
    /// parameters `c` (unimodular) and `alpha ∈ D \ {0}`.
    Unbalanced { c: Complex64, alpha: Complex64, z0: Complex64, c0: Complex64 },
}

/// Build a tangent of the requested type. No normalization of `c` is applied.
pub fn make_tangent(spec: &TangentSpec) -> Result<GTangent> {
    let nonzero = |c: Complex64| {
        if c == ZERO {
            Err(Error::InvalidParameter("tangent scale c must be nonzero".into()))
        } else {
            Ok(())
        }
    };
    match spec {
        TangentSpec::Royal { z, c } => {
            nonzero(*c)?;
            symmetrize_pushforward(*z, *z, [*c, *c])
        }
        TangentSpec::Flat { beta, z, c } => {
            nonzero(*c)?;
            check_disc(*beta, "β")?;
            check_disc(*z, "z")?;
            let base = GPoint::new(*beta + beta.conj() * z, *z)?;
            Ok(GTangent::new(base, [c * beta.conj(), *c]))
        }
        TangentSpec::Balanced { m, z, c } | TangentSpec::Exceptional { m, z, c } => {
            nonzero(*c)?;
            let want = if matches!(spec, TangentSpec::Balanced { .. }) {
                MoebiusKind::Hyperbolic
            } else {
                MoebiusKind::Parabolic
            };
            if m.kind() != want {
                return Err(Error::InvalidParameter(format!(
                    "automorphism is {:?}, expected {:?}",
                    m.kind(),
                    want
                )));
            }
            let base = h_m(m, *z)?;
            let d = h_m_deriv(m, *z);
            Ok(GTangent::new(base, [c * d[0], c * d[1]]))
        }
        TangentSpec::Unbalanced { c, alpha, z0, c0 } => {
            nonzero(*c0)?;
            GeodesicForm::Unbalanced { c: *c, alpha: *alpha }.tangent(*z0, *c0)
        }
    }
}

/// Normal forms of complex geodesics `k : D -> G`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeodesicForm {
    /// `k(z) = (0, -c^2 z)`, `|c| = 1`.
    Flat { c: Complex64 },
    /// `k(z) = (2cz, c^2 z^2)`, `|c| = 1`.
    Royal { c: Complex64 },
    /// `k(z) = (2c(1-|α|^2) z, c^2 z (z - α^2)) / (1 - conj(α)^2 z)`.
    Unbalanced { c: Complex64, alpha: Complex64 },
    /// `k(z) = (z + m(z), z m(z))`, `m` hyperbolic.
    Balanced { m: MoebiusMap },
    /// `k(z) = (z + m(z), z m(z))`, `m` parabolic.
    Exceptional { m: MoebiusMap },
}

impl GeodesicForm {
    pub fn validate(&self) -> Result<()> {
        let unimodular = |c: &Complex64| {
            if (c.norm() - 1.0).abs() > 1e-12 {
                Err(Error::InvalidParameter(format!("geodesic parameter c = {c} must be unimodular")))
            } else {
                Ok(())
            }
        };
        match self {
            GeodesicForm::Flat { c } | GeodesicForm::Royal { c } => unimodular(c),
            GeodesicForm::Unbalanced { c, alpha } => {
                unimodular(c)?;
                if *alpha == ZERO || alpha.norm() >= 1.0 {
                    return Err(Error::InvalidParameter(format!("α = {alpha} must lie in D \\ {{0}}")));
                }
                Ok(())
            }
            GeodesicForm::Balanced { m } if m.kind() != MoebiusKind::Hyperbolic => {
                Err(Error::InvalidParameter("balanced geodesic needs a hyperbolic automorphism".into()))
            }
            GeodesicForm::Exceptional { m } if m.kind() != MoebiusKind::Parabolic => {
                Err(Error::InvalidParameter("exceptional geodesic needs a parabolic automorphism".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<GPoint> {
        self.validate()?;
        check_disc(z, "z")?;
        let p = match self {
            GeodesicForm::Flat { c } => GPoint::new_unchecked(ZERO, -c * c * z),
            GeodesicForm::Royal { c } => GPoint::new_unchecked(2.0 * c * z, c * c * z * z),
            GeodesicForm::Unbalanced { c, alpha } => {
                let den = 1.0 - alpha.conj() * alpha.conj() * z;
                GPoint::new_unchecked(
                    2.0 * c * (1.0 - alpha.norm_sqr()) * z / den,
                    c * c * z * (z - alpha * alpha) / den,
                )
            }
            GeodesicForm::Balanced { m } | GeodesicForm::Exceptional { m } => h_m(m, z)?,
        };
        Ok(p)
    }

    pub fn deriv(&self, z: Complex64) -> Result<C2> {
        self.validate()?;
        check_disc(z, "z")?;
        let d = match self {
            GeodesicForm::Flat { c } => [ZERO, -c * c],
            GeodesicForm::Royal { c } => [2.0 * c, 2.0 * c * c * z],
            GeodesicForm::Unbalanced { c, alpha } => {
                let ab2 = alpha.conj() * alpha.conj();
                let a2 = alpha * alpha;
                let den = 1.0 - ab2 * z;
                let den2 = den * den;
                [
                    2.0 * c * (1.0 - alpha.norm_sqr()) / den2,
                    c * c * ((2.0 * z - a2) * den + ab2 * z * (z - a2)) / den2,
                ]
            }
            GeodesicForm::Balanced { m } | GeodesicForm::Exceptional { m } => h_m_deriv(m, z),
        };
        Ok(d)
    }

    /// The tangent `(k(z), c0 k'(z))`.
    pub fn tangent(&self, z: Complex64, c0: Complex64) -> Result<GTangent> {
        let d = self.deriv(z)?;
        Ok(GTangent::new(self.eval(z)?, [c0 * d[0], c0 * d[1]]))
    }
}

pub fn geodesic_eval(form: &GeodesicForm, z: Complex64) -> Result<GPoint> {
    form.eval(z)
}

/// The point `(2ζ, ζ^2) = (β + conj(β) η, η)` where the royal variety meets `F_β`.
pub fn royal_flat_intersection(beta: Complex64) -> Result<(Complex64, Complex64)> {
    check_disc(beta, "β")?;
    if beta == ZERO {
        return Ok((ZERO, ZERO));
    }
    // conj(β) ζ^2 - 2 ζ + β = 0; the roots are ζ and 1/conj(ζ).
    let (r1, r2) = quadratic_roots(beta.conj(), Complex64::new(-2.0, 0.0), beta).expect("quadratic");
    let zeta = if r1.norm() < r2.norm() { r1 } else { r2 };
    Ok((zeta, zeta * zeta))
}

/// Jacobian determinant of `(Φ_{ω1}, Φ_{ω2})` at `s`:
/// `4 (ω1 - ω2)(2 - (ω1 + ω2) s1 + 2 ω1 ω2 s2) / ((2 - ω1 s1)^2 (2 - ω2 s1)^2)`.
///
/// The middle factor vanishes exactly on the line checked by
/// [`line_avoidance_check`], which does not meet `G`.
pub fn jacobian_phi_pair(omega1: Complex64, omega2: Complex64, s: &GPoint) -> Result<Complex64> {
    check_omega(omega1)?;
    check_omega(omega2)?;
    if (omega1 - omega2).norm() < OMEGA_TOL {
        return Err(Error::Domain("ω1 and ω2 must be distinct".into()));
    }
    let d1 = 2.0 - omega1 * s.s1;
    let d2 = 2.0 - omega2 * s.s1;
    let line = 2.0 - (omega1 + omega2) * s.s1 + 2.0 * omega1 * omega2 * s.s2;
    Ok(4.0 * (omega1 - omega2) * line / (d1 * d1 * d2 * d2))
}

/// Margin of `s` from the complex line `(ω1 + ω2) s1 - 2 ω1 ω2 s2 = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineAvoidance {
    pub avoids: bool,
    pub margin: f64,
}

pub fn line_avoidance_check(omega1: Complex64, omega2: Complex64, s: &GPoint) -> LineAvoidance {
    let margin = ((omega1 + omega2) * s.s1 - 2.0 * omega1 * omega2 * s.s2 - 2.0).norm();
    LineAvoidance { avoids: margin > 0.0, margin }
}
