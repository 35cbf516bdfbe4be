//! Explicit families of Carathéodory extremal functions.
//!
//! All members are plain data plus a [`ScalarMap`] implementation: composition
//! happens at evaluation time, with closed-form chain rules where the inputs
//! provide them.

mod catalog;

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use catalog::{standard_schur_bidisc, standard_schur_g, SchurBidisc, SchurG};

use crate::caratheodory::{
    car_metric, classify, extremal_omegas, pushforward, Config, ExtremalSet, ScalarMap, TangentKind,
};
use crate::disc::{align_to_origin, DiscMap, MoebiusMap};
use crate::error::{Error, Result};
use crate::numeric::wrap_angle;
use crate::symdisc::{phi_directional_raw, phi_raw, royal_flat_intersection, symmetric_roots, GPoint, GTangent, C2};

/// Denominators below this magnitude are reported as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Tolerance of the well-alignment post-check in [`balanced_extremal`].
pub const ALIGNMENT_TOL: f64 = 1e-8;

/// Tolerance of the sampled symmetry check in [`symmetric_reduce`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Tolerance of the compatibility check `h(ζ) = m(η)` in [`flat_restriction`].
pub const COMPAT_TOL: f64 = 1e-10;

fn guard(den: Complex64, what: &'static str) -> Result<()> {
    if den.norm() < SINGULAR_TOL {
        Err(Error::Singular { what, magnitude: den.norm() })
    } else {
        Ok(())
    }
}

/// `½ s1 + ¼ (s1² - 4 s2) Ψ / (1 - ½ s1 Ψ)` and its directional derivative.
fn royal_core(s: C2, v: Option<C2>, psi: Complex64, dpsi: Complex64) -> Result<(Complex64, Complex64)> {
    let [s1, s2] = s;
    let den = 1.0 - 0.5 * s1 * psi;
    guard(den, "1 - s1 Ψ / 2")?;
    let q = s1 * s1 - 4.0 * s2;
    let r = psi / den;
    let value = 0.5 * s1 + 0.25 * q * r;
    let deriv = match v {
        Some([v1, v2]) => {
            let dq = 2.0 * s1 * v1 - 4.0 * v2;
            let dr = (dpsi + 0.5 * v1 * psi * psi) / (den * den);
            0.5 * v1 + 0.25 * (dq * r + q * dr)
        }
        None => Complex64::new(0.0, 0.0),
    };
    Ok((value, deriv))
}

/// `m(½ s1 + ¼ (s1² - 4 s2) Ψ(s) / (1 - ½ s1 Ψ(s)))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoyalFamilyMember<P = SchurG> {
    pub m: MoebiusMap,
    pub psi: P,
}

pub fn royal_extremal<P: ScalarMap>(m: MoebiusMap, psi: P) -> RoyalFamilyMember<P> {
    RoyalFamilyMember { m, psi }
}

impl<P: ScalarMap> ScalarMap for RoyalFamilyMember<P> {
    fn eval(&self, p: C2) -> Result<Complex64> {
        let (g, _) = royal_core(p, None, self.psi.eval(p)?, Complex64::new(0.0, 0.0))?;
        Ok(self.m.eval(g))
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        let (g, dg) = royal_core(p, Some(v), self.psi.eval(p)?, self.psi.directional(p, v)?)?;
        Ok(self.m.deriv(g) * dg)
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t = {t} is outside [0, 1]")))
    }
}

/// `t λ1 + (1-t) λ2 + t(1-t)(λ1-λ2)² Θ / (1 - L Θ)` with `L = (1-t) λ1 + t λ2`,
/// and its derivative along `u` given `DΘ`.
fn interp_core(t: f64, l: C2, u: Option<C2>, th: Complex64, dth: Complex64) -> Result<(Complex64, Complex64)> {
    let [l1, l2] = l;
    let big_l = (1.0 - t) * l1 + t * l2;
    let den = 1.0 - big_l * th;
    guard(den, "1 - L Θ")?;
    let w = t * (1.0 - t);
    let q = (l1 - l2) * (l1 - l2);
    let r = th / den;
    let value = t * l1 + (1.0 - t) * l2 + w * q * r;
    let deriv = match u {
        Some([u1, u2]) => {
            let dq = 2.0 * (l1 - l2) * (u1 - u2);
            let dl = (1.0 - t) * u1 + t * u2;
            let dr = (dth + dl * th * th) / (den * den);
            t * u1 + (1.0 - t) * u2 + w * (dq * r + q * dr)
        }
        None => Complex64::new(0.0, 0.0),
    };
    Ok((value, deriv))
}

/// The bidisc interpolant through `(0,0) ↦ 0` and `(½,½) ↦ ½`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BidiscFamilyMember<Th = SchurBidisc> {
    pub t: f64,
    pub theta: Th,
}

pub fn bidisc_interpolant<Th: ScalarMap>(t: f64, theta: Th) -> Result<BidiscFamilyMember<Th>> {
    check_t(t)?;
    Ok(BidiscFamilyMember { t, theta })
}

impl<Th: ScalarMap> ScalarMap for BidiscFamilyMember<Th> {
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok(interp_core(self.t, p, None, self.theta.eval(p)?, Complex64::new(0.0, 0.0))?.0)
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        Ok(interp_core(self.t, p, Some(v), self.theta.eval(p)?, self.theta.directional(p, v)?)?.1)
    }
}

/// Deterministic sample points in the bidisc.
pub fn bidisc_samples(n: usize, radius: f64) -> Vec<C2> {
    (0..n)
        .map(|k| {
            let a = (k as f64 + 0.5) / n as f64;
            let r1 = radius * (a * 7.0).fract();
            let r2 = radius * (a * 13.0 + 0.3).fract();
            [Complex64::from_polar(r1, TAU * (a * 3.0).fract()), Complex64::from_polar(r2, TAU * (a * 11.0 + 0.1).fract())]
        })
        .collect()
}

/// `f̃` on `G` with `f̃ ∘ π = f` for a `t = ½` member with symmetric `Θ`.
///
/// `Ψ(s) = Θ(λ1, λ2)` with `λ` the roots of `λ² - s1 λ + s2` in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricReduction<Th = SchurBidisc> {
    pub theta: Th,
}

pub fn symmetric_reduce<Th: ScalarMap + Clone>(member: &BidiscFamilyMember<Th>) -> Result<SymmetricReduction<Th>> {
    if member.t != 0.5 {
        return Err(Error::Precondition(format!("symmetric reduction needs t = 1/2, got {}", member.t)));
    }
    for [a, b] in bidisc_samples(64, 0.95) {
        let gap = (member.theta.eval([a, b])? - member.theta.eval([b, a])?).norm();
        if gap > SYMMETRY_TOL {
            return Err(Error::Domain(format!("Θ is not symmetric: |Θ(a,b) - Θ(b,a)| = {gap:.3e} at a = {a}, b = {b}")));
        }
    }
    Ok(SymmetricReduction { theta: member.theta.clone() })
}

impl<Th: ScalarMap> SymmetricReduction<Th> {
    /// `Ψ(s) = Θ(roots of s)`.
    pub fn psi(&self, s: C2) -> Result<Complex64> {
        let (a, b) = symmetric_roots(s[0], s[1]);
        self.theta.eval([a, b])
    }
}

impl<Th: ScalarMap> ScalarMap for SymmetricReduction<Th> {
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok(royal_core(p, None, self.psi(p)?, Complex64::new(0.0, 0.0))?.0)
    }
}

/// `F = f ∘ (m1 ∘ Φ_{ω1}, m2 ∘ Φ_{ω2})` for a purely balanced tangent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedFamilyMember<Th = SchurBidisc> {
    pub delta: GTangent,
    pub omega1: Complex64,
    pub omega2: Complex64,
    pub m1: MoebiusMap,
    pub m2: MoebiusMap,
    pub t: f64,
    pub theta: Th,
    pub car: f64,
    /// `max(|F(λ)|, |D_v F(λ) - car δ|)` measured at construction.
    pub alignment_error: f64,
}

impl<Th: ScalarMap> BalancedFamilyMember<Th> {
    /// `Φ(s) = (m1(Φ_{ω1}(s)), m2(Φ_{ω2}(s)))`.
    pub fn inner(&self, p: C2) -> C2 {
        [self.m1.eval(phi_raw(self.omega1, p[0], p[1])), self.m2.eval(phi_raw(self.omega2, p[0], p[1]))]
    }

    fn inner_diff(&self, p: C2, v: C2) -> C2 {
        let d = |m: &MoebiusMap, w: Complex64| m.deriv(phi_raw(w, p[0], p[1])) * phi_directional_raw(w, p[0], p[1], v);
        [d(&self.m1, self.omega1), d(&self.m2, self.omega2)]
    }
}

impl<Th: ScalarMap> ScalarMap for BalancedFamilyMember<Th> {
    fn eval(&self, p: C2) -> Result<Complex64> {
        let l = self.inner(p);
        Ok(interp_core(self.t, l, None, self.theta.eval(l)?, Complex64::new(0.0, 0.0))?.0)
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        let l = self.inner(p);
        let u = self.inner_diff(p, v);
        Ok(interp_core(self.t, l, Some(u), self.theta.eval(l)?, self.theta.directional(l, u)?)?.1)
    }
}

pub fn balanced_extremal<Th: ScalarMap>(
    delta: &GTangent,
    t: f64,
    theta: Th,
    cfg: &Config,
) -> Result<BalancedFamilyMember<Th>> {
    check_t(t)?;
    let kind = classify(delta, cfg)?.kind;
    if kind != TangentKind::PurelyBalanced {
        return Err(Error::Precondition(format!("tangent is {kind:?}, not purely balanced")));
    }
    let car = car_metric(delta, cfg)?;
    let mut omegas = match extremal_omegas(&car.profile, cfg) {
        ExtremalSet::Finite(ws) if ws.len() == 2 => ws,
        other => return Err(Error::Precondition(format!("expected two extremal angles, got {other:?}"))),
    };
    omegas.sort_by(|a, b| wrap_angle(a.arg()).total_cmp(&wrap_angle(b.arg())));
    let align = |w: Complex64| {
        let (s1, s2) = (delta.base.s1, delta.base.s2);
        align_to_origin(phi_raw(w, s1, s2), phi_directional_raw(w, s1, s2, delta.vec))
    };
    let mut member = BalancedFamilyMember {
        delta: *delta,
        omega1: omegas[0],
        omega2: omegas[1],
        m1: align(omegas[0])?,
        m2: align(omegas[1])?,
        t,
        theta,
        car: car.value,
        alignment_error: 0.0,
    };
    let pushed = pushforward(&member, delta)?;
    let err = pushed.base.norm().max((pushed.vec - car.value).norm());
    member.alignment_error = err;
    if err > ALIGNMENT_TOL * car.value.max(1.0) {
        return Err(Error::Inconsistent(format!("balanced member is not well aligned: error {err:.3e}")));
    }
    Ok(member)
}

/// Two-branch data on `R ∪ F_β`: `(2w, w²) ↦ h(w)` and `(β + conj(β) w, w) ↦ m(w)`.
#[derive(Debug, Clone)]
pub struct FlatRestriction<H> {
    pub beta: Complex64,
    pub m: MoebiusMap,
    pub zeta: Complex64,
    pub eta: Complex64,
    pub h: H,
}

/// Points closer than this to `R` or `F_β` are assigned to that branch.
pub const BRANCH_TOL: f64 = 1e-12;

pub fn flat_restriction<H: DiscMap>(beta: Complex64, delta: &GTangent, h: H, cfg: &Config) -> Result<FlatRestriction<H>> {
    let ty = classify(delta, cfg)?;
    if ty.kind != TangentKind::Flat {
        return Err(Error::Precondition(format!("tangent is {:?}, not flat", ty.kind)));
    }
    if (ty.diagnostics.beta - beta).norm() > cfg.alg_tol.max(1e-10) {
        return Err(Error::Precondition(format!("tangent lies on F_{}, not F_{beta}", ty.diagnostics.beta)));
    }
    // δ = k_*(z, c) with k(w) = (β + conj(β) w, w), so z = s2 and c = v2.
    let m = align_to_origin(delta.base.s2, delta.vec[1])?;
    let (zeta, eta) = royal_flat_intersection(beta)?;
    let gap = (h.eval(zeta) - m.eval(eta)).norm();
    if gap >= COMPAT_TOL {
        return Err(Error::Domain(format!("h(ζ) and m(η) differ by {gap:.3e}")));
    }
    Ok(FlatRestriction { beta, m, zeta, eta, h })
}

impl<H: DiscMap> FlatRestriction<H> {
    pub fn royal_branch(&self, w: Complex64) -> Complex64 {
        self.h.eval(w)
    }

    pub fn flat_branch(&self, w: Complex64) -> Complex64 {
        self.m.eval(w)
    }

    /// Evaluate at a point of `R ∪ F_β`.
    pub fn eval(&self, s: &GPoint) -> Result<Complex64> {
        if s.royal_defect() < BRANCH_TOL {
            Ok(self.royal_branch(0.5 * s.s1))
        } else if (s.s1 - self.beta - self.beta.conj() * s.s2).norm() < BRANCH_TOL {
            Ok(self.flat_branch(s.s2))
        } else {
            Err(Error::Domain(format!("({}, {}) is on neither R nor F_β", s.s1, s.s2)))
        }
    }
}

/// Catalog-parametrized family members, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Royal { m: MoebiusMap, psi: SchurG },
    Bidisc { t: f64, theta: SchurBidisc },
    Balanced { delta: GTangent, t: f64, theta: SchurBidisc },
}

/// An instantiated [`FamilySpec`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyMember {
    Royal(RoyalFamilyMember),
    Bidisc(BidiscFamilyMember),
    Balanced(BalancedFamilyMember),
}

impl FamilySpec {
    pub fn instantiate(&self, cfg: &Config) -> Result<FamilyMember> {
        match self {
            FamilySpec::Royal { m, psi } => {
                psi.validate()?;
                Ok(FamilyMember::Royal(royal_extremal(m.clone(), psi.clone())))
            }
            FamilySpec::Bidisc { t, theta } => {
                theta.validate()?;
                Ok(FamilyMember::Bidisc(bidisc_interpolant(*t, theta.clone())?))
            }
            FamilySpec::Balanced { delta, t, theta } => {
                theta.validate()?;
                Ok(FamilyMember::Balanced(balanced_extremal(delta, *t, theta.clone(), cfg)?))
            }
        }
    }
}

impl FamilyMember {
    /// The tangent a balanced member was built for.
    pub fn target(&self) -> Option<&GTangent> {
        match self {
            FamilyMember::Balanced(b) => Some(&b.delta),
            _ => None,
        }
    }
}

impl ScalarMap for FamilyMember {
    fn eval(&self, p: C2) -> Result<Complex64> {
        match self {
            FamilyMember::Royal(f) => f.eval(p),
            FamilyMember::Bidisc(f) => f.eval(p),
            FamilyMember::Balanced(f) => f.eval(p),
        }
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        match self {
            FamilyMember::Royal(f) => f.directional(p, v),
            FamilyMember::Bidisc(f) => f.directional(p, v),
            FamilyMember::Balanced(f) => f.directional(p, v),
        }
    }
}

/// Point on the royal variety at parameter `z` (convenience for tests and the CLI).
pub fn royal_point(z: Complex64) -> C2 {
    [2.0 * z, z * z]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caratheodory::{central_difference, extremality_check};
    use crate::numeric::{ONE, ZERO};
    use crate::symdisc::{make_tangent, TangentSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn royal_examples() {
        let zero = royal_extremal(MoebiusMap::identity(), SchurG::Constant { c: ZERO });
        let p = [c(0.3, 0.2), c(-0.5, 0.1)];
        assert!((zero.eval(p).unwrap() - 0.5 * p[0]).norm() < 1e-15);
        let one = royal_extremal(MoebiusMap::identity(), SchurG::Constant { c: ONE });
        assert!((one.eval([ZERO, c(-0.5, 0.0)]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        // on R the royal term vanishes
        let m = MoebiusMap::new(c(0.0, 1.0), c(0.2, -0.3)).unwrap();
        let f = royal_extremal(m.clone(), SchurG::Phi { eta: c(0.6, 0.8) });
        let z = c(-0.4, 0.25);
        assert!((f.eval(royal_point(z)).unwrap() - m.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn royal_derivative_matches_differences() {
        let m = MoebiusMap::new(c(0.6, -0.8), c(0.1, 0.4)).unwrap();
        let v = [c(0.4, -0.1), c(0.2, 0.7)];
        for psi in standard_schur_g() {
            let f = royal_extremal(m.clone(), psi);
            let p = [c(0.3, -0.2), c(0.1, 0.25)];
            let fd = central_difference(|q| f.eval(q), p, v, 1e-6).unwrap();
            assert!((fd - f.directional(p, v).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn royal_member_is_extremal() {
        let m = MoebiusMap::new(c(0.0, -1.0), c(0.3, 0.3)).unwrap();
        let f = royal_extremal(m, SchurG::S2);
        let delta = make_tangent(&TangentSpec::Royal { z: c(0.2, -0.5), c: c(0.7, 0.4) }).unwrap();
        let r = extremality_check(&f, &delta, &Config::default()).unwrap();
        assert!(r.is_extremal && r.gap.abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn interpolant_examples() {
        let f = bidisc_interpolant(0.3, SchurBidisc::Constant { c: ZERO }).unwrap();
        assert_eq!(f.eval([ZERO, ZERO]).unwrap(), ZERO);
        assert!((f.eval([c(0.5, 0.0), c(0.5, 0.0)]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        let g = bidisc_interpolant(1.0, SchurBidisc::Mean).unwrap();
        let l = [c(0.1, 0.7), c(-0.3, 0.2)];
        assert_eq!(g.eval(l).unwrap(), l[0]);
        let h = bidisc_interpolant(0.5, SchurBidisc::Constant { c: ONE }).unwrap();
        assert!((h.eval([c(0.5, 0.0), c(-0.5, 0.0)]).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        assert!(bidisc_interpolant(1.5, SchurBidisc::Coord1).is_err());
    }

    #[test]
    fn interpolant_singularity_is_reported() {
        // L Θ = 1 needs |L| = 1, reachable only on the boundary
        let f = bidisc_interpolant(0.5, SchurBidisc::Constant { c: ONE }).unwrap();
        assert!(matches!(f.eval([ONE, ONE]), Err(Error::Singular { .. })));
    }

    #[test]
    fn reduction_reproduces_member() {
        let member = bidisc_interpolant(0.5, SchurBidisc::coord_product()).unwrap();
        let red = symmetric_reduce(&member).unwrap();
        for [z, w] in bidisc_samples(50, 0.9) {
            let s = [z + w, z * w];
            assert!((red.psi(s).unwrap() - s[1]).norm() < 1e-12);
            assert!((red.eval(s).unwrap() - member.eval([z, w]).unwrap()).norm() < 1e-10);
        }
        let asym = bidisc_interpolant(0.5, SchurBidisc::Coord1).unwrap();
        assert!(matches!(symmetric_reduce(&asym), Err(Error::Domain(_))));
        let wrong_t = bidisc_interpolant(0.3, SchurBidisc::Mean).unwrap();
        assert!(matches!(symmetric_reduce(&wrong_t), Err(Error::Precondition(_))));
    }

    #[test]
    fn balanced_worked_example() {
        let base = GPoint::new(c(0.5, 0.0), ZERO).unwrap();
        let delta = GTangent::new(base, [c(1.75, 0.0), c(0.5, 0.0)]);
        let cfg = Config::default();
        let f = balanced_extremal(&delta, 0.5, SchurBidisc::Constant { c: c(0.5, 0.0) }, &cfg).unwrap();
        assert!(f.alignment_error < 1e-8);
        let r = extremality_check(&f, &delta, &cfg).unwrap();
        assert!(r.gap.abs() < 1e-8, "{r:?}");
        let one = balanced_extremal(&delta, 1.0, SchurBidisc::Mean, &cfg).unwrap();
        let p = [c(0.1, 0.2), c(-0.2, 0.05)];
        assert!((one.eval(p).unwrap() - one.inner(p)[0]).norm() < 1e-15);
    }

    #[test]
    fn balanced_rejects_other_kinds() {
        let delta = make_tangent(&TangentSpec::Royal { z: ZERO, c: ONE }).unwrap();
        let r = balanced_extremal(&delta, 0.5, SchurBidisc::Mean, &Config::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn flat_restriction_examples() {
        let cfg = Config::default();
        let beta = c(0.3, -0.4);
        let delta = make_tangent(&TangentSpec::Flat { beta, z: c(0.1, 0.2), c: c(0.5, -0.1) }).unwrap();
        let m = align_to_origin(delta.base.s2, delta.vec[1]).unwrap();
        let h = move |w: Complex64| m.eval(w * w);
        let r = flat_restriction(beta, &delta, h.clone(), &cfg).unwrap();
        let (zeta, eta) = (r.zeta, r.eta);
        let on_r = GPoint::new(2.0 * zeta, zeta * zeta).unwrap();
        let on_f = GPoint::new(beta + beta.conj() * eta, eta).unwrap();
        assert!((r.eval(&on_r).unwrap() - r.eval(&on_f).unwrap()).norm() < 1e-10);
        assert!(flat_restriction(beta, &delta, |_: Complex64| ZERO, &cfg).is_err());
        assert!(matches!(flat_restriction(c(0.1, 0.0), &delta, h, &cfg), Err(Error::Precondition(_))));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = FamilySpec::Royal { m: MoebiusMap::identity(), psi: SchurG::Constant { c: ONE } };
        let json = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let f = back.instantiate(&Config::default()).unwrap();
        assert!((f.eval([ZERO, c(-0.5, 0.0)]).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }
}
