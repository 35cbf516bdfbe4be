//! Evaluatable holomorphic functions into the closed disc.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::disc::MoebiusMap;
use crate::error::Result;
use crate::symdisc::{phi_directional_raw, phi_raw, C2};

/// Step for the default central-difference directional derivative.
pub const FD_STEP: f64 = 1e-6;

/// A holomorphic function on a domain in `C^2` (either `G` or the bidisc),
/// with values in the closed unit disc on that domain.
///
/// Implementors with a closed-form derivative override [`ScalarMap::directional`];
/// the default is a central difference with step [`FD_STEP`].
pub trait ScalarMap: Send + Sync {
    fn eval(&self, p: C2) -> Result<Complex64>;

    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        central_difference(|q| self.eval(q), p, v, FD_STEP)
    }
}

pub type MapRef = Arc<dyn ScalarMap>;

/// `(f(p + h v) - f(p - h v)) / 2h`.
pub fn central_difference(
    f: impl Fn(C2) -> Result<Complex64>,
    p: C2,
    v: C2,
    h: f64,
) -> Result<Complex64> {
    let plus = f([p[0] + h * v[0], p[1] + h * v[1]])?;
    let minus = f([p[0] - h * v[0], p[1] - h * v[1]])?;
    Ok((plus - minus) / (2.0 * h))
}

impl<T: ScalarMap + ?Sized> ScalarMap for Arc<T> {
    fn eval(&self, p: C2) -> Result<Complex64> {
        (**self).eval(p)
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        (**self).directional(p, v)
    }
}

/// `Φ_ω` as a map on `G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiMap {
    pub omega: Complex64,
}

impl ScalarMap for PhiMap {
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok(phi_raw(self.omega, p[0], p[1]))
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        Ok(phi_directional_raw(self.omega, p[0], p[1], v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMap(pub Complex64);

impl ScalarMap for ConstantMap {
    fn eval(&self, _: C2) -> Result<Complex64> {
        Ok(self.0)
    }
    fn directional(&self, _: C2, _: C2) -> Result<Complex64> {
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// `m ∘ F` for a disc automorphism `m`.
#[derive(Clone)]
pub struct MoebiusComposed {
    pub outer: MoebiusMap,
    pub inner: MapRef,
}

impl fmt::Debug for MoebiusComposed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MoebiusComposed").field("outer", &self.outer).finish_non_exhaustive()
    }
}

impl ScalarMap for MoebiusComposed {
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok(self.outer.eval(self.inner.eval(p)?))
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        let w = self.inner.eval(p)?;
        Ok(self.outer.deriv(w) * self.inner.directional(p, v)?)
    }
}

/// Wraps a closure; derivatives fall back to central differences.
pub struct FnMap<F>(pub F);

impl<F> ScalarMap for FnMap<F>
where
    F: Fn(C2) -> Complex64 + Send + Sync,
{
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok((self.0)(p))
    }
}
