//! A small catalog of Schur-class functions on `G` and on the bidisc.
//!
//! Catalog entries serialize to tagged JSON so family members can be stored
//! and re-instantiated by parameters alone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::caratheodory::ScalarMap;
use crate::error::{Error, Result};
use crate::numeric::{ONE, ZERO};
use crate::symdisc::{phi_directional_raw, phi_raw, C2};

fn check_constant(c: Complex64) -> Result<()> {
    if c.norm() > 1.0 + 1e-15 {
        Err(Error::InvalidParameter(format!("constant {c} is outside the closed disc")))
    } else {
        Ok(())
    }
}

fn check_eta(eta: Complex64) -> Result<()> {
    if (eta.norm() - 1.0).abs() > 1e-10 {
        Err(Error::InvalidParameter(format!("η = {eta} must be unimodular")))
    } else {
        Ok(())
    }
}

/// Schur-class functions on `G`, evaluated at `(s1, s2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchurG {
    Constant { c: Complex64 },
    /// `s1 / 2`
    HalfS1,
    /// `s2`
    S2,
    /// `Φ_η`
    Phi { eta: Complex64 },
    Product { factors: Vec<SchurG> },
}

impl SchurG {
    pub fn validate(&self) -> Result<()> {
        match self {
            SchurG::Constant { c } => check_constant(*c),
            SchurG::Phi { eta } => check_eta(*eta),
            SchurG::Product { factors } => factors.iter().try_for_each(SchurG::validate),
            SchurG::HalfS1 | SchurG::S2 => Ok(()),
        }
    }

    fn value(&self, p: C2) -> Complex64 {
        match self {
            SchurG::Constant { c } => *c,
            SchurG::HalfS1 => 0.5 * p[0],
            SchurG::S2 => p[1],
            SchurG::Phi { eta } => phi_raw(*eta, p[0], p[1]),
            SchurG::Product { factors } => factors.iter().fold(ONE, |acc, f| acc * f.value(p)),
        }
    }

    fn diff(&self, p: C2, v: C2) -> Complex64 {
        match self {
            SchurG::Constant { .. } => ZERO,
            SchurG::HalfS1 => 0.5 * v[0],
            SchurG::S2 => v[1],
            SchurG::Phi { eta } => phi_directional_raw(*eta, p[0], p[1], v),
            SchurG::Product { factors } => product_rule(factors, |f| f.value(p), |f| f.diff(p, v)),
        }
    }
}

impl ScalarMap for SchurG {
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok(self.value(p))
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        Ok(self.diff(p, v))
    }
}

/// Schur-class functions on the bidisc, evaluated at `(λ1, λ2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchurBidisc {
    Constant { c: Complex64 },
    /// `λ1`
    Coord1,
    /// `λ2`
    Coord2,
    /// `(λ1 + λ2) / 2`
    Mean,
    /// `Ψ ∘ π` for a function `Ψ` on `G`.
    Lifted { psi: SchurG },
    Product { factors: Vec<SchurBidisc> },
}

impl SchurBidisc {
    /// `λ1 λ2`, which is `s2 ∘ π`.
    pub fn coord_product() -> Self {
        SchurBidisc::Lifted { psi: SchurG::S2 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SchurBidisc::Constant { c } => check_constant(*c),
            SchurBidisc::Lifted { psi } => psi.validate(),
            SchurBidisc::Product { factors } => factors.iter().try_for_each(SchurBidisc::validate),
            _ => Ok(()),
        }
    }

    fn value(&self, l: C2) -> Complex64 {
        match self {
            SchurBidisc::Constant { c } => *c,
            SchurBidisc::Coord1 => l[0],
            SchurBidisc::Coord2 => l[1],
            SchurBidisc::Mean => 0.5 * (l[0] + l[1]),
            SchurBidisc::Lifted { psi } => psi.value([l[0] + l[1], l[0] * l[1]]),
            SchurBidisc::Product { factors } => factors.iter().fold(ONE, |acc, f| acc * f.value(l)),
        }
    }

    fn diff(&self, l: C2, u: C2) -> Complex64 {
        match self {
            SchurBidisc::Constant { .. } => ZERO,
            SchurBidisc::Coord1 => u[0],
            SchurBidisc::Coord2 => u[1],
            SchurBidisc::Mean => 0.5 * (u[0] + u[1]),
            SchurBidisc::Lifted { psi } => {
                psi.diff([l[0] + l[1], l[0] * l[1]], [u[0] + u[1], l[1] * u[0] + l[0] * u[1]])
            }
            SchurBidisc::Product { factors } => product_rule(factors, |f| f.value(l), |f| f.diff(l, u)),
        }
    }
}

impl ScalarMap for SchurBidisc {
    fn eval(&self, p: C2) -> Result<Complex64> {
        Ok(self.value(p))
    }
    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        Ok(self.diff(p, v))
    }
}

fn product_rule<T>(factors: &[T], value: impl Fn(&T) -> Complex64, diff: impl Fn(&T) -> Complex64) -> Complex64 {
    let values: Vec<Complex64> = factors.iter().map(&value).collect();
    factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            values
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(diff(f), |acc, (_, v)| acc * v)
        })
        .sum()
}

/// A fixed list of catalog functions on `G` used by tests and the CLI.
pub fn standard_schur_g() -> Vec<SchurG> {
    let eta = |t: f64| Complex64::from_polar(1.0, t);
    vec![
        SchurG::Constant { c: ZERO },
        SchurG::Constant { c: ONE },
        SchurG::Constant { c: Complex64::new(0.3, -0.6) },
        SchurG::HalfS1,
        SchurG::S2,
        SchurG::Phi { eta: ONE },
        SchurG::Phi { eta: eta(2.1) },
        SchurG::Product { factors: vec![SchurG::S2, SchurG::Phi { eta: eta(-0.7) }] },
        SchurG::Product { factors: vec![SchurG::HalfS1, SchurG::Constant { c: Complex64::new(0.0, -1.0) }] },
    ]
}

/// A fixed list of catalog functions on the bidisc used by tests and the CLI.
pub fn standard_schur_bidisc() -> Vec<SchurBidisc> {
    let eta = |t: f64| Complex64::from_polar(1.0, t);
    vec![
        SchurBidisc::Constant { c: ZERO },
        SchurBidisc::Constant { c: ONE },
        SchurBidisc::Constant { c: Complex64::new(0.5, 0.0) },
        SchurBidisc::Constant { c: Complex64::new(-0.4, 0.8) },
        SchurBidisc::Coord1,
        SchurBidisc::Coord2,
        SchurBidisc::Mean,
        SchurBidisc::coord_product(),
        SchurBidisc::Lifted { psi: SchurG::Phi { eta: eta(0.9) } },
        SchurBidisc::Product { factors: vec![SchurBidisc::Coord1, SchurBidisc::Coord2, SchurBidisc::Mean] },
        SchurBidisc::Product {
            factors: vec![SchurBidisc::Coord2, SchurBidisc::Constant { c: eta(1.2) }],
        },
    ]
}
