//! Finite-dimensional `G`-models and realization formulas.
//!
//! Operators are small dense complex matrices. Inverses go through LU with
//! partial pivoting; a condition number above [`COND_WARN`] is logged.

use log::warn;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::caratheodory::ScalarMap;
use crate::error::{Error, Result};
use crate::sampling::{seeded, unit_circle};
use crate::symdisc::{GPoint, C2};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Condition numbers above this are logged as a numerical-quality warning.
pub const COND_WARN: f64 = 1e12;

/// Tolerance for unitarity of a colligation or of a diagonal model.
pub const UNITARY_TOL: f64 = 1e-10;

/// Eigenvalues of a unitary diagonal model must be unimodular to this tolerance.
pub const EIGEN_TOL: f64 = 1e-12;

/// Serde for complex matrices as row-major lists of `[re, im]` pairs.
mod rows {
    use super::CMatrix;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
        m.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix, String> {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err("ragged matrix rows".into());
        }
        Ok(CMatrix::from_fn(n, cols, |i, j| rows[i][j]))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<Complex64>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// `σ_max / σ_min`, infinite for a singular matrix.
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `lhs⁻¹ rhs` by LU, with a conditioning guard.
fn solve(lhs: CMatrix, rhs: &CMatrix, what: &'static str) -> Result<CMatrix> {
    let cond = condition_number(&lhs);
    if !cond.is_finite() {
        return Err(Error::Singular { what, magnitude: 0.0 });
    }
    if cond > COND_WARN {
        warn!("{what} is ill conditioned (cond = {cond:.3e})");
    }
    lhs.lu().solve(rhs).ok_or(Error::Singular { what, magnitude: 1.0 / cond })
}

/// The operator `T` of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelOperator {
    /// `diag(η_1, ..., η_n)` with unimodular `η_k`.
    Diagonal { eigenvalues: Vec<Complex64> },
    /// A general contraction.
    Dense {
        #[serde(with = "rows")]
        matrix: CMatrix,
    },
}

impl ModelOperator {
    pub fn unitary_diagonal(eigenvalues: Vec<Complex64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter("model dimension must be positive".into()));
        }
        if let Some(e) = eigenvalues.iter().find(|e| (e.norm() - 1.0).abs() > EIGEN_TOL) {
            return Err(Error::InvalidParameter(format!("eigenvalue {e} is not unimodular")));
        }
        Ok(ModelOperator::Diagonal { eigenvalues })
    }

    pub fn contraction(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() == 0 || !matrix.is_square() {
            return Err(Error::InvalidParameter("T must be square and nonempty".into()));
        }
        let norm = operator_norm(&matrix);
        if norm > 1.0 + EIGEN_TOL {
            return Err(Error::InvalidParameter(format!("‖T‖ = {norm} exceeds 1")));
        }
        Ok(ModelOperator::Dense { matrix })
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelOperator::Diagonal { eigenvalues } => eigenvalues.len(),
            ModelOperator::Dense { matrix } => matrix.nrows(),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            ModelOperator::Diagonal { eigenvalues } => CMatrix::from_diagonal(&CVector::from_column_slice(eigenvalues)),
            ModelOperator::Dense { matrix } => matrix.clone(),
        }
    }

    /// `s_T = (2 s2 T - s1)(2 - s1 T)⁻¹` for arbitrary coordinates.
    pub fn substitute(&self, s: C2) -> Result<CMatrix> {
        let t = self.matrix();
        let id = CMatrix::identity(t.nrows(), t.nrows());
        let num = &t * (2.0 * s[1]) - &id * s[0];
        let den = &id * Complex64::new(2.0, 0.0) - &t * s[0];
        // numerator and denominator commute
        solve(den, &num, "2 - s1 T")
    }

    /// Derivative of `s_T` along `v`: `(2 - s1 T)⁻¹ (2 v2 T - v1 + v1 T s_T)`.
    fn substitute_diff(&self, s: C2, v: C2, st: &CMatrix) -> Result<CMatrix> {
        let t = self.matrix();
        let id = CMatrix::identity(t.nrows(), t.nrows());
        let den = &id * Complex64::new(2.0, 0.0) - &t * s[0];
        let rhs = &t * (2.0 * v[1]) - &id * v[0] + (&t * st) * v[0];
        solve(den, &rhs, "2 - s1 T")
    }

    /// A diagonal unitary operator with seeded uniform eigenvalues.
    pub fn random_diagonal(n: usize, seed: u64) -> Result<Self> {
        let mut rng = seeded(seed);
        Self::unitary_diagonal((0..n).map(|_| unit_circle(&mut rng)).collect())
    }
}

/// `s_T` for a model at a point of `G`.
pub fn s_t(model: &FiniteModel, s: &GPoint) -> Result<CMatrix> {
    model.operator.substitute(s.coords())
}

/// The map `u: G -> C^n` of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelVector {
    Constant { value: Vec<Complex64> },
    /// `u(s) = (1 - D s_T)⁻¹ C` for a colligation.
    Colligation { colligation: Colligation },
}

/// `(M, T, u)` with `M = C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteModel {
    pub operator: ModelOperator,
    pub u: ModelVector,
}

impl FiniteModel {
    pub fn new(operator: ModelOperator, u: ModelVector) -> Result<Self> {
        let n = operator.dim();
        let un = match &u {
            ModelVector::Constant { value } => value.len(),
            ModelVector::Colligation { colligation } => colligation.dim(),
        };
        if un != n {
            return Err(Error::InvalidParameter(format!("u has dimension {un}, T has {n}")));
        }
        Ok(Self { operator, u })
    }

    /// A one-dimensional model with `T = [τ]` and `u ≡ 1`.
    pub fn scalar(tau: Complex64) -> Result<Self> {
        let operator = if (tau.norm() - 1.0).abs() <= EIGEN_TOL {
            ModelOperator::unitary_diagonal(vec![tau])?
        } else {
            ModelOperator::contraction(CMatrix::from_element(1, 1, tau))?
        };
        Self::new(operator, ModelVector::Constant { value: vec![Complex64::new(1.0, 0.0)] })
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn u(&self, s: C2) -> Result<CVector> {
        match &self.u {
            ModelVector::Constant { value } => Ok(CVector::from_column_slice(value)),
            ModelVector::Colligation { colligation } => {
                let st = self.operator.substitute(s)?;
                colligation.state(&st)
            }
        }
    }
}

/// `max |1 - conj(φ(t)) φ(s) - ⟨(I - t_T* s_T) u(s), u(t)⟩|` over sample pairs.
pub fn model_residual(phi: &dyn ScalarMap, model: &FiniteModel, samples: &[(GPoint, GPoint)]) -> Result<f64> {
    let n = model.dim();
    let id = CMatrix::identity(n, n);
    let mut worst: f64 = 0.0;
    for (s, t) in samples {
        let (sc, tc) = (s.coords(), t.coords());
        let lhs = 1.0 - phi.eval(tc)?.conj() * phi.eval(sc)?;
        let st_s = model.operator.substitute(sc)?;
        let st_t = model.operator.substitute(tc)?;
        let (us, ut) = (model.u(sc)?, model.u(tc)?);
        let rhs = ut.dotc(&((&id - st_t.adjoint() * st_s) * us));
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ColligationRaw {
    a: Complex64,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
    d: Vec<Vec<Complex64>>,
    unitary_checked: bool,
}

/// The block operator `[[A, B], [C, D]]` on `C ⊕ C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ColligationRaw", into = "ColligationRaw")]
pub struct Colligation {
    a: Complex64,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
    unitary_checked: bool,
}

impl TryFrom<ColligationRaw> for Colligation {
    type Error = Error;
    fn try_from(raw: ColligationRaw) -> Result<Self> {
        let d = rows::from_rows(&raw.d).map_err(Error::InvalidParameter)?;
        let c = Self::new(raw.a, raw.b, raw.c, d)?;
        if raw.unitary_checked {
            c.checked_unitary()
        } else {
            Ok(c)
        }
    }
}

impl From<Colligation> for ColligationRaw {
    fn from(c: Colligation) -> Self {
        ColligationRaw {
            a: c.a,
            b: c.b.iter().copied().collect(),
            c: c.c.iter().copied().collect(),
            d: rows::to_rows(&c.d),
            unitary_checked: c.unitary_checked,
        }
    }
}

impl Colligation {
    pub fn new(a: Complex64, b: Vec<Complex64>, c: Vec<Complex64>, d: CMatrix) -> Result<Self> {
        let n = d.nrows();
        if n == 0 || !d.is_square() || b.len() != n || c.len() != n {
            return Err(Error::InvalidParameter(format!(
                "colligation blocks do not fit: B {}, C {}, D {}x{}",
                b.len(),
                c.len(),
                d.nrows(),
                d.ncols()
            )));
        }
        Ok(Self { a, b: CMatrix::from_row_slice(1, n, &b), c: CMatrix::from_column_slice(n, 1, &c), d, unitary_checked: false })
    }

    /// Split an `(n+1)×(n+1)` block matrix.
    pub fn from_block(u: &CMatrix) -> Result<Self> {
        if !u.is_square() || u.nrows() < 2 {
            return Err(Error::InvalidParameter("block matrix must be square of size at least 2".into()));
        }
        let n = u.nrows() - 1;
        let b = u.view((0, 1), (1, n)).iter().copied().collect();
        let c = u.view((1, 0), (n, 1)).iter().copied().collect();
        Self::new(u[(0, 0)], b, c, u.view((1, 1), (n, n)).into_owned())
    }

    pub fn dim(&self) -> usize {
        self.d.nrows()
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn d(&self) -> &CMatrix {
        &self.d
    }

    pub fn is_unitary_checked(&self) -> bool {
        self.unitary_checked
    }

    pub fn block(&self) -> CMatrix {
        let n = self.dim();
        let mut u = CMatrix::zeros(n + 1, n + 1);
        u[(0, 0)] = self.a;
        u.view_mut((0, 1), (1, n)).copy_from(&self.b);
        u.view_mut((1, 0), (n, 1)).copy_from(&self.c);
        u.view_mut((1, 1), (n, n)).copy_from(&self.d);
        u
    }

    /// Frobenius norm of `U* U - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let u = self.block();
        let n = u.nrows();
        (u.adjoint() * &u - CMatrix::identity(n, n)).norm()
    }

    /// Verify unitarity within [`UNITARY_TOL`] and set the flag.
    pub fn checked_unitary(mut self) -> Result<Self> {
        let r = self.unitarity_residual();
        if r > UNITARY_TOL {
            return Err(Error::InvalidParameter(format!("colligation is not unitary: residual {r:.3e}")));
        }
        self.unitary_checked = true;
        Ok(self)
    }

    /// `(1 - D s_T)⁻¹ C`.
    fn state(&self, st: &CMatrix) -> Result<CVector> {
        let n = self.dim();
        let k = CMatrix::identity(n, n) - &self.d * st;
        Ok(solve(k, &self.c, "1 - D s_T")?.column(0).into_owned())
    }
}

/// Haar-distributed unitary colligation of size `(n+1)×(n+1)`, deterministic in `seed`.
pub fn random_unitary_colligation(n: usize, seed: u64) -> Result<Colligation> {
    if n == 0 {
        return Err(Error::InvalidParameter("colligation dimension must be at least 1".into()));
    }
    let mut rng = seeded(seed);
    let size = n + 1;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(size, size, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * scale
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    // Fix the phases so that R has a positive diagonal; this makes Q Haar.
    for j in 0..size {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..size {
            q[(i, j)] *= phase;
        }
    }
    Colligation::from_block(&q)?.checked_unitary()
}

/// `φ(s) = A + B s_T (1 - D s_T)⁻¹ C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub colligation: Colligation,
    pub operator: ModelOperator,
}

pub fn realize(colligation: Colligation, operator: ModelOperator) -> Result<Realization> {
    if colligation.dim() != operator.dim() {
        return Err(Error::InvalidParameter(format!(
            "colligation has dimension {}, T has {}",
            colligation.dim(),
            operator.dim()
        )));
    }
    Ok(Realization { colligation, operator })
}

impl Realization {
    /// The model `(C^n, T, (1 - D s_T)⁻¹ C)` that certifies `φ` when the colligation is unitary.
    pub fn model(&self) -> FiniteModel {
        FiniteModel {
            operator: self.operator.clone(),
            u: ModelVector::Colligation { colligation: self.colligation.clone() },
        }
    }
}

impl ScalarMap for Realization {
    fn eval(&self, p: C2) -> Result<Complex64> {
        let st = self.operator.substitute(p)?;
        let u = self.colligation.state(&st)?;
        Ok(self.colligation.a + (&self.colligation.b * &st * u)[(0, 0)])
    }

    fn directional(&self, p: C2, v: C2) -> Result<Complex64> {
        let col = &self.colligation;
        let n = col.dim();
        let st = self.operator.substitute(p)?;
        let dst = self.operator.substitute_diff(p, v, &st)?;
        let u = col.state(&st)?;
        let k = CMatrix::identity(n, n) - &col.d * &st;
        let u = CMatrix::from_column_slice(n, 1, u.as_slice());
        let du = solve(k, &(&col.d * &dst * &u), "1 - D s_T")?;
        Ok((&col.b * (&dst * &u + &st * du))[(0, 0)])
    }
}
