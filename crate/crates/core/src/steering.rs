//! Rotationally invariant (RIS) and two-setting necessary-and-sufficient (NSS)
//! steering parameters.
//!
//! For ±1 outcomes and an orthonormal set of Bob settings, every local hidden
//! state model satisfies
//!
//! ```text
//! RIS:  ‖M‖_tr ≤ √m                    (m = number of Alice settings)
//! NSS:  |Mᵀu₊| + |Mᵀu₋| ≤ √2,  u± = (1, ±1)ᵀ/√2   (m = 2 only)
//! ```
//!
//! For a state with spin-correlation tensor `T` and frames `A`, `B` the
//! predicted correlations are `M = AᵀTB`; with orthonormal frames the RIS
//! parameter reduces to `‖P_A T P_B‖_tr`. Singlet-like states give negative
//! correlations; both parameters are norms, so signs never matter.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, MeasurementFrame};
use crate::linalg;
use crate::quantum::SpinCorrelationMatrix;

const ENTRY_TOL: f64 = 1e-9;

/// Observed or predicted correlations `M_jk = ⟨A_j B_k⟩`, m×n with 1 ≤ m, n ≤ 3.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(DMatrix<f64>);

impl CorrelationMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        if !(1..=3).contains(&rows) || !(1..=3).contains(&cols) {
            return Err(Error::Dimension(format!(
                "correlation matrix must be between 1x1 and 3x3, got {rows}x{cols}"
            )));
        }
        if let Some(bad) = m.iter().find(|x| !x.is_finite() || x.abs() > 1.0 + ENTRY_TOL) {
            return Err(Error::InvalidArgument(format!(
                "correlation entry {bad} outside [-1, 1]"
            )));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged correlation matrix rows".into()));
        }
        Self::new(DMatrix::from_fn(m, n, |j, k| rows[j][k]))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().cloned().collect()).collect()
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }
}

impl Serialize for CorrelationMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_rows(&self.0, serializer)
    }
}

/// Serializes a matrix as a list of rows.
pub fn serialize_rows<S: serde::Serializer>(
    m: &DMatrix<f64>,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().cloned().collect()).collect();
    rows.serialize(serializer)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Inequality {
    Ris,
    Nss,
}

impl Inequality {
    pub fn name(&self) -> &'static str {
        match self {
            Inequality::Ris => "RIS",
            Inequality::Nss => "NSS",
        }
    }
}

/// A steering parameter compared against its LHS bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteeringAssessment {
    pub inequality: Inequality,
    pub parameter: f64,
    pub bound: f64,
    /// parameter − bound
    pub margin: f64,
    /// margin > 0
    pub violated: bool,
    pub uncertainty: Option<f64>,
}

impl SteeringAssessment {
    fn new(inequality: Inequality, parameter: f64, bound: f64) -> Self {
        let margin = parameter - bound;
        Self {
            inequality,
            parameter,
            bound,
            margin,
            violated: margin > 0.0,
            uncertainty: None,
        }
    }

    pub fn with_uncertainty(mut self, sigma: f64) -> Self {
        self.uncertainty = Some(sigma);
        self
    }

    /// Margin in units of the uncertainty, when one is attached and nonzero.
    pub fn significance(&self) -> Option<f64> {
        self.uncertainty
            .filter(|&u| u > 0.0)
            .map(|u| self.margin / u)
    }
}

/// `M_jk = a_jᵀ T b_k`, valid for arbitrary (also nonorthogonal) frames.
pub fn predicted_correlation(
    t: &SpinCorrelationMatrix,
    alice: &MeasurementFrame,
    bob: &MeasurementFrame,
) -> CorrelationMatrix {
    let t = to_dmatrix(t.matrix());
    let m = alice.matrix().transpose() * t * bob.matrix();
    // |a·Tb| ≤ 1 for any physical T and unit vectors; clamp rounding only
    CorrelationMatrix(m.map(|x| x.clamp(-1.0, 1.0)))
}

pub fn trace_norm(m: &CorrelationMatrix) -> Result<f64> {
    linalg::trace_norm(m.matrix())
}

pub fn assess_ris(m: &CorrelationMatrix) -> Result<SteeringAssessment> {
    Ok(SteeringAssessment::new(
        Inequality::Ris,
        trace_norm(m)?,
        (m.rows() as f64).sqrt(),
    ))
}

/// `‖P_A T P_B‖_tr` for orthonormal frames.
pub fn ris_predicted(
    t: &SpinCorrelationMatrix,
    alice: &MeasurementFrame,
    bob: &MeasurementFrame,
) -> Result<f64> {
    let pa = geometry::projection_matrix(alice)?;
    let pb = geometry::projection_matrix(bob)?;
    linalg::trace_norm(&to_dmatrix(&(pa * t.matrix() * pb)))
}

/// `|Mᵀu₊| + |Mᵀu₋|` for a matrix with exactly two Alice settings.
pub fn nss_parameter(m: &CorrelationMatrix) -> Result<f64> {
    if m.rows() != 2 {
        return Err(Error::Dimension(format!(
            "the NSS parameter is defined for two Alice settings, got {}",
            m.rows()
        )));
    }
    let mt = m.matrix().transpose();
    let plus = &mt * nalgebra::DVector::from_vec(vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    let minus = &mt * nalgebra::DVector::from_vec(vec![FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    Ok(plus.norm() + minus.norm())
}

pub fn assess_nss(m: &CorrelationMatrix) -> Result<SteeringAssessment> {
    Ok(SteeringAssessment::new(Inequality::Nss, nss_parameter(m)?, SQRT_2))
}

/// `|P_B Tᵀ a₊| + |P_B Tᵀ a₋|` with `a± = (a₁ ± a₂)/√2`.
pub fn nss_predicted(
    t: &SpinCorrelationMatrix,
    alice: &MeasurementFrame,
    bob: &MeasurementFrame,
) -> Result<f64> {
    if alice.len() != 2 {
        return Err(Error::Dimension(format!(
            "the NSS parameter needs an Alice pair, got {} directions",
            alice.len()
        )));
    }
    if !alice.is_orthonormal() {
        return Err(Error::NonOrthonormalFrame);
    }
    let pb = geometry::projection_matrix(bob)?;
    let a1 = alice.directions()[0].vector();
    let a2 = alice.directions()[1].vector();
    let image = pb * t.matrix().transpose();
    let plus = image * ((a1 + a2) * FRAC_1_SQRT_2);
    let minus = image * ((a1 - a2) * FRAC_1_SQRT_2);
    Ok(plus.norm() + minus.norm())
}

/// RIS parameter of a Werner state for two orthonormal pairs whose planes meet
/// at dihedral angle `phi`: `W(1 + |cos Φ|)`, independent of α.
pub fn werner_ris_closed_form(w: f64, phi: f64) -> Result<f64> {
    check_werner(w)?;
    Ok(w * (1.0 + phi.cos().abs()))
}

/// NSS parameter of a Werner state in the tilted-pair geometry:
/// `W(√(1 + cos²Φ + sin2α sin²Φ) + √(1 + cos²Φ − sin2α sin²Φ))/√2`.
pub fn werner_nss_closed_form(w: f64, phi: f64, alpha: f64) -> Result<f64> {
    check_werner(w)?;
    let c2 = phi.cos().powi(2);
    let s2 = phi.sin().powi(2);
    let tilt = (2.0 * alpha).sin() * s2;
    Ok(w * ((1.0 + c2 + tilt).max(0.0).sqrt() + (1.0 + c2 - tilt).max(0.0).sqrt()) / SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinimizationMode {
    /// 0.5° grid over θ ∈ [0, π/2] followed by golden-section refinement.
    Numeric,
    /// √k + √k′ from the eigenvalues of `K = P_A T P_B Tᵀ P_A` on the plane.
    Analytic,
}

const GRID_STEP_DEG: f64 = 0.5;
const GOLDEN_TOL: f64 = 1e-8;

/// Minimum of the NSS parameter over all orthonormal Alice pairs in the plane
/// of `alice_plane` (a rank-2 projector), with Bob's settings fixed.
pub fn min_nss_over_rotations(
    t: &SpinCorrelationMatrix,
    alice_plane: &Matrix3<f64>,
    bob: &MeasurementFrame,
    mode: MinimizationMode,
) -> Result<f64> {
    let (e1, e2) = geometry::plane_basis(alice_plane)?;
    let pb = geometry::projection_matrix(bob)?;
    let image = pb * t.matrix().transpose();

    match mode {
        MinimizationMode::Analytic => {
            let k = DMatrix::from_fn(2, 2, |i, j| {
                let (u, v) = ([e1, e2][i], [e1, e2][j]);
                (image * u).dot(&(image * v))
            });
            let eig = linalg::symmetric_eigen(&k)?;
            Ok(eig.values.iter().map(|&l| l.max(0.0).sqrt()).sum())
        }
        MinimizationMode::Numeric => {
            let f = |theta: f64| -> f64 {
                let (s, c) = theta.sin_cos();
                let plus: Vector3<f64> = e1 * c + e2 * s;
                let minus: Vector3<f64> = e1 * s - e2 * c;
                (image * plus).norm() + (image * minus).norm()
            };
            let step = GRID_STEP_DEG.to_radians();
            let n = (90.0 / GRID_STEP_DEG).round() as usize;
            let (best_k, best) = (0..=n)
                .map(|k| (k, f(k as f64 * step)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("non-empty grid");
            // f has period π/2, so the bracket may extend past either end
            let centre = best_k as f64 * step;
            let refined = golden_section_min(f, centre - step, centre + step, GOLDEN_TOL);
            Ok(best.min(refined))
        }
    }
}

fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Plane projectors for Alice and Bob maximizing the pair-RIS parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPlanes {
    pub alice: Matrix3<f64>,
    pub bob: Matrix3<f64>,
    /// σ₁ + σ₂ of T
    pub value: f64,
}

/// Spans of the top two left/right singular vectors of T.
///
/// Degenerate spectra resolve to the coordinate axes in order, so
/// `T = −W·I₃` yields the x–y plane on both sides.
pub fn optimal_pair_planes(t: &SpinCorrelationMatrix) -> Result<OptimalPlanes> {
    let svd = linalg::svd(&to_dmatrix(t.matrix()))?;
    let column = |m: &DMatrix<f64>, j: usize| Vector3::new(m[(0, j)], m[(1, j)], m[(2, j)]);
    let left = complete_pair(column(&svd.u, 0), column(&svd.u, 1));
    let right = complete_pair(column(&svd.v, 0), column(&svd.v, 1));
    let projector = |(a, b): (Vector3<f64>, Vector3<f64>)| a * a.transpose() + b * b.transpose();
    Ok(OptimalPlanes {
        alice: projector(left),
        bob: projector(right),
        value: svd.singular_values[0] + svd.singular_values[1],
    })
}

/// Replaces zero vectors so the pair is orthonormal, drawing from x̂, ŷ, ẑ.
fn complete_pair(a: Vector3<f64>, b: Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut basis: Vec<Vector3<f64>> = Vec::with_capacity(2);
    for candidate in [a, b, Vector3::x(), Vector3::y(), Vector3::z()] {
        if basis.len() == 2 {
            break;
        }
        let mut v = candidate;
        for e in &basis {
            v -= e * e.dot(&v);
        }
        if v.norm() > 1e-8 {
            basis.push(v / v.norm());
        }
    }
    (basis[0], basis[1])
}

fn check_werner(w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidArgument(format!("Werner parameter {w} outside [0, 1]")));
    }
    Ok(())
}

fn to_dmatrix(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}
