//! Two-qubit states and their reduction to the spin-correlation tensor.
//!
//! Basis ordering is Alice ⊗ Bob over {|HH⟩, |HV⟩, |VH⟩, |VV⟩}, with σ₃
//! diagonal in {H, V} (σ₃|H⟩ = |H⟩).

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Pauli matrices σ₁, σ₂, σ₃.
pub fn pauli() -> [Matrix2<C64>; 3] {
    let z = c(0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(z, c(1.0), c(1.0), z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(c(1.0), z, z, c(-1.0)),
    ]
}

/// Outcome of [`validate_state`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDiagnostics {
    pub hermiticity_residual: f64,
    pub trace_deviation: f64,
    pub min_eigenvalue: f64,
    pub passed: bool,
}

/// Checks the density-matrix invariants without constructing a state.
pub fn validate_state(rho: &Matrix4<C64>) -> StateDiagnostics {
    let hermiticity_residual = (rho - rho.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let trace = rho.trace();
    let trace_deviation = (trace - c(1.0)).norm();
    let min_eigenvalue = if rho.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        hermitian_eigenvalues(&((rho + rho.adjoint()) * c(0.5)))
            .map(|v| v.iter().cloned().fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let passed = hermiticity_residual <= HERMITIAN_TOL
        && trace_deviation <= TRACE_TOL
        && min_eigenvalue >= PSD_TOL;
    StateDiagnostics {
        hermiticity_residual,
        trace_deviation,
        min_eigenvalue,
        passed,
    }
}

/// Eigenvalues of a Hermitian matrix via the real symmetric embedding
/// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `h` with each value doubled.
fn hermitian_eigenvalues(h: &Matrix4<C64>) -> Result<Vec<f64>> {
    let embed = DMatrix::from_fn(8, 8, |i, j| {
        let z = h[(i % 4, j % 4)];
        match (i < 4, j < 4) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = linalg::symmetric_eigen(&embed)?;
    Ok(eig.values.iter().step_by(2).cloned().collect())
}

/// A validated 4×4 two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    /// Validates `rho` and stores its Hermitian part.
    pub fn new(rho: Matrix4<C64>) -> Result<Self> {
        let diag = validate_state(&rho);
        if diag.hermiticity_residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian(diag.hermiticity_residual));
        }
        if diag.trace_deviation > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace deviates from 1 by {:e}",
                diag.trace_deviation
            )));
        }
        if !(diag.min_eigenvalue >= PSD_TOL) {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {:e})",
                diag.min_eigenvalue
            )));
        }
        Ok(Self((rho + rho.adjoint()) * c(0.5)))
    }

    /// Builds ρ from row-major real and imaginary parts.
    pub fn from_parts(re: &[[f64; 4]; 4], im: &[[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| C64::new(re[i][j], im[i][j])))
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.0)
    }

    /// Tr[ρ O] for a Hermitian observable, real part only.
    pub fn expectation(&self, observable: &Matrix4<C64>) -> C64 {
        (self.0 * observable).trace()
    }

    /// p·ρ₁ + (1−p)·ρ₂.
    pub fn mixture(p: f64, first: &Self, second: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("mixing weight {p} outside [0, 1]")));
        }
        Self::new(first.0 * c(p) + second.0 * c(1.0 - p))
    }
}

/// Spin-correlation tensor `T_pq = Tr[ρ σ_p ⊗ σ_q]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCorrelationMatrix(Matrix3<f64>);

impl SpinCorrelationMatrix {
    pub fn new(t: Matrix3<f64>) -> Result<Self> {
        if t.iter().any(|x| !x.is_finite() || x.abs() > 1.0 + 1e-12) {
            return Err(Error::InvalidArgument(
                "spin-correlation entries must lie in [-1, 1]".into(),
            ));
        }
        Ok(Self(t))
    }

    /// T = −W·I₃, the Werner-state tensor.
    pub fn werner(w: f64) -> Result<Self> {
        check_werner(w)?;
        Ok(Self(Matrix3::identity() * -w))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        let t = DMatrix::from_fn(3, 3, |i, j| self.0[(i, j)]);
        Ok(linalg::singular_values(&t)?.iter().cloned().collect())
    }
}

/// Reduced Bloch vectors of the two parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochMarginals {
    pub alice: Vector3<f64>,
    pub bob: Vector3<f64>,
}

/// (|HV⟩ − |VH⟩)/√2.
pub fn singlet_vector() -> Vector4<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Vector4::new(c(0.0), c(s), c(-s), c(0.0))
}

pub fn pure_state(psi: &Vector4<C64>) -> Result<DensityMatrix> {
    check_normalized(psi)?;
    DensityMatrix::new(psi * psi.adjoint())
}

pub fn singlet_state() -> DensityMatrix {
    let psi = singlet_vector();
    DensityMatrix(psi * psi.adjoint())
}

pub fn maximally_mixed() -> DensityMatrix {
    DensityMatrix(Matrix4::identity() * c(0.25))
}

/// W·|ψ⁻⟩⟨ψ⁻| + (1−W)·I₄/4.
pub fn werner_state(w: f64) -> Result<DensityMatrix> {
    check_werner(w)?;
    Ok(DensityMatrix(
        singlet_state().0 * c(w) + maximally_mixed().0 * c(1.0 - w),
    ))
}

/// ρ_A ⊗ ρ_B with ρ = (I + r·σ)/2 for Bloch vectors of norm ≤ 1.
pub fn product_state(alice: &Vector3<f64>, bob: &Vector3<f64>) -> Result<DensityMatrix> {
    let qubit = |r: &Vector3<f64>| -> Result<Matrix2<C64>> {
        if r.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "Bloch vector norm {} exceeds 1",
                r.norm()
            )));
        }
        let s = pauli();
        Ok((Matrix2::identity() + s[0] * c(r.x) + s[1] * c(r.y) + s[2] * c(r.z)) * c(0.5))
    };
    DensityMatrix::new(qubit(alice)?.kronecker(&qubit(bob)?))
}

pub fn spin_correlation_matrix(rho: &DensityMatrix) -> Result<SpinCorrelationMatrix> {
    let s = pauli();
    let mut t = Matrix3::zeros();
    for p in 0..3 {
        for q in 0..3 {
            let value = rho.expectation(&s[p].kronecker(&s[q]));
            if value.im.abs() > 1e-12 {
                return Err(Error::NotHermitian(value.im.abs()));
            }
            t[(p, q)] = value.re;
        }
    }
    SpinCorrelationMatrix::new(t)
}

pub fn marginals(rho: &DensityMatrix) -> BlochMarginals {
    let s = pauli();
    let id = Matrix2::<C64>::identity();
    let alice = Vector3::from_fn(|p, _| rho.expectation(&s[p].kronecker(&id)).re);
    let bob = Vector3::from_fn(|q, _| rho.expectation(&id.kronecker(&s[q])).re);
    BlochMarginals { alice, bob }
}

/// F = ⟨ψ|ρ|ψ⟩ (squared-overlap convention).
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &Vector4<C64>) -> Result<f64> {
    check_normalized(psi)?;
    Ok((psi.adjoint() * rho.matrix() * psi)[(0, 0)].re)
}

/// W of the Werner state with singlet fidelity F, W = (4F − 1)/3.
///
/// Only approximate for a real source: it ignores every asymmetry of the
/// actual state.
pub fn closest_werner_parameter(fidelity: f64) -> f64 {
    (4.0 * fidelity - 1.0) / 3.0
}

fn check_werner(w: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::InvalidArgument(format!("Werner parameter {w} outside [0, 1]")));
    }
    Ok(())
}

fn check_normalized(psi: &Vector4<C64>) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("state vector norm {norm} is not 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_diff3(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
        (a - b).abs().max()
    }

    #[test]
    fn singlet_entries() {
        let rho = singlet_state();
        let m = rho.matrix();
        assert!((m[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((m[(2, 2)].re - 0.5).abs() < 1e-15);
        assert!((m[(1, 2)].re + 0.5).abs() < 1e-15);
        assert!((m[(2, 1)].re + 0.5).abs() < 1e-15);
        let others = [(0, 0), (3, 3), (0, 1), (0, 3), (3, 0), (1, 3)];
        for (i, j) in others {
            assert_eq!(m[(i, j)].norm(), 0.0);
        }
    }

    #[test]
    fn singlet_tensor_is_minus_identity() {
        let t = spin_correlation_matrix(&singlet_state()).unwrap();
        assert!(max_abs_diff3(t.matrix(), &(-Matrix3::identity())) < 1e-15);
        let marg = marginals(&singlet_state());
        assert!(marg.alice.norm() < 1e-15 && marg.bob.norm() < 1e-15);
    }

    #[test]
    fn werner_endpoints() {
        assert_eq!(werner_state(1.0).unwrap(), singlet_state());
        let noise = werner_state(0.0).unwrap();
        assert!((noise.matrix() - maximally_mixed().matrix()).norm() < 1e-15);
        let t = spin_correlation_matrix(&noise).unwrap();
        assert!(t.matrix().abs().max() < 1e-15);
    }

    #[test]
    fn werner_rejects_out_of_range() {
        assert!(werner_state(-0.01).is_err());
        assert!(werner_state(1.2).is_err());
        assert!(werner_state(f64::NAN).is_err());
    }

    #[test]
    fn werner_sweep_tensor_and_fidelity() {
        for i in 0..=10 {
            let w = i as f64 / 10.0;
            let rho = werner_state(w).unwrap();
            let t = spin_correlation_matrix(&rho).unwrap();
            assert!(max_abs_diff3(t.matrix(), &(Matrix3::identity() * -w)) < 1e-12);
            let f = fidelity_with_pure(&rho, &singlet_vector()).unwrap();
            assert!((f - (1.0 + 3.0 * w) / 4.0).abs() < 1e-12);
            let marg = marginals(&rho);
            assert!(marg.alice.norm() < 1e-12 && marg.bob.norm() < 1e-12);
        }
    }

    #[test]
    fn product_states_by_direct_trace() {
        let h = Vector3::new(0.0, 0.0, 1.0);
        let v = Vector3::new(0.0, 0.0, -1.0);
        let hh = product_state(&h, &h).unwrap();
        let t = spin_correlation_matrix(&hh).unwrap();
        assert!(max_abs_diff3(t.matrix(), &Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0))) < 1e-15);
        let hv = product_state(&h, &v).unwrap();
        let m = marginals(&hv);
        assert!((m.alice - h).norm() < 1e-15);
        assert!((m.bob - v).norm() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let psi = singlet_vector();
        assert!((fidelity_with_pure(&singlet_state(), &psi).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity_with_pure(&maximally_mixed(), &psi).unwrap() - 0.25).abs() < 1e-15);
        assert!(fidelity_with_pure(&singlet_state(), &(psi * c(1.1))).is_err());
    }

    #[test]
    fn validation_diagnostics() {
        assert!(validate_state(singlet_state().matrix()).passed);

        let mut broken = *singlet_state().matrix();
        broken[(0, 1)] = c(0.1);
        let d = validate_state(&broken);
        assert!(!d.passed);
        assert!(d.hermiticity_residual > 0.09);
        assert!(matches!(DensityMatrix::new(broken), Err(Error::NotHermitian(_))));

        let scaled = singlet_state().matrix() * c(1.1);
        let d = validate_state(&scaled);
        assert!(!d.passed);
        assert!((d.trace_deviation - 0.1).abs() < 1e-12);
        assert!(DensityMatrix::new(scaled).is_err());

        // unit trace but a negative eigenvalue
        let psi = singlet_vector();
        let negative = maximally_mixed().matrix() * c(2.0) - psi * psi.adjoint();
        let d = validate_state(&negative);
        assert!(d.min_eigenvalue < -0.4);
        assert!(!d.passed);
    }

    #[test]
    fn closest_werner_map() {
        assert!((closest_werner_parameter(1.0) - 1.0).abs() < 1e-15);
        assert!((closest_werner_parameter(0.25)).abs() < 1e-15);
        // a fidelity of 98.4% corresponds to W ≈ 0.9787, not 0.984
        assert!((closest_werner_parameter(0.984) - 0.978_666_666).abs() < 1e-8);
    }
}
