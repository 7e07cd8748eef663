//! Local-hidden-state membership by linear programming over a discretized
//! Bob sphere.
//!
//! An LHS correlation matrix is a convex combination of extreme points
//! `a·cᵀ` with `a ∈ {±1}^m` and `|c| ≤ 1`. The oracle computes the gauge
//! `t = min Σw s.t. Σ w_i·a_i c_iᵀ = M, w ≥ 0` over grid points `c_i`. The
//! grid hull sits inside the true LHS set, so `t ≤ 1` proves membership. When
//! `t > 1` the LP dual `G` is rescaled by its maximum over the continuous set,
//! `max_a |Gᵀa|`, which turns it into a separator valid for every LHS model.

mod grid;
pub mod simplex;

use nalgebra::{DMatrix, DVector, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::MeasurementFrame;
use crate::linalg;
use crate::steering::CorrelationMatrix;

pub use grid::{GridResolution, SphereGrid};

pub const DEFAULT_TOL: f64 = 1e-7;
const REVERIFY_TOL: f64 = 1e-6;
const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhsAtom {
    pub weight: f64,
    pub alice_response: Vec<f64>,
    pub bob_bloch: Vector3<f64>,
}

/// Finite mixture of deterministic Alice responses and Bob hidden states,
/// together with the Bob measurement directions it is evaluated against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhsModel {
    bob_frame: MeasurementFrame,
    atoms: Vec<LhsAtom>,
}

impl LhsModel {
    pub fn new(bob_frame: MeasurementFrame, atoms: Vec<LhsAtom>) -> Result<Self> {
        let m = atoms.first().map_or(0, |a| a.alice_response.len());
        if atoms.is_empty() || !(1..=3).contains(&m) {
            return Err(Error::InvalidArgument(
                "an LHS model needs at least one atom with 1 to 3 Alice responses".into(),
            ));
        }
        for atom in &atoms {
            if atom.alice_response.len() != m {
                return Err(Error::Dimension("atoms disagree on the number of Alice settings".into()));
            }
            if !(atom.weight >= 0.0) {
                return Err(Error::InvalidArgument(format!("negative weight {}", atom.weight)));
            }
            if atom.alice_response.iter().any(|x| !(x.abs() <= 1.0)) {
                return Err(Error::InvalidArgument("Alice response outside [-1, 1]".into()));
            }
            if !(atom.bob_bloch.norm() <= 1.0 + 1e-12) {
                return Err(Error::InvalidArgument(format!(
                    "Bob Bloch vector of length {} outside the unit ball",
                    atom.bob_bloch.norm()
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { bob_frame, atoms })
    }

    pub fn atoms(&self) -> &[LhsAtom] {
        &self.atoms
    }

    pub fn bob_frame(&self) -> &MeasurementFrame {
        &self.bob_frame
    }

    pub fn alice_settings(&self) -> usize {
        self.atoms[0].alice_response.len()
    }
}

/// `M_jk = Σ w·a_j·(s·b_k)`.
pub fn evaluate_lhs_model(model: &LhsModel) -> Result<CorrelationMatrix> {
    let m = model.alice_settings();
    let bob = model.bob_frame.directions();
    let out = DMatrix::from_fn(m, bob.len(), |j, k| {
        model
            .atoms
            .iter()
            .map(|at| at.weight * at.alice_response[j] * at.bob_bloch.dot(bob[k].vector()))
            .sum()
    });
    CorrelationMatrix::new(out)
}

fn sign_vectors(m: usize) -> Vec<Vec<f64>> {
    (0..1usize << m)
        .map(|bits| {
            (0..m)
                .map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect()
}

/// All `a·cᵀ` for `a ∈ {±1}^m` and `c` in the grid.
pub fn lhs_extreme_points(m: usize, grid: &SphereGrid) -> Result<Vec<DMatrix<f64>>> {
    if !(1..=3).contains(&m) {
        return Err(Error::Dimension(format!("{m} Alice settings; expected 1 to 3")));
    }
    let signs = sign_vectors(m);
    Ok(signs
        .iter()
        .flat_map(|a| {
            grid.points()
                .iter()
                .map(move |c| DMatrix::from_fn(m, c.len(), |j, k| a[j] * c[k]))
        })
        .collect())
}

/// Largest trace norm over the discretized extreme points.
pub fn max_lhs_trace_norm(m: usize, n: usize, grid: &SphereGrid) -> Result<f64> {
    if grid.dim() != n {
        return Err(Error::Dimension(format!(
            "grid lives in R^{} but {n} Bob settings were requested",
            grid.dim()
        )));
    }
    lhs_extreme_points(m, grid)?
        .iter()
        .map(linalg::trace_norm)
        .try_fold(0.0f64, |acc, v| v.map(|v| acc.max(v)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipStatus {
    Feasible,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Model(LhsModel),
    /// `G` scores at most 1 on every LHS correlation matrix in the
    /// continuous set and `1 + gap` on the target.
    Separator {
        matrix: Vec<Vec<f64>>,
        /// Largest score of the unnormalized LP dual over grid extreme points.
        grid_max_score: f64,
        /// Largest score over the continuous extreme points, used to normalize.
        continuous_max_score: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub status: MembershipStatus,
    /// Optimal gauge value over the grid polytope.
    pub gauge: f64,
    /// `1 − gauge` when feasible; `⟨G,M⟩ − 1` for the normalized separator.
    pub gap: f64,
    pub grid: GridResolution,
    pub certificate: Certificate,
}

impl MembershipVerdict {
    pub fn is_feasible(&self) -> bool {
        self.status == MembershipStatus::Feasible
    }

    /// Independent check of the certificate against `target` and the grid it
    /// was computed on.
    pub fn verify(&self, target: &CorrelationMatrix, grid: &SphereGrid) -> Result<bool> {
        match &self.certificate {
            Certificate::Model(model) => {
                let got = evaluate_lhs_model(model)?;
                Ok(got.matrix().shape() == target.matrix().shape()
                    && (got.matrix() - target.matrix()).abs().max() <= REVERIFY_TOL)
            }
            Certificate::Separator { matrix, .. } => {
                let g = rows_to_matrix(matrix)?;
                let score_m = g.dot(target.matrix());
                let grid_ok = lhs_extreme_points(target.rows(), grid)?
                    .iter()
                    .all(|x| g.dot(x) <= 1.0 + REVERIFY_TOL);
                let continuous_ok = continuous_max_score(&g) <= 1.0 + REVERIFY_TOL;
                Ok(score_m > 1.0 && grid_ok && continuous_ok)
            }
        }
    }
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("ragged separator".into()));
    }
    Ok(DMatrix::from_fn(m, n, |j, k| rows[j][k]))
}

/// `max_{a ∈ {±1}^m, |c| ≤ 1} ⟨G, a·cᵀ⟩ = max_a |Gᵀa|`.
fn continuous_max_score(g: &DMatrix<f64>) -> f64 {
    sign_vectors(g.nrows())
        .iter()
        .map(|a| (g.transpose() * DVector::from_column_slice(a)).norm())
        .fold(0.0, f64::max)
}

/// Membership test with Bob's canonical frame ({ẑ}, {x̂, ẑ}, {x̂, ŷ, ẑ}).
pub fn lhs_membership(
    target: &CorrelationMatrix,
    grid: &SphereGrid,
    tol: f64,
) -> Result<MembershipVerdict> {
    let bob = MeasurementFrame::canonical(target.cols())?;
    lhs_membership_in_frame(target, &bob, grid, tol)
}

/// Membership test for correlations measured against an orthonormal Bob frame.
pub fn lhs_membership_in_frame(
    target: &CorrelationMatrix,
    bob: &MeasurementFrame,
    grid: &SphereGrid,
    tol: f64,
) -> Result<MembershipVerdict> {
    let (m, n) = target.matrix().shape();
    if bob.len() != n || grid.dim() != n {
        return Err(Error::Dimension(format!(
            "target has {n} Bob columns, frame has {}, grid lives in R^{}",
            bob.len(),
            grid.dim()
        )));
    }
    if !bob.is_orthonormal() {
        return Err(Error::NonOrthonormalFrame);
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be finite and ≥ 0")));
    }

    let signs = sign_vectors(m);
    let mut columns = Vec::with_capacity(signs.len() * grid.len());
    let mut origin = Vec::with_capacity(columns.capacity());
    for (ai, a) in signs.iter().enumerate() {
        for (ci, c) in grid.points().iter().enumerate() {
            columns.push((0..m * n).map(|idx| a[idx / n] * c[idx % n]).collect::<Vec<f64>>());
            origin.push((ai, ci));
        }
    }
    let rhs: Vec<f64> = (0..m * n).map(|idx| target.get(idx / n, idx % n)).collect();
    let cost = vec![1.0; columns.len()];
    let solution = simplex::solve(&columns, &cost, &rhs)?;

    if solution.status == simplex::LpStatus::Infeasible {
        // target lies outside the span of the grid columns
        let g = DMatrix::from_row_slice(m, n, &solution.dual);
        return Err(Error::Indeterminate {
            gauge: f64::INFINITY,
            continuous_bound: continuous_max_score(&g),
        });
    }

    let gauge = solution.objective;
    if gauge <= 1.0 + tol {
        let model = build_model(bob, &signs, grid, &origin, &solution.primal, gauge, m, n)?;
        let verdict = MembershipVerdict {
            status: MembershipStatus::Feasible,
            gauge,
            gap: 1.0 - gauge,
            grid: grid.resolution(),
            certificate: Certificate::Model(model),
        };
        if !verdict.verify(target, grid)? {
            return Err(Error::Lp("LHS model failed to reproduce the target".into()));
        }
        return Ok(verdict);
    }

    let g = DMatrix::from_row_slice(m, n, &solution.dual);
    let score = g.dot(target.matrix());
    let grid_max = columns
        .iter()
        .map(|c| c.iter().zip(&solution.dual).map(|(x, y)| x * y).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let continuous = continuous_max_score(&g);
    if !(continuous > 0.0) || score <= continuous * (1.0 + tol) {
        return Err(Error::Indeterminate {
            gauge,
            continuous_bound: continuous,
        });
    }
    let normalized = &g / continuous;
    Ok(MembershipVerdict {
        status: MembershipStatus::Infeasible,
        gauge,
        gap: score / continuous - 1.0,
        grid: grid.resolution(),
        certificate: Certificate::Separator {
            matrix: normalized
                .row_iter()
                .map(|r| r.iter().cloned().collect())
                .collect(),
            grid_max_score: grid_max,
            continuous_max_score: continuous,
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn build_model(
    bob: &MeasurementFrame,
    signs: &[Vec<f64>],
    grid: &SphereGrid,
    origin: &[(usize, usize)],
    primal: &[(usize, f64)],
    gauge: f64,
    m: usize,
    n: usize,
) -> Result<LhsModel> {
    let bob_vector = |c: &DVector<f64>| -> Vector3<f64> {
        bob.directions()
            .iter()
            .zip(c.iter())
            .map(|(d, ck)| d.vector() * *ck)
            .sum()
    };
    let mut atoms: Vec<(f64, Vec<f64>, Vector3<f64>)> = Vec::new();
    // a gauge slightly above 1 is accepted within tolerance and rescaled
    let scale = gauge.max(1.0);
    for &(col, w) in primal {
        let (ai, ci) = origin[col];
        atoms.push((w / scale, signs[ai].clone(), bob_vector(&grid.points()[ci])));
    }
    let slack = 1.0 - gauge / scale;
    if slack > 0.0 {
        let c = bob_vector(&grid.points()[0]);
        atoms.push((slack / 2.0, signs[0].clone(), c));
        atoms.push((slack / 2.0, signs[0].clone(), -c));
    }
    let points: Vec<DVector<f64>> = atoms
        .iter()
        .map(|(_, a, s)| {
            let c: Vec<f64> = bob.directions().iter().map(|d| d.vector().dot(s)).collect();
            DVector::from_iterator(m * n, (0..m * n).map(|idx| a[idx / n] * c[idx % n]))
        })
        .collect();
    let weights = caratheodory(&points, atoms.iter().map(|a| a.0).collect());
    let atoms = atoms
        .into_iter()
        .zip(weights)
        .filter(|(_, w)| *w > 0.0)
        .map(|((_, alice_response, bob_bloch), weight)| LhsAtom {
            weight,
            alice_response,
            bob_bloch,
        })
        .collect();
    LhsModel::new(bob.clone(), renormalize(atoms))
}

fn renormalize(mut atoms: Vec<LhsAtom>) -> Vec<LhsAtom> {
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    for a in &mut atoms {
        a.weight /= total;
    }
    atoms
}

/// Reduces the support of a convex combination of points in R^d to at most
/// d + 1 atoms without changing the combination. Returns the new weights
/// (zero for removed atoms).
fn caratheodory(points: &[DVector<f64>], mut weights: Vec<f64>) -> Vec<f64> {
    let d = points.first().map_or(0, |p| p.len());
    loop {
        let active: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
        if active.len() <= d + 1 {
            return weights;
        }
        // affine dependence: Σ λ_i (p_i, 1) = 0
        let a = DMatrix::from_fn(d + 1, active.len(), |r, c| {
            if r < d {
                points[active[c]][r]
            } else {
                1.0
            }
        });
        let Some(lambda) = null_vector(a) else {
            return weights;
        };
        let theta = active
            .iter()
            .zip(&lambda)
            .filter(|(_, l)| **l > 1e-14)
            .map(|(&i, l)| weights[i] / l)
            .fold(f64::INFINITY, f64::min);
        if !theta.is_finite() {
            return weights;
        }
        let mut removed = false;
        for (&i, l) in active.iter().zip(&lambda) {
            weights[i] -= theta * l;
            if *l > 1e-14 && weights[i] <= 1e-15 * (1.0 + theta * l) {
                if !removed {
                    weights[i] = 0.0;
                    removed = true;
                } else {
                    weights[i] = weights[i].max(0.0);
                }
            }
            if weights[i] < 0.0 {
                weights[i] = 0.0;
            }
        }
        if !removed {
            return weights;
        }
    }
}

/// Nonzero vector in the kernel of a wide matrix, by Gaussian elimination
/// with partial pivoting.
fn null_vector(mut a: DMatrix<f64>) -> Option<Vec<f64>> {
    let (rows, cols) = a.shape();
    let scale = a.abs().max().max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= 1e-12 * scale {
            continue;
        }
        a.swap_rows(r, p);
        let pv = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= pv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut lambda = vec![0.0; cols];
    lambda[free] = 1.0;
    for (row, &pc) in pivots.iter().enumerate() {
        lambda[pc] = -a[(row, free)];
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn cm(rows: &[&[f64]]) -> CorrelationMatrix {
        CorrelationMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn xz() -> MeasurementFrame {
        MeasurementFrame::new(vec![Direction::x(), Direction::z()]).unwrap()
    }

    #[test]
    fn extreme_point_examples() {
        let grid = SphereGrid::circle(90.0).unwrap();
        let pts = lhs_extreme_points(2, &grid).unwrap();
        assert_eq!(pts.len(), 4 * 4);
        assert_eq!(pts[0], DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]));
        assert!((linalg::trace_norm(&pts[0]).unwrap() - SQRT_2).abs() < 1e-15);

        let fine = SphereGrid::circle(5.0).unwrap();
        for p in lhs_extreme_points(3, &fine).unwrap() {
            assert!(linalg::trace_norm(&p).unwrap() <= 3f64.sqrt() + 1e-12);
        }
        let ones = lhs_extreme_points(1, &fine).unwrap();
        assert!(ones.iter().all(|p| p.nrows() == 1 && p.norm() <= 1.0 + 1e-12));
        assert!(lhs_extreme_points(4, &fine).is_err());
    }

    #[test]
    fn evaluate_model_examples() {
        let atom = |w: f64, a: Vec<f64>, s: Vector3<f64>| LhsAtom {
            weight: w,
            alice_response: a,
            bob_bloch: s,
        };
        let model = LhsModel::new(xz(), vec![atom(1.0, vec![1.0, 1.0], Vector3::z())]).unwrap();
        let m = evaluate_lhs_model(&model).unwrap();
        assert_eq!(m.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]));

        let model = LhsModel::new(
            xz(),
            vec![
                atom(0.5, vec![1.0, -1.0], Vector3::x()),
                atom(0.5, vec![-1.0, 1.0], Vector3::x()),
            ],
        )
        .unwrap();
        assert_eq!(evaluate_lhs_model(&model).unwrap().matrix().norm(), 0.0);

        assert!(LhsModel::new(xz(), vec![atom(0.9, vec![1.0, 1.0], Vector3::z())]).is_err());
        assert!(LhsModel::new(xz(), vec![atom(1.0, vec![1.0, 1.0], Vector3::z() * 2.0)]).is_err());
        assert!(LhsModel::new(xz(), vec![atom(1.0, vec![1.5, 1.0], Vector3::z())]).is_err());
    }

    #[test]
    fn membership_examples() {
        let grid = SphereGrid::circle(1.0).unwrap();
        let w = FRAC_1_SQRT_2 - 0.05;
        let inside = cm(&[&[-w, 0.0], &[0.0, -w]]);
        let v = lhs_membership(&inside, &grid, DEFAULT_TOL).unwrap();
        assert!(v.is_feasible());
        assert!(v.verify(&inside, &grid).unwrap());
        if let Certificate::Model(model) = &v.certificate {
            assert!(model.atoms().len() <= 5);
        }

        let outside = cm(&[&[-0.8, 0.0], &[0.0, -0.8]]);
        let v = lhs_membership(&outside, &grid, DEFAULT_TOL).unwrap();
        assert_eq!(v.status, MembershipStatus::Infeasible);
        assert!(v.gap > 0.0);
        assert!(v.verify(&outside, &grid).unwrap());

        let zero = cm(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let v = lhs_membership(&zero, &grid, DEFAULT_TOL).unwrap();
        assert!(v.is_feasible());
        if let Certificate::Model(model) = &v.certificate {
            assert_eq!(model.atoms().len(), 2);
            assert_eq!(
                model.atoms()[0].alice_response,
                model.atoms()[1].alice_response
            );
            assert_eq!(model.atoms()[0].bob_bloch, -model.atoms()[1].bob_bloch);
        }
        assert!(v.verify(&zero, &grid).unwrap());
    }

    #[test]
    fn boundary_within_grid_gap_is_indeterminate() {
        // NSS exactly √2 sits between the grid polytope and the true set
        let coarse = SphereGrid::circle(30.0).unwrap();
        let t = FRAC_1_SQRT_2 * 0.995;
        let edge = cm(&[&[-t, 0.0], &[0.0, -t]]);
        match lhs_membership(&edge, &coarse, DEFAULT_TOL) {
            Err(Error::Indeterminate { gauge, continuous_bound }) => {
                assert!(gauge > 1.0);
                assert!(continuous_bound > 0.0);
            }
            other => panic!("expected indeterminate, got {other:?}"),
        }
    }

    #[test]
    fn one_and_three_dimensional_membership() {
        let interval = SphereGrid::interval();
        let m = cm(&[&[0.3], &[-0.9]]);
        assert!(lhs_membership(&m, &interval, DEFAULT_TOL).unwrap().is_feasible());

        let sphere = SphereGrid::fibonacci_with_lattice(500).unwrap();
        let w = 0.5;
        let m = cm(&[&[-w, 0.0, 0.0], &[0.0, -w, 0.0], &[0.0, 0.0, -w]]);
        let v = lhs_membership(&m, &sphere, DEFAULT_TOL).unwrap();
        assert!(v.is_feasible());
        assert!(v.verify(&m, &sphere).unwrap());
        if let Certificate::Model(model) = &v.certificate {
            assert!(model.atoms().len() <= 10);
        }
        let w = 0.9;
        let m = cm(&[&[-w, 0.0, 0.0], &[0.0, -w, 0.0], &[0.0, 0.0, -w]]);
        let v = lhs_membership(&m, &sphere, DEFAULT_TOL).unwrap();
        assert!(!v.is_feasible());
        assert!(v.verify(&m, &sphere).unwrap());
    }

    #[test]
    fn max_trace_norm_examples() {
        let v = max_lhs_trace_norm(2, 2, &SphereGrid::circle(1.0).unwrap()).unwrap();
        assert!((v - SQRT_2).abs() < 1e-6);
        assert!((max_lhs_trace_norm(1, 1, &SphereGrid::interval()).unwrap() - 1.0).abs() < 1e-15);
        assert!(max_lhs_trace_norm(2, 3, &SphereGrid::circle(1.0).unwrap()).is_err());
    }

    #[test]
    fn rejects_non_orthonormal_bob_frame() {
        let skew = MeasurementFrame::from_vectors(&[Vector3::x(), Vector3::new(1.0, 0.0, 1.0)]).unwrap();
        let m = cm(&[&[0.1, 0.0], &[0.0, 0.1]]);
        assert!(matches!(
            lhs_membership_in_frame(&m, &skew, &SphereGrid::circle(1.0).unwrap(), DEFAULT_TOL),
            Err(Error::NonOrthonormalFrame)
        ));
    }

    #[test]
    fn caratheodory_keeps_the_combination() {
        let pts: Vec<DVector<f64>> = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]]
            .iter()
            .map(|p| DVector::from_column_slice(p))
            .collect();
        let w = vec![0.2; 5];
        let target: DVector<f64> = pts.iter().zip(&w).map(|(p, w)| p * *w).sum();
        let pruned = caratheodory(&pts, w);
        assert!(pruned.iter().filter(|w| **w > 0.0).count() <= 3);
        assert!((pruned.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let got: DVector<f64> = pts.iter().zip(&pruned).map(|(p, w)| p * *w).sum();
        assert!((got - target).norm() < 1e-12);
    }
}
