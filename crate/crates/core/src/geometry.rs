//! Measurement directions, frames, and rotations on the Bloch sphere.
//!
//! All angles are radians. The in-plane reference direction for a plane with
//! unit normal `n` is the normalized projection of ẑ onto the plane, or x̂ when
//! `n = ±ẑ`; for `n = ŷ` this makes the α = 0 pair {ẑ, x̂}.

use nalgebra::{DMatrix, Matrix3, Unit, UnitQuaternion, Vector3, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;

pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction(Vector3<f64>);

impl Direction {
    /// Normalizes `v`; fails for (near-)zero or non-finite input.
    pub fn new(v: Vector3<f64>) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::InvalidArgument(format!("cannot normalize direction {v:?}")));
        }
        Ok(Self(v / norm))
    }

    pub fn x() -> Self {
        Self(Vector3::x())
    }

    pub fn y() -> Self {
        Self(Vector3::y())
    }

    pub fn z() -> Self {
        Self(Vector3::z())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.dot(&other.0)
    }
}

/// An ordered set of 1–3 measurement directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementFrame {
    directions: Vec<Direction>,
    orthonormal: bool,
}

impl MeasurementFrame {
    pub fn new(directions: Vec<Direction>) -> Result<Self> {
        if directions.is_empty() || directions.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "a frame holds 1 to 3 directions, got {}",
                directions.len()
            )));
        }
        let orthonormal = directions.iter().enumerate().all(|(i, a)| {
            directions[i + 1..]
                .iter()
                .all(|b| a.dot(b).abs() <= ORTHONORMAL_TOL)
        });
        Ok(Self {
            directions,
            orthonormal,
        })
    }

    pub fn from_vectors(vectors: &[Vector3<f64>]) -> Result<Self> {
        Self::new(
            vectors
                .iter()
                .map(|v| Direction::new(*v))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Coordinate-axis frame used when only the number of settings is known:
    /// 1 → {ẑ}, 2 → {x̂, ẑ}, 3 → {x̂, ŷ, ẑ}.
    pub fn canonical(n: usize) -> Result<Self> {
        match n {
            1 => Self::new(vec![Direction::z()]),
            2 => Self::new(vec![Direction::x(), Direction::z()]),
            3 => Ok(standard_triad()),
            _ => Err(Error::InvalidArgument(format!("no canonical frame with {n} settings"))),
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// 3×m matrix whose columns are the directions.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(3, self.len(), |i, j| self.directions[j].0[i])
    }

    pub fn gram(&self) -> DMatrix<f64> {
        let a = self.matrix();
        a.transpose() * a
    }
}

/// A proper rotation of R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let orth = (m.transpose() * m - Matrix3::identity()).abs().max();
        let det = m.determinant();
        if orth > 1e-10 || (det - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "not a proper rotation (|RᵀR − I| = {orth:e}, det = {det})"
            )));
        }
        Ok(Self(m))
    }

    /// Right-handed rotation by `angle` about `axis`.
    pub fn about(axis: &Direction, angle: f64) -> Self {
        let q = UnitQuaternion::from_axis_angle(&Unit::new_unchecked(axis.0), angle);
        Self(*q.to_rotation_matrix().matrix())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn apply(&self, d: &Direction) -> Direction {
        // rotations preserve the norm; renormalize to keep |v| = 1 to rounding
        let v = self.0 * d.0;
        Direction(v / v.norm())
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation(self.0 * other.0)
    }
}

/// P = Σ aⱼaⱼᵀ, the projector onto the span of an orthonormal frame.
pub fn projection_matrix(frame: &MeasurementFrame) -> Result<Matrix3<f64>> {
    if !frame.is_orthonormal() {
        return Err(Error::NonOrthonormalFrame);
    }
    Ok(frame
        .directions()
        .iter()
        .map(|d| d.0 * d.0.transpose())
        .sum())
}

/// Deterministic α = 0 reference direction in the plane orthogonal to `normal`.
pub fn in_plane_reference(normal: &Direction) -> Direction {
    let n = normal.0;
    let projected = Vector3::z() - n * n.z;
    if projected.norm() < 1e-8 {
        let fallback = Vector3::x() - n * n.x;
        return Direction(fallback / fallback.norm());
    }
    Direction(projected / projected.norm())
}

/// Orthonormal pair in the plane ⊥ `normal`, rotated by `alpha` about `normal`
/// from the pair {r, n × r} where r is [`in_plane_reference`].
pub fn pair_in_plane(normal: &Direction, alpha: f64) -> MeasurementFrame {
    let r = in_plane_reference(normal);
    let s = Direction::new(normal.0.cross(&r.0)).expect("r is orthogonal to the normal");
    let rot = Rotation::about(normal, alpha);
    MeasurementFrame {
        directions: vec![rot.apply(&r), rot.apply(&s)],
        orthonormal: true,
    }
}

/// Alice's orthonormal pair in a plane at dihedral angle `phi` to Bob's plane.
///
/// Bob's plane is ⊥ `bob_plane_normal`. Alice's plane is obtained by tilting it
/// by `phi` about the intersection line, which is the in-plane reference of
/// Bob's plane; `alpha` is the angle from that line to Alice's first direction.
pub fn tilted_pair(phi: f64, alpha: f64, bob_plane_normal: &Direction) -> MeasurementFrame {
    let line = in_plane_reference(bob_plane_normal);
    let alice_normal = Rotation::about(&line, phi).apply(bob_plane_normal);
    let across = Direction::new(alice_normal.0.cross(&line.0)).expect("line lies in both planes");
    let (s, c) = alpha.sin_cos();
    let a1 = line.0 * c + across.0 * s;
    let a2 = -line.0 * s + across.0 * c;
    MeasurementFrame {
        directions: vec![Direction(a1 / a1.norm()), Direction(a2 / a2.norm())],
        orthonormal: true,
    }
}

/// Unit normal of the plane spanned by a two-direction frame.
pub fn plane_normal(frame: &MeasurementFrame) -> Result<Direction> {
    if frame.len() != 2 {
        return Err(Error::InvalidArgument("a plane needs exactly two directions".into()));
    }
    Direction::new(frame.directions[0].0.cross(&frame.directions[1].0))
}

pub fn standard_triad() -> MeasurementFrame {
    MeasurementFrame {
        directions: vec![Direction::x(), Direction::y(), Direction::z()],
        orthonormal: true,
    }
}

/// Orthogonal triad strongly misaligned with {x̂, ŷ, ẑ}.
pub fn misaligned_triad() -> MeasurementFrame {
    let r3 = 3f64.sqrt();
    let r12 = 12f64.sqrt();
    let vectors = [
        Vector3::new(1.0, 1.0, 1.0) / r3,
        Vector3::new((1.0 + r3) / r12, -2.0 / r12, (1.0 - r3) / r12),
        Vector3::new((1.0 - r3) / r12, -2.0 / r12, (1.0 + r3) / r12),
    ];
    MeasurementFrame::new(vectors.iter().map(|v| Direction(*v)).collect())
        .expect("three directions")
}

/// Three directions at mutual 60° which, with the origin, form a regular tetrahedron.
pub fn tetrahedron_frame() -> MeasurementFrame {
    let r3 = 3f64.sqrt();
    let vectors = [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(0.5, 1.0 / (2.0 * r3), (2.0f64 / 3.0).sqrt()),
        Vector3::new(0.5, r3 / 2.0, 0.0),
    ];
    MeasurementFrame::new(vectors.iter().map(|v| Direction(*v)).collect())
        .expect("three directions")
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
pub fn random_rotation(seed: u64) -> Rotation {
    random_rotation_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_rotation_with<R: rand::Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let q = Vector4::<f64>::from_fn(|_, _| StandardNormal.sample(rng));
        let norm = q.norm();
        if norm > 1e-6 {
            let quat = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from_vector(q / norm));
            return Rotation(*quat.to_rotation_matrix().matrix());
        }
    }
}

/// Uniform random direction.
pub fn random_direction_with<R: rand::Rng + ?Sized>(rng: &mut R) -> Direction {
    loop {
        let v = Vector3::<f64>::from_fn(|_, _| StandardNormal.sample(rng));
        if let Ok(d) = Direction::new(v) {
            return d;
        }
    }
}

pub fn rotate_frame(frame: &MeasurementFrame, rotation: &Rotation) -> MeasurementFrame {
    MeasurementFrame {
        directions: frame.directions.iter().map(|d| rotation.apply(d)).collect(),
        orthonormal: frame.orthonormal,
    }
}

/// Orthonormal basis of the range of a rank-2 orthogonal projector.
pub fn plane_basis(projector: &Matrix3<f64>) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let sym = DMatrix::from_fn(3, 3, |i, j| projector[(i, j)]);
    if (projector - projector.transpose()).abs().max() > 1e-10
        || (projector * projector - projector).abs().max() > 1e-10
    {
        return Err(Error::InvalidArgument("matrix is not an orthogonal projector".into()));
    }
    let eig = linalg::symmetric_eigen(&sym)?;
    let rank = eig.values.iter().filter(|&&l| l > 0.5).count();
    if rank != 2 {
        return Err(Error::InvalidArgument(format!(
            "plane projector must have rank 2, got rank {rank}"
        )));
    }
    let col = |j: usize| Vector3::new(eig.vectors[(0, j)], eig.vectors[(1, j)], eig.vectors[(2, j)]);
    Ok((col(0), col(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: &Vector3<f64>, b: &Vector3<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn projectors_of_named_frames() {
        let p = projection_matrix(&standard_triad()).unwrap();
        assert!((p - Matrix3::identity()).abs().max() < 1e-15);
        let xz = MeasurementFrame::new(vec![Direction::x(), Direction::z()]).unwrap();
        let p = projection_matrix(&xz).unwrap();
        assert_eq!(p, Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 1.0)));
        let p = projection_matrix(&misaligned_triad()).unwrap();
        assert!((p - Matrix3::identity()).abs().max() < 1e-12);
    }

    #[test]
    fn nonorthonormal_projector_rejected() {
        assert!(matches!(
            projection_matrix(&tetrahedron_frame()),
            Err(Error::NonOrthonormalFrame)
        ));
    }

    #[test]
    fn frame_size_limits() {
        assert!(MeasurementFrame::new(vec![]).is_err());
        let four = vec![Direction::x(); 4];
        assert!(MeasurementFrame::new(four).is_err());
    }

    #[test]
    fn pair_convention_anchor() {
        let f = pair_in_plane(&Direction::y(), 0.0);
        assert!(close(f.directions()[0].vector(), &Vector3::z(), 1e-15));
        assert!(close(f.directions()[1].vector(), &Vector3::x(), 1e-15));
        let f = pair_in_plane(&Direction::y(), FRAC_PI_2);
        assert!(close(f.directions()[0].vector(), &Vector3::x(), 1e-15));
        assert!(close(f.directions()[1].vector(), &-Vector3::z(), 1e-15));
    }

    #[test]
    fn reference_falls_back_to_x_for_z_normal() {
        let r = in_plane_reference(&Direction::z());
        assert_eq!(*r.vector(), Vector3::x());
        let r = in_plane_reference(&Direction::new(-Vector3::z()).unwrap());
        assert_eq!(*r.vector(), Vector3::x());
    }

    #[test]
    fn pair_stays_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let alpha = rand::Rng::random_range(&mut rng, -2.0 * PI..2.0 * PI);
            let f = pair_in_plane(&Direction::y(), alpha);
            let g = f.gram();
            assert!((g - DMatrix::identity(2, 2)).abs().max() < 1e-12);
            assert!(f.is_orthonormal());
        }
    }

    #[test]
    fn tilted_pair_geometry() {
        let n = Direction::y();
        for alpha in [0.0, 0.3, 1.1] {
            let coplanar = tilted_pair(0.0, alpha, &n);
            for d in coplanar.directions() {
                assert!(d.vector().y.abs() < 1e-15);
            }
            let plain = pair_in_plane(&n, alpha);
            let diff = projection_matrix(&coplanar).unwrap() - projection_matrix(&plain).unwrap();
            assert!(diff.abs().max() < 1e-10);

            let perpendicular = tilted_pair(FRAC_PI_2, alpha, &n);
            for d in perpendicular.directions() {
                assert!(d.vector().x.abs() < 1e-15, "Φ=90° frame must lie in the z–y plane");
            }

            let tilted = tilted_pair(64f64.to_radians(), alpha, &n);
            let normal = plane_normal(&tilted).unwrap();
            let angle = normal.dot(&n).abs().acos();
            assert!((angle - 64f64.to_radians()).abs() < 1e-10);
            // α is measured from the intersection line (ẑ here)
            assert!((tilted.directions()[0].vector().z - alpha.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn misaligned_triad_is_orthonormal() {
        let f = misaligned_triad();
        assert!(f.is_orthonormal());
        assert!((f.gram() - DMatrix::identity(3, 3)).abs().max() < 1e-12);
        assert!((f.directions()[0].vector().x - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((f.directions()[0].vector().x - 0.5774).abs() < 1e-4);
    }

    #[test]
    fn tetrahedron_gram() {
        let f = tetrahedron_frame();
        assert!(!f.is_orthonormal());
        let g = f.gram();
        for i in 0..3 {
            assert!((g[(i, i)] - 1.0).abs() < 1e-12);
            for j in 0..3 {
                if i != j {
                    assert!((g[(i, j)] - 0.5).abs() < 1e-12);
                }
            }
        }
        let eig = linalg::symmetric_eigen(&g).unwrap();
        assert!((eig.values[0] - 2.0).abs() < 1e-12);
        assert!((eig.values[1] - 0.5).abs() < 1e-12);
        assert!((eig.values[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_rotations_are_orthogonal_and_reproducible() {
        for seed in 0..1000 {
            let r = random_rotation(seed);
            let m = r.matrix();
            assert!((m.transpose() * m - Matrix3::identity()).abs().max() < 1e-10);
            assert!((m.determinant() - 1.0).abs() < 1e-10);
        }
        assert_eq!(random_rotation(42), random_rotation(42));
        assert_ne!(random_rotation(42), random_rotation(43));
    }

    #[test]
    fn rotation_preserves_gram() {
        for (k, frame) in [standard_triad(), misaligned_triad(), tetrahedron_frame(), tilted_pair(0.4, 0.2, &Direction::y())]
            .iter()
            .enumerate()
        {
            let rotated = rotate_frame(frame, &random_rotation(k as u64));
            assert!((rotated.gram() - frame.gram()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation::new(Matrix3::identity()).is_ok());
        assert!(Rotation::new(-Matrix3::identity()).is_err());
        assert!(Rotation::new(Matrix3::identity() * 2.0).is_err());
    }

    #[test]
    fn plane_basis_of_xz() {
        let p = Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 1.0));
        let (e1, e2) = plane_basis(&p).unwrap();
        assert!(e1.y.abs() < 1e-15 && e2.y.abs() < 1e-15);
        assert!(e1.dot(&e2).abs() < 1e-15);
        assert!(plane_basis(&Matrix3::identity()).is_err());
    }
}
