use nalgebra::Matrix4;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;
use steering::geometry::{self, MeasurementFrame};
use steering::quantum::{self, DensityMatrix, SpinCorrelationMatrix};

/// ρ = GG†/Tr with complex Gaussian G: full rank, generic marginals.
pub fn random_state<R: Rng>(rng: &mut R) -> DensityMatrix {
    let g = Matrix4::<C64>::from_fn(|_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = g * g.adjoint();
    let tr = rho.trace();
    DensityMatrix::new(rho / tr).expect("GG† is a state")
}

pub fn random_tensor<R: Rng>(rng: &mut R) -> SpinCorrelationMatrix {
    quantum::spin_correlation_matrix(&random_state(rng)).unwrap()
}

pub fn random_pair<R: Rng>(rng: &mut R) -> MeasurementFrame {
    let normal = geometry::random_direction_with(rng);
    geometry::pair_in_plane(&normal, rng.random_range(0.0..std::f64::consts::TAU))
}

pub fn random_triad<R: Rng>(rng: &mut R) -> MeasurementFrame {
    let r = geometry::random_rotation_with(rng);
    geometry::rotate_frame(&geometry::standard_triad(), &r)
}
