mod common;

use nalgebra::Matrix3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_pair, random_state, random_tensor, random_triad};
use steering::experiment::{
    estimate_correlation, outcome_probabilities, read_csv, run_scenario, simulate_counts,
    write_csv, Scenario, SourceModel,
};
use steering::geometry::{self, standard_triad};
use steering::lhs::{lhs_membership, SphereGrid};
use steering::quantum::{self, DensityMatrix, SpinCorrelationMatrix};
use steering::steering::{nss_predicted, predicted_correlation, ris_predicted, trace_norm, CorrelationMatrix};
use steering::Error;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_linear_in_the_state(seed: u64, p in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (r1, r2) = (random_state(&mut rng), random_state(&mut rng));
        let mixed = DensityMatrix::mixture(p, &r1, &r2).unwrap();
        let t = quantum::spin_correlation_matrix(&mixed).unwrap();
        let t1 = quantum::spin_correlation_matrix(&r1).unwrap();
        let t2 = quantum::spin_correlation_matrix(&r2).unwrap();
        let expected = t1.matrix() * p + t2.matrix() * (1.0 - p);
        prop_assert!((t.matrix() - expected).abs().max() < 1e-13);
    }

    #[test]
    fn triad_trace_norm_is_rotation_invariant(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tensor(&mut rng);
        let reference = ris_predicted(&t, &standard_triad(), &standard_triad()).unwrap();
        let (a, b) = (random_triad(&mut rng), random_triad(&mut rng));
        let m = predicted_correlation(&t, &a, &b);
        prop_assert!((trace_norm(&m).unwrap() - reference).abs() < 1e-12);
        prop_assert!((ris_predicted(&t, &a, &b).unwrap() - reference).abs() < 1e-12);
    }

    #[test]
    fn nss_dominates_ris(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_tensor(&mut rng);
        let (a, b) = (random_pair(&mut rng), random_pair(&mut rng));
        let nss = nss_predicted(&t, &a, &b).unwrap();
        let ris = ris_predicted(&t, &a, &b).unwrap();
        prop_assert!(nss >= ris - 1e-10, "nss {nss} < ris {ris}");
    }

    #[test]
    fn frame_projectors_are_idempotent(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for frame in [random_pair(&mut rng), random_triad(&mut rng)] {
            let p = geometry::projection_matrix(&frame).unwrap();
            prop_assert!((p * p - p).abs().max() < 1e-13);
            prop_assert!((p - p.transpose()).abs().max() < 1e-15);
            prop_assert!((p.trace() - frame.len() as f64).abs() < 1e-13);
        }
        let triad = random_triad(&mut rng);
        let p = geometry::projection_matrix(&triad).unwrap();
        prop_assert!((p - Matrix3::identity()).abs().max() < 1e-13);
    }
}

#[test]
fn born_rule_matches_the_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let rho = random_state(&mut rng);
        let t = quantum::spin_correlation_matrix(&rho).unwrap();
        let a = geometry::random_direction_with(&mut rng);
        let b = geometry::random_direction_with(&mut rng);
        let [pp, pm, mp, mm] = outcome_probabilities(&rho, &a, &b);
        assert!((pp + pm + mp + mm - 1.0).abs() < 1e-12);
        let e = pp - pm - mp + mm;
        let atb = a.vector().dot(&(t.matrix() * b.vector()));
        assert!((e - atb).abs() < 1e-12, "{e} vs {atb}");
    }
}

#[test]
fn estimator_is_consistent() {
    let t = SpinCorrelationMatrix::werner(0.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alice = random_triad(&mut rng);
    let bob = random_triad(&mut rng);
    let truth = predicted_correlation(&t, &alice, &bob);

    let mut mean_max_error = Vec::new();
    for pairs in [1_000u64, 10_000, 100_000, 1_000_000] {
        let source = SourceModel::werner(0.9, pairs).unwrap();
        let mut total = 0.0;
        for seed in 0..20 {
            let counts = simulate_counts(&source, &alice, &bob, seed).unwrap();
            let est = estimate_correlation(&counts, 0.0, None).unwrap();
            total += (est.m_hat.matrix() - truth.matrix()).abs().max();
        }
        mean_max_error.push(total / 20.0);
    }
    assert!(mean_max_error.windows(2).all(|w| w[1] < w[0]), "{mean_max_error:?}");

    let source = SourceModel::werner(0.9, 100_000).unwrap();
    let (mut inside, mut entries) = (0, 0);
    for seed in 0..100 {
        let counts = simulate_counts(&source, &alice, &bob, 1000 + seed).unwrap();
        let est = estimate_correlation(&counts, 0.0, None).unwrap();
        for ((x, m), s) in est.m_hat.matrix().iter().zip(truth.matrix().iter()).zip(est.stat.iter()) {
            entries += 1;
            if (x - m).abs() < 3.0 * s {
                inside += 1;
            }
        }
    }
    assert!(inside as f64 >= 0.99 * entries as f64, "{inside}/{entries}");
}

#[test]
fn uncertainties_add_in_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_state(&mut rng);
    let t = quantum::spin_correlation_matrix(&rho).unwrap();
    let source = SourceModel::new(rho, 5_000, None).unwrap();
    let (alice, bob) = (random_triad(&mut rng), random_pair(&mut rng));
    let counts = simulate_counts(&source, &alice, &bob, 9).unwrap();
    let est = estimate_correlation(&counts, 0.5f64.to_radians(), Some(&t)).unwrap();
    for ((d, s), st) in est.delta.iter().zip(est.sys.iter()).zip(est.stat.iter()) {
        assert!((d * d - (s * s + st * st)).abs() <= 4.0 * f64::EPSILON * d * d);
    }
    assert!(est.sys.iter().any(|&s| s > 0.0));
}

#[test]
fn scenario_tables_are_byte_identical_and_round_trip() {
    let mut scenario = Scenario::example();
    scenario.pairs_per_setting = 3_000;
    scenario.n_resamples = 20;
    let render = |s: &Scenario| {
        let mut out = Vec::new();
        write_csv(&run_scenario(s).unwrap(), &mut out).unwrap();
        out
    };
    let bytes = render(&scenario);
    assert_eq!(bytes, render(&scenario));

    let rows = read_csv(bytes.as_slice()).unwrap();
    assert_eq!(rows, run_scenario(&scenario).unwrap());
    for r in &rows {
        assert_eq!(r.ris_violated, Some(r.ris_sim.unwrap() > r.ris_bound.unwrap()));
        assert_eq!(r.nss_violated, Some(r.nss_sim.unwrap() > r.nss_bound.unwrap()));
    }

    scenario.seed += 1;
    assert_ne!(bytes, render(&scenario));
}

fn gauge(m: &CorrelationMatrix, grid: &SphereGrid) -> f64 {
    match lhs_membership(m, grid, 1e-7) {
        Ok(v) => v.gauge,
        Err(Error::Indeterminate { gauge, .. }) => gauge,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn gauge_shrinks_under_nested_grid_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grids: Vec<SphereGrid> = [40.0, 20.0, 10.0, 5.0, 1.0]
        .iter()
        .map(|&s| SphereGrid::circle(s).unwrap())
        .collect();
    for _ in 0..20 {
        let rows: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.random_range(-0.8..0.8)).collect())
            .collect();
        let m = CorrelationMatrix::from_rows(&rows).unwrap();
        let gauges: Vec<f64> = grids.iter().map(|g| gauge(&m, g)).collect();
        assert!(gauges.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{gauges:?}");
    }
}
