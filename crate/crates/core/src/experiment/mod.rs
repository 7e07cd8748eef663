//! Finite-statistics simulation of the two-party photon-counting experiment.

mod scenario;

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal, Poisson, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Direction, MeasurementFrame};
use crate::quantum::{self, pauli, DensityMatrix, SpinCorrelationMatrix, C64};
use crate::steering::{self, serialize_rows, CorrelationMatrix, Inequality};

pub use scenario::{read_csv, run_scenario, write_csv, Scenario, ScenarioRow, Sweep};

/// Source of polarization-entangled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    state: DensityMatrix,
    pairs_per_setting: u64,
    drift: Option<f64>,
}

impl SourceModel {
    /// `drift` is the standard deviation of a per-run depolarizing jitter
    /// `ρ → λρ + (1 − λ)I/4`, `λ ~ N(1, drift²)` clamped to keep ρ physical.
    pub fn new(state: DensityMatrix, pairs_per_setting: u64, drift: Option<f64>) -> Result<Self> {
        if pairs_per_setting == 0 {
            return Err(Error::InvalidArgument("pairs_per_setting must be at least 1".into()));
        }
        if let Some(sigma) = drift {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("drift {sigma} must be finite and ≥ 0")));
            }
        }
        Ok(Self {
            state,
            pairs_per_setting,
            drift,
        })
    }

    pub fn werner(w: f64, pairs_per_setting: u64) -> Result<Self> {
        Self::new(quantum::werner_state(w)?, pairs_per_setting, None)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn pairs_per_setting(&self) -> u64 {
        self.pairs_per_setting
    }

    pub fn drift(&self) -> Option<f64> {
        self.drift
    }

    fn drifted_state(&self, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
        let Some(sigma) = self.drift.filter(|s| *s > 0.0) else {
            return Ok(self.state.clone());
        };
        let z: f64 = StandardNormal.sample(rng);
        let min_eig = self.state.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
        // λe + (1 − λ)/4 ≥ 0 for the smallest eigenvalue e
        let upper = if min_eig < 0.25 {
            0.25 / (0.25 - min_eig)
        } else {
            f64::INFINITY
        };
        let lambda = (1.0 + sigma * z).clamp(0.0, upper);
        let noise = quantum::maximally_mixed();
        DensityMatrix::new(
            self.state.matrix() * C64::new(lambda, 0.0) + noise.matrix() * C64::new(1.0 - lambda, 0.0),
        )
    }
}

/// Coincidence counts per setting pair, ordered (++, +−, −+, −−).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountsRecord {
    pub alice: MeasurementFrame,
    pub bob: MeasurementFrame,
    pub counts: Vec<Vec<[u64; 4]>>,
    pub seed: u64,
}

impl CountsRecord {
    pub fn new(
        alice: MeasurementFrame,
        bob: MeasurementFrame,
        counts: Vec<Vec<[u64; 4]>>,
        seed: u64,
    ) -> Result<Self> {
        if counts.len() != alice.len() || counts.iter().any(|r| r.len() != bob.len()) {
            return Err(Error::Dimension(format!(
                "counts must be {}x{} setting pairs",
                alice.len(),
                bob.len()
            )));
        }
        Ok(Self {
            alice,
            bob,
            counts,
            seed,
        })
    }
}

fn projector(v: &Vector3<f64>, sign: f64) -> Matrix2<C64> {
    let s = pauli();
    let vs = s[0] * C64::new(v.x, 0.0) + s[1] * C64::new(v.y, 0.0) + s[2] * C64::new(v.z, 0.0);
    (Matrix2::identity() + vs * C64::new(sign, 0.0)) * C64::new(0.5, 0.0)
}

/// Born-rule probabilities `Tr[ρ (Π_a^± ⊗ Π_b^±)]` ordered (++, +−, −+, −−).
pub fn outcome_probabilities(rho: &DensityMatrix, a: &Direction, b: &Direction) -> [f64; 4] {
    let mut p = [0.0; 4];
    let signs = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)];
    for (slot, (sa, sb)) in p.iter_mut().zip(signs) {
        let op: Matrix4<C64> = projector(a.vector(), sa).kronecker(&projector(b.vector(), sb));
        *slot = rho.expectation(&op).re.max(0.0);
    }
    p
}

/// Poisson total per setting pair, split multinomially over the four outcomes.
pub fn simulate_counts(
    source: &SourceModel,
    alice: &MeasurementFrame,
    bob: &MeasurementFrame,
    seed: u64,
) -> Result<CountsRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = source.drifted_state(&mut rng)?;
    let poisson = Poisson::new(source.pairs_per_setting as f64)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut counts = Vec::with_capacity(alice.len());
    for a in alice.directions() {
        let mut row = Vec::with_capacity(bob.len());
        for b in bob.directions() {
            let p = outcome_probabilities(&rho, a, b);
            let total = poisson.sample(&mut rng) as u64;
            row.push(multinomial(total, &p, &mut rng)?);
        }
        counts.push(row);
    }
    CountsRecord::new(alice.clone(), bob.clone(), counts, seed)
}

fn multinomial(total: u64, p: &[f64; 4], rng: &mut ChaCha8Rng) -> Result<[u64; 4]> {
    let mut out = [0u64; 4];
    let mut remaining = total;
    let mut mass: f64 = p.iter().sum();
    for i in 0..3 {
        let q = if mass > 0.0 { (p[i] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let draw = Binomial::new(remaining, q)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(rng);
        out[i] = draw;
        remaining -= draw;
        mass -= p[i];
    }
    out[3] = remaining;
    Ok(out)
}

/// `M̂` with its uncertainty split into systematic and statistical parts,
/// `delta² = sys² + stat²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedCorrelation {
    pub m_hat: CorrelationMatrix,
    #[serde(serialize_with = "serialize_rows")]
    pub delta: DMatrix<f64>,
    #[serde(serialize_with = "serialize_rows")]
    pub sys: DMatrix<f64>,
    #[serde(serialize_with = "serialize_rows")]
    pub stat: DMatrix<f64>,
}

/// Estimates `M̂_jk = (N₊₊ + N₋₋ − N₊₋ − N₋₊)/N` with `stat = √((1 − M̂²)/N)`.
///
/// The systematic part is the largest change of `a_jᵀ T b_k` when `b_k` is
/// tilted by `sys_angle` towards either side of its two transverse axes,
/// with `T` taken from `reference`. It is required whenever `sys_angle > 0`.
pub fn estimate_correlation(
    counts: &CountsRecord,
    sys_angle: f64,
    reference: Option<&SpinCorrelationMatrix>,
) -> Result<EstimatedCorrelation> {
    if !(sys_angle >= 0.0 && sys_angle.is_finite()) {
        return Err(Error::InvalidArgument(format!("sys_angle {sys_angle} must be finite and ≥ 0")));
    }
    let (m, n) = (counts.alice.len(), counts.bob.len());
    let mut m_hat = DMatrix::zeros(m, n);
    let mut stat = DMatrix::zeros(m, n);
    let mut sys = DMatrix::zeros(m, n);
    for j in 0..m {
        for k in 0..n {
            let [pp, pm, mp, mm] = counts.counts[j][k];
            let total = pp + pm + mp + mm;
            if total == 0 {
                return Err(Error::InvalidArgument(format!(
                    "no coincidences recorded for setting pair ({j}, {k})"
                )));
            }
            let e = ((pp + mm) as f64 - (pm + mp) as f64) / total as f64;
            m_hat[(j, k)] = e;
            stat[(j, k)] = ((1.0 - e * e).max(0.0) / total as f64).sqrt();
        }
    }
    if sys_angle > 0.0 {
        let t = reference.ok_or_else(|| {
            Error::InvalidArgument("a reference correlation tensor is needed for sys_angle > 0".into())
        })?;
        for (k, b) in counts.bob.directions().iter().enumerate() {
            let tilted = tilts(b.vector(), sys_angle);
            for (j, a) in counts.alice.directions().iter().enumerate() {
                let ta = t.matrix().transpose() * a.vector();
                let base = ta.dot(b.vector());
                sys[(j, k)] = tilted
                    .iter()
                    .map(|bp| (ta.dot(bp) - base).abs())
                    .fold(0.0, f64::max);
            }
        }
    }
    let delta = sys.zip_map(&stat, |s: f64, t: f64| s.hypot(t));
    Ok(EstimatedCorrelation {
        m_hat: CorrelationMatrix::new(m_hat)?,
        delta,
        sys,
        stat,
    })
}

fn tilts(b: &Vector3<f64>, angle: f64) -> [Vector3<f64>; 4] {
    let helper = if b.x.abs() <= b.y.abs() && b.x.abs() <= b.z.abs() {
        Vector3::x()
    } else if b.y.abs() <= b.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let e1 = b.cross(&helper).normalize();
    let e2 = b.cross(&e1);
    let (s, c) = angle.sin_cos();
    [b * c + e1 * s, b * c - e1 * s, b * c + e2 * s, b * c - e2 * s]
}

/// Steering parameter from an estimate with bootstrap uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UncertainParameter {
    pub inequality: Inequality,
    /// Parameter evaluated at `M̂`.
    pub value: f64,
    pub bootstrap_mean: f64,
    pub uncertainty: f64,
    pub n_resamples: usize,
}

/// Parametric bootstrap: each entry redrawn from `N(M̂_jk, delta_jk²)` and
/// clamped to [−1, 1]; reports the standard deviation of the parameter.
pub fn propagate_uncertainty(
    est: &EstimatedCorrelation,
    inequality: Inequality,
    n_resamples: usize,
    seed: u64,
) -> Result<UncertainParameter> {
    if n_resamples < 2 {
        return Err(Error::InvalidArgument("at least 2 bootstrap resamples are needed".into()));
    }
    let parameter = |m: &CorrelationMatrix| match inequality {
        Inequality::Ris => steering::trace_norm(m),
        Inequality::Nss => steering::nss_parameter(m),
    };
    let value = parameter(&est.m_hat)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = est.m_hat.matrix();
    let mut samples = Vec::with_capacity(n_resamples);
    for _ in 0..n_resamples {
        let mut draw = base.clone();
        for (x, d) in draw.iter_mut().zip(est.delta.iter()) {
            if *d > 0.0 {
                let normal = Normal::new(*x, *d).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                *x = normal.sample(&mut rng).clamp(-1.0, 1.0);
            }
        }
        samples.push(parameter(&CorrelationMatrix::new(draw)?)?);
    }
    // shifted by the first sample so identical draws give exactly zero spread
    let shift = samples[0];
    let offset = samples.iter().map(|s| s - shift).sum::<f64>() / n_resamples as f64;
    let mean = shift + offset;
    let var = samples.iter().map(|s| (s - shift - offset).powi(2)).sum::<f64>()
        / (n_resamples - 1) as f64;
    Ok(UncertainParameter {
        inequality,
        value,
        bootstrap_mean: mean,
        uncertainty: var.sqrt(),
        n_resamples,
    })
}
