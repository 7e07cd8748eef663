use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::config::{FrameSpec, StateSpec};
use crate::error::{Error, Result};
use crate::quantum;
use crate::steering::{self, Inequality};

use super::{estimate_correlation, propagate_uncertainty, simulate_counts, SourceModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub alpha_deg: Vec<f64>,
}

/// One experimental configuration, optionally swept over Alice's in-plane
/// angle α. The sweep angle and `phi_deg` apply to an Alice frame of kind
/// `pair`; other frames stay fixed across rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub state: StateSpec,
    pub alice_frame: FrameSpec,
    pub bob_frame: FrameSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<f64>,
    pub pairs_per_setting: u64,
    #[serde(default = "default_sys_angle_deg")]
    pub sys_angle_deg: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequalities: Option<Vec<Inequality>>,
    /// Standard deviation of the per-row depolarizing jitter; off when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift_sigma: Option<f64>,
    #[serde(default = "default_resamples")]
    pub n_resamples: usize,
}

fn default_sys_angle_deg() -> f64 {
    0.5
}

fn default_resamples() -> usize {
    200
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Coplanar Werner pairs in the x–z plane swept over eleven α values.
    pub fn example() -> Self {
        Self {
            state: StateSpec::Werner { w: 0.985 },
            alice_frame: FrameSpec::Pair {
                normal: [0.0, 1.0, 0.0],
                phi_deg: None,
                alpha_deg: None,
            },
            bob_frame: FrameSpec::Pair {
                normal: [0.0, 1.0, 0.0],
                phi_deg: None,
                alpha_deg: None,
            },
            sweep: Some(Sweep {
                alpha_deg: vec![0.0, 10.0, 20.0, 30.0, 40.0, 45.0, 50.0, 60.0, 70.0, 80.0, 90.0],
            }),
            phi_deg: Some(0.0),
            pairs_per_setting: 100_000,
            sys_angle_deg: default_sys_angle_deg(),
            seed: 1,
            inequalities: Some(vec![Inequality::Ris, Inequality::Nss]),
            drift_sigma: None,
            n_resamples: default_resamples(),
        }
    }

    fn alphas(&self) -> Vec<f64> {
        self.sweep
            .as_ref()
            .map_or_else(|| vec![0.0], |s| s.alpha_deg.clone())
    }

    fn validate(&self) -> Result<()> {
        if self.pairs_per_setting == 0 {
            return Err(Error::Config("pairs_per_setting must be at least 1".into()));
        }
        if !(self.sys_angle_deg >= 0.0 && self.sys_angle_deg.is_finite()) {
            return Err(Error::Config("sys_angle_deg must be finite and ≥ 0".into()));
        }
        if self.n_resamples < 2 {
            return Err(Error::Config("n_resamples must be at least 2".into()));
        }
        if let Some(s) = &self.sweep {
            if s.alpha_deg.is_empty() || s.alpha_deg.iter().any(|a| !a.is_finite()) {
                return Err(Error::Config("sweep.alpha_deg must be a nonempty list of finite angles".into()));
            }
        }
        Ok(())
    }
}

/// One sweep point. Simulated values are the parameter at `M̂`; errors are
/// bootstrap standard deviations; `*_violated` compares the simulated value
/// with the bound. Columns of inequalities not evaluated are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub alpha_deg: f64,
    pub ris_pred: Option<f64>,
    pub ris_sim: Option<f64>,
    pub ris_err: Option<f64>,
    pub nss_pred: Option<f64>,
    pub nss_sim: Option<f64>,
    pub nss_err: Option<f64>,
    pub ris_bound: Option<f64>,
    pub nss_bound: Option<f64>,
    pub ris_violated: Option<bool>,
    pub nss_violated: Option<bool>,
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(base: u64, index: u64) -> u64 {
    mix(base ^ mix(index))
}

pub fn run_scenario(scenario: &Scenario) -> Result<Vec<ScenarioRow>> {
    scenario.validate()?;
    let state = scenario
        .state
        .build()
        .map_err(|e| Error::Config(format!("state: {e}")))?;
    let t = quantum::spin_correlation_matrix(&state)?;
    let source = SourceModel::new(state, scenario.pairs_per_setting, scenario.drift_sigma)
        .map_err(|e| Error::Config(e.to_string()))?;
    let bob = scenario.bob_frame.build()?;
    let sys_angle = scenario.sys_angle_deg.to_radians();

    let mut rows = Vec::new();
    for (index, alpha) in scenario.alphas().into_iter().enumerate() {
        let alice = if scenario.alice_frame.is_pair() {
            scenario.alice_frame.build_with(Some(alpha), scenario.phi_deg)?
        } else {
            scenario.alice_frame.build()?
        };
        let inequalities = match &scenario.inequalities {
            Some(list) => list.clone(),
            None if alice.len() == 2 => vec![Inequality::Ris, Inequality::Nss],
            None => vec![Inequality::Ris],
        };
        if inequalities.contains(&Inequality::Nss) && alice.len() != 2 {
            return Err(Error::Config(format!(
                "nss needs exactly two Alice settings, the frame has {}",
                alice.len()
            )));
        }

        let predicted = steering::predicted_correlation(&t, &alice, &bob);
        let seed = derive_seed(scenario.seed, index as u64);
        let counts = simulate_counts(&source, &alice, &bob, seed)?;
        let est = estimate_correlation(&counts, sys_angle, Some(&t))?;

        let mut row = ScenarioRow {
            alpha_deg: alpha,
            ris_pred: None,
            ris_sim: None,
            ris_err: None,
            nss_pred: None,
            nss_sim: None,
            nss_err: None,
            ris_bound: None,
            nss_bound: None,
            ris_violated: None,
            nss_violated: None,
        };
        for (k, inequality) in inequalities.iter().enumerate() {
            let u = propagate_uncertainty(
                &est,
                *inequality,
                scenario.n_resamples,
                derive_seed(seed, k as u64 + 1),
            )?;
            match inequality {
                Inequality::Ris => {
                    let a = steering::assess_ris(&predicted)?;
                    row.ris_pred = Some(a.parameter);
                    row.ris_sim = Some(u.value);
                    row.ris_err = Some(u.uncertainty);
                    row.ris_bound = Some(a.bound);
                    row.ris_violated = Some(u.value > a.bound);
                }
                Inequality::Nss => {
                    let a = steering::assess_nss(&predicted)?;
                    row.nss_pred = Some(a.parameter);
                    row.nss_sim = Some(u.value);
                    row.nss_err = Some(u.uncertainty);
                    row.nss_bound = Some(a.bound);
                    row.nss_violated = Some(u.value > a.bound);
                }
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes rows with a header line; floats use shortest round-trip formatting.
pub fn write_csv<W: Write>(rows: &[ScenarioRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record([
            "alpha_deg", "ris_pred", "ris_sim", "ris_err", "nss_pred", "nss_sim", "nss_err",
            "ris_bound", "nss_bound", "ris_violated", "nss_violated",
        ])
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<ScenarioRow>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Io(e.to_string())))
        .collect()
}
