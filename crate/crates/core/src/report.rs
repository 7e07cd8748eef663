//! Side-by-side comparison of published experimental values with ideal-model
//! predictions and finite-statistics simulations.

use std::f64::consts::SQRT_2;
use std::io::Write;

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{estimate_correlation, propagate_uncertainty, simulate_counts, SourceModel};
use crate::geometry::{self, Direction, MeasurementFrame};
use crate::quantum::{self, closest_werner_parameter};
use crate::steering::{self, Inequality};

/// Largest |published − predicted| still counted as reproduced.
pub const REPRODUCTION_TOL: f64 = 0.015;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproductionRow {
    pub case: String,
    pub quantity: String,
    pub published: Option<f64>,
    pub predicted: f64,
    pub simulated: Option<f64>,
    pub simulated_err: Option<f64>,
    pub bound: Option<f64>,
    pub reproducible: bool,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub pairs_per_setting: u64,
    pub sys_angle_deg: f64,
    pub n_resamples: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    /// About 10³ pairs per setting gives ±0.01 bootstrap errors on triad
    /// parameters, the size of the published error bars.
    fn default() -> Self {
        Self {
            pairs_per_setting: 1_000,
            sys_angle_deg: 0.5,
            n_resamples: 200,
            seed: 2024,
        }
    }
}

struct Setup {
    case: &'static str,
    quantity: &'static str,
    inequality: Inequality,
    w: f64,
    alice: MeasurementFrame,
    bob: MeasurementFrame,
    published: Option<f64>,
    /// Forced annotation for values the ideal model cannot explain.
    unreproducible: Option<String>,
    note: String,
    drift: Option<f64>,
}

fn pair(normal: Vector3<f64>, phi_deg: f64, alpha_deg: f64) -> MeasurementFrame {
    let n = Direction::new(normal).expect("nonzero normal");
    geometry::tilted_pair(phi_deg.to_radians(), alpha_deg.to_radians(), &n)
}

fn xz() -> MeasurementFrame {
    MeasurementFrame::new(vec![Direction::x(), Direction::z()]).expect("two directions")
}

/// α in [0°, 45°] at which the Werner NSS value equals √2, if it crosses.
pub fn nss_crossing_deg(w: f64, phi: f64) -> Result<Option<f64>> {
    let f = |a: f64| -> Result<f64> { Ok(steering::werner_nss_closed_form(w, phi, a)? - SQRT_2) };
    let (mut lo, mut hi) = (0.0, 45f64.to_radians());
    if f(lo)?.signum() == f(hi)?.signum() {
        return Ok(None);
    }
    let lo_sign = f(lo)?.signum();
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid)?.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some((0.5 * (lo + hi)).to_degrees()))
}

fn setups() -> Result<Vec<Setup>> {
    let y = Vector3::y();
    let w_case3 = 0.984;
    let w_case3_misaligned = closest_werner_parameter(0.96);
    let w_case4 = closest_werner_parameter(0.972);
    let case4_alice = MeasurementFrame::from_vectors(&[
        Vector3::z(),
        Vector3::new(60f64.to_radians().sin(), 0.0, 60f64.to_radians().cos()),
    ])?;
    let singlet_case4 = steering::trace_norm(&steering::predicted_correlation(
        &quantum::SpinCorrelationMatrix::werner(1.0)?,
        &case4_alice,
        &xz(),
    ))?;
    let standard = geometry::standard_triad;
    let rows = vec![
        Setup {
            case: "Case 1, phi = 0",
            quantity: "RIS, alpha = 0",
            inequality: Inequality::Ris,
            w: 0.985,
            alice: pair(y, 0.0, 0.0),
            bob: pair(y, 0.0, 0.0),
            published: Some(1.97),
            unreproducible: None,
            note: "W = 0.985; flat in alpha".into(),
            drift: None,
        },
        Setup {
            case: "Case 1, phi = 0",
            quantity: "NSS, alpha = 45",
            inequality: Inequality::Nss,
            w: 0.985,
            alice: pair(y, 0.0, 45.0),
            bob: pair(y, 0.0, 0.0),
            published: Some(1.97),
            unreproducible: None,
            note: "W = 0.985; equal to RIS for coplanar pairs".into(),
            drift: None,
        },
        Setup {
            case: "Case 1, phi = 0",
            quantity: "RIS, dip near alpha = 70",
            inequality: Inequality::Ris,
            w: 0.985,
            alice: pair(y, 0.0, 70.0),
            bob: pair(y, 0.0, 0.0),
            published: None,
            unreproducible: Some(
                "not reproducible from ideal model (real-state asymmetry); the ideal value is \
                 alpha-independent, simulation uses source drift sigma = 0.02"
                    .into(),
            ),
            note: String::new(),
            drift: Some(0.02),
        },
        Setup {
            case: "Case 2, phi = 64",
            quantity: "RIS, alpha = 0",
            inequality: Inequality::Ris,
            w: 0.973,
            alice: pair(y, 64.0, 0.0),
            bob: pair(y, 0.0, 0.0),
            published: Some(1.40),
            unreproducible: None,
            note: "W = 0.973; below the bound sqrt(2)".into(),
            drift: None,
        },
        Setup {
            case: "Case 2, phi = 90",
            quantity: "NSS, alpha = 45 (largest)",
            inequality: Inequality::Nss,
            w: 0.973,
            alice: pair(y, 90.0, 45.0),
            bob: pair(y, 0.0, 0.0),
            published: None,
            unreproducible: None,
            note: "no violation at any alpha, as published; W = 0.973 assumed".into(),
            drift: None,
        },
        Setup {
            case: "Case 3, aligned triads",
            quantity: "RIS, Werner maximum",
            inequality: Inequality::Ris,
            w: w_case3,
            alice: standard(),
            bob: standard(),
            published: Some(2.95),
            unreproducible: None,
            note: "W = 0.984 (published fidelity 98.4% would give W = 0.9787)".into(),
            drift: None,
        },
        Setup {
            case: "Case 3, aligned triads",
            quantity: "RIS, measured",
            inequality: Inequality::Ris,
            w: w_case3,
            alice: standard(),
            bob: standard(),
            published: Some(2.93),
            unreproducible: Some(
                "not reproducible from ideal model (real-state asymmetry): 2.93 vs 2.95".into(),
            ),
            note: String::new(),
            drift: None,
        },
        Setup {
            case: "Case 3, subset m=2 (x, z), n=3",
            quantity: "RIS, m=2 n=3",
            inequality: Inequality::Ris,
            w: w_case3,
            alice: xz(),
            bob: standard(),
            published: Some(1.96),
            unreproducible: None,
            note: "bound is sqrt(m) = sqrt(2); the published text quotes sqrt(3)".into(),
            drift: None,
        },
        Setup {
            case: "Case 3, subset m=3, n=2 (x, z)",
            quantity: "RIS",
            inequality: Inequality::Ris,
            w: w_case3,
            alice: standard(),
            bob: xz(),
            published: Some(1.97),
            unreproducible: None,
            note: "bound sqrt(3)".into(),
            drift: None,
        },
        Setup {
            case: "Case 3, misaligned triad",
            quantity: "RIS",
            inequality: Inequality::Ris,
            w: w_case3_misaligned,
            alice: geometry::misaligned_triad(),
            bob: standard(),
            published: Some(2.21),
            unreproducible: Some(format!(
                "not reproducible from ideal model (real-state asymmetry); Werner RIS is \
                 rotation invariant, 3W with W = {w_case3_misaligned:.4} from fidelity 96%"
            )),
            note: String::new(),
            drift: None,
        },
        Setup {
            case: "Case 4, 60 deg pair vs (x, z)",
            quantity: "RIS",
            inequality: Inequality::Ris,
            w: w_case4,
            alice: case4_alice.clone(),
            bob: xz(),
            published: Some(1.85),
            unreproducible: Some(format!(
                "state-limited, not an ideal-model reproduction; singlet gives {singlet_case4:.5}, \
                 Werner W = {w_case4:.5} from fidelity 97.2%"
            )),
            note: String::new(),
            drift: None,
        },
        Setup {
            case: "Case 4, 60 deg pair vs (x, z)",
            quantity: "NSS",
            inequality: Inequality::Nss,
            w: w_case4,
            alice: case4_alice,
            bob: xz(),
            published: Some(1.96),
            unreproducible: Some(
                "not reproducible from ideal model (real-state asymmetry); for this frame the \
                 Werner NSS equals the Werner RIS"
                    .into(),
            ),
            note: String::new(),
            drift: None,
        },
        Setup {
            case: "Case 4, tetrahedron vs triad",
            quantity: "RIS",
            inequality: Inequality::Ris,
            w: 0.97,
            alice: geometry::tetrahedron_frame(),
            bob: standard(),
            published: Some(2.74),
            unreproducible: None,
            note: "W = 0.97; 2 sqrt(2) W".into(),
            drift: None,
        },
    ];
    Ok(rows)
}

pub fn reproduction_table(options: &ReportOptions) -> Result<Vec<ReproductionRow>> {
    let mut out = Vec::new();
    for (index, s) in setups()?.into_iter().enumerate() {
        let t = quantum::SpinCorrelationMatrix::werner(s.w)?;
        let m = steering::predicted_correlation(&t, &s.alice, &s.bob);
        let assessment = match s.inequality {
            Inequality::Ris => steering::assess_ris(&m)?,
            Inequality::Nss => steering::assess_nss(&m)?,
        };
        let source = SourceModel::new(quantum::werner_state(s.w)?, options.pairs_per_setting, s.drift)?;
        let seed = options.seed.wrapping_add(index as u64);
        let counts = simulate_counts(&source, &s.alice, &s.bob, seed)?;
        let est = estimate_correlation(&counts, options.sys_angle_deg.to_radians(), Some(&t))?;
        let u = propagate_uncertainty(&est, s.inequality, options.n_resamples, seed)?;
        let (reproducible, note) = match (s.unreproducible, s.published) {
            (Some(why), _) => (false, why),
            (None, Some(p)) => ((p - assessment.parameter).abs() <= REPRODUCTION_TOL, s.note),
            (None, None) => (!assessment.violated, s.note),
        };
        out.push(ReproductionRow {
            case: s.case.into(),
            quantity: s.quantity.into(),
            published: s.published,
            predicted: assessment.parameter,
            simulated: Some(u.value),
            simulated_err: Some(u.uncertainty),
            bound: Some(assessment.bound),
            reproducible,
            note,
        });
    }

    // NSS violation window in Case 2 (published: alpha < 20 and alpha > 70)
    let w = 0.973;
    let crossing = nss_crossing_deg(w, 64f64.to_radians())?.unwrap_or(f64::NAN);
    out.push(ReproductionRow {
        case: "Case 2, phi = 64".into(),
        quantity: "NSS violation edge alpha (deg)".into(),
        published: Some(20.0),
        predicted: crossing,
        simulated: None,
        simulated_err: None,
        bound: None,
        reproducible: false,
        note: format!(
            "oscillation reproduced qualitatively: Werner W = {w} violates for alpha < {crossing:.1} \
             and alpha > {:.1}; the published window edges 20 and 70 reflect the real state",
            90.0 - crossing
        ),
    });
    Ok(out)
}

pub fn write_csv<W: Write>(rows: &[ReproductionRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

/// `x` with 6 significant digits.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Plain-text table, one row per comparison.
pub fn render_table(rows: &[ReproductionRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), sig6);
    let header = [
        "case", "quantity", "published", "predicted", "simulated", "bound", "reproducible", "note",
    ];
    let body: Vec<[String; 8]> = rows
        .iter()
        .map(|r| {
            let sim = match (r.simulated, r.simulated_err) {
                (Some(v), Some(e)) => format!("{} ± {}", sig6(v), sig6(e)),
                (Some(v), None) => sig6(v),
                _ => "-".into(),
            };
            [
                r.case.clone(),
                r.quantity.clone(),
                opt(r.published),
                sig6(r.predicted),
                sim,
                opt(r.bound),
                if r.reproducible { "yes" } else { "no" }.into(),
                r.note.clone(),
            ]
        })
        .collect();
    let mut widths = header.map(|h| h.chars().count());
    for row in &body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i + 1 == cells.len() {
                    c.clone()
                } else {
                    format!("{c:<w$}")
                }
            })
            .collect::<Vec<_>>()
            .join(" | ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&header.map(String::from));
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("-+-"));
    out.push('\n');
    for row in &body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
