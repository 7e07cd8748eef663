//! JSON specifications for states and measurement frames.
//!
//! ```json
//! {"kind": "werner", "W": 0.985}
//! {"kind": "werner_fidelity", "F": 0.984}
//! {"kind": "matrix", "re": [[...], ...], "im": [[...], ...]}
//!
//! {"kind": "named", "name": "standard_triad"}
//! {"kind": "pair", "normal": [0, 1, 0], "phi_deg": 64, "alpha_deg": 30}
//! {"kind": "explicit", "directions": [[1, 0, 0], [0, 0, 1]]}
//! ```

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Direction, MeasurementFrame};
use crate::quantum::{self, DensityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Werner {
        #[serde(rename = "W")]
        w: f64,
    },
    /// Werner state whose singlet fidelity is F, i.e. W = (4F − 1)/3.
    WernerFidelity {
        #[serde(rename = "F")]
        f: f64,
    },
    Matrix {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::Werner { w } => quantum::werner_state(*w),
            StateSpec::WernerFidelity { f } => {
                if !(0.25..=1.0).contains(f) {
                    return Err(Error::Config(format!(
                        "fidelity {f} outside [0.25, 1] has no Werner equivalent"
                    )));
                }
                quantum::werner_state(quantum::closest_werner_parameter(*f).clamp(0.0, 1.0))
            }
            StateSpec::Matrix { re, im } => {
                DensityMatrix::from_parts(&square4(re, "re")?, &square4(im, "im")?)
            }
        }
    }
}

fn square4(rows: &[Vec<f64>], name: &str) -> Result<[[f64; 4]; 4]> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(Error::Config(format!("`{name}` must be a 4x4 array of rows")));
    }
    let mut out = [[0.0; 4]; 4];
    for (dst, src) in out.iter_mut().zip(rows) {
        dst.copy_from_slice(src);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedFrame {
    StandardTriad,
    MisalignedTriad,
    Tetrahedron,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrameSpec {
    Named {
        name: NamedFrame,
    },
    /// Orthonormal pair in the plane tilted by `phi_deg` from the plane ⊥
    /// `normal`, at in-plane angle `alpha_deg` from the planes' common line.
    Pair {
        normal: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi_deg: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha_deg: Option<f64>,
    },
    Explicit {
        directions: Vec<[f64; 3]>,
    },
}

impl FrameSpec {
    pub fn build(&self) -> Result<MeasurementFrame> {
        self.build_with(None, None)
    }

    /// Builds the frame, letting `alpha_deg` override a pair's in-plane angle
    /// and `phi_deg` fill in its tilt when the spec leaves it unset.
    pub fn build_with(&self, alpha_deg: Option<f64>, phi_deg: Option<f64>) -> Result<MeasurementFrame> {
        match self {
            FrameSpec::Named { name } => Ok(match name {
                NamedFrame::StandardTriad => geometry::standard_triad(),
                NamedFrame::MisalignedTriad => geometry::misaligned_triad(),
                NamedFrame::Tetrahedron => geometry::tetrahedron_frame(),
            }),
            FrameSpec::Pair {
                normal,
                phi_deg: own_phi,
                alpha_deg: own_alpha,
            } => {
                let normal = Direction::new(Vector3::from(*normal))
                    .map_err(|e| Error::Config(format!("pair normal: {e}")))?;
                let alpha = alpha_deg.or(*own_alpha).unwrap_or(0.0);
                let phi = own_phi.or(phi_deg).unwrap_or(0.0);
                if !alpha.is_finite() || !phi.is_finite() {
                    return Err(Error::Config("pair angles must be finite".into()));
                }
                Ok(geometry::tilted_pair(phi.to_radians(), alpha.to_radians(), &normal))
            }
            FrameSpec::Explicit { directions } => {
                let vectors: Vec<Vector3<f64>> = directions.iter().map(|d| Vector3::from(*d)).collect();
                MeasurementFrame::from_vectors(&vectors).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, FrameSpec::Pair { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::spin_correlation_matrix;

    #[test]
    fn parses_state_specs() {
        let s: StateSpec = serde_json::from_str(r#"{"kind":"werner","W":0.985}"#).unwrap();
        let t = spin_correlation_matrix(&s.build().unwrap()).unwrap();
        assert!((t.matrix()[(0, 0)] + 0.985).abs() < 1e-12);

        let s: StateSpec = serde_json::from_str(r#"{"kind":"werner_fidelity","F":0.97}"#).unwrap();
        let t = spin_correlation_matrix(&s.build().unwrap()).unwrap();
        assert!((t.matrix()[(2, 2)] + 0.96).abs() < 1e-12);

        let json = r#"{"kind":"matrix",
            "re":[[0.25,0,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]],
            "im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
        let s: StateSpec = serde_json::from_str(json).unwrap();
        assert!(spin_correlation_matrix(&s.build().unwrap()).unwrap().matrix().norm() < 1e-15);

        let bad: StateSpec = serde_json::from_str(r#"{"kind":"werner","W":1.5}"#).unwrap();
        assert!(bad.build().is_err());
        assert!(serde_json::from_str::<StateSpec>(r#"{"kind":"werner","w":0.5}"#).is_err());
        let ragged = StateSpec::Matrix {
            re: vec![vec![1.0]],
            im: vec![vec![0.0]],
        };
        assert!(matches!(ragged.build(), Err(Error::Config(_))));
    }

    #[test]
    fn parses_frame_specs() {
        let f: FrameSpec = serde_json::from_str(r#"{"kind":"named","name":"tetrahedron"}"#).unwrap();
        assert_eq!(f.build().unwrap(), geometry::tetrahedron_frame());

        let f: FrameSpec = serde_json::from_str(r#"{"kind":"pair","normal":[0,1,0]}"#).unwrap();
        let frame = f.build().unwrap();
        assert!((frame.directions()[0].vector() - Vector3::z()).norm() < 1e-15);
        assert!((frame.directions()[1].vector() - Vector3::x()).norm() < 1e-15);

        let rotated = f.build_with(Some(90.0), None).unwrap();
        assert!((rotated.directions()[0].vector() - Vector3::x()).norm() < 1e-12);

        let f: FrameSpec =
            serde_json::from_str(r#"{"kind":"explicit","directions":[[1,0,0],[0,0,2]]}"#).unwrap();
        let frame = f.build().unwrap();
        assert!(frame.is_orthonormal());
        assert!((frame.directions()[1].vector().z - 1.0).abs() < 1e-15);

        let bad: FrameSpec = serde_json::from_str(r#"{"kind":"pair","normal":[0,0,0]}"#).unwrap();
        assert!(matches!(bad.build(), Err(Error::Config(_))));
        assert!(serde_json::from_str::<FrameSpec>(r#"{"kind":"named","name":"cube"}"#).is_err());
    }
}
