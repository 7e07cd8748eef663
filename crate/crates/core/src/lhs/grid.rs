use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridResolution {
    /// {+1, −1}, exact for a single Bob setting.
    Interval,
    /// Equally spaced points on the unit circle starting at (1, 0).
    Circle { step_deg: f64 },
    /// Fibonacci sphere, optionally augmented with the 26 directions of the
    /// unit cube lattice (axes, face and body diagonals).
    Fibonacci { points: usize, lattice: bool },
}

/// Unit vectors discretizing Bob's projected Bloch vector in R^n, n ∈ {1, 2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    dim: usize,
    points: Vec<DVector<f64>>,
    resolution: GridResolution,
}

impl SphereGrid {
    pub fn interval() -> Self {
        Self {
            dim: 1,
            points: vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
            resolution: GridResolution::Interval,
        }
    }

    /// Circle grid with spacing as close to `step_deg` as divides 360°.
    pub fn circle(step_deg: f64) -> Result<Self> {
        if !(step_deg > 0.0 && step_deg <= 120.0) {
            return Err(Error::InvalidArgument(format!(
                "circle step {step_deg}° must lie in (0°, 120°]"
            )));
        }
        let ratio = 360.0 / step_deg;
        let count = if (ratio - ratio.round()).abs() < 1e-9 {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        };
        let step = 360.0 / count as f64;
        let points = (0..count)
            .map(|k| {
                let theta = (k as f64 * step).to_radians();
                DVector::from_vec(vec![theta.cos(), theta.sin()])
            })
            .collect();
        Ok(Self {
            dim: 2,
            points,
            resolution: GridResolution::Circle { step_deg: step },
        })
    }

    pub fn fibonacci(points: usize) -> Result<Self> {
        Self::fibonacci_impl(points, false)
    }

    pub fn fibonacci_with_lattice(points: usize) -> Result<Self> {
        Self::fibonacci_impl(points, true)
    }

    fn fibonacci_impl(count: usize, lattice: bool) -> Result<Self> {
        if count < 4 {
            return Err(Error::InvalidArgument(format!(
                "a Fibonacci sphere needs at least 4 points, got {count}"
            )));
        }
        let golden_angle = PI * (3.0 - 5f64.sqrt());
        let mut points: Vec<DVector<f64>> = (0..count)
            .map(|i| {
                let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let phi = i as f64 * golden_angle;
                DVector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
            })
            .collect();
        if lattice {
            for x in -1i32..=1 {
                for y in -1i32..=1 {
                    for z in -1i32..=1 {
                        if (x, y, z) != (0, 0, 0) {
                            let v = DVector::from_vec(vec![x as f64, y as f64, z as f64]);
                            let norm = v.norm();
                            points.push(v / norm);
                        }
                    }
                }
            }
        }
        Ok(Self {
            dim: 3,
            points,
            resolution: GridResolution::Fibonacci {
                points: count,
                lattice,
            },
        })
    }

    /// Default grid for n Bob settings: exact for n = 1, 1° circle for n = 2,
    /// 10⁴-point Fibonacci sphere plus lattice directions for n = 3.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::with_options(n, 1.0, 10_000)
    }

    pub fn with_options(n: usize, circle_step_deg: f64, sphere_points: usize) -> Result<Self> {
        match n {
            1 => Ok(Self::interval()),
            2 => Self::circle(circle_step_deg),
            3 => Self::fibonacci_with_lattice(sphere_points),
            _ => Err(Error::Dimension(format!("no sphere grid for dimension {n}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn resolution(&self) -> GridResolution {
        self.resolution
    }

    /// Largest angle from any unit vector to its nearest grid point.
    ///
    /// Exact for the interval and circle grids. For Fibonacci spheres it is a
    /// lower estimate from 4·len probe directions, costing O(len²).
    pub fn covering_angle(&self) -> f64 {
        match self.resolution {
            GridResolution::Interval => 0.0,
            GridResolution::Circle { step_deg } => (step_deg / 2.0).to_radians(),
            GridResolution::Fibonacci { .. } => {
                let probes = 4 * self.points.len();
                let golden_angle = PI * (3.0 - 5f64.sqrt());
                (0..probes)
                    .map(|i| {
                        // offset so probes do not coincide with grid points
                        let z = 1.0 - (2 * i + 1) as f64 / probes as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let phi = i as f64 * golden_angle + 0.5;
                        let u = [r * phi.cos(), r * phi.sin(), z];
                        let best = self
                            .points
                            .iter()
                            .map(|p| p[0] * u[0] + p[1] * u[1] + p[2] * u[2])
                            .fold(f64::NEG_INFINITY, f64::max);
                        best.clamp(-1.0, 1.0).acos()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_points_are_unit_and_include_axes() {
        let g = SphereGrid::circle(1.0).unwrap();
        assert_eq!(g.len(), 360);
        assert!(g.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        assert!((g.points()[90][1] - 1.0).abs() < 1e-15);
        assert!((g.points()[45][0] - g.points()[45][1]).abs() < 1e-15);
    }

    #[test]
    fn circle_rounds_step_to_divisor() {
        let g = SphereGrid::circle(7.0).unwrap();
        assert_eq!(g.len(), 52);
        assert!(SphereGrid::circle(0.0).is_err());
        assert!(SphereGrid::circle(f64::NAN).is_err());
    }

    #[test]
    fn fibonacci_points_are_unit() {
        let g = SphereGrid::fibonacci_with_lattice(500).unwrap();
        assert_eq!(g.len(), 526);
        assert!(g.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-12));
        assert!(SphereGrid::fibonacci(2).is_err());
    }

    #[test]
    fn covering_angle_shrinks_with_resolution() {
        let coarse = SphereGrid::circle(10.0).unwrap().covering_angle();
        let fine = SphereGrid::circle(1.0).unwrap().covering_angle();
        assert!(fine < coarse);
        let a = SphereGrid::fibonacci(50).unwrap().covering_angle();
        let b = SphereGrid::fibonacci(200).unwrap().covering_angle();
        let c = SphereGrid::fibonacci(800).unwrap().covering_angle();
        assert!(a > b && b > c, "{a} {b} {c}");
        assert_eq!(SphereGrid::interval().covering_angle(), 0.0);
    }
}
