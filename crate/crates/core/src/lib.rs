//! Reference-frame-independent EPR-steering numerics.
//!
//! * [`quantum`]: two-qubit states, spin-correlation tensor, marginals.
//! * [`geometry`]: measurement directions, frames, rotations.
//! * [`steering`]: RIS and NSS steering parameters and their Werner closed forms.
//! * [`lhs`]: local-hidden-state membership oracle by linear programming.
//! * [`experiment`]: photon-counting simulation and scenario sweeps.
//! * [`config`]: JSON state, frame, and scenario specifications.
//! * [`report`]: comparison table against published experimental values.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod lhs;
pub mod linalg;
pub mod quantum;
pub mod report;
pub mod steering;

pub use error::{Error, Result};
