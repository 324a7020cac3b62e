//! Möbius knot energies, Gauss-diagram functionals and projection crossing
//! statistics for closed polygonal space curves.
//!
//! The crate is organised around [`KnotCurve`], an immutable embedded closed
//! curve. Numerical functionals return a [`FunctionalReport`] carrying the value,
//! an error estimate and an echo of the configuration that produced it.

pub mod curve;
pub mod cyclic;
pub mod diagrams;
pub mod energies;
mod error;
pub mod gauss;
pub mod mobius;
pub mod plat;
pub mod projections;
pub mod relax;
mod report;
pub mod rng;
mod spline;
pub mod verify;

pub use curve::{CurveFile, CurveOptions, KnotCurve, ZooFamily, ZooSpec};
pub use error::{KnotError, Result};
pub use report::FunctionalReport;
pub use spline::PeriodicSpline;

/// Three-vectors in ambient space.
pub type Vec3 = nalgebra::Vector3<f64>;
