//! Thresholds for random regular NAE-SAT and hypergraph 2-coloring.
//!
//! The crate computes belief-propagation fixed points, the threshold function
//! `phi_star` and its largest zero, evaluates the interpolation functional for
//! the cluster measure, carries out exact first-moment calculations, samples
//! and solves small configuration-model instances, and checks a list of
//! numerical inequalities at high precision.

pub mod bp;
pub mod certificates;
pub mod ensemble;
pub mod error;
pub mod first_moment;
pub mod hp;
pub mod interpolation;
pub mod model;
pub mod thresholds;

pub use bp::{BpFixedPoint, DegreeWindow, ModelParams};
pub use error::{Error, Result};
pub use model::Model;
