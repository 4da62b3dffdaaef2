//! Trajectory construction, outlier removal and SED simplification.

mod build;
mod model;
mod outlier;
mod simplify;
pub mod store;

pub use build::build_trajectories;
pub use model::{path_length, TrajPoint, Trajectory, TrajectoryParams, KNOT_MS};
pub use outlier::remove_outliers;
pub use simplify::{sed, simplify, simplify_indices};

use crate::exec::{self, Execution};

/// Simplifies every trajectory independently.
pub fn simplify_all(trajectories: &[Trajectory], epsilon: f64, exec: Execution) -> Vec<Trajectory> {
    exec::map(exec, trajectories, |t| simplify(t, epsilon))
}
