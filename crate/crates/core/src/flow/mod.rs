//! Integration and analysis of the Reeb flow.

pub mod export;
pub mod field;
pub mod integrator;
pub mod orbits;
pub mod trajectory;

use serde::{Deserialize, Serialize};

pub use field::{AngularField, ReducedField, VectorField};
pub use integrator::{Dopri5Options, Flow, RunSummary, StepKind, StepRecord};
pub use orbits::{
    classify_orbit, hyperplane_sweep, rotation_number, scan_periodic, ClassifyConfig, OrbitClass,
    OrbitVerdict, Recurrence, RotationEstimate, ScanConfig, ScanReport, SweepConfig, SweepReport,
};
pub use trajectory::{integrate, integrate_reduced, integrate_with, rk4_trajectory, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}
