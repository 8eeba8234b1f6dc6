//! Convergence-rate harness, table rendering and CSV export for the
//! layer-tracking solver in `layertrack-core`.

pub mod export;
pub mod harness;

pub use harness::{
    epsilon_sweep, order_from_pair, two_mesh_difference, ConvergenceReport, MRule, SweepConfig,
    TableFormat,
};
