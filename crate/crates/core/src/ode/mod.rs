//! Ingestion of ODE vector fields as cell maps.

mod cellmap;
pub mod config;
mod field;
mod poly;

pub use cellmap::{build_cell_map, GridSpec};
pub use config::{AnalysisConfig, AnalysisSettings, CHECKS};
pub use field::{time_tau_map, ApproxParams, VectorField};
pub use poly::{Polynomial, MAX_DEGREE};
