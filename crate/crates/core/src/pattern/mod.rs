//! Field evaluation for the subarrayed planar array and beam-metric
//! extraction from sampled patterns.

mod config;
pub mod cuts;
pub mod field;
pub mod metrics;
mod model;
pub mod power;
mod weights;

pub use config::{ArrayConfig, DEFAULT_PER_CHAIN_POWER_W, SPEED_OF_LIGHT};
pub use cuts::{cut_angles, pattern_grid, principal_cuts, CutPlane, CutQuantity, PatternCut, PatternGrid};
pub use field::{array_factor, subarray_pattern, total_field, FieldEvaluator};
pub use metrics::{extract_metrics, measure_cut, BeamMetrics, CutMetrics};
pub use model::{gain_from_directivity, ArrayModel, PreparedBeam};
pub use power::{directivity, PowerTable, QuadratureGrid};
pub use weights::{ActivationMask, WeightMatrix};
