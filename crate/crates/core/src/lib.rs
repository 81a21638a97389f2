//! Beam synthesis for GEO direct radiating arrays built from subarrays.
//!
//! A genetic algorithm switches RF chains on and off so the steered beam
//! meets beamwidth, sidelobe and EIRP targets; extra chains are activated to
//! make up for the scan loss of the fixed subarray pattern.
//!
//! * [`geom`] sizes the array from the coverage requirement and turns ground
//!   targets into steering angles.
//! * [`pattern`] evaluates array factor, total field, directivity and EIRP,
//!   and measures beam metrics on principal cuts.
//! * [`ga`] evolves quadrant-symmetric activation masks.
//! * [`scenario`] loads scenario files, runs batches and writes results.

pub mod error;
pub mod ga;
pub mod geom;
pub mod pattern;
pub mod scenario;

pub use error::{Error, Result};
