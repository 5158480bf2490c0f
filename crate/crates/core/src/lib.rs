//! One-dimensional L∞ optimal transport.
//!
//! The crate works with atomless, compactly supported probability measures on
//! the real line given by piecewise-constant densities. Everything is exact up
//! to binary64 rounding because every object involved (quantile functions,
//! displacement, potentials) is piecewise linear.
//!
//! The main entry points are:
//!
//! * [`coupling::monotone_coupling`] and [`coupling::winf_value`] for the
//!   critical distance `W∞(μ, ν)`,
//! * [`coupling::maximal_displacement_sets`] for the sets of points moved at
//!   maximal distance to the right (`M⁺`) and to the left (`M⁻`),
//! * [`potentials`] for the signed measure `ρ`, the Kantorovich potentials
//!   `φ`, `ψ` and the dual certificates built from them,
//! * [`structure`] for the decomposition of all optimal plans into rigid
//!   translations and free band-constrained components,
//! * [`oracle`] for brute-force discrete ground truth.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

// Guards such as `!(x >= 0.0)` are written that way to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod error;
pub mod instances;
pub mod io;
pub mod measures;
pub mod oracle;
pub mod potentials;
pub mod selftest;
pub mod structure;

pub use coupling::{DisplacementSets, MonotonePlan};
pub use error::{Error, Result};
pub use measures::{BVPotential, IntervalUnion, Measure1D, Piece, SignedMeasure1D};
pub use potentials::{DualReport, RhoConfig};
pub use structure::{DiscretePlan, StructureComponent, StructureDecomposition};

/// Tolerance for structural comparisons (mass normalisation, level sets of the
/// displacement, merging of touching intervals).
pub const STRUCT_TOL: f64 = 1e-12;

/// Tolerance for integrals and dual feasibility reports.
pub const REPORT_TOL: f64 = 1e-9;
