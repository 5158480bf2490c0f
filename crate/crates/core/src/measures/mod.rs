//! Exact arithmetic on piecewise-uniform measures and the objects derived from
//! them: closed interval unions, signed measures with atoms, and right-continuous
//! piecewise-linear functions with jumps.

mod interval;
mod measure;
mod potential;
mod signed;

pub use interval::IntervalUnion;
pub use measure::{cdf_eval, integrate_bv, measure_from_pieces, quantile_eval, Measure1D, Piece};
pub use potential::{BVPotential, Breakpoint, Segment};
pub use signed::{Atom, SignedMeasure1D, SignedSegment};
