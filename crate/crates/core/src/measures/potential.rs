use serde::{Deserialize, Serialize};

use super::IntervalUnion;
use crate::error::{Error, Result};

/// Start of a linear piece: the function equals `value + slope · (t − x)` on
/// `[x, next breakpoint)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub x: f64,
    pub value: f64,
    pub slope: f64,
}

/// Maximal linear piece `[start, end)` of a [`BVPotential`]. The first piece
/// starts at `−∞`, the last one ends at `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub value_at_start: f64,
    pub slope: f64,
}

impl Segment {
    /// Value of the linear piece at `x` (also used for left limits at `end`).
    pub fn eval(&self, x: f64) -> f64 {
        if self.slope == 0.0 {
            self.value_at_start
        } else {
            self.value_at_start + self.slope * (x - self.start)
        }
    }
}

/// Right-continuous piecewise-linear function with finitely many jumps.
///
/// Constant equal to `left_value` on `(−∞, x₀)`; on `[xₖ, xₖ₊₁)` it is the
/// affine function described by breakpoint `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BVPotential {
    left_value: f64,
    breakpoints: Vec<Breakpoint>,
}

impl BVPotential {
    pub fn new(left_value: f64, breakpoints: Vec<(f64, f64, f64)>) -> Result<Self> {
        Self::from_breakpoints(
            left_value,
            breakpoints.into_iter().map(|(x, value, slope)| Breakpoint { x, value, slope }).collect(),
        )
    }

    pub fn from_breakpoints(left_value: f64, breakpoints: Vec<Breakpoint>) -> Result<Self> {
        if !left_value.is_finite() {
            return Err(Error::Invalid("left value must be finite".into()));
        }
        for (k, bp) in breakpoints.iter().enumerate() {
            if !(bp.x.is_finite() && bp.value.is_finite() && bp.slope.is_finite()) {
                return Err(Error::Invalid(format!("breakpoint {k} is not finite")));
            }
            if k > 0 && breakpoints[k - 1].x >= bp.x {
                return Err(Error::Invalid(format!("breakpoint {k} is not strictly increasing")));
            }
        }
        Ok(Self { left_value, breakpoints })
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self { left_value: c, breakpoints: Vec::new() }
    }

    pub fn left_value(&self) -> f64 {
        self.left_value
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn breakpoint_xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.breakpoints.iter().map(|b| b.x)
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.breakpoints.len() + 1);
        let first_end = self.breakpoints.first().map_or(f64::INFINITY, |b| b.x);
        out.push(Segment { start: f64::NEG_INFINITY, end: first_end, value_at_start: self.left_value, slope: 0.0 });
        for (k, bp) in self.breakpoints.iter().enumerate() {
            let end = self.breakpoints.get(k + 1).map_or(f64::INFINITY, |b| b.x);
            out.push(Segment { start: bp.x, end, value_at_start: bp.value, slope: bp.slope });
        }
        out
    }

    /// Linear piece governing `x` (the one whose half-open range contains it).
    pub fn segment_at(&self, x: f64) -> Segment {
        let idx = self.breakpoints.partition_point(|b| b.x <= x);
        self.segment_by_index(idx)
    }

    fn segment_by_index(&self, idx: usize) -> Segment {
        if idx == 0 {
            let end = self.breakpoints.first().map_or(f64::INFINITY, |b| b.x);
            return Segment { start: f64::NEG_INFINITY, end, value_at_start: self.left_value, slope: 0.0 };
        }
        let bp = self.breakpoints[idx - 1];
        let end = self.breakpoints.get(idx).map_or(f64::INFINITY, |b| b.x);
        Segment { start: bp.x, end, value_at_start: bp.value, slope: bp.slope }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.segment_at(x).eval(x)
    }

    pub fn left_limit(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|b| b.x < x);
        self.segment_by_index(idx).eval(x)
    }

    /// `f(x) − f(x⁻)`.
    pub fn jump_at(&self, x: f64) -> f64 {
        self.eval(x) - self.left_limit(x)
    }

    pub fn jumps(&self) -> Vec<(f64, f64)> {
        self.breakpoints.iter().map(|b| (b.x, self.jump_at(b.x))).collect()
    }

    /// `Σ |jumps| + Σ |slope| · length`; infinite when the last piece is not flat.
    pub fn total_variation(&self) -> f64 {
        let segs = self.segments();
        let mut tv: f64 = self.jumps().iter().map(|j| j.1.abs()).sum();
        for s in &segs[1..] {
            if s.slope != 0.0 {
                tv += s.slope.abs() * (s.end - s.start);
            }
        }
        tv
    }

    /// Lebesgue integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if !(a < b) {
            return 0.0;
        }
        let mut total = 0.0;
        let mut lo = a;
        let mut idx = self.breakpoints.partition_point(|bp| bp.x <= a);
        while lo < b {
            let seg = self.segment_by_index(idx);
            let hi = seg.end.min(b);
            total += 0.5 * (seg.eval(lo) + seg.eval(hi)) * (hi - lo);
            lo = hi;
            idx += 1;
        }
        total
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            left_value: c * self.left_value,
            breakpoints: self
                .breakpoints
                .iter()
                .map(|b| Breakpoint { x: b.x, value: c * b.value, slope: c * b.slope })
                .collect(),
        }
    }

    /// Closed support of the distributional derivative: the atoms (jumps above
    /// `tol`) plus the closure of every sloped piece.
    pub fn derivative_support(&self, tol: f64) -> IntervalUnion {
        self.derivative_support_where(|v| v.abs() > tol)
    }

    /// Support of the negative part of the derivative.
    pub fn derivative_negative_support(&self, tol: f64) -> IntervalUnion {
        self.derivative_support_where(|v| v < -tol)
    }

    pub fn derivative_positive_support(&self, tol: f64) -> IntervalUnion {
        self.derivative_support_where(|v| v > tol)
    }

    fn derivative_support_where(&self, keep: impl Fn(f64) -> bool) -> IntervalUnion {
        let mut parts = Vec::new();
        for (x, jump) in self.jumps() {
            if keep(jump) {
                parts.push((x, x));
            }
        }
        for s in &self.segments()[1..] {
            if keep(s.slope) && s.end.is_finite() {
                parts.push((s.start, s.end));
            }
        }
        IntervalUnion::from_intervals(parts)
    }

    /// Drops breakpoints that neither jump nor change the slope (within `tol`).
    pub fn simplified(&self, tol: f64) -> Self {
        let mut kept: Vec<Breakpoint> = Vec::with_capacity(self.breakpoints.len());
        let mut prev_slope = 0.0;
        for (k, bp) in self.breakpoints.iter().enumerate() {
            let jump = bp.value - self.segment_by_index(k).eval(bp.x);
            let redundant = jump.abs() <= tol && (bp.slope - prev_slope).abs() <= tol;
            if !redundant {
                kept.push(*bp);
                prev_slope = bp.slope;
            }
        }
        Self { left_value: self.left_value, breakpoints: kept }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_e1() -> BVPotential {
        BVPotential::new(0.0, vec![(0.0, -1.0, -1.0), (1.0, -3.0, 0.0)]).unwrap()
    }

    #[test]
    fn evaluation_and_limits() {
        let f = phi_e1();
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(0.0), -1.0);
        assert_eq!(f.eval(0.5), -1.5);
        assert_eq!(f.eval(1.0), -3.0);
        assert_eq!(f.left_limit(0.0), 0.0);
        assert_eq!(f.left_limit(1.0), -2.0);
        assert_eq!(f.jump_at(1.0), -1.0);
        assert_eq!(f.jump_at(0.5), 0.0);
        assert_eq!(f.total_variation(), 3.0);
    }

    #[test]
    fn integral_across_breakpoints() {
        let f = phi_e1();
        assert!((f.integral(0.0, 1.0) + 1.5).abs() < 1e-15);
        assert!((f.integral(-1.0, 2.0) + 4.5).abs() < 1e-15);
        assert_eq!(f.integral(2.0, 1.0), 0.0);
    }

    #[test]
    fn derivative_supports() {
        let f = phi_e1();
        assert_eq!(f.derivative_support(1e-12).components(), &[(0.0, 1.0)]);
        assert_eq!(f.derivative_negative_support(1e-12).components(), &[(0.0, 1.0)]);
        assert!(f.derivative_positive_support(1e-12).is_empty());
    }

    #[test]
    fn simplification_removes_only_redundant_breakpoints() {
        let f = BVPotential::new(0.0, vec![(0.0, 0.0, 1.0), (1.0, 1.0, 1.0), (2.0, 5.0, 0.0)]).unwrap();
        let g = f.simplified(1e-12);
        assert_eq!(g.breakpoints().len(), 2);
        for x in [-1.0, 0.0, 0.5, 1.0, 1.7, 2.0, 3.0] {
            assert_eq!(f.eval(x), g.eval(x));
        }
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        assert!(BVPotential::new(0.0, vec![(1.0, 0.0, 0.0), (1.0, 1.0, 0.0)]).is_err());
    }
}
