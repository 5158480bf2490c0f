use serde::{Deserialize, Serialize};

use crate::STRUCT_TOL;

/// Finite union of closed intervals, kept sorted with strictly positive gaps.
/// A component with `lo == hi` is a single point. Serialized as a list of
/// `[lo, hi]` pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct IntervalUnion {
    components: Vec<(f64, f64)>,
}

impl From<Vec<(f64, f64)>> for IntervalUnion {
    fn from(v: Vec<(f64, f64)>) -> Self {
        Self::from_intervals(v)
    }
}

impl From<IntervalUnion> for Vec<(f64, f64)> {
    fn from(u: IntervalUnion) -> Self {
        u.components
    }
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Self::from_intervals([(lo, hi)])
    }

    pub fn point(x: f64) -> Self {
        Self::from_intervals([(x, x)])
    }

    /// Normalises arbitrary closed intervals: reversed pairs are swapped, and
    /// components closer than `STRUCT_TOL` are merged.
    pub fn from_intervals(intervals: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut raw: Vec<(f64, f64)> =
            intervals.into_iter().map(|(lo, hi)| if lo <= hi { (lo, hi) } else { (hi, lo) }).collect();
        raw.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        let mut components: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match components.last_mut() {
                Some(last) if lo <= last.1 + STRUCT_TOL => last.1 = last.1.max(hi),
                _ => components.push((lo, hi)),
            }
        }
        Self { components }
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.contains_tol(x, 0.0)
    }

    pub fn contains_tol(&self, x: f64, tol: f64) -> bool {
        let idx = self.components.partition_point(|c| c.1 + tol < x);
        self.components.get(idx).is_some_and(|c| c.0 - tol <= x)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.components.iter().chain(&other.components).copied())
    }

    /// Intersection of closed sets. Components that meet only within
    /// `STRUCT_TOL` produce a single point.
    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.components.len() && j < other.components.len() {
            let (a0, a1) = self.components[i];
            let (b0, b1) = other.components[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo <= hi {
                out.push((lo, hi));
            } else if lo <= hi + STRUCT_TOL {
                let mid = 0.5 * (lo + hi);
                out.push((mid, mid));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self { components: self.components.iter().map(|&(lo, hi)| (lo + shift, hi + shift)).collect() }
    }

    /// Image under `x ↦ −x`.
    pub fn negate(&self) -> Self {
        Self { components: self.components.iter().rev().map(|&(lo, hi)| (-hi, -lo)).collect() }
    }

    /// Degenerate components.
    pub fn points(&self) -> Vec<f64> {
        self.components.iter().filter(|c| c.0 == c.1).map(|c| c.0).collect()
    }

    pub fn endpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.components.len());
        for &(lo, hi) in &self.components {
            out.push(lo);
            if hi > lo {
                out.push(hi);
            }
        }
        out
    }

    pub fn total_length(&self) -> f64 {
        self.components.iter().map(|c| c.1 - c.0).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.components.first().map(|c| c.0)
    }

    pub fn max(&self) -> Option<f64> {
        self.components.last().map(|c| c.1)
    }

    /// Maximal open intervals of `]lo, hi[` not covered by the set.
    pub fn gaps_within(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cursor = lo;
        for &(c0, c1) in &self.components {
            if c1 < lo || c0 > hi {
                continue;
            }
            if c0 > cursor {
                out.push((cursor, c0));
            }
            cursor = cursor.max(c1);
        }
        if cursor < hi {
            out.push((cursor, hi));
        }
        out
    }

    /// True when the open interval `]lo, hi[`, shrunk by `tol` on both sides,
    /// misses the set.
    pub fn misses_open(&self, lo: f64, hi: f64, tol: f64) -> bool {
        let (lo, hi) = (lo + tol, hi - tol);
        if lo >= hi {
            return true;
        }
        !self.components.iter().any(|&(c0, c1)| c0 < hi && c1 > lo)
    }

    /// Same components up to `tol` on every endpoint.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.components.len() == other.components.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| (a.0 - b.0).abs() <= tol && (a.1 - b.1).abs() <= tol)
    }

    /// `per_component` evenly spaced points in every non-degenerate component
    /// (endpoints included) plus every single point.
    pub fn grid(&self, per_component: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for &(lo, hi) in &self.components {
            if hi == lo || per_component < 2 {
                out.push(lo);
                continue;
            }
            let steps = (per_component - 1) as f64;
            out.extend((0..per_component).map(|k| lo + (hi - lo) * k as f64 / steps));
        }
        out
    }

    /// Points of the set spaced at most `step` apart, endpoints included.
    pub fn grid_with_step(&self, step: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for &(lo, hi) in &self.components {
            let count = ((hi - lo) / step).ceil() as usize;
            if count == 0 {
                out.push(lo);
                continue;
            }
            out.extend((0..=count).map(|k| lo + (hi - lo) * k as f64 / count as f64));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_touching_components() {
        let u = IntervalUnion::from_intervals([(2.0, 3.0), (0.0, 1.0), (1.0, 1.5), (3.0, 3.0)]);
        assert_eq!(u.components(), &[(0.0, 1.5), (2.0, 3.0)]);
    }

    #[test]
    fn intersection_of_adjacent_closed_intervals_is_a_point() {
        let a = IntervalUnion::interval(0.0, 0.5);
        let b = IntervalUnion::interval(0.5, 1.0);
        let i = a.intersection(&b);
        assert_eq!(i.components(), &[(0.5, 0.5)]);
        assert_eq!(i.points(), vec![0.5]);
        assert!(a.union(&b).approx_eq(&IntervalUnion::interval(0.0, 1.0), 0.0));
    }

    #[test]
    fn gaps_and_membership() {
        let u = IntervalUnion::from_intervals([(1.0, 2.0), (3.0, 3.0)]);
        assert_eq!(u.gaps_within(0.0, 4.0), vec![(0.0, 1.0), (2.0, 3.0), (3.0, 4.0)]);
        assert_eq!(u.gaps_within(1.0, 3.0), vec![(2.0, 3.0)]);
        assert!(u.contains(3.0) && u.contains(1.5) && !u.contains(2.5));
        assert!(u.misses_open(2.0, 3.0, 0.0));
        assert!(!u.misses_open(2.0, 3.5, 0.0));
        assert_eq!(u.negate().components(), &[(-3.0, -3.0), (-2.0, -1.0)]);
    }
}
