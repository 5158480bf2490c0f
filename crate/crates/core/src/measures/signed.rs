use serde::{Deserialize, Serialize};

use super::{BVPotential, Breakpoint, IntervalUnion};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedSegment {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

/// Finite signed measure: point masses plus constant-density segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SignedMeasure1D {
    atoms: Vec<Atom>,
    segments: Vec<SignedSegment>,
}

impl SignedMeasure1D {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Atoms at equal positions are summed and zero weights dropped; segments
    /// must have disjoint interiors.
    pub fn new(atoms: Vec<Atom>, segments: Vec<SignedSegment>) -> Result<Self> {
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            if !(a.x.is_finite() && a.weight.is_finite()) {
                return Err(Error::Invalid("non-finite atom".into()));
            }
            match merged.last_mut() {
                Some(last) if last.x == a.x => last.weight += a.weight,
                _ => merged.push(a),
            }
        }
        merged.retain(|a| a.weight != 0.0);

        let mut segments: Vec<SignedSegment> = segments.into_iter().filter(|s| s.density != 0.0).collect();
        segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for (k, s) in segments.iter().enumerate() {
            if !(s.lo < s.hi) || !s.density.is_finite() {
                return Err(Error::Invalid(format!("segment [{}, {}] is invalid", s.lo, s.hi)));
            }
            if k > 0 && segments[k - 1].hi > s.lo {
                return Err(Error::Invalid(format!("segment starting at {} overlaps its predecessor", s.lo)));
            }
        }
        Ok(Self { atoms: merged, segments })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[SignedSegment] {
        &self.segments
    }

    pub fn atom_weight(&self, x: f64) -> f64 {
        self.atoms.iter().find(|a| a.x == x).map_or(0.0, |a| a.weight)
    }

    /// `ρ((−∞, x])`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().take_while(|a| a.x <= x).map(|a| a.weight).sum();
        let segs: f64 = self.segments.iter().filter(|s| s.lo < x).map(|s| s.density * (x.min(s.hi) - s.lo)).sum();
        atoms + segs
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative(f64::INFINITY)
    }

    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.abs()).sum::<f64>()
            + self.segments.iter().map(|s| s.density.abs() * (s.hi - s.lo)).sum::<f64>()
    }

    pub fn support(&self) -> IntervalUnion {
        self.support_where(|_| true)
    }

    /// Support of the positive part of the Jordan decomposition.
    pub fn positive_support(&self) -> IntervalUnion {
        self.support_where(|w| w > 0.0)
    }

    pub fn negative_support(&self) -> IntervalUnion {
        self.support_where(|w| w < 0.0)
    }

    fn support_where(&self, keep: impl Fn(f64) -> bool) -> IntervalUnion {
        IntervalUnion::from_intervals(
            self.atoms
                .iter()
                .filter(|a| keep(a.weight))
                .map(|a| (a.x, a.x))
                .chain(self.segments.iter().filter(|s| keep(s.density)).map(|s| (s.lo, s.hi))),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|a| Atom { x: a.x, weight: c * a.weight }).collect(),
            segments: self
                .segments
                .iter()
                .map(|s| SignedSegment { lo: s.lo, hi: s.hi, density: c * s.density })
                .collect(),
        }
    }

    /// The right-continuous distribution function `x ↦ ρ((−∞, x])`.
    pub fn distribution_function(&self) -> BVPotential {
        let mut xs: Vec<f64> =
            self.atoms.iter().map(|a| a.x).chain(self.segments.iter().flat_map(|s| [s.lo, s.hi])).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let breakpoints = xs
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let slope = match xs.get(k + 1) {
                    Some(&next) => {
                        let mid = 0.5 * (x + next);
                        self.segments.iter().find(|s| s.lo <= mid && mid <= s.hi).map_or(0.0, |s| s.density)
                    }
                    None => 0.0,
                };
                Breakpoint { x, value: self.cumulative(x), slope }
            })
            .collect();
        BVPotential::from_breakpoints(0.0, breakpoints).expect("sorted finite breakpoints")
    }
}
