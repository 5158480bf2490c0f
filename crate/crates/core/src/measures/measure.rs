use serde::{Deserialize, Serialize};

use super::{BVPotential, IntervalUnion};
use crate::error::{Error, Result};
use crate::STRUCT_TOL;

/// One constant-density piece `density · 1_[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub density: f64,
}

impl Piece {
    pub fn new(a: f64, b: f64, density: f64) -> Self {
        Self { a, b, density }
    }

    pub fn mass(&self) -> f64 {
        self.density * (self.b - self.a)
    }
}

/// Atomless measure with a piecewise-constant density and compact support.
///
/// Pieces are sorted, pairwise non-overlapping (they may touch) and all carry a
/// strictly positive density; zero-density input pieces are dropped. A measure
/// built with [`Measure1D::from_pieces`] is a probability measure, while
/// [`Measure1D::with_any_mass`] admits any finite mass, which is what the
/// restrictions `μ⌊[a, b]` need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PieceList", into = "PieceList")]
pub struct Measure1D {
    pieces: Vec<Piece>,
    // cum[i] is the mass strictly to the left of piece i; cum[len] is the total.
    cum: Vec<f64>,
}

/// Wire format `{"pieces": [...]}`.
#[derive(Serialize, Deserialize)]
struct PieceList {
    pieces: Vec<Piece>,
}

impl TryFrom<PieceList> for Measure1D {
    type Error = Error;
    fn try_from(p: PieceList) -> Result<Self> {
        Self::with_any_mass(p.pieces)
    }
}

impl From<Measure1D> for PieceList {
    fn from(m: Measure1D) -> Self {
        PieceList { pieces: m.pieces }
    }
}

impl Measure1D {
    /// Validated probability measure: total mass must be 1 within `STRUCT_TOL`.
    pub fn from_pieces(pieces: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let m = Self::with_any_mass(pieces)?;
        if (m.mass() - 1.0).abs() > STRUCT_TOL {
            return Err(Error::MassNotOne { mass: m.mass() });
        }
        Ok(m)
    }

    /// Validated measure of arbitrary finite mass (possibly zero).
    pub fn with_any_mass(pieces: impl IntoIterator<Item = Piece>) -> Result<Self> {
        let raw: Vec<Piece> = pieces.into_iter().collect();
        let mut prev_b = f64::NEG_INFINITY;
        for (index, p) in raw.iter().enumerate() {
            if !(p.a.is_finite() && p.b.is_finite() && p.density.is_finite()) {
                return Err(Error::Invalid(format!("piece {index} has a non-finite field")));
            }
            if p.a >= p.b {
                return Err(Error::InvalidPiece { index, a: p.a, b: p.b });
            }
            if p.density < 0.0 {
                return Err(Error::NegativeDensity { index, density: p.density });
            }
            if p.a < prev_b {
                return Err(Error::OverlappingPieces { index, a: p.a, prev_b });
            }
            prev_b = p.b;
        }
        let pieces: Vec<Piece> = raw.into_iter().filter(|p| p.density > 0.0).collect();
        Ok(Self::from_sorted_unchecked(pieces))
    }

    fn from_sorted_unchecked(pieces: Vec<Piece>) -> Self {
        let mut cum = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for p in &pieces {
            acc += p.mass();
            cum.push(acc);
        }
        Self { pieces, cum }
    }

    /// Uniform probability measure on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidPiece { index: 0, a, b });
        }
        Self::from_pieces([Piece::new(a, b, 1.0 / (b - a))])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Smallest point of the support. `None` for the zero measure.
    pub fn inf_support(&self) -> Option<f64> {
        self.pieces.first().map(|p| p.a)
    }

    pub fn sup_support(&self) -> Option<f64> {
        self.pieces.last().map(|p| p.b)
    }

    /// Closed support; touching pieces are merged into one component.
    pub fn support(&self) -> IntervalUnion {
        IntervalUnion::from_intervals(self.pieces.iter().map(|p| (p.a, p.b)))
    }

    /// `F(x) = m((−∞, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.a <= x);
        if idx == 0 {
            return 0.0;
        }
        let p = &self.pieces[idx - 1];
        self.cum[idx - 1] + p.density * (x.min(p.b) - p.a)
    }

    /// Mass of the closed interval `[lo, hi]` (equal to the open one, no atoms).
    pub fn mass_of(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    /// Quantile for `t ∈ [0, mass]`: the smallest `x` with `F(x) ≥ t`, except
    /// that a level sitting on a support gap resolves to the left edge of the
    /// next piece. `t = 0` gives `inf supp`, `t = mass` gives `sup supp`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        let total = self.mass();
        if self.pieces.is_empty() {
            return Err(Error::DomainError { value: t, domain: "[0, mass] of an empty measure" });
        }
        if !(t >= -STRUCT_TOL && t <= total + STRUCT_TOL) {
            return Err(Error::DomainError { value: t, domain: "[0, mass]" });
        }
        if t <= 0.0 {
            return Ok(self.pieces[0].a);
        }
        if t >= total {
            return Ok(self.pieces.last().unwrap().b);
        }
        Ok(self.quantile_on_piece(self.piece_at_level(t), t))
    }

    /// Index of the piece carrying level `t` (first piece whose cumulative
    /// upper mass exceeds `t`), clamped to the last piece.
    pub(crate) fn piece_at_level(&self, t: f64) -> usize {
        let idx = self.cum[1..].partition_point(|&c| c <= t);
        idx.min(self.pieces.len().saturating_sub(1))
    }

    /// The affine quantile branch of piece `idx`, evaluated at level `t` and
    /// clamped to the piece.
    pub(crate) fn quantile_on_piece(&self, idx: usize, t: f64) -> f64 {
        let p = &self.pieces[idx];
        (p.a + (t - self.cum[idx]) / p.density).clamp(p.a, p.b)
    }

    /// Cumulative masses at piece boundaries, i.e. the levels where the
    /// quantile function changes slope. Includes 0 and the total mass.
    pub fn quantile_breaks(&self) -> &[f64] {
        &self.cum
    }

    /// Restriction `m⌊[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Measure1D {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let a = p.a.max(lo);
                let b = p.b.min(hi);
                (a < b).then(|| Piece::new(a, b, p.density))
            })
            .collect();
        Self::from_sorted_unchecked(pieces)
    }

    /// Restriction to a finite union of closed intervals.
    pub fn restrict_to(&self, set: &IntervalUnion) -> Measure1D {
        let mut pieces = Vec::new();
        for &(lo, hi) in set.components() {
            pieces.extend(self.restrict(lo, hi).pieces);
        }
        Self::from_sorted_unchecked(pieces)
    }

    /// Push-forward under `x ↦ −x`.
    pub fn reflect(&self) -> Measure1D {
        let pieces = self.pieces.iter().rev().map(|p| Piece::new(-p.b, -p.a, p.density)).collect();
        Self::from_sorted_unchecked(pieces)
    }

    /// Push-forward under `x ↦ x + shift`.
    pub fn translate(&self, shift: f64) -> Measure1D {
        let pieces = self.pieces.iter().map(|p| Piece::new(p.a + shift, p.b + shift, p.density)).collect();
        Self::from_sorted_unchecked(pieces)
    }

    /// Sum of two measures with disjoint (possibly touching) supports.
    pub fn disjoint_sum(&self, other: &Measure1D) -> Result<Measure1D> {
        let mut pieces: Vec<Piece> = self.pieces.iter().chain(&other.pieces).copied().collect();
        pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
        Self::with_any_mass(pieces)
    }

    /// Exact `∫ f dm` for a piecewise-linear `f` with jumps. Jump points are
    /// null sets because `m` has no atoms.
    pub fn integrate(&self, f: &BVPotential) -> f64 {
        self.pieces.iter().map(|p| p.density * f.integral(p.a, p.b)).sum()
    }
}

/// Builds a probability measure from `(a, b, density)` triples.
pub fn measure_from_pieces(pieces: &[(f64, f64, f64)]) -> Result<Measure1D> {
    Measure1D::from_pieces(pieces.iter().map(|&(a, b, d)| Piece::new(a, b, d)))
}

pub fn cdf_eval(m: &Measure1D, x: f64) -> f64 {
    m.cdf(x)
}

pub fn quantile_eval(m: &Measure1D, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::DomainError { value: t, domain: "[0, 1]" });
    }
    m.quantile(t)
}

pub fn integrate_bv(f: &BVPotential, m: &Measure1D) -> f64 {
    m.integrate(f)
}
