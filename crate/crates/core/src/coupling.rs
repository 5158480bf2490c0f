//! The monotone (quantile) coupling, the critical distance `λ_C = W∞(μ, ν)`
//! and the maximal displacement sets `M⁺`, `M⁻`.
//!
//! In one dimension the ∞-cyclically monotone plan is the quantile coupling
//! `t ↦ (Q_μ(t), Q_ν(t))`. Between consecutive piece boundaries of either
//! measure both quantile functions are affine, so the whole plan is a finite
//! list of straight segments in the plane and every quantity below is read off
//! exactly from segment endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{IntervalUnion, Measure1D};
use crate::{REPORT_TOL, STRUCT_TOL};

/// Closure of the quantile curve over the level range `[t0, t1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanSegment {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl PlanSegment {
    pub fn displacement_start(&self) -> f64 {
        self.y0 - self.x0
    }

    pub fn displacement_end(&self) -> f64 {
        self.y1 - self.x1
    }

    /// Point of the segment at level `t` (clamped to the segment).
    pub fn at(&self, t: f64) -> (f64, f64) {
        let s = if self.t1 > self.t0 { ((t - self.t0) / (self.t1 - self.t0)).clamp(0.0, 1.0) } else { 0.0 };
        (self.x0 + s * (self.x1 - self.x0), self.y0 + s * (self.y1 - self.y0))
    }
}

/// The quantile coupling `γ̄ = (id × T)#μ`, `T = Q_ν ∘ F_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonePlan {
    source: Measure1D,
    target: Measure1D,
    segments: Vec<PlanSegment>,
}

/// Builds the quantile coupling between two measures of equal mass.
pub fn monotone_coupling(mu: &Measure1D, nu: &Measure1D) -> Result<MonotonePlan> {
    if mu.is_empty() || nu.is_empty() {
        return Err(Error::Invalid("cannot couple an empty measure".into()));
    }
    let mass = mu.mass();
    if (mass - nu.mass()).abs() > REPORT_TOL {
        return Err(Error::Invalid(format!("masses differ: {} vs {}", mass, nu.mass())));
    }
    let mut levels: Vec<f64> =
        mu.quantile_breaks().iter().chain(nu.quantile_breaks()).map(|t| t.clamp(0.0, mass)).collect();
    levels.sort_by(f64::total_cmp);
    let merge_tol = 1e-14 * mass.max(1.0);
    let mut breaks: Vec<f64> = Vec::with_capacity(levels.len());
    for t in levels {
        if breaks.last().is_none_or(|&last| t - last > merge_tol) {
            breaks.push(t);
        }
    }
    if let Some(last) = breaks.last_mut() {
        *last = mass;
    }

    let segments = breaks
        .windows(2)
        .map(|w| {
            let (t0, t1) = (w[0], w[1]);
            let mid = 0.5 * (t0 + t1);
            let (ip, iq) = (mu.piece_at_level(mid), nu.piece_at_level(mid));
            PlanSegment {
                t0,
                t1,
                x0: mu.quantile_on_piece(ip, t0),
                x1: mu.quantile_on_piece(ip, t1),
                y0: nu.quantile_on_piece(iq, t0),
                y1: nu.quantile_on_piece(iq, t1),
            }
        })
        .collect();
    Ok(MonotonePlan { source: mu.clone(), target: nu.clone(), segments })
}

impl MonotonePlan {
    pub fn source(&self) -> &Measure1D {
        &self.source
    }

    pub fn target(&self) -> &Measure1D {
        &self.target
    }

    pub fn segments(&self) -> &[PlanSegment] {
        &self.segments
    }

    /// Levels where the displacement may change slope, `0` and the mass included.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.segments.iter().map(|s| s.t0).collect();
        if let Some(last) = self.segments.last() {
            out.push(last.t1);
        }
        out
    }

    pub fn mass(&self) -> f64 {
        self.source.mass()
    }

    /// `d(t) = Q_ν(t) − Q_μ(t)`.
    pub fn displacement(&self, t: f64) -> Result<f64> {
        Ok(self.target.quantile(t)? - self.source.quantile(t)?)
    }

    /// The monotone map `T(x) = Q_ν(F_μ(x))`.
    pub fn map(&self, x: f64) -> f64 {
        let t = self.source.cdf(x).clamp(0.0, self.mass());
        self.target.quantile(t).expect("level within [0, mass]")
    }

    /// Couples `(Q_μ(t_k), Q_ν(t_k))` on the mid-point levels
    /// `t_k = (k − ½)/n · mass`.
    pub fn sample_pairs(&self, n: usize) -> Vec<(f64, f64)> {
        let mass = self.mass();
        (1..=n)
            .map(|k| {
                let t = (k as f64 - 0.5) / n as f64 * mass;
                (self.source.quantile(t).unwrap(), self.target.quantile(t).unwrap())
            })
            .collect()
    }

    /// Mass of `T#μ` on `(−∞, y]`, computed from the plan segments.
    pub fn pushforward_cdf(&self, y: f64) -> f64 {
        self.segments
            .iter()
            .map(|s| {
                let len = s.t1 - s.t0;
                if s.y1 <= y {
                    len
                } else if s.y0 > y {
                    0.0
                } else {
                    len * (y - s.y0) / (s.y1 - s.y0)
                }
            })
            .sum()
    }
}

/// `λ_C`: the maximum of `|d(t)|` over the closure of the quantile curve.
pub fn winf_value(plan: &MonotonePlan) -> f64 {
    plan.segments.iter().map(|s| s.displacement_start().abs().max(s.displacement_end().abs())).fold(0.0, f64::max)
}

/// End points `[(x₀, y₀), (x₁, y₁)]` of a straight piece of a pair set.
pub type PairSegment = [(f64, f64); 2];

/// The maximal displacement sets of the monotone plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSets {
    pub m_plus: IntervalUnion,
    pub m_minus: IntervalUnion,
    pub m_all: IntervalUnion,
    pub lambda_c: f64,
}

impl DisplacementSets {
    pub fn new(m_plus: IntervalUnion, m_minus: IntervalUnion, lambda_c: f64) -> Self {
        let m_all = m_plus.union(&m_minus);
        Self { m_plus, m_minus, m_all, lambda_c }
    }

    /// `M⁺ ∩ M⁻`, a finite set of points.
    pub fn crossing_points(&self) -> IntervalUnion {
        self.m_plus.intersection(&self.m_minus)
    }

    /// Sets of the problem reflected by `x ↦ −x`.
    pub fn reflect(&self) -> Self {
        Self::new(self.m_minus.negate(), self.m_plus.negate(), self.lambda_c)
    }

    /// The pair sets `{(x, x + λ_C) : x ∈ M⁺}` and `{(x, x − λ_C) : x ∈ M⁻}`,
    /// as segments between their end points.
    pub fn pair_sets(&self) -> (Vec<PairSegment>, Vec<PairSegment>) {
        let lift = |set: &IntervalUnion, s: f64| {
            set.components().iter().map(|&(lo, hi)| [(lo, lo + s), (hi, hi + s)]).collect::<Vec<_>>()
        };
        (lift(&self.m_plus, self.lambda_c), lift(&self.m_minus, -self.lambda_c))
    }

    pub fn approx_eq_sets(&self, other: &Self) -> bool {
        let tol = 1e-12;
        (self.lambda_c - other.lambda_c).abs() <= tol
            && self.m_plus.approx_eq(&other.m_plus, tol)
            && self.m_minus.approx_eq(&other.m_minus, tol)
    }

    /// Checks the separation property: nothing of `M⁻` lies in `]x̄, x̄ + 2λ_C[`
    /// for `x̄ ∈ M⁺`, and nothing of `M⁺` lies in `]x̄ − 2λ_C, x̄[` for
    /// `x̄ ∈ M⁻`. Tested on every endpoint and on `grid` points per component.
    /// Returns the first offending `x̄`.
    pub fn separation_violation(&self, grid: usize) -> Option<f64> {
        let two = 2.0 * self.lambda_c;
        let probe = |set: &IntervalUnion| {
            let mut pts = set.endpoints();
            pts.extend(set.grid(grid));
            pts
        };
        probe(&self.m_plus)
            .into_iter()
            .find(|&x| !self.m_minus.misses_open(x, x + two, STRUCT_TOL))
            .or_else(|| probe(&self.m_minus).into_iter().find(|&x| !self.m_plus.misses_open(x - two, x, STRUCT_TOL)))
    }

    /// `M⁺ ∩ M⁻` consists of isolated points at mutual distance `≥ 2λ_C`.
    pub fn crossing_is_finite_and_separated(&self) -> bool {
        let z = self.crossing_points();
        z.components().iter().all(|c| c.1 - c.0 <= STRUCT_TOL)
            && z.components().windows(2).all(|w| w[1].0 - w[0].1 >= 2.0 * self.lambda_c - STRUCT_TOL)
    }
}

/// Extracts `M⁺ = cl{Q_μ(t) : d(t) = λ_C}` and `M⁻ = cl{Q_μ(t) : d(t) = −λ_C}`
/// from the exact segment structure of the plan.
pub fn maximal_displacement_sets(plan: &MonotonePlan) -> Result<DisplacementSets> {
    let lambda = winf_value(plan);
    if lambda <= STRUCT_TOL {
        return Err(Error::DegenerateCritical);
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for s in plan.segments() {
        let (d0, d1) = (s.displacement_start(), s.displacement_end());
        for (target, out) in [(lambda, &mut plus), (-lambda, &mut minus)] {
            let hit0 = (d0 - target).abs() <= STRUCT_TOL;
            let hit1 = (d1 - target).abs() <= STRUCT_TOL;
            match (hit0, hit1) {
                (true, true) => out.push((s.x0, s.x1)),
                (true, false) => out.push((s.x0, s.x0)),
                (false, true) => out.push((s.x1, s.x1)),
                (false, false) => {}
            }
        }
    }
    Ok(DisplacementSets::new(IntervalUnion::from_intervals(plus), IntervalUnion::from_intervals(minus), lambda))
}

pub fn reflect(mu: &Measure1D) -> Measure1D {
    mu.reflect()
}

/// The monotone plan of the reflected problem `(−x, −y)`.
pub fn reflect_plan(plan: &MonotonePlan) -> Result<MonotonePlan> {
    monotone_coupling(&plan.source.reflect(), &plan.target.reflect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::measure_from_pieces;

    fn e2() -> (Measure1D, Measure1D) {
        (Measure1D::uniform(0.0, 2.0).unwrap(), measure_from_pieces(&[(0.0, 1.0, 0.5), (3.0, 4.0, 0.5)]).unwrap())
    }

    fn e3() -> (Measure1D, Measure1D) {
        (Measure1D::uniform(0.0, 1.0).unwrap(), measure_from_pieces(&[(-1.0, -0.5, 1.0), (1.5, 2.0, 1.0)]).unwrap())
    }

    #[test]
    fn translation_plan() {
        let mu = Measure1D::uniform(0.0, 1.0).unwrap();
        let nu = Measure1D::uniform(1.0, 2.0).unwrap();
        let plan = monotone_coupling(&mu, &nu).unwrap();
        for x in [0.0, 0.3, 0.77, 1.0] {
            assert!((plan.map(x) - (x + 1.0)).abs() < 1e-15);
        }
        assert_eq!(winf_value(&plan), 1.0);
        let sets = maximal_displacement_sets(&plan).unwrap();
        assert_eq!(sets.m_plus.components(), &[(0.0, 1.0)]);
        assert!(sets.m_minus.is_empty());
    }

    #[test]
    fn split_target_plan() {
        let (mu, nu) = e2();
        let plan = monotone_coupling(&mu, &nu).unwrap();
        for x in [0.0, 0.4, 0.99] {
            assert!((plan.map(x) - x).abs() < 1e-15, "T({x})");
        }
        // the plateau level F_μ(1) = ½ maps to the left edge of the next piece
        assert_eq!(plan.map(1.0), 3.0);
        for x in [1.2, 1.5, 2.0] {
            assert!((plan.map(x) - (x + 2.0)).abs() < 1e-15, "T({x})");
        }
        assert_eq!(winf_value(&plan), 2.0);
        let sets = maximal_displacement_sets(&plan).unwrap();
        assert_eq!(sets.m_plus.components(), &[(1.0, 2.0)]);
        assert!(sets.m_minus.is_empty());
    }

    #[test]
    fn crossing_displacement_sets() {
        let (mu, nu) = e3();
        let plan = monotone_coupling(&mu, &nu).unwrap();
        assert_eq!(winf_value(&plan), 1.0);
        let sets = maximal_displacement_sets(&plan).unwrap();
        assert_eq!(sets.m_minus.components(), &[(0.0, 0.5)]);
        assert_eq!(sets.m_plus.components(), &[(0.5, 1.0)]);
        assert_eq!(sets.crossing_points().components(), &[(0.5, 0.5)]);
        assert!(sets.crossing_is_finite_and_separated());
        assert_eq!(sets.separation_violation(100), None);
    }

    #[test]
    fn identical_measures_are_degenerate() {
        let (mu, _) = e2();
        let plan = monotone_coupling(&mu, &mu).unwrap();
        assert_eq!(winf_value(&plan), 0.0);
        for x in [0.0, 0.5, 2.0] {
            assert!((plan.map(x) - x).abs() < 1e-15);
        }
        assert_eq!(maximal_displacement_sets(&plan), Err(Error::DegenerateCritical));
    }

    #[test]
    fn reflection() {
        let u = Measure1D::uniform(1.0, 2.0).unwrap();
        assert_eq!(reflect(&u).support().components(), &[(-2.0, -1.0)]);
        assert_eq!(reflect(&reflect(&u)), u);

        let (mu, nu) = e3();
        let plan = monotone_coupling(&mu, &nu).unwrap();
        let sets = maximal_displacement_sets(&plan).unwrap();
        let rsets = maximal_displacement_sets(&reflect_plan(&plan).unwrap()).unwrap();
        assert_eq!(rsets.m_plus.components(), &[(-0.5, 0.0)]);
        assert!(rsets.m_plus.approx_eq(&sets.m_minus.negate(), 0.0));
        assert!(rsets.approx_eq_sets(&sets.reflect()));
    }

    #[test]
    fn separation_detects_close_opposite_sets() {
        let sets = DisplacementSets::new(IntervalUnion::interval(0.0, 1.0), IntervalUnion::interval(1.5, 2.0), 1.0);
        assert_eq!(sets.separation_violation(10), Some(0.0));
    }

    #[test]
    fn masses_must_match() {
        let mu = Measure1D::uniform(0.0, 1.0).unwrap();
        let half = mu.restrict(0.0, 0.5);
        assert!(monotone_coupling(&mu, &half).is_err());
    }
}
