//! Non-trivial Kantorovich potentials for the L∞ transport problem.
//!
//! From the maximal displacement sets of the monotone plan we build a signed
//! measure `ρ = ρ⁺ − ρ⁻` with `supp ρ⁺ = M⁺`, `supp ρ⁻ = M⁻`, and set
//!
//! ```text
//! φ(x) = −ρ((−∞, x])
//! ψ(y) = inf { −φ(x) : x ∈ [y − λ_C, y + λ_C] }
//! ```
//!
//! The pair is dual feasible by construction and saturates along the monotone
//! plan, so its dual value is zero. Because `M±` are finite unions of intervals
//! here, `ρ±` are Lebesgue segments on the components plus atoms at the
//! component end points; that is enough for the supports and for the jumps at
//! every extreme point.

use serde::{Deserialize, Serialize};

use crate::coupling::{maximal_displacement_sets, monotone_coupling, winf_value, DisplacementSets};
use crate::error::{Error, Result};
use crate::measures::{Atom, BVPotential, Breakpoint, IntervalUnion, Measure1D, SignedMeasure1D, SignedSegment};
use crate::{REPORT_TOL, STRUCT_TOL};

/// Free weights of the finite construction of `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoConfig {
    /// Atom weight at each end point of a component of `M⁺` (resp. `M⁻`)
    /// that is not a crossing point.
    pub endpoint_weight: f64,
    /// Density of `ρ±` on the interior of each non-degenerate component.
    pub interior_density: f64,
    /// Weight of `ρ⁺` at every point of `M⁺ ∩ M⁻`.
    pub z_plus_weight: f64,
    /// Weight of `ρ⁻` at every point of `M⁺ ∩ M⁻`.
    pub z_minus_weight: f64,
}

/// The default puts a net positive atom `ρ({z}) = 1` on every crossing point
/// `z ∈ M⁺ ∩ M⁻`. Such a `z` is a left end point of `M⁺`, and a positive atom
/// there is what makes `φ` drop at `z`, keeps `z` in the support of the
/// negative part of `φ′`, and pins `B_r(z)` to the single point `z + λ_C`.
/// The opposite choice (`ρ({z}) < 0`) still gives a Kantorovich pair but loses
/// those three properties at `z`.
impl Default for RhoConfig {
    fn default() -> Self {
        Self { endpoint_weight: 1.0, interior_density: 1.0, z_plus_weight: 2.0, z_minus_weight: 1.0 }
    }
}

impl RhoConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.endpoint_weight, self.interior_density, self.z_plus_weight, self.z_minus_weight];
        if all.iter().all(|w| w.is_finite() && *w > 0.0) {
            Ok(())
        } else {
            Err(Error::Invalid(format!("rho weights must be strictly positive: {self:?}")))
        }
    }
}

/// Builds `ρ = ρ⁺ − ρ⁻` on the maximal displacement sets.
pub fn build_rho(sets: &DisplacementSets, cfg: &RhoConfig) -> Result<SignedMeasure1D> {
    cfg.validate()?;
    if sets.lambda_c <= STRUCT_TOL {
        return Err(Error::DegenerateCritical);
    }
    let crossings: Vec<f64> = sets.crossing_points().components().iter().map(|c| c.0).collect();
    let near_crossing = |x: f64| crossings.iter().any(|&z| (z - x).abs() <= STRUCT_TOL);

    let mut atoms = Vec::new();
    let mut segments = Vec::new();
    for (set, sign) in [(&sets.m_plus, 1.0), (&sets.m_minus, -1.0)] {
        for &(lo, hi) in set.components() {
            if hi > lo {
                segments.push(SignedSegment { lo, hi, density: sign * cfg.interior_density });
            }
            for x in set_endpoints(lo, hi) {
                if !near_crossing(x) {
                    atoms.push(Atom { x, weight: sign * cfg.endpoint_weight });
                }
            }
        }
    }
    for &z in &crossings {
        atoms.push(Atom { x: z, weight: cfg.z_plus_weight - cfg.z_minus_weight });
    }
    SignedMeasure1D::new(atoms, segments)
}

fn set_endpoints(lo: f64, hi: f64) -> Vec<f64> {
    if hi > lo {
        vec![lo, hi]
    } else {
        vec![lo]
    }
}

/// Smallest float not below the exact sum `a + b`.
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let (s, err) = two_sum(a, b);
    if err > 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// Largest float not above the exact sum `a + b`.
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let (s, err) = two_sum(a, b);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// `φ(x) = −ρ((−∞, x])`.
pub fn build_phi(rho: &SignedMeasure1D) -> BVPotential {
    rho.distribution_function().neg()
}

/// Infimum of `f` over the closed window `[lo, hi]`, with a point where it is
/// attained or approached.
pub fn window_inf(f: &BVPotential, lo: f64, hi: f64) -> (f64, f64) {
    let mut best = (f.eval(lo), lo);
    let mut consider = |v: f64, at: f64| {
        if v < best.0 {
            best = (v, at);
        }
    };
    if hi > lo {
        consider(f.eval(hi), hi);
        consider(f.left_limit(hi), hi);
        let bps = f.breakpoints();
        let start = bps.partition_point(|b| b.x <= lo);
        for bp in bps[start..].iter().take_while(|b| b.x < hi) {
            consider(bp.value, bp.x);
            consider(f.left_limit(bp.x), bp.x);
        }
    }
    best
}

/// Supremum of `f` over the closed window `[lo, hi]`.
pub fn window_sup(f: &BVPotential, lo: f64, hi: f64) -> (f64, f64) {
    let (v, at) = window_inf(&f.neg(), lo, hi);
    (-v, at)
}

/// An affine candidate `value + slope · (y − anchor)`.
#[derive(Debug, Clone, Copy)]
struct Line {
    anchor: f64,
    value: f64,
    slope: f64,
}

impl Line {
    fn at(&self, y: f64) -> f64 {
        if self.slope == 0.0 {
            self.value
        } else {
            self.value + self.slope * (y - self.anchor)
        }
    }
}

/// `ψ(y) = inf { −φ(x) : |x − y| ≤ λ }`, computed symbolically.
///
/// Between consecutive events `xₖ ± λ` (`xₖ` the breakpoints of `φ`) the window
/// contains a fixed set of breakpoints, its two ends move along fixed affine
/// pieces, and `ψ` is the lower envelope of those two lines and one constant.
pub fn build_psi(phi: &BVPotential, lambda: f64) -> Result<BVPotential> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::DomainError { value: lambda, domain: "[0, ∞)" });
    }
    let g = phi.neg();
    let xs: Vec<f64> = g.breakpoint_xs().collect();
    if xs.is_empty() {
        return Ok(BVPotential::constant(g.left_value()));
    }
    // Events are rounded outward so that the window of every float `y` in a
    // cell is exactly the one the cell was built for.
    let mut events: Vec<f64> = xs.iter().flat_map(|&x| [add_down(x, -lambda), add_up(x, lambda)]).collect();
    events.sort_by(f64::total_cmp);
    events.dedup();

    let mut out: Vec<Breakpoint> = Vec::new();
    for (j, &lo) in events.iter().enumerate() {
        let hi = events.get(j + 1).copied().unwrap_or(f64::INFINITY);
        let probe = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };

        let left = g.segment_at(probe - lambda);
        let right = g.segment_at(probe + lambda);
        let mut lines = vec![
            Line { anchor: lo, value: left.eval(lo - lambda), slope: left.slope },
            Line { anchor: lo, value: right.eval(lo + lambda), slope: right.slope },
        ];
        let inner = xs
            .iter()
            .filter(|&&x| probe - lambda < x && x < probe + lambda)
            .map(|&x| g.eval(x).min(g.left_limit(x)))
            .fold(f64::INFINITY, f64::min);
        if inner.is_finite() {
            lines.push(Line { anchor: lo, value: inner, slope: 0.0 });
        }
        lower_envelope(&lines, lo, hi, &mut out);
    }
    let psi = BVPotential::from_breakpoints(g.left_value(), out)?;
    Ok(psi.simplified(1e-13))
}

/// Appends the lower envelope of `lines` over `[lo, hi)` as breakpoints.
fn lower_envelope(lines: &[Line], lo: f64, hi: f64, out: &mut Vec<Breakpoint>) {
    let mut cuts = vec![lo];
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            if a.slope != b.slope {
                let y = lo + (b.at(lo) - a.at(lo)) / (a.slope - b.slope);
                if y > lo && y < hi {
                    cuts.push(y);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    for (k, &start) in cuts.iter().enumerate() {
        let end = cuts.get(k + 1).copied().unwrap_or(hi);
        let probe = if end.is_finite() { 0.5 * (start + end) } else { start + 1.0 };
        let best =
            lines.iter().min_by(|a, b| a.at(probe).total_cmp(&b.at(probe))).expect("at least one candidate line");
        let value = lines.iter().map(|l| l.at(start)).fold(f64::INFINITY, f64::min);
        let bp = Breakpoint { x: start, value: value.min(best.at(start)), slope: best.slope };
        match out.last_mut() {
            Some(last) if last.x == start => *last = bp,
            _ => out.push(bp),
        }
    }
}

/// `(φ, ψ)` together with the objects they are built from.
#[derive(Debug, Clone, PartialEq)]
pub struct KantorovichPair {
    pub lambda: f64,
    /// `None` when `μ = ν`.
    pub sets: Option<DisplacementSets>,
    pub rho: SignedMeasure1D,
    pub phi: BVPotential,
    pub psi: BVPotential,
}

/// Runs the whole construction from the two measures. When `λ_C = 0` the
/// pair is `φ = ψ = 0`.
pub fn kantorovich_pair(mu: &Measure1D, nu: &Measure1D, cfg: &RhoConfig) -> Result<KantorovichPair> {
    let plan = monotone_coupling(mu, nu)?;
    let lambda = winf_value(&plan);
    match maximal_displacement_sets(&plan) {
        Err(Error::DegenerateCritical) => Ok(KantorovichPair {
            lambda,
            sets: None,
            rho: SignedMeasure1D::zero(),
            phi: BVPotential::zero(),
            psi: BVPotential::zero(),
        }),
        Err(e) => Err(e),
        Ok(sets) => {
            let rho = build_rho(&sets, cfg)?;
            let phi = build_phi(&rho);
            let psi = build_psi(&phi, lambda)?;
            Ok(KantorovichPair { lambda, sets: Some(sets), rho, phi, psi })
        }
    }
}

/// Certificate of membership in the dual feasibility class `U_λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub feasible: bool,
    pub worst_violation: f64,
    pub violating_pair: Option<(f64, f64)>,
    pub dual_value: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityOptions {
    /// Spacing of the dense grid laid over `supp μ`, on top of the exhaustive
    /// candidate set. Zero disables the grid.
    pub grid_step: f64,
    pub tol: f64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        Self { grid_step: 1e-3, tol: REPORT_TOL }
    }
}

/// Largest value of `φ(x) + ψ(y)` over `x ∈ supp μ`, `y ∈ supp ν`,
/// `|y − x| ≤ λ`.
///
/// For fixed `x` the supremum over `y` is exact. Over `x` the function is
/// piecewise convex between the candidate points (breakpoints of `φ`, `ψ`,
/// piece end points of `μ`, `ν`, and all their `±λ` shifts), so it is probed
/// at every candidate, just inside both ends of every cell, and on the grid.
pub fn check_dual_feasibility(
    phi: &BVPotential,
    psi: &BVPotential,
    lambda: f64,
    mu: &Measure1D,
    nu: &Measure1D,
    opts: &FeasibilityOptions,
) -> DualReport {
    let supp_mu = mu.support();
    let supp_nu = nu.support();

    let mut base: Vec<f64> = phi
        .breakpoint_xs()
        .chain(psi.breakpoint_xs())
        .chain(mu.pieces().iter().flat_map(|p| [p.a, p.b]))
        .chain(nu.pieces().iter().flat_map(|p| [p.a, p.b]))
        .collect();
    base.extend(base.clone().iter().flat_map(|&p| [p - lambda, p + lambda]));
    base.retain(|&x| supp_mu.contains(x));
    base.sort_by(f64::total_cmp);
    base.dedup();

    let mut probes = base.clone();
    for w in base.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        if supp_mu.contains(mid) {
            let delta = 1e-7 * (b - a);
            probes.extend([a + delta, mid, b - delta]);
        }
    }
    if opts.grid_step > 0.0 {
        probes.extend(supp_mu.grid_with_step(opts.grid_step));
    }

    let mut worst = f64::NEG_INFINITY;
    let mut worst_pair = None;
    for &x in &probes {
        // Exactly the floats `y` with `|x − y| ≤ λ`, met with supp ν without
        // any snapping tolerance.
        let (band_lo, band_hi) = (add_up(x, -lambda), add_down(x, lambda));
        let window = supp_nu
            .components()
            .iter()
            .map(|&(lo, hi)| (lo.max(band_lo), hi.min(band_hi)))
            .filter(|&(lo, hi)| lo <= hi);
        for (lo, hi) in window {
            let (sup, y) = window_sup(psi, lo, hi);
            let v = phi.eval(x) + sup;
            if v > worst {
                worst = v;
                worst_pair = Some((x, y));
            }
        }
    }
    let feasible = worst <= opts.tol;
    DualReport {
        feasible,
        worst_violation: worst,
        violating_pair: if feasible { None } else { worst_pair },
        dual_value: dual_value(phi, psi, mu, nu),
        lambda,
    }
}

/// `∫ φ dμ + ∫ ψ dν`.
pub fn dual_value(phi: &BVPotential, psi: &BVPotential, mu: &Measure1D, nu: &Measure1D) -> f64 {
    mu.integrate(phi) + nu.integrate(psi)
}

/// `B_r(x) = { y ∈ [x − λ, x + λ] : φ(x) + ψ(y) = 0 }`, with equality up to
/// `REPORT_TOL`. Flat pieces sitting on the level contribute their closure.
pub fn b_r_set(phi: &BVPotential, psi: &BVPotential, lambda: f64, x: f64) -> IntervalUnion {
    let level = -phi.eval(x);
    let (lo, hi) = (x - lambda, x + lambda);
    let tol = REPORT_TOL;
    let mut parts = Vec::new();
    for seg in psi.segments() {
        let p = seg.start.max(lo);
        let q = seg.end.min(hi);
        if p >= q {
            continue;
        }
        let (vp, vq) = (seg.eval(p), seg.eval(q));
        if (vp - level).abs() <= tol && (vq - level).abs() <= tol {
            parts.push((p, q));
        } else if seg.slope != 0.0 {
            let y = p + (level - vp) / seg.slope;
            if y >= p && y < q {
                parts.push((y, y));
            }
        } else if (vp - level).abs() <= tol {
            parts.push((p, q));
        }
    }
    if (psi.eval(hi) - level).abs() <= tol {
        parts.push((hi, hi));
    }
    IntervalUnion::from_intervals(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WitnessSide {
    /// `φ = 1_S`, `ψ = −1_{S^λ}`: value `μ(S) − ν(S^λ)`.
    Source,
    /// `φ = −1_{S^λ}`, `ψ = 1_S`: value `ν(S) − μ(S^λ)`.
    Target,
}

/// Indicator pair with positive dual value, certifying `λ < W∞(μ, ν)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub side: WitnessSide,
}

impl Witness {
    /// The dual pair `(φ, ψ)` realising this witness.
    pub fn potentials(&self, lambda: f64) -> (BVPotential, BVPotential) {
        let ind =
            |lo: f64, hi: f64, c: f64| BVPotential::new(0.0, vec![(lo, c, 0.0), (hi, 0.0, 0.0)]).expect("lo < hi");
        // The positive indicator drops the null end point `hi`; the negative one
        // is padded so that rounding in `x ± λ` cannot step outside it.
        let pad = 1e-12 * (1.0 + self.lo.abs().max(self.hi.abs()) + lambda);
        let plus = ind(self.lo, self.hi, 1.0);
        let minus = ind(self.lo - lambda - pad, self.hi + lambda + pad, -1.0);
        match self.side {
            WitnessSide::Source => (plus, minus),
            WitnessSide::Target => (minus, plus),
        }
    }
}

/// Searches intervals `S` for the best indicator pair at threshold `λ`.
///
/// The value `μ([s₀, s₁]) − ν([s₀ − λ, s₁ + λ])` is piecewise linear and
/// separable in `s₀`, `s₁`, with breakpoints at the piece end points of `μ` and
/// the end points of `ν` shifted by `∓λ`; all pairs of those candidates (plus a
/// grid of spacing `grid_step`) are tried, on both sides.
pub fn criticality_witness(mu: &Measure1D, nu: &Measure1D, lambda: f64, grid_step: f64) -> Result<Witness> {
    if !(lambda >= 0.0) {
        return Err(Error::DomainError { value: lambda, domain: "[0, ∞)" });
    }
    let a = best_indicator(mu, nu, lambda, grid_step, WitnessSide::Source);
    let b = best_indicator(nu, mu, lambda, grid_step, WitnessSide::Target);
    let best = if b.value > a.value { b } else { a };
    if best.value > REPORT_TOL {
        Ok(best)
    } else {
        Err(Error::NoWitnessFound { best_value: best.value })
    }
}

fn best_indicator(from: &Measure1D, to: &Measure1D, lambda: f64, grid_step: f64, side: WitnessSide) -> Witness {
    let (lo_s, hi_s) = (from.inf_support().unwrap_or(0.0), from.sup_support().unwrap_or(0.0));
    let own: Vec<f64> = from.pieces().iter().flat_map(|p| [p.a, p.b]).collect();
    let mut grid = Vec::new();
    if grid_step > 0.0 {
        grid = IntervalUnion::interval(lo_s, hi_s).grid_with_step(grid_step);
    }
    let clean = |mut v: Vec<f64>| {
        v.retain(|x| *x >= lo_s && *x <= hi_s);
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let starts = clean(
        own.iter()
            .copied()
            .chain(to.pieces().iter().flat_map(|p| [p.a + lambda, p.b + lambda]))
            .chain(grid.iter().copied())
            .collect(),
    );
    let ends = clean(
        own.iter().copied().chain(to.pieces().iter().flat_map(|p| [p.a - lambda, p.b - lambda])).chain(grid).collect(),
    );

    let mut best = Witness { lo: lo_s, hi: hi_s, value: f64::NEG_INFINITY, side };
    for &s0 in &starts {
        let head = to.cdf(s0 - lambda) - from.cdf(s0);
        for &s1 in ends.iter().filter(|&&s1| s1 > s0) {
            let v = head + from.cdf(s1) - to.cdf(s1 + lambda);
            if v > best.value {
                best = Witness { lo: s0, hi: s1, value: v, side };
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::{maximal_displacement_sets, monotone_coupling};
    use crate::measures::measure_from_pieces;

    fn e1_sets() -> DisplacementSets {
        DisplacementSets::new(IntervalUnion::interval(0.0, 1.0), IntervalUnion::empty(), 1.0)
    }

    fn e4() -> (Measure1D, Measure1D) {
        (
            Measure1D::uniform(0.0, 2.0).unwrap(),
            measure_from_pieces(&[(0.0, 1.0, 0.5), (1.0, 2.0, 0.25), (2.0, 2.5, 0.5)]).unwrap(),
        )
    }

    #[test]
    fn rho_on_a_single_plus_component() {
        let rho = build_rho(&e1_sets(), &RhoConfig::default()).unwrap();
        assert_eq!(rho.atoms(), &[Atom { x: 0.0, weight: 1.0 }, Atom { x: 1.0, weight: 1.0 }]);
        assert_eq!(rho.segments(), &[SignedSegment { lo: 0.0, hi: 1.0, density: 1.0 }]);
        assert_eq!(rho.total_variation(), 3.0);
    }

    #[test]
    fn rho_sign_symmetry() {
        let sets = DisplacementSets::new(IntervalUnion::empty(), IntervalUnion::interval(0.0, 1.0), 1.0);
        let rho = build_rho(&sets, &RhoConfig::default()).unwrap();
        let plus = build_rho(&e1_sets(), &RhoConfig::default()).unwrap();
        assert_eq!(rho, plus.scale(-1.0));
    }

    #[test]
    fn rho_with_crossing_point() {
        let sets = DisplacementSets::new(IntervalUnion::interval(0.5, 1.0), IntervalUnion::interval(0.0, 0.5), 1.0);
        let rho = build_rho(&sets, &RhoConfig::default()).unwrap();
        assert_eq!(
            rho.atoms(),
            &[Atom { x: 0.0, weight: -1.0 }, Atom { x: 0.5, weight: 1.0 }, Atom { x: 1.0, weight: 1.0 }]
        );
        let flipped = RhoConfig { z_plus_weight: 1.0, z_minus_weight: 2.0, ..Default::default() };
        assert_eq!(build_rho(&sets, &flipped).unwrap().atom_weight(0.5), -1.0);
        assert_eq!(
            rho.segments(),
            &[SignedSegment { lo: 0.0, hi: 0.5, density: -1.0 }, SignedSegment { lo: 0.5, hi: 1.0, density: 1.0 }]
        );
    }

    #[test]
    fn rho_rejects_degenerate_and_bad_weights() {
        let sets = DisplacementSets::new(IntervalUnion::empty(), IntervalUnion::empty(), 0.0);
        assert_eq!(build_rho(&sets, &RhoConfig::default()), Err(Error::DegenerateCritical));
        let cfg = RhoConfig { endpoint_weight: 0.0, ..Default::default() };
        assert!(build_rho(&e1_sets(), &cfg).is_err());
    }

    #[test]
    fn phi_examples() {
        let phi = build_phi(&build_rho(&e1_sets(), &RhoConfig::default()).unwrap());
        assert_eq!(phi.eval(-0.5), 0.0);
        assert_eq!(phi.eval(0.0), -1.0);
        assert_eq!(phi.eval(0.5), -1.5);
        assert_eq!(phi.left_limit(1.0), -2.0);
        assert_eq!(phi.eval(1.0), -3.0);
        assert_eq!(phi.eval(4.0), -3.0);
        assert_eq!(build_phi(&SignedMeasure1D::zero()), BVPotential::zero());

        let sets = DisplacementSets::new(IntervalUnion::interval(1.5, 2.0), IntervalUnion::empty(), 0.5);
        let phi4 = build_phi(&build_rho(&sets, &RhoConfig::default()).unwrap());
        assert_eq!(phi4.eval(1.4), 0.0);
        assert_eq!(phi4.eval(1.5), -1.0);
        assert_eq!(phi4.eval(1.75), -1.25);
        assert_eq!(phi4.eval(2.0), -2.5);
    }

    #[test]
    fn psi_examples() {
        let phi = build_phi(&build_rho(&e1_sets(), &RhoConfig::default()).unwrap());
        let psi = build_psi(&phi, 1.0).unwrap();
        assert_eq!(psi.eval(1.0), 1.0);
        assert_eq!(psi.eval(1.5), 1.5);
        assert_eq!(psi.eval(2.0), 3.0);
        assert_eq!(psi.eval(0.99), 0.0);
        assert_eq!(build_psi(&BVPotential::zero(), 0.7).unwrap(), BVPotential::zero());

        let sets = DisplacementSets::new(IntervalUnion::interval(1.5, 2.0), IntervalUnion::empty(), 0.5);
        let phi4 = build_phi(&build_rho(&sets, &RhoConfig::default()).unwrap());
        let psi4 = build_psi(&phi4, 0.5).unwrap();
        for y in [0.0, 1.0, 1.99] {
            assert_eq!(psi4.eval(y), 0.0);
        }
        assert_eq!(psi4.eval(2.0), 1.0);
        assert!((psi4.eval(2.25) - 1.25).abs() < 1e-15);
        assert_eq!(psi4.eval(2.5), 2.5);
    }

    #[test]
    fn psi_matches_direct_window_inf() {
        let phi = BVPotential::new(
            0.3,
            vec![(-1.0, 2.0, -1.5), (0.0, -0.5, 2.0), (0.4, 1.0, 0.0), (1.3, -2.0, 0.5), (2.0, 0.0, 0.0)],
        )
        .unwrap();
        let g = phi.neg();
        for lambda in [0.0, 0.2, 0.45, 1.0] {
            let psi = build_psi(&phi, lambda).unwrap();
            for k in 0..=4000 {
                let y = -3.0 + 7.0 * k as f64 / 4000.0;
                let direct = window_inf(&g, y - lambda, y + lambda).0;
                assert!((psi.eval(y) - direct).abs() < 1e-12, "λ={lambda} y={y}: {} vs {direct}", psi.eval(y));
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let (mu, nu) = (Measure1D::uniform(0.0, 1.0).unwrap(), Measure1D::uniform(1.0, 2.0).unwrap());
        let phi = build_phi(&build_rho(&e1_sets(), &RhoConfig::default()).unwrap());
        let psi = build_psi(&phi, 1.0).unwrap();
        let rep = check_dual_feasibility(&phi, &psi, 1.0, &mu, &nu, &FeasibilityOptions::default());
        assert!(rep.feasible, "{rep:?}");
        assert!(rep.worst_violation <= 1e-12);
        assert!(rep.dual_value.abs() < 1e-12);
        assert!((mu.integrate(&phi) + 1.5).abs() < 1e-12);
        assert!((nu.integrate(&psi) - 1.5).abs() < 1e-12);

        let bad = check_dual_feasibility(
            &BVPotential::constant(1.0),
            &BVPotential::zero(),
            0.3,
            &mu,
            &nu,
            &FeasibilityOptions::default(),
        );
        assert!(!bad.feasible);
        assert_eq!(bad.worst_violation, 1.0);
        let (x, y) = bad.violating_pair.unwrap();
        assert!((y - x).abs() <= 0.3 + 1e-15);
    }

    fn e3() -> (Measure1D, Measure1D) {
        (Measure1D::uniform(0.0, 1.0).unwrap(), measure_from_pieces(&[(-1.0, -0.5, 1.0), (1.5, 2.0, 1.0)]).unwrap())
    }

    #[test]
    fn crossing_weights_both_give_kantorovich_pairs() {
        let (mu, nu) = e3();
        let flipped = RhoConfig { z_plus_weight: 1.0, z_minus_weight: 2.0, ..Default::default() };
        for (cfg, phi_int) in [(RhoConfig::default(), 0.75), (flipped, 1.75)] {
            let pair = kantorovich_pair(&mu, &nu, &cfg).unwrap();
            assert!((mu.integrate(&pair.phi) - phi_int).abs() < 1e-12);
            assert!((nu.integrate(&pair.psi) + phi_int).abs() < 1e-12);
            let rep = check_dual_feasibility(&pair.phi, &pair.psi, 1.0, &mu, &nu, &FeasibilityOptions::default());
            assert!(rep.feasible, "{rep:?}");
        }
        let pair = kantorovich_pair(&mu, &nu, &RhoConfig::default()).unwrap();
        assert_eq!(b_r_set(&pair.phi, &pair.psi, 1.0, 0.5).components(), &[(1.5, 1.5)]);
        // with a negative atom at the crossing point every y of the window saturates
        let pair = kantorovich_pair(&mu, &nu, &flipped).unwrap();
        assert_eq!(b_r_set(&pair.phi, &pair.psi, 1.0, 0.5).components(), &[(-0.5, 1.5)]);
    }

    #[test]
    fn b_r_examples() {
        let (mu, nu) = e4();
        let plan = monotone_coupling(&mu, &nu).unwrap();
        let sets = maximal_displacement_sets(&plan).unwrap();
        let phi = build_phi(&build_rho(&sets, &RhoConfig::default()).unwrap());
        let psi = build_psi(&phi, 0.5).unwrap();
        assert_eq!(b_r_set(&phi, &psi, 0.5, 1.5).components(), &[(2.0, 2.0)]);
        // plateau: φ(0.2) = 0 and ψ = 0 on (−∞, 2)
        assert_eq!(b_r_set(&phi, &psi, 0.5, 0.2).components(), &[(-0.3, 0.7)]);

        let phi1 = build_phi(&build_rho(&e1_sets(), &RhoConfig::default()).unwrap());
        let psi1 = build_psi(&phi1, 1.0).unwrap();
        let b = b_r_set(&phi1, &psi1, 1.0, 0.5);
        assert_eq!(b.len(), 1);
        assert!((b.components()[0].0 - 1.5).abs() < 1e-12 && (b.components()[0].1 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn witness_examples() {
        let (mu, nu) = (Measure1D::uniform(0.0, 1.0).unwrap(), Measure1D::uniform(1.0, 2.0).unwrap());
        let w = criticality_witness(&mu, &nu, 0.9, 1e-2).unwrap();
        assert!((w.value - 0.1).abs() < 1e-12, "{w:?}");
        assert!(matches!(criticality_witness(&mu, &nu, 1.0, 1e-2), Err(Error::NoWitnessFound { .. })));

        let mu2 = Measure1D::uniform(0.0, 2.0).unwrap();
        let nu2 = measure_from_pieces(&[(0.0, 1.0, 0.5), (3.0, 4.0, 0.5)]).unwrap();
        // hand value of the interval [1, 2]
        assert!((mu2.mass_of(1.0, 2.0) - nu2.mass_of(-0.5, 3.5) + 0.25).abs() < 1e-15);
        let w2 = criticality_witness(&mu2, &nu2, 1.5, 1e-2).unwrap();
        assert!(w2.value > 0.0);
        let (phi, psi) = w2.potentials(1.5);
        let rep = check_dual_feasibility(&phi, &psi, 1.5, &mu2, &nu2, &FeasibilityOptions::default());
        assert!(rep.feasible, "{rep:?}");
        assert!((rep.dual_value - w2.value).abs() < 1e-10);
    }

    #[test]
    fn directed_sums_bracket_the_exact_value() {
        // 0.1 + 0.2 rounds up to 0.30000000000000004.
        assert_eq!(add_up(0.1, 0.2), 0.1 + 0.2);
        assert_eq!(add_down(0.1, 0.2), (0.1 + 0.2_f64).next_down());
        assert_eq!(add_up(1.0, 0.5), 1.5);
        assert_eq!(add_down(1.0, 0.5), 1.5);
        let (x, lambda) = (0.3647148273736949, 1.289964274680561);
        assert!(add_down(x, lambda) < add_up(x, lambda));
    }

    #[test]
    fn feasibility_survives_sub_ulp_band_edges() {
        // A step of φ whose shifted position x + λ is not representable.
        let (b, lambda) = (0.3647148273736949, 1.289964274680561);
        let phi = BVPotential::new(0.0, vec![(b, -1.0, 0.0)]).unwrap();
        let psi = build_psi(&phi, lambda).unwrap();
        let mu = measure_from_pieces(&[(0.0, 1.0, 1.0)]).unwrap();
        let nu = measure_from_pieces(&[(1.0, 2.0, 1.0)]).unwrap();
        let rep = check_dual_feasibility(&phi, &psi, lambda, &mu, &nu, &FeasibilityOptions::default());
        assert!(rep.feasible, "{rep:?}");
        assert_eq!(rep.worst_violation, 0.0);
    }
}
