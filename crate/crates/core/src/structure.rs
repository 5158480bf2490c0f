//! Structure of all optimal plans.
//!
//! With `[a, b] = hull supp μ`, `[c, d] = hull supp ν` and `M = M⁺ ∪ M⁻`, the
//! open set `]a, b[ \ M` is a finite union of intervals `]aᵢ, bᵢ[`. Every
//! optimal plan is the rigid translation by `+λ_C` on `M⁺`, by `−λ_C` on `M⁻`,
//! plus, for each `i`, an arbitrary plan between `μ⌊[aᵢ, bᵢ]` and
//! `ν⌊[cᵢ, dᵢ]` moving no point farther than `λ_C`.
//!
//! General plans are handled as finite atom lists: the monotone samples at the
//! levels `(k − ½)/n` are split into rigid atoms and per-component samples, and
//! any band-feasible matching of the latter gives an optimal plan at
//! resolution `n`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::coupling::{maximal_displacement_sets, monotone_coupling, winf_value, DisplacementSets};
use crate::error::{Error, Result};
use crate::measures::{IntervalUnion, Measure1D};
use crate::oracle::{band_feasible_coupling, SampleSet, BAND_TOL};
use crate::{REPORT_TOL, STRUCT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanAtom {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

impl PlanAtom {
    pub fn displacement(&self) -> f64 {
        self.y - self.x
    }
}

/// A transport plan given by finitely many weighted point pairs.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscretePlan {
    atoms: Vec<PlanAtom>,
}

impl DiscretePlan {
    pub fn new(atoms: Vec<PlanAtom>) -> Self {
        Self { atoms }
    }

    /// Rejects non-finite coordinates and non-positive weights.
    pub fn validated(atoms: Vec<PlanAtom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.x.is_finite() && a.y.is_finite() && a.w.is_finite() && a.w > 0.0) {
                return Err(Error::Invalid(format!("plan atom {i} is invalid: {a:?}")));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[PlanAtom] {
        &self.atoms
    }

    pub fn atoms_mut(&mut self) -> &mut [PlanAtom] {
        &mut self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    pub fn max_displacement(&self) -> f64 {
        self.atoms.iter().map(|a| a.displacement().abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { atoms: self.atoms.iter().map(|a| PlanAtom { w: a.w * factor, ..*a }).collect() }
    }

    /// Weighted first marginal as `(position, weight)` pairs.
    pub fn source_marginal(&self) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|a| (a.x, a.w)).collect()
    }

    /// Weighted second marginal as `(position, weight)` pairs.
    pub fn target_marginal(&self) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|a| (a.y, a.w)).collect()
    }
}

/// One free component `]aᵢ, bᵢ[ → [cᵢ, dᵢ]` of the decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureComponent {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub mu: Measure1D,
    pub nu: Measure1D,
}

impl StructureComponent {
    pub fn mass(&self) -> f64 {
        self.mu.mass()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureDecomposition {
    pub mu: Measure1D,
    pub nu: Measure1D,
    pub sets: DisplacementSets,
    pub components: Vec<StructureComponent>,
    pub rigid_plus_mass: f64,
    pub rigid_minus_mass: f64,
}

impl StructureDecomposition {
    pub fn lambda(&self) -> f64 {
        self.sets.lambda_c
    }

    /// `max(sup) − min(inf)` over both supports.
    pub fn diameter(&self) -> f64 {
        support_diameter(&self.mu, &self.nu)
    }

    /// `M⁺ + λ_C` and `M⁻ − λ_C`, the images of the rigid parts.
    pub fn rigid_images(&self) -> IntervalUnion {
        let l = self.lambda();
        self.sets.m_plus.translate(l).union(&self.sets.m_minus.translate(-l))
    }
}

pub fn support_diameter(mu: &Measure1D, nu: &Measure1D) -> f64 {
    let lo = mu.inf_support().unwrap_or(0.0).min(nu.inf_support().unwrap_or(0.0));
    let hi = mu.sup_support().unwrap_or(0.0).max(nu.sup_support().unwrap_or(0.0));
    hi - lo
}

/// Splits `(μ, ν)` into rigid parts and free components.
///
/// When `λ_C = 0` there is nothing rigid and the whole problem is a single
/// free component.
pub fn decompose(mu: &Measure1D, nu: &Measure1D, sets: &DisplacementSets) -> Result<StructureDecomposition> {
    let (a, b) = hull(mu)?;
    let (c, d) = hull(nu)?;
    let lambda = sets.lambda_c;

    if lambda <= STRUCT_TOL {
        return Ok(StructureDecomposition {
            mu: mu.clone(),
            nu: nu.clone(),
            sets: sets.clone(),
            components: vec![StructureComponent { a, b, c, d, mu: mu.clone(), nu: nu.clone() }],
            rigid_plus_mass: 0.0,
            rigid_minus_mass: 0.0,
        });
    }

    let in_plus = |x: f64| sets.m_plus.contains_tol(x, STRUCT_TOL);
    let in_minus = |x: f64| sets.m_minus.contains_tol(x, STRUCT_TOL);
    let mut components = Vec::new();
    for (ai, bi) in sets.m_all.gaps_within(a, b) {
        if bi - ai <= STRUCT_TOL {
            continue;
        }
        let ci = if (ai - a).abs() <= STRUCT_TOL {
            c
        } else if in_plus(ai) {
            ai + lambda
        } else if in_minus(ai) {
            ai - lambda
        } else {
            return Err(Error::Invalid(format!("gap end point {ai} is neither a nor in M")));
        };
        let di = if (bi - b).abs() <= STRUCT_TOL {
            d
        } else if in_minus(bi) {
            bi - lambda
        } else if in_plus(bi) {
            bi + lambda
        } else {
            return Err(Error::Invalid(format!("gap end point {bi} is neither b nor in M")));
        };
        let mu_i = mu.restrict(ai, bi);
        let nu_i = nu.restrict(ci, di);
        if (mu_i.mass() - nu_i.mass()).abs() > REPORT_TOL {
            return Err(Error::MassMismatch {
                index: components.len(),
                source_mass: mu_i.mass(),
                target_mass: nu_i.mass(),
            });
        }
        components.push(StructureComponent { a: ai, b: bi, c: ci, d: di, mu: mu_i, nu: nu_i });
    }

    Ok(StructureDecomposition {
        mu: mu.clone(),
        nu: nu.clone(),
        sets: sets.clone(),
        components,
        rigid_plus_mass: mu.restrict_to(&sets.m_plus).mass(),
        rigid_minus_mass: mu.restrict_to(&sets.m_minus).mass(),
    })
}

/// Monotone plan, displacement sets and decomposition in one go. Identical
/// measures give empty sets and a single trivial component.
pub fn decompose_measures(mu: &Measure1D, nu: &Measure1D) -> Result<StructureDecomposition> {
    let plan = monotone_coupling(mu, nu)?;
    let sets = match maximal_displacement_sets(&plan) {
        Ok(s) => s,
        Err(Error::DegenerateCritical) => {
            DisplacementSets::new(IntervalUnion::empty(), IntervalUnion::empty(), winf_value(&plan))
        }
        Err(e) => return Err(e),
    };
    decompose(mu, nu, &sets)
}

fn hull(m: &Measure1D) -> Result<(f64, f64)> {
    match (m.inf_support(), m.sup_support()) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        _ => Err(Error::Invalid("measure has empty support".into())),
    }
}

/// Checks that the open intervals `]cᵢ, dᵢ[` are pairwise disjoint and miss
/// the rigid images. Returns a description of the first failure.
pub fn target_disjointness_violation(dec: &StructureDecomposition) -> Option<String> {
    let mut spans: Vec<(f64, f64)> = dec.components.iter().map(|c| (c.c, c.d)).collect();
    spans.sort_by(|p, q| p.0.total_cmp(&q.0));
    for w in spans.windows(2) {
        if w[0].1 > w[1].0 + STRUCT_TOL {
            return Some(format!("]{}, {}[ overlaps ]{}, {}[", w[0].0, w[0].1, w[1].0, w[1].1));
        }
    }
    if dec.lambda() > STRUCT_TOL {
        let images = dec.rigid_images();
        for &(c, d) in &spans {
            if !images.misses_open(c, d, STRUCT_TOL) {
                return Some(format!("]{c}, {d}[ meets the rigid images"));
            }
        }
    }
    None
}

/// Largest CDF gap, over `grid` points spanning both supports, between `μ` and
/// the sum of its pieces (and likewise for `ν`).
pub fn partition_residual(dec: &StructureDecomposition, grid: usize) -> (f64, f64) {
    let l = dec.lambda();
    let mut mu_parts = vec![dec.mu.restrict_to(&dec.sets.m_plus), dec.mu.restrict_to(&dec.sets.m_minus)];
    let mut nu_parts =
        vec![dec.nu.restrict_to(&dec.sets.m_plus.translate(l)), dec.nu.restrict_to(&dec.sets.m_minus.translate(-l))];
    if l <= STRUCT_TOL {
        mu_parts.clear();
        nu_parts.clear();
    }
    mu_parts.extend(dec.components.iter().map(|c| c.mu.clone()));
    nu_parts.extend(dec.components.iter().map(|c| c.nu.clone()));

    let lo = dec.mu.inf_support().unwrap_or(0.0).min(dec.nu.inf_support().unwrap_or(0.0)) - 1.0;
    let span = dec.diameter() + 2.0;
    let residual = |whole: &Measure1D, parts: &[Measure1D]| {
        (0..=grid)
            .map(|k| {
                let x = lo + span * k as f64 / grid.max(1) as f64;
                (whole.cdf(x) - parts.iter().map(|p| p.cdf(x)).sum::<f64>()).abs()
            })
            .fold(0.0, f64::max)
    };
    (residual(&dec.mu, &mu_parts), residual(&dec.nu, &nu_parts))
}

/// Role of a source point in the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomClass {
    RigidPlus,
    RigidMinus,
    Free(usize),
    Outside,
}

/// Classifies `x`; `hint` is the signed displacement used to break the tie on
/// `M⁺ ∩ M⁻`. Points of `M` are rigid even when they are also an end point of
/// a free component.
pub fn classify(dec: &StructureDecomposition, x: f64, hint: f64) -> AtomClass {
    if dec.lambda() > STRUCT_TOL {
        let plus = dec.sets.m_plus.contains_tol(x, STRUCT_TOL);
        let minus = dec.sets.m_minus.contains_tol(x, STRUCT_TOL);
        match (plus, minus) {
            (true, true) => return if hint >= 0.0 { AtomClass::RigidPlus } else { AtomClass::RigidMinus },
            (true, false) => return AtomClass::RigidPlus,
            (false, true) => return AtomClass::RigidMinus,
            (false, false) => {}
        }
    }
    dec.components
        .iter()
        .position(|c| c.a - STRUCT_TOL <= x && x <= c.b + STRUCT_TOL)
        .map_or(AtomClass::Outside, AtomClass::Free)
}

/// Samples at resolution `n`, split by role.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization {
    pub n: usize,
    /// Rigid atoms `(x, x ± λ_C)` with weight `1/n`.
    pub rigid: Vec<PlanAtom>,
    /// Per free component: source samples and target samples, equal in number.
    pub sources: Vec<SampleSet>,
    pub targets: Vec<SampleSet>,
}

impl Discretization {
    /// The discretized `μ` (all source samples, weight `1/n`).
    pub fn source_marginal(&self) -> Vec<(f64, f64)> {
        let w = 1.0 / self.n as f64;
        self.rigid
            .iter()
            .map(|a| (a.x, w))
            .chain(self.sources.iter().flat_map(|s| s.points().iter().map(move |&x| (x, w))))
            .collect()
    }

    /// The discretized `ν`.
    pub fn target_marginal(&self) -> Vec<(f64, f64)> {
        let w = 1.0 / self.n as f64;
        self.rigid
            .iter()
            .map(|a| (a.y, w))
            .chain(self.targets.iter().flat_map(|s| s.points().iter().map(move |&y| (y, w))))
            .collect()
    }
}

pub fn discretize(dec: &StructureDecomposition, n: usize) -> Result<Discretization> {
    if n == 0 {
        return Err(Error::Invalid("resolution must be at least 1".into()));
    }
    let lambda = dec.lambda();
    let w = 1.0 / n as f64;
    let mut rigid = Vec::new();
    let mut sources = vec![Vec::new(); dec.components.len()];
    let mut targets = vec![Vec::new(); dec.components.len()];
    for k in 1..=n {
        let t = (k as f64 - 0.5) / n as f64;
        let x = dec.mu.quantile(t * dec.mu.mass())?;
        let y = dec.nu.quantile(t * dec.nu.mass())?;
        match classify(dec, x, y - x) {
            AtomClass::RigidPlus => rigid.push(PlanAtom { x, y: x + lambda, w }),
            AtomClass::RigidMinus => rigid.push(PlanAtom { x, y: x - lambda, w }),
            AtomClass::Free(i) => {
                sources[i].push(x);
                targets[i].push(y);
            }
            AtomClass::Outside => return Err(Error::Invalid(format!("sample {x} lies outside the decomposition"))),
        }
    }
    // Each free component keeps its share of the levels but is resampled from
    // its own restricted marginals. An end whose pair lies on a rigid line is
    // sampled exactly, so that pair is present in every plan.
    for (i, c) in dec.components.iter().enumerate() {
        let k = sources[i].len();
        if k == 0 {
            continue;
        }
        let on_line = |t: f64| -> Result<bool> {
            let (x, y) = (c.mu.quantile(t * c.mu.mass())?, c.nu.quantile(t * c.nu.mass())?);
            Ok(((x - y).abs() - lambda).abs() <= STRUCT_TOL)
        };
        let (left, right) = (on_line(0.0)?, on_line(1.0)?);
        let levels = component_levels(k, left, right);
        sources[i] = levels.iter().map(|t| c.mu.quantile(t * c.mu.mass())).collect::<Result<_>>()?;
        targets[i] = levels.iter().map(|t| c.nu.quantile(t * c.nu.mass())).collect::<Result<_>>()?;
    }
    Ok(Discretization {
        n,
        rigid,
        sources: sources.into_iter().map(SampleSet::new).collect(),
        targets: targets.into_iter().map(SampleSet::new).collect(),
    })
}

/// `k` evenly spaced levels in `[0, 1]`. An included end sits on 0 or 1, any
/// other end half a step inside.
fn component_levels(k: usize, left: bool, right: bool) -> Vec<f64> {
    let off_left = if left { 0.0 } else { 0.5 };
    let off_right = if right { 0.0 } else { 0.5 };
    let span = k as f64 - 1.0 + off_left + off_right;
    if span <= 0.0 {
        return vec![0.5; k];
    }
    (0..k).map(|j| ((j as f64 + off_left) / span).min(1.0)).collect()
}

/// Order-preserving coupling of each component's samples (weights sum to 1).
pub fn monotone_sub_plans(disc: &Discretization) -> Vec<DiscretePlan> {
    disc.sources
        .iter()
        .zip(&disc.targets)
        .map(|(xs, ys)| {
            let w = xs.weight();
            DiscretePlan::new(xs.points().iter().zip(ys.points()).map(|(&x, &y)| PlanAtom { x, y, w }).collect())
        })
        .collect()
}

/// Random band-feasible coupling of each component's samples.
pub fn random_sub_plans(disc: &Discretization, lambda: f64, seed: u64) -> Result<Vec<DiscretePlan>> {
    disc.sources
        .iter()
        .zip(&disc.targets)
        .enumerate()
        .map(|(i, (xs, ys))| band_feasible_coupling(xs, ys, lambda, seed.wrapping_add((i as u64) << 32)))
        .collect()
}

/// Rigid parts plus the given sub-plans, each rescaled from total weight 1 to
/// its share `nᵢ/n`.
pub fn assemble_plan(dec: &StructureDecomposition, sub_plans: &[DiscretePlan], n: usize) -> Result<DiscretePlan> {
    let disc = discretize(dec, n)?;
    assemble_discretized(dec, &disc, sub_plans)
}

pub fn assemble_discretized(
    dec: &StructureDecomposition,
    disc: &Discretization,
    sub_plans: &[DiscretePlan],
) -> Result<DiscretePlan> {
    if sub_plans.len() != disc.sources.len() {
        return Err(Error::SizeMismatch { left: sub_plans.len(), right: disc.sources.len() });
    }
    let lambda = dec.lambda();
    let mut atoms = disc.rigid.clone();
    for (i, plan) in sub_plans.iter().enumerate() {
        let (xs, ys) = (&disc.sources[i], &disc.targets[i]);
        if xs.is_empty() {
            if !plan.is_empty() {
                return Err(Error::MarginalMismatch {
                    what: format!("component {i} has no samples"),
                    discrepancy: plan.total_mass(),
                });
            }
            continue;
        }
        if let Some(a) = plan.atoms().iter().find(|a| a.displacement().abs() > lambda + BAND_TOL) {
            return Err(Error::BandViolation { x: a.x, y: a.y, displacement: a.displacement().abs(), lambda });
        }
        let uniform = |s: &SampleSet| s.points().iter().map(|&p| (p, s.weight())).collect::<Vec<_>>();
        for (what, got, want) in
            [("source", plan.source_marginal(), uniform(xs)), ("target", plan.target_marginal(), uniform(ys))]
        {
            let gap = discrete_cdf_discrepancy(&got, &want);
            if gap > REPORT_TOL {
                return Err(Error::MarginalMismatch { what: format!("component {i} {what}"), discrepancy: gap });
            }
        }
        let share = xs.len() as f64 / disc.n as f64;
        atoms.extend(plan.scaled(share).atoms().iter().copied());
    }
    Ok(DiscretePlan::new(atoms))
}

/// An optimal plan at resolution `n` with random free parts.
pub fn sample_optimal_plan(dec: &StructureDecomposition, n: usize, seed: u64) -> Result<DiscretePlan> {
    let disc = discretize(dec, n)?;
    let subs = random_sub_plans(&disc, dec.lambda(), seed)?;
    assemble_discretized(dec, &disc, &subs)
}

/// Sup distance between the CDFs of two weighted point sets. Positions within
/// `STRUCT_TOL` of each other are treated as one point.
pub fn discrete_cdf_discrepancy(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut events: Vec<(f64, f64)> = a.iter().copied().chain(b.iter().map(|&(x, w)| (x, -w))).collect();
    events.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut worst = 0.0_f64;
    let mut diff = 0.0;
    let mut i = 0;
    while i < events.len() {
        let start = events[i].0;
        while i < events.len() && events[i].0 <= start + STRUCT_TOL {
            diff += events[i].1;
            i += 1;
        }
        worst = worst.max(diff.abs());
    }
    worst
}

/// Kolmogorov distance between a weighted point set and a measure.
pub fn ks_distance(points: &[(f64, f64)], m: &Measure1D) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut cum = 0.0;
    let mut worst = 0.0_f64;
    let mut i = 0;
    while i < pts.len() {
        let x = pts[i].0;
        let f = m.cdf(x);
        worst = worst.max((cum - f).abs());
        while i < pts.len() && pts[i].0 <= x + STRUCT_TOL {
            cum += pts[i].1;
            i += 1;
        }
        worst = worst.max((cum - f).abs());
    }
    worst
}

/// Outcome of [`validate_plan`]. Violation masses are the total weight of the
/// atoms failing each check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub passed: bool,
    /// Atoms over `M±` not on the line `y = x ± λ_C`.
    pub rigid_violation_mass: f64,
    /// Atoms over `]aᵢ, bᵢ[` with `y ∉ [cᵢ, dᵢ]`.
    pub confinement_violation_mass: f64,
    /// Atoms with `|y − x| > λ_C`.
    pub band_violation_mass: f64,
    /// Atoms whose source is outside `[a, b]`.
    pub unclassified_mass: f64,
    pub max_displacement: f64,
    /// Atoms sitting exactly on an end point `aᵢ` or `bᵢ` (not in `M`).
    pub boundary_atoms: usize,
    pub source_ks: f64,
    pub target_ks: f64,
    pub tol: f64,
}

pub fn validate_plan(plan: &DiscretePlan, dec: &StructureDecomposition, tol: f64) -> PlanReport {
    let lambda = dec.lambda();
    let mut rep = PlanReport {
        passed: false,
        rigid_violation_mass: 0.0,
        confinement_violation_mass: 0.0,
        band_violation_mass: 0.0,
        unclassified_mass: 0.0,
        max_displacement: plan.max_displacement(),
        boundary_atoms: 0,
        source_ks: ks_distance(&plan.source_marginal(), &dec.mu),
        target_ks: ks_distance(&plan.target_marginal(), &dec.nu),
        tol,
    };
    for a in plan.atoms() {
        let disp = a.displacement();
        if disp.abs() > lambda + tol {
            rep.band_violation_mass += a.w;
        }
        match classify(dec, a.x, disp) {
            AtomClass::RigidPlus => {
                if (disp - lambda).abs() > tol {
                    rep.rigid_violation_mass += a.w;
                }
            }
            AtomClass::RigidMinus => {
                if (disp + lambda).abs() > tol {
                    rep.rigid_violation_mass += a.w;
                }
            }
            AtomClass::Free(i) => {
                let c = &dec.components[i];
                if (a.x - c.a).abs() <= STRUCT_TOL || (a.x - c.b).abs() <= STRUCT_TOL {
                    rep.boundary_atoms += 1;
                }
                if a.y < c.c - tol || a.y > c.d + tol {
                    rep.confinement_violation_mass += a.w;
                }
            }
            AtomClass::Outside => rep.unclassified_mass += a.w,
        }
    }
    rep.passed = rep.rigid_violation_mass == 0.0
        && rep.confinement_violation_mass == 0.0
        && rep.band_violation_mass == 0.0
        && rep.unclassified_mass == 0.0;
    rep
}

/// Default atom cap of [`infcm_check`].
pub const INFCM_ATOM_CAP: usize = 2000;

/// Largest tuple size accepted by [`infcm_check`].
pub const INFCM_MAX_TUPLE: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfCmReport {
    pub passed: bool,
    pub atoms: usize,
    pub max_tuple: usize,
    /// A tuple `(xᵢ, yᵢ)` with `max |xᵢ − yᵢ| > max |xᵢ − yᵢ₊₁|` (indices mod
    /// its length).
    pub violating_tuple: Option<Vec<(f64, f64)>>,
}

/// Checks ∞-cyclical monotonicity on all tuples of at most `max_tuple` atoms.
///
/// A tuple violates the inequality exactly when, with `D` the displacement of
/// its largest-displacement atom `j`, every shifted pair satisfies
/// `|xᵢ − yᵢ₊₁| < D`; that is a cycle through `j` in the graph with arcs
/// `p → q ⇔ |x_p − y_q| < D`. A breadth-first search from every atom finds the
/// shortest such cycle, which is equivalent to enumerating all tuples.
pub fn infcm_check(plan: &DiscretePlan, max_tuple: usize) -> Result<InfCmReport> {
    infcm_check_with_cap(plan, max_tuple, INFCM_ATOM_CAP)
}

pub fn infcm_check_with_cap(plan: &DiscretePlan, max_tuple: usize, cap: usize) -> Result<InfCmReport> {
    if max_tuple > INFCM_MAX_TUPLE {
        return Err(Error::BudgetExceeded(format!("tuple size {max_tuple} exceeds {INFCM_MAX_TUPLE}")));
    }
    let mut pts: Vec<(f64, f64)> = plan.atoms().iter().map(|a| (a.x, a.y)).collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    pts.dedup();
    if pts.len() > cap {
        return Err(Error::BudgetExceeded(format!("{} distinct atoms exceed the cap {cap}", pts.len())));
    }
    let mut report = InfCmReport { passed: true, atoms: pts.len(), max_tuple, violating_tuple: None };
    if max_tuple < 2 {
        return Ok(report);
    }
    let n = pts.len();
    for j in 0..n {
        let bound = (pts[j].0 - pts[j].1).abs() - STRUCT_TOL;
        let arc = |p: usize, q: usize| (pts[p].0 - pts[q].1).abs() < bound;
        let mut depth = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::from([j]);
        depth[j] = 0;
        while let Some(p) = queue.pop_front() {
            if depth[p] >= max_tuple {
                continue;
            }
            if p != j && arc(p, j) {
                let mut cycle = vec![p];
                let mut v = p;
                while parent[v] != usize::MAX {
                    v = parent[v];
                    cycle.push(v);
                }
                cycle.reverse();
                report.passed = false;
                report.violating_tuple = Some(cycle.into_iter().map(|i| pts[i]).collect());
                return Ok(report);
            }
            if depth[p] + 2 > max_tuple {
                continue;
            }
            for q in 0..n {
                if depth[q] == usize::MAX && arc(p, q) {
                    depth[q] = depth[p] + 1;
                    parent[q] = p;
                    queue.push_back(q);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub covered: bool,
    pub eps: f64,
    pub grid_points: usize,
    pub uncovered_plus: Vec<f64>,
    pub uncovered_minus: Vec<f64>,
}

/// Checks that the plan moves (points near) every point of `M⁺` by `+λ_C` and
/// of `M⁻` by `−λ_C`: each `x` of an `eps`-grid needs an atom within `eps` of
/// `(x, x ± λ_C)` in both coordinates.
pub fn minimal_set_inclusion(plan: &DiscretePlan, sets: &DisplacementSets, eps: f64) -> CoverageReport {
    let mut atoms: Vec<(f64, f64)> = plan.atoms().iter().map(|a| (a.x, a.y)).collect();
    atoms.sort_by(|p, q| p.0.total_cmp(&q.0));
    let hit = |x: f64, y: f64| {
        let start = atoms.partition_point(|a| a.0 < x - eps);
        atoms[start..].iter().take_while(|a| a.0 <= x + eps).any(|a| (a.1 - y).abs() <= eps)
    };
    let lambda = sets.lambda_c;
    let probe = |set: &IntervalUnion, shift: f64| {
        let grid = set.grid_with_step(eps);
        let missing: Vec<f64> = grid.iter().copied().filter(|&x| !hit(x, x + shift)).collect();
        (grid.len(), missing)
    };
    let (np, uncovered_plus) = probe(&sets.m_plus, lambda);
    let (nm, uncovered_minus) = probe(&sets.m_minus, -lambda);
    CoverageReport {
        covered: uncovered_plus.is_empty() && uncovered_minus.is_empty(),
        eps,
        grid_points: np + nm,
        uncovered_plus,
        uncovered_minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::measure_from_pieces;

    fn dec_of(mu: Measure1D, nu: Measure1D) -> StructureDecomposition {
        let sets = maximal_displacement_sets(&monotone_coupling(&mu, &nu).unwrap()).unwrap();
        decompose(&mu, &nu, &sets).unwrap()
    }

    fn e4() -> StructureDecomposition {
        dec_of(
            Measure1D::uniform(0.0, 2.0).unwrap(),
            measure_from_pieces(&[(0.0, 1.0, 0.5), (1.0, 2.0, 0.25), (2.0, 2.5, 0.5)]).unwrap(),
        )
    }

    #[test]
    fn e4_single_component() {
        let dec = e4();
        assert_eq!(dec.components.len(), 1);
        let c = &dec.components[0];
        assert_eq!((c.a, c.b, c.c, c.d), (0.0, 1.5, 0.0, 2.0));
        assert!((c.mu.mass() - 0.75).abs() < 1e-15 && (c.nu.mass() - 0.75).abs() < 1e-15);
        assert!((dec.rigid_plus_mass - 0.25).abs() < 1e-15);
        assert_eq!(target_disjointness_violation(&dec), None);
        let (rm, rn) = partition_residual(&dec, 1000);
        assert!(rm < 1e-12 && rn < 1e-12);
    }

    #[test]
    fn rigid_only_examples() {
        let e1 = dec_of(Measure1D::uniform(0.0, 1.0).unwrap(), Measure1D::uniform(1.0, 2.0).unwrap());
        assert!(e1.components.is_empty());
        assert_eq!(e1.rigid_plus_mass, 1.0);
        let e3 = dec_of(
            Measure1D::uniform(0.0, 1.0).unwrap(),
            measure_from_pieces(&[(-1.0, -0.5, 1.0), (1.5, 2.0, 1.0)]).unwrap(),
        );
        assert!(e3.components.is_empty());
        assert_eq!((e3.rigid_plus_mass, e3.rigid_minus_mass), (0.5, 0.5));
        let plan = assemble_plan(&e1, &[], 100).unwrap();
        assert!(validate_plan(&plan, &e1, REPORT_TOL).passed);
        assert!(plan.atoms().iter().all(|a| (a.y - a.x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn assembled_plans_validate() {
        let dec = e4();
        let disc = discretize(&dec, 400).unwrap();
        let mono = assemble_discretized(&dec, &disc, &monotone_sub_plans(&disc)).unwrap();
        assert!((mono.total_mass() - 1.0).abs() < 1e-12);
        assert!(mono.max_displacement() <= 0.5 + 1e-12);
        let rep = validate_plan(&mono, &dec, REPORT_TOL);
        assert!(rep.passed, "{rep:?}");
        assert!(rep.source_ks <= 1.0 / 400.0 + 1e-12, "{rep:?}");

        let random = sample_optimal_plan(&dec, 400, 9).unwrap();
        assert_ne!(random, mono);
        assert!(validate_plan(&random, &dec, REPORT_TOL).passed);
        assert!(discrete_cdf_discrepancy(&random.target_marginal(), &disc.target_marginal()) < 1e-12);
    }

    #[test]
    fn corrupted_plan_fails_rigid_check() {
        let dec = e4();
        let mut plan = assemble_plan(&dec, &monotone_sub_plans(&discretize(&dec, 100).unwrap()), 100).unwrap();
        let k = plan.atoms().iter().position(|a| a.x > 1.6).unwrap();
        plan.atoms_mut()[k].y -= 0.1;
        let rep = validate_plan(&plan, &dec, REPORT_TOL);
        assert!(!rep.passed);
        assert!(rep.rigid_violation_mass >= plan.atoms()[k].w);

        let bad = DiscretePlan::new(vec![PlanAtom { x: 1.6, y: 1.9, w: 1.0 }]);
        assert_eq!(validate_plan(&bad, &dec, REPORT_TOL).rigid_violation_mass, 1.0);
    }

    #[test]
    fn assembly_rejects_out_of_band_sub_plan() {
        let dec = e4();
        let disc = discretize(&dec, 10).unwrap();
        let mut subs = monotone_sub_plans(&disc);
        let first = subs[0].atoms()[0];
        subs[0].atoms_mut()[0].y = first.x + 0.9;
        assert!(matches!(assemble_discretized(&dec, &disc, &subs), Err(Error::BandViolation { .. })));
        assert!(matches!(assemble_discretized(&dec, &disc, &[]), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn identical_measures_give_one_trivial_component() {
        let mu = measure_from_pieces(&[(0.0, 1.0, 0.5), (2.0, 3.0, 0.5)]).unwrap();
        let dec = decompose_measures(&mu, &mu).unwrap();
        assert_eq!(dec.components.len(), 1);
        assert_eq!((dec.components[0].a, dec.components[0].d), (0.0, 3.0));
        let plan = sample_optimal_plan(&dec, 50, 4).unwrap();
        assert!(plan.max_displacement() <= 1e-9);
        assert!(validate_plan(&plan, &dec, REPORT_TOL).passed);
    }

    #[test]
    fn infcm_examples() {
        let plan = |v: &[(f64, f64)]| DiscretePlan::new(v.iter().map(|&(x, y)| PlanAtom { x, y, w: 1.0 }).collect());
        assert!(infcm_check(&plan(&[(0.0, 1.0), (0.5, 1.5)]), 4).unwrap().passed);
        let bad = infcm_check(&plan(&[(0.0, 2.0), (1.0, 1.0)]), 2).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.violating_tuple.unwrap().len(), 2);
        assert!(matches!(infcm_check(&plan(&[]), 6), Err(Error::BudgetExceeded(_))));
        let many = plan(&(0..5).map(|k| (k as f64, k as f64)).collect::<Vec<_>>());
        assert!(matches!(infcm_check_with_cap(&many, 3, 4), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn coverage_examples() {
        let dec = e4();
        let plan = sample_optimal_plan(&dec, 500, 1).unwrap();
        let eps = 2.0 * dec.diameter() / 500.0;
        assert!(minimal_set_inclusion(&plan, &dec.sets, eps).covered);
        let shifted = DiscretePlan::new(plan.atoms().iter().map(|a| PlanAtom { y: a.x, ..*a }).collect());
        let rep = minimal_set_inclusion(&shifted, &dec.sets, eps);
        assert!(!rep.covered && !rep.uncovered_plus.is_empty());
    }
}
