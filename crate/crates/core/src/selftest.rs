//! Invariant suite run by `winf selftest` on the built-in instances.

use serde::{Deserialize, Serialize};

use crate::coupling::{maximal_displacement_sets, monotone_coupling, winf_value, DisplacementSets};
use crate::error::Result;
use crate::instances::{builtin, Instance};
use crate::measures::BVPotential;
use crate::oracle::{sample_quantile_grid, sorted_matching_bottleneck, threshold_matching_bottleneck};
use crate::potentials::{
    b_r_set, check_dual_feasibility, criticality_witness, kantorovich_pair, FeasibilityOptions, RhoConfig,
};
use crate::structure::{
    decompose, infcm_check, minimal_set_inclusion, partition_residual, sample_optimal_plan,
    target_disjointness_violation, validate_plan, DiscretePlan, PlanAtom,
};
use crate::{REPORT_TOL, STRUCT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub instance: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    pub oracle_samples: usize,
    pub plan_resolution: usize,
    pub plan_seeds: u64,
    pub tol: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self { oracle_samples: 1000, plan_resolution: 500, plan_seeds: 5, tol: REPORT_TOL }
    }
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let checks: Vec<CheckOutcome> = builtin().iter().flat_map(|inst| check_instance(inst, opts)).collect();
    SelftestReport { passed: checks.iter().all(|c| c.passed), checks }
}

struct Recorder<'a> {
    instance: &'a str,
    out: Vec<CheckOutcome>,
}

impl Recorder<'_> {
    fn record(&mut self, check: &str, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.out.push(CheckOutcome { instance: self.instance.to_string(), check: check.to_string(), passed, detail });
    }
}

pub fn check_instance(inst: &Instance, opts: &SelftestOptions) -> Vec<CheckOutcome> {
    let mut rec = Recorder { instance: &inst.name, out: Vec::new() };
    let (mu, nu) = (&inst.mu, &inst.nu);
    let cfg = RhoConfig::default();

    rec.record(
        "winf matches both bottleneck oracles",
        (|| {
            let plan = monotone_coupling(mu, nu)?;
            let lambda = winf_value(&plan);
            let n = opts.oracle_samples;
            let xs = sample_quantile_grid(mu, n)?;
            let ys = sample_quantile_grid(nu, n)?;
            let sorted = sorted_matching_bottleneck(&xs, &ys)?;
            let threshold = threshold_matching_bottleneck(&xs, &ys)?;
            let slack = 2.0 * crate::structure::support_diameter(mu, nu) / n as f64;
            Ok((
                sorted == threshold && (lambda - sorted).abs() <= slack,
                format!("lambda={lambda} sorted={sorted} threshold={threshold} slack={slack}"),
            ))
        })(),
    );

    let pair = match kantorovich_pair(mu, nu, &cfg) {
        Ok(p) => p,
        Err(e) => {
            rec.record("potentials", Err(e));
            return rec.out;
        }
    };
    let lambda = pair.lambda;

    rec.record(
        "potentials are feasible with zero dual value",
        Ok({
            let rep = check_dual_feasibility(
                &pair.phi,
                &pair.psi,
                lambda,
                mu,
                nu,
                &FeasibilityOptions { tol: opts.tol, ..Default::default() },
            );
            (
                rep.feasible && rep.dual_value.abs() <= opts.tol,
                format!("worst={} dual={}", rep.worst_violation, rep.dual_value),
            )
        }),
    );

    let Some(sets) = pair.sets.clone() else {
        return rec.out;
    };

    rec.record("derivative support equals M", Ok(support_identity(&pair.phi, &sets)));
    rec.record(
        "downward jumps at extreme points of M+",
        Ok(extreme_point_jumps(&pair.phi, &sets, cfg.endpoint_weight)),
    );
    rec.record(
        "B_r is the single point x + lambda on M+",
        Ok({
            let bad: Vec<f64> = sets
                .m_plus
                .grid(100)
                .into_iter()
                .filter(|&x| !is_point(&b_r_set(&pair.phi, &pair.psi, lambda, x), x + lambda, opts.tol))
                .collect();
            (bad.is_empty(), format!("{} failing points", bad.len()))
        }),
    );
    rec.record(
        "separation and finite crossing",
        Ok((
            sets.separation_violation(100).is_none() && sets.crossing_is_finite_and_separated(),
            format!("crossing={:?}", sets.crossing_points().components()),
        )),
    );
    rec.record(
        "monotone plan is infinity-cyclically monotone",
        (|| {
            let plan = monotone_coupling(mu, nu)?;
            let atoms = plan.sample_pairs(200).into_iter().map(|(x, y)| PlanAtom { x, y, w: 1.0 / 200.0 }).collect();
            let rep = infcm_check(&DiscretePlan::new(atoms), 4)?;
            Ok((rep.passed, format!("{} atoms", rep.atoms)))
        })(),
    );
    rec.record(
        "sub-critical witness and none at the critical value",
        Ok({
            let below = criticality_witness(mu, nu, 0.9 * lambda, 1e-2);
            let at = criticality_witness(mu, nu, lambda, 1e-2);
            let ok = below.as_ref().is_ok_and(|w| w.value > opts.tol) && at.is_err();
            (ok, format!("below={below:?} at={at:?}"))
        }),
    );
    rec.record(
        "decomposition, assembled plans and coverage",
        (|| {
            let dec = decompose(mu, nu, &sets)?;
            let masses_ok = dec.components.iter().all(|c| (c.mu.mass() - c.nu.mass()).abs() <= opts.tol);
            let disjoint = target_disjointness_violation(&dec);
            let (rm, rn) = partition_residual(&dec, 1000);
            let n = opts.plan_resolution;
            let eps = 2.0 * dec.diameter() / n as f64;
            let mut plans_ok = true;
            for seed in 0..opts.plan_seeds {
                let plan = sample_optimal_plan(&dec, n, seed)?;
                plans_ok &= validate_plan(&plan, &dec, opts.tol).passed;
                plans_ok &= minimal_set_inclusion(&plan, &sets, eps).covered;
            }
            Ok((
                masses_ok && disjoint.is_none() && rm <= opts.tol && rn <= opts.tol && plans_ok,
                format!("{} components, residuals ({rm}, {rn}), disjointness {disjoint:?}", dec.components.len()),
            ))
        })(),
    );
    rec.out
}

/// `supp φ′ = M` and `supp (φ′)⁻ = M⁺`.
pub fn support_identity(phi: &BVPotential, sets: &DisplacementSets) -> (bool, String) {
    let all = phi.derivative_support(STRUCT_TOL);
    let neg = phi.derivative_negative_support(STRUCT_TOL);
    (
        all.approx_eq(&sets.m_all, STRUCT_TOL) && neg.approx_eq(&sets.m_plus, STRUCT_TOL),
        format!("supp={:?} neg={:?}", all.components(), neg.components()),
    )
}

/// At every end point of a component of `M⁺` outside `M⁻`, `φ(x−) − φ(x) ≥ w`.
pub fn extreme_point_jumps(phi: &BVPotential, sets: &DisplacementSets, weight: f64) -> (bool, String) {
    let mut worst = f64::INFINITY;
    for x in sets.m_plus.endpoints() {
        if sets.m_minus.contains_tol(x, STRUCT_TOL) {
            continue;
        }
        worst = worst.min(phi.left_limit(x) - phi.eval(x));
    }
    (worst >= weight, format!("smallest drop {worst}"))
}

fn is_point(set: &crate::measures::IntervalUnion, at: f64, tol: f64) -> bool {
    set.len() == 1 && {
        let (lo, hi) = set.components()[0];
        (lo - at).abs() <= tol && (hi - at).abs() <= tol
    }
}

/// Sets of the monotone plan, or `None` when `μ = ν`.
pub fn displacement_sets(inst: &Instance) -> Result<Option<DisplacementSets>> {
    match maximal_displacement_sets(&monotone_coupling(&inst.mu, &inst.nu)?) {
        Ok(s) => Ok(Some(s)),
        Err(crate::Error::DegenerateCritical) => Ok(None),
        Err(e) => Err(e),
    }
}
