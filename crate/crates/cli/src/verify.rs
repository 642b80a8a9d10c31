//! Randomized invariant suites.
//!
//! Trial `t` of a check draws from the stream `(seed, offset + t)`, so the
//! report is identical however rayon schedules the trials.

use std::fmt;

use credal_ot::choquet::default_step;
use credal_ot::credal_core::{EnvelopeKind, LineDistribution, DOMINANCE_TOLERANCE};
use credal_ot::ot_classical::{brute_force_kantorovich, gaussian_w2_squared, grid_gaussian_2d};
use credal_ot::ot_lower::{
    check_pushforward_constraint, deterministic_lower_plan, gamma_geom_membership,
    gamma_r_membership, JointRef,
};
use credal_ot::random::{self, trial_rng, TrialRng};
use credal_ot::{
    choquet_bounded_coherent, choquet_riemann, choquet_sorted, gaussian_monge_map, gbc_condition,
    geometric_condition, lpm_objective, rlpk_objective, solve_kantorovich, solve_lpm,
    solve_monge_discrete, solve_rlpk, AtomFunction, CostMatrix, DiscreteDistribution,
    EpsContamination, Event, FiniteSpace, GaussianPair, IndexMap, JointLowerTable, LowerPlan,
    TransportPlan,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_SEED: u64 = 0;

pub const SUITES: &[&str] = &[
    "monge-equiv",
    "kantorovich-equiv",
    "coincide",
    "conditioning",
    "gaussian",
    "choquet-oracles",
    "core",
];

const EPS_GRID: [f64; 4] = [0.0, 0.1, 0.5, 0.9];
const IDENTITY_TOLERANCE: f64 = 1e-12;
const MC_SAMPLES: usize = 200_000;
const GRID_PER_AXIS: usize = 40;
const GRID_HALF_WIDTH: f64 = 3.5;

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    /// Replaces the tolerance of the exact identity checks.
    pub tolerance: Option<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            tolerance: None,
        }
    }
}

impl VerifyConfig {
    fn identity_tol(&self) -> f64 {
        self.tolerance.unwrap_or(IDENTITY_TOLERANCE)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{} trials={} max_residual={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.trials,
            self.max_residual,
            self.tolerance
        )?;
        if let Some(note) = &self.note {
            write!(f, " {note}")?;
        }
        Ok(())
    }
}

/// One trial's residual plus an optional side measurement, or a failure
/// message when the trial could not be evaluated.
type Trial = Result<(f64, Option<f64>), String>;

struct Summary {
    trials: usize,
    max_residual: f64,
    side: Vec<f64>,
    error: Option<String>,
}

fn run_trials<F>(seed: u64, offset: u64, count: usize, f: F) -> Summary
where
    F: Fn(&mut TrialRng) -> Trial + Sync,
{
    let outcomes: Vec<Trial> = (0..count as u64)
        .into_par_iter()
        .map(|t| f(&mut trial_rng(seed, offset + t)))
        .collect();
    let mut summary = Summary {
        trials: count,
        max_residual: 0.0,
        side: Vec::new(),
        error: None,
    };
    for (t, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok((r, side)) => {
                summary.max_residual = if r.is_nan() { f64::INFINITY } else { summary.max_residual.max(r) };
                summary.side.extend(side);
            }
            Err(e) if summary.error.is_none() => summary.error = Some(format!("trial {t}: {e}")),
            Err(_) => {}
        }
    }
    summary
}

fn check(suite: &'static str, name: impl Into<String>, s: Summary, tol: f64, note: Option<String>) -> CheckResult {
    let passed = s.error.is_none() && s.max_residual <= tol;
    CheckResult {
        suite,
        name: name.into(),
        passed,
        trials: s.trials,
        max_residual: s.max_residual,
        tolerance: tol,
        note: s.error.or(note),
    }
}

fn e<T>(r: credal_ot::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn run_suite(name: &str, cfg: &VerifyConfig) -> CliResult<Vec<CheckResult>> {
    match name {
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
        "monge-equiv" => Ok(monge_equiv(cfg)),
        "kantorovich-equiv" => Ok(kantorovich_equiv(cfg)),
        "coincide" => Ok(coincide(cfg)),
        "conditioning" => Ok(conditioning(cfg)),
        "gaussian" => Ok(gaussian(cfg)),
        "choquet-oracles" => Ok(choquet_oracles(cfg)),
        "core" => Ok(core(cfg)),
        other => Err(CliError::input(format!(
            "unknown suite '{other}', expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

fn ratio_note(side: &[f64]) -> Option<String> {
    if side.is_empty() {
        return None;
    }
    let lo = side.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = side.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(format!("ratio=[{lo:.12}, {hi:.12}]"))
}

fn monge_equiv(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (k, &eps) in EPS_GRID.iter().enumerate() {
        let s = run_trials(cfg.seed, 1_000 + 100_000 * k as u64, cfg.trials, |rng| {
            let n = rng.random_range(1..=5);
            let (p, q) = e(random::feasible_monge_pair(rng, n, n))?;
            let c = e(random::cost_matrix(rng, n, n))?;
            let (_, classical) = e(solve_monge_discrete(&p, &q, &c))?.ok_or("infeasible instance")?;
            let cp = e(EpsContamination::new(p, eps))?;
            let cq = e(EpsContamination::new(q, eps))?;
            let (_, lower) = e(solve_lpm(&cp, &cq, &c))?.ok_or("lower problem infeasible")?;
            let ratio = (classical > 1e-9).then(|| lower / classical);
            Ok(((lower - (1.0 - eps) * classical).abs(), ratio))
        });
        let note = ratio_note(&s.side);
        out.push(check("monge-equiv", format!("lpm-value-identity[eps={eps}]"), s, cfg.identity_tol(), note));
    }
    let s = run_trials(cfg.seed, 900_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=4);
        let eps = EPS_GRID[rng.random_range(0..EPS_GRID.len())];
        let p = e(random::distribution(rng, "x", n))?;
        let target = e(FiniteSpace::indexed("y", m))?;
        let q = if rng.random_bool(0.5) {
            let t = e(random::index_map(rng, p.space(), &target))?;
            e(DiscreteDistribution::from_weights(target.clone(), e(t.pushforward_mass(&p))?))?
        } else {
            e(random::distribution(rng, "y", m))?
        };
        let cp = e(EpsContamination::new(p.clone(), eps))?;
        let cq = e(EpsContamination::new(q.clone(), eps))?;
        let mut mismatches = 0.0;
        for code in 0..m.pow(n as u32) {
            let assignment: Vec<usize> = (0..n).map(|i| code / m.pow(i as u32) % m).collect();
            let t = e(IndexMap::new(p.space().clone(), target.clone(), assignment))?;
            if e(check_pushforward_constraint(&cp, &t, &cq))? != e(t.pushes_forward(&p, &q, 1e-9))? {
                mismatches += 1.0;
            }
        }
        Ok((mismatches, None))
    });
    out.push(check("monge-equiv", "pushforward-constraint-equivalence", s, 0.0, None));
    out
}

fn kantorovich_equiv(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (k, &eps) in EPS_GRID.iter().enumerate() {
        let s = run_trials(cfg.seed, 2_000_000 + 100_000 * k as u64, cfg.trials, |rng| {
            let n = rng.random_range(1..=32);
            let m = rng.random_range(1..=32);
            let p = e(random::distribution(rng, "x", n))?;
            let q = e(random::distribution(rng, "y", m))?;
            let c = e(random::cost_matrix(rng, n, m))?;
            let (_, classical) = e(solve_kantorovich(&p, &q, &c))?;
            let cp = e(EpsContamination::new(p, eps))?;
            let cq = e(EpsContamination::new(q, eps))?;
            let (plan, lower) = e(solve_rlpk(&cp, &cq, &c))?;
            if !e(gamma_r_membership(JointRef::Plan(&plan), &cp, &cq))? {
                return Err("optimal lower plan is not a contaminated coupling".into());
            }
            let ratio = (classical > 1e-9).then(|| lower / classical);
            Ok(((lower - (1.0 - eps) * classical).abs(), ratio))
        });
        let note = ratio_note(&s.side);
        out.push(check("kantorovich-equiv", format!("rlpk-value-identity[eps={eps}]"), s, cfg.identity_tol(), note));
    }
    let s = run_trials(cfg.seed, 2_900_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=(9 / n).min(3));
        let p = e(random::distribution(rng, "x", n))?;
        let q = e(random::distribution(rng, "y", m))?;
        let c = e(random::cost_matrix(rng, n, m))?;
        let (_, lp) = e(solve_kantorovich(&p, &q, &c))?;
        let brute = e(brute_force_kantorovich(&p, &q, &c))?;
        Ok(((lp - brute).abs() / c.max().max(f64::MIN_POSITIVE), None))
    });
    out.push(check(
        "kantorovich-equiv",
        "lp-vs-vertex-enumeration",
        s,
        1e-2,
        Some("residual relative to max cost".into()),
    ));
    out
}

fn coincide(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = run_trials(cfg.seed, 3_000_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=6);
        let eps = EPS_GRID[rng.random_range(0..EPS_GRID.len())];
        let p = e(random::distribution(rng, "x", n))?;
        let target = e(FiniteSpace::indexed("y", n))?;
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), rng);
        let t = e(IndexMap::new(p.space().clone(), target.clone(), perm))?;
        let q = e(DiscreteDistribution::from_weights(target, e(t.pushforward_mass(&p))?))?;
        let c = e(random::cost_matrix(rng, n, n))?;
        let (plan, _) = e(solve_kantorovich(&p, &q, &c))?;
        match plan.as_map() {
            Some(map) => {
                let cp = e(EpsContamination::new(p, eps))?;
                let a = e(rlpk_objective(&e(LowerPlan::new(plan, eps))?, &c))?;
                let b = e(lpm_objective(&cp, &map, &c))?;
                Ok(((a - b).abs(), Some(1.0)))
            }
            None => Ok((0.0, Some(0.0))),
        }
    });
    let deterministic = s.side.iter().filter(|&&x| x > 0.0).count();
    let note = Some(format!("deterministic_optima={deterministic}"));
    let mut out = vec![check("coincide", "rlpk-equals-lpm-on-deterministic-plans", s, cfg.identity_tol(), note)];

    let s = run_trials(cfg.seed, 3_500_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=8);
        let eps: f64 = rng.random();
        let cp = e(random::contamination(rng, "x", n, eps))?;
        let t = e(random::index_map(rng, cp.space(), &e(FiniteSpace::indexed("y", m))?))?;
        let c = e(random::cost_matrix(rng, n, m))?;
        let det = e(deterministic_lower_plan(&cp, &t))?;
        let pushed = e(t.pushforward_mass(cp.base()))?;
        let marg = det
            .base()
            .col_sums()
            .iter()
            .zip(&pushed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let obj = (e(rlpk_objective(&det, &c))? - e(lpm_objective(&cp, &t, &c))?).abs();
        Ok((marg.max(obj), None))
    });
    out.push(check("coincide", "deterministic-plan-marginal-and-objective", s, cfg.identity_tol(), None));
    out
}

fn random_joint(rng: &mut TrialRng, n: usize, m: usize, eps: f64) -> Result<LowerPlan, String> {
    let joint = e(random::distribution(rng, "xy", n * m))?;
    let rows: Vec<f64> = (0..n).map(|i| joint.mass()[i * m..(i + 1) * m].iter().sum()).collect();
    let cols: Vec<f64> = (0..m).map(|j| (0..n).map(|i| joint.mass()[i * m + j]).sum()).collect();
    let p = e(DiscreteDistribution::from_weights(e(FiniteSpace::indexed("x", n))?, rows))?;
    let q = e(DiscreteDistribution::from_weights(e(FiniteSpace::indexed("y", m))?, cols))?;
    e(LowerPlan::new(e(TransportPlan::new(joint.mass().to_vec(), p, q))?, eps))
}

fn random_event(rng: &mut TrialRng, n: usize, nonempty: bool) -> Event {
    loop {
        let mask: u64 = rng.random_range(0..1u64 << n);
        if !nonempty || mask != 0 {
            return Event::from_mask(mask, n);
        }
    }
}

fn conditioning(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = run_trials(cfg.seed, 4_000_000, 5 * cfg.trials, |rng| {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=5);
        let eps = rng.random_range(1e-3..1.0 - 1e-3);
        let j = random_joint(rng, n, m, eps)?;
        let a = random_event(rng, n, false);
        let b = random_event(rng, m, true);
        let geo = e(geometric_condition(&j, &a, &b))?;
        let gbc = e(gbc_condition(&j, &a, &b))?;
        Ok(((gbc - geo).max(0.0), None))
    });
    let mut out = vec![check("conditioning", "gbc-dominated-by-geometric", s, cfg.identity_tol(), None)];

    let s = run_trials(cfg.seed, 4_500_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=5);
        let eps = rng.random_range(0.0..1.0);
        let j = random_joint(rng, n, m, eps)?;
        let j0 = e(LowerPlan::new(j.base().clone(), 0.0))?;
        let a = random_event(rng, n, false);
        let b = random_event(rng, m, true);
        let diff = (e(geometric_condition(&j, &a, &b))? - e(geometric_condition(&j0, &a, &b))?).abs();
        let gbc0 = (e(gbc_condition(&j0, &a, &b))? - e(geometric_condition(&j0, &a, &b))?).abs();
        Ok((diff.max(gbc0), None))
    });
    out.push(check("conditioning", "geometric-cancels-epsilon", s, cfg.identity_tol(), None));

    let hand = || -> Result<(f64, Option<f64>), String> {
        let u = DiscreteDistribution::uniform(e(FiniteSpace::indexed("x", 2))?);
        let j = e(LowerPlan::new(TransportPlan::product(u.clone(), u), 0.2))?;
        let (a, b) = (Event::singleton(0), Event::singleton(1));
        let gbc = e(gbc_condition(&j, &a, &b))?;
        let geo = e(geometric_condition(&j, &a, &b))?;
        Ok(((gbc - 1.0 / 3.0).abs().max((geo - 0.5).abs()), None))
    };
    let s = Summary {
        trials: 1,
        max_residual: hand().map(|r| r.0).unwrap_or(f64::INFINITY),
        side: Vec::new(),
        error: hand().err(),
    };
    out.push(check("conditioning", "uniform-2x2-hand-instance", s, 1e-15, Some("gbc=1/3 geometric=1/2".into())));

    let s = run_trials(cfg.seed, 4_800_000, 1, |_| {
        let u = DiscreteDistribution::uniform(e(FiniteSpace::indexed("x", 2))?);
        let g1 = e(TransportPlan::new(vec![0.5, 0.0, 0.0, 0.5], u.clone(), u.clone()))?;
        let g2 = e(TransportPlan::new(vec![0.0, 0.5, 0.5, 0.0], u.clone(), u.clone()))?;
        let c = e(EpsContamination::new(u, 0.2))?;
        let t = e(JointLowerTable::lower_envelope_of(&[g1, g2], 0.2))?;
        let geom = e(gamma_geom_membership(&t, &c, &c))?;
        let relaxed = e(gamma_r_membership(JointRef::Table(&t), &c, &c))?;
        Ok((if geom && !relaxed { 0.0 } else { 1.0 }, None))
    });
    out.push(check("conditioning", "superadditive-joint-outside-relaxed-set", s, 0.0, None));
    out
}

/// Monte-Carlo cost of the Gaussian map against the grid LP, and the lower
/// plan built from the discretized map.
fn gaussian_chain(seed: u64, eps: f64) -> Result<(f64, f64, String), String> {
    let sp = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.6]);
    let sq = DMatrix::from_row_slice(2, 2, &[0.5, -0.2, -0.2, 1.5]);
    let t = e(gaussian_monge_map(&e(GaussianPair::euclidean(sp.clone(), sq.clone()))?))?;
    let chol = sp.clone().cholesky().ok_or("sigma_p is not SPD")?.l();
    let mut rng = trial_rng(seed, 5_900_000);
    let mut acc = 0.0;
    for _ in 0..MC_SAMPLES {
        let z = DVector::from_fn(2, |_, _| StandardNormal.sample(&mut rng));
        let x = &chol * z;
        acc += 0.5 * (&t * &x - &x).norm_squared();
    }
    let mc = acc / MC_SAMPLES as f64;

    let (px, wp) = e(grid_gaussian_2d(&sp, GRID_PER_AXIS, GRID_HALF_WIDTH))?;
    let (qx, wq) = e(grid_gaussian_2d(&sq, GRID_PER_AXIS, GRID_HALF_WIDTH))?;
    let k = px.len();
    let p = e(DiscreteDistribution::from_weights(e(FiniteSpace::indexed("x", k))?, wp))?;
    let q = e(DiscreteDistribution::from_weights(e(FiniteSpace::indexed("y", k))?, wq))?;
    let half_sq = |a: [f64; 2], b: [f64; 2]| 0.5 * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2));
    let c = e(CostMatrix::from_fn(k, k, |i, j| half_sq(px[i], qx[j])))?;
    let (_, lp) = e(solve_kantorovich(&p, &q, &c))?;
    let closed = e(gaussian_w2_squared(&sp, &sq))? / 2.0;

    // The grid source pushed through T, as a deterministic lower plan onto
    // the image points.
    let images: Vec<[f64; 2]> = px
        .iter()
        .map(|x| {
            let y = &t * DVector::from_column_slice(x);
            [y[0], y[1]]
        })
        .collect();
    let cp = e(EpsContamination::new(p.clone(), eps))?;
    let image_space = e(FiniteSpace::indexed("tx", k))?;
    let map = e(IndexMap::new(p.space().clone(), image_space, (0..k).collect()))?;
    let det = e(deterministic_lower_plan(&cp, &map))?;
    let ct = e(CostMatrix::from_fn(k, k, |i, j| half_sq(px[i], images[j])))?;
    let lower = e(rlpk_objective(&det, &ct))?;

    let mc_rel = (mc - lp).abs() / lp;
    let chain_rel = (lower - (1.0 - eps) * lp).abs() / ((1.0 - eps) * lp);
    let note = format!("mc={mc:.6} grid_lp={lp:.6} closed_form={closed:.6} lower={lower:.6}");
    Ok((mc_rel, chain_rel, note))
}

fn gaussian(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (k, d) in [2usize, 3, 5].into_iter().enumerate() {
        let s = run_trials(cfg.seed, 5_000_000 + 100_000 * k as u64, cfg.trials, |rng| {
            let sp = random::spd_matrix(rng, d);
            let sq = random::spd_matrix(rng, d);
            let a = random::invertible_matrix(rng, d);
            let t = e(gaussian_monge_map(&e(GaussianPair::new(sp.clone(), sq.clone(), a))?))?;
            Ok(((&t * &sp * t.transpose() - &sq).norm(), None))
        });
        out.push(check("gaussian", format!("covariance-pushforward[d={d}]"), s, 1e-8, None));
    }
    let s = run_trials(cfg.seed, 5_500_000, cfg.trials, |rng| {
        let sp: f64 = rng.random_range(0.1..5.0);
        let sq: f64 = rng.random_range(0.1..5.0);
        let g = e(GaussianPair::euclidean(
            DMatrix::from_element(1, 1, sp * sp),
            DMatrix::from_element(1, 1, sq * sq),
        ))?;
        let t = e(gaussian_monge_map(&g))?;
        Ok(((t[(0, 0)] - sq / sp).abs(), None))
    });
    out.push(check("gaussian", "scalar-slope", s, 1e-12, None));

    match gaussian_chain(cfg.seed, 0.3) {
        Ok((mc_rel, chain_rel, note)) => {
            let one = |r| Summary { trials: 1, max_residual: r, side: Vec::new(), error: None };
            out.push(check("gaussian", "monte-carlo-vs-grid-lp", one(mc_rel), 0.05, Some(note.clone())));
            out.push(check("gaussian", "lower-plan-from-discretized-map[eps=0.3]", one(chain_rel), 0.05, Some(note)));
        }
        Err(msg) => {
            let failed = || Summary { trials: 1, max_residual: f64::INFINITY, side: Vec::new(), error: Some(msg.clone()) };
            out.push(check("gaussian", "monte-carlo-vs-grid-lp", failed(), 0.05, None));
            out.push(check("gaussian", "lower-plan-from-discretized-map[eps=0.3]", failed(), 0.05, None));
        }
    }
    out
}

fn random_values(rng: &mut TrialRng, n: usize) -> Result<AtomFunction, String> {
    e(AtomFunction::new((0..n).map(|_| rng.random_range(0.0..5.0)).collect()))
}

fn choquet_oracles(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let trials = 2 * cfg.trials;
    let s = run_trials(cfg.seed, 6_000_000, trials, |rng| {
        let n = rng.random_range(1..=12);
        let nu = e(random::belief_function(rng, n))?;
        let f = random_values(rng, n)?;
        let step = default_step(&f);
        let a = e(choquet_sorted(&f, &nu))?;
        let b = e(choquet_riemann(&f, &nu, step))?;
        let bound = 2.0 * step * n as f64 * f.max();
        Ok((if bound > 0.0 { (a - b).abs() / bound } else { (a - b).abs() }, None))
    });
    let mut out = vec![check(
        "choquet-oracles",
        "sorted-vs-quadrature",
        s,
        1.0,
        Some("residual relative to 2*step*n*max(f)".into()),
    )];

    let s = run_trials(cfg.seed, 6_300_000, trials, |rng| {
        let n = rng.random_range(1..=12);
        let eps = rng.random_range(0.0..=1.0);
        let c = e(random::contamination(rng, "x", n, eps))?;
        let f = random_values(rng, n)?;
        let got = e(choquet_sorted(&f, &c.envelope(EnvelopeKind::Incoherent)))?;
        let want = (1.0 - eps) * e(c.base().expectation(f.values()))?;
        Ok(((got - want).abs(), None))
    });
    out.push(check("choquet-oracles", "incoherent-scaling-identity", s, cfg.identity_tol(), None));

    let s = run_trials(cfg.seed, 6_600_000, trials, |rng| {
        let n = rng.random_range(1..=12);
        let eps = rng.random_range(0.0..=1.0);
        let c = e(random::contamination(rng, "x", n, eps))?;
        let f = random_values(rng, n)?;
        let inc = e(choquet_sorted(&f, &c.envelope(EnvelopeKind::Incoherent)))?;
        let coh = e(choquet_bounded_coherent(&f, &c))?;
        Ok((((coh - inc) - eps * f.min()).abs(), None))
    });
    out.push(check("choquet-oracles", "coherent-gap-equals-eps-min", s, cfg.identity_tol(), None));

    let s = run_trials(cfg.seed, 6_900_000, trials, |rng| {
        let n = rng.random_range(1..=12);
        let nu = e(random::belief_function(rng, n))?;
        let f = random_values(rng, n)?;
        let lambda = rng.random_range(0.0..10.0);
        let base = e(choquet_sorted(&f, &nu))?;
        let scaled = e(choquet_sorted(&e(f.scaled(lambda))?, &nu))?;
        Ok(((scaled - lambda * base).abs() / (1.0 + lambda * base), None))
    });
    out.push(check("choquet-oracles", "positive-homogeneity", s, cfg.identity_tol(), None));
    out
}

fn mix(c: &EpsContamination, r: &DiscreteDistribution) -> Result<DiscreteDistribution, String> {
    let eps = c.epsilon();
    let mass = c
        .base()
        .mass()
        .iter()
        .zip(r.mass())
        .map(|(p, r)| (1.0 - eps) * p + eps * r)
        .collect();
    e(DiscreteDistribution::from_weights(c.space().clone(), mass))
}

fn candidate(rng: &mut TrialRng, c: &EpsContamination) -> Result<DiscreteDistribution, String> {
    let r = e(random::distribution(rng, "x", c.len()))?;
    let r = e(DiscreteDistribution::new(c.space().clone(), r.mass().to_vec()))?;
    if rng.random_bool(0.5) {
        mix(c, &r)
    } else {
        Ok(r)
    }
}

fn core(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let s = run_trials(cfg.seed, 7_000_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=10);
        let eps = rng.random_range(0.0..=1.0);
        let c = e(random::contamination(rng, "x", n, eps))?;
        let pi = candidate(rng, &c)?;
        let dominates = |kind| -> Result<bool, String> {
            let events = e(c.space().events())?;
            for a in events {
                if e(pi.prob(&a))? < e(c.lower(&a, kind))? - DOMINANCE_TOLERANCE {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let inc = dominates(EnvelopeKind::Incoherent)?;
        let coh = dominates(EnvelopeKind::Coherent)?;
        let member = e(c.core_membership(&pi))?;
        Ok((if inc == coh && coh == member { 0.0 } else { 1.0 }, Some(f64::from(u8::from(member)))))
    });
    let members = s.side.iter().filter(|&&x| x > 0.0).count();
    let note = Some(format!("members={members}"));
    let mut out = vec![check("core", "coherent-incoherent-domination-equivalence", s, 0.0, note)];

    let s = run_trials(cfg.seed, 7_300_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=10);
        let eps = rng.random_range(0.01..=1.0);
        let c = e(random::contamination(rng, "x", n, eps))?;
        let pi = candidate(rng, &c)?;
        let member = e(c.core_membership(&pi))?;
        match e(c.decompose(&pi))? {
            Some(r) if member => {
                let back = mix(&c, &r)?;
                let resid = back
                    .mass()
                    .iter()
                    .zip(pi.mass())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                Ok((resid, None))
            }
            None if !member => Ok((0.0, None)),
            _ => Ok((f64::INFINITY, None)),
        }
    });
    out.push(check("core", "decompose-iff-member-and-round-trip", s, cfg.identity_tol(), None));

    let s = run_trials(cfg.seed, 7_600_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=5);
        let m = rng.random_range(1..=5);
        let eps = rng.random_range(0.0..=1.0);
        let c = e(random::contamination(rng, "x", n, eps))?;
        let target = e(FiniteSpace::indexed("y", m))?;
        let t = e(random::index_map(rng, c.space(), &target))?;
        let vertices = c.extreme_points();
        let mut worst: f64 = 0.0;
        for v in &vertices {
            if !e(c.core_membership(v))? {
                return Ok((f64::INFINITY, None));
            }
        }
        for b in e(target.events())? {
            let pre = e(t.preimage(&b))?;
            let min = vertices
                .iter()
                .map(|v| v.prob(&pre).expect("preimage is a source event"))
                .fold(f64::INFINITY, f64::min);
            let coherent = e(c.pushforward_lower(&t, &b, EnvelopeKind::Coherent))?;
            worst = worst.max((coherent - min).abs());
            // The incoherent envelope gives 1 - eps on the sure event.
            if !pre.is_full(n) {
                let lower = e(c.pushforward_lower(&t, &b, EnvelopeKind::Incoherent))?;
                worst = worst.max((lower - min).abs());
            }
        }
        Ok((worst, None))
    });
    out.push(check("core", "pushforward-lower-is-extreme-point-minimum", s, cfg.identity_tol(), None));

    let s = run_trials(cfg.seed, 7_900_000, cfg.trials, |rng| {
        let n = rng.random_range(1..=12);
        let mut x = 0.0;
        let positions: Vec<f64> = (0..n)
            .map(|_| {
                x += rng.random_range(0.01..2.0);
                x
            })
            .collect();
        let p = e(random::distribution(rng, "x", n))?;
        let line = e(LineDistribution::new(positions.clone(), p.mass().to_vec()))?;
        let mut violations = 0.0;
        for &x in &positions {
            if e(line.quantile(line.cdf(x)))? > x {
                violations += 1.0;
            }
        }
        for _ in 0..20 {
            let u: f64 = rng.random_range(f64::MIN_POSITIVE..=1.0);
            if line.cdf(e(line.quantile(u))?) < u - 1e-12 {
                violations += 1.0;
            }
        }
        Ok((violations, None))
    });
    out.push(check("core", "quantile-galois-property", s, 0.0, None));
    out
}
