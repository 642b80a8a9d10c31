use super::joint::LowerPlan;
use super::require_equal_epsilon;
use crate::choquet::{choquet_sorted, AtomFunction};
use crate::credal_core::{
    Capacity, EnvelopeKind, EpsContamination, IndexMap, MAX_ENUMERABLE_ATOMS,
};
use crate::ot_classical::{
    check_exponent, check_metric, solve_kantorovich, solve_monge_discrete, CostMatrix,
    TransportPlan,
};
use crate::{Error, Result};

/// Tolerance of the pushforward check, before scaling by `1-ε`.
const PUSHFORWARD_EVENT_TOLERANCE: f64 = 1e-9;

fn check_map_cost(cp: &EpsContamination, map: &IndexMap, c: &CostMatrix) -> Result<()> {
    cp.base().ensure_same_space(map.source(), "lower Monge objective")?;
    if c.rows() != map.source().len() || c.cols() != map.target().len() {
        return Err(Error::input(format!(
            "cost matrix is {}x{}, map is {} -> {}",
            c.rows(),
            c.cols(),
            map.source().len(),
            map.target().len()
        )));
    }
    Ok(())
}

/// Choquet integral of `x ↦ c(x, T(x))` against the incoherent lower
/// envelope of `cp`.
pub fn lpm_objective(cp: &EpsContamination, map: &IndexMap, c: &CostMatrix) -> Result<f64> {
    lpm_objective_with(cp, map, c, EnvelopeKind::Incoherent)
}

pub fn lpm_objective_with(
    cp: &EpsContamination,
    map: &IndexMap,
    c: &CostMatrix,
    kind: EnvelopeKind,
) -> Result<f64> {
    check_map_cost(cp, map, c)?;
    let f = AtomFunction::new(
        (0..map.source().len())
            .map(|i| c.get(i, map.apply(i)))
            .collect(),
    )?;
    choquet_sorted(&f, &cp.envelope(kind))
}

/// Whether `T_# P̲ = Q̲` on every target event, using the incoherent
/// envelopes.
pub fn check_pushforward_constraint(
    cp: &EpsContamination,
    map: &IndexMap,
    cq: &EpsContamination,
) -> Result<bool> {
    check_pushforward_constraint_with(cp, map, cq, EnvelopeKind::Incoherent)
}

pub fn check_pushforward_constraint_with(
    cp: &EpsContamination,
    map: &IndexMap,
    cq: &EpsContamination,
    kind: EnvelopeKind,
) -> Result<bool> {
    cp.base().ensure_same_space(map.source(), "pushforward constraint")?;
    cq.base().ensure_same_space(map.target(), "pushforward constraint")?;
    require_equal_epsilon(cp, cq)?;
    let m = cq.len();
    if m > MAX_ENUMERABLE_ATOMS {
        return Err(Error::size("target atoms", m, MAX_ENUMERABLE_ATOMS));
    }
    let tol = PUSHFORWARD_EVENT_TOLERANCE * (1.0 - cp.epsilon());
    let pushed = cp.pushforward(map, kind)?;
    let target = cq.envelope(kind);
    Ok(cq
        .space()
        .events()?
        .all(|b| (pushed.measure_unchecked(&b) - target.measure_unchecked(&b)).abs() <= tol))
}

/// Lower Monge problem. Returns the classical optimal map together with its
/// lower objective, or `None` if no map pushes `P` onto `Q`.
pub fn solve_lpm(
    cp: &EpsContamination,
    cq: &EpsContamination,
    c: &CostMatrix,
) -> Result<Option<(IndexMap, f64)>> {
    require_equal_epsilon(cp, cq)?;
    match solve_monge_discrete(cp.base(), cq.base(), c)? {
        Some((map, _)) => {
            let value = lpm_objective(cp, &map, c)?;
            Ok(Some((map, value)))
        }
        None => Ok(None),
    }
}

/// Relaxed lower Kantorovich problem, solved through the classical one.
pub fn solve_rlpk(
    cp: &EpsContamination,
    cq: &EpsContamination,
    c: &CostMatrix,
) -> Result<(LowerPlan, f64)> {
    require_equal_epsilon(cp, cq)?;
    let (plan, _) = solve_kantorovich(cp.base(), cq.base(), c)?;
    let lower = LowerPlan::new(plan, cp.epsilon())?;
    let value = rlpk_objective(&lower, c)?;
    Ok((lower, value))
}

/// Choquet integral of the cost against the lower plan.
pub fn rlpk_objective(plan: &LowerPlan, c: &CostMatrix) -> Result<f64> {
    let base = plan.base();
    if c.rows() != base.rows() || c.cols() != base.cols() {
        return Err(Error::input(format!(
            "cost matrix is {}x{}, plan is {}x{}",
            c.rows(),
            c.cols(),
            base.rows(),
            base.cols()
        )));
    }
    choquet_sorted(&AtomFunction::new(c.data().to_vec())?, plan)
}

/// The lower plan `P̲(dx) δ_{T(x)}(dy)`.
pub fn deterministic_lower_plan(cp: &EpsContamination, map: &IndexMap) -> Result<LowerPlan> {
    LowerPlan::new(TransportPlan::deterministic(cp.base(), map)?, cp.epsilon())
}

/// `(RLPK value with cost d^p)^{1/p}` on a common metric space.
pub fn lower_wasserstein_p(
    cp: &EpsContamination,
    cq: &EpsContamination,
    d: &CostMatrix,
    pexp: f64,
) -> Result<f64> {
    check_exponent(pexp)?;
    cq.base().ensure_same_space(cp.space(), "lower wasserstein")?;
    check_metric(d)?;
    let (_, value) = solve_rlpk(cp, cq, &d.powf(pexp))?;
    Ok(value.max(0.0).powf(1.0 / pexp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal_core::{DiscreteDistribution, FiniteSpace};
    use crate::ot_classical::wasserstein_p;

    fn contam(mass: Vec<f64>, eps: f64) -> EpsContamination {
        let space = FiniteSpace::indexed("x", mass.len()).unwrap();
        EpsContamination::new(DiscreteDistribution::new(space, mass).unwrap(), eps).unwrap()
    }

    fn swap() -> CostMatrix {
        CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn lpm_objective_examples() {
        let cp = contam(vec![0.5, 0.5], 0.5);
        let id = IndexMap::identity(cp.space().clone());
        let c = CostMatrix::from_rows(&[vec![3.0, 7.0], vec![7.0, 1.0]]).unwrap();
        assert!((lpm_objective(&cp, &id, &c).unwrap() - 1.0).abs() < 1e-15);
        let zero = CostMatrix::new(2, 2, vec![0.0; 4]).unwrap();
        assert_eq!(lpm_objective(&cp, &id, &zero).unwrap(), 0.0);
        let plain = contam(vec![0.5, 0.5], 0.0);
        assert!((lpm_objective(&plain, &id, &c).unwrap() - 2.0).abs() < 1e-15);
        let wide = CostMatrix::new(2, 3, vec![0.0; 6]).unwrap();
        assert!(matches!(lpm_objective(&cp, &id, &wide), Err(Error::Input(_))));
    }

    #[test]
    fn pushforward_constraint_examples() {
        let cp = contam(vec![0.5, 0.5], 0.3);
        let id = IndexMap::identity(cp.space().clone());
        assert!(check_pushforward_constraint(&cp, &id, &cp).unwrap());
        let constant = IndexMap::constant(cp.space().clone(), cp.space().clone(), 0).unwrap();
        assert!(!check_pushforward_constraint(&cp, &constant, &cp).unwrap());
        let a = contam(vec![0.5, 0.5], 0.1);
        let b = contam(vec![0.5, 0.5], 0.2);
        let err = check_pushforward_constraint(&a, &id, &b).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("equal contamination")));
    }

    #[test]
    fn solve_lpm_examples() {
        let cp = contam(vec![0.25, 0.75], 0.4);
        let cq = contam(vec![0.75, 0.25], 0.4);
        let (map, value) = solve_lpm(&cp, &cq, &swap()).unwrap().unwrap();
        assert_eq!(map.assignment(), &[1, 0]);
        assert!((value - 0.6).abs() < 1e-12);
        let dirac = EpsContamination::new(
            DiscreteDistribution::dirac(FiniteSpace::indexed("x", 2).unwrap(), 0).unwrap(),
            0.4,
        )
        .unwrap();
        assert!(solve_lpm(&dirac, &cq, &swap()).unwrap().is_none());
        assert!(solve_lpm(&cp, &contam(vec![0.75, 0.25], 0.5), &swap()).is_err());
    }

    #[test]
    fn solve_rlpk_examples() {
        let (_, v) = solve_rlpk(&contam(vec![0.5, 0.5], 0.5), &contam(vec![0.5, 0.5], 0.5), &swap())
            .unwrap();
        assert_eq!(v, 0.0);
        let (plan, v) =
            solve_rlpk(&contam(vec![0.5, 0.5], 0.2), &contam(vec![0.25, 0.75], 0.2), &swap()).unwrap();
        assert!((v - 0.2).abs() < 1e-12);
        assert_eq!(plan.epsilon(), 0.2);
        assert!(matches!(
            solve_rlpk(&contam(vec![0.5, 0.5], 0.1), &contam(vec![0.5, 0.5], 0.2), &swap()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rlpk_objective_constant_and_deterministic() {
        let cp = contam(vec![0.2, 0.3, 0.5], 0.35);
        let cq = contam(vec![0.1, 0.6, 0.3], 0.35);
        let k = CostMatrix::new(3, 3, vec![2.5; 9]).unwrap();
        let (plan, _) = solve_rlpk(&cp, &cq, &k).unwrap();
        assert!((rlpk_objective(&plan, &k).unwrap() - 2.5 * 0.65).abs() < 1e-12);

        let map = IndexMap::new(cp.space().clone(), cq.space().clone(), vec![2, 0, 1]).unwrap();
        let c = CostMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64 * 0.7).unwrap();
        let det = deterministic_lower_plan(&cp, &map).unwrap();
        let a = rlpk_objective(&det, &c).unwrap();
        let b = lpm_objective(&cp, &map, &c).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert_eq!(det.base().col_sums(), map.pushforward_mass(cp.base()).unwrap());
    }

    #[test]
    fn deterministic_identity_is_diagonal() {
        let cp = contam(vec![0.5, 0.5], 0.1);
        let det = deterministic_lower_plan(&cp, &IndexMap::identity(cp.space().clone())).unwrap();
        assert_eq!(det.base().matrix(), &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(det.epsilon(), 0.1);
    }

    #[test]
    fn lower_wasserstein_examples() {
        let d = CostMatrix::from_fn(3, 3, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let p = contam(vec![0.2, 0.3, 0.5], 0.6);
        assert!(lower_wasserstein_p(&p, &p, &d, 2.0).unwrap().abs() < 1e-12);
        let q = contam(vec![0.5, 0.4, 0.1], 0.75);
        let p75 = contam(vec![0.2, 0.3, 0.5], 0.75);
        let w = wasserstein_p(p75.base(), q.base(), &d, 2.0).unwrap();
        assert!((lower_wasserstein_p(&p75, &q, &d, 2.0).unwrap() - 0.5 * w).abs() < 1e-10);
        let q0 = contam(vec![0.5, 0.4, 0.1], 0.0);
        let p0 = contam(vec![0.2, 0.3, 0.5], 0.0);
        assert!((lower_wasserstein_p(&p0, &q0, &d, 1.0).unwrap()
            - wasserstein_p(p0.base(), q0.base(), &d, 1.0).unwrap())
        .abs()
            < 1e-12);
    }
}
