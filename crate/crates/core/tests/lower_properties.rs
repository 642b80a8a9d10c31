mod common;

use common::{cost, dist, weights};
use credal_ot::credal_core::Event;
use credal_ot::ot_lower::{
    check_pushforward_constraint, deterministic_lower_plan, gamma_geom_membership,
    gamma_r_membership, JointRef,
};
use credal_ot::{
    gbc_condition, geometric_condition, lower_wasserstein_p, lpm_objective, rlpk_objective,
    solve_kantorovich, solve_lpm, solve_monge_discrete, solve_rlpk, wasserstein_p, CostMatrix,
    DiscreteDistribution, EpsContamination, FiniteSpace, IndexMap, JointLowerTable, LowerPlan,
    TransportPlan,
};
use proptest::prelude::*;

fn eps_grid() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.0, 0.1, 0.5, 0.9])
}

fn contam(p: DiscreteDistribution, eps: f64) -> EpsContamination {
    EpsContamination::new(p, eps).unwrap()
}

fn all_maps(n: usize, m: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..m.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let j = code % m;
                code /= m;
                j
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn lpm_value_is_scaled_monge(
        n in 1usize..=5,
        picks in prop::collection::vec(0usize..5, 5),
        uniform in any::<bool>(),
        wp in weights(5),
        c in cost(5, 5),
        eps in eps_grid(),
    ) {
        let p = if uniform { dist("x", vec![1.0; n]) } else { dist("x", wp[..n].to_vec()) };
        let target = FiniteSpace::indexed("y", n).unwrap();
        let t = IndexMap::new(p.space().clone(), target.clone(), picks[..n].iter().map(|j| j % n).collect()).unwrap();
        let q = DiscreteDistribution::from_weights(target, t.pushforward_mass(&p).unwrap()).unwrap();
        let c = CostMatrix::from_fn(n, n, |i, j| c.get(i, j)).unwrap();
        let (_, classical) = solve_monge_discrete(&p, &q, &c).unwrap().unwrap();
        let (_, lower) = solve_lpm(&contam(p, eps), &contam(q, eps), &c).unwrap().unwrap();
        prop_assert!((lower - (1.0 - eps) * classical).abs() <= 1e-12);
    }

    #[test]
    fn pushforward_constraint_matches_classical(
        n in 1usize..=4,
        m in 1usize..=4,
        wp in weights(4),
        wq in weights(4),
        eps in eps_grid(),
        use_pushforward in any::<bool>(),
        picks in prop::collection::vec(0usize..4, 4),
    ) {
        let p = dist("x", wp[..n].to_vec());
        let target = FiniteSpace::indexed("y", m).unwrap();
        let q = if use_pushforward {
            let t = IndexMap::new(p.space().clone(), target.clone(), picks[..n].iter().map(|j| j % m).collect()).unwrap();
            DiscreteDistribution::from_weights(target.clone(), t.pushforward_mass(&p).unwrap()).unwrap()
        } else {
            dist("y", wq[..m].to_vec())
        };
        let (cp, cq) = (contam(p.clone(), eps), contam(q.clone(), eps));
        for assignment in all_maps(n, m) {
            let t = IndexMap::new(p.space().clone(), target.clone(), assignment).unwrap();
            let lower = check_pushforward_constraint(&cp, &t, &cq).unwrap();
            let classical = t.pushes_forward(&p, &q, 1e-9).unwrap();
            prop_assert_eq!(lower, classical);
        }
    }

    #[test]
    fn rlpk_value_is_scaled_kantorovich(
        n in 1usize..=32,
        m in 1usize..=32,
        wp in weights(32),
        wq in weights(32),
        c in cost(32, 32),
        eps in eps_grid(),
    ) {
        let p = dist("x", wp[..n].to_vec());
        let q = dist("y", wq[..m].to_vec());
        let c = CostMatrix::from_fn(n, m, |i, j| c.get(i, j)).unwrap();
        let (_, classical) = solve_kantorovich(&p, &q, &c).unwrap();
        let (plan, lower) = solve_rlpk(&contam(p.clone(), eps), &contam(q.clone(), eps), &c).unwrap();
        prop_assert!((lower - (1.0 - eps) * classical).abs() <= 1e-12);
        prop_assert!(gamma_r_membership(JointRef::Plan(&plan), &contam(p, eps), &contam(q, eps)).unwrap());
    }

    #[test]
    fn deterministic_optimum_gives_equal_objectives(
        n in 1usize..=5,
        perm_seed in any::<u64>(),
        wp in weights(5),
        c in cost(5, 5),
        eps in eps_grid(),
    ) {
        let p = dist("x", wp[..n].to_vec());
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = perm_seed;
        for i in (1..n).rev() {
            order.swap(i, (s % (i as u64 + 1)) as usize);
            s /= i as u64 + 1;
        }
        let target = FiniteSpace::indexed("y", n).unwrap();
        let t = IndexMap::new(p.space().clone(), target.clone(), order).unwrap();
        let q = DiscreteDistribution::from_weights(target, t.pushforward_mass(&p).unwrap()).unwrap();
        let c = CostMatrix::from_fn(n, n, |i, j| c.get(i, j)).unwrap();
        let (plan, _) = solve_kantorovich(&p, &q, &c).unwrap();
        if let Some(map) = plan.as_map() {
            let cp = contam(p, eps);
            let lower = LowerPlan::new(plan, eps).unwrap();
            let a = rlpk_objective(&lower, &c).unwrap();
            let b = lpm_objective(&cp, &map, &c).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            let det = deterministic_lower_plan(&cp, &map).unwrap();
            prop_assert!((rlpk_objective(&det, &c).unwrap() - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn gbc_is_dominated_by_geometric(
        n in 1usize..=4,
        m in 1usize..=4,
        cells in weights(16),
        eps in 0.001f64..0.999,
        a_mask in 0u64..16,
        b_mask in 1u64..16,
    ) {
        let joint = dist("xy", cells[..n * m].to_vec());
        let rows: Vec<f64> = (0..n).map(|i| (0..m).map(|j| joint.mass()[i * m + j]).sum()).collect();
        let cols: Vec<f64> = (0..m).map(|j| (0..n).map(|i| joint.mass()[i * m + j]).sum()).collect();
        let plan = TransportPlan::new(joint.mass().to_vec(), dist("x", rows), dist("y", cols)).unwrap();
        let lp = LowerPlan::new(plan, eps).unwrap();
        let a = Event::from_mask(a_mask % (1 << n), n);
        let b = Event::from_mask(b_mask % (1 << m), m);
        prop_assume!(!b.is_empty());
        let geo = geometric_condition(&lp, &a, &b).unwrap();
        let gbc = gbc_condition(&lp, &a, &b).unwrap();
        prop_assert!(gbc <= geo + 1e-12);
    }

    #[test]
    fn lower_wasserstein_scales(
        n in 2usize..=8,
        pts in prop::collection::vec(0.0f64..1.0, 8),
        wp in weights(8),
        wq in weights(8),
        eps in 0.0f64..1.0,
        pexp in prop::sample::select(vec![1.0, 2.0, 3.0]),
    ) {
        let d = CostMatrix::from_fn(n, n, |i, j| (pts[i] - pts[j]).abs()).unwrap();
        let p = dist("x", wp[..n].to_vec());
        let q = dist("x", wq[..n].to_vec());
        let lower = lower_wasserstein_p(&contam(p.clone(), eps), &contam(q.clone(), eps), &d, pexp).unwrap();
        let classical = wasserstein_p(&p, &q, &d, pexp).unwrap();
        prop_assert!((lower - (1.0 - eps).powf(1.0 / pexp) * classical).abs() <= 1e-10);
    }
}

#[test]
fn min_of_two_couplings_stays_outside_relaxed_set() {
    let u = dist("x", vec![1.0, 1.0]);
    let g1 = TransportPlan::new(vec![0.5, 0.0, 0.0, 0.5], u.clone(), u.clone()).unwrap();
    let g2 = TransportPlan::new(vec![0.0, 0.5, 0.5, 0.0], u.clone(), u.clone()).unwrap();
    for eps in [0.0, 0.2, 0.5] {
        let c = contam(u.clone(), eps);
        let t = JointLowerTable::lower_envelope_of(&[g1.clone(), g2.clone()], eps).unwrap();
        assert!(t.table().is_monotone());
        assert!(gamma_geom_membership(&t, &c, &c).unwrap());
        assert!(!gamma_r_membership(JointRef::Table(&t), &c, &c).unwrap());
    }
}
