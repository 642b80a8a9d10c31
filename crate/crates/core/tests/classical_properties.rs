mod common;

use common::{cost, dist, distribution, weights};
use credal_ot::ot_classical::{
    brute_force_kantorovich, solve_kantorovich_with, solve_monge_discrete, GaussianPair,
};
use credal_ot::random::{invertible_matrix, spd_matrix, trial_rng};
use credal_ot::{gaussian_monge_map, solve_kantorovich, wasserstein_p, CostMatrix, PivotRule};
use proptest::prelude::*;

/// North-west corner coupling of two sorted line distributions: optimal for
/// any convex cost of `|x - y|`.
fn monotone_coupling_cost(xs: &[f64], p: &[f64], ys: &[f64], q: &[f64], h: impl Fn(f64) -> f64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut a, mut b) = (p[0], q[0]);
    let mut total = 0.0;
    loop {
        let t = a.min(b);
        total += t * h((xs[i] - ys[j]).abs());
        a -= t;
        b -= t;
        if a <= 1e-15 && i + 1 < p.len() {
            i += 1;
            a += p[i];
        }
        if b <= 1e-15 && j + 1 < q.len() {
            j += 1;
            b += q[j];
        }
        if (a <= 1e-15 && i + 1 == p.len()) || (b <= 1e-15 && j + 1 == q.len()) {
            break;
        }
    }
    total
}

fn sorted_points(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|g| {
        g.iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn lp_matches_vertex_enumeration(
        (n, m) in (1usize..=3, 1usize..=3),
        wp in weights(3),
        wq in weights(3),
        c in cost(3, 3),
    ) {
        let p = dist("x", wp[..n].to_vec());
        let q = dist("y", wq[..m].to_vec());
        let c = CostMatrix::from_fn(n, m, |i, j| c.get(i, j)).unwrap();
        let (_, lp) = solve_kantorovich(&p, &q, &c).unwrap();
        let brute = brute_force_kantorovich(&p, &q, &c).unwrap();
        prop_assert!((lp - brute).abs() <= 1e-9, "lp={} brute={}", lp, brute);
    }

    #[test]
    fn lp_matches_monotone_coupling_on_the_line(
        n in 1usize..=32,
        m in 1usize..=32,
        xs in sorted_points(32),
        ys in sorted_points(32),
        wp in weights(32),
        wq in weights(32),
        pexp in prop::sample::select(vec![1.0, 2.0, 3.0]),
    ) {
        let p = dist("x", wp[..n].to_vec());
        let q = dist("y", wq[..m].to_vec());
        let c = CostMatrix::from_fn(n, m, |i, j| (xs[i] - ys[j]).abs().powf(pexp)).unwrap();
        let (plan, lp) = solve_kantorovich(&p, &q, &c).unwrap();
        let oracle = monotone_coupling_cost(&xs[..n], p.mass(), &ys[..m], q.mass(), |d| d.powf(pexp));
        prop_assert!((lp - oracle).abs() <= 1e-9 * (1.0 + oracle), "lp={} oracle={}", lp, oracle);
        prop_assert!((plan.cost(&c).unwrap() - lp).abs() <= 1e-9 * (1.0 + lp));
    }

    #[test]
    fn pivot_rules_agree(n in 1usize..=12, m in 1usize..=12, wp in weights(12), wq in weights(12), c in cost(12, 12)) {
        let p = dist("x", wp[..n].to_vec());
        let q = dist("y", wq[..m].to_vec());
        let c = CostMatrix::from_fn(n, m, |i, j| c.get(i, j)).unwrap();
        let a = solve_kantorovich_with(&p, &q, &c, PivotRule::BlockSearch).unwrap().value;
        let b = solve_kantorovich_with(&p, &q, &c, PivotRule::FirstEligible).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn kantorovich_relaxes_monge(
        n in 1usize..=6,
        picks in prop::collection::vec(0usize..6, 6),
        uniform in any::<bool>(),
        wp in weights(6),
        c in cost(6, 6),
    ) {
        let p = if uniform { dist("x", vec![1.0; n]) } else { dist("x", wp[..n].to_vec()) };
        let m = n;
        let target = credal_ot::FiniteSpace::indexed("y", m).unwrap();
        let t = credal_ot::IndexMap::new(p.space().clone(), target.clone(), picks[..n].iter().map(|j| j % m).collect()).unwrap();
        let q = credal_ot::DiscreteDistribution::from_weights(target, t.pushforward_mass(&p).unwrap()).unwrap();
        let c = CostMatrix::from_fn(n, m, |i, j| c.get(i, j)).unwrap();
        let (_, lp) = solve_kantorovich(&p, &q, &c).unwrap();
        let (map, monge) = solve_monge_discrete(&p, &q, &c).unwrap().expect("feasible by construction");
        prop_assert!(lp <= monge + 1e-9);
        prop_assert!(monge <= c.map_cost(&p, &t).unwrap() + 1e-12);
        prop_assert!(map.pushes_forward(&p, &q, 1e-9).unwrap());
    }

    #[test]
    fn wasserstein_is_a_metric(
        n in 2usize..=8,
        pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 8),
        a in distribution(8),
        b in distribution(8),
        c in distribution(8),
        pexp in prop::sample::select(vec![1.0, 2.0]),
    ) {
        let d = CostMatrix::from_fn(n, n, |i, j| {
            ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt()
        }).unwrap();
        let cut = |x: &credal_ot::DiscreteDistribution| dist("x", x.mass()[..n].to_vec());
        let (a, b, c) = (cut(&a), cut(&b), cut(&c));
        let ab = wasserstein_p(&a, &b, &d, pexp).unwrap();
        let ba = wasserstein_p(&b, &a, &d, pexp).unwrap();
        let bc = wasserstein_p(&b, &c, &d, pexp).unwrap();
        let ac = wasserstein_p(&a, &c, &d, pexp).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-9);
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(wasserstein_p(&a, &a, &d, pexp).unwrap() <= 1e-7);
    }
}

#[test]
fn gaussian_map_pushes_covariance() {
    for trial in 0..50 {
        for d in [2, 3, 5] {
            let mut rng = trial_rng(11, trial * 8 + d as u64);
            let sp = spd_matrix(&mut rng, d);
            let sq = spd_matrix(&mut rng, d);
            let a = invertible_matrix(&mut rng, d);
            let g = GaussianPair::new(sp.clone(), sq.clone(), a).unwrap();
            let t = gaussian_monge_map(&g).unwrap();
            let resid = (&t * &sp * t.transpose() - &sq).norm();
            assert!(resid < 1e-8, "trial {trial} d {d}: residual {resid}");
        }
    }
}
