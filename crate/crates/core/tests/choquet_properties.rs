mod common;

use common::{contamination, distribution};
use credal_ot::choquet::default_step;
use credal_ot::{
    choquet_bounded_coherent, choquet_riemann, choquet_sorted, AtomFunction, CapacityTable,
    EnvelopeKind,
};
use proptest::prelude::*;

/// A belief function from Möbius masses, with its Choquet integral in the
/// closed form `Σ_A m(A) min_{x∈A} f(x)`.
fn belief(n: usize, mobius: &[(u64, f64)]) -> CapacityTable {
    let total: f64 = mobius.iter().map(|(_, w)| w).sum();
    let values = (0..1u64 << n)
        .map(|mask| {
            let v: f64 = mobius
                .iter()
                .filter(|(a, _)| a & !mask == 0)
                .map(|(_, w)| w / total)
                .sum();
            v.min(1.0)
        })
        .collect();
    CapacityTable::new(n, values).unwrap()
}

fn mobius_oracle(f: &[f64], mobius: &[(u64, f64)]) -> f64 {
    let total: f64 = mobius.iter().map(|(_, w)| w).sum();
    mobius
        .iter()
        .map(|&(a, w)| {
            let min = (0..f.len())
                .filter(|i| a >> i & 1 == 1)
                .map(|i| f[i])
                .fold(f64::INFINITY, f64::min);
            w / total * min
        })
        .sum()
}

fn belief_instance() -> impl Strategy<Value = (Vec<f64>, Vec<(u64, f64)>)> {
    (1usize..=12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0f64..5.0, n),
            prop::collection::vec((1u64..1 << n, 0.05f64..1.0), 1..8),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sorted_sum_matches_mobius_form((f, mobius) in belief_instance()) {
        let nu = belief(f.len(), &mobius);
        let got = choquet_sorted(&AtomFunction::new(f.clone()).unwrap(), &nu).unwrap();
        prop_assert!((got - mobius_oracle(&f, &mobius)).abs() < 1e-12);
    }

    #[test]
    fn sorted_sum_matches_quadrature((f, mobius) in belief_instance()) {
        let nu = belief(f.len(), &mobius);
        let func = AtomFunction::new(f.clone()).unwrap();
        let step = (func.max() / 1000.0).max(1e-9);
        let a = choquet_sorted(&func, &nu).unwrap();
        let b = choquet_riemann(&func, &nu, step).unwrap();
        prop_assert!((a - b).abs() <= 2.0 * step * f.len() as f64 * func.max().max(1.0));
    }

    #[test]
    fn incoherent_scaling_identity(c in contamination(1..12), f in prop::collection::vec(0.0f64..10.0, 12)) {
        let f = f[..c.len()].to_vec();
        let func = AtomFunction::new(f.clone()).unwrap();
        let got = choquet_sorted(&func, &c.envelope(EnvelopeKind::Incoherent)).unwrap();
        let want = (1.0 - c.epsilon()) * c.base().expectation(&f).unwrap();
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn coherent_gap_is_eps_min(c in contamination(1..12), f in prop::collection::vec(0.0f64..10.0, 12)) {
        let func = AtomFunction::new(f[..c.len()].to_vec()).unwrap();
        let inc = choquet_sorted(&func, &c.envelope(EnvelopeKind::Incoherent)).unwrap();
        let coh = choquet_bounded_coherent(&func, &c).unwrap();
        let gap = coh - inc;
        prop_assert!(gap >= -1e-12);
        prop_assert!((gap - c.epsilon() * func.min()).abs() < 1e-12);
        let sorted_coh = choquet_sorted(&func, &c.envelope(EnvelopeKind::Coherent)).unwrap();
        prop_assert!((sorted_coh - coh).abs() < 1e-12);
    }

    #[test]
    fn positive_homogeneity((f, mobius) in belief_instance(), lambda in 0.0f64..20.0) {
        let nu = belief(f.len(), &mobius);
        let func = AtomFunction::new(f).unwrap();
        let base = choquet_sorted(&func, &nu).unwrap();
        let scaled = choquet_sorted(&func.scaled(lambda).unwrap(), &nu).unwrap();
        prop_assert!((scaled - lambda * base).abs() <= 1e-12 * (1.0 + lambda * base));
    }

    #[test]
    fn monotone_in_the_integrand(
        (f, mobius) in belief_instance(),
        bumps in prop::collection::vec(0.0f64..3.0, 12),
    ) {
        let nu = belief(f.len(), &mobius);
        let g: Vec<f64> = f.iter().zip(&bumps).map(|(a, b)| a + b).collect();
        let lo = choquet_sorted(&AtomFunction::new(f).unwrap(), &nu).unwrap();
        let hi = choquet_sorted(&AtomFunction::new(g).unwrap(), &nu).unwrap();
        prop_assert!(lo <= hi + 1e-12);
    }

    #[test]
    fn additive_capacity_gives_expectation(p in distribution(1..12), f in prop::collection::vec(0.0f64..10.0, 12)) {
        let f = f[..p.len()].to_vec();
        let got = choquet_sorted(&AtomFunction::new(f.clone()).unwrap(), &p).unwrap();
        prop_assert!((got - p.expectation(&f).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn default_step_quadrature_is_tight() {
    let c = credal_ot::EpsContamination::new(common::dist("x", vec![0.2, 0.3, 0.5]), 0.4).unwrap();
    let f = AtomFunction::new(vec![4.0, 1.0, 2.5]).unwrap();
    let nu = c.envelope(EnvelopeKind::Incoherent);
    let step = default_step(&f);
    let a = choquet_sorted(&f, &nu).unwrap();
    let b = choquet_riemann(&f, &nu, step).unwrap();
    assert!((a - b).abs() <= 2.0 * step * 3.0 * 4.0);
}
