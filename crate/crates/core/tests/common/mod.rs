#![allow(dead_code)]

use credal_ot::{CostMatrix, DiscreteDistribution, EpsContamination, FiniteSpace};
use proptest::prelude::*;

pub fn dist(prefix: &str, weights: Vec<f64>) -> DiscreteDistribution {
    DiscreteDistribution::from_weights(FiniteSpace::indexed(prefix, weights.len()).unwrap(), weights)
        .unwrap()
}

pub fn weights(n: impl Into<proptest::sample::SizeRange>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n)
}

pub fn distribution(n: impl Into<proptest::sample::SizeRange>) -> impl Strategy<Value = DiscreteDistribution> {
    weights(n).prop_map(|w| dist("x", w))
}

pub fn contamination(
    n: impl Into<proptest::sample::SizeRange>,
) -> impl Strategy<Value = EpsContamination> {
    (distribution(n), 0.0f64..=1.0).prop_map(|(p, e)| EpsContamination::new(p, e).unwrap())
}

pub fn cost(rows: usize, cols: usize) -> impl Strategy<Value = CostMatrix> {
    prop::collection::vec(0.0f64..10.0, rows * cols)
        .prop_map(move |d| CostMatrix::new(rows, cols, d).unwrap())
}
