//! Seeded random instances for the invariant suites and benchmarks.
//!
//! Every generator takes an explicit RNG. [`trial_rng`] derives an
//! independent stream per `(seed, trial)` pair so that suites can run trials
//! in any order, or in parallel, and still reproduce.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::credal_core::{CapacityTable, DiscreteDistribution, EpsContamination, FiniteSpace, IndexMap};
use crate::ot_classical::CostMatrix;
use crate::Result;

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Flat Dirichlet weights on `n` atoms labelled `{prefix}0..`.
pub fn distribution<R: Rng + ?Sized>(rng: &mut R, prefix: &str, n: usize) -> Result<DiscreteDistribution> {
    let weights: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    DiscreteDistribution::from_weights(FiniteSpace::indexed(prefix, n)?, weights)
}

pub fn contamination<R: Rng + ?Sized>(
    rng: &mut R,
    prefix: &str,
    n: usize,
    epsilon: f64,
) -> Result<EpsContamination> {
    EpsContamination::new(distribution(rng, prefix, n)?, epsilon)
}

/// Costs drawn uniformly from `[0, 1)`.
pub fn cost_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<CostMatrix> {
    let data = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
    CostMatrix::new(rows, cols, data)
}

pub fn index_map<R: Rng + ?Sized>(
    rng: &mut R,
    source: &FiniteSpace,
    target: &FiniteSpace,
) -> Result<IndexMap> {
    let assignment = (0..source.len())
        .map(|_| rng.random_range(0..target.len()))
        .collect();
    IndexMap::new(source.clone(), target.clone(), assignment)
}

/// A source distribution, a random map and its pushforward, so that at
/// least one map is feasible. Half of the instances use a uniform source,
/// which makes many competing maps feasible.
pub fn feasible_monge_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
) -> Result<(DiscreteDistribution, DiscreteDistribution)> {
    let p = if rng.random_bool(0.5) {
        DiscreteDistribution::uniform(FiniteSpace::indexed("x", n)?)
    } else {
        distribution(rng, "x", n)?
    };
    let target = FiniteSpace::indexed("y", m)?;
    let map = if n == m && rng.random_bool(0.5) {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        IndexMap::new(p.space().clone(), target.clone(), perm)?
    } else {
        index_map(rng, p.space(), &target)?
    };
    let q = DiscreteDistribution::from_weights(target, map.pushforward_mass(&p)?)?;
    Ok((p, q))
}

/// A belief function on `n` atoms: random nonnegative masses on a few
/// random focal sets, summed over subsets.
pub fn belief_function<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CapacityTable> {
    let size = 1usize << n;
    let mut mobius = vec![0.0; size];
    let focal = rng.random_range(1..=(2 * n).max(1));
    for _ in 0..focal {
        let mask = rng.random_range(1..size);
        mobius[mask] += Distribution::<f64>::sample(&Exp1, rng);
    }
    let total: f64 = mobius.iter().sum();
    for v in &mut mobius {
        *v /= total;
    }
    for i in 0..n {
        for mask in 0..size {
            if mask >> i & 1 == 1 {
                mobius[mask] += mobius[mask ^ (1 << i)];
            }
        }
    }
    mobius[size - 1] = 1.0;
    for v in &mut mobius {
        *v = v.min(1.0);
    }
    CapacityTable::new(n, mobius)
}

fn normal_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng))
}

/// `B Bᵀ / d + I/2` for a standard normal `B`.
pub fn spd_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<f64> {
    let b = normal_matrix(rng, d);
    let m = &b * b.transpose() / d as f64 + DMatrix::identity(d, d) * 0.5;
    (&m + m.transpose()) * 0.5
}

/// `I + 0.3 N` redrawn until comfortably invertible.
pub fn invertible_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<f64> {
    loop {
        let a = DMatrix::identity(d, d) + normal_matrix(rng, d) * 0.3;
        if a.determinant().abs() > 0.1 {
            return a;
        }
    }
}

/// Euclidean distances between `n` uniform points in `[0,1]^dim`.
pub fn euclidean_metric<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize) -> Result<CostMatrix> {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    CostMatrix::from_fn(n, n, |i, j| {
        pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}
