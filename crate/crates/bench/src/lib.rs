//! Fixed-seed problem instances shared by the benchmarks.

use credal_ot::random::{self, trial_rng};
use credal_ot::{CapacityTable, CostMatrix, DiscreteDistribution, EpsContamination, Result};

const SEED: u64 = 7;

/// Random marginals and uniform costs on an `n × n` grid.
pub fn transport_instance(n: usize) -> Result<(DiscreteDistribution, DiscreteDistribution, CostMatrix)> {
    let mut rng = trial_rng(SEED, n as u64);
    let p = random::distribution(&mut rng, "x", n)?;
    let q = random::distribution(&mut rng, "y", n)?;
    let c = random::cost_matrix(&mut rng, n, n)?;
    Ok((p, q, c))
}

/// A feasible Monge instance: the target is the image of the source.
pub fn monge_instance(n: usize) -> Result<(DiscreteDistribution, DiscreteDistribution, CostMatrix)> {
    let mut rng = trial_rng(SEED, 1_000 + n as u64);
    let (p, q) = random::feasible_monge_pair(&mut rng, n, n)?;
    let c = random::cost_matrix(&mut rng, n, n)?;
    Ok((p, q, c))
}

pub fn contaminated(p: DiscreteDistribution, epsilon: f64) -> Result<EpsContamination> {
    EpsContamination::new(p, epsilon)
}

pub fn belief(n: usize) -> Result<CapacityTable> {
    random::belief_function(&mut trial_rng(SEED, 2_000 + n as u64), n)
}

/// `n` values spread over `[0, 10)`.
pub fn values(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i * 7919 % n.max(1)) as f64 * 10.0 / n.max(1) as f64).collect()
}
