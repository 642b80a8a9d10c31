//! Optimal transport between lower probabilities.
//!
//! The credal sets handled here are ε-contaminations
//! `{(1-ε)P + εR : R a probability}` of a base distribution on a finite space.
//! When source and target share the same ε, the lower Monge and the relaxed
//! lower Kantorovich problems reduce to classical discrete transport scaled
//! by `1-ε`, which is how they are solved.
//!
//! ```
//! use credal_ot::{solve_rlpk, CostMatrix, DiscreteDistribution, EpsContamination, FiniteSpace};
//!
//! let space = FiniteSpace::indexed("x", 2)?;
//! let p = EpsContamination::new(DiscreteDistribution::new(space.clone(), vec![0.5, 0.5])?, 0.2)?;
//! let q = EpsContamination::new(DiscreteDistribution::new(space, vec![0.25, 0.75])?, 0.2)?;
//! let c = CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])?;
//! let (_, value) = solve_rlpk(&p, &q, &c)?;
//! assert!((value - 0.2).abs() < 1e-12);
//! # Ok::<(), credal_ot::Error>(())
//! ```

pub mod choquet;
pub mod credal_core;
mod error;
pub mod numeric;
pub mod ot_classical;
pub mod ot_lower;
pub mod random;

pub use choquet::{choquet_bounded_coherent, choquet_riemann, choquet_sorted, AtomFunction};
pub use credal_core::{
    Capacity, CapacityTable, EnvelopeKind, EpsContamination, Event, DiscreteDistribution,
    FiniteSpace, IndexMap, LineDistribution,
};
pub use error::{Error, Result};
pub use ot_classical::{
    gaussian_monge_map, monge_map_1d, solve_kantorovich, solve_monge_discrete, wasserstein_p,
    Continuous1d, CostMatrix, GaussianPair, PivotRule, TransportPlan,
};
pub use ot_lower::{
    gbc_condition, geometric_condition, lower_wasserstein_p, lpm_objective, rlpk_objective,
    solve_lpm, solve_rlpk, JointLowerTable, LowerPlan,
};
