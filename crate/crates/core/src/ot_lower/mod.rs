//! Transport between ε-contaminated lower probabilities.
//!
//! Both endpoints must share the same contamination level. Under that
//! condition the lower Monge and relaxed lower Kantorovich problems reduce to
//! their classical counterparts, scaled by `1-ε`.

mod conditioning;
mod joint;
mod membership;
mod transport;

pub use conditioning::{gbc_condition, geometric_condition, geometric_condition_joint};
pub use joint::{JointLower, JointLowerTable, LowerPlan, JOINT_TABLE_MAX_CELLS};
pub use membership::{gamma_geom_membership, gamma_r_membership, JointRef, ADDITIVITY_TOLERANCE};
pub use transport::{
    check_pushforward_constraint, check_pushforward_constraint_with, deterministic_lower_plan,
    lower_wasserstein_p, lpm_objective, lpm_objective_with, rlpk_objective, solve_lpm, solve_rlpk,
};

use crate::credal_core::EpsContamination;
use crate::{Error, Result};

/// Tolerance for treating two contamination levels as equal.
pub const EPSILON_MATCH_TOLERANCE: f64 = 1e-12;

pub(crate) fn require_equal_epsilon(cp: &EpsContamination, cq: &EpsContamination) -> Result<()> {
    let (a, b) = (cp.epsilon(), cq.epsilon());
    if (a - b).abs() > EPSILON_MATCH_TOLERANCE {
        return Err(Error::domain(format!(
            "lower transport requires equal contamination levels on both sides \
             (epsilon_P = epsilon_Q); got {a} and {b}"
        )));
    }
    Ok(())
}
