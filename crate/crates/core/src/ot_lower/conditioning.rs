use super::joint::{JointLower, LowerPlan};
use crate::credal_core::Event;
use crate::{Error, Result};

/// Geometric conditioning `G̲(A | B) = G̲(A × B) / G̲(X × B)`.
///
/// The `1-ε` factors cancel, so this is evaluated on the base plan.
pub fn geometric_condition(j: &LowerPlan, a: &Event, b: &Event) -> Result<f64> {
    let num = j.base_rectangle(a, b)?;
    let den = j.base_rectangle(&Event::full(j.rows()), b)?;
    if den <= 0.0 || j.epsilon() >= 1.0 {
        return Err(Error::domain("conditioning event has zero lower probability"));
    }
    Ok(num / den)
}

/// Geometric conditioning for any joint lower probability.
pub fn geometric_condition_joint<J: JointLower + ?Sized>(j: &J, a: &Event, b: &Event) -> Result<f64> {
    let num = j.rectangle(a, b)?;
    let den = j.target_marginal(b)?;
    if den <= 0.0 {
        return Err(Error::domain("conditioning event has zero lower probability"));
    }
    Ok(num / den)
}

/// Generalized Bayes conditioning `(1-ε) G(A,B) / ((1-ε) Q(B) + ε)`.
pub fn gbc_condition(j: &LowerPlan, a: &Event, b: &Event) -> Result<f64> {
    let scale = 1.0 - j.epsilon();
    let num = scale * j.base_rectangle(a, b)?;
    let den = scale * j.base_rectangle(&Event::full(j.rows()), b)? + j.epsilon();
    if den <= 0.0 {
        return Err(Error::domain("conditioning event has zero upper probability"));
    }
    Ok(num / den)
}
