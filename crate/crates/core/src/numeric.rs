//! Small numeric helpers shared by the solvers.

/// Neumaier-compensated sum.
///
/// The lower-probability identities are checked at 1e-12, so plain
/// left-to-right summation over a few thousand cells is not accurate enough.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) fn check_finite(values: &[f64], what: &str) -> crate::Result<()> {
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(crate::Error::input(format!(
            "{what} has a non-finite entry at index {pos}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(compensated_sum(std::iter::empty()), 0.0);
    }
}
