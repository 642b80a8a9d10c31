use super::discrete::solve_kantorovich;
use super::plan::CostMatrix;
use crate::credal_core::DiscreteDistribution;
use crate::{Error, Result};

/// Tolerance for the metric axioms of a distance matrix.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Checks that `d` is a metric on its atoms: square, zero diagonal,
/// symmetric and satisfying the triangle inequality, all within
/// [`METRIC_TOLERANCE`].
pub fn check_metric(d: &CostMatrix) -> Result<()> {
    let n = d.rows();
    if d.cols() != n {
        return Err(Error::input(format!(
            "distance matrix must be square, got {}x{}",
            d.rows(),
            d.cols()
        )));
    }
    for i in 0..n {
        if d.get(i, i).abs() > METRIC_TOLERANCE {
            return Err(Error::input(format!("distance d({i},{i}) = {} is not 0", d.get(i, i))));
        }
        for j in 0..i {
            if (d.get(i, j) - d.get(j, i)).abs() > METRIC_TOLERANCE {
                return Err(Error::input(format!("distance is not symmetric at ({i},{j})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d.get(i, k) > d.get(i, j) + d.get(j, k) + METRIC_TOLERANCE {
                    return Err(Error::input(format!(
                        "triangle inequality fails for ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn check_exponent(pexp: f64) -> Result<()> {
    if !(pexp >= 1.0 && pexp.is_finite()) {
        return Err(Error::input(format!("Wasserstein exponent must be ≥ 1, got {pexp}")));
    }
    Ok(())
}

/// `W_p(p, q) = (min_π Σ d_ij^p π_ij)^{1/p}` for distributions on a common
/// metric space.
pub fn wasserstein_p(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    d: &CostMatrix,
    pexp: f64,
) -> Result<f64> {
    check_exponent(pexp)?;
    q.ensure_same_space(p.space(), "wasserstein")?;
    check_metric(d)?;
    let (_, value) = solve_kantorovich(p, q, &d.powf(pexp))?;
    Ok(value.max(0.0).powf(1.0 / pexp))
}
