use super::joint::{check_endpoints, rectangle_event, JointLower, JointLowerTable, LowerPlan};
use crate::credal_core::{Capacity, EpsContamination, Event};
use crate::numeric::compensated_sum;
use crate::ot_classical::MARGINAL_TOLERANCE;
use crate::Result;

/// Tolerance of the additivity and marginal checks on joint tables.
pub const ADDITIVITY_TOLERANCE: f64 = 1e-10;

/// Either representation of a joint lower probability.
#[derive(Debug, Clone, Copy)]
pub enum JointRef<'a> {
    Plan(&'a LowerPlan),
    Table(&'a JointLowerTable),
}

/// Whether `j` is `(1-ε)` times a coupling of `P` and `Q`.
pub fn gamma_r_membership(
    j: JointRef<'_>,
    cp: &EpsContamination,
    cq: &EpsContamination,
) -> Result<bool> {
    let eps = cp.epsilon();
    match j {
        JointRef::Plan(plan) => {
            check_endpoints(plan, cp, cq)?;
            if (plan.epsilon() - eps).abs() > super::EPSILON_MATCH_TOLERANCE {
                return Ok(false);
            }
            let base = plan.base();
            let close = |a: &[f64], b: &[f64]| {
                a.iter().zip(b).all(|(x, y)| (x - y).abs() <= MARGINAL_TOLERANCE)
            };
            Ok(close(&base.row_sums(), cp.base().mass()) && close(&base.col_sums(), cq.base().mass()))
        }
        JointRef::Table(table) => {
            check_endpoints(table, cp, cq)?;
            let cells = table.atoms();
            let singles: Vec<f64> = (0..cells)
                .map(|k| table.measure_unchecked(&Event::singleton(k)))
                .collect();
            let additive = (0..1u64 << cells).all(|mask| {
                let sum = compensated_sum(
                    (0..cells).filter(|k| mask >> k & 1 == 1).map(|k| singles[k]),
                );
                (table.table().at_mask(mask) - sum).abs() <= ADDITIVITY_TOLERANCE
            });
            if !additive {
                return Ok(false);
            }
            let scale = 1.0 - eps;
            let total = compensated_sum(singles.iter().copied());
            if (total - scale).abs() > ADDITIVITY_TOLERANCE {
                return Ok(false);
            }
            let m = table.cols();
            let rows_ok = (0..table.rows()).all(|i| {
                let r = compensated_sum((0..m).map(|j| singles[i * m + j]));
                (r - scale * cp.base().mass()[i]).abs() <= ADDITIVITY_TOLERANCE
            });
            let cols_ok = (0..m).all(|j| {
                let c = compensated_sum((0..table.rows()).map(|i| singles[i * m + j]));
                (c - scale * cq.base().mass()[j]).abs() <= ADDITIVITY_TOLERANCE
            });
            Ok(rows_ok && cols_ok)
        }
    }
}

/// Whether a joint table is a monotone capacity whose marginals on
/// `A × Y` and `X × B` are the incoherent envelopes of `P` and `Q`.
pub fn gamma_geom_membership(
    table: &JointLowerTable,
    cp: &EpsContamination,
    cq: &EpsContamination,
) -> Result<bool> {
    check_endpoints(table, cp, cq)?;
    if !table.table().is_monotone() {
        return Ok(false);
    }
    let (n, m) = (table.rows(), table.cols());
    let full_x = Event::full(n);
    let full_y = Event::full(m);
    let source_ok = (0..1u64 << n).all(|mask| {
        let a = Event::from_mask(mask, n);
        let j = table.measure_unchecked(&rectangle_event(&a, &full_y, m));
        let want = cp.lower_incoherent(&a).expect("event within the source space");
        (j - want).abs() <= ADDITIVITY_TOLERANCE
    });
    let target_ok = (0..1u64 << m).all(|mask| {
        let b = Event::from_mask(mask, m);
        let j = table.measure_unchecked(&rectangle_event(&full_x, &b, m));
        let want = cq.lower_incoherent(&b).expect("event within the target space");
        (j - want).abs() <= ADDITIVITY_TOLERANCE
    });
    Ok(source_ok && target_ok)
}
