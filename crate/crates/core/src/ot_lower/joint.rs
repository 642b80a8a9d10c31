use crate::credal_core::{Capacity, CapacityTable, Event, EpsContamination};
use crate::numeric::compensated_sum;
use crate::ot_classical::TransportPlan;
use crate::{Error, Result};

/// Largest product space `n·m` accepted for explicit joint tables.
pub const JOINT_TABLE_MAX_CELLS: usize = 16;

/// A joint lower probability on a product space `X × Y`.
///
/// Product events are flattened row-major: cell `(i, j)` is atom `i·m + j`.
pub trait JointLower: Capacity {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// Value on the rectangle `A × B`.
    fn rectangle(&self, a: &Event, b: &Event) -> Result<f64> {
        a.validate(self.rows())?;
        b.validate(self.cols())?;
        Ok(self.measure_unchecked(&rectangle_event(a, b, self.cols())))
    }

    /// Marginal lower probability of `A` on `X`, i.e. the value on `A × Y`.
    fn source_marginal(&self, a: &Event) -> Result<f64> {
        self.rectangle(a, &Event::full(self.cols()))
    }

    /// Marginal lower probability of `B` on `Y`, i.e. the value on `X × B`.
    fn target_marginal(&self, b: &Event) -> Result<f64> {
        self.rectangle(&Event::full(self.rows()), b)
    }
}

pub(crate) fn rectangle_event(a: &Event, b: &Event, cols: usize) -> Event {
    Event::from_indices(
        a.indices()
            .iter()
            .flat_map(|&i| b.indices().iter().map(move |&j| i * cols + j)),
    )
}

/// The joint lower probability `α̲ = (1-ε) α` of a countably additive plan.
///
/// Stored as the plan and `ε`; events are evaluated on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerPlan {
    base: TransportPlan,
    epsilon: f64,
}

impl LowerPlan {
    pub fn new(base: TransportPlan, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::input(format!("epsilon {epsilon} outside [0,1]")));
        }
        Ok(Self { base, epsilon })
    }

    pub fn base(&self) -> &TransportPlan {
        &self.base
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    fn scale(&self) -> f64 {
        1.0 - self.epsilon
    }

    /// `G(A × B)` for the underlying plan.
    pub fn base_rectangle(&self, a: &Event, b: &Event) -> Result<f64> {
        a.validate(self.rows())?;
        b.validate(self.cols())?;
        let m = self.cols();
        Ok(compensated_sum(a.indices().iter().flat_map(|&i| {
            b.indices().iter().map(move |&j| self.base.matrix()[i * m + j])
        })))
    }
}

impl Capacity for LowerPlan {
    fn atoms(&self) -> usize {
        self.base.matrix().len()
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        let cells = self.base.matrix();
        self.scale() * compensated_sum(event.indices().iter().map(|&k| cells[k]))
    }

    fn chain_measures(&self, order: &[usize]) -> Vec<f64> {
        let cells = self.base.matrix();
        let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
        order
            .iter()
            .map(|&k| {
                let v = cells[k];
                let t = sum + v;
                if sum.abs() >= v.abs() {
                    comp += (sum - t) + v;
                } else {
                    comp += (v - t) + sum;
                }
                sum = t;
                self.scale() * (sum + comp)
            })
            .collect()
    }
}

impl JointLower for LowerPlan {
    fn rows(&self) -> usize {
        self.base.rows()
    }

    fn cols(&self) -> usize {
        self.base.cols()
    }
}

/// An explicit joint lower probability on a small product space.
#[derive(Debug, Clone, PartialEq)]
pub struct JointLowerTable {
    rows: usize,
    cols: usize,
    table: CapacityTable,
}

impl JointLowerTable {
    pub fn new(rows: usize, cols: usize, table: CapacityTable) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::input("joint table needs a nonempty product space"));
        }
        if table.atoms() != rows * cols {
            return Err(Error::input(format!(
                "joint table has {} atoms, expected {rows}x{cols}",
                table.atoms()
            )));
        }
        Ok(Self { rows, cols, table })
    }

    /// Tabulates any joint lower probability.
    pub fn tabulate<J: JointLower + ?Sized>(joint: &J) -> Result<Self> {
        let cells = joint.rows() * joint.cols();
        if cells > JOINT_TABLE_MAX_CELLS {
            return Err(Error::size("joint table cells", cells, JOINT_TABLE_MAX_CELLS));
        }
        Self::new(joint.rows(), joint.cols(), CapacityTable::tabulate(joint)?)
    }

    /// The lower envelope `(1-ε) min_k G_k(E)` of several joints.
    pub fn lower_envelope_of(plans: &[TransportPlan], epsilon: f64) -> Result<Self> {
        let first = plans
            .first()
            .ok_or_else(|| Error::input("need at least one plan"))?;
        let (rows, cols) = (first.rows(), first.cols());
        if plans.iter().any(|p| p.rows() != rows || p.cols() != cols) {
            return Err(Error::input("plans have different shapes"));
        }
        let cells = rows * cols;
        if cells > JOINT_TABLE_MAX_CELLS {
            return Err(Error::size("joint table cells", cells, JOINT_TABLE_MAX_CELLS));
        }
        let values = (0..1u64 << cells)
            .map(|mask| {
                let e = Event::from_mask(mask, cells);
                let min = plans
                    .iter()
                    .map(|p| compensated_sum(e.indices().iter().map(|&k| p.matrix()[k])))
                    .fold(f64::INFINITY, f64::min);
                (1.0 - epsilon) * min
            })
            .collect();
        Self::new(rows, cols, CapacityTable::new(cells, values)?)
    }

    pub fn table(&self) -> &CapacityTable {
        &self.table
    }
}

impl Capacity for JointLowerTable {
    fn atoms(&self) -> usize {
        self.rows * self.cols
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        self.table.measure_unchecked(event)
    }
}

impl JointLower for JointLowerTable {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }
}

pub(crate) fn check_endpoints<J: JointLower + ?Sized>(
    joint: &J,
    cp: &EpsContamination,
    cq: &EpsContamination,
) -> Result<()> {
    super::require_equal_epsilon(cp, cq)?;
    if joint.rows() != cp.len() || joint.cols() != cq.len() {
        return Err(Error::input(format!(
            "joint is {}x{} but the marginals have {} and {} atoms",
            joint.rows(),
            joint.cols(),
            cp.len(),
            cq.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal_core::{DiscreteDistribution, FiniteSpace};

    fn plan() -> TransportPlan {
        let p = DiscreteDistribution::new(FiniteSpace::indexed("x", 2).unwrap(), vec![0.4, 0.6]).unwrap();
        let q = DiscreteDistribution::new(FiniteSpace::indexed("y", 3).unwrap(), vec![0.2, 0.3, 0.5])
            .unwrap();
        TransportPlan::product(p, q)
    }

    #[test]
    fn lower_plan_scales_events() {
        let lp = LowerPlan::new(plan(), 0.25).unwrap();
        let full = lp.rectangle(&Event::full(2), &Event::full(3)).unwrap();
        assert!((full - 0.75).abs() < 1e-15);
        let a = lp.source_marginal(&Event::singleton(1)).unwrap();
        assert!((a - 0.75 * 0.6).abs() < 1e-15);
        let b = lp.target_marginal(&Event::from_indices([0, 2])).unwrap();
        assert!((b - 0.75 * 0.7).abs() < 1e-15);
        assert!(lp.rectangle(&Event::singleton(2), &Event::full(3)).is_err());
    }

    #[test]
    fn chain_measures_match_events() {
        let lp = LowerPlan::new(plan(), 0.1).unwrap();
        let order = [4, 0, 5, 2, 1, 3];
        let fast = lp.chain_measures(&order);
        for k in 0..order.len() {
            let e = Event::from_indices(order[..=k].iter().copied());
            assert!((fast[k] - lp.measure(&e).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn tabulated_plan_matches() {
        let lp = LowerPlan::new(plan(), 0.3).unwrap();
        let t = JointLowerTable::tabulate(&lp).unwrap();
        let e = Event::from_indices([0, 4, 5]);
        assert!((t.measure(&e).unwrap() - lp.measure(&e).unwrap()).abs() < 1e-15);
    }
}
