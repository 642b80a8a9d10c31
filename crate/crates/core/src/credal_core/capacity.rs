use super::space::{DiscreteDistribution, Event, MAX_ENUMERABLE_ATOMS};
use crate::numeric::check_finite;
use crate::{Error, Result};

/// Tolerance for the capacity axioms on explicit tables.
const AXIOM_TOLERANCE: f64 = 1e-12;

/// A set function on the events of a finite space.
///
/// Implementations are the closed-form contamination envelopes, explicit
/// tables, pushforwards, and joint lower probabilities on product spaces.
pub trait Capacity {
    /// Number of atoms of the underlying space.
    fn atoms(&self) -> usize;

    /// Value on an event whose indices are already known to be in range.
    fn measure_unchecked(&self, event: &Event) -> f64;

    fn measure(&self, event: &Event) -> Result<f64> {
        event.validate(self.atoms())?;
        Ok(self.measure_unchecked(event))
    }

    /// Values on the growing chain `{o₀}, {o₀,o₁}, …` for a permutation
    /// `order` of the atoms. Additive capacities override this with running
    /// sums.
    fn chain_measures(&self, order: &[usize]) -> Vec<f64> {
        let mut members: Vec<usize> = Vec::with_capacity(order.len());
        order
            .iter()
            .map(|&atom| {
                let at = members.partition_point(|&x| x < atom);
                members.insert(at, atom);
                self.measure_unchecked(&Event::from_sorted(members.clone()))
            })
            .collect()
    }
}

impl<C: Capacity + ?Sized> Capacity for &C {
    fn atoms(&self) -> usize {
        (**self).atoms()
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        (**self).measure_unchecked(event)
    }

    fn chain_measures(&self, order: &[usize]) -> Vec<f64> {
        (**self).chain_measures(order)
    }
}

impl Capacity for DiscreteDistribution {
    fn atoms(&self) -> usize {
        self.len()
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        self.prob_unchecked(event)
    }
}

/// A capacity given by its full table of `2^n` values, indexed by bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityTable {
    atoms: usize,
    values: Vec<f64>,
}

impl CapacityTable {
    /// `values[mask]` is the value of the event encoded by `mask`.
    pub fn new(atoms: usize, values: Vec<f64>) -> Result<Self> {
        if atoms > MAX_ENUMERABLE_ATOMS {
            return Err(Error::size("capacity table atoms", atoms, MAX_ENUMERABLE_ATOMS));
        }
        if values.len() != 1 << atoms {
            return Err(Error::input(format!(
                "capacity table over {atoms} atoms needs {} values, got {}",
                1u64 << atoms,
                values.len()
            )));
        }
        check_finite(&values, "capacity table")?;
        if values[0].abs() > AXIOM_TOLERANCE {
            return Err(Error::input("capacity of the empty event must be 0"));
        }
        if let Some(mask) = values
            .iter()
            .position(|&v| !(-AXIOM_TOLERANCE..=1.0 + AXIOM_TOLERANCE).contains(&v))
        {
            return Err(Error::input(format!(
                "capacity value {} at mask {mask} outside [0,1]",
                values[mask]
            )));
        }
        Ok(Self { atoms, values })
    }

    /// Tabulates any capacity on at most 20 atoms.
    pub fn tabulate<C: Capacity + ?Sized>(capacity: &C) -> Result<Self> {
        let n = capacity.atoms();
        if n > MAX_ENUMERABLE_ATOMS {
            return Err(Error::size("capacity table atoms", n, MAX_ENUMERABLE_ATOMS));
        }
        let values = (0..1u64 << n)
            .map(|mask| capacity.measure_unchecked(&Event::from_mask(mask, n)))
            .collect();
        Self::new(n, values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_mask(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }

    /// Monotone with respect to inclusion, within tolerance.
    pub fn is_monotone(&self) -> bool {
        (0..self.values.len()).all(|mask| {
            (0..self.atoms).all(|i| {
                let sup = mask | 1 << i;
                self.values[sup] + AXIOM_TOLERANCE >= self.values[mask]
            })
        })
    }
}

impl Capacity for CapacityTable {
    fn atoms(&self) -> usize {
        self.atoms
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        let mask = event.mask().expect("table events fit in a bitmask");
        self.values[mask as usize]
    }
}
