use super::space::{DiscreteDistribution, FiniteSpace};
use crate::numeric::check_finite;
use crate::{Error, Result};

/// A discrete distribution whose atoms sit at strictly increasing reals.
#[derive(Debug, Clone, PartialEq)]
pub struct LineDistribution {
    positions: Vec<f64>,
    dist: DiscreteDistribution,
    cumulative: Vec<f64>,
}

impl LineDistribution {
    pub fn new(positions: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        check_finite(&positions, "atom positions")?;
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("atom positions must be strictly increasing"));
        }
        let space = FiniteSpace::new(positions.iter().map(|x| format!("{x}")))?;
        let dist = DiscreteDistribution::new(space, mass)?;
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = dist
            .mass()
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        // Pin the last step so that quantile(1) is always the top atom.
        *cumulative.last_mut().expect("nonempty space") = 1.0;
        Ok(Self {
            positions,
            dist,
            cumulative,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn distribution(&self) -> &DiscreteDistribution {
        &self.dist
    }

    pub fn mass(&self) -> &[f64] {
        self.dist.mass()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Right-continuous step cdf `F(x) = P(X ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.positions.partition_point(|&p| p <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Generalized inverse `inf{x : F(x) ≥ u}`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::input(format!("quantile level {u} outside [0,1]")));
        }
        let k = self.cumulative.partition_point(|&c| c < u);
        Ok(self.positions[k.min(self.len() - 1)])
    }
}
