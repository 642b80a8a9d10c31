//! Choquet integration of nonnegative functions against capacities.
//!
//! Three routes are provided and used as oracles for one another:
//!
//! * [`choquet_sorted`]: the exact layer-cake sum over the level sets of `f`,
//! * [`choquet_riemann`]: midpoint quadrature of the survivor function
//!   `t ↦ ν({f ≥ t})`,
//! * [`choquet_bounded_coherent`]: the bounded-function form
//!   `min f + ∫_{min f}^{max f} P̲′({f > t}) dt` against the coherent
//!   envelope of an ε-contamination.
//!
//! Sign-changing functions are rejected: transport costs are nonnegative.

use crate::credal_core::{Capacity, EpsContamination, Event};
use crate::numeric::{check_finite, compensated_sum};
use crate::{Error, Result};

/// Number of quadrature cells used by [`default_step`].
pub const DEFAULT_QUADRATURE_CELLS: f64 = 1e5;

/// A real-valued function on the atoms of a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFunction {
    values: Vec<f64>,
}

impl AtomFunction {
    /// Fails on non-finite values. Negative values are allowed here and
    /// rejected by the integrals.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values, "function")?;
        if values.is_empty() {
            return Err(Error::input("function needs at least one value"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * lambda).collect())
    }

    /// Atom indices ordered by value descending, ties by index ascending.
    fn descending_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .total_cmp(&self.values[a])
                .then_with(|| a.cmp(&b))
        });
        order
    }

    fn check_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(i) => Err(Error::domain(format!(
                "Choquet integration needs a nonnegative function, value {} at atom {i}",
                self.values[i]
            ))),
            None => Ok(()),
        }
    }

    fn check_len(&self, atoms: usize) -> Result<()> {
        if self.values.len() != atoms {
            return Err(Error::input(format!(
                "function has {} values for a capacity on {atoms} atoms",
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// `max(f) / 1e5`, or 1 for the zero function.
pub fn default_step(f: &AtomFunction) -> f64 {
    let m = f.max();
    if m > 0.0 {
        m / DEFAULT_QUADRATURE_CELLS
    } else {
        1.0
    }
}

/// Layer-cake sum `Σ_i (f₍ᵢ₎ − f₍ᵢ₊₁₎) ν(Aᵢ)` with `Aᵢ` the top-`i` atoms and
/// `f₍ₙ₊₁₎ = 0`.
pub fn choquet_sorted<C: Capacity + ?Sized>(f: &AtomFunction, nu: &C) -> Result<f64> {
    f.check_len(nu.atoms())?;
    f.check_nonnegative()?;
    Ok(layer_cake(f, nu, &f.descending_order()))
}

fn layer_cake<C: Capacity + ?Sized>(f: &AtomFunction, nu: &C, order: &[usize]) -> f64 {
    let chain = nu.chain_measures(order);
    let terms = order.iter().enumerate().filter_map(|(k, &atom)| {
        let next = order.get(k + 1).map_or(0.0, |&a| f.values[a]);
        let gap = f.values[atom] - next;
        (gap > 0.0).then(|| gap * chain[k])
    });
    compensated_sum(terms)
}

/// Midpoint quadrature of `∫₀^{max f} ν({f ≥ t}) dt` with cells no wider than
/// `step`.
pub fn choquet_riemann<C: Capacity + ?Sized>(f: &AtomFunction, nu: &C, step: f64) -> Result<f64> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::input(format!("quadrature step must be positive, got {step}")));
    }
    f.check_len(nu.atoms())?;
    f.check_nonnegative()?;
    let top = f.max();
    if top == 0.0 {
        return Ok(0.0);
    }
    let cells = (top / step).ceil().max(1.0);
    if cells > 1e9 {
        return Err(Error::input(format!(
            "quadrature step {step} needs {cells} cells, more than 1e9"
        )));
    }
    let cells = cells as u64;
    let width = top / cells as f64;
    let mut current: Option<(Vec<bool>, f64)> = None;
    let mut terms = Vec::with_capacity(f.len() + 1);
    let mut run = 0u64;
    for k in 0..cells {
        let t = (k as f64 + 0.5) * width;
        let members: Vec<bool> = f.values.iter().map(|&v| v >= t).collect();
        match &current {
            Some((prev, _)) if *prev == members => run += 1,
            _ => {
                if let Some((_, value)) = current.take() {
                    terms.push(run as f64 * width * value);
                }
                let level = Event::from_indices(
                    members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i),
                );
                current = Some((members, nu.measure_unchecked(&level)));
                run = 1;
            }
        }
    }
    if let Some((_, value)) = current {
        terms.push(run as f64 * width * value);
    }
    Ok(compensated_sum(terms))
}

/// Choquet integral against the coherent envelope, written for a bounded
/// function as `min f + ∫_{min f}^{max f} P̲′({f > t}) dt`.
///
/// Equals `(1-ε) E_P[f] + ε min f`, which exceeds the incoherent integral by
/// exactly `ε min f`.
pub fn choquet_bounded_coherent(f: &AtomFunction, c: &EpsContamination) -> Result<f64> {
    f.check_len(c.len())?;
    f.check_nonnegative()?;
    let order = f.descending_order();
    let lowest = f.min();
    let mut terms = vec![lowest];
    let mut top: Vec<usize> = Vec::with_capacity(order.len());
    for k in 0..order.len().saturating_sub(1) {
        top.push(order[k]);
        let gap = f.values[order[k]] - f.values[order[k + 1]];
        if gap > 0.0 {
            let strict_level = Event::from_indices(top.iter().copied());
            terms.push(gap * c.lower_coherent(&strict_level)?);
        }
    }
    Ok(compensated_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credal_core::{DiscreteDistribution, EnvelopeKind, FiniteSpace};

    fn uniform_ab(eps: f64) -> EpsContamination {
        let space = FiniteSpace::new(["a", "b"]).unwrap();
        EpsContamination::new(DiscreteDistribution::uniform(space), eps).unwrap()
    }

    fn f(v: &[f64]) -> AtomFunction {
        AtomFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn sorted_examples() {
        let c = uniform_ab(0.3);
        let k = f(&[2.5, 2.5]);
        let inc = choquet_sorted(&k, &c.envelope(EnvelopeKind::Incoherent)).unwrap();
        assert!((inc - 2.5 * 0.7).abs() < 1e-15);
        let coh = choquet_sorted(&k, &c.envelope(EnvelopeKind::Coherent)).unwrap();
        assert_eq!(coh, 2.5);

        let c = uniform_ab(0.5);
        let v = choquet_sorted(&f(&[3.0, 1.0]), &c.envelope(EnvelopeKind::Incoherent)).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn riemann_examples() {
        let c = uniform_ab(0.5);
        let env = c.envelope(EnvelopeKind::Incoherent);
        assert_eq!(choquet_riemann(&f(&[0.0, 0.0]), &env, 0.1).unwrap(), 0.0);
        let v = choquet_riemann(&f(&[3.0, 1.0]), &env, 1e-4).unwrap();
        assert!((v - 1.0).abs() <= 5e-4);

        let p = DiscreteDistribution::new(FiniteSpace::indexed("x", 3).unwrap(), vec![0.2, 0.5, 0.3])
            .unwrap();
        let g = f(&[0.7, 2.0, 1.1]);
        let expect = p.expectation(g.values()).unwrap();
        let got = choquet_riemann(&g, &p, 1e-4).unwrap();
        assert!((got - expect).abs() <= 2.0 * 1e-4 * 3.0 * 2.0);
    }

    #[test]
    fn riemann_rejects_bad_step() {
        let c = uniform_ab(0.5);
        let env = c.envelope(EnvelopeKind::Incoherent);
        assert!(matches!(choquet_riemann(&f(&[1.0, 0.0]), &env, 0.0), Err(Error::Input(_))));
        assert!(choquet_riemann(&f(&[1.0, 0.0]), &env, -1.0).is_err());
    }

    #[test]
    fn bounded_coherent_examples() {
        let c = uniform_ab(0.5);
        assert_eq!(choquet_bounded_coherent(&f(&[4.0, 4.0]), &c).unwrap(), 4.0);
        assert_eq!(choquet_bounded_coherent(&f(&[3.0, 1.0]), &c).unwrap(), 1.5);
        let g = f(&[0.0, 2.0]);
        assert_eq!(
            choquet_bounded_coherent(&g, &c).unwrap(),
            choquet_sorted(&g, &c.envelope(EnvelopeKind::Incoherent)).unwrap()
        );
    }

    #[test]
    fn negative_values_are_domain_errors() {
        let c = uniform_ab(0.5);
        let g = f(&[1.0, -0.5]);
        assert!(matches!(
            choquet_sorted(&g, &c.envelope(EnvelopeKind::Incoherent)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(choquet_bounded_coherent(&g, &c), Err(Error::Domain(_))));
    }

    #[test]
    fn ties_do_not_depend_on_atom_order() {
        let space = FiniteSpace::indexed("x", 4).unwrap();
        let p = DiscreteDistribution::new(space, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let c = EpsContamination::new(p.clone(), 0.2).unwrap();
        let table = crate::credal_core::CapacityTable::new(
            4,
            (0..16u64)
                .map(|m| {
                    let e = Event::from_mask(m, 4);
                    // A distortion of P: monotone but not additive.
                    c.lower_incoherent(&e).unwrap().powi(2)
                })
                .collect(),
        )
        .unwrap();
        let g = f(&[2.0, 1.0, 2.0, 1.0]);
        let a = choquet_sorted(&g, &table).unwrap();
        // Equal blocks {0,2} and {1,3} visited in reverse index order.
        let b = layer_cake(&g, &table, &[2, 0, 3, 1]);
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_input_error() {
        let c = uniform_ab(0.5);
        assert!(matches!(
            choquet_sorted(&f(&[1.0]), &c.envelope(EnvelopeKind::Incoherent)),
            Err(Error::Input(_))
        ));
    }
}
