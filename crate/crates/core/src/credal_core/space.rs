use std::collections::HashSet;
use std::fmt;

use crate::numeric::{check_finite, compensated_sum};
use crate::{Error, Result};

/// Largest space for which events can be enumerated exhaustively or stored
/// as an explicit `2^n` table.
pub const MAX_ENUMERABLE_ATOMS: usize = 20;

/// Mass tolerance for a distribution to count as normalized.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A finite measurable space: an ordered list of distinct atom labels.
///
/// Every subset of atoms is an event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSpace {
    labels: Vec<String>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::input("a finite space needs at least one atom"));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::input(format!("duplicate atom label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// A space with labels `prefix0, prefix1, ...`.
    pub fn indexed(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.len())
    }

    /// Iterates over all `2^n` events as bitmasks.
    pub fn events(&self) -> Result<impl Iterator<Item = Event> + '_> {
        let n = self.len();
        if n > MAX_ENUMERABLE_ATOMS {
            return Err(Error::size("atoms to enumerate", n, MAX_ENUMERABLE_ATOMS));
        }
        Ok((0..(1u64 << n)).map(move |mask| Event::from_mask(mask, n)))
    }
}

/// An event of a finite space, stored as a sorted set of atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Event {
    indices: Vec<usize>,
}

impl Event {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    pub fn singleton(i: usize) -> Self {
        Self { indices: vec![i] }
    }

    /// Builds an event from arbitrary indices; duplicates are merged.
    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        Self { indices }
    }

    /// Wraps indices that are already sorted and distinct.
    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    /// Bit `i` of `mask` selects atom `i`; bits at or above `n` are ignored.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self {
            indices: (0..n.min(64)).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> Option<u64> {
        if self.indices.last().is_some_and(|&i| i >= 64) {
            return None;
        }
        Some(self.indices.iter().fold(0u64, |m, &i| m | 1 << i))
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Whether this event is the whole of an `n`-atom space.
    pub fn is_full(&self, n: usize) -> bool {
        self.indices.len() == n && self.indices.last().is_none_or(|&i| i + 1 == n)
    }

    pub fn complement(&self, n: usize) -> Self {
        Self {
            indices: (0..n).filter(|i| !self.contains(*i)).collect(),
        }
    }

    /// Fails when an index does not name an atom of an `n`-atom space.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&i) if i >= n => Err(Error::input(format!(
                "event index {i} out of range for a space of {n} atoms"
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A probability mass function on a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    space: FiniteSpace,
    mass: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(space: FiniteSpace, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::input(format!(
                "distribution has {} masses for {} atoms",
                mass.len(),
                space.len()
            )));
        }
        check_finite(&mass, "distribution")?;
        if let Some(pos) = mass.iter().position(|&m| m < 0.0) {
            return Err(Error::input(format!(
                "negative mass {} at atom {pos}",
                mass[pos]
            )));
        }
        let total = compensated_sum(mass.iter().copied());
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::input(format!("masses sum to {total}, expected 1")));
        }
        Ok(Self { space, mass })
    }

    /// Normalizes nonnegative weights before validating.
    pub fn from_weights(space: FiniteSpace, weights: Vec<f64>) -> Result<Self> {
        check_finite(&weights, "weights")?;
        let total = compensated_sum(weights.iter().copied());
        if total <= 0.0 {
            return Err(Error::input("weights must have positive total"));
        }
        Self::new(space, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(space: FiniteSpace) -> Self {
        let n = space.len();
        let mass = vec![1.0 / n as f64; n];
        Self { space, mass }
    }

    pub fn dirac(space: FiniteSpace, atom: usize) -> Result<Self> {
        if atom >= space.len() {
            return Err(Error::input(format!(
                "dirac atom {atom} out of range for {} atoms",
                space.len()
            )));
        }
        let mut mass = vec![0.0; space.len()];
        mass[atom] = 1.0;
        Ok(Self { space, mass })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn prob(&self, event: &Event) -> Result<f64> {
        event.validate(self.len())?;
        Ok(self.prob_unchecked(event))
    }

    pub(crate) fn prob_unchecked(&self, event: &Event) -> f64 {
        compensated_sum(event.indices().iter().map(|&i| self.mass[i]))
    }

    /// Expectation of a per-atom function.
    pub fn expectation(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::input(format!(
                "function has {} values for {} atoms",
                values.len(),
                self.len()
            )));
        }
        Ok(compensated_sum(
            self.mass.iter().zip(values).map(|(p, f)| p * f),
        ))
    }

    pub fn is_dirac(&self) -> bool {
        self.mass.iter().filter(|&&m| m > 0.0).count() == 1
    }

    pub(crate) fn ensure_same_space(&self, other: &FiniteSpace, what: &str) -> Result<()> {
        if self.space != *other {
            return Err(Error::input(format!("{what}: spaces differ")));
        }
        Ok(())
    }
}

/// A total map between the atoms of two finite spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    source: FiniteSpace,
    target: FiniteSpace,
    assignment: Vec<usize>,
}

impl IndexMap {
    pub fn new(source: FiniteSpace, target: FiniteSpace, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != source.len() {
            return Err(Error::input(format!(
                "map assigns {} atoms but the source has {}",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&j) = assignment.iter().find(|&&j| j >= target.len()) {
            return Err(Error::input(format!(
                "map target index {j} out of range for {} atoms",
                target.len()
            )));
        }
        Ok(Self {
            source,
            target,
            assignment,
        })
    }

    pub fn identity(space: FiniteSpace) -> Self {
        let assignment = (0..space.len()).collect();
        Self {
            target: space.clone(),
            source: space,
            assignment,
        }
    }

    pub fn constant(source: FiniteSpace, target: FiniteSpace, value: usize) -> Result<Self> {
        let n = source.len();
        Self::new(source, target, vec![value; n])
    }

    pub fn source(&self) -> &FiniteSpace {
        &self.source
    }

    pub fn target(&self) -> &FiniteSpace {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// `T^{-1}(B)` as a source event.
    pub fn preimage(&self, target_event: &Event) -> Result<Event> {
        target_event.validate(self.target.len())?;
        Ok(Event::from_indices(
            self.assignment
                .iter()
                .enumerate()
                .filter(|(_, j)| target_event.contains(**j))
                .map(|(i, _)| i),
        ))
    }

    /// Per-target-atom masses of `T_# p`.
    pub fn pushforward_mass(&self, p: &DiscreteDistribution) -> Result<Vec<f64>> {
        p.ensure_same_space(&self.source, "pushforward")?;
        let mut out = vec![Vec::new(); self.target.len()];
        for (i, &j) in self.assignment.iter().enumerate() {
            out[j].push(p.mass()[i]);
        }
        Ok(out.into_iter().map(compensated_sum).collect())
    }

    /// Whether `T_# p = q` atom by atom within `tol`.
    pub fn pushes_forward(
        &self,
        p: &DiscreteDistribution,
        q: &DiscreteDistribution,
        tol: f64,
    ) -> Result<bool> {
        q.ensure_same_space(&self.target, "pushforward target")?;
        let pushed = self.pushforward_mass(p)?;
        Ok(pushed
            .iter()
            .zip(q.mass())
            .all(|(a, b)| (a - b).abs() <= tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> FiniteSpace {
        FiniteSpace::new(["a", "b"]).unwrap()
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(
            FiniteSpace::new(["a", "a"]),
            Err(Error::Input(_))
        ));
        assert!(FiniteSpace::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn mask_round_trip() {
        let e = Event::from_mask(0b1011, 4);
        assert_eq!(e.indices(), &[0, 1, 3]);
        assert_eq!(e.mask(), Some(0b1011));
        assert!(Event::full(3).is_full(3));
        assert!(!Event::from_indices([0, 2]).is_full(3));
        assert!(Event::empty().is_full(0));
        assert_eq!(Event::from_indices([2, 0, 2]).indices(), &[0, 2]);
    }

    #[test]
    fn event_validation() {
        assert!(Event::from_indices([0, 5]).validate(3).is_err());
        assert!(Event::from_indices([0, 2]).validate(3).is_ok());
    }

    #[test]
    fn distribution_checks_mass() {
        assert!(DiscreteDistribution::new(ab(), vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(ab(), vec![1.5, -0.5]).is_err());
        assert!(DiscreteDistribution::new(ab(), vec![1.0]).is_err());
        assert!(DiscreteDistribution::new(ab(), vec![f64::NAN, 1.0]).is_err());
        let d = DiscreteDistribution::new(ab(), vec![0.25, 0.75]).unwrap();
        assert_eq!(d.prob(&Event::singleton(1)).unwrap(), 0.75);
        assert!(d.prob(&Event::singleton(2)).is_err());
    }

    #[test]
    fn pushforward_of_constant_map_is_dirac() {
        let p = DiscreteDistribution::uniform(ab());
        let t = IndexMap::constant(ab(), ab(), 1).unwrap();
        assert_eq!(t.pushforward_mass(&p).unwrap(), vec![0.0, 1.0]);
        assert_eq!(
            t.preimage(&Event::singleton(0)).unwrap(),
            Event::empty()
        );
        assert!(IndexMap::new(ab(), ab(), vec![0, 2]).is_err());
    }
}
