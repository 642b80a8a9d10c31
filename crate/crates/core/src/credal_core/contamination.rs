use super::capacity::Capacity;
use super::space::{DiscreteDistribution, Event, FiniteSpace, IndexMap, MAX_ENUMERABLE_ATOMS};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// Slack allowed when testing set-wise dominance of a lower probability.
pub const DOMINANCE_TOLERANCE: f64 = 1e-12;

/// Which lower envelope of an ε-contamination to use.
///
/// Both envelopes agree on every event except the full space, where the
/// coherent one is 1 and the incoherent one is `1 - ε`. They have the same
/// core. The incoherent envelope is additive up to the `1 - ε` scale, which
/// is what makes the transport reductions work, so it is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EnvelopeKind {
    #[default]
    Incoherent,
    Coherent,
}

/// The ε-contaminated credal set `{(1-ε)P + εR : R a probability}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsContamination {
    base: DiscreteDistribution,
    epsilon: f64,
}

impl EpsContamination {
    pub fn new(base: DiscreteDistribution, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::input(format!("epsilon {epsilon} outside [0,1]")));
        }
        Ok(Self { base, epsilon })
    }

    pub fn base(&self) -> &DiscreteDistribution {
        &self.base
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn space(&self) -> &FiniteSpace {
        self.base.space()
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// `(1-ε) P(A)`.
    pub fn lower_incoherent(&self, event: &Event) -> Result<f64> {
        event.validate(self.len())?;
        Ok(self.incoherent_unchecked(event))
    }

    /// `(1-ε) P(A)` for a proper event, 1 on the full space.
    pub fn lower_coherent(&self, event: &Event) -> Result<f64> {
        event.validate(self.len())?;
        Ok(self.coherent_unchecked(event))
    }

    /// `(1-ε) P(A) + ε` for a nonempty event, 0 on the empty event.
    ///
    /// The value on the full space is `1` only up to rounding; it is not
    /// forced.
    pub fn upper(&self, event: &Event) -> Result<f64> {
        event.validate(self.len())?;
        if event.is_empty() {
            return Ok(0.0);
        }
        Ok(self.incoherent_unchecked(event) + self.epsilon)
    }

    pub fn lower(&self, event: &Event, kind: EnvelopeKind) -> Result<f64> {
        match kind {
            EnvelopeKind::Incoherent => self.lower_incoherent(event),
            EnvelopeKind::Coherent => self.lower_coherent(event),
        }
    }

    fn incoherent_unchecked(&self, event: &Event) -> f64 {
        (1.0 - self.epsilon) * self.base.prob_unchecked(event)
    }

    fn coherent_unchecked(&self, event: &Event) -> f64 {
        if event.is_full(self.len()) {
            1.0
        } else {
            self.incoherent_unchecked(event)
        }
    }

    /// The lower envelope as a [`Capacity`].
    pub fn envelope(&self, kind: EnvelopeKind) -> Envelope<'_> {
        Envelope {
            contamination: self,
            kind,
        }
    }

    /// Whether `candidate` lies in the core, checked on all `2^n` events.
    ///
    /// Dominating the incoherent envelope on every event is the same as
    /// dominating the coherent one, so a single pass decides both.
    pub fn core_membership(&self, candidate: &DiscreteDistribution) -> Result<bool> {
        candidate.ensure_same_space(self.space(), "core membership")?;
        let n = self.len();
        if n > MAX_ENUMERABLE_ATOMS {
            return Err(Error::size("atoms to enumerate", n, MAX_ENUMERABLE_ATOMS));
        }
        let slack: Vec<f64> = candidate
            .mass()
            .iter()
            .zip(self.base.mass())
            .map(|(c, p)| c - (1.0 - self.epsilon) * p)
            .collect();
        // slack(A) built up from slack(A minus its lowest atom).
        let mut table = vec![0.0_f64; 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            table[mask] = table[mask & (mask - 1)] + slack[low];
            if table[mask] < -DOMINANCE_TOLERANCE {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Recovers the contaminating distribution `R` with
    /// `candidate = (1-ε) P + ε R`, or `None` when the candidate is outside
    /// the credal set.
    pub fn decompose(
        &self,
        candidate: &DiscreteDistribution,
    ) -> Result<Option<DiscreteDistribution>> {
        candidate.ensure_same_space(self.space(), "decompose")?;
        if self.epsilon == 0.0 {
            return Err(Error::domain(
                "decomposition is undefined for epsilon = 0",
            ));
        }
        let raw: Vec<f64> = candidate
            .mass()
            .iter()
            .zip(self.base.mass())
            .map(|(c, p)| (c - (1.0 - self.epsilon) * p) / self.epsilon)
            .collect();
        // The most violated event is the set of atoms with negative slack.
        let deficit = compensated_sum(raw.iter().map(|r| r.min(0.0)));
        if deficit * self.epsilon < -DOMINANCE_TOLERANCE {
            return Ok(None);
        }
        let clamped: Vec<f64> = raw.into_iter().map(|r| r.max(0.0)).collect();
        let total = compensated_sum(clamped.iter().copied());
        if (total - 1.0).abs() > 1e-9 {
            return Ok(None);
        }
        let mass = clamped.into_iter().map(|r| r / total).collect();
        DiscreteDistribution::new(self.space().clone(), mass).map(Some)
    }

    /// The `n` vertices `(1-ε) P + ε δ_x` of the core, deduplicated.
    pub fn extreme_points(&self) -> Vec<DiscreteDistribution> {
        let mut out: Vec<DiscreteDistribution> = Vec::with_capacity(self.len());
        for x in 0..self.len() {
            let mass: Vec<f64> = self
                .base
                .mass()
                .iter()
                .enumerate()
                .map(|(i, p)| (1.0 - self.epsilon) * p + if i == x { self.epsilon } else { 0.0 })
                .collect();
            let point = DiscreteDistribution::from_weights(self.space().clone(), mass)
                .expect("convex combination of distributions is a distribution");
            if !out.iter().any(|q| q.mass() == point.mass()) {
                out.push(point);
            }
        }
        out
    }

    /// `T_# P̲ (B) = P̲(T^{-1}(B))` for the chosen envelope.
    pub fn pushforward_lower(
        &self,
        map: &IndexMap,
        target_event: &Event,
        kind: EnvelopeKind,
    ) -> Result<f64> {
        self.base.ensure_same_space(map.source(), "pushforward")?;
        let pre = map.preimage(target_event)?;
        self.lower(&pre, kind)
    }

    /// The pushforward lower probability as a capacity on the target space.
    pub fn pushforward<'a>(
        &'a self,
        map: &'a IndexMap,
        kind: EnvelopeKind,
    ) -> Result<PushforwardLower<'a>> {
        self.base.ensure_same_space(map.source(), "pushforward")?;
        Ok(PushforwardLower {
            contamination: self,
            map,
            kind,
        })
    }
}

/// A lower envelope of an [`EpsContamination`] viewed as a capacity.
#[derive(Debug, Clone, Copy)]
pub struct Envelope<'a> {
    contamination: &'a EpsContamination,
    kind: EnvelopeKind,
}

impl Envelope<'_> {
    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }
}

impl Capacity for Envelope<'_> {
    fn atoms(&self) -> usize {
        self.contamination.len()
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        match self.kind {
            EnvelopeKind::Incoherent => self.contamination.incoherent_unchecked(event),
            EnvelopeKind::Coherent => self.contamination.coherent_unchecked(event),
        }
    }
}

/// `B ↦ P̲(T^{-1}(B))` on the target space of a map.
#[derive(Debug, Clone, Copy)]
pub struct PushforwardLower<'a> {
    contamination: &'a EpsContamination,
    map: &'a IndexMap,
    kind: EnvelopeKind,
}

impl Capacity for PushforwardLower<'_> {
    fn atoms(&self) -> usize {
        self.map.target().len()
    }

    fn measure_unchecked(&self, event: &Event) -> f64 {
        let pre = self
            .map
            .preimage(event)
            .expect("event validated against the target space");
        self.contamination
            .envelope(self.kind)
            .measure_unchecked(&pre)
    }
}
