//! Finite spaces, ε-contaminated credal sets and their envelopes.

mod capacity;
mod contamination;
mod line;
mod space;

pub use capacity::{Capacity, CapacityTable};
pub use contamination::{
    Envelope, EnvelopeKind, EpsContamination, PushforwardLower, DOMINANCE_TOLERANCE,
};
pub use line::LineDistribution;
pub use space::{
    DiscreteDistribution, Event, FiniteSpace, IndexMap, MASS_TOLERANCE, MAX_ENUMERABLE_ATOMS,
};
