//! Shared fixtures for the benchmarks.

use qmeasure::spectrum::{measure, DiscreteMeasure};
use qmeasure::{Beta0Mode, RecurrenceCoefficients};

/// `a = 0.3`, `q = 0.25`, `β₀ = γ₀`.
pub fn example() -> RecurrenceCoefficients {
    RecurrenceCoefficients::example_family(0.3, 0.25, Beta0Mode::GammaOnly).unwrap()
}

pub fn example_measure(k: usize) -> DiscreteMeasure {
    measure(&example(), k, 1e-10).unwrap()
}
