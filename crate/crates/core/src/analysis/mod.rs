//! Expansions, kernels and verification suites over a reconstructed measure.

mod expansion;
mod linearization;
mod remark;
mod verify;

pub use expansion::{
    fourier_coefficient, lebesgue_constant, lebesgue_function, partial_sum, ExpansionResult, FourierCoefficient,
    KernelChoice, LebesgueValue, SupportBasis, TestFunction, DEFAULT_TAIL_TOLERANCE,
};
pub use linearization::{linearization, linearization_exact, linearization_rows, LinearizationTable};
pub use remark::{remark1_fixture_stats, ExplicitMeasure, Remark1Stats};
pub use verify::{verify_theorem1, verify_tms, CheckOutcome, Theorem1Options, Theorem1Report, TmsCheck};
