//! Numeric certificates for the stability and energy statements: each check
//! returns a serializable report with a pass flag, or a refusal when the
//! bank does not meet the statement's hypothesis.

mod bound;
mod energy;
pub mod ensemble;
mod stability;

pub use bound::{check_translation_bound, gradient_envelope, sweep_corollary, BoundReport, SweepReport, SweepRow};
pub use energy::{check_energy_conservation, check_energy_decay, ConservationReport, DecayReport};
pub use stability::{check_nonexpansive, check_propagator_translation_commutes, CommuteReport, NonexpansiveReport};

/// Relative slack on the translation bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;
/// Relative slack on non-expansiveness.
pub const NONEXPANSIVE_TOLERANCE: f64 = 1e-10;
/// Relative tolerance on the energy identities.
pub const ENERGY_TOLERANCE: f64 = 1e-9;
/// Absolute tolerance on propagator/translation commutation.
pub const COMMUTE_TOLERANCE: f64 = 1e-12;
/// Version tag carried by every report.
pub const REPORT_SCHEMA: &str = "scatterbench.report/1";
