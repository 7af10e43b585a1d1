//! Semi-discrete Bessel sequences: construction and validation.

mod bank;
pub mod coherent;
pub mod covering;
pub mod manifest;
pub mod wavelet;

pub use bank::{
    measure_support_radius, validate_bessel, validate_parseval, BankSpec, BesselReport, Family, FilterBank,
    ParsevalReport, FRAME_TOLERANCE,
};
pub use coherent::{build_coherent_sequence, check_coherence, CoherenceReport, CoherentFamily, CoherentSequence};
pub use covering::{build_uniform_covering_bank, UniformCoveringParams};
pub use manifest::{export_bank, import_bank, BankManifest};
pub use wavelet::{build_wavelet_bank, max_feasible_cutoff, WaveletParams};
