//! The scattering cascade: propagate through peripheral filters with a
//! modulus after each, read coefficients off with the output filter.

pub mod dump;
mod path;
mod transform;

pub use dump::{read_dump, write_dump, DumpCoefficients, DumpEntry, DumpIndex};
pub use path::Path;
pub use transform::{
    cascade_energies, l2l2_norm, layer_energy_profile, propagate, scatter, scatter_distance, scatter_pair_distance,
    EnergyLedger, ScatteringCoefficients, TruncationPolicy,
};
