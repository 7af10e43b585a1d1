//! Semi-discrete scattering transforms on periodic grids.
//!
//! * [`sigkit`]: grids, signals, the DFT convention, convolution and translation.
//! * [`framekit`]: filter banks (Meyer-type wavelets, uniform covering frames),
//!   their frame checks, and J-indexed coherent sequences.
//! * [`scatter`]: the propagator, path enumeration and the scattering transform.
//! * [`verify`]: numeric certificates for the translation bound and the
//!   energy identities.

pub mod error;
pub mod framekit;
pub mod scatter;
pub mod sigkit;
pub mod verify;

pub use error::{Error, Result};
