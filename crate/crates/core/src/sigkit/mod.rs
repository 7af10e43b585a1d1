//! Periodic sampled signals, the DFT convention tying them to continuous
//! frequencies, and the filtering primitives built on top.

mod fft;
pub mod filter;
pub mod generate;
pub mod grid;
pub mod io;
pub mod signal;

pub use filter::{convolve, naive_convolve, support_radius, FrequencyFilter, Label, NAIVE_MAX_SAMPLES};
pub use grid::{Grid, Point, MAX_DIMS};
pub use signal::{dft, energy, idft, l2_norm, modulus, rotate, translate, Signal, Spectrum};
