use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::bank::FilterBank;
use super::covering::{build_uniform_covering_bank, UniformCoveringParams};
use super::wavelet::{build_wavelet_bank, WaveletParams};
use crate::error::{Error, Result};
use crate::sigkit::signal::max_abs_diff;
use crate::sigkit::Grid;

/// Response equality tolerance for the nesting check.
pub const NESTING_TOLERANCE: f64 = 1e-14;

/// Template for a J-indexed family of banks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoherentFamily {
    /// `scale_cutoff` is replaced by each J in the range.
    Wavelet(WaveletParams),
    /// `origin_radius` is the value at the first J and halves per step.
    UniformCovering(UniformCoveringParams),
}

/// Banks indexed by J together with their output support radii `D_J`.
#[derive(Clone, Debug)]
pub struct CoherentSequence {
    scales: Vec<u32>,
    banks: Vec<FilterBank>,
    d_values: Vec<f64>,
}

impl CoherentSequence {
    /// Assembles a sequence without validating it; see [`check_coherence`].
    pub fn from_parts(scales: Vec<u32>, banks: Vec<FilterBank>) -> Result<Self> {
        if scales.len() != banks.len() || banks.is_empty() {
            return Err(Error::InvalidParameter("need one bank per J and at least one bank".into()));
        }
        let d_values = banks.iter().map(|b| b.output_support_radius()).collect();
        Ok(CoherentSequence { scales, banks, d_values })
    }

    pub fn scales(&self) -> &[u32] {
        &self.scales
    }

    pub fn banks(&self) -> &[FilterBank] {
        &self.banks
    }

    pub fn d_values(&self) -> &[f64] {
        &self.d_values
    }

    pub fn len(&self) -> usize {
        self.banks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.banks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &FilterBank, f64)> {
        self.scales.iter().zip(&self.banks).zip(&self.d_values).map(|((&j, b), &d)| (j, b, d))
    }
}

pub fn build_coherent_sequence(
    grid: &Grid,
    family: &CoherentFamily,
    scales: RangeInclusive<u32>,
) -> Result<CoherentSequence> {
    if scales.is_empty() {
        return Err(Error::InvalidParameter("empty J range".into()));
    }
    let first = *scales.start();
    let mut js = Vec::new();
    let mut banks = Vec::new();
    for j in scales {
        let bank = match family {
            CoherentFamily::Wavelet(template) => {
                build_wavelet_bank(grid, &WaveletParams { scale_cutoff: j, ..template.clone() })?
            }
            CoherentFamily::UniformCovering(base) => {
                let origin_radius = base.origin_radius * 0.5f64.powi((j - first) as i32);
                build_uniform_covering_bank(grid, &UniformCoveringParams { origin_radius, ..base.clone() })?
            }
        };
        js.push(j);
        banks.push(bank);
    }
    CoherentSequence::from_parts(js, banks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub nesting_pass: bool,
    pub d_monotone_pass: bool,
    pub d_values: Vec<f64>,
    /// First violation found, if any.
    pub detail: Option<String>,
}

impl CoherenceReport {
    pub fn pass(&self) -> bool {
        self.nesting_pass && self.d_monotone_pass
    }
}

/// Checks peripheral nesting between consecutive banks and strict decrease
/// of `D_J`, in the order the sequence stores them.
pub fn check_coherence(seq: &CoherentSequence) -> CoherenceReport {
    let mut detail = None;
    let mut nesting_pass = true;
    'pairs: for (w, js) in seq.banks.windows(2).zip(seq.scales.windows(2)) {
        let (lo, hi) = (&w[0], &w[1]);
        if lo.grid() != hi.grid() {
            nesting_pass = false;
            detail = Some(format!("J={} and J={} use different grids", js[0], js[1]));
            break;
        }
        for p in lo.peripherals() {
            let ok = hi
                .peripheral(p.label())
                .map(|q| max_abs_diff(p.response(), q.response()) <= NESTING_TOLERANCE)
                .unwrap_or(false);
            if !ok {
                nesting_pass = false;
                detail = Some(format!("peripheral {} of J={} not reproduced in J={}", p.label(), js[0], js[1]));
                break 'pairs;
            }
        }
    }
    let d_monotone_pass = seq.d_values.windows(2).all(|w| w[1] < w[0]);
    if !d_monotone_pass && detail.is_none() {
        detail = Some(format!("D_J not strictly decreasing: {:?}", seq.d_values));
    }
    CoherenceReport { nesting_pass, d_monotone_pass, d_values: seq.d_values.clone(), detail }
}
