use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use scatterbench::framekit::{
    build_uniform_covering_bank, build_wavelet_bank, import_bank, CoherentFamily, FilterBank, UniformCoveringParams,
    WaveletParams,
};
use scatterbench::scatter::TruncationPolicy;
use scatterbench::sigkit::Grid;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Wavelet,
    Covering,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Noise,
    Delta,
    Gabor,
}

/// Flat run configuration. Every field has a default, and the resolved
/// config is written into each report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dims: usize,
    pub size: usize,
    pub spacing: f64,
    pub family: FamilyName,
    /// Load the bank from a manifest instead of building it.
    pub manifest: Option<PathBuf>,
    pub scale_cutoff: u32,
    pub n_rotations: u32,
    pub sharpness: u32,
    pub bump_radius: Option<f64>,
    pub lattice_spacing: Option<f64>,
    pub origin_radius: Option<f64>,
    pub max_depth: usize,
    pub prune_threshold: Option<f64>,
    pub seed: u64,
    pub trials: Option<usize>,
    /// Fixed shift in physical units; otherwise drawn per trial.
    pub shift: Option<Vec<f64>>,
    /// Range of random shift lengths, in grid spacings.
    pub shift_range: [f64; 2],
    pub scale_range: [u32; 2],
    pub band_fraction: f64,
    pub signal: SignalKind,
    pub gabor_width: f64,
    /// Gabor carrier as a fraction of the Nyquist frequency per axis.
    pub gabor_frequency: f64,
    pub k_max: usize,
    /// Largest whole-sample shift drawn by the commutation check.
    pub commute_max_steps: i64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dims: 1,
            size: 256,
            spacing: 1.0,
            family: FamilyName::Wavelet,
            manifest: None,
            scale_cutoff: 4,
            n_rotations: 4,
            sharpness: 3,
            bump_radius: None,
            lattice_spacing: None,
            origin_radius: None,
            max_depth: 3,
            prune_threshold: None,
            seed: 0,
            trials: None,
            shift: None,
            shift_range: [1e-3, 50.0],
            scale_range: [1, 5],
            band_fraction: 0.8,
            signal: SignalKind::Noise,
            gabor_width: 8.0,
            gabor_frequency: 0.25,
            k_max: 4,
            commute_max_steps: 8,
        }
    }
}

pub const DEFAULTS_HELP: &str = "\
Config file (--config) is flat JSON; omitted fields take these defaults:
  dims 1, size 256, spacing 1.0, family \"wavelet\" (or \"covering\"), manifest none,
  scale_cutoff 4, n_rotations 4, sharpness 3,
  bump_radius nyquist/4 (nyquist/16 in covering sweeps), lattice_spacing 1.25*bump_radius,
  origin_radius lattice_spacing/2 (4.5*lattice_spacing in covering sweeps),
  max_depth 3, prune_threshold 0 for verify and 1e-6 for scatter, seed 0,
  trials 1 for sweep and 100 otherwise, shift random, shift_range [0.001, 50] spacings,
  scale_range [1, 5], band_fraction 0.8, signal \"noise\", gabor_width 8.0,
  gabor_frequency 0.25 of nyquist, k_max 4, commute_max_steps 8.
Exit codes: 0 pass, 1 certification failure, 2 refusal or usage error.
SCATTERBENCH_THREADS caps the number of worker threads.";

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        if self.dims != 1 && self.dims != 2 {
            bail!("dims must be 1 or 2, got {}", self.dims);
        }
        Ok(Grid::new(vec![self.size; self.dims], vec![self.spacing; self.dims])?)
    }

    pub fn wavelet_params(&self) -> WaveletParams {
        WaveletParams { scale_cutoff: self.scale_cutoff, n_rotations: self.n_rotations, sharpness: self.sharpness }
    }

    fn covering_params(&self, grid: &Grid, sweep: bool) -> UniformCoveringParams {
        let radius = self.bump_radius.unwrap_or(grid.min_nyquist() / if sweep { 16.0 } else { 4.0 });
        let lattice_spacing = self.lattice_spacing.unwrap_or(1.25 * radius);
        let origin_radius = self.origin_radius.unwrap_or(if sweep { 4.5 } else { 0.5 } * lattice_spacing);
        UniformCoveringParams { lattice_spacing, bump_radius: radius, origin_radius, sharpness: self.sharpness }
    }

    pub fn bank(&self) -> Result<FilterBank> {
        if let Some(m) = &self.manifest {
            let bank = import_bank(m)?;
            if bank.grid() != &self.grid()? {
                bail!("manifest grid does not match the configured grid");
            }
            return Ok(bank);
        }
        let grid = self.grid()?;
        Ok(match self.family {
            FamilyName::Wavelet => build_wavelet_bank(&grid, &self.wavelet_params())?,
            FamilyName::Covering => build_uniform_covering_bank(&grid, &self.covering_params(&grid, false))?,
        })
    }

    pub fn coherent_family(&self) -> Result<CoherentFamily> {
        let grid = self.grid()?;
        Ok(match self.family {
            FamilyName::Wavelet => CoherentFamily::Wavelet(self.wavelet_params()),
            FamilyName::Covering => CoherentFamily::UniformCovering(self.covering_params(&grid, true)),
        })
    }

    pub fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { max_depth: self.max_depth, prune_threshold: self.prune_threshold.unwrap_or(0.0) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_is_the_default() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert!(serde_json::from_str::<RunConfig>(r#"{"sise": 3}"#).is_err());
    }

    #[test]
    fn builds_both_families() {
        let mut c = RunConfig { size: 64, ..Default::default() };
        assert_eq!(c.bank().unwrap().id(), "wavelet[J=4,rot=4,sharp=3]@64");
        c.family = FamilyName::Covering;
        assert!(c.bank().unwrap().peripherals().len() > 2);
        c.dims = 3;
        assert!(c.grid().is_err());
    }
}
