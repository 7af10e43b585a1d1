use std::fmt;

use serde::{Deserialize, Serialize};

use super::covering::UniformCoveringParams;
use super::wavelet::WaveletParams;
use crate::error::{Error, Result};
use crate::sigkit::{FrequencyFilter, Grid, Label};

/// Two-sided tolerance for the frame checks.
pub const FRAME_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Wavelet,
    UniformCovering,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Wavelet => "wavelet",
            Family::UniformCovering => "uniform-covering",
            Family::Custom => "custom",
        })
    }
}

/// How a bank was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BankSpec {
    Wavelet(WaveletParams),
    UniformCovering(UniformCoveringParams),
    Custom { name: String },
}

impl BankSpec {
    pub fn family(&self) -> Family {
        match self {
            BankSpec::Wavelet(_) => Family::Wavelet,
            BankSpec::UniformCovering(_) => Family::UniformCovering,
            BankSpec::Custom { .. } => Family::Custom,
        }
    }
}

/// An output-generating filter plus labelled peripheral filters on one grid.
///
/// Peripherals are kept sorted by label. The Bessel bound is not enforced
/// here: imported or hand-built banks are checked with [`validate_bessel`]
/// and consumers that depend on it refuse to run when it fails.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterBank {
    output: FrequencyFilter,
    peripherals: Vec<FrequencyFilter>,
    spec: BankSpec,
}

impl FilterBank {
    pub fn new(output: FrequencyFilter, mut peripherals: Vec<FrequencyFilter>, spec: BankSpec) -> Result<Self> {
        if !output.label().is_output() {
            return Err(Error::InvalidParameter(format!(
                "output filter must carry the output label, got `{}`",
                output.label()
            )));
        }
        for p in &peripherals {
            output.grid().ensure_same(p.grid(), "filter bank")?;
            if p.label().is_output() {
                return Err(Error::DuplicateLabel(Label::Output.to_string()));
            }
        }
        peripherals.sort_by(|a, b| a.label().cmp(b.label()));
        if let Some(w) = peripherals.windows(2).find(|w| w[0].label() == w[1].label()) {
            return Err(Error::DuplicateLabel(w[0].label().to_string()));
        }
        Ok(FilterBank { output, peripherals, spec })
    }

    pub fn grid(&self) -> &Grid {
        self.output.grid()
    }

    pub fn output(&self) -> &FrequencyFilter {
        &self.output
    }

    pub fn peripherals(&self) -> &[FrequencyFilter] {
        &self.peripherals
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.peripherals.iter().map(|p| p.label())
    }

    pub fn peripheral(&self, label: &Label) -> Option<&FrequencyFilter> {
        self.peripherals.binary_search_by(|p| p.label().cmp(label)).ok().map(|i| &self.peripherals[i])
    }

    pub fn spec(&self) -> &BankSpec {
        &self.spec
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    /// Support radius of the output filter, the `D` of the translation bound.
    pub fn output_support_radius(&self) -> f64 {
        self.output.support_radius()
    }

    /// Short human-readable identifier used in reports.
    pub fn id(&self) -> String {
        let grid = self.grid();
        let sizes: Vec<String> = grid.sizes().iter().map(|n| n.to_string()).collect();
        let shape = sizes.join("x");
        match &self.spec {
            BankSpec::Wavelet(p) => {
                format!("wavelet[J={},rot={},sharp={}]@{shape}", p.scale_cutoff, p.n_rotations, p.sharpness)
            }
            BankSpec::UniformCovering(p) => {
                format!("covering[s={},R={},r0={}]@{shape}", p.lattice_spacing, p.bump_radius, p.origin_radius)
            }
            BankSpec::Custom { name } => format!("custom[{name}]@{shape}"),
        }
    }

    /// Every filter, output first.
    pub fn filters(&self) -> impl Iterator<Item = &FrequencyFilter> {
        std::iter::once(&self.output).chain(self.peripherals.iter())
    }

    /// Per-bin `|g0|^2 + sum |g_l|^2`.
    pub fn squared_sum(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.grid().len()];
        for filter in self.filters() {
            for (s, v) in sum.iter_mut().zip(filter.response()) {
                *s += v.norm_sqr();
            }
        }
        sum
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselReport {
    pub max_sum: f64,
    pub worst_bin: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub min_sum: f64,
    pub max_sum: f64,
    pub pass: bool,
}

fn check_grids(bank: &FilterBank) -> Result<()> {
    for p in bank.peripherals() {
        bank.grid().ensure_same(p.grid(), "bank filters")?;
    }
    Ok(())
}

/// Upper frame bound check: `max_k sum |g^(xi_k)|^2 <= 1 + 1e-10`.
pub fn validate_bessel(bank: &FilterBank) -> Result<BesselReport> {
    check_grids(bank)?;
    let sum = bank.squared_sum();
    let (worst_bin, max_sum) =
        sum.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, s)| if s > best.1 { (k, s) } else { best });
    Ok(BesselReport { max_sum, worst_bin, pass: max_sum <= 1.0 + FRAME_TOLERANCE })
}

/// Two-sided Parseval check: the squared sum equals 1 at every bin.
pub fn validate_parseval(bank: &FilterBank) -> Result<ParsevalReport> {
    check_grids(bank)?;
    let sum = bank.squared_sum();
    let min_sum = sum.iter().copied().fold(f64::INFINITY, f64::min);
    let max_sum = sum.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pass = (min_sum - 1.0).abs() <= FRAME_TOLERANCE && (max_sum - 1.0).abs() <= FRAME_TOLERANCE;
    Ok(ParsevalReport { min_sum, max_sum, pass })
}

/// `max |xi_k|` over bins where `|g^| > threshold`; 0 when there are none.
pub fn measure_support_radius(g: &FrequencyFilter, threshold: f64) -> f64 {
    crate::sigkit::support_radius(g.grid(), g.response(), threshold)
}
