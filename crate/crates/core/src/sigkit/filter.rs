use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{norm, Grid};
use super::signal::{dft, idft, Signal, Spectrum};
use crate::error::{Error, Result};

/// Largest sample count [`naive_convolve`] will accept.
pub const NAIVE_MAX_SAMPLES: usize = 4096;

/// Identifies one filter of a bank.
///
/// The derived ordering is the one used for path enumeration: the output
/// filter first, then wavelets by (scale, rotation), then covering bumps by
/// lattice site, then free-form names.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    Output,
    Wavelet { scale: i32, rotation: u32 },
    Bump { site: Vec<i64> },
    Named { name: String },
}

impl Label {
    pub fn named(name: impl Into<String>) -> Self {
        Label::Named { name: name.into() }
    }

    pub fn is_output(&self) -> bool {
        matches!(self, Label::Output)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Output => write!(f, "output"),
            Label::Wavelet { scale, rotation } => write!(f, "psi(j={scale},r={rotation})"),
            Label::Bump { site } => {
                let parts: Vec<String> = site.iter().map(|s| s.to_string()).collect();
                write!(f, "bump({})", parts.join(","))
            }
            Label::Named { name } => write!(f, "{name}"),
        }
    }
}

/// Sampled frequency response on a grid's DFT bins.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyFilter {
    grid: Grid,
    response: Vec<Complex64>,
    label: Label,
    support_radius: f64,
    support_threshold: f64,
    /// Bins with a nonzero response.
    active: Vec<usize>,
}

/// Largest `|xi_k|` over bins where `|response| > threshold`, or 0.
pub fn support_radius(grid: &Grid, response: &[Complex64], threshold: f64) -> f64 {
    response
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > threshold)
        .map(|(k, _)| norm(&grid.frequency(k)))
        .fold(0.0, f64::max)
}

impl FrequencyFilter {
    pub fn new(grid: Grid, response: Vec<Complex64>, label: Label) -> Result<Self> {
        Self::with_threshold(grid, response, label, 0.0)
    }

    /// Like [`FrequencyFilter::new`] but the support radius ignores bins whose
    /// magnitude does not exceed `threshold`.
    pub fn with_threshold(grid: Grid, response: Vec<Complex64>, label: Label, threshold: f64) -> Result<Self> {
        if response.len() != grid.len() {
            return Err(Error::SizeMismatch { expected: grid.len(), got: response.len() });
        }
        if let Some(index) = response.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!("support threshold {threshold}")));
        }
        let support_radius = support_radius(&grid, &response, threshold);
        let active = response.iter().enumerate().filter(|(_, v)| v.re != 0.0 || v.im != 0.0).map(|(k, _)| k).collect();
        Ok(FrequencyFilter { grid, response, label, support_radius, support_threshold: threshold, active })
    }

    /// Real, nonnegative response built from a function of the bin frequency.
    pub fn from_real_fn(grid: Grid, label: Label, mut f: impl FnMut(&[f64; 2]) -> f64) -> Result<Self> {
        let response = (0..grid.len()).map(|k| Complex64::new(f(&grid.frequency(k)), 0.0)).collect();
        Self::new(grid, response, label)
    }

    pub fn constant(grid: Grid, label: Label, value: f64) -> Self {
        let response = vec![Complex64::new(value, 0.0); grid.len()];
        Self::new(grid, response, label).expect("finite constant response")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn response(&self) -> &[Complex64] {
        &self.response
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn support_threshold(&self) -> f64 {
        self.support_threshold
    }

    pub fn relabeled(&self, label: Label) -> Self {
        FrequencyFilter { label, ..self.clone() }
    }

    /// True when every bin is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.response.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    /// Spatial kernel, `idft` of the response.
    pub fn kernel(&self) -> Signal {
        idft(&Spectrum::from_parts_unchecked(self.grid.clone(), self.response.clone()))
    }

    /// Applies the filter to a spectrum in place.
    pub(crate) fn apply(&self, spectrum: &[Complex64], out: &mut Vec<Complex64>) {
        out.clear();
        out.resize(spectrum.len(), Complex64::default());
        for &k in &self.active {
            out[k] = spectrum[k] * self.response[k];
        }
    }

    /// `sum_k |(a[k] - b[k]) * response[k]|^2`.
    pub(crate) fn filtered_diff_sum_sq(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        self.active.iter().map(|&k| ((a[k] - b[k]) * self.response[k]).norm_sqr()).sum()
    }

    /// `sum_k |spectrum[k] * response[k]|^2` without materializing the product.
    pub(crate) fn filtered_sum_sq(&self, spectrum: &[Complex64]) -> f64 {
        self.active.iter().map(|&k| (spectrum[k] * self.response[k]).norm_sqr()).sum()
    }
}

/// `f * g` computed as `idft(f^ . g^)`.
pub fn convolve(f: &Signal, g: &FrequencyFilter) -> Result<Signal> {
    f.grid().ensure_same(g.grid(), "convolve")?;
    let spectrum = dft(f);
    let mut out = Vec::with_capacity(spectrum.values().len());
    g.apply(spectrum.values(), &mut out);
    Ok(idft(&Spectrum::from_parts_unchecked(f.grid().clone(), out)))
}

/// Direct spatial circular convolution with the kernel of `g`,
/// `(f*h)[n] = (prod spacing) * sum_m f[m] h[n - m]`. Quadratic cost, so
/// grids above [`NAIVE_MAX_SAMPLES`] are refused.
pub fn naive_convolve(f: &Signal, g: &FrequencyFilter) -> Result<Signal> {
    f.grid().ensure_same(g.grid(), "naive_convolve")?;
    let grid = f.grid();
    if grid.len() > NAIVE_MAX_SAMPLES {
        return Err(Error::Refused(format!(
            "naive convolution limited to {NAIVE_MAX_SAMPLES} samples, grid has {}",
            grid.len()
        )));
    }
    let kernel = g.kernel();
    let h = kernel.values();
    let w = grid.cell_volume();
    let dims = grid.dims();
    let sizes = grid.sizes();
    let mut out = vec![Complex64::default(); grid.len()];
    for (n, slot) in out.iter_mut().enumerate() {
        let nn = grid.unflatten(n);
        let mut acc = Complex64::default();
        for (m, fm) in f.values().iter().enumerate() {
            let mm = grid.unflatten(m);
            let mut diff = [0usize; 2];
            for a in 0..dims {
                diff[a] = (nn[a] + sizes[a] - mm[a]) % sizes[a];
            }
            acc += fm * h[grid.flatten(&diff[..dims])];
        }
        *slot = acc * w;
    }
    Signal::new(grid.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigkit::signal::{l2_norm, translate};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(grid: &Grid, rng: &mut ChaCha8Rng) -> Signal {
        Signal::from_fn(grid.clone(), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .unwrap()
    }

    fn random_filter(grid: &Grid, rng: &mut ChaCha8Rng) -> FrequencyFilter {
        let response =
            (0..grid.len()).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        FrequencyFilter::new(grid.clone(), response, Label::named("g")).unwrap()
    }

    #[test]
    fn support_radius_cases() {
        let grid = Grid::line(4, 1.0).unwrap();
        let ones = FrequencyFilter::constant(grid.clone(), Label::Output, 1.0);
        assert_eq!(ones.support_radius(), 0.5);
        let mut r = vec![Complex64::default(); 4];
        r[0] = Complex64::new(1.0, 0.0);
        let dc = FrequencyFilter::new(grid.clone(), r, Label::Output).unwrap();
        assert_eq!(dc.support_radius(), 0.0);
        assert_eq!(FrequencyFilter::constant(grid, Label::Output, 0.0).support_radius(), 0.0);
    }

    #[test]
    fn identity_and_zero_filters() {
        let grid = Grid::line(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_signal(&grid, &mut rng);
        let id = FrequencyFilter::constant(grid.clone(), Label::named("id"), 1.0);
        assert!(convolve(&f, &id).unwrap().max_abs_diff(&f).unwrap() < 1e-12);
        assert!(naive_convolve(&f, &id).unwrap().max_abs_diff(&f).unwrap() < 1e-12);
        let zero = FrequencyFilter::constant(grid, Label::named("zero"), 0.0);
        assert!(convolve(&f, &zero).unwrap().values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn fft_convolution_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for grid in [Grid::line(16, 1.0).unwrap(), Grid::new(vec![4, 8], vec![0.5, 1.5]).unwrap()] {
            let f = random_signal(&grid, &mut rng);
            let g = random_filter(&grid, &mut rng);
            let fast = convolve(&f, &g).unwrap();
            let slow = naive_convolve(&f, &g).unwrap();
            assert!(fast.max_abs_diff(&slow).unwrap() < 1e-10);
        }
    }

    #[test]
    fn naive_convolution_is_linear() {
        let grid = Grid::line(16, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (f, h, g) =
            (random_signal(&grid, &mut rng), random_signal(&grid, &mut rng), random_filter(&grid, &mut rng));
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(2.0, 0.5));
        let lhs = naive_convolve(&f.combine(a, &h, b).unwrap(), &g).unwrap();
        let rhs = naive_convolve(&f, &g).unwrap().combine(a, &naive_convolve(&h, &g).unwrap(), b).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
    }

    #[test]
    fn naive_refuses_large_grids() {
        let grid = Grid::square(66, 1.0).unwrap();
        let f = Signal::zeros(grid.clone());
        let g = FrequencyFilter::constant(grid, Label::Output, 1.0);
        assert!(naive_convolve(&f, &g).unwrap_err().is_refusal());
    }

    #[test]
    fn convolution_commutes_with_translation() {
        let grid = Grid::line(32, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = random_signal(&grid, &mut rng);
        let g = random_filter(&grid, &mut rng);
        for c in [0.37, -5.2, 13.0] {
            let a = convolve(&translate(&f, &[c]).unwrap(), &g).unwrap();
            let b = translate(&convolve(&f, &g).unwrap(), &[c]).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-12 * (1.0 + l2_norm(&f)));
        }
    }

    #[test]
    fn grid_mismatch_is_structural() {
        let f = Signal::zeros(Grid::line(8, 1.0).unwrap());
        let g = FrequencyFilter::constant(Grid::line(8, 0.5).unwrap(), Label::Output, 1.0);
        assert!(matches!(convolve(&f, &g), Err(Error::GridMismatch(_))));
    }
}
