use num_complex::Complex64;

use super::fft;
use super::grid::{dot, Grid, Point};
use crate::error::{Error, Result};

fn check_values(grid: &Grid, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::SizeMismatch { expected: grid.len(), got: values.len() });
    }
    if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Complex samples `f[n]` on a periodic grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<Complex64>,
}

/// Spectrum `f^[k] = (prod spacing) * sum_n f[n] exp(-2 pi i k.n/N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    values: Vec<Complex64>,
}

macro_rules! sample_array {
    ($ty:ident) => {
        impl $ty {
            pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
                check_values(&grid, &values)?;
                Ok($ty { grid, values })
            }

            pub fn zeros(grid: Grid) -> Self {
                let values = vec![Complex64::default(); grid.len()];
                $ty { grid, values }
            }

            pub fn from_fn(grid: Grid, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
                let values = (0..grid.len()).map(f).collect();
                Self::new(grid, values)
            }

            pub fn grid(&self) -> &Grid {
                &self.grid
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            #[allow(dead_code)]
            pub(crate) fn from_parts_unchecked(grid: Grid, values: Vec<Complex64>) -> Self {
                debug_assert_eq!(values.len(), grid.len());
                $ty { grid, values }
            }
        }
    };
}

sample_array!(Signal);
sample_array!(Spectrum);

impl Signal {
    /// Kronecker delta of the given amplitude at the origin sample.
    pub fn delta(grid: Grid, amplitude: f64) -> Self {
        let mut s = Signal::zeros(grid);
        s.values[0] = Complex64::new(amplitude, 0.0);
        s
    }

    pub fn constant(grid: Grid, value: Complex64) -> Self {
        let values = vec![value; grid.len()];
        Signal { grid, values }
    }

    /// Pointwise `a*self + b*other`.
    pub fn combine(&self, a: Complex64, other: &Signal, b: Complex64) -> Result<Signal> {
        self.grid.ensure_same(&other.grid, "combine")?;
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Signal { grid: self.grid.clone(), values })
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, a: f64) -> Signal {
        Signal { grid: self.grid.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    /// Largest pointwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &Signal) -> Result<f64> {
        self.grid.ensure_same(&other.grid, "max_abs_diff")?;
        Ok(max_abs_diff(&self.values, &other.values))
    }
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub(crate) fn sum_sq(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum()
}

impl Spectrum {
    /// Squared L2 norm computed on the frequency side.
    pub fn energy(&self) -> f64 {
        self.grid.bin_volume() * sum_sq(&self.values)
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }
}

/// Forward transform under the unitary-in-L2 convention.
pub fn dft(f: &Signal) -> Spectrum {
    let mut values = f.values.clone();
    fft::transform(&mut values, f.grid.sizes(), false);
    let w = f.grid.cell_volume();
    values.iter_mut().for_each(|v| *v *= w);
    Spectrum { grid: f.grid.clone(), values }
}

/// Inverse of [`dft`].
pub fn idft(spectrum: &Spectrum) -> Signal {
    let mut values = spectrum.values.clone();
    fft::transform(&mut values, spectrum.grid.sizes(), true);
    let w = spectrum.grid.bin_volume();
    values.iter_mut().for_each(|v| *v *= w);
    Signal { grid: spectrum.grid.clone(), values }
}

/// Squared L2 norm `(prod spacing) * sum |f[n]|^2`.
pub fn energy(f: &Signal) -> f64 {
    f.grid.cell_volume() * sum_sq(&f.values)
}

pub fn l2_norm(f: &Signal) -> f64 {
    energy(f).sqrt()
}

/// `exp(-2 pi i xi.c)` evaluated with the argument reduced per axis so that
/// large shifts keep full precision.
pub(crate) fn translation_phase(grid: &Grid, bin: usize, shift: &Point) -> Complex64 {
    let idx = grid.unflatten(bin);
    let mut turns = 0.0;
    for axis in 0..grid.dims() {
        let k = grid.wrapped(axis, idx[axis]) as f64;
        let steps = shift[axis] / grid.spacing()[axis];
        let n = grid.sizes()[axis] as f64;
        turns += (k * steps).rem_euclid(n) / n;
    }
    let theta = -std::f64::consts::TAU * turns;
    Complex64::new(theta.cos(), theta.sin())
}

fn shift_point(grid: &Grid, shift: &[f64]) -> Result<Point> {
    if shift.len() != grid.dims() {
        return Err(Error::InvalidParameter(format!(
            "shift has {} components for a {}-d grid",
            shift.len(),
            grid.dims()
        )));
    }
    if shift.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidParameter("shift must be finite".into()));
    }
    let mut c = [0.0; super::grid::MAX_DIMS];
    c[..shift.len()].copy_from_slice(shift);
    Ok(c)
}

/// Multiplies a spectrum by the translation phase in place.
pub(crate) fn translate_spectrum(spectrum: &mut Spectrum, shift: &Point) {
    let grid = spectrum.grid.clone();
    for (k, v) in spectrum.values.iter_mut().enumerate() {
        *v *= translation_phase(&grid, k, shift);
    }
}

/// `T_c f = f(. - c)` realized spectrally; `c` is in physical units and may be
/// any real vector. Integer multiples of the spacing reduce to a circular
/// index rotation.
pub fn translate(f: &Signal, shift: &[f64]) -> Result<Signal> {
    let c = shift_point(&f.grid, shift)?;
    if c.iter().all(|&x| x == 0.0) {
        return Ok(f.clone());
    }
    let mut spectrum = dft(f);
    translate_spectrum(&mut spectrum, &c);
    Ok(idft(&spectrum))
}

/// Circular shift by whole samples, `out[n] = f[n - steps]`.
pub fn rotate(f: &Signal, steps: &[i64]) -> Result<Signal> {
    let grid = &f.grid;
    if steps.len() != grid.dims() {
        return Err(Error::InvalidParameter("shift dimension mismatch".into()));
    }
    let mut out = vec![Complex64::default(); grid.len()];
    for (flat, v) in f.values.iter().enumerate() {
        let idx = grid.unflatten(flat);
        let mut dst = [0usize; super::grid::MAX_DIMS];
        for axis in 0..grid.dims() {
            let n = grid.sizes()[axis] as i64;
            dst[axis] = (idx[axis] as i64 + steps[axis]).rem_euclid(n) as usize;
        }
        out[grid.flatten(&dst[..grid.dims()])] = *v;
    }
    Ok(Signal { grid: grid.clone(), values: out })
}

// hypot is several times slower and the extra range is never needed here
fn magnitude(v: &Complex64) -> f64 {
    v.norm_sqr().sqrt()
}

/// `dft(|idft(w)|)` computed in place on a spectrum buffer.
pub(crate) fn modulus_in_spectrum(grid: &Grid, buf: &mut [Complex64]) {
    fft::transform(buf, grid.sizes(), true);
    buf.iter_mut().for_each(|v| *v = Complex64::new(magnitude(v), 0.0));
    fft::transform(buf, grid.sizes(), false);
    // bin_volume * cell_volume, applied once
    let w = 1.0 / grid.len() as f64;
    buf.iter_mut().for_each(|v| *v *= w);
}

/// [`modulus_in_spectrum`] on two buffers at once. Both moduli are real, so
/// their forward transforms share one complex FFT of `|a| + i|b|`.
pub(crate) fn modulus_pair_in_spectrum(grid: &Grid, a: &mut [Complex64], b: &mut [Complex64]) {
    fft::transform(a, grid.sizes(), true);
    fft::transform(b, grid.sizes(), true);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x = Complex64::new(magnitude(x), magnitude(y));
    }
    fft::transform(a, grid.sizes(), false);
    let w = 0.5 / grid.len() as f64;
    let (rows, cols) = match *grid.sizes() {
        [n] => (1, n),
        [r, c] => (r, c),
        _ => unreachable!("grids are 1-d or 2-d"),
    };
    for r in 0..rows {
        let nr = (rows - r) % rows;
        for c in 0..cols {
            let z = a[r * cols + c];
            let zm = a[nr * cols + (cols - c) % cols].conj();
            b[r * cols + c] = (z - zm) * Complex64::new(0.0, -w);
        }
    }
    // X = Z - iY once Y is known
    let inv_n = 1.0 / grid.len() as f64;
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x = *x * inv_n - Complex64::new(0.0, 1.0) * y;
    }
}

/// Pointwise complex modulus.
pub fn modulus(f: &Signal) -> Signal {
    let values = f.values.iter().map(|v| Complex64::new(magnitude(v), 0.0)).collect();
    Signal { grid: f.grid.clone(), values }
}

/// Dot product helper exposed for the phase-bound checks.
pub fn phase_argument(xi: &Point, c: &Point) -> f64 {
    std::f64::consts::TAU * dot(xi, c)
}
