//! Seeded test signals.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::grid::{Grid, Point};
use super::signal::{idft, l2_norm, Signal, Spectrum};
use crate::error::{Error, Result};

/// Complex white noise whose spectrum vanishes outside
/// `|xi_i| <= band_fraction * nyquist_i` on every axis, scaled to unit norm.
pub fn band_limited_noise(grid: &Grid, band_fraction: f64, seed: u64) -> Result<Signal> {
    if !(band_fraction > 0.0 && band_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("band fraction {band_fraction} not in (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|k| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let xi = grid.frequency(k);
            let inside = (0..grid.dims()).all(|a| xi[a].abs() <= band_fraction * grid.nyquist(a));
            if inside {
                Complex64::new(re, im)
            } else {
                Complex64::default()
            }
        })
        .collect();
    let f = idft(&Spectrum::new(grid.clone(), values)?);
    let n = l2_norm(&f);
    Ok(if n > 0.0 { f.scale(1.0 / n) } else { f })
}

/// Gaussian envelope of standard deviation `width` at `center`, modulated by
/// `exp(2 pi i frequency.x)`. The envelope uses the periodic distance to the
/// center.
pub fn gabor(grid: &Grid, center: &Point, width: f64, frequency: &Point) -> Result<Signal> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidParameter(format!("gabor width {width}")));
    }
    Signal::from_fn(grid.clone(), |n| {
        let x = grid.position(n);
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for a in 0..grid.dims() {
            let period = grid.sizes()[a] as f64 * grid.spacing()[a];
            let d = (x[a] - center[a] + period / 2.0).rem_euclid(period) - period / 2.0;
            r2 += d * d;
            phase += frequency[a] * x[a];
        }
        Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), std::f64::consts::TAU * phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigkit::signal::dft;

    #[test]
    fn noise_is_band_limited_and_seeded() {
        let grid = Grid::line(64, 1.0).unwrap();
        let a = band_limited_noise(&grid, 0.8, 9).unwrap();
        let b = band_limited_noise(&grid, 0.8, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, band_limited_noise(&grid, 0.8, 10).unwrap());
        assert!((l2_norm(&a) - 1.0).abs() < 1e-12);
        let spec = dft(&a);
        for (k, v) in spec.values().iter().enumerate() {
            if grid.frequency(k)[0].abs() > 0.8 * 0.5 {
                assert!(v.norm() < 1e-12, "bin {k} leaks {v}");
            }
        }
    }

    #[test]
    fn gabor_peaks_at_center() {
        let grid = Grid::line(32, 1.0).unwrap();
        let g = gabor(&grid, &[8.0, 0.0], 2.0, &[0.125, 0.0]).unwrap();
        assert!((g.values()[8].norm() - 1.0).abs() < 1e-15);
        assert!(g.values()[24].norm() < 1e-6);
    }
}
