//! Meyer-type wavelet banks.
//!
//! The radial profile is built from a cosine transition `chi`:
//!
//! ```text
//! chi(t) = 1                          t <= 1
//!        = cos(pi/2 * nu(t - 1))      1 < t < 2
//!        = 0                          t >= 2
//! ```
//!
//! with `nu` a smoothstep polynomial satisfying `nu(x) + nu(1 - x) = 1`. The
//! mother wavelet is `|psi_rad(w)|^2 = chi(w/2a)^2 - chi(w/a)^2`, so dyadic
//! dilations telescope and the scales `j > -J` sum to `1 - chi(2^(J-1) w/a)^2`.
//! The output filter is that complement, `chi(2^(J-1) |xi| / a)`, written in
//! closed form so that its support ends exactly where the wavelets take over.
//!
//! The scale origin is pinned to the grid: `a` is half the smallest Nyquist
//! frequency, so the `j = 0` annulus spans `(q/2, 2q)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use super::bank::{BankSpec, FilterBank};
use crate::error::{Error, Result};
use crate::sigkit::grid::norm;
use crate::sigkit::{FrequencyFilter, Grid, Label, Point};

fn default_sharpness() -> u32 {
    3
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletParams {
    /// Scale cutoff `J`; peripherals use scales `j > -J`.
    pub scale_cutoff: u32,
    /// Order of the rotation group in 2-d. 1-d banks always use `{+1, -1}`.
    pub n_rotations: u32,
    /// Order of the smoothstep used in every transition (3 is Meyer's).
    #[serde(default = "default_sharpness")]
    pub sharpness: u32,
}

impl Default for WaveletParams {
    fn default() -> Self {
        WaveletParams { scale_cutoff: 4, n_rotations: 4, sharpness: 3 }
    }
}

impl WaveletParams {
    pub fn new(scale_cutoff: u32, n_rotations: u32) -> Self {
        WaveletParams { scale_cutoff, n_rotations, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if self.scale_cutoff < 1 {
            return Err(Error::InvalidParameter("scale cutoff must be >= 1".into()));
        }
        if self.n_rotations < 1 {
            return Err(Error::InvalidParameter("n_rotations must be >= 1".into()));
        }
        if self.sharpness > 12 {
            return Err(Error::InvalidParameter(format!("sharpness {} above 12", self.sharpness)));
        }
        Ok(())
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smoothstep of the given order on `[0, 1]`, clamped outside. Satisfies
/// `smoothstep(x) + smoothstep(1 - x) = 1`.
pub fn smoothstep(order: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x > 0.5 {
        // keeps the alternating sum on the half where it cancels least
        return 1.0 - smoothstep(order, 1.0 - x);
    }
    let n = order;
    let poly: f64 = (0..=n).map(|k| binomial(n + k, k) * binomial(2 * n + 1, n - k) * (-x).powi(k as i32)).sum();
    x.powi(n as i32 + 1) * poly
}

/// Low-pass transition `chi(t)`.
pub fn transition(order: u32, t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        (FRAC_PI_2 * smoothstep(order, t - 1.0)).cos()
    }
}

/// Radial mother wavelet in units of `a`, supported on `(1, 4)`.
pub fn radial_wavelet(order: u32, t: f64) -> f64 {
    if t <= 1.0 || t >= 4.0 {
        0.0
    } else if t < 2.0 {
        (FRAC_PI_2 * smoothstep(order, t - 1.0)).sin()
    } else {
        (FRAC_PI_2 * smoothstep(order, t / 2.0 - 1.0)).cos()
    }
}

/// Angular window centred on angle 0 for a group of `n` rotations; the
/// squares of its `n` rotates sum to 1.
pub fn angular_window(order: u32, n: u32, theta: f64) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let sector = TAU / n as f64;
    let wrapped = (theta + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    let t = (wrapped / sector).abs();
    if t >= 1.0 {
        0.0
    } else {
        (FRAC_PI_2 * smoothstep(order, t)).cos()
    }
}

/// Base frequency `a` of the mother wavelet on a grid.
pub fn base_frequency(grid: &Grid) -> f64 {
    grid.min_nyquist() / 2.0
}

/// Largest scale cutoff whose output filter still reaches a nonzero bin.
pub fn max_feasible_cutoff(grid: &Grid) -> u32 {
    let q = grid.min_nyquist();
    let resolution = (0..grid.dims()).map(|a| grid.bin_width(a)).fold(f64::INFINITY, f64::min);
    let mut j = 0;
    while q * 2f64.powi(-(j as i32)) > resolution {
        j += 1;
    }
    j
}

/// Mother wavelet `psi^(xi)` dilated to scale `j` and rotated by group
/// element `rotation`.
pub fn wavelet_response(grid: &Grid, params: &WaveletParams, scale: i32, rotation: u32, xi: &Point) -> f64 {
    let a = base_frequency(grid);
    let dilate = 2f64.powi(-scale);
    match grid.dims() {
        1 => {
            let oriented = if rotation == 0 { xi[0] } else { -xi[0] };
            if oriented > 0.0 {
                radial_wavelet(params.sharpness, dilate * oriented / a)
            } else {
                0.0
            }
        }
        _ => {
            let r = norm(xi);
            if r == 0.0 {
                return 0.0;
            }
            let radial = radial_wavelet(params.sharpness, dilate * r / a);
            if radial == 0.0 {
                return 0.0;
            }
            let theta = xi[1].atan2(xi[0]) - TAU * rotation as f64 / params.n_rotations as f64;
            radial * angular_window(params.sharpness, params.n_rotations, theta)
        }
    }
}

/// Low-pass output filter `phi^_J(xi)`.
pub fn lowpass_response(grid: &Grid, params: &WaveletParams, xi: &Point) -> f64 {
    let a = base_frequency(grid);
    transition(params.sharpness, 2f64.powi(params.scale_cutoff as i32 - 1) * norm(xi) / a)
}

fn rotations(grid: &Grid, params: &WaveletParams) -> u32 {
    if grid.dims() == 1 {
        2
    } else {
        params.n_rotations
    }
}

/// Builds the wavelet bank for scales `j > -J`, keeping only filters that
/// are nonzero somewhere on the grid.
pub fn build_wavelet_bank(grid: &Grid, params: &WaveletParams) -> Result<FilterBank> {
    params.validate()?;
    let max_feasible = max_feasible_cutoff(grid);
    if params.scale_cutoff > max_feasible {
        return Err(Error::InfeasibleScale { requested: params.scale_cutoff, max_feasible });
    }
    let a = base_frequency(grid);
    let top = grid.max_frequency();
    let lowest = 1 - params.scale_cutoff as i32;
    let mut peripherals = Vec::new();
    let mut scale = lowest;
    // annulus of scale j starts at a * 2^j
    while a * 2f64.powi(scale) < top {
        for rotation in 0..rotations(grid, params) {
            let label = Label::Wavelet { scale, rotation };
            let filter = FrequencyFilter::from_real_fn(grid.clone(), label, |xi| {
                wavelet_response(grid, params, scale, rotation, xi)
            })?;
            if !filter.is_zero() {
                peripherals.push(filter);
            }
        }
        scale += 1;
    }
    let output = FrequencyFilter::from_real_fn(grid.clone(), Label::Output, |xi| lowpass_response(grid, params, xi))?;
    FilterBank::new(output, peripherals, BankSpec::Wavelet(params.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framekit::bank::{validate_bessel, validate_parseval};
    use proptest::prelude::*;

    #[test]
    fn smoothstep_orders() {
        assert!((smoothstep(1, 0.3) - (3.0 * 0.09 - 2.0 * 0.027)).abs() < 1e-15);
        let x: f64 = 0.3;
        let meyer = x.powi(4) * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x.powi(3));
        assert!((smoothstep(3, x) - meyer).abs() < 1e-15);
        assert_eq!(smoothstep(0, 0.25), 0.25);
    }

    proptest! {
        #[test]
        fn smoothstep_is_antisymmetric(order in 0u32..8, x in 0.0f64..1.0) {
            prop_assert!((smoothstep(order, x) + smoothstep(order, 1.0 - x) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn dyadic_sum_of_mother_is_one(order in 0u32..6, w in 1e-6f64..1e6) {
            // independent of any bank: sum over a very wide scale range
            let s: f64 = (-80..80).map(|j| radial_wavelet(order, 2f64.powi(-j) * w).powi(2)).sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn angular_windows_partition(order in 0u32..6, n in 1u32..9, theta in -10.0f64..10.0) {
            let s: f64 = (0..n)
                .map(|m| angular_window(order, n, theta - TAU * m as f64 / n as f64).powi(2))
                .sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn meyer_bank_is_tight_1d() {
        let grid = Grid::line(256, 1.0).unwrap();
        let bank = build_wavelet_bank(&grid, &WaveletParams::new(3, 1)).unwrap();
        let b = validate_bessel(&bank).unwrap();
        assert!((b.max_sum - 1.0).abs() <= 1e-10 && b.pass);
        let p = validate_parseval(&bank).unwrap();
        assert!(p.pass, "{p:?}");
        // scales -2..=0, both orientations
        assert_eq!(bank.peripherals().len(), 6);
        assert_eq!(bank.output().response()[0].re, 1.0);
    }

    #[test]
    fn nesting_and_halving() {
        let grid = Grid::line(256, 1.0).unwrap();
        let banks: Vec<FilterBank> =
            (1..=5).map(|j| build_wavelet_bank(&grid, &WaveletParams::new(j, 1)).unwrap()).collect();
        for pair in banks.windows(2) {
            for p in pair[0].peripherals() {
                assert_eq!(pair[1].peripheral(p.label()).unwrap().response(), p.response());
            }
        }
        let d: Vec<f64> = banks.iter().map(|b| b.output_support_radius() * 256.0).collect();
        assert_eq!(d, vec![127.0, 63.0, 31.0, 15.0, 7.0]);
        let bin = 1.0 / 256.0;
        for w in banks.windows(2) {
            let (d0, d1) = (w[0].output_support_radius(), w[1].output_support_radius());
            assert!((d1 - d0 / 2.0).abs() <= bin);
        }
    }

    #[test]
    fn infeasible_cutoff_reports_maximum() {
        let grid = Grid::line(256, 1.0).unwrap();
        assert_eq!(max_feasible_cutoff(&grid), 7);
        assert!(build_wavelet_bank(&grid, &WaveletParams::new(7, 1)).unwrap().output_support_radius() > 0.0);
        match build_wavelet_bank(&grid, &WaveletParams::new(8, 1)) {
            Err(Error::InfeasibleScale { requested: 8, max_feasible: 7 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_wavelet_bank(&grid, &WaveletParams::new(0, 1)).is_err());
    }

    #[test]
    fn two_d_bank_is_tight_and_rotation_closed() {
        let grid = Grid::square(64, 1.0).unwrap();
        let params = WaveletParams::new(3, 4);
        let bank = build_wavelet_bank(&grid, &params).unwrap();
        assert!(validate_parseval(&bank).unwrap().pass);
        // label set closed under the group: every (scale, r) present for all r
        for label in bank.labels() {
            if let Label::Wavelet { scale, .. } = label {
                for r in 0..4 {
                    assert!(bank.peripheral(&Label::Wavelet { scale: *scale, rotation: r }).is_some());
                }
            }
        }
        // orbit sums are invariant under quarter turns (Nyquist rows excluded)
        let n = 64usize;
        let orbit = |scale: i32, k: usize| -> f64 {
            (0..4)
                .filter_map(|r| bank.peripheral(&Label::Wavelet { scale, rotation: r }))
                .map(|f| f.response()[k].norm_sqr())
                .sum()
        };
        for scale in [-2, -1, 0, 1] {
            for kx in 1..n {
                for ky in 1..n {
                    if kx == n / 2 || ky == n / 2 {
                        continue;
                    }
                    // (kx, ky) -> (-ky, kx)
                    let rx = (n - ky) % n;
                    let a = orbit(scale, kx * n + ky);
                    let b = orbit(scale, rx * n + kx);
                    assert!((a - b).abs() < 1e-8);
                }
            }
        }
    }
}
