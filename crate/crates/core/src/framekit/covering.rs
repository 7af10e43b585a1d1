//! Uniform covering frames: smooth bumps on a square frequency lattice,
//! normalized pointwise into a partition of unity.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bank::{BankSpec, FilterBank};
use super::wavelet::smoothstep;
use crate::error::{Error, Result};
use crate::sigkit::grid::norm;
use crate::sigkit::{FrequencyFilter, Grid, Label, Point};

fn default_sharpness() -> u32 {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformCoveringParams {
    /// Step of the bump lattice in frequency space.
    pub lattice_spacing: f64,
    /// Support radius `R` of every bump.
    pub bump_radius: f64,
    /// Bumps centred within this radius of the origin are merged into `g0`.
    pub origin_radius: f64,
    #[serde(default = "default_sharpness")]
    pub sharpness: u32,
}

impl UniformCoveringParams {
    /// Defaults scaled to the grid: `R = q/4`, spacing `1.25 R`, and only the
    /// central bump feeding the output filter.
    pub fn for_grid(grid: &Grid) -> Self {
        Self::with_radius(grid.min_nyquist() / 4.0)
    }

    pub fn with_radius(bump_radius: f64) -> Self {
        let lattice_spacing = 1.25 * bump_radius;
        UniformCoveringParams {
            lattice_spacing,
            bump_radius,
            origin_radius: 0.5 * lattice_spacing,
            sharpness: default_sharpness(),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;
        if !finite_pos(self.lattice_spacing) || !finite_pos(self.bump_radius) || !finite_pos(self.origin_radius) {
            return Err(Error::InvalidParameter(
                "lattice spacing, bump radius and origin radius must be positive".into(),
            ));
        }
        if self.lattice_spacing >= 2.0 * self.bump_radius {
            return Err(Error::InvalidParameter(format!(
                "lattice spacing {} must be below twice the bump radius {}",
                self.lattice_spacing, self.bump_radius
            )));
        }
        Ok(())
    }
}

/// Radial bump, 1 at the centre and 0 from radius `R` on.
pub fn bump(order: u32, radius: f64, distance: f64) -> f64 {
    if distance >= radius {
        0.0
    } else {
        (FRAC_PI_2 * smoothstep(order, distance / radius)).cos()
    }
}

fn lattice_sites(grid: &Grid, params: &UniformCoveringParams) -> Vec<Vec<i64>> {
    let reach: Vec<i64> = (0..grid.dims())
        .map(|a| ((grid.nyquist(a) + params.bump_radius) / params.lattice_spacing).ceil() as i64)
        .collect();
    let mut sites = vec![vec![]];
    for &m in &reach {
        sites = sites
            .into_iter()
            .flat_map(|prefix| {
                (-m..=m).map(move |i| {
                    let mut s = prefix.clone();
                    s.push(i);
                    s
                })
            })
            .collect();
    }
    sites
}

fn site_center(site: &[i64], spacing: f64) -> Point {
    let mut c = [0.0; 2];
    for (slot, &i) in c.iter_mut().zip(site) {
        *slot = i as f64 * spacing;
    }
    c
}

fn distance(a: &Point, b: &Point) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1]])
}

/// Builds the bank. Errors name the first bin no bump reaches.
pub fn build_uniform_covering_bank(grid: &Grid, params: &UniformCoveringParams) -> Result<FilterBank> {
    params.validate()?;
    let freqs = grid.frequencies();
    let mut bumps: Vec<(Vec<i64>, Point, Vec<f64>)> = Vec::new();
    for site in lattice_sites(grid, params) {
        let center = site_center(&site, params.lattice_spacing);
        let values: Vec<f64> =
            freqs.iter().map(|xi| bump(params.sharpness, params.bump_radius, distance(xi, &center))).collect();
        if values.iter().any(|&v| v != 0.0) {
            bumps.push((site, center, values));
        }
    }
    let mut total = vec![0.0; grid.len()];
    for (_, _, values) in &bumps {
        for (t, v) in total.iter_mut().zip(values) {
            *t += v * v;
        }
    }
    if let Some(bin) = total.iter().position(|&t| t == 0.0) {
        let xi = grid.frequency(bin);
        return Err(Error::CoveringGap { bin, frequency: xi[..grid.dims()].to_vec() });
    }
    let scale: Vec<f64> = total.iter().map(|t| 1.0 / t.sqrt()).collect();

    let mut origin_sq = vec![0.0; grid.len()];
    let mut peripherals = Vec::new();
    for (site, center, values) in bumps {
        if norm(&center) <= params.origin_radius {
            for ((o, v), s) in origin_sq.iter_mut().zip(&values).zip(&scale) {
                *o += (v * s).powi(2);
            }
        } else {
            let response = values.iter().zip(&scale).map(|(v, s)| Complex64::new(v * s, 0.0)).collect();
            peripherals.push(FrequencyFilter::new(grid.clone(), response, Label::Bump { site })?);
        }
    }
    let output_response: Vec<Complex64> = origin_sq.iter().map(|o| Complex64::new(o.sqrt(), 0.0)).collect();
    let dc = output_response[0].re;
    if (dc - 1.0).abs() > 1e-12 {
        return Err(Error::Construction(format!(
            "|g0(0)| = {dc}: a peripheral bump reaches the origin; raise origin_radius or the lattice spacing"
        )));
    }
    let output = FrequencyFilter::new(grid.clone(), output_response, Label::Output)?;
    FilterBank::new(output, peripherals, BankSpec::UniformCovering(params.clone()))
}

/// Centre of a peripheral bump given its label.
pub fn bump_center(params: &UniformCoveringParams, label: &Label) -> Option<Point> {
    match label {
        Label::Bump { site } => Some(site_center(site, params.lattice_spacing)),
        _ => None,
    }
}

/// Largest distance from a bump's centre to any bin where it is nonzero.
pub fn measured_bump_extent(params: &UniformCoveringParams, filter: &FrequencyFilter) -> Option<f64> {
    let center = bump_center(params, filter.label())?;
    let grid = filter.grid();
    Some(
        filter
            .response()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(k, _)| distance(&grid.frequency(k), &center))
            .fold(0.0, f64::max),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framekit::bank::{validate_bessel, validate_parseval};

    #[test]
    fn default_banks_are_parseval() {
        for grid in [Grid::line(64, 1.0).unwrap(), Grid::line(256, 1.0).unwrap(), Grid::square(64, 1.0).unwrap()] {
            let params = UniformCoveringParams::for_grid(&grid);
            let bank = build_uniform_covering_bank(&grid, &params).unwrap();
            let p = validate_parseval(&bank).unwrap();
            assert!(p.pass, "{p:?}");
            assert!(validate_bessel(&bank).unwrap().pass);
            assert_eq!(bank.output().response()[0].norm(), 1.0);
            for f in bank.peripherals() {
                assert!(measured_bump_extent(&params, f).unwrap() < params.bump_radius);
            }
        }
    }

    #[test]
    fn dropping_a_bump_breaks_parseval() {
        let grid = Grid::line(128, 1.0).unwrap();
        let bank = build_uniform_covering_bank(&grid, &UniformCoveringParams::for_grid(&grid)).unwrap();
        let mut rest = bank.peripherals().to_vec();
        rest.remove(rest.len() / 2);
        let broken = FilterBank::new(bank.output().clone(), rest, bank.spec().clone()).unwrap();
        let p = validate_parseval(&broken).unwrap();
        assert!(!p.pass);
        assert!(p.min_sum < 1.0 - 1e-3);
    }

    #[test]
    fn gap_names_the_bin() {
        // 2-d square lattice leaves holes once spacing exceeds sqrt(2) R
        let grid = Grid::square(32, 1.0).unwrap();
        let params =
            UniformCoveringParams { lattice_spacing: 0.19, bump_radius: 0.1, origin_radius: 0.05, sharpness: 3 };
        match build_uniform_covering_bank(&grid, &params) {
            Err(Error::CoveringGap { frequency, .. }) => assert_eq!(frequency.len(), 2),
            other => panic!("expected covering gap, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_params() {
        let grid = Grid::line(64, 1.0).unwrap();
        let mut p = UniformCoveringParams::for_grid(&grid);
        p.lattice_spacing = 2.5 * p.bump_radius;
        assert!(matches!(build_uniform_covering_bank(&grid, &p), Err(Error::InvalidParameter(_))));
        let mut p = UniformCoveringParams::for_grid(&grid);
        p.origin_radius = 0.0;
        assert!(build_uniform_covering_bank(&grid, &p).is_err());
        // neighbours closer than R reach the origin bin
        let p = UniformCoveringParams { lattice_spacing: 0.05, bump_radius: 0.1, origin_radius: 0.01, sharpness: 3 };
        assert!(matches!(build_uniform_covering_bank(&grid, &p), Err(Error::Construction(_))));
    }

    #[test]
    fn wider_origin_absorbs_more_bumps() {
        let grid = Grid::line(256, 1.0).unwrap();
        let narrow = UniformCoveringParams::with_radius(1.0 / 32.0);
        let wide = UniformCoveringParams { origin_radius: 2.25 * narrow.lattice_spacing, ..narrow.clone() };
        let a = build_uniform_covering_bank(&grid, &narrow).unwrap();
        let b = build_uniform_covering_bank(&grid, &wide).unwrap();
        assert_eq!(a.peripherals().len(), b.peripherals().len() + 4);
        assert!(b.output_support_radius() > a.output_support_radius());
        for f in b.peripherals() {
            assert_eq!(a.peripheral(f.label()).unwrap().response(), f.response());
        }
    }
}
