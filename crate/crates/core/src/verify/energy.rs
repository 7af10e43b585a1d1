use serde::{Deserialize, Serialize};

use super::ENERGY_TOLERANCE;
use crate::error::{Error, Result};
use crate::framekit::{validate_parseval, Family, FilterBank};
use crate::scatter::{cascade_energies, layer_energy_profile, TruncationPolicy};
use crate::sigkit::{energy, Signal};

fn parseval_or_refuse(bank: &FilterBank) -> Result<()> {
    let p = validate_parseval(bank)?;
    if !p.pass {
        return Err(Error::Refused(format!(
            "bank {} is not Parseval: squared sum spans [{}, {}]",
            bank.id(),
            p.min_sum,
            p.max_sum
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub input_energy: f64,
    /// `||S[Lambda^k] f||^2` for `k = 0..=max_depth`.
    pub output_energies: Vec<f64>,
    /// `||U[Lambda^k] f||^2` for `k = 0..=max_depth + 1`.
    pub layer_energies: Vec<f64>,
    /// `| ||f||^2 - sum_{k<=M} out_k - layer_{M+1} | / ||f||^2` per `M`.
    pub telescoping_residuals: Vec<f64>,
    /// `||f||^2 - sum_{k<=M} out_k` per `M`.
    pub s_norm_gaps: Vec<f64>,
    pub max_residual: f64,
    pub pass: bool,
}

/// Checks `||f||^2 = sum_{k<=M} ||S[Lambda^k] f||^2 + ||U[Lambda^(M+1)] f||^2`
/// for every `M <= max_depth`. Refuses banks that are not Parseval.
pub fn check_energy_conservation(f: &Signal, bank: &FilterBank, max_depth: usize) -> Result<ConservationReport> {
    parseval_or_refuse(bank)?;
    let ledger = cascade_energies(f, bank, &TruncationPolicy::exhaustive(max_depth))?;
    let e0 = ledger.input_energy;
    let mut layer_energies = ledger.layer_energies.clone();
    layer_energies.push(ledger.residual_energy);
    let mut residuals = Vec::with_capacity(max_depth + 1);
    let mut gaps = Vec::with_capacity(max_depth + 1);
    let mut captured = 0.0;
    for m in 0..=max_depth {
        captured += ledger.output_energies[m];
        let gap = e0 - captured;
        let residual = (gap - layer_energies[m + 1]).abs();
        residuals.push(if e0 > 0.0 { residual / e0 } else { residual });
        gaps.push(gap);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    Ok(ConservationReport {
        input_energy: e0,
        output_energies: ledger.output_energies,
        layer_energies,
        telescoping_residuals: residuals,
        s_norm_gaps: gaps,
        max_residual,
        pass: max_residual <= ENERGY_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `e_K = ||U[Lambda^K] f||^2` for `K = 0..=k_max`.
    pub layer_energies: Vec<f64>,
    /// `||f||^2 - ||f * g0||^2`.
    pub budget: f64,
    /// `max_{K>=2} e_K / e_(K-1)`; ratios with a zero denominator count as 0.
    pub fitted_ratio: f64,
    /// `e_K <= ratio^(K-1) * budget` per `K = 1..=k_max`.
    pub dominated: Vec<bool>,
    pub pass: bool,
}

/// Measures layer energies on a uniform covering bank and checks that they
/// decay geometrically. Wavelet banks are refused: their decay can be
/// arbitrarily slow.
pub fn check_energy_decay(f: &Signal, bank: &FilterBank, k_max: usize) -> Result<DecayReport> {
    if bank.family() != Family::UniformCovering {
        return Err(Error::Refused(format!("decay is only certified for uniform covering banks, got {}", bank.id())));
    }
    if k_max < 2 {
        return Err(Error::InvalidParameter("decay needs at least two measured layers (k_max >= 2)".into()));
    }
    parseval_or_refuse(bank)?;
    let e = layer_energy_profile(f, bank, k_max)?;
    let e0 = energy(f);
    let ledger = cascade_energies(f, bank, &TruncationPolicy::exhaustive(0))?;
    let budget = e0 - ledger.output_energies[0];
    let fitted_ratio = (2..=k_max).map(|k| if e[k - 1] > 0.0 { e[k] / e[k - 1] } else { 0.0 }).fold(0.0, f64::max);
    let slack = ENERGY_TOLERANCE * e0;
    let dominated: Vec<bool> = (1..=k_max).map(|k| e[k] <= fitted_ratio.powi(k as i32 - 1) * budget + slack).collect();
    Ok(DecayReport {
        pass: fitted_ratio < 1.0 && dominated.iter().all(|&d| d),
        layer_energies: e,
        budget,
        fitted_ratio,
        dominated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framekit::{
        build_uniform_covering_bank, build_wavelet_bank, BankSpec, UniformCoveringParams, WaveletParams,
    };
    use crate::sigkit::generate::band_limited_noise;
    use crate::sigkit::{FrequencyFilter, Grid, Label};
    use proptest::prelude::*;

    fn covering(n: usize) -> FilterBank {
        let grid = Grid::line(n, 1.0).unwrap();
        build_uniform_covering_bank(&grid, &UniformCoveringParams::for_grid(&grid)).unwrap()
    }

    #[test]
    fn zero_signal_conserves_trivially() {
        let bank = covering(32);
        let r = check_energy_conservation(&Signal::zeros(bank.grid().clone()), &bank, 2).unwrap();
        assert!(r.pass);
        assert!(r.output_energies.iter().chain(&r.layer_energies).chain(&r.s_norm_gaps).all(|&e| e == 0.0));
    }

    #[test]
    fn non_parseval_banks_are_refused() {
        let grid = Grid::line(16, 1.0).unwrap();
        let half = FrequencyFilter::constant(grid.clone(), Label::Output, 0.5);
        let bank = FilterBank::new(half, vec![], BankSpec::Custom { name: "half".into() }).unwrap();
        let f = band_limited_noise(&grid, 0.8, 1).unwrap();
        assert!(check_energy_conservation(&f, &bank, 1).unwrap_err().is_refusal());
    }

    #[test]
    fn decay_refuses_wavelets_and_short_profiles() {
        let grid = Grid::line(64, 1.0).unwrap();
        let wavelet = build_wavelet_bank(&grid, &WaveletParams::new(3, 1)).unwrap();
        let f = band_limited_noise(&grid, 0.8, 1).unwrap();
        assert!(check_energy_decay(&f, &wavelet, 4).unwrap_err().is_refusal());
        assert!(matches!(check_energy_decay(&f, &covering(64), 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn low_band_signal_stops_at_depth_zero() {
        let bank = covering(64);
        let grid = bank.grid().clone();
        // a constant lies at the zero bin where g0^ = 1
        let f = Signal::constant(grid, num_complex::Complex64::new(0.125, 0.0));
        let r = check_energy_decay(&f, &bank, 3).unwrap();
        assert!(r.layer_energies[1] < 1e-30);
        assert!(r.pass);
    }

    #[test]
    fn gaps_shrink_with_depth_on_covering_banks() {
        let bank = covering(128);
        let f = band_limited_noise(bank.grid(), 0.8, 5).unwrap();
        let r = check_energy_conservation(&f, &bank, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.s_norm_gaps.windows(2).all(|w| w[1] <= w[0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn telescoping_and_decay(seed in 0u64..10_000) {
            let bank = covering(64);
            let f = band_limited_noise(bank.grid(), 0.8, seed).unwrap();
            let c = check_energy_conservation(&f, &bank, 3).unwrap();
            prop_assert!(c.pass, "{:?}", c);
            let d = check_energy_decay(&f, &bank, 4).unwrap();
            prop_assert!(d.pass, "{:?}", d);
            prop_assert!(d.layer_energies[1] <= d.budget * (1.0 + 1e-9));
        }
    }
}
