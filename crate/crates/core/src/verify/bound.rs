use serde::{Deserialize, Serialize};

use super::BOUND_TOLERANCE;
use crate::error::{Error, Result};
use crate::framekit::{check_coherence, measure_support_radius, validate_bessel, CoherentSequence, Family, FilterBank};
use crate::scatter::{scatter_pair_distance, TruncationPolicy};
use crate::sigkit::grid::norm;
use crate::sigkit::{idft, l2_norm, translate, Signal, Spectrum};

/// One translation-bound certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Scattering distance between `f` and its translate.
    pub lhs: f64,
    /// `2 pi D |c| ||f||`.
    pub rhs_linear: f64,
    /// `2 ||f||`.
    pub rhs_cap: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or 0 when `rhs` is 0.
    pub ratio: f64,
    pub pass: bool,
    pub shift: Vec<f64>,
    pub shift_norm: f64,
    pub support_radius: f64,
    pub signal_norm: f64,
    pub seed: u64,
    pub bank_id: String,
    pub policy: TruncationPolicy,
    /// `||grad g0||_{L1} |c| ||f||` for covering banks; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_envelope: Option<f64>,
}

/// `||grad g0||_{L1}`, the output kernel's gradient computed spectrally.
pub fn gradient_envelope(bank: &FilterBank) -> f64 {
    let grid = bank.grid();
    let g0 = bank.output();
    let mut sq = vec![0.0; grid.len()];
    for axis in 0..grid.dims() {
        let values = g0
            .response()
            .iter()
            .enumerate()
            .map(|(k, v)| v * num_complex::Complex64::new(0.0, std::f64::consts::TAU * grid.frequency(k)[axis]))
            .collect();
        let d = idft(&Spectrum::new(grid.clone(), values).expect("finite derivative"));
        for (s, v) in sq.iter_mut().zip(d.values()) {
            *s += v.norm_sqr();
        }
    }
    grid.cell_volume() * sq.iter().map(|s| s.sqrt()).sum::<f64>()
}

fn bessel_or_refuse(bank: &FilterBank) -> Result<()> {
    let b = validate_bessel(bank)?;
    if !b.pass {
        return Err(Error::Refused(format!(
            "bank {} is not a Bessel family: squared sum reaches {} at bin {}",
            bank.id(),
            b.max_sum,
            b.worst_bin
        )));
    }
    Ok(())
}

fn bound(f: &Signal, shift: &[f64], bank: &FilterBank, policy: &TruncationPolicy, seed: u64) -> Result<BoundReport> {
    let moved = translate(f, shift)?;
    let lhs = scatter_pair_distance(f, &moved, bank, policy)?;
    let support_radius = measure_support_radius(bank.output(), 0.0);
    let signal_norm = l2_norm(f);
    let mut c = [0.0; 2];
    c[..shift.len()].copy_from_slice(shift);
    let shift_norm = norm(&c);
    let rhs_linear = std::f64::consts::TAU * support_radius * shift_norm * signal_norm;
    let rhs_cap = 2.0 * signal_norm;
    let rhs = rhs_linear.min(rhs_cap);
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    let gradient =
        (bank.family() == Family::UniformCovering).then(|| gradient_envelope(bank) * shift_norm * signal_norm);
    Ok(BoundReport {
        lhs,
        rhs_linear,
        rhs_cap,
        rhs,
        ratio,
        pass: lhs <= rhs * (1.0 + BOUND_TOLERANCE),
        shift: shift.to_vec(),
        shift_norm,
        support_radius,
        signal_norm,
        seed,
        bank_id: bank.id(),
        policy: policy.clone(),
        gradient_envelope: gradient,
    })
}

/// Certifies `||S f - S T_c f|| <= min(2 pi D |c|, 2) ||f||` for one signal
/// and shift. Refuses banks that are not Bessel.
///
/// The distance is accumulated over the truncated path set in lockstep on
/// both cascades, so no coefficient is stored; it equals
/// `scatter_distance(scatter(f), scatter(T_c f))`.
pub fn check_translation_bound(
    f: &Signal,
    shift: &[f64],
    bank: &FilterBank,
    policy: &TruncationPolicy,
    seed: u64,
) -> Result<BoundReport> {
    bessel_or_refuse(bank)?;
    bound(f, shift, bank, policy, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scale: u32,
    pub support_radius: f64,
    pub lhs: f64,
    pub rhs_linear: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Every row satisfies `lhs <= 2 pi D |c| ||f||` as well as the capped bound.
    pub rows_pass: bool,
    pub envelope_decreasing: bool,
    /// `lhs` at the last scale sits under that scale's linear envelope.
    pub final_within_envelope: bool,
    pub pass: bool,
    pub reports: Vec<BoundReport>,
}

/// Runs the translation bound across a coherent sequence. Refuses sequences
/// that fail the coherence check.
pub fn sweep_corollary(
    seq: &CoherentSequence,
    f: &Signal,
    shift: &[f64],
    policy: &TruncationPolicy,
    seed: u64,
) -> Result<SweepReport> {
    let coherence = check_coherence(seq);
    if !coherence.pass() {
        let why = coherence.detail.as_deref().unwrap_or("unknown violation");
        return Err(Error::Refused(format!("sequence is not coherent: {why}")));
    }
    let mut reports = Vec::with_capacity(seq.len());
    let mut rows = Vec::with_capacity(seq.len());
    for (scale, bank, _) in seq.iter() {
        let r = check_translation_bound(f, shift, bank, policy, seed)?;
        rows.push(SweepRow {
            scale,
            support_radius: r.support_radius,
            lhs: r.lhs,
            rhs_linear: r.rhs_linear,
            rhs: r.rhs,
            ratio: r.ratio,
            pass: r.pass && r.lhs <= r.rhs_linear * (1.0 + BOUND_TOLERANCE),
        });
        reports.push(r);
    }
    let rows_pass = rows.iter().all(|r| r.pass);
    let envelope_decreasing = rows.windows(2).all(|w| w[1].rhs_linear < w[0].rhs_linear);
    let final_within_envelope = rows.last().is_some_and(|r| r.lhs <= r.rhs_linear * (1.0 + BOUND_TOLERANCE));
    Ok(SweepReport {
        pass: rows_pass && envelope_decreasing && final_within_envelope,
        rows,
        rows_pass,
        envelope_decreasing,
        final_within_envelope,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framekit::{
        build_coherent_sequence, build_uniform_covering_bank, build_wavelet_bank, BankSpec, CoherentFamily,
        UniformCoveringParams, WaveletParams,
    };
    use crate::sigkit::generate::band_limited_noise;
    use crate::sigkit::signal::translation_phase;
    use crate::sigkit::{FrequencyFilter, Grid, Label};
    use proptest::prelude::*;

    fn setup(n: usize) -> (FilterBank, Signal) {
        let grid = Grid::line(n, 1.0).unwrap();
        let bank = build_wavelet_bank(&grid, &WaveletParams::new(3, 1)).unwrap();
        let f = band_limited_noise(&grid, 0.8, 17).unwrap();
        (bank, f)
    }

    #[test]
    fn zero_shift_is_exact() {
        let (bank, f) = setup(64);
        let r = check_translation_bound(&f, &[0.0], &bank, &TruncationPolicy::exhaustive(3), 1).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
        assert_eq!(r.shift_norm, 0.0);
        assert_eq!(r.ratio, 0.0);
        assert!(r.pass);
        assert!(r.gradient_envelope.is_none());
    }

    #[test]
    fn small_and_large_shifts() {
        let (bank, f) = setup(128);
        let policy = TruncationPolicy::exhaustive(3);
        let small = check_translation_bound(&f, &[0.3], &bank, &policy, 1).unwrap();
        assert!(small.pass && small.rhs == small.rhs_linear && small.lhs > 0.0);
        let large = check_translation_bound(&f, &[41.7], &bank, &policy, 1).unwrap();
        assert!(large.rhs_linear > large.rhs_cap);
        assert_eq!(large.rhs, large.rhs_cap);
        assert!(large.pass);
    }

    #[test]
    fn refuses_non_bessel_banks() {
        let grid = Grid::line(16, 1.0).unwrap();
        let bank = FilterBank::new(
            FrequencyFilter::constant(grid.clone(), Label::Output, 1.0),
            vec![FrequencyFilter::constant(grid.clone(), Label::named("extra"), 1.0)],
            BankSpec::Custom { name: "double".into() },
        )
        .unwrap();
        let f = band_limited_noise(&grid, 0.8, 1).unwrap();
        let err = check_translation_bound(&f, &[0.5], &bank, &TruncationPolicy::exhaustive(1), 1).unwrap_err();
        assert!(err.is_refusal());
    }

    #[test]
    fn covering_banks_report_gradient_envelope() {
        let grid = Grid::line(64, 1.0).unwrap();
        let bank = build_uniform_covering_bank(&grid, &UniformCoveringParams::for_grid(&grid)).unwrap();
        let f = band_limited_noise(&grid, 0.8, 2).unwrap();
        let r = check_translation_bound(&f, &[1.5], &bank, &TruncationPolicy::exhaustive(2), 2).unwrap();
        assert!(r.pass);
        assert!(r.gradient_envelope.unwrap() > 0.0);
    }

    #[test]
    fn gradient_of_gaussian_like_output() {
        // g0^ = exp(-pi xi^2 / s^2) has kernel s exp(-pi s^2 x^2); its
        // derivative has L1 norm 2 s (twice the peak value).
        let grid = Grid::line(2048, 0.01).unwrap();
        let s = 2.0;
        let g0 = FrequencyFilter::from_real_fn(grid.clone(), Label::Output, |xi| {
            (-std::f64::consts::PI * xi[0] * xi[0] / (s * s)).exp()
        })
        .unwrap();
        let bank = FilterBank::new(g0, vec![], BankSpec::Custom { name: "gauss".into() }).unwrap();
        // the sampled |k'| has a kink at 0, so the Riemann sum is only second order
        assert!((gradient_envelope(&bank) - 2.0 * s).abs() < 1e-3, "{}", gradient_envelope(&bank));
    }

    #[test]
    fn wavelet_sweep_passes_and_repeats_are_refused() {
        let grid = Grid::line(128, 1.0).unwrap();
        let family = CoherentFamily::Wavelet(WaveletParams::new(1, 1));
        let seq = build_coherent_sequence(&grid, &family, 1..=4).unwrap();
        let f = band_limited_noise(&grid, 0.8, 3).unwrap();
        let report = sweep_corollary(&seq, &f, &[0.7], &TruncationPolicy::exhaustive(2), 3).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.pass, "{report:?}");
        let bank = seq.banks()[0].clone();
        let repeated = CoherentSequence::from_parts(vec![1, 2], vec![bank.clone(), bank]).unwrap();
        assert!(sweep_corollary(&repeated, &f, &[0.7], &TruncationPolicy::exhaustive(1), 3).unwrap_err().is_refusal());
    }

    #[test]
    fn lhs_is_at_most_linear_as_shift_shrinks() {
        let (bank, f) = setup(128);
        let policy = TruncationPolicy::exhaustive(2);
        let slopes: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&c| {
                let r = check_translation_bound(&f, &[c], &bank, &policy, 0).unwrap();
                assert!(r.pass);
                r.lhs / c
            })
            .collect();
        let envelope = std::f64::consts::TAU * measure_support_radius(bank.output(), 0.0) * l2_norm(&f);
        for s in &slopes {
            assert!(*s <= envelope);
        }
        // no superlinear blowup: the slope settles instead of growing
        assert!(slopes[3] <= 1.5 * slopes[0], "{slopes:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn phase_factor_bound(k in 0usize..64, c in -40.0f64..40.0) {
            // |exp(-2 pi i xi c) - 1| <= min(2 pi |xi| |c|, 2)
            let grid = Grid::line(64, 0.5).unwrap();
            let xi = grid.frequency(k)[0];
            let phase = translation_phase(&grid, k, &[c, 0.0]);
            let gap = (phase - num_complex::Complex64::new(1.0, 0.0)).norm();
            let lin = std::f64::consts::TAU * xi.abs() * c.abs();
            prop_assert!(gap <= lin.min(2.0) + 1e-12);
        }

        #[test]
        fn bound_holds_on_random_inputs(seed in 0u64..1000, c in -30.0f64..30.0) {
            let grid = Grid::line(64, 1.0).unwrap();
            let bank = build_wavelet_bank(&grid, &WaveletParams::new(3, 1)).unwrap();
            let f = band_limited_noise(&grid, 0.8, seed).unwrap();
            let r = check_translation_bound(&f, &[c], &bank, &TruncationPolicy::exhaustive(2), seed).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
