use serde::{Deserialize, Serialize};

use super::{COMMUTE_TOLERANCE, NONEXPANSIVE_TOLERANCE};
use crate::error::{Error, Result};
use crate::framekit::{validate_bessel, FilterBank};
use crate::scatter::{propagate, scatter_pair_distance, Path, TruncationPolicy};
use crate::sigkit::{l2_norm, translate, Signal};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonexpansiveReport {
    pub distance: f64,
    /// `||f - g||`.
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Certifies `||S f - S g|| <= ||f - g||`. Refuses banks that are not Bessel.
pub fn check_nonexpansive(
    f: &Signal,
    g: &Signal,
    bank: &FilterBank,
    policy: &TruncationPolicy,
) -> Result<NonexpansiveReport> {
    let b = validate_bessel(bank)?;
    if !b.pass {
        return Err(Error::Refused(format!("bank {} is not a Bessel family (max sum {})", bank.id(), b.max_sum)));
    }
    let distance = scatter_pair_distance(f, g, bank, policy)?;
    let bound = l2_norm(&f.sub(g)?);
    Ok(NonexpansiveReport {
        distance,
        bound,
        ratio: if bound > 0.0 { distance / bound } else { 0.0 },
        pass: distance <= bound * (1.0 + NONEXPANSIVE_TOLERANCE),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommuteReport {
    pub path: Path,
    pub shift_steps: Vec<i64>,
    /// `max_n |U[p] T_c f - T_c U[p] f|`.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares `U[p]` applied before and after a whole-sample translation.
pub fn check_propagator_translation_commutes(
    f: &Signal,
    bank: &FilterBank,
    path: &Path,
    shift_steps: &[i64],
) -> Result<CommuteReport> {
    let grid = f.grid();
    if shift_steps.len() != grid.dims() {
        return Err(Error::InvalidParameter("shift dimension mismatch".into()));
    }
    let shift: Vec<f64> = shift_steps.iter().zip(grid.spacing()).map(|(&s, &dx)| s as f64 * dx).collect();
    let before = propagate(&translate(f, &shift)?, bank, path)?;
    let after = translate(&propagate(f, bank, path)?, &shift)?;
    let max_deviation = before.max_abs_diff(&after)?;
    Ok(CommuteReport {
        path: path.clone(),
        shift_steps: shift_steps.to_vec(),
        max_deviation,
        tolerance: COMMUTE_TOLERANCE,
        pass: max_deviation <= COMMUTE_TOLERANCE,
    })
}
