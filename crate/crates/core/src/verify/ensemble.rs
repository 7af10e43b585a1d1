//! Seeded draws for randomized trials. Every draw depends only on
//! `(base seed, trial index)`, so trials can run in any order.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::framekit::FilterBank;
use crate::scatter::Path;
use crate::sigkit::Grid;

/// Seed for trial `index` of a run seeded with `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng.random()
}

fn rng(seed: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose);
    rng
}

/// A shift whose length is log-uniform in `[min_steps, max_steps]` grid
/// spacings, with a uniform random sign (1-d) or direction (2-d).
pub fn random_shift(grid: &Grid, seed: u64, min_steps: f64, max_steps: f64) -> Result<Vec<f64>> {
    if !(min_steps > 0.0 && max_steps >= min_steps && max_steps.is_finite()) {
        return Err(Error::InvalidParameter(format!("shift range [{min_steps}, {max_steps}]")));
    }
    let mut r = rng(seed, 1);
    let unit = grid.spacing().iter().copied().fold(f64::INFINITY, f64::min);
    let len = unit * (min_steps.ln() + r.random::<f64>() * (max_steps.ln() - min_steps.ln())).exp();
    Ok(match grid.dims() {
        1 => vec![if r.random::<bool>() { len } else { -len }],
        _ => {
            let theta = std::f64::consts::TAU * r.random::<f64>();
            vec![len * theta.cos(), len * theta.sin()]
        }
    })
}

/// Integer shift with each component uniform in `[-max, max]`.
pub fn random_steps(grid: &Grid, seed: u64, max: i64) -> Vec<i64> {
    let mut r = rng(seed, 2);
    (0..grid.dims()).map(|_| r.random_range(-max..=max)).collect()
}

/// Path of the given depth with labels drawn uniformly from the bank.
pub fn random_path(bank: &FilterBank, seed: u64, depth: usize) -> Result<Path> {
    let labels: Vec<_> = bank.labels().cloned().collect();
    if labels.is_empty() && depth > 0 {
        return Err(Error::InvalidParameter("bank has no peripheral filters".into()));
    }
    let mut r = rng(seed, 3);
    Ok(Path::new((0..depth).map(|_| labels.choose(&mut r).expect("nonempty").clone()).collect()))
}
