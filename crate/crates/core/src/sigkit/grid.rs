use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported number of axes.
pub const MAX_DIMS: usize = 2;

/// A frequency or position vector, zero-padded past the grid's dimension so
/// that norms and dot products ignore the unused slots.
pub type Point = [f64; MAX_DIMS];

/// Periodic sampling lattice.
///
/// Samples are stored row-major: the last axis varies fastest. Frequency bin
/// `k` on axis `i` sits at `k' / (N_i * spacing_i)` with `k'` wrapped into
/// `[-N_i/2, N_i/2)`, so the Nyquist bin carries the negative frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    sizes: Vec<usize>,
    spacing: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    sizes: Vec<usize>,
    spacing: Vec<f64>,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Self> {
        Grid::new(repr.sizes, repr.spacing)
    }
}

impl From<Grid> for GridRepr {
    fn from(grid: Grid) -> Self {
        GridRepr { sizes: grid.sizes, spacing: grid.spacing }
    }
}

impl Grid {
    pub fn new(sizes: Vec<usize>, spacing: Vec<f64>) -> Result<Self> {
        let dims = sizes.len();
        if dims == 0 || dims > MAX_DIMS {
            return Err(Error::InvalidGrid(format!("dimension {dims} not in 1..={MAX_DIMS}")));
        }
        if spacing.len() != dims {
            return Err(Error::InvalidGrid(format!("{} spacings given for {dims} axes", spacing.len())));
        }
        for (axis, &n) in sizes.iter().enumerate() {
            if n < 2 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!("axis {axis}: size {n} must be even and >= 2")));
            }
        }
        for (axis, &dx) in spacing.iter().enumerate() {
            if !(dx.is_finite() && dx > 0.0) {
                return Err(Error::InvalidGrid(format!("axis {axis}: spacing {dx} must be positive")));
            }
        }
        Ok(Grid { sizes, spacing })
    }

    /// One-dimensional grid of `n` samples.
    pub fn line(n: usize, spacing: f64) -> Result<Self> {
        Grid::new(vec![n], vec![spacing])
    }

    /// Square two-dimensional grid of `n x n` samples.
    pub fn square(n: usize, spacing: f64) -> Result<Self> {
        Grid::new(vec![n, n], vec![spacing, spacing])
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one sample, the product of the spacings.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Quadrature weight of one frequency bin, `prod 1/(N_i * spacing_i)`.
    pub fn bin_volume(&self) -> f64 {
        self.sizes.iter().zip(&self.spacing).map(|(&n, &dx)| 1.0 / (n as f64 * dx)).product()
    }

    pub fn nyquist(&self, axis: usize) -> f64 {
        0.5 / self.spacing[axis]
    }

    /// Smallest per-axis Nyquist frequency.
    pub fn min_nyquist(&self) -> f64 {
        (0..self.dims()).map(|a| self.nyquist(a)).fold(f64::INFINITY, f64::min)
    }

    /// Frequency resolution along `axis`.
    pub fn bin_width(&self, axis: usize) -> f64 {
        1.0 / (self.sizes[axis] as f64 * self.spacing[axis])
    }

    /// Largest `|xi|` over all bins.
    pub fn max_frequency(&self) -> f64 {
        (0..self.dims()).map(|a| self.nyquist(a).powi(2)).sum::<f64>().sqrt()
    }

    /// Wraps an index on `axis` into `[-N/2, N/2)`.
    pub fn wrapped(&self, axis: usize, k: usize) -> i64 {
        let n = self.sizes[axis] as i64;
        let k = k as i64;
        if k >= n / 2 {
            k - n
        } else {
            k
        }
    }

    /// Per-axis indices of a flat (row-major) position.
    pub fn unflatten(&self, mut flat: usize) -> [usize; MAX_DIMS] {
        let mut idx = [0usize; MAX_DIMS];
        for axis in (0..self.dims()).rev() {
            idx[axis] = flat % self.sizes[axis];
            flat /= self.sizes[axis];
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.sizes).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Physical frequency of a flat bin index.
    pub fn frequency(&self, flat: usize) -> Point {
        let idx = self.unflatten(flat);
        let mut xi = [0.0; MAX_DIMS];
        for axis in 0..self.dims() {
            xi[axis] = self.wrapped(axis, idx[axis]) as f64 * self.bin_width(axis);
        }
        xi
    }

    /// Frequencies of every bin in storage order.
    pub fn frequencies(&self) -> Vec<Point> {
        (0..self.len()).map(|k| self.frequency(k)).collect()
    }

    /// Physical position of a flat sample index.
    pub fn position(&self, flat: usize) -> Point {
        let idx = self.unflatten(flat);
        let mut x = [0.0; MAX_DIMS];
        for axis in 0..self.dims() {
            x[axis] = idx[axis] as f64 * self.spacing[axis];
        }
        x
    }

    pub(crate) fn ensure_same(&self, other: &Grid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: {:?}/{:?} vs {:?}/{:?}",
                self.sizes, self.spacing, other.sizes, other.spacing
            )))
        }
    }
}

pub fn norm(p: &Point) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &Point, b: &Point) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_tiny_sizes() {
        assert!(Grid::line(5, 1.0).is_err());
        assert!(Grid::line(0, 1.0).is_err());
        assert!(Grid::line(4, 0.0).is_err());
        assert!(Grid::new(vec![4, 4, 4], vec![1.0; 3]).is_err());
        assert!(Grid::new(vec![4], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn nyquist_bin_is_negative() {
        let g = Grid::line(4, 1.0).unwrap();
        let xs: Vec<f64> = (0..4).map(|k| g.frequency(k)[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, -0.5, -0.25]);
    }

    #[test]
    fn flat_index_round_trip() {
        let g = Grid::new(vec![4, 6], vec![1.0, 0.5]).unwrap();
        for flat in 0..g.len() {
            let idx = g.unflatten(flat);
            assert_eq!(g.flatten(&idx[..2]), flat);
        }
        assert_eq!(g.unflatten(7), [1, 1]);
        assert!((g.bin_volume() - 1.0 / (4.0 * 6.0 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn serde_validates() {
        let bad = r#"{"sizes":[3],"spacing":[1.0]}"#;
        assert!(serde_json::from_str::<Grid>(bad).is_err());
        let good = r#"{"sizes":[8],"spacing":[0.5]}"#;
        let g: Grid = serde_json::from_str(good).unwrap();
        assert_eq!(g.nyquist(0), 1.0);
    }
}
