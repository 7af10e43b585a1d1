use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::Path;
use crate::error::{Error, Result};
use crate::framekit::FilterBank;
use crate::sigkit::signal::{modulus_in_spectrum, modulus_pair_in_spectrum};
use crate::sigkit::{convolve, dft, energy, idft, modulus, Grid, Signal, Spectrum};

/// Depth cap and relative-energy pruning for the (infinite) path tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Deepest path whose coefficient is produced.
    pub max_depth: usize,
    /// A node `u_p` (and its subtree) is dropped when `||u_p|| < prune_threshold * ||f||`.
    pub prune_threshold: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { max_depth: 3, prune_threshold: 1e-6 }
    }
}

impl TruncationPolicy {
    /// Full enumeration up to `max_depth`.
    pub fn exhaustive(max_depth: usize) -> Self {
        TruncationPolicy { max_depth, prune_threshold: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.prune_threshold >= 0.0 && self.prune_threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!("prune threshold {}", self.prune_threshold)));
        }
        Ok(())
    }
}

/// `U[p] f` by repeated convolve-then-modulus.
pub fn propagate(f: &Signal, bank: &FilterBank, path: &Path) -> Result<Signal> {
    f.grid().ensure_same(bank.grid(), "propagate")?;
    let mut u = f.clone();
    for label in path.labels() {
        let g = bank.peripheral(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        u = modulus(&convolve(&u, g)?);
    }
    Ok(u)
}

/// Energies gathered during one cascade, all squared L2 norms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    /// `||f||^2`.
    pub input_energy: f64,
    /// `||U[Lambda^k] f||^2` over retained nodes, `k = 0..=max_depth`.
    pub layer_energies: Vec<f64>,
    /// `||S[Lambda^k] f||^2`, `k = 0..=max_depth`.
    pub output_energies: Vec<f64>,
    /// `||U[Lambda^(M+1)] f||^2` below the retained depth-`M` nodes.
    pub residual_energy: f64,
    /// Total squared norm of nodes dropped by pruning; bounds the energy of
    /// every coefficient they would have produced.
    pub pruned_energy: f64,
    pub pruned_nodes: usize,
}

impl EnergyLedger {
    fn new(max_depth: usize) -> Self {
        EnergyLedger {
            layer_energies: vec![0.0; max_depth + 1],
            output_energies: vec![0.0; max_depth + 1],
            ..Default::default()
        }
    }
}

/// Coefficients `U[p] f * g0` for every retained path, with an energy ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringCoefficients {
    grid: Grid,
    policy: TruncationPolicy,
    outputs: BTreeMap<Path, Signal>,
    ledger: EnergyLedger,
}

impl ScatteringCoefficients {
    /// A coefficient set with no paths.
    pub fn empty(grid: Grid, policy: TruncationPolicy) -> Self {
        ScatteringCoefficients { grid, policy, outputs: BTreeMap::new(), ledger: EnergyLedger::default() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    /// Outputs in breadth-first order.
    pub fn outputs(&self) -> &BTreeMap<Path, Signal> {
        &self.outputs
    }

    pub fn get(&self, path: &Path) -> Option<&Signal> {
        self.outputs.get(path)
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    pub fn input_energy(&self) -> f64 {
        self.ledger.input_energy
    }

    pub fn layer_energies(&self) -> &[f64] {
        &self.ledger.layer_energies
    }

    pub fn output_energies(&self) -> &[f64] {
        &self.ledger.output_energies
    }

    pub fn residual_energy(&self) -> f64 {
        self.ledger.residual_energy
    }

    pub fn pruned_energy(&self) -> f64 {
        self.ledger.pruned_energy
    }

    pub fn pruned_nodes(&self) -> usize {
        self.ledger.pruned_nodes
    }
}

/// Per-node callbacks of the depth-first walk. Nodes at each depth are
/// visited in label order.
trait Visitor {
    fn node(&mut self, path: &Path, spectrum: &[Complex64], energy: f64);
    /// A child below the depth cap; only its energy is computed.
    fn frontier(&mut self, depth: usize, energy: f64);
    fn pruned(&mut self, depth: usize, energy: f64);
}

struct Walker<'a> {
    bank: &'a FilterBank,
    grid: &'a Grid,
    max_depth: usize,
    prune_below: f64,
}

impl Walker<'_> {
    fn visit(&self, path: &mut Path, spectrum: &[Complex64], node_energy: f64, v: &mut impl Visitor) {
        v.node(path, spectrum, node_energy);
        let depth = path.depth();
        let bin_volume = self.grid.bin_volume();
        let mut buf = Vec::with_capacity(spectrum.len());
        for g in self.bank.peripherals() {
            let e = bin_volume * g.filtered_sum_sq(spectrum);
            if depth == self.max_depth {
                v.frontier(depth + 1, e);
                continue;
            }
            if e.sqrt() < self.prune_below {
                v.pruned(depth + 1, e);
                continue;
            }
            g.apply(spectrum, &mut buf);
            modulus_in_spectrum(self.grid, &mut buf);
            path.push(g.label().clone());
            self.visit(path, &buf, e, v);
            path.pop();
        }
    }
}

fn walk(f: &Signal, bank: &FilterBank, max_depth: usize, prune_threshold: f64, v: &mut impl Visitor) -> Result<f64> {
    f.grid().ensure_same(bank.grid(), "scatter")?;
    let e0 = energy(f);
    let walker = Walker { bank, grid: f.grid(), max_depth, prune_below: prune_threshold * e0.sqrt() };
    let root = dft(f);
    walker.visit(&mut Path::root(), root.values(), e0, v);
    Ok(e0)
}

struct Collect<'a> {
    bank: &'a FilterBank,
    grid: &'a Grid,
    ledger: EnergyLedger,
    outputs: Option<BTreeMap<Path, Signal>>,
}

impl Visitor for Collect<'_> {
    fn node(&mut self, path: &Path, spectrum: &[Complex64], node_energy: f64) {
        let depth = path.depth();
        self.ledger.layer_energies[depth] += node_energy;
        self.ledger.output_energies[depth] += self.grid.bin_volume() * self.bank.output().filtered_sum_sq(spectrum);
        if let Some(outputs) = &mut self.outputs {
            let mut buf = Vec::with_capacity(spectrum.len());
            self.bank.output().apply(spectrum, &mut buf);
            outputs.insert(path.clone(), idft(&Spectrum::from_parts_unchecked(self.grid.clone(), buf)));
        }
    }

    fn frontier(&mut self, _depth: usize, energy: f64) {
        self.ledger.residual_energy += energy;
    }

    fn pruned(&mut self, _depth: usize, energy: f64) {
        self.ledger.pruned_energy += energy;
        self.ledger.pruned_nodes += 1;
    }
}

fn run<'a>(f: &Signal, bank: &'a FilterBank, policy: &TruncationPolicy, keep: bool) -> Result<Collect<'a>> {
    policy.validate()?;
    let mut collect = Collect {
        bank,
        grid: bank.grid(),
        ledger: EnergyLedger::new(policy.max_depth),
        outputs: keep.then(BTreeMap::new),
    };
    collect.ledger.input_energy = walk(f, bank, policy.max_depth, policy.prune_threshold, &mut collect)?;
    Ok(collect)
}

/// The scattering transform `{U[p] f * g0}` over paths up to the policy's
/// depth, skipping pruned subtrees.
pub fn scatter(f: &Signal, bank: &FilterBank, policy: &TruncationPolicy) -> Result<ScatteringCoefficients> {
    let c = run(f, bank, policy, true)?;
    Ok(ScatteringCoefficients {
        grid: f.grid().clone(),
        policy: policy.clone(),
        outputs: c.outputs.unwrap_or_default(),
        ledger: c.ledger,
    })
}

/// The ledger [`scatter`] would report, without keeping any coefficient.
pub fn cascade_energies(f: &Signal, bank: &FilterBank, policy: &TruncationPolicy) -> Result<EnergyLedger> {
    Ok(run(f, bank, policy, false)?.ledger)
}

/// `sqrt(sum_p ||S[p]||^2)`, summed in path order.
pub fn l2l2_norm(s: &ScatteringCoefficients) -> f64 {
    s.outputs.values().map(energy).sum::<f64>().sqrt()
}

fn ensure_same_paths(a: &ScatteringCoefficients, b: &ScatteringCoefficients) -> Result<()> {
    a.grid.ensure_same(&b.grid, "scatter_distance")?;
    if a.outputs.len() != b.outputs.len() {
        return Err(Error::PathSetMismatch(format!("{} vs {} paths", a.outputs.len(), b.outputs.len())));
    }
    if let Some((p, _)) = a.outputs.iter().zip(b.outputs.keys()).find(|((pa, _), pb)| pa != pb).map(|(x, _)| x) {
        return Err(Error::PathSetMismatch(format!("path {p} not present in both")));
    }
    Ok(())
}

/// `sqrt(sum_p ||S1[p] - S2[p]||^2)` over identical path sets.
pub fn scatter_distance(a: &ScatteringCoefficients, b: &ScatteringCoefficients) -> Result<f64> {
    ensure_same_paths(a, b)?;
    let w = a.grid.cell_volume();
    let total: f64 = a
        .outputs
        .values()
        .zip(b.outputs.values())
        .map(|(x, y)| w * x.values().iter().zip(y.values()).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>())
        .sum();
    Ok(total.sqrt())
}

struct Energies(Vec<f64>);

impl Visitor for Energies {
    fn node(&mut self, path: &Path, _spectrum: &[Complex64], energy: f64) {
        self.0[path.depth()] += energy;
    }

    fn frontier(&mut self, depth: usize, energy: f64) {
        self.0[depth] += energy;
    }

    fn pruned(&mut self, _depth: usize, _energy: f64) {
        unreachable!("energy profile never prunes")
    }
}

/// Unpruned `||U[Lambda^k] f||^2` for `k = 0..=max_depth`.
pub fn layer_energy_profile(f: &Signal, bank: &FilterBank, max_depth: usize) -> Result<Vec<f64>> {
    let mut acc = Energies(vec![0.0; max_depth + 1]);
    if max_depth == 0 {
        f.grid().ensure_same(bank.grid(), "layer_energy_profile")?;
        acc.0[0] = energy(f);
        return Ok(acc.0);
    }
    walk(f, bank, max_depth - 1, 0.0, &mut acc)?;
    Ok(acc.0)
}

/// `scatter_distance(scatter(f), scatter(g))` evaluated on both trees in
/// lockstep without storing coefficients. Pruning follows each tree's own
/// rule; a node pruned in one tree but not the other is a path-set mismatch.
pub fn scatter_pair_distance(f: &Signal, g: &Signal, bank: &FilterBank, policy: &TruncationPolicy) -> Result<f64> {
    policy.validate()?;
    f.grid().ensure_same(bank.grid(), "scatter")?;
    g.grid().ensure_same(bank.grid(), "scatter")?;
    if f == g {
        return Ok(0.0);
    }
    let grid = f.grid();
    let prune_f = policy.prune_threshold * energy(f).sqrt();
    let prune_g = policy.prune_threshold * energy(g).sqrt();
    let mut layers = vec![0.0; policy.max_depth + 1];
    let mut path = Path::root();
    pair_visit(
        bank,
        grid,
        policy.max_depth,
        (prune_f, prune_g),
        &mut path,
        dft(f).values(),
        dft(g).values(),
        &mut layers,
    )?;
    Ok(layers.iter().sum::<f64>().sqrt())
}

#[allow(clippy::too_many_arguments)]
fn pair_visit(
    bank: &FilterBank,
    grid: &Grid,
    max_depth: usize,
    prune: (f64, f64),
    path: &mut Path,
    sf: &[Complex64],
    sg: &[Complex64],
    layers: &mut [f64],
) -> Result<()> {
    let depth = path.depth();
    let bin_volume = grid.bin_volume();
    layers[depth] += bin_volume * bank.output().filtered_diff_sum_sq(sf, sg);
    if depth == max_depth {
        return Ok(());
    }
    let (mut bf, mut bg) = (Vec::with_capacity(sf.len()), Vec::with_capacity(sg.len()));
    for filter in bank.peripherals() {
        let drop_f = (bin_volume * filter.filtered_sum_sq(sf)).sqrt() < prune.0;
        let drop_g = (bin_volume * filter.filtered_sum_sq(sg)).sqrt() < prune.1;
        match (drop_f, drop_g) {
            (true, true) => continue,
            (false, false) => {}
            _ => {
                return Err(Error::PathSetMismatch(format!(
                    "{} pruned in only one of the two trees",
                    path.child(filter.label().clone())
                )))
            }
        }
        filter.apply(sf, &mut bf);
        filter.apply(sg, &mut bg);
        modulus_pair_in_spectrum(grid, &mut bf, &mut bg);
        path.push(filter.label().clone());
        pair_visit(bank, grid, max_depth, prune, path, &bf, &bg, layers)?;
        path.pop();
    }
    Ok(())
}
