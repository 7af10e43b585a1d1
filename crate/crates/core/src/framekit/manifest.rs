//! Bank export/import: a JSON manifest next to one SCTB container per filter.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bank::{BankSpec, FilterBank};
use crate::error::{Error, Result};
use crate::sigkit::io::{load_container, save_container};
use crate::sigkit::{FrequencyFilter, Grid, Label};

pub const MANIFEST_SCHEMA: &str = "scatterbench.bank/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterEntry {
    pub label: Label,
    /// Path of the response container, relative to the manifest.
    pub file: String,
    pub support_radius: f64,
    pub support_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankManifest {
    pub schema: String,
    pub id: String,
    pub spec: BankSpec,
    pub grid: Grid,
    /// Output support radius `D`.
    pub output_support_radius: f64,
    pub output: FilterEntry,
    pub peripherals: Vec<FilterEntry>,
}

/// Writes `dir/manifest.json` and `dir/filters/*.sctb`. An existing manifest
/// is only replaced when `force` is set.
pub fn export_bank(bank: &FilterBank, dir: &Path, force: bool) -> Result<PathBuf> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if manifest_path.exists() && !force {
        return Err(Error::Refused(format!("{} exists; pass --force to overwrite", manifest_path.display())));
    }
    fs::create_dir_all(dir.join("filters"))?;
    let mut entries = Vec::new();
    for (i, filter) in bank.filters().enumerate() {
        let file = format!("filters/{i:04}.sctb");
        save_container(&dir.join(&file), filter.grid(), filter.response())?;
        entries.push(FilterEntry {
            label: filter.label().clone(),
            file,
            support_radius: filter.support_radius(),
            support_threshold: filter.support_threshold(),
        });
    }
    let output = entries.remove(0);
    let manifest = BankManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        id: bank.id(),
        spec: bank.spec().clone(),
        grid: bank.grid().clone(),
        output_support_radius: bank.output_support_radius(),
        output,
        peripherals: entries,
    };
    let tmp = dir.join("manifest.json.partial");
    fs::write(&tmp, serde_json::to_string_pretty(&manifest)?)?;
    fs::rename(&tmp, &manifest_path)?;
    Ok(manifest_path)
}

fn load_entry(base: &Path, grid: &Grid, entry: &FilterEntry) -> Result<FrequencyFilter> {
    let (g, response) = load_container(&base.join(&entry.file))?;
    grid.ensure_same(&g, &entry.file)?;
    let filter = FrequencyFilter::with_threshold(g, response, entry.label.clone(), entry.support_threshold)?;
    if filter.support_radius() != entry.support_radius {
        return Err(Error::Format(format!(
            "{}: stored support radius {} but response gives {}",
            entry.file,
            entry.support_radius,
            filter.support_radius()
        )));
    }
    Ok(filter)
}

/// Loads a bank from a manifest path (or a directory containing one).
pub fn import_bank(path: &Path) -> Result<FilterBank> {
    let manifest_path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
    let manifest: BankManifest = serde_json::from_str(&fs::read_to_string(&manifest_path)?)?;
    if manifest.schema != MANIFEST_SCHEMA {
        return Err(Error::Format(format!("unknown manifest schema `{}`", manifest.schema)));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let output = load_entry(base, &manifest.grid, &manifest.output)?;
    let peripherals =
        manifest.peripherals.iter().map(|e| load_entry(base, &manifest.grid, e)).collect::<Result<Vec<_>>>()?;
    FilterBank::new(output, peripherals, manifest.spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framekit::{build_uniform_covering_bank, build_wavelet_bank, UniformCoveringParams, WaveletParams};

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::square(16, 0.5).unwrap();
        for (i, bank) in [
            build_wavelet_bank(&grid, &WaveletParams::new(2, 4)).unwrap(),
            build_uniform_covering_bank(&grid, &UniformCoveringParams::for_grid(&grid)).unwrap(),
        ]
        .into_iter()
        .enumerate()
        {
            let sub = dir.path().join(i.to_string());
            let path = export_bank(&bank, &sub, false).unwrap();
            let back = import_bank(&path).unwrap();
            assert_eq!(back, bank);
            for (a, b) in back.filters().zip(bank.filters()) {
                let bits = |f: &FrequencyFilter| -> Vec<(u64, u64)> {
                    f.response().iter().map(|v| (v.re.to_bits(), v.im.to_bits())).collect()
                };
                assert_eq!(bits(a), bits(b));
            }
            assert_eq!(import_bank(&sub).unwrap(), bank);
        }
    }

    #[test]
    fn refuses_overwrite_without_force() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::line(32, 1.0).unwrap();
        let bank = build_wavelet_bank(&grid, &WaveletParams::new(2, 1)).unwrap();
        export_bank(&bank, dir.path(), false).unwrap();
        assert!(export_bank(&bank, dir.path(), false).unwrap_err().is_refusal());
        export_bank(&bank, dir.path(), true).unwrap();
    }

    #[test]
    fn detects_tampered_support_radius() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::line(32, 1.0).unwrap();
        let bank = build_wavelet_bank(&grid, &WaveletParams::new(2, 1)).unwrap();
        let path = export_bank(&bank, dir.path(), false).unwrap();
        let mut m: BankManifest = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        m.output.support_radius *= 2.0;
        fs::write(&path, serde_json::to_string(&m).unwrap()).unwrap();
        assert!(matches!(import_bank(&path), Err(Error::Format(_))));
    }
}
