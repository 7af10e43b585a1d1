//! Coefficient dump: `index.json` plus one SCTB container per path under
//! `coeffs/`, or the index alone in norms-only mode.

use std::fs;
use std::path::{Path as FsPath, PathBuf};

use serde::{Deserialize, Serialize};

use super::path::Path;
use super::transform::{l2l2_norm, EnergyLedger, ScatteringCoefficients, TruncationPolicy};
use crate::error::{Error, Result};
use crate::sigkit::io::{load_signal, save_signal};
use crate::sigkit::{l2_norm, Grid, Signal};

pub const DUMP_SCHEMA: &str = "scatterbench.coefficients/1";
pub const INDEX_FILE: &str = "index.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpEntry {
    pub path: Path,
    pub norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpIndex {
    pub schema: String,
    pub grid: Grid,
    pub policy: TruncationPolicy,
    pub ledger: EnergyLedger,
    pub l2l2_norm: f64,
    pub entries: Vec<DumpEntry>,
}

/// Writes the dump under `dir`. Refuses to replace an existing index unless
/// `force` is set.
pub fn write_dump(s: &ScatteringCoefficients, dir: &FsPath, norms_only: bool, force: bool) -> Result<PathBuf> {
    let index_path = dir.join(INDEX_FILE);
    if index_path.exists() && !force {
        return Err(Error::Refused(format!("{} exists; pass --force to overwrite", index_path.display())));
    }
    fs::create_dir_all(dir)?;
    if !norms_only {
        fs::create_dir_all(dir.join("coeffs"))?;
    }
    let mut entries = Vec::with_capacity(s.len());
    for (i, (path, coeff)) in s.outputs().iter().enumerate() {
        let file = if norms_only {
            None
        } else {
            let name = format!("coeffs/{i:06}.sctb");
            save_signal(&dir.join(&name), coeff)?;
            Some(name)
        };
        entries.push(DumpEntry { path: path.clone(), norm: l2_norm(coeff), file });
    }
    let index = DumpIndex {
        schema: DUMP_SCHEMA.to_string(),
        grid: s.grid().clone(),
        policy: s.policy().clone(),
        ledger: s.ledger().clone(),
        l2l2_norm: l2l2_norm(s),
        entries,
    };
    let tmp = dir.join("index.json.partial");
    fs::write(&tmp, serde_json::to_string_pretty(&index)?)?;
    fs::rename(&tmp, &index_path)?;
    Ok(index_path)
}

/// Coefficients listed by an index; `None` in norms-only dumps.
pub type DumpCoefficients = Vec<(Path, Option<Signal>)>;

/// Reads an index (path or directory) and every coefficient it references.
pub fn read_dump(path: &FsPath) -> Result<(DumpIndex, DumpCoefficients)> {
    let index_path = if path.is_dir() { path.join(INDEX_FILE) } else { path.to_path_buf() };
    let index: DumpIndex = serde_json::from_str(&fs::read_to_string(&index_path)?)?;
    if index.schema != DUMP_SCHEMA {
        return Err(Error::Format(format!("unknown dump schema `{}`", index.schema)));
    }
    let base = index_path.parent().unwrap_or(FsPath::new("."));
    let mut out = Vec::with_capacity(index.entries.len());
    for entry in &index.entries {
        let signal = match &entry.file {
            Some(file) => {
                let s = load_signal(&base.join(file))?;
                index.grid.ensure_same(s.grid(), file)?;
                Some(s)
            }
            None => None,
        };
        out.push((entry.path.clone(), signal));
    }
    Ok((index, out))
}
