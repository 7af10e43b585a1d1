//! `verify` subcommands: independent seeded trials, one JSON file each, a CSV
//! summary and an aggregate report.

use std::fs;
use std::path::Path;

use anyhow::Result;
use rayon::prelude::*;
use scatterbench::framekit::{build_coherent_sequence, CoherentSequence, FilterBank};
use scatterbench::sigkit::generate::band_limited_noise;
use scatterbench::sigkit::Grid;
use scatterbench::verify::ensemble::{random_path, random_shift, random_steps, trial_seed};
use scatterbench::verify::{
    check_energy_conservation, check_energy_decay, check_nonexpansive, check_propagator_translation_commutes,
    check_translation_bound, sweep_corollary, REPORT_SCHEMA,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::write_atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    TranslationBound,
    Sweep,
    Nonexpansive,
    Conservation,
    Decay,
    Commute,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::TranslationBound => "translation-bound",
            Check::Sweep => "sweep",
            Check::Nonexpansive => "nonexpansive",
            Check::Conservation => "conservation",
            Check::Decay => "decay",
            Check::Commute => "commute",
        }
    }

    fn header(self, cfg: &RunConfig) -> Vec<String> {
        let cols: &[&str] = match self {
            Check::TranslationBound => &[
                "trial",
                "seed",
                "shift_norm",
                "support_radius",
                "lhs",
                "rhs_linear",
                "rhs_cap",
                "rhs",
                "ratio",
                "gradient_envelope",
                "pass",
            ],
            Check::Sweep => &["trial", "seed", "scale", "support_radius", "lhs", "rhs_linear", "rhs", "ratio", "pass"],
            Check::Nonexpansive => &["trial", "seed", "distance", "bound", "ratio", "pass"],
            Check::Conservation => &["trial", "seed", "max_residual", "final_gap", "input_energy", "pass"],
            Check::Decay => &["trial", "seed", "fitted_ratio", "budget"],
            Check::Commute => &["trial", "seed", "depth", "shift_steps", "max_deviation", "pass"],
        };
        let mut h: Vec<String> = cols.iter().map(|s| s.to_string()).collect();
        if self == Check::Decay {
            h.extend((0..=cfg.k_max).map(|k| format!("e_{k}")));
            h.push("pass".into());
        }
        h
    }

    fn default_trials(self) -> usize {
        if self == Check::Sweep {
            1
        } else {
            100
        }
    }
}

/// Bank or sequence shared by every trial.
enum Subject {
    Bank(FilterBank),
    Sequence(CoherentSequence),
}

struct Trial {
    seed: u64,
    pass: bool,
    report: Value,
    rows: Vec<Vec<String>>,
}

fn cell(x: impl ToString) -> String {
    x.to_string()
}

fn to_value(r: &impl Serialize) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn run_trial(
    check: Check,
    cfg: &RunConfig,
    grid: &Grid,
    subject: &Subject,
    index: usize,
) -> scatterbench::Result<Trial> {
    let seed = trial_seed(cfg.seed, index as u64);
    let policy = cfg.policy();
    let f = band_limited_noise(grid, cfg.band_fraction, seed)?;
    let shift = || match &cfg.shift {
        Some(c) => Ok(c.clone()),
        None => random_shift(grid, seed, cfg.shift_range[0], cfg.shift_range[1]),
    };
    let t = index.to_string();
    let (pass, report, rows) = match (check, subject) {
        (Check::TranslationBound, Subject::Bank(bank)) => {
            let r = check_translation_bound(&f, &shift()?, bank, &policy, seed)?;
            let envelope = r.gradient_envelope.map(cell).unwrap_or_default();
            let row = vec![
                t,
                cell(seed),
                cell(r.shift_norm),
                cell(r.support_radius),
                cell(r.lhs),
                cell(r.rhs_linear),
                cell(r.rhs_cap),
                cell(r.rhs),
                cell(r.ratio),
                envelope,
                cell(r.pass),
            ];
            (r.pass, to_value(&r), vec![row])
        }
        (Check::Sweep, Subject::Sequence(seq)) => {
            let r = sweep_corollary(seq, &f, &shift()?, &policy, seed)?;
            let rows = r
                .rows
                .iter()
                .map(|row| {
                    vec![
                        t.clone(),
                        cell(seed),
                        cell(row.scale),
                        cell(row.support_radius),
                        cell(row.lhs),
                        cell(row.rhs_linear),
                        cell(row.rhs),
                        cell(row.ratio),
                        cell(row.pass),
                    ]
                })
                .collect();
            (r.pass, to_value(&r), rows)
        }
        (Check::Nonexpansive, Subject::Bank(bank)) => {
            let g = band_limited_noise(grid, cfg.band_fraction, trial_seed(seed, 1))?;
            let r = check_nonexpansive(&f, &g, bank, &policy)?;
            let row = vec![t, cell(seed), cell(r.distance), cell(r.bound), cell(r.ratio), cell(r.pass)];
            (r.pass, to_value(&r), vec![row])
        }
        (Check::Conservation, Subject::Bank(bank)) => {
            let r = check_energy_conservation(&f, bank, cfg.max_depth)?;
            let gap = r.s_norm_gaps.last().copied().unwrap_or(0.0);
            let row = vec![t, cell(seed), cell(r.max_residual), cell(gap), cell(r.input_energy), cell(r.pass)];
            (r.pass, to_value(&r), vec![row])
        }
        (Check::Decay, Subject::Bank(bank)) => {
            let r = check_energy_decay(&f, bank, cfg.k_max)?;
            let mut row = vec![t, cell(seed), cell(r.fitted_ratio), cell(r.budget)];
            row.extend(r.layer_energies.iter().map(cell));
            row.push(cell(r.pass));
            (r.pass, to_value(&r), vec![row])
        }
        (Check::Commute, Subject::Bank(bank)) => {
            let path = random_path(bank, seed, cfg.max_depth)?;
            let steps = random_steps(grid, seed, cfg.commute_max_steps);
            let r = check_propagator_translation_commutes(&f, bank, &path, &steps)?;
            let shown: Vec<String> = steps.iter().map(|s| s.to_string()).collect();
            let row = vec![t, cell(seed), cell(path.depth()), shown.join(" "), cell(r.max_deviation), cell(r.pass)];
            (r.pass, to_value(&r), vec![row])
        }
        _ => unreachable!("subject matches the check"),
    };
    Ok(Trial { seed, pass, report, rows })
}

fn build_subject(check: Check, cfg: &RunConfig, grid: &Grid) -> Result<Subject> {
    Ok(match check {
        Check::Sweep => {
            let [lo, hi] = cfg.scale_range;
            Subject::Sequence(build_coherent_sequence(grid, &cfg.coherent_family()?, lo..=hi)?)
        }
        _ => Subject::Bank(cfg.bank()?),
    })
}

fn write_report(out: &Path, report: &Value) -> Result<()> {
    write_atomic(&out.join("report.json"), serde_json::to_string_pretty(report)?.as_bytes())
}

/// Runs the trials of one check and writes all outputs under `out`.
/// Returns whether every trial passed.
pub fn run_verify(check: Check, mut cfg: RunConfig, out: &Path, force: bool) -> Result<bool> {
    if out.join("report.json").exists() && !force {
        return Err(scatterbench::Error::Refused(format!(
            "{} already holds a report; pass --force to overwrite",
            out.display()
        ))
        .into());
    }
    let trials = *cfg.trials.get_or_insert(check.default_trials());
    cfg.prune_threshold.get_or_insert(0.0);
    let grid = cfg.grid()?;
    fs::create_dir_all(out.join("trials"))?;
    let command = format!("verify {}", check.name());

    let outcome = build_subject(check, &cfg, &grid).and_then(|subject| {
        let results: Vec<scatterbench::Result<Trial>> =
            (0..trials).into_par_iter().map(|i| run_trial(check, &cfg, &grid, &subject, i)).collect();
        Ok(results.into_iter().collect::<scatterbench::Result<Vec<Trial>>>()?)
    });
    let trials = match outcome {
        Ok(t) => t,
        Err(e) => {
            let refused = e.downcast_ref::<scatterbench::Error>().is_some_and(|e| e.is_refusal());
            let report = json!({
                "schema": REPORT_SCHEMA,
                "command": command,
                "status": if refused { "refused" } else { "error" },
                "message": format!("{e:#}"),
                "config": cfg,
            });
            write_report(out, &report)?;
            return Err(e);
        }
    };

    for (i, trial) in trials.iter().enumerate() {
        let doc = json!({
            "schema": REPORT_SCHEMA,
            "command": command,
            "trial": i,
            "seed": trial.seed,
            "pass": trial.pass,
            "report": trial.report,
        });
        write_atomic(&out.join("trials").join(format!("{i:06}.json")), serde_json::to_string_pretty(&doc)?.as_bytes())?;
    }
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(check.header(&cfg))?;
    for row in trials.iter().flat_map(|t| &t.rows) {
        csv.write_record(row)?;
    }
    write_atomic(&out.join("summary.csv"), &csv.into_inner()?)?;

    let passed = trials.iter().filter(|t| t.pass).count();
    let pass = passed == trials.len();
    let max_ratio = trials
        .iter()
        .filter_map(|t| t.report.get("ratio").and_then(Value::as_f64))
        .fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    let report = json!({
        "schema": REPORT_SCHEMA,
        "command": command,
        "status": if pass { "pass" } else { "fail" },
        "config": cfg,
        "trials": trials.len(),
        "passed": passed,
        "failed": trials.len() - passed,
        "max_ratio": max_ratio,
    });
    write_report(out, &report)?;
    println!("{command}: {passed}/{} trials passed", trials.len());
    Ok(pass)
}
