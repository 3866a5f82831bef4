//! The full acceptance suite: default configuration, parallel execution and
//! calibration bookkeeping.

use std::path::Path;

use rayon::prelude::*;

use crate::calibration::{Calibration, CalibrationKey};
use crate::config::{ConfigFile, ExperimentConfig, Section, EXPERIMENTS};
use crate::experiments::{main_theorem_calibration_key, mikhlin_calibration_key, run_experiment, CALIBRATION_CASE};
use crate::report::ReportRow;
use crate::HarnessError;

/// The built-in suite configuration, one section per experiment.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.conf");

/// Copies root keys into a section unless it sets them itself.
pub fn with_root_defaults(file: &ConfigFile, sec: &Section) -> Section {
    let mut merged = sec.clone();
    let root = file.root();
    for key in root.keys() {
        if merged.get(key).is_none() {
            let e = root.get(key).expect("listed key");
            merged.insert_at(key, e.value.clone(), e.line);
        }
    }
    merged
}

/// Experiment configs of a suite file with root defaults applied.
pub fn suite_configs(file: &ConfigFile) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let mut out = Vec::new();
    for sec in file.sections() {
        out.push(ExperimentConfig::from_section(&with_root_defaults(file, sec))?);
    }
    Ok(out)
}

/// The default configs with a seed, refinement level and calibration path applied.
pub fn default_configs(seed: Option<u64>, refine: u32, calibration: Option<&Path>) -> Result<Vec<ExperimentConfig>, HarnessError> {
    let file = ConfigFile::parse(DEFAULT_CONFIG)?;
    let mut cfgs = suite_configs(&file)?;
    for c in &mut cfgs {
        if let Some(s) = seed {
            c.seed = s;
        }
        c.refine = refine;
        c.calibration = calibration.map(Path::to_path_buf);
    }
    Ok(cfgs)
}

#[derive(Clone, Debug)]
pub struct SuiteSummary {
    pub rows: Vec<ReportRow>,
    /// Experiments with at least one failing row, in suite order.
    pub failed: Vec<String>,
}

impl SuiteSummary {
    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn rows_of<'a>(&'a self, experiment: &'a str) -> impl Iterator<Item = &'a ReportRow> {
        self.rows.iter().filter(move |r| r.experiment == experiment)
    }
}

/// Runs the configs on the rayon pool; rows come back in config order.
pub fn run_suite(cfgs: &[ExperimentConfig]) -> Result<SuiteSummary, HarnessError> {
    for c in cfgs {
        if let Some(p) = &c.calibration {
            if p.exists() {
                Calibration::load(p)?;
            }
        }
    }
    let results: Vec<Result<Vec<ReportRow>, HarnessError>> = cfgs.par_iter().map(run_experiment).collect();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (c, r) in cfgs.iter().zip(results) {
        let r = r?;
        if r.iter().any(|row| !row.pass) {
            failed.push(c.experiment.clone());
        }
        rows.extend(r);
    }
    Ok(SuiteSummary { rows, failed })
}

/// Calibration keys and the `C_cal` each calibrated experiment reported.
pub fn calibrations(cfgs: &[ExperimentConfig], summary: &SuiteSummary) -> Vec<(CalibrationKey, f64)> {
    let mut out = Vec::new();
    for c in cfgs {
        let key = match c.experiment.as_str() {
            "mikhlin-bound" if c.measure.is_none() => mikhlin_calibration_key(c),
            "main-theorem" => main_theorem_calibration_key(c),
            _ => continue,
        };
        let found = summary.rows_of(&c.experiment).find(|r| r.case == CALIBRATION_CASE && r.refine == c.refine);
        if let Some(r) = found {
            out.push((key, r.lhs));
        }
    }
    out
}

/// Adds constants missing from the calibration file at `path`; stored ones are never replaced.
pub fn freeze_calibrations(path: &Path, found: &[(CalibrationKey, f64)]) -> Result<(), HarnessError> {
    let mut cal = if path.exists() { Calibration::load(path)? } else { Calibration::default() };
    let mut changed = false;
    for (key, c) in found {
        if cal.get(key)?.is_none() {
            cal.insert(key.clone(), *c);
            changed = true;
        }
    }
    if changed {
        cal.save(path)?;
    }
    Ok(())
}

/// Every experiment at the default grid and at one refinement above it.
pub fn suite_all(seed: Option<u64>, calibration: Option<&Path>) -> Result<SuiteSummary, HarnessError> {
    let mut cfgs = default_configs(seed, 0, calibration)?;
    cfgs.extend(default_configs(seed, 1, calibration)?);
    debug_assert_eq!(cfgs.len(), 2 * EXPERIMENTS.len());
    let summary = run_suite(&cfgs)?;
    if let Some(p) = calibration {
        freeze_calibrations(p, &calibrations(&cfgs, &summary))?;
    }
    Ok(summary)
}
