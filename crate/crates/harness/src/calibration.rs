//! Frozen calibration constants, one per experiment and `(θ, q, p, grid)`.
//!
//! ```text
//! [mikhlin-bound]
//! theta = 0.5
//! q = 2
//! p = 2
//! grid = 8x128
//! c_cal = 1.75
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{ConfigError, ConfigFile};
use crate::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationKey {
    pub experiment: String,
    pub theta: f64,
    pub q: String,
    pub p: String,
    pub grid: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Calibration {
    entries: Vec<(CalibrationKey, f64)>,
}

const FIELDS: [&str; 5] = ["theta", "q", "p", "grid", "c_cal"];

impl Calibration {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let file = ConfigFile::parse(text)?;
        if let Some(k) = file.root().keys().next() {
            let line = file.root().get(k).map_or(0, |e| e.line);
            return Err(ConfigError::at(line, Some(k), "calibration entries must sit inside a section"));
        }
        let mut entries = Vec::new();
        for sec in file.sections() {
            for k in sec.keys() {
                if !FIELDS.contains(&k) {
                    return Err(ConfigError::at(sec.get(k).map_or(sec.line, |e| e.line), Some(k), "unknown calibration field"));
                }
            }
            let text_field = |k: &str| {
                sec.get(k).map(|e| e.value.clone()).ok_or_else(|| ConfigError::at(sec.line, Some(k), format!("section `{}` lacks `{k}`", sec.name)))
            };
            let theta: f64 = sec.parse("theta")?.ok_or_else(|| ConfigError::at(sec.line, Some("theta"), "missing"))?;
            let c: f64 = sec.parse("c_cal")?.ok_or_else(|| ConfigError::at(sec.line, Some("c_cal"), "missing"))?;
            if !(c.is_finite() && c > 0.0) {
                return Err(ConfigError::at(sec.get("c_cal").map_or(sec.line, |e| e.line), Some("c_cal"), "must be a positive finite number"));
            }
            let key = CalibrationKey { experiment: sec.name.clone(), theta, q: text_field("q")?, p: text_field("p")?, grid: text_field("grid")? };
            entries.push((key, c));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text)?)
    }

    /// The stored constant for `key`; an entry for the same experiment made
    /// under different parameters is an error rather than a miss.
    pub fn get(&self, key: &CalibrationKey) -> Result<Option<f64>, ConfigError> {
        match self.entries.iter().find(|(k, _)| k.experiment == key.experiment) {
            None => Ok(None),
            Some((k, c)) if k == key => Ok(Some(*c)),
            Some((k, _)) => Err(ConfigError::general(format!(
                "calibration for `{}` was made at θ={}, q={}, p={}, grid={} but the run uses θ={}, q={}, p={}, grid={}",
                k.experiment, k.theta, k.q, k.p, k.grid, key.theta, key.q, key.p, key.grid
            ))),
        }
    }

    pub fn insert(&mut self, key: CalibrationKey, c: f64) {
        self.entries.retain(|(k, _)| k.experiment != key.experiment);
        self.entries.push((key, c));
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, c) in &self.entries {
            let _ = writeln!(s, "[{}]\ntheta = {}\nq = {}\np = {}\ngrid = {}\nc_cal = {:.12e}\n", k.experiment, k.theta, k.q, k.p, k.grid, c);
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> CalibrationKey {
        CalibrationKey { experiment: "mikhlin-bound".into(), theta: 0.5, q: "2".into(), p: "2".into(), grid: "8x128".into() }
    }

    #[test]
    fn round_trip() {
        let mut c = Calibration::default();
        c.insert(key(), 1.75);
        let back = Calibration::parse(&c.to_text()).unwrap();
        assert_eq!(back.get(&key()).unwrap(), Some(1.75));
        let other = CalibrationKey { theta: 0.25, ..key() };
        assert!(back.get(&other).is_err());
    }

    #[test]
    fn corrupted_files() {
        assert!(Calibration::parse("[mikhlin-bound]\ntheta = 0.5\nq = 2\np = 2\ngrid = 8x128\nc_cal = oops\n").is_err());
        assert!(Calibration::parse("c_cal = 1\n").is_err());
        assert!(Calibration::parse("[x]\ntheta = 0.5\n").is_err());
        assert!(Calibration::parse("[x\n").is_err());
        assert!(Calibration::parse("[x]\ntheta = 0.5\nq = 2\np = 2\ngrid = g\nc_cal = -1\n").is_err());
    }
}
