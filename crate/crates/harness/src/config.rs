//! Flat `key = value` configuration files with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use translab::{Exponent, Exponent64};

use crate::builtins::{FunctionSpec, GroupSpec, MeasureSpec};
use crate::HarnessError;

/// A parse or validation problem, located by line and key where possible.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub msg: String,
}

impl ConfigError {
    pub fn at(line: usize, key: Option<&str>, msg: impl Into<String>) -> Self {
        Self { line: Some(line), key: key.map(str::to_owned), msg: msg.into() }
    }

    pub fn general(msg: impl Into<String>) -> Self {
        Self { line: None, key: None, msg: msg.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "key `{k}`: ")?;
        }
        f.write_str(&self.msg)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn insert(&mut self, key: &str, value: impl Into<String>) {
        self.insert_at(key, value, 0);
    }

    pub fn insert_at(&mut self, key: &str, value: impl Into<String>, line: usize) {
        self.entries.insert(key.to_owned(), Entry { value: value.into(), line });
    }

    /// Parses `key` with `FromStr`; absent keys give `None`.
    pub fn parse<V: FromStr>(&self, key: &str) -> Result<Option<V>, ConfigError>
    where
        V::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<V>()
                .map(Some)
                .map_err(|err| ConfigError::at(e.line, Some(key), format!("cannot parse `{}`: {err}", e.value))),
        }
    }

    pub fn parse_or<V: FromStr>(&self, key: &str, default: V) -> Result<V, ConfigError>
    where
        V::Err: fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(self.line, |e| e.line)
    }
}

/// A parsed configuration file. Keys before the first header belong to the
/// unnamed section `""`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    sections: Vec<Section>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections = vec![Section { name: String::new(), line: 0, entries: BTreeMap::new() }];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = strip_comment(raw).trim();
            if s.is_empty() {
                continue;
            }
            if let Some(rest) = s.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line, None, "unterminated section header"))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                    return Err(ConfigError::at(line, None, format!("bad section name `{name}`")));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(ConfigError::at(line, None, format!("section `{name}` defined twice")));
                }
                sections.push(Section { name: name.to_owned(), line, entries: BTreeMap::new() });
                continue;
            }
            let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::at(line, None, "expected `key = value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || !k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
                return Err(ConfigError::at(line, None, format!("bad key `{k}`")));
            }
            if v.is_empty() {
                return Err(ConfigError::at(line, Some(k), "empty value"));
            }
            let sec = sections.last_mut().expect("root section");
            if sec.entries.contains_key(k) {
                return Err(ConfigError::at(line, Some(k), "duplicate key"));
            }
            sec.entries.insert(k.to_owned(), Entry { value: v.to_owned(), line });
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::parse(&text)?)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn root(&self) -> &Section {
        &self.sections[0]
    }

    /// Named sections in file order.
    pub fn sections(&self) -> impl Iterator<Item = &Section> {
        self.sections.iter().skip(1)
    }
}

fn strip_comment(s: &str) -> &str {
    if s.trim_start().starts_with(';') {
        return "";
    }
    match s.find('#') {
        Some(i) => &s[..i],
        None => s,
    }
}

pub fn parse_exponent(s: &str) -> Result<Exponent64, String> {
    match s.trim() {
        "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
        v => {
            let p: f64 = v.parse().map_err(|e| format!("{e}"))?;
            Exponent::new(p).map_err(|e| e.to_string())
        }
    }
}

/// Grid of `samples` points on `[−half_length, half_length)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridConfig {
    pub half_length: f64,
    pub samples: usize,
}

impl fmt::Display for GridConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.half_length, self.samples)
    }
}

pub const EXPERIMENTS: [&str; 14] = [
    "partition",
    "fourier-homomorphism",
    "phillips-homomorphism",
    "cauchy-strip",
    "regularization",
    "kfunctional",
    "interp-inequality",
    "besov-equivalence",
    "factorization",
    "sharpness",
    "mikhlin-bound",
    "main-theorem",
    "pv-convergence",
    "sector-pullback",
];

const COMMON_KEYS: [&str; 14] = [
    "experiment",
    "group",
    "symbol",
    "matrix",
    "measure",
    "function",
    "half_length",
    "samples",
    "theta",
    "q",
    "p",
    "probes",
    "seed",
    "calibration",
];

/// Everything one experiment run needs.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub group: Option<GroupSpec>,
    pub measure: Option<MeasureSpec>,
    pub function: Option<FunctionSpec>,
    pub grid: Option<GridConfig>,
    pub theta: f64,
    pub q: Exponent64,
    pub p: Exponent64,
    pub probes: Option<usize>,
    pub seed: u64,
    /// `tol.<name> = value` entries.
    pub tolerances: BTreeMap<String, f64>,
    /// Remaining experiment-specific keys.
    pub params: BTreeMap<String, f64>,
    pub calibration: Option<std::path::PathBuf>,
    pub refine: u32,
}

impl ExperimentConfig {
    pub fn new(experiment: &str) -> Self {
        Self {
            experiment: experiment.to_owned(),
            group: None,
            measure: None,
            function: None,
            grid: None,
            theta: 0.5,
            q: Exponent::two(),
            p: Exponent::two(),
            probes: None,
            seed: 0,
            tolerances: BTreeMap::new(),
            params: BTreeMap::new(),
            calibration: None,
            refine: 0,
        }
    }

    /// Reads a section; the experiment name defaults to the section name.
    pub fn from_section(sec: &Section) -> Result<Self, ConfigError> {
        let name = match sec.get("experiment") {
            Some(e) => e.value.clone(),
            None => sec.name.clone(),
        };
        if !EXPERIMENTS.contains(&name.as_str()) {
            return Err(ConfigError::at(sec.line_of("experiment"), Some("experiment"), format!("unknown experiment `{name}`")));
        }
        Self::for_command(sec, &name)
    }

    /// Reads a section for a named command without checking the name.
    pub fn for_command(sec: &Section, name: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::new(name);
        cfg.group = GroupSpec::from_section(sec)?;
        if let Some(e) = sec.get("measure") {
            cfg.measure = Some(MeasureSpec::parse(&e.value).map_err(|m| ConfigError::at(e.line, Some("measure"), m))?);
        }
        if let Some(e) = sec.get("function") {
            cfg.function = Some(FunctionSpec::parse(&e.value).map_err(|m| ConfigError::at(e.line, Some("function"), m))?);
        }
        match (sec.parse::<f64>("half_length")?, sec.parse::<usize>("samples")?) {
            (Some(h), Some(n)) => {
                if !(h > 0.0) || n < 4 || !n.is_power_of_two() {
                    return Err(ConfigError::at(sec.line_of("samples"), Some("samples"), "need half_length > 0 and a power-of-two sample count ≥ 4"));
                }
                cfg.grid = Some(GridConfig { half_length: h, samples: n });
            }
            (None, None) => {}
            _ => return Err(ConfigError::at(sec.line, None, "half_length and samples must be given together")),
        }
        cfg.theta = sec.parse_or("theta", 0.5)?;
        if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
            return Err(ConfigError::at(sec.line_of("theta"), Some("theta"), "θ must lie in (0, 1)"));
        }
        for (key, slot) in [("q", &mut cfg.q), ("p", &mut cfg.p)] {
            if let Some(e) = sec.get(key) {
                *slot = parse_exponent(&e.value).map_err(|m| ConfigError::at(e.line, Some(key), m))?;
            }
        }
        if matches!(cfg.p, Exponent::Infinity) {
            return Err(ConfigError::at(sec.line_of("p"), Some("p"), "p must be finite"));
        }
        cfg.probes = sec.parse("probes")?;
        cfg.seed = sec.parse_or("seed", 0)?;
        cfg.calibration = sec.get("calibration").map(|e| e.value.clone().into());
        for key in sec.keys() {
            if COMMON_KEYS.contains(&key) {
                continue;
            }
            let v: f64 = sec.parse(key)?.expect("present");
            match key.strip_prefix("tol.") {
                Some(t) => {
                    cfg.tolerances.insert(t.to_owned(), v);
                }
                None => {
                    cfg.params.insert(key.to_owned(), v);
                }
            }
        }
        Ok(cfg)
    }

    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn param(&self, name: &str, default: f64) -> f64 {
        self.params.get(name).copied().unwrap_or(default)
    }

    pub fn probes_or(&self, default: usize) -> usize {
        self.probes.unwrap_or(default)
    }

    pub fn grid_or(&self, half_length: f64, samples: usize) -> GridConfig {
        self.grid.unwrap_or(GridConfig { half_length, samples })
    }
}

/// Experiment configs for every named section of a file.
pub fn experiments_from_file(file: &ConfigFile) -> Result<Vec<ExperimentConfig>, ConfigError> {
    file.sections().map(ExperimentConfig::from_section).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let f = ConfigFile::parse("seed = 3\n# note\n[sharpness]\ngroup = shift\nprobes = 4 # trailing\n").unwrap();
        assert_eq!(f.root().get("seed").unwrap().value, "3");
        let s = f.section("sharpness").unwrap();
        assert_eq!(s.parse::<usize>("probes").unwrap(), Some(4));
        assert_eq!(s.get("group").unwrap().line, 4);
    }

    #[test]
    fn diagnostics_carry_lines() {
        let e = ConfigFile::parse("[a]\nx = 1\nx = 2\n").unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(3), Some("x")));
        let e = ConfigFile::parse("[a]\njunk\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let f = ConfigFile::parse("[partition]\ntheta = 1.5\n").unwrap();
        let e = ExperimentConfig::from_section(f.section("partition").unwrap()).unwrap_err();
        assert_eq!((e.line, e.key.as_deref()), (Some(2), Some("theta")));
    }

    #[test]
    fn experiment_keys() {
        let f = ConfigFile::parse("[x]\nexperiment = sharpness\nq = inf\ntol.band = 0.1\nalpha = 0.25\n").unwrap();
        let c = ExperimentConfig::from_section(f.section("x").unwrap()).unwrap();
        assert_eq!(c.experiment, "sharpness");
        assert!(matches!(c.q, Exponent::Infinity));
        assert_eq!(c.tol("band", 0.0), 0.1);
        assert_eq!(c.param("alpha", 0.0), 0.25);
        let f = ConfigFile::parse("[nonsense]\n").unwrap();
        assert!(ExperimentConfig::from_section(f.section("nonsense").unwrap()).is_err());
    }
}
