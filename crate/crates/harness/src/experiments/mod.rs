//! One function per acceptance experiment; [`run_experiment`] dispatches on the name.

mod calculus;
mod identities;
mod interpolation;
mod transference;

use std::path::Path;

use translab::interp::TGrid;
use translab::{Exponent, Exponent64, GridSpec64};

use crate::calibration::{Calibration, CalibrationKey};
use crate::config::{ExperimentConfig, GridConfig};
use crate::report::ReportRow;
use crate::HarnessError;

pub use calculus::{calculus_bound_rows, main_theorem, main_theorem_calibration_key, pv_convergence, pv_rows, sector_pullback};
pub use identities::{cauchy_strip, fourier_homomorphism, partition, phillips_homomorphism, regularization};
pub use interpolation::{besov_equivalence, interp_inequality, kfunctional};
pub use transference::{factorization, mikhlin_bound, mikhlin_calibration_key, sharpness, transfer_rows};

pub type Rows = Result<Vec<ReportRow>, HarnessError>;

pub fn run_experiment(cfg: &ExperimentConfig) -> Rows {
    match cfg.experiment.as_str() {
        "partition" => partition(cfg),
        "fourier-homomorphism" => fourier_homomorphism(cfg),
        "phillips-homomorphism" => phillips_homomorphism(cfg),
        "cauchy-strip" => cauchy_strip(cfg),
        "regularization" => regularization(cfg),
        "kfunctional" => kfunctional(cfg),
        "interp-inequality" => interp_inequality(cfg),
        "besov-equivalence" => besov_equivalence(cfg),
        "factorization" => factorization(cfg),
        "sharpness" => sharpness(cfg),
        "mikhlin-bound" => mikhlin_bound(cfg),
        "main-theorem" => main_theorem(cfg),
        "pv-convergence" => pv_convergence(cfg),
        "sector-pullback" => sector_pullback(cfg),
        other => Err(crate::ConfigError::general(format!("unknown experiment `{other}`")).into()),
    }
}

pub(crate) fn grid_spec(g: GridConfig, level: u32) -> Result<GridSpec64, HarnessError> {
    Ok(GridSpec64::scalar(g.half_length, g.samples)?.refine(level))
}

pub(crate) fn exponent_label(p: Exponent64) -> String {
    match p {
        Exponent::Infinity => "inf".into(),
        Exponent::Finite(v) => format!("{v}"),
    }
}

/// `t`-grid of the interpolation quadrature at a refinement level.
pub(crate) fn tgrid(level: u32) -> TGrid {
    let base = TGrid::default();
    TGrid { per_octave: base.per_octave << level, ..base }
}

/// The stored constant for `key` if a calibration file is configured and has one.
pub(crate) fn stored_calibration(path: Option<&Path>, key: &CalibrationKey) -> Result<Option<f64>, HarnessError> {
    match path {
        Some(p) if p.exists() => Ok(Calibration::load(p)?.get(key)?),
        _ => Ok(None),
    }
}

/// Name of the info row that carries a calibration constant.
pub const CALIBRATION_CASE: &str = "c_cal";
