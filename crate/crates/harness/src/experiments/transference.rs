//! Factorization through the Bochner space, sharpness on translations, and
//! the Mikhlin-type bound for the measure calculus.

use std::path::Path;

use translab::besov::{mikhlin_norm, FrequencySearch, MultiplierSymbol};
use translab::calculus::phillips;
use translab::transfer::{embedding_bounds, factorization_check, transference_check, TransferMode, TransferenceOptions};
use translab::scalar::cplx;
use translab::{CMatrix64, GridSpec64, GroupModel64, Measure64, TransferKernels64};

use super::{exponent_label, stored_calibration, tgrid, Rows, CALIBRATION_CASE};
use crate::calibration::CalibrationKey;
use crate::config::ExperimentConfig;
use crate::random::{self, mikhlin_measure, similar_group};
use crate::report::{Check, ReportRow};
use crate::HarnessError;

fn bounded_kernels(cfg: &ExperimentConfig) -> Result<TransferKernels64, HarnessError> {
    let n = cfg.param("support", 2.0);
    let alpha = cfg.param("alpha", n / 4.0);
    let beta = cfg.param("beta", n / 4.0);
    let half = cfg.param("kernel_half_length", 4.0 * n);
    let samples = cfg.param("kernel_samples", 1024.0) as usize;
    Ok(TransferKernels64::bounded(n, alpha, beta, GridSpec64::scalar(half, samples)?)?)
}

pub fn factorization(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "factorization";
    let probes = cfg.probes_or(3);
    let tol = cfg.tol("factorization", 1e-5);
    let k = bounded_kernels(cfg)?;
    let n = cfg.param("support", 2.0);
    let state = GridSpec64::scalar(8.0, 64 << cfg.refine)?;
    let mut rng = random::rng(cfg.seed, 700);
    let mut rows = Vec::new();
    let d = k.diagnostics();
    rows.push(ReportRow::residual(EXP, "bounded/kernel_identity", d.identity_defect, 1.0, 1e-6, cfg.refine));

    let groups: Vec<(&str, GroupModel64, Measure64)> = vec![
        ("bounded/shift", GroupModel64::shift(state, cfg.p), random::measure(&mut rng, 1.0 / 64.0, n, true)),
        (
            "bounded/mult",
            GroupModel64::multiplication(state, |t| 2.0 * (0.5 * t).sin(), cfg.p),
            random::measure(&mut rng, 1.0 / 64.0, n, true),
        ),
        ("bounded/matrix", similar_group(&mut rng, 4, 2.0, cfg.p), Measure64::gaussian(0.2, n, 1.0 / 128.0)?),
    ];
    for (i, (name, g, mu)) in groups.iter().enumerate() {
        let r = factorization_check(&k, g, mu, probes, cfg.seed.wrapping_add(i as u64))?;
        rows.push(ReportRow::residual(EXP, *name, r.max_residual, 1.0, tol, cfg.refine));
    }

    // Hölder bounds for ι and P on the bounded matrix group
    let (_, g, _) = &groups[2];
    let m_hat = (-40..=40).map(|j| g.group_norm(f64::from(j) * 0.25).map(|e| e.upper)).try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    let x = g.random_state(&mut rng);
    let e = embedding_bounds(&k, g, &x, cfg.p, m_hat, 0.0)?;
    for (name, (measured, bound)) in
        [("iota", e.iota), ("projection", e.projection), ("iota_sobolev", e.iota_sobolev), ("projection_sobolev", e.projection_sobolev)]
    {
        rows.push(ReportRow::bound(EXP, format!("bounded/matrix/{name}"), measured, bound, 1e-6, cfg.refine));
    }

    let omega = cfg.param("omega", 1.0);
    let ku = TransferKernels64::unbounded(omega, 2.0 * omega, GridSpec64::scalar(64.0, 4096)?)?;
    let gu = GroupModel64::matrix(
        CMatrix64::from_diag(&[cplx(0.3, 0.5), cplx(-1.0, -0.5), cplx(2.0, 0.0), cplx(0.7, 0.2)]),
        cfg.p,
    );
    let est = gu.estimate_group_type(10.0, 41)?;
    rows.push(ReportRow::info(EXP, "unbounded/theta_hat", est.theta_hat, 0.5, cfg.refine));
    let mu = Measure64::gaussian(0.3, 3.0, 1.0 / 64.0)?;
    let r = factorization_check(&ku, &gu, &mu, probes, cfg.seed)?;
    rows.push(ReportRow::residual(EXP, "unbounded/matrix", r.max_residual, 1.0, tol, cfg.refine));
    Ok(rows)
}

pub fn sharpness(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "sharpness";
    let count = cfg.param("measures", 20.0) as usize;
    let k = bounded_kernels(cfg)?;
    let n = cfg.param("support", 2.0);
    let spec = GridSpec64::scalar(8.0, 128 << cfg.refine)?;
    let g = GroupModel64::shift(spec, cfg.p);
    let opts = TransferenceOptions { theta: cfg.theta, q: cfg.q, p: cfg.p, probes: cfg.probes_or(4), seed: cfg.seed, norm_probes: 64 };
    let band = Check::Band { lower: cfg.param("lower", 0.8) };
    let mut rows = Vec::new();
    for i in 0..count {
        let mut rng = random::rng(cfg.seed, 800 + i as u64);
        let mu = random::measure(&mut rng, 1.0 / 64.0, n, true);
        let r = transference_check(&k, &g, &mu, &opts)?;
        let case = format!("measure{i}{}", if r.reflected { "/reflected" } else { "" });
        rows.push(ReportRow::new(EXP, case, band, r.max_ratio, 1.0, cfg.tol("upper", 0.05), cfg.refine));
    }
    Ok(rows)
}

/// `transfer-check`: per-probe `lhs, rhs, ratio` for one group and measure,
/// with `max ratio ≤ C_cal·M_hat²` as the pass rule.
pub fn transfer_rows(
    cfg: &ExperimentConfig,
    unbounded: bool,
    c_cal: f64,
) -> Result<(Vec<ReportRow>, f64), HarnessError> {
    const EXP: &str = "transfer-check";
    let spec = super::grid_spec(cfg.grid_or(8.0, 128), cfg.refine)?;
    let group = cfg.group.clone().unwrap_or(crate::builtins::GroupSpec::Shift);
    let g = group.build(spec, cfg.p)?;
    let k = if unbounded {
        let omega = cfg.param("omega", 1.0);
        TransferKernels64::unbounded(omega, cfg.param("alpha", 2.0 * omega), GridSpec64::scalar(64.0, 4096)?)?
    } else {
        bounded_kernels(cfg)?
    };
    let mu = match &cfg.measure {
        Some(m) => m.build()?,
        None => {
            let mut rng = random::rng(cfg.seed, 850);
            let support = match k.mode() {
                TransferMode::Bounded { n, .. } => n,
                TransferMode::Unbounded { .. } => 3.0,
            };
            random::measure(&mut rng, 1.0 / 64.0, support, true)
        }
    };
    let m_hat = match g.kind() {
        translab::groups::GroupKind::Matrix { .. } => g.estimate_group_type(10.0, 41)?.m_hat,
        _ => 1.0,
    };
    let opts = TransferenceOptions { theta: cfg.theta, q: cfg.q, p: cfg.p, probes: cfg.probes_or(8), seed: cfg.seed, norm_probes: 64 };
    let r = transference_check(&k, &g, &mu, &opts)?;
    let limit = c_cal * m_hat * m_hat;
    let rows = r
        .rows
        .iter()
        .enumerate()
        .map(|(i, p)| ReportRow::bound(EXP, format!("probe{i}"), p.lhs, p.rhs * limit, 0.0, cfg.refine))
        .collect();
    Ok((rows, r.max_ratio))
}

struct MikhlinCase {
    ratios: Vec<f64>,
    lhs: Vec<f64>,
    scale: Vec<f64>,
}

/// Per-probe `‖U_μx‖_{θ,q}` and `M_hat² N ‖x‖_{θ,q}` for the measures of one suite.
fn mikhlin_suite(
    cfg: &ExperimentConfig,
    groups: &[(GroupModel64, f64)],
    measures: &[Measure64],
    level: u32,
) -> Result<Vec<MikhlinCase>, HarnessError> {
    let probes = cfg.probes_or(5);
    let search = FrequencySearch { linear: 4001 << level, log: 400 << level, ..FrequencySearch::default() };
    let mut out = Vec::with_capacity(measures.len());
    for (i, mu) in measures.iter().enumerate() {
        let (g, m_hat) = &groups[i % groups.len()];
        let mut couple = g.couple();
        couple.tgrid = tgrid(level);
        let n_m = mikhlin_norm(&MultiplierSymbol::from_measure(mu), &search)?;
        let mut rng = random::rng(cfg.seed, 950 + i as u64);
        let mut case = MikhlinCase { ratios: vec![], lhs: vec![], scale: vec![] };
        for _ in 0..probes {
            let x = g.random_state(&mut rng);
            let lhs = g.interp_norm(&couple, &phillips(g, mu, &x)?, cfg.theta, cfg.q)?;
            let scale = m_hat * m_hat * n_m * g.interp_norm(&couple, &x, cfg.theta, cfg.q)?;
            case.ratios.push(lhs / scale);
            case.lhs.push(lhs);
            case.scale.push(scale);
        }
        out.push(case);
    }
    Ok(out)
}

fn sup_group_norm(g: &GroupModel64) -> Result<f64, HarnessError> {
    let mut m = 0.0f64;
    for j in -80..=80 {
        m = m.max(g.group_norm(f64::from(j) * 0.125)?.upper);
    }
    Ok(m)
}

pub fn mikhlin_calibration_key(cfg: &ExperimentConfig) -> CalibrationKey {
    CalibrationKey {
        experiment: "mikhlin-bound".into(),
        theta: cfg.theta,
        q: exponent_label(cfg.q),
        p: exponent_label(cfg.p),
        grid: format!("matrix{}", cfg.param("dim", 4.0)),
    }
}

pub fn mikhlin_bound(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "mikhlin-bound";
    let dim = cfg.param("dim", 4.0) as usize;
    let h = cfg.param("h", 1.0 / 32.0);
    let support = cfg.param("support", 4.0);
    let mut grng = random::rng(cfg.seed, 900);
    let groups: Vec<(GroupModel64, f64)> = (0..2)
        .map(|_| {
            let g = similar_group(&mut grng, dim, 3.0, cfg.p);
            let m = sup_group_norm(&g)?;
            Ok((g, m))
        })
        .collect::<Result<_, HarnessError>>()?;
    let mut rows = Vec::new();
    for (i, (_, m)) in groups.iter().enumerate() {
        rows.push(ReportRow::info(EXP, format!("group{i}/m_hat"), *m, 1.0, cfg.refine));
    }

    let draw = |stream: u64, count: usize, level: u32| -> Vec<Measure64> {
        (0..count)
            .map(|i| {
                let mut rng = random::rng(cfg.seed, stream + i as u64);
                mikhlin_measure(&mut rng, h / f64::from(1u32 << level), support)
            })
            .collect()
    };

    if let Some(spec) = &cfg.measure {
        // a single configured measure, checked against the constant-free bound
        let mu = spec.build()?;
        for (i, c) in mikhlin_suite(cfg, &groups, &[mu], cfg.refine)?.iter().enumerate() {
            for (j, (l, s)) in c.lhs.iter().zip(&c.scale).enumerate() {
                rows.push(ReportRow::bound(EXP, format!("configured{i}/probe{j}"), *l, *s, 1e-9, cfg.refine));
            }
        }
        return Ok(rows);
    }

    let key = mikhlin_calibration_key(cfg);
    let c_cal = match stored_calibration(cfg.calibration.as_deref().map(Path::new), &key)? {
        Some(c) => c,
        None => {
            let cal = mikhlin_suite(cfg, &groups, &draw(10_000, cfg.param("calibration_measures", 40.0) as usize, cfg.refine), cfg.refine)?;
            2.0 * cal.iter().flat_map(|c| c.ratios.iter().copied()).fold(0.0, f64::max)
        }
    };
    rows.push(ReportRow::info(EXP, CALIBRATION_CASE, c_cal, 1.0, cfg.refine));

    let count = cfg.param("measures", 20.0) as usize;
    let mut maxima = Vec::new();
    for level in [cfg.refine, cfg.refine + 1] {
        let suite = mikhlin_suite(cfg, &groups, &draw(20_000, count, level), level)?;
        let mut worst = 0.0f64;
        for (i, c) in suite.iter().enumerate() {
            for (j, (l, s)) in c.lhs.iter().zip(&c.scale).enumerate() {
                rows.push(ReportRow::bound(EXP, format!("measure{i}/probe{j}"), *l, c_cal * s, 0.0, level));
                worst = worst.max(l / s);
            }
        }
        rows.push(ReportRow::info(EXP, "max_ratio", worst, 1.0, level));
        maxima.push(worst);
    }
    rows.push(ReportRow::residual(EXP, "stability", (maxima[1] - maxima[0]).abs(), maxima[0], cfg.tol("stability", 0.2), cfg.refine + 1));
    Ok(rows)
}
