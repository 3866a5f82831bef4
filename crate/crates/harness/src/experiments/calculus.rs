//! The strip calculus on interpolation spaces, principal values, and sectors.

use std::f64::consts::PI;
use std::path::Path;

use translab::calculus::{cauchy_strip, hinf1_norm, hlog_norm, pv_group_integral, regularized_calculus, sector_pullback as pullback, ContourOptions, HinfSampling};
use translab::quad::sine_integral;
use translab::scalar::{cis, cplx, czero};
use translab::{CMatrix64, GridFunction64, GroupModel64, SectorFunction64, StripFunction64, C64};

use super::{exponent_label, grid_spec, stored_calibration, tgrid, Rows, CALIBRATION_CASE};
use crate::builtins::{FunctionSpec, GroupSpec};
use crate::calibration::CalibrationKey;
use crate::config::ExperimentConfig;
use crate::random::{self, jordan_matrix, similar_group, uniform};
use crate::report::ReportRow;
use crate::HarnessError;

fn contour(level: u32) -> ContourOptions<f64> {
    let mut o = ContourOptions::new(1.0);
    o.nodes <<= level;
    o
}

fn sampling(level: u32) -> HinfSampling<f64> {
    let base = HinfSampling::default();
    HinfSampling { linear: ((base.linear - 1) << level) + 1, log: base.log << level, ..base }
}

/// The matrix of `f(A)`, column by column; functions without decay go
/// through the regularized limit.
fn function_matrix(g: &GroupModel64, f: &StripFunction64, level: u32) -> Result<CMatrix64, HarnessError> {
    let n = g.dim();
    let opts = contour(level);
    let schedule: Vec<f64> = (3..=7).map(|e| f64::from(1u32 << e)).collect();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![czero(); n];
        e[j] = cplx(1.0, 0.0);
        let col = if f.decay_order().is_some() {
            cauchy_strip(g, f, &opts, &e)?.value
        } else {
            regularized_calculus(g, f, &schedule, 1048576.0, 1e-10, &opts, &e)?.value
        };
        cols.push(col);
    }
    let rows: Vec<Vec<C64>> = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok(CMatrix64::from_rows(&rows)?)
}

fn theorem_functions() -> Vec<StripFunction64> {
    vec![StripFunction64::tau(4.0), StripFunction64::inv_shift(cplx(0.0, 2.0)), StripFunction64::gauss()]
}

fn real_sup(f: &StripFunction64) -> f64 {
    (0..=4000).map(|i| f.eval(cplx(-50.0 + 0.025 * f64::from(i), 0.0)).norm()).fold(0.0, f64::max)
}

struct TheoremProbe {
    case: String,
    lhs: f64,
    scale: f64,
}

/// Per-probe `‖f(A)x‖_{θ,q}` and `‖f‖_{H∞₁(St_ω)}‖x‖_{θ,q}`, plus
/// `(‖f(A)‖_X, sup_ℝ |f|)` per group and function.
fn theorem_suite(
    cfg: &ExperimentConfig,
    groups: &[GroupModel64],
    omega: f64,
    level: u32,
    tag: &str,
) -> Result<(Vec<TheoremProbe>, Vec<(String, f64, f64)>), HarnessError> {
    let probes = cfg.probes_or(5);
    let mut out = Vec::new();
    let mut content = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        let mut couple = g.couple();
        couple.tgrid = tgrid(level);
        for f in theorem_functions() {
            let fa = function_matrix(g, &f, level)?;
            let norm = hinf1_norm(&f, omega, &sampling(level))?
                .value
                .finite()
                .ok_or_else(|| HarnessError::from(format!("{} is not in H∞₁ of the strip {omega}", f.name())))?;
            content.push((format!("{tag}{gi}/{}", f.name()), fa.operator_norm(cfg.p).upper, real_sup(&f)));
            let mut rng = random::rng(cfg.seed, 1500 + gi as u64);
            for j in 0..probes {
                let x = g.random_state(&mut rng);
                let lhs = g.interp_norm(&couple, &fa.mul_vec(&x), cfg.theta, cfg.q)?;
                let scale = norm * g.interp_norm(&couple, &x, cfg.theta, cfg.q)?;
                out.push(TheoremProbe { case: format!("{tag}{gi}/{}/probe{j}", f.name()), lhs, scale });
            }
        }
    }
    Ok((out, content))
}

fn jordan_groups(cfg: &ExperimentConfig, stream: u64, count: usize) -> Vec<GroupModel64> {
    let mut rng = random::rng(cfg.seed, stream);
    (0..count)
        .map(|_| {
            let a = cplx(uniform(&mut rng, -1.5, 1.5), 0.0);
            let b = cplx(uniform(&mut rng, -1.5, 1.5), 0.0);
            GroupModel64::matrix(jordan_matrix(&[(4, a), (4, b)]), cfg.p)
        })
        .collect()
}

fn max_ratio(probes: &[TheoremProbe]) -> f64 {
    probes.iter().map(|p| p.lhs / p.scale).fold(0.0, f64::max)
}

pub fn main_theorem_calibration_key(cfg: &ExperimentConfig) -> CalibrationKey {
    CalibrationKey {
        experiment: "main-theorem".into(),
        theta: cfg.theta,
        q: exponent_label(cfg.q),
        p: exponent_label(cfg.p),
        grid: format!("jordan8/omega={}", cfg.param("omega", 0.5)),
    }
}

pub fn main_theorem(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "main-theorem";
    let omega = cfg.param("omega", 0.5);
    let mut rows = Vec::new();

    let key = main_theorem_calibration_key(cfg);
    let c_cal = match stored_calibration(cfg.calibration.as_deref().map(Path::new), &key)? {
        Some(c) => c,
        None => {
            let (cal, _) = theorem_suite(cfg, &jordan_groups(cfg, 1100, 2), omega, cfg.refine, "calibration")?;
            2.0 * max_ratio(&cal)
        }
    };
    rows.push(ReportRow::info(EXP, CALIBRATION_CASE, c_cal, 1.0, cfg.refine));

    let groups = jordan_groups(cfg, 1200, cfg.param("groups", 3.0) as usize);
    let mut maxima = Vec::new();
    for level in [cfg.refine, cfg.refine + 1] {
        let (probes, content) = theorem_suite(cfg, &groups, omega, level, "jordan")?;
        if level == cfg.refine {
            for (case, op, sup) in content {
                rows.push(ReportRow::info(EXP, format!("{case}/norm_vs_sup"), op, sup, level));
            }
        }
        for p in &probes {
            rows.push(ReportRow::bound(EXP, p.case.clone(), p.lhs, c_cal * p.scale, 0.0, level));
        }
        let m = max_ratio(&probes);
        rows.push(ReportRow::info(EXP, "max_ratio", m, 1.0, level));
        maxima.push(m);
    }
    rows.push(ReportRow::residual(EXP, "stability", (maxima[1] - maxima[0]).abs(), maxima[0], cfg.tol("stability", 0.2), cfg.refine + 1));

    let bounded: Vec<GroupModel64> = {
        let mut rng = random::rng(cfg.seed, 1300);
        (0..2).map(|_| similar_group(&mut rng, 4, 1.5, cfg.p)).collect()
    };
    let mut per_omega = Vec::new();
    for w in [0.1, 0.5, 1.0] {
        let (probes, _) = theorem_suite(cfg, &bounded, w, cfg.refine, "bounded")?;
        let c = 2.0 * max_ratio(&probes);
        rows.push(ReportRow::info(EXP, format!("bounded/c_cal/omega={w}"), c, 1.0, cfg.refine));
        per_omega.push(c);
    }
    let lo = per_omega.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = per_omega.iter().copied().fold(0.0, f64::max);
    rows.push(ReportRow::residual(EXP, "bounded/omega_spread", hi - lo, lo, cfg.tol("omega_spread", 0.25), cfg.refine));
    Ok(rows)
}

/// `calculus-bound`: one function and one group; rows compare `‖f(A)x‖_{θ,q}`
/// with `C_cal‖f‖_{H∞₁(St_ω)}‖x‖_{θ,q}` when a calibration is stored.
pub fn calculus_bound_rows(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "calculus-bound";
    let f = cfg.function.clone().unwrap_or(FunctionSpec::TauK(4.0)).strip()?;
    let omega = cfg.param("omega", 0.5);
    let group = cfg.group.clone().unwrap_or(GroupSpec::Matrix(crate::builtins::parse_matrix("jordan(4, 0)")?));
    let g = group.build(grid_spec(cfg.grid_or(8.0, 64), cfg.refine)?, cfg.p)?;
    let GroupSpec::Matrix(_) = group else {
        return Err(HarnessError::from("calculus-bound needs `group = matrix`".to_owned()));
    };
    let c_cal = stored_calibration(cfg.calibration.as_deref().map(Path::new), &main_theorem_calibration_key(cfg))?;
    let fa = function_matrix(&g, &f, cfg.refine)?;
    let hinf = hinf1_norm(&f, omega, &sampling(cfg.refine))?;
    let norm = hinf.value.finite().ok_or_else(|| HarnessError::from(format!("{} is unbounded on the strip", f.name())))?;
    let mut couple = g.couple();
    couple.tgrid = tgrid(cfg.refine);
    let mut rng = random::rng(cfg.seed, 1600);
    let mut rows = vec![ReportRow::info(EXP, "hinf1_norm", norm, 1.0, cfg.refine)];
    for j in 0..cfg.probes_or(5) {
        let x = g.random_state(&mut rng);
        let lhs = g.interp_norm(&couple, &fa.mul_vec(&x), cfg.theta, cfg.q)?;
        let scale = norm * g.interp_norm(&couple, &x, cfg.theta, cfg.q)?;
        rows.push(match c_cal {
            Some(c) => ReportRow::bound(EXP, format!("probe{j}"), lhs, c * scale, 0.0, cfg.refine),
            None => ReportRow::info(EXP, format!("probe{j}"), lhs, scale, cfg.refine),
        });
    }
    Ok(rows)
}

const PV_EPS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

pub fn pv_convergence(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "pv-convergence";
    let spec = grid_spec(cfg.grid_or(8.0 * PI, 256), cfg.refine)?;
    let g = GroupModel64::shift(spec, cfg.p);
    let tol = cfg.tol("oracle", 1e-4);
    let mut rows = Vec::new();
    for m in [1usize, 3, 8, 20, 40] {
        let m = m << cfg.refine;
        let xi = spec.frequency(m);
        let x = GridFunction64::from_scalar_fn(spec, |t| cis(xi * t))?;
        let r = pv_group_integral(&g, |_| 1.0, x.values(), &PV_EPS)?;
        let sym = cplx(0.0, 2.0 * sine_integral(xi));
        let err = r.limit.iter().zip(x.values()).map(|(a, b)| (a - b * sym).norm()).fold(0.0, f64::max);
        rows.push(ReportRow::residual(EXP, format!("xi={xi:.6}/oracle"), err, 1.0, tol, cfg.refine));
        let slowest = r.contraction.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(ReportRow::bound(EXP, format!("xi={xi:.6}/contraction"), 2.0, slowest, 0.0, cfg.refine));
    }
    Ok(rows)
}

/// `pv-check`: partial integrals of the configured group with weight
/// `const(c)` or `gauss` on a random state.
pub fn pv_rows(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "pv-check";
    let spec = grid_spec(cfg.grid_or(8.0 * PI, 256), cfg.refine)?;
    let g = cfg.group.clone().unwrap_or(GroupSpec::Shift).build(spec, cfg.p)?;
    let weight: Box<dyn Fn(f64) -> f64> = match cfg.function.clone().unwrap_or(FunctionSpec::Const(cplx(1.0, 0.0))) {
        FunctionSpec::Const(c) => Box::new(move |_| c.re),
        FunctionSpec::Gauss => Box::new(|s: f64| (-s * s).exp()),
        other => return Err(HarnessError::from(format!("pv-check needs an even real weight (const or gauss), got {other:?}"))),
    };
    let mut rng = random::rng(cfg.seed, 1700);
    let x = g.random_state(&mut rng);
    let r = pv_group_integral(&g, weight, &x, &PV_EPS)?;
    let mut rows = Vec::new();
    for (i, res) in r.residuals.iter().enumerate() {
        rows.push(ReportRow::info(EXP, format!("eps={:e}", PV_EPS[i + 1]), *res, translab::scalar::l2(&x), cfg.refine));
    }
    for (i, c) in r.contraction.iter().enumerate() {
        rows.push(ReportRow::bound(EXP, format!("contraction{}", i + 1), 2.0, *c, 0.0, cfg.refine));
    }
    Ok(rows)
}

fn sector_suite() -> Vec<SectorFunction64> {
    let c = |v: &[f64]| v.iter().map(|x| cplx(*x, 0.0)).collect::<Vec<C64>>();
    [
        (&[1.0][..], &[1.0, 1.0][..]),
        (&[0.0, 1.0], &[1.0, 1.0]),
        (&[0.0, 1.0], &[1.0, 2.0, 1.0]),
        (&[1.0, 2.0], &[2.0, 1.0]),
        (&[1.0, 0.0, 1.0], &[2.0, 3.0, 1.0]),
    ]
    .iter()
    .map(|(n, d)| SectorFunction64::rational(c(n), c(d)).expect("nonzero denominators"))
    .collect()
}

pub fn sector_pullback(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "sector-pullback";
    let psi = cfg.param("psi", 2.0);
    let s = sampling(cfg.refine);
    let fs: Vec<SectorFunction64> = match &cfg.function {
        Some(spec) => vec![spec.sector().ok_or_else(|| HarnessError::from("sector-pullback needs `function = sector_rational(…)`".to_owned()))??.0],
        None => sector_suite(),
    };
    let mut rows = Vec::new();
    for f in &fs {
        let log_norm = hlog_norm(f, psi, &s)?.value;
        let strip_norm = hinf1_norm(&pullback(f, psi)?, psi, &s)?.value;
        match (log_norm.finite(), strip_norm.finite()) {
            (Some(a), Some(b)) => rows.push(ReportRow::residual(EXP, f.name().to_owned(), (a - b).abs(), b.max(1.0), cfg.tol("isometry", 1e-3), cfg.refine)),
            _ => rows.push(ReportRow::residual(EXP, f.name().to_owned(), f64::INFINITY, 1.0, 0.0, cfg.refine)),
        }
    }
    Ok(rows)
}
