//! K-functionals, the interpolation inequality and the Besov comparison.

use translab::besov::besov_norm;
use translab::groups::random_band_limited;
use translab::interp::{random_vector, LinearOp, Norm};
use translab::scalar::{cplx, l2};
use translab::{Exponent, Exponent64, GroupModel64, InterpCouple64, C64};

use super::{grid_spec, tgrid, Rows};
use crate::config::ExperimentConfig;
use crate::random::{self, spectrum, uniform};
use crate::report::ReportRow;

/// Largest violation of monotonicity and of concavity in `t` of tabulated `K`.
fn shape_violation(ts: &[f64], ks: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..ts.len() {
        worst = worst.max(ks[i - 1] - ks[i]);
    }
    for i in 1..ts.len() - 1 {
        let w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
        let chord = ks[i - 1] + w * (ks[i + 1] - ks[i - 1]);
        worst = worst.max(chord - ks[i]);
    }
    worst
}

pub fn kfunctional(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "kfunctional";
    let n = cfg.param("dim", 8.0) as usize;
    let probes = cfg.probes_or(4);
    let two = Exponent::two();
    let mut rng = random::rng(cfg.seed, 400);
    let mut rows = Vec::new();

    let mut same = InterpCouple64::new(n, Norm::lp(two), Norm::lp(two));
    same.tgrid = tgrid(cfg.refine);
    for j in 0..probes {
        let z = random_vector::<f64>(&mut rng, n);
        let got = same.interp_norm(&z, 0.5, two)?;
        let want = 2f64.sqrt() * l2(&z);
        rows.push(ReportRow::residual(EXP, format!("xx/probe{j}"), (got - want).abs(), want, cfg.tol("xx", 1e-3), cfg.refine));
    }

    let a: Vec<C64> = (0..n).map(|_| cplx(uniform(&mut rng, -5.0, 5.0), 0.0)).collect();
    let l1 = InterpCouple64::domain(n, Norm::lp(Exponent::one()), LinearOp::diagonal(a.clone()));
    let ts = [1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0, 1e3];
    for j in 0..probes {
        let z = random_vector::<f64>(&mut rng, n);
        for &t in &ts {
            let got = l1.k_functional(&z, t)?;
            let want: f64 = z.iter().zip(&a).map(|(v, aj)| (t * (1.0 + aj.norm())).min(1.0) * v.norm()).sum();
            rows.push(ReportRow::residual(EXP, format!("l1diag/probe{j}/t={t}"), (got - want).abs(), want, cfg.tol("l1", 1e-4), cfg.refine));
        }
    }

    let b = spectrum(&mut rng, n, 5.0, 0.5);
    let l2dom = InterpCouple64::domain(n, Norm::lp(two), LinearOp::diagonal(b));
    let grid: Vec<f64> = (0..=40).map(|i| 10f64.powf(-4.0 + 8.0 * f64::from(i) / 40.0)).collect();
    for (name, couple) in [("l1diag", &l1), ("l2domain", &l2dom)] {
        for j in 0..probes {
            let z = random_vector::<f64>(&mut rng, n);
            let ks: Vec<f64> = grid.iter().map(|t| couple.k_functional(&z, *t)).collect::<Result<_, _>>()?;
            let scale = ks.iter().fold(0.0f64, |m, k| m.max(*k));
            rows.push(ReportRow::residual(EXP, format!("{name}/shape{j}"), shape_violation(&grid, &ks).max(0.0), scale, cfg.tol("shape", 1e-6), cfg.refine));
        }
    }
    Ok(rows)
}

pub fn interp_inequality(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "interp-inequality";
    let models = cfg.param("models", 10.0) as usize;
    let probes = cfg.probes_or(10);
    let n = cfg.param("dim", 8.0) as usize;
    let tol = cfg.tol("inequality", 1e-6);
    let pairs: [(f64, Exponent64); 3] = [(0.5, Exponent::two()), (0.3, Exponent::one()), (0.7, Exponent::Infinity)];
    let mut rows = Vec::new();
    for m in 0..models {
        let mut rng = random::rng(cfg.seed, 500 + m as u64);
        let a = spectrum(&mut rng, n, 5.0, 0.5);
        let sign = if rng_bit(&mut rng) { 1.0 } else { -1.0 };
        let lambda = cplx(uniform(&mut rng, -3.0, 3.0), sign * uniform(&mut rng, 1.0, 3.0));
        let mut couple = InterpCouple64::domain(n, Norm::lp(cfg.p), LinearOp::diagonal(a.clone()));
        couple.tgrid = tgrid(cfg.refine);
        let r: Vec<C64> = a.iter().map(|aj| (lambda - *aj).inv()).collect();
        let apply = |z: &[C64]| -> Vec<C64> { z.iter().zip(&r).map(|(v, w)| *v * *w).collect() };
        // the resolvent commutes with A, so its D(A) norm is at most its X norm
        let b_x = r.iter().fold(0.0f64, |acc, w| acc.max(w.norm()));
        let b_y = b_x;
        for j in 0..probes {
            let z = random_vector::<f64>(&mut rng, n);
            let tz = apply(&z);
            for (theta, q) in pairs {
                let lhs = couple.interp_norm(&tz, theta, q)?;
                let rhs = b_x.powf(1.0 - theta) * b_y.powf(theta) * couple.interp_norm(&z, theta, q)?;
                let case = format!("model{m}/probe{j}/theta={theta}/q={}", super::exponent_label(q));
                rows.push(ReportRow::bound(EXP, case, lhs, rhs, tol, cfg.refine));
            }
        }
    }
    Ok(rows)
}

fn rng_bit(rng: &mut rand_chacha::ChaCha8Rng) -> bool {
    uniform(rng, 0.0, 1.0) < 0.5
}

/// Ratios `interp_norm / besov_norm` over random band-limited functions at one grid level.
fn besov_ratios(cfg: &ExperimentConfig, level: u32, count: usize) -> Result<Vec<f64>, crate::HarnessError> {
    let spec = grid_spec(cfg.grid_or(16.0, 256), level)?;
    let g = GroupModel64::shift(spec, cfg.p);
    let mut couple = g.couple();
    couple.tgrid = tgrid(0);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = random::rng(cfg.seed, 600 + i as u64);
        let f = random_band_limited(&mut rng, &spec, 0.5 * spec.nyquist());
        let num = g.interp_norm(&couple, f.values(), cfg.theta, cfg.q)?;
        let den = besov_norm(&f, cfg.theta, cfg.p, cfg.q);
        out.push(num / den);
    }
    Ok(out)
}

pub fn besov_equivalence(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "besov-equivalence";
    let count = cfg.probes_or(50);
    let tol = cfg.tol("stability", 0.2);
    let mut rows = Vec::new();
    let mut ends = Vec::new();
    for level in [cfg.refine, cfg.refine + 1] {
        let ratios = besov_ratios(cfg, level, count)?;
        for (i, r) in ratios.iter().enumerate() {
            rows.push(ReportRow::info(EXP, format!("f{i}"), *r, 1.0, level));
        }
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(0.0, f64::max);
        let c_eq = hi.max(1.0 / lo);
        rows.push(ReportRow::info(EXP, "interval", lo, hi, level));
        rows.push(ReportRow::info(EXP, "c_eq", c_eq, 1.0, level));
        ends.push((lo, hi));
    }
    let ((lo0, hi0), (lo1, hi1)) = (ends[0], ends[1]);
    rows.push(ReportRow::residual(EXP, "stability/lower", (lo1 - lo0).abs(), lo0, tol, cfg.refine + 1));
    rows.push(ReportRow::residual(EXP, "stability/upper", (hi1 - hi0).abs(), hi0, tol, cfg.refine + 1));
    Ok(rows)
}
