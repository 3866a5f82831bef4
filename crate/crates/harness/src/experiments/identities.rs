//! Exact identities: partition of unity, Fourier and Phillips homomorphisms,
//! Cauchy integrals against closed forms, and regularization.

use translab::besov::DyadicPartition;
use translab::calculus::{cauchy_strip as cauchy, phillips, regularized_calculus, ContourOptions};
use translab::interp::random_vector;
use translab::scalar::{cplx, l2, l2_dist};
use translab::{CMatrix64, Exponent, GroupModel64, Measure64, StripFunction64, C64};

use super::{grid_spec, Rows};
use crate::config::ExperimentConfig;
use crate::random::{self, diagonal_group, jordan_matrix, spectrum};
use crate::report::ReportRow;
use crate::HarnessError;

pub fn partition(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "partition";
    let grid = cfg.grid_or(64.0, 4096);
    let tol = cfg.tol("unity", 1e-10);
    let mut rows = Vec::new();
    for level in [cfg.refine, cfg.refine + 1] {
        let spec = grid_spec(grid, level)?;
        let defect = DyadicPartition::new(&spec).unity_defect();
        rows.push(ReportRow::residual(EXP, format!("grid={}x{}", spec.half_length(), spec.len()), defect, 1.0, tol, level));
    }
    Ok(rows)
}

pub fn fourier_homomorphism(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "fourier-homomorphism";
    let pairs = cfg.probes_or(50);
    let h = cfg.param("h", 1.0 / 32.0) / f64::from(1u32 << cfg.refine);
    let bound = cfg.param("support", 4.0);
    let xi_max = cfg.param("xi_max", 10.0);
    let points = cfg.param("points", 201.0) as usize;
    let tol = cfg.tol("relative", 1e-6);
    let xis: Vec<f64> = (0..points).map(|i| -xi_max + 2.0 * xi_max * i as f64 / (points - 1) as f64).collect();
    let mut rows = Vec::with_capacity(pairs);
    for i in 0..pairs {
        let mut rng = random::rng(cfg.seed, i as u64);
        let mu = random::measure(&mut rng, h, bound, true);
        let nu = random::measure(&mut rng, h, bound, true);
        let conv = mu.convolve(&nu)?;
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for &xi in &xis {
            let z = cplx(xi, 0.0);
            let prod = mu.fourier(z)? * nu.fourier(z)?;
            diff = diff.max((conv.fourier(z)? - prod).norm());
            scale = scale.max(prod.norm());
        }
        rows.push(ReportRow::residual(EXP, format!("pair{i}"), diff, scale, tol, cfg.refine));
    }
    Ok(rows)
}

pub fn phillips_homomorphism(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "phillips-homomorphism";
    let models = cfg.probes_or(10);
    let dim = cfg.param("dim", 16.0) as usize;
    let h = cfg.param("h", 1.0 / 32.0) / f64::from(1u32 << cfg.refine);
    let tol = cfg.tol("homomorphism", 1e-6);
    let tol_gauss = cfg.tol("gaussian", 1e-8);
    let gauss = Measure64::gaussian(1.0, 12.0, 0.05 / f64::from(1u32 << cfg.refine))?;
    let mut rows = Vec::new();
    for i in 0..models {
        let mut rng = random::rng(cfg.seed, 100 + i as u64);
        let values = spectrum(&mut rng, dim, 3.0, 0.3);
        let g = diagonal_group(&values, cfg.p);
        let mu = random::measure(&mut rng, h, 2.0, true);
        let nu = random::measure(&mut rng, h, 2.0, true);
        let x = random_vector::<f64>(&mut rng, dim);
        let lhs = phillips(&g, &mu.convolve(&nu)?, &x)?;
        let rhs = phillips(&g, &mu, &phillips(&g, &nu, &x)?)?;
        rows.push(ReportRow::residual(EXP, format!("model{i}/product"), l2_dist(&lhs, &rhs), l2(&x), tol, cfg.refine));
        let heat = phillips(&g, &gauss, &x)?;
        let want: Vec<C64> = x.iter().zip(&values).map(|(v, a)| *v * (-(*a * *a) / 2.0).exp()).collect();
        rows.push(ReportRow::residual(EXP, format!("model{i}/gaussian"), l2_dist(&heat, &want), l2(&x), tol_gauss, cfg.refine));
    }
    Ok(rows)
}

/// `c(λ − A)^{−2}x` by two solves.
fn resolvent_square(a: &CMatrix64, lambda: C64, c: C64, x: &[C64]) -> Result<Vec<C64>, HarnessError> {
    let m = a.shifted(lambda);
    let y = m.solve(&m.solve(x)?)?;
    Ok(y.into_iter().map(|v| v * c).collect())
}

pub fn cauchy_strip(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "cauchy-strip";
    let k = cfg.param("k", 4.0);
    let omega_prime = cfg.param("omega_prime", 1.5);
    let probes = cfg.probes_or(2);
    let tol = cfg.tol("residual", 1e-6);
    let tol_tail = cfg.tol("tail", 1e-8);
    let mut opts = ContourOptions::new(omega_prime);
    opts.nodes <<= cfg.refine;
    let mut rng = random::rng(cfg.seed, 200);
    let diag = spectrum(&mut rng, 8, 5.0, 0.5);
    let blocks = spectrum(&mut rng, 2, 3.0, 0.5);
    let cases: Vec<(&str, CMatrix64)> =
        vec![("diagonal", CMatrix64::from_diag(&diag)), ("jordan", jordan_matrix(&[(4, blocks[0]), (4, blocks[1])]))];
    let functions: Vec<(StripFunction64, C64, C64)> = vec![
        (StripFunction64::tau(k), cplx(0.0, k), cplx(-k * k, 0.0)),
        (StripFunction64::inv_shift_sq(cplx(0.0, 3.0)), cplx(0.0, 3.0), cplx(1.0, 0.0)),
    ];
    let mut rows = Vec::new();
    for (name, a) in cases {
        let g = GroupModel64::matrix(a.clone(), cfg.p);
        for (f, lambda, c) in &functions {
            for j in 0..probes {
                let x = random_vector::<f64>(&mut rng, 8);
                let out = cauchy(&g, f, &opts, &x)?;
                let want = resolvent_square(&a, *lambda, *c, &x)?;
                let case = format!("{name}/{}/probe{j}", f.name());
                rows.push(ReportRow::residual(EXP, case.clone(), l2_dist(&out.value, &want), l2(&x), tol, cfg.refine));
                rows.push(ReportRow::residual(EXP, format!("{case}/tail"), out.tail_bound, 1.0, tol_tail, cfg.refine));
            }
        }
    }
    Ok(rows)
}

pub fn regularization(cfg: &ExperimentConfig) -> Rows {
    const EXP: &str = "regularization";
    let dim = cfg.param("dim", 16.0) as usize;
    let k = cfg.param("k", 128.0);
    let tol_identity = cfg.tol("identity", 1e-4);
    let tol_limit = cfg.tol("limit", 1e-5);
    let mut opts = ContourOptions::new(cfg.param("omega_prime", 1.0));
    opts.nodes <<= cfg.refine;
    let mut rng = random::rng(cfg.seed, 300);
    let values = spectrum(&mut rng, dim, 10.0, 0.5);
    let g = diagonal_group(&values, Exponent::two());
    let x = random_vector::<f64>(&mut rng, dim);
    let xn = l2(&x);
    let mut rows = Vec::new();

    // τ_k(a) = (1 + ia/k)^{−2}, so ‖τ_k(A)x − x‖ is of order 2 max|a|/k
    let tau = StripFunction64::tau(k);
    let out = cauchy(&g, &tau, &opts, &x)?;
    let exact: Vec<C64> = x.iter().zip(&values).map(|(v, a)| *v * tau.eval(*a)).collect();
    rows.push(ReportRow::residual(EXP, format!("tau_{k}/identity"), l2_dist(&out.value, &x), xn, tol_identity, cfg.refine));
    rows.push(ReportRow::residual(EXP, format!("tau_{k}/oracle"), l2_dist(&out.value, &exact), xn, 1e-6, cfg.refine));

    let gauss = StripFunction64::gauss();
    let schedule: Vec<f64> = (3..=7).map(|e| f64::from(1u32 << e)).collect();
    let reg = regularized_calculus(&g, &gauss, &schedule, cfg.param("k_max", 1048576.0), cfg.tol("romberg", 1e-9), &opts, &x)?;
    let want: Vec<C64> = x.iter().zip(&values).map(|(v, a)| *v * (-(*a * *a)).exp()).collect();
    rows.push(ReportRow::residual(EXP, "gauss/limit", l2_dist(&reg.value, &want), xn, tol_limit, cfg.refine));
    let last = reg.ks.last().copied().unwrap_or(0.0);
    rows.push(ReportRow::info(EXP, "gauss/k_final", last, reg.ks.len() as f64, cfg.refine));
    Ok(rows)
}
