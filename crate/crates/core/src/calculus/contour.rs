use num_traits::Float;
use rayon::prelude::*;

use super::phillips::group_type_bound;
use super::StripFunction;
use crate::groups::{GroupKind, GroupModel};
use crate::scalar::{cplx, czero, l2, l2_dist, Real, C};
use crate::{Error, Result};

/// Parameters of the boundary contour `Im z = ±ω′`.
#[derive(Clone, Copy, Debug)]
pub struct ContourOptions<T> {
    pub omega_prime: T,
    /// Trapezoid nodes per line.
    pub nodes: usize,
    /// Scale `L` of the substitution `x = L sinh u`; derived from the spectrum if unset.
    pub scale: Option<T>,
    /// Target for the tail bound, relative to `‖x‖`.
    pub tail_target: T,
}

impl<T: Real> ContourOptions<T> {
    pub fn new(omega_prime: T) -> Self {
        Self { omega_prime, nodes: 4096, scale: None, tail_target: T::of(1e-10) }
    }
}

#[derive(Clone, Debug)]
pub struct CauchyOutput<T> {
    pub value: Vec<C<T>>,
    /// Bound on the discarded part `|Re z| > truncation`, relative to `‖x‖`.
    pub tail_bound: T,
    pub truncation: T,
}

fn default_scale<T: Real>(g: &GroupModel<T>) -> T {
    match g.kind() {
        GroupKind::Shift { spec, .. } => spec.nyquist(),
        GroupKind::Multiplication { symbol, .. } => symbol.iter().fold(T::one(), |m, a| m.max(Float::abs(*a))),
        GroupKind::Matrix { a, .. } => match g.spectrum() {
            Some(s) => s.iter().fold(T::one(), |m, l| m.max(Float::abs(l.re))),
            None => T::one().max(a.norm_inf()),
        },
    }
}

fn axpy<T: Real>(acc: &mut [C<T>], c: C<T>, v: &[C<T>]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += c * *b;
    }
}

/// `f(A)x = (2πi)^{−1} ∮ f(z) R(z, A)x dz` over the positively oriented boundary
/// of `|Im z| < ω′`.
///
/// Each line is parametrized by `x = L sinh u` and integrated by the trapezoid
/// rule in `u`; the cut-off `T` is chosen from the sampled decay constant of
/// `f` and the sampled growth of `|z| ‖R(z)x‖` so that the discarded tails stay
/// below `tail_target`.
pub fn cauchy_strip<T: Real>(
    g: &GroupModel<T>,
    f: &StripFunction<T>,
    opts: &ContourOptions<T>,
    x: &[C<T>],
) -> Result<CauchyOutput<T>> {
    let alpha = f.decay_order().ok_or(Error::NotElementary)?;
    let w = opts.omega_prime;
    let theta = group_type_bound(g)?;
    if !(theta < w && w < f.width()) {
        return Err(Error::StripOrder { group_type: theta.as_f64(), contour: w.as_f64(), width: f.width().as_f64() });
    }
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: x.len() });
    }
    let xnorm = l2(x);
    if xnorm == T::zero() {
        return Ok(CauchyOutput { value: x.to_vec(), tail_bound: T::zero(), truncation: T::zero() });
    }
    let scale = opts.scale.unwrap_or_else(|| default_scale(g));
    let far = scale * T::of(1e8);
    let c = f.decay_constant(alpha, w, scale, far, 48);
    let mut rho = T::zero();
    for m in 0..12 {
        let r = scale * T::of(10f64.powf(m as f64 * 8.0 / 11.0));
        for z in [cplx(r, w), cplx(-r, w), cplx(r, -w), cplx(-r, -w)] {
            rho = rho.max(z.norm() * l2(&g.resolvent(z, x)?) / xnorm);
        }
    }
    // two lines, two ends each: (1/2π)·4·∫_T^∞ c ρ s^{−α−1} ds
    let tail_at = |t: T| T::of(2.0) * c * rho * t.powf(-alpha) / (T::PI() * alpha);
    let mut trunc = scale * T::of(10.0);
    let target = opts.tail_target;
    if tail_at(trunc) > target {
        trunc = (T::of(2.0) * c * rho / (T::PI() * alpha * target)).powf(T::one() / alpha);
    }
    let u_max = (trunc / scale).asinh();
    let n = opts.nodes.max(16);
    let du = (u_max + u_max) / T::of_usize(n - 1);
    let dim = x.len();
    // lower line runs left to right, upper line right to left
    let jobs: Vec<(usize, T)> = (0..n).flat_map(|j| [(j, -w), (j, w)]).collect();
    let chunk = (jobs.len() / 64).max(1);
    let partials: Vec<Result<Vec<C<T>>>> = jobs
        .par_chunks(chunk)
        .map(|block| {
            let mut acc = vec![czero(); dim];
            for &(j, y) in block {
                let u = -u_max + du * T::of_usize(j);
                let re = scale * u.sinh();
                let z = cplx(re, y);
                let weight = if j == 0 || j == n - 1 { T::of(0.5) } else { T::one() };
                let dir = if y < T::zero() { T::one() } else { -T::one() };
                let dz = scale * u.cosh() * du * weight * dir;
                let r = g.resolvent(z, x)?;
                axpy(&mut acc, f.eval(z) * dz, &r);
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![czero(); dim];
    for p in partials {
        axpy(&mut total, C::new(T::one(), T::zero()), &p?);
    }
    let factor = cplx(T::zero(), -T::one() / (T::PI() + T::PI()));
    total.iter_mut().for_each(|v| *v = *v * factor);
    Ok(CauchyOutput { value: total, tail_bound: tail_at(trunc), truncation: trunc })
}

/// Limit of `(f τ_k)(A)x` along a doubling schedule of `k`.
#[derive(Clone, Debug)]
pub struct RegularizedOutput<T> {
    /// Extrapolated `f(A)x`.
    pub value: Vec<C<T>>,
    pub ks: Vec<T>,
    /// Raw iterates `(f τ_k)(A)x`.
    pub iterates: Vec<Vec<C<T>>>,
    /// Relative change between consecutive extrapolated estimates.
    pub residuals: Vec<T>,
    pub tail_bound: T,
}

const ROMBERG_DEPTH: usize = 6;

/// `f(A)x` as the strong limit of `(f τ_k)(A)x`.
///
/// Starting from `k_schedule`, `k` keeps doubling up to `k_max` until two
/// consecutive Richardson estimates differ by less than `tol` relative. The
/// error of `(fτ_k)(a)` is a power series in `1/k`, so every column of the
/// tableau removes one order.
pub fn regularized_calculus<T: Real>(
    g: &GroupModel<T>,
    f: &StripFunction<T>,
    k_schedule: &[T],
    k_max: T,
    tol: T,
    opts: &ContourOptions<T>,
    x: &[C<T>],
) -> Result<RegularizedOutput<T>> {
    if k_schedule.is_empty() {
        return Err(Error::InvalidParameter("empty k schedule".into()));
    }
    if k_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("k schedule must increase".into()));
    }
    if k_schedule[0] <= opts.omega_prime {
        return Err(Error::StripOrder {
            group_type: opts.omega_prime.as_f64(),
            contour: k_schedule[0].as_f64(),
            width: f.width().as_f64(),
        });
    }
    let doubling = k_schedule.windows(2).all(|w| Float::abs(w[1] - w[0] - w[0]) <= T::of(1e-12) * w[1]);
    let mut ks = Vec::new();
    let mut iterates: Vec<Vec<C<T>>> = Vec::new();
    let mut tableau: Vec<Vec<Vec<C<T>>>> = Vec::new();
    let mut residuals = Vec::new();
    let mut tail = T::zero();
    let mut k_iter = k_schedule.to_vec().into_iter();
    let mut last_k = T::zero();
    loop {
        let k = match k_iter.next() {
            Some(k) => k,
            None if last_k + last_k <= k_max && doubling => last_k + last_k,
            None => break,
        };
        last_k = k;
        let fk = f.product(&StripFunction::tau(k));
        let out = cauchy_strip(g, &fk, opts, x)?;
        tail = tail.max(out.tail_bound);
        ks.push(k);
        iterates.push(out.value.clone());
        let mut row = vec![out.value];
        if doubling {
            if let Some(prev) = tableau.last() {
                for j in 1..=prev.len().min(ROMBERG_DEPTH) {
                    let p = T::of(2f64.powi(j as i32));
                    let next: Vec<C<T>> =
                        row[j - 1].iter().zip(&prev[j - 1]).map(|(a, b)| (*a * p - *b) / (p - T::one())).collect();
                    row.push(next);
                }
            }
        }
        let est = row.last().expect("nonempty row").clone();
        if let Some(prev) = tableau.last() {
            let prev_est = prev.last().expect("nonempty row");
            let r = l2_dist(&est, prev_est) / l2(&est).max(T::min_positive_value());
            residuals.push(r);
            if r < tol && k_iter.len() == 0 {
                tableau.push(row);
                return Ok(RegularizedOutput { value: est, ks, iterates, residuals, tail_bound: tail });
            }
        }
        tableau.push(row);
    }
    let last = residuals.last().copied().unwrap_or(T::infinity());
    if last < tol {
        let value = tableau.last().and_then(|r| r.last()).cloned().expect("at least one k");
        return Ok(RegularizedOutput { value, ks, iterates, residuals, tail_bound: tail });
    }
    Err(Error::NoConvergence(format!("regularized calculus stalled at relative change {last:e} > {tol:e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::CMatrix;
    use crate::scalar::Exponent;

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    fn diag_group(d: &[C<f64>]) -> GroupModel<f64> {
        GroupModel::matrix(CMatrix::from_diag(d), Exponent::two())
    }

    #[test]
    fn zero_generator_point_evaluation() {
        let g = GroupModel::matrix(CMatrix::<f64>::zeros(2), Exponent::two());
        let f = StripFunction::inv_shift_sq(c(0.0, 3.0));
        let x = vec![c(1.0, 0.0), c(0.5, -2.0)];
        let out = cauchy_strip(&g, &f, &ContourOptions::new(1.0), &x).unwrap();
        for (a, b) in out.value.iter().zip(&x) {
            assert!((a + b / 9.0).norm() < 1e-9, "{a} vs {}", -b / 9.0);
        }
        assert!(out.tail_bound <= 1e-8);
    }

    #[test]
    fn tau_equals_squared_resolvent_on_jordan_block() {
        let mut rows = vec![vec![0.0; 4]; 4];
        for i in 0..4 {
            rows[i][i] = 1.5;
            if i + 1 < 4 {
                rows[i][i + 1] = 1.0;
            }
        }
        let a = CMatrix::from_real_rows(&rows).unwrap();
        let g = GroupModel::matrix(a.clone(), Exponent::two());
        let k = 6.0;
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5), c(0.3, 0.3)];
        let out = cauchy_strip(&g, &StripFunction::tau(k), &ContourOptions::new(1.0), &x).unwrap();
        let ik = c(0.0, k);
        let r1 = g.resolvent(ik, &x).unwrap();
        let r2 = g.resolvent(ik, &r1).unwrap();
        let want: Vec<C<f64>> = r2.iter().map(|v| v * (-k * k)).collect();
        assert!(l2_dist(&out.value, &want) < 1e-8 * l2(&x), "{}", l2_dist(&out.value, &want));
    }

    #[test]
    fn ordering_errors() {
        let g = diag_group(&[c(0.0, 0.5)]);
        let x = vec![c(1.0, 0.0)];
        let e = cauchy_strip(&g, &StripFunction::tau(4.0), &ContourOptions::new(0.3), &x);
        assert!(matches!(e, Err(Error::StripOrder { .. })));
        let e = cauchy_strip(&g, &StripFunction::exp_i(1.0), &ContourOptions::new(1.0), &x);
        assert!(matches!(e, Err(Error::NotElementary)));
    }

    #[test]
    fn regularized_gaussian_limit() {
        let d = [c(-2.0, 0.0), c(0.5, 0.3), c(1.0, -0.4), c(3.0, 0.0)];
        let g = diag_group(&d);
        let x = vec![c(1.0, 0.0); 4];
        let f = StripFunction::gauss();
        let out = regularized_calculus(&g, &f, &[8.0, 16.0, 32.0, 64.0, 128.0], 2f64.powi(20), 1e-9, &ContourOptions::new(1.0), &x)
            .unwrap();
        for (j, l) in d.iter().enumerate() {
            let want = (-l * l).exp();
            assert!((out.value[j] - want).norm() < 1e-7, "{j}: {} vs {want}", out.value[j]);
        }
    }

    #[test]
    fn regularized_identity_tends_to_x() {
        let d = [c(-10.0, 0.0), c(4.0, 0.5), c(9.0, -0.5)];
        let g = diag_group(&d);
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)];
        let one = StripFunction::constant(c(1.0, 0.0));
        let out = regularized_calculus(&g, &one, &[16.0, 32.0, 64.0, 128.0], 2f64.powi(16), 1e-9, &ContourOptions::new(1.0), &x)
            .unwrap();
        assert!(l2_dist(&out.value, &x) < 1e-7);
        // the raw iterate at k obeys τ_k(a) = (1 + ia/k)^{−2}
        let last = out.iterates.len() - 1;
        let k = out.ks[last];
        for (j, l) in d.iter().enumerate() {
            let tau = (c(1.0, 0.0) + c(0.0, 1.0) * l / k).powi(-2);
            assert!((out.iterates[last][j] - tau * x[j]).norm() < 1e-8);
        }
    }
}
