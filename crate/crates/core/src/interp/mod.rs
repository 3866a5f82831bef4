//! Real interpolation between two norms on `ℂ^n`: K-functionals, the
//! `(θ, q)` norms and the interpolation inequality.

mod norms;
mod solver;

pub use norms::{LinearOp, Norm, NormTerm};
pub use solver::{conjugate_gradient, SolverOptions, Splitting};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{cplx, Exponent, Real, C};
use crate::{Error, Result};

/// Log-uniform grid `t = 2^{i/per_octave}`, `|i| ≤ octaves·per_octave`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TGrid {
    pub octaves: u32,
    pub per_octave: u32,
}

impl Default for TGrid {
    fn default() -> Self {
        Self { octaves: 20, per_octave: 8 }
    }
}

impl TGrid {
    pub fn nodes<T: Real>(&self) -> Vec<T> {
        let m = (self.octaves * self.per_octave) as i64;
        (-m..=m).map(|i| T::of(2f64.powf(i as f64 / self.per_octave as f64))).collect()
    }
}

/// Two norms on one vector space.
#[derive(Clone, Debug)]
pub struct InterpCouple<T> {
    dim: usize,
    x: Norm<T>,
    y: Norm<T>,
    y_dominates_x: bool,
    pub options: SolverOptions<T>,
    pub tgrid: TGrid,
}

impl<T: Real> InterpCouple<T> {
    pub fn new(dim: usize, x: Norm<T>, y: Norm<T>) -> Self {
        Self { dim, x, y, y_dominates_x: false, options: SolverOptions::default(), tgrid: TGrid::default() }
    }

    /// `(X, D(A))` with `‖y‖_{D(A)} = ‖y‖_X + ‖Ay‖_X`.
    pub fn domain(dim: usize, x: Norm<T>, a: LinearOp<T>) -> Self {
        let y = Norm::graph(&x, a);
        let mut c = Self::new(dim, x, y);
        c.y_dominates_x = true;
        c
    }

    /// Declares `‖·‖_X ≤ ‖·‖_Y`, so that `K(t, z) = ‖z‖_X` for every `t ≥ 1`.
    pub fn with_y_dominating(mut self, flag: bool) -> Self {
        self.y_dominates_x = flag;
        self
    }

    pub fn with_options(mut self, options: SolverOptions<T>) -> Self {
        self.options = options;
        self
    }

    pub fn with_tgrid(mut self, tgrid: TGrid) -> Self {
        self.tgrid = tgrid;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm_x(&self, v: &[C<T>]) -> T {
        self.x.eval(v)
    }

    pub fn norm_y(&self, v: &[C<T>]) -> T {
        self.y.eval(v)
    }

    fn check(&self, z: &[C<T>]) -> Result<()> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.len() });
        }
        Ok(())
    }

    /// Best splitting for a single `t`.
    pub fn split(&self, z: &[C<T>], t: T, warm: Option<&[C<T>]>) -> Result<Splitting<T>> {
        self.check(z)?;
        if !(t > T::zero()) {
            return Err(Error::InvalidParameter(format!("K-functional needs t > 0, got {t}")));
        }
        solver::solve(&self.x, &self.y, z, t, warm, &self.options)
    }

    /// `K(t, z) = inf_{x+y=z} ‖x‖_X + t‖y‖_Y`.
    pub fn k_functional(&self, z: &[C<T>], t: T) -> Result<T> {
        if self.y_dominates_x && t >= T::one() {
            self.check(z)?;
            return Ok(self.norm_x(z));
        }
        Ok(self.split(z, t, None)?.value(t))
    }

    /// `K(t_i, z)` on increasing nodes.
    ///
    /// Every splitting found at any node bounds `K` at all nodes, so the result
    /// is the lower envelope of the lines `t ↦ ‖z−y‖_X + t‖y‖_Y`; it is concave,
    /// nondecreasing and never above `min(‖z‖_X, t‖z‖_Y)`.
    pub fn k_profile(&self, z: &[C<T>], ts: &[T]) -> Result<Vec<T>> {
        self.check(z)?;
        let mut lines: Vec<(T, T)> = vec![(self.norm_x(z), T::zero()), (T::zero(), self.norm_y(z))];
        let mut warm: Option<Vec<C<T>>> = None;
        for &t in ts {
            if self.y_dominates_x && t >= T::one() {
                continue;
            }
            let s = self.split(z, t, warm.as_deref())?;
            lines.push((s.x_part, s.y_part));
            warm = Some(s.y);
        }
        Ok(ts.iter().map(|&t| lines.iter().map(|(a, b)| *a + t * *b).fold(T::infinity(), |m, v| m.min(v))).collect())
    }

    /// `‖z‖_{θ,q} = ‖t ↦ t^{−θ} K(t, z)‖_{L^q(dt/t)}`.
    ///
    /// Between nodes the integrand is taken to be a power of `t` (exact for
    /// `K(t) = ct^β`); below the first node `K` is extended linearly and above
    /// the last node it is held constant.
    pub fn interp_norm(&self, z: &[C<T>], theta: T, q: Exponent<T>) -> Result<T> {
        if !(theta > T::zero() && theta < T::one()) {
            return Err(Error::InvalidParameter(format!("θ = {theta} outside (0, 1)")));
        }
        let ts: Vec<T> = self.tgrid.nodes();
        let ks = self.k_profile(z, &ts)?;
        Ok(interp_norm_from_profile(&ts, &ks, theta, q))
    }

    /// Checks `‖Tz‖_{θ,q} ≤ b_X^{1−θ} b_Y^θ ‖z‖_{θ,q}(1 + tol)` on random probes.
    #[allow(clippy::too_many_arguments)]
    pub fn inequality_check<F: Fn(&[C<T>]) -> Vec<C<T>>>(
        &self,
        op: F,
        b_x: T,
        b_y: T,
        theta: T,
        q: Exponent<T>,
        probes: usize,
        seed: u64,
        tol: T,
    ) -> Result<InequalityReport<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = b_x.powf(T::one() - theta) * b_y.powf(theta);
        let mut ratios = Vec::with_capacity(probes);
        for i in 0..probes {
            let z = random_vector::<T>(&mut rng, self.dim);
            let lhs = self.interp_norm(&op(&z), theta, q)?;
            let rhs = bound * self.interp_norm(&z, theta, q)?;
            let ratio = lhs / rhs;
            if ratio > T::one() + tol {
                return Err(Error::CheckFailed(format!(
                    "interpolation inequality violated on probe {i}: ratio {ratio} > 1 + {tol}"
                )));
            }
            ratios.push(ratio);
        }
        let worst = ratios.iter().fold(T::zero(), |a, b| a.max(*b));
        Ok(InequalityReport { ratios, worst })
    }
}

/// Outcome of [`InterpCouple::inequality_check`].
#[derive(Clone, Debug)]
pub struct InequalityReport<T> {
    pub ratios: Vec<T>,
    pub worst: T,
}

/// The `(θ, q)` quadrature applied to tabulated `K(t_i)`.
pub fn interp_norm_from_profile<T: Real>(ts: &[T], ks: &[T], theta: T, q: Exponent<T>) -> T {
    let n = ts.len();
    if n == 0 || ks.iter().all(|k| *k == T::zero()) {
        return T::zero();
    }
    let g: Vec<T> = ts.iter().zip(ks).map(|(t, k)| t.powf(-theta) * *k).collect();
    match q {
        Exponent::Infinity => g.iter().fold(T::zero(), |a, b| a.max(*b)),
        Exponent::Finite(qv) => {
            let f: Vec<T> = g.iter().map(|v| v.powf(qv)).collect();
            let mut total = T::zero();
            for i in 0..n - 1 {
                let dl = (ts[i + 1] / ts[i]).ln();
                let (a, b) = (f[i], f[i + 1]);
                total += if a <= T::zero() || b <= T::zero() {
                    T::of(0.5) * (a + b) * dl
                } else if num_traits::Float::abs(a - b) <= T::of(1e-12) * a {
                    a * dl
                } else {
                    (b - a) / (b / a).ln() * dl
                };
            }
            // K(t) = K(t₀) t/t₀ below t₀, constant above t_n
            total += f[0] / ((T::one() - theta) * qv);
            total += f[n - 1] / (theta * qv);
            total.powf(T::one() / qv)
        }
    }
}

/// Complex Gaussian vector with independent standard normal parts.
pub fn random_vector<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<C<T>> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            cplx(T::of(re), T::of(im))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::CMatrix;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn identical_norms() {
        let n = Norm::<f64>::lp(Exponent::two());
        let c = InterpCouple::new(4, n.clone(), n);
        let z = random_vector::<f64>(&mut rng(), 4);
        let nz = c.norm_x(&z);
        for t in [0.01, 0.5, 1.0, 3.0] {
            assert!((c.k_functional(&z, t).unwrap() - t.min(1.0) * nz).abs() < 1e-12);
        }
        let v = c.interp_norm(&z, 0.5, Exponent::two()).unwrap();
        assert!((v - 2f64.sqrt() * nz).abs() < 1e-3 * nz);
        for (th, q) in [(0.3f64, 1.0f64), (0.7, 3.0), (0.5, 1.5)] {
            let want = (1.0 / ((1.0 - th) * q) + 1.0 / (th * q)).powf(1.0 / q) * nz;
            let got = c.interp_norm(&z, th, Exponent::Finite(q)).unwrap();
            assert!((got - want).abs() < 1e-3 * want, "θ={th} q={q}: {got} vs {want}");
        }
        assert_eq!(c.interp_norm(&[cplx(0.0, 0.0); 4], 0.5, Exponent::two()).unwrap(), 0.0);
    }

    #[test]
    fn scaled_line() {
        let c = InterpCouple::new(1, Norm::<f64>::lp(Exponent::one()), Norm::mixed(1, Exponent::one(), Exponent::one(), 3.0));
        let z = [cplx(2.0, -1.0)];
        for t in [0.1, 0.3, 1.0] {
            assert!((c.k_functional(&z, t).unwrap() - (3.0 * t).min(1.0) * z[0].norm()).abs() < 1e-12);
        }
    }

    fn diag_couple(a: &[f64]) -> InterpCouple<f64> {
        let d = LinearOp::diagonal(a.iter().map(|v| cplx(*v, 0.0)).collect());
        InterpCouple::domain(a.len(), Norm::lp(Exponent::one()), d)
    }

    #[test]
    fn l1_diagonal_closed_form() {
        let a = [0.0f64, 1.5, -4.0, 10.0, 0.25];
        let z = random_vector::<f64>(&mut rng(), 5);
        let want = |t: f64| a.iter().zip(&z).map(|(aj, zj)| (t * (1.0 + aj.abs())).min(1.0) * zj.norm()).sum::<f64>();
        let exact = diag_couple(&a);
        let mut general = diag_couple(&a);
        general.options.separable_shortcut = false;
        general.options.mm_iterations = 3000;
        for t in [0.01, 0.09, 0.2, 0.4, 0.66, 0.95] {
            assert!((exact.k_functional(&z, t).unwrap() - want(t)).abs() < 1e-12);
            assert!((general.k_functional(&z, t).unwrap() - want(t)).abs() < 1e-4, "t={t}");
        }
    }

    #[test]
    fn profile_is_concave_and_monotone() {
        let m = CMatrix::<f64>::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.5]]).unwrap();
        let c = InterpCouple::domain(3, Norm::lp(Exponent::two()), LinearOp::dense(m));
        let z = random_vector::<f64>(&mut rng(), 3);
        let ts: Vec<f64> = TGrid { octaves: 8, per_octave: 4 }.nodes();
        let k = c.k_profile(&z, &ts).unwrap();
        for i in 1..k.len() {
            assert!(k[i] >= k[i - 1] - 1e-12);
        }
        for i in 1..k.len() - 1 {
            let w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
            assert!(k[i] >= (1.0 - w) * k[i - 1] + w * k[i + 1] - 1e-12);
        }
        for (t, kv) in ts.iter().zip(&k) {
            assert!(*kv <= c.norm_x(&z).min(t * c.norm_y(&z)) + 1e-12);
        }
    }

    #[test]
    fn dense_and_iterative_paths_agree() {
        let m = CMatrix::<f64>::from_real_rows(&[vec![1.0, 2.0], vec![0.0, -1.0]]).unwrap();
        let mm = m.clone();
        let op = LinearOp::operator(move |v: &[C<f64>]| mm.mul_vec(v), move |v: &[C<f64>]| m.adjoint().mul_vec(v));
        let dense = InterpCouple::domain(2, Norm::lp(Exponent::two()), op.clone());
        let mut iter = InterpCouple::domain(2, Norm::lp(Exponent::two()), op);
        iter.options.dense_limit = 0;
        let z = [cplx(1.0, 0.5), cplx(-0.3, 2.0)];
        for t in [0.05, 0.3, 0.8] {
            let a = dense.k_functional(&z, t).unwrap();
            let b = iter.k_functional(&z, t).unwrap();
            assert!((a - b).abs() < 1e-9 * a);
        }
    }

    #[test]
    fn subgradient_fallback_for_sup_norms() {
        let c = InterpCouple::new(3, Norm::<f64>::lp(Exponent::Infinity), Norm::mixed(1, Exponent::Infinity, Exponent::Infinity, 2.0));
        let z = [cplx(1.0, 0.0), cplx(0.0, -2.0), cplx(0.5, 0.5)];
        // identical norms up to a factor: K = min(1, 2t)‖z‖_∞
        for t in [0.1, 0.25, 0.4, 2.0] {
            let k = c.k_functional(&z, t).unwrap();
            assert!((k - (2.0 * t).min(1.0) * 2.0).abs() < 1e-6, "t={t}: {k}");
        }
    }

    #[test]
    fn identity_and_scaling_inequality() {
        let c = diag_couple(&[0.5, 2.0, 7.0, 0.0]);
        let r = c.inequality_check(|z| z.to_vec(), 1.0, 1.0, 0.5, Exponent::two(), 5, 1, 1e-9).unwrap();
        assert!(r.worst <= 1.0 + 1e-9);
        let r = c
            .inequality_check(|z| z.iter().map(|v| *v * -2.5).collect(), 2.5, 2.5, 0.3, Exponent::one(), 5, 2, 1e-9)
            .unwrap();
        assert!(r.worst <= 1.0 + 1e-9);
    }
}
