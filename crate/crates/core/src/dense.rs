//! Small dense complex matrices: products, LU solves, the Padé-13
//! scaling-and-squaring exponential, and induced ℓ^p norm estimates.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::{cplx, czero, fabs, l2, Exponent, Real, C};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![czero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = cplx(T::one(), T::zero());
        }
        m
    }

    pub fn from_diag(d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m.data[i * d.len() + i] = *v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C<T>>> =
            rows.iter().map(|r| r.iter().map(|v| cplx(T::of(*v), T::zero())).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<T>) {
        self.data[i * self.n + j] = v;
    }

    pub fn diagonal(&self) -> Vec<C<T>> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == czero()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == czero()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == czero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.data[i * n + j] * x[j]).fold(czero(), |a, b| a + b)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| *v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect() }
    }

    /// `λI − self`.
    pub fn shifted(&self, lambda: C<T>) -> Self {
        let mut m = self.scale(cplx(-T::one(), T::zero()));
        for i in 0..self.n {
            m.data[i * self.n + i] += lambda;
        }
        m
    }

    /// Max column sum: induced ℓ¹ norm.
    pub fn norm1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<T>())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Max row sum: induced ℓ^∞ norm.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).norm()).sum::<T>())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn frobenius(&self) -> T {
        l2(&self.data)
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self.clone())
    }

    pub fn solve(&self, b: &[C<T>]) -> Result<Vec<C<T>>> {
        Ok(self.lu()?.solve(b))
    }

    pub fn inverse(&self) -> Result<Self> {
        let lu = self.lu()?;
        let n = self.n;
        let mut out = Self::zeros(n);
        let mut e = vec![czero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = czero());
            e[j] = cplx(T::one(), T::zero());
            let col = lu.solve(&e);
            for i in 0..n {
                out.data[i * n + j] = col[i];
            }
        }
        Ok(out)
    }

    /// Matrix exponential by Padé-13 scaling and squaring.
    pub fn expm(&self) -> Result<Self> {
        const B: [f64; 14] = [
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ];
        let theta13 = 5.371920351148152;
        let n = self.n;
        let norm = self.norm1().as_f64();
        let s = if norm > theta13 { (norm / theta13).log2().ceil().max(0.0) as i32 } else { 0 };
        let a = self.scale(cplx(T::of(0.5f64.powi(s)), T::zero()));
        let c = |k: usize| cplx(T::of(B[k]), T::zero());
        let id = Self::identity(n);
        let a2 = a.mul(&a);
        let a4 = a2.mul(&a2);
        let a6 = a4.mul(&a2);
        let u_inner = a6.scale(c(13)).add(&a4.scale(c(11))).add(&a2.scale(c(9)));
        let u = a.mul(
            &a6.mul(&u_inner)
                .add(&a6.scale(c(7)))
                .add(&a4.scale(c(5)))
                .add(&a2.scale(c(3)))
                .add(&id.scale(c(1))),
        );
        let v_inner = a6.scale(c(12)).add(&a4.scale(c(10))).add(&a2.scale(c(8)));
        let v = a6
            .mul(&v_inner)
            .add(&a6.scale(c(6)))
            .add(&a4.scale(c(4)))
            .add(&a2.scale(c(2)))
            .add(&id.scale(c(0)));
        let p = v.add(&u);
        let q = v.sub(&u);
        let lu = q.lu()?;
        let mut r = Self::zeros(n);
        let mut col = vec![czero(); n];
        for j in 0..n {
            for i in 0..n {
                col[i] = p.get(i, j);
            }
            let x = lu.solve(&col);
            for i in 0..n {
                r.set(i, j, x[i]);
            }
        }
        for _ in 0..s {
            r = r.mul(&r);
        }
        Ok(r)
    }

    /// Induced ℓ^p operator norm estimate.
    ///
    /// Exact for `p ∈ {1, ∞}`; power iteration on `M*M` for `p = 2`; otherwise a
    /// gradient-ascent lower bound paired with the Riesz–Thorin upper bound
    /// `‖M‖₁^{1/p} ‖M‖_∞^{1−1/p}`.
    pub fn operator_norm(&self, p: Exponent<T>) -> NormEstimate<T> {
        match p {
            Exponent::Infinity => {
                let v = self.norm_inf();
                NormEstimate { lower: v, upper: v }
            }
            Exponent::Finite(pv) if pv == T::one() => {
                let v = self.norm1();
                NormEstimate { lower: v, upper: v }
            }
            Exponent::Finite(pv) if pv == T::of(2.0) => {
                let v = self.spectral_norm();
                NormEstimate { lower: v, upper: v.max(T::zero()) + v * T::of(1e-10) }
            }
            Exponent::Finite(pv) => {
                let inv = T::one() / pv;
                let upper = self.norm1().powf(inv) * self.norm_inf().powf(T::one() - inv);
                let lower = self.lp_ascent(pv, 8, 200).min(upper);
                NormEstimate { lower, upper }
            }
        }
    }

    /// Largest singular value by power iteration on `M*M`.
    pub fn spectral_norm(&self) -> T {
        let n = self.n;
        if n == 0 {
            return T::zero();
        }
        let mh = self.adjoint();
        let mut best = T::zero();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for start in 0..3 {
            let mut x: Vec<C<T>> = (0..n)
                .map(|i| {
                    if start == 0 {
                        cplx(T::one(), T::of(0.1 * i as f64))
                    } else {
                        cplx(T::of(rng.random::<f64>() - 0.5), T::of(rng.random::<f64>() - 0.5))
                    }
                })
                .collect();
            let mut sigma = T::zero();
            for _ in 0..500 {
                let nx = l2(&x);
                if nx == T::zero() {
                    break;
                }
                x.iter_mut().for_each(|v| *v = *v / nx);
                let y = self.mul_vec(&x);
                let s_new = l2(&y);
                x = mh.mul_vec(&y);
                if fabs(s_new - sigma) <= T::of(1e-15) * s_new {
                    sigma = s_new;
                    break;
                }
                sigma = s_new;
            }
            best = best.max(sigma);
        }
        best
    }

    fn lp_ascent(&self, p: T, restarts: usize, iters: usize) -> T {
        let n = self.n;
        let lp = |v: &[C<T>]| Exponent::Finite(p).combine(v.iter().map(|z| z.norm()));
        let mut rng = ChaCha8Rng::seed_from_u64(0xa5c3);
        let mut best = T::zero();
        for _ in 0..restarts {
            let mut x: Vec<C<T>> = (0..n)
                .map(|_| cplx(T::of(rng.random::<f64>() - 0.5), T::of(rng.random::<f64>() - 0.5)))
                .collect();
            let mut step = T::of(0.5);
            let mut val = {
                let nx = lp(&x);
                x.iter_mut().for_each(|v| *v = *v / nx);
                lp(&self.mul_vec(&x))
            };
            for _ in 0..iters {
                // coordinate perturbation search on the unit sphere
                let mut improved = false;
                for i in 0..n {
                    for dir in [cplx(step, T::zero()), cplx(-step, T::zero()), cplx(T::zero(), step), cplx(T::zero(), -step)] {
                        let mut y = x.clone();
                        y[i] += dir;
                        let ny = lp(&y);
                        if ny == T::zero() {
                            continue;
                        }
                        y.iter_mut().for_each(|v| *v = *v / ny);
                        let vy = lp(&self.mul_vec(&y));
                        if vy > val {
                            val = vy;
                            x = y;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step = step * T::of(0.5);
                    if step < T::of(1e-10) {
                        break;
                    }
                }
            }
            best = best.max(val);
        }
        // basis vectors are always candidates
        for j in 0..n {
            let col: Vec<C<T>> = (0..n).map(|i| self.get(i, j)).collect();
            best = best.max(lp(&col));
        }
        best
    }
}

/// Certified lower bound and an upper bound of an operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate<T> {
    pub lower: T,
    pub upper: T,
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    n: usize,
    lu: Vec<C<T>>,
    piv: Vec<usize>,
    min_pivot: T,
}

impl<T: Real> Lu<T> {
    fn factor(m: CMatrix<T>) -> Result<Self> {
        let n = m.n;
        let mut a = m.data;
        let mut piv: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(T::zero(), |acc, v| acc.max(v.norm()));
        let mut min_pivot = T::infinity();
        for k in 0..n {
            let (mut p, mut best) = (k, T::zero());
            for i in k..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() || best <= scale * T::epsilon() * T::of(4.0) {
                return Err(Error::NearSpectrum(format!("singular matrix (pivot {best})")));
            }
            min_pivot = min_pivot.min(best);
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let d = a[k * n + k];
            for i in (k + 1)..n {
                let f = a[i * n + k] / d;
                a[i * n + k] = f;
                if f != czero() {
                    for j in (k + 1)..n {
                        let u = a[k * n + j];
                        a[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, lu: a, piv, min_pivot })
    }

    pub fn min_pivot(&self) -> T {
        self.min_pivot
    }

    pub fn solve(&self, b: &[C<T>]) -> Vec<C<T>> {
        let n = self.n;
        let mut x: Vec<C<T>> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}
