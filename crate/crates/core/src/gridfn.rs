//! Vector-valued samples on the periodic grid `t_j = −R + j h`, `h = 2R/N`.
//!
//! Functions are identified with trigonometric polynomials
//! `f(t) = Σ_k c_k e^{iξ_k t}` over the DFT frequencies `ξ_k = 2π k/(N h)`,
//! the Nyquist mode taken at `ξ = −π/h`. Translations, derivatives and
//! Fourier multipliers act exactly on this representation.

use std::io::{Read, Write};

use num_traits::Float;

use crate::fft;
use crate::measure::Measure;
use crate::scalar::{cis, cplx, czero, Exponent, Real, C};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec<T> {
    half_length: T,
    samples: usize,
    fiber_dim: usize,
    fiber_exponent: Exponent<T>,
}

impl<T: Real> GridSpec<T> {
    pub fn new(half_length: T, samples: usize, fiber_dim: usize, fiber_exponent: Exponent<T>) -> Result<Self> {
        if !(half_length > T::zero()) || !half_length.is_finite() {
            return Err(Error::InvalidGrid(format!("half length {half_length} must be positive")));
        }
        if samples < 8 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("sample count {samples} must be a power of two ≥ 8")));
        }
        if fiber_dim == 0 {
            return Err(Error::InvalidGrid("fiber dimension must be at least 1".into()));
        }
        Ok(Self { half_length, samples, fiber_dim, fiber_exponent })
    }

    /// Scalar grid with Euclidean fiber.
    pub fn scalar(half_length: T, samples: usize) -> Result<Self> {
        Self::new(half_length, samples, 1, Exponent::two())
    }

    pub fn half_length(&self) -> T {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn fiber_exponent(&self) -> Exponent<T> {
        self.fiber_exponent
    }

    pub fn h(&self) -> T {
        T::of(2.0) * self.half_length / T::of_usize(self.samples)
    }

    pub fn node(&self, j: usize) -> T {
        -self.half_length + self.h() * T::of_usize(j)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.samples).map(|j| self.node(j)).collect()
    }

    /// Angular frequency of DFT bin `k`.
    pub fn frequency(&self, k: usize) -> T {
        T::of(2.0) * T::PI() * T::of(fft::signed_index(k, self.samples) as f64)
            / (T::of_usize(self.samples) * self.h())
    }

    pub fn frequencies(&self) -> Vec<T> {
        (0..self.samples).map(|k| self.frequency(k)).collect()
    }

    pub fn nyquist(&self) -> T {
        T::PI() / self.h()
    }

    pub fn with_fiber(&self, fiber_dim: usize, fiber_exponent: Exponent<T>) -> Result<Self> {
        Self::new(self.half_length, self.samples, fiber_dim, fiber_exponent)
    }

    /// Doubles both the window and the sample count, keeping `h`.
    pub fn refined(&self) -> Self {
        Self { half_length: self.half_length * T::of(2.0), samples: self.samples * 2, ..*self }
    }

    /// `self` refined `level` times.
    pub fn refine(&self, level: u32) -> Self {
        (0..level).fold(*self, |g, _| g.refined())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    spec: GridSpec<T>,
    values: Vec<C<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn zeros(spec: GridSpec<T>) -> Self {
        Self { values: vec![czero(); spec.len() * spec.fiber_dim()], spec }
    }

    /// Sample-major values: entry `c` of sample `j` sits at `j·d + c`.
    pub fn from_values(spec: GridSpec<T>, values: Vec<C<T>>) -> Result<Self> {
        let want = spec.len() * spec.fiber_dim();
        if values.len() != want {
            return Err(Error::DimensionMismatch { expected: want, got: values.len() });
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn from_fn<F: Fn(T) -> Vec<C<T>>>(spec: GridSpec<T>, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len() * spec.fiber_dim());
        for j in 0..spec.len() {
            let v = f(spec.node(j));
            if v.len() != spec.fiber_dim() {
                return Err(Error::DimensionMismatch { expected: spec.fiber_dim(), got: v.len() });
            }
            values.extend(v);
        }
        Self::from_values(spec, values)
    }

    pub fn from_scalar_fn<F: Fn(T) -> C<T>>(spec: GridSpec<T>, f: F) -> Result<Self> {
        Self::from_fn(spec, |t| {
            let mut v = vec![czero(); spec.fiber_dim()];
            v[0] = f(t);
            v
        })
    }

    /// `t ↦ w(t)·x` for a scalar profile `w` and fixed fiber vector `x`.
    pub fn tensor<F: Fn(T) -> C<T>>(spec: GridSpec<T>, w: F, x: &[C<T>]) -> Result<Self> {
        Self::from_fn(spec, |t| {
            let wt = w(t);
            x.iter().map(|v| *v * wt).collect()
        })
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C<T>> {
        self.values
    }

    pub fn sample(&self, j: usize) -> &[C<T>] {
        let d = self.spec.fiber_dim();
        &self.values[j * d..(j + 1) * d]
    }

    pub fn sample_mut(&mut self, j: usize) -> &mut [C<T>] {
        let d = self.spec.fiber_dim();
        &mut self.values[j * d..(j + 1) * d]
    }

    pub fn fiber_norm(&self, j: usize) -> T {
        self.spec.fiber_exponent().combine(self.sample(j).iter().map(|z| z.norm()))
    }

    /// `(h Σ_j ‖f(t_j)‖^p)^{1/p}`, or the largest fiber norm for `p = ∞`.
    pub fn lp_norm(&self, p: Exponent<T>) -> T {
        let mags = (0..self.spec.len()).map(|j| self.fiber_norm(j));
        match p {
            Exponent::Infinity => p.combine(mags),
            Exponent::Finite(pv) => p.combine(mags) * self.spec.h().powf(T::one() / pv),
        }
    }

    /// `‖f‖_p + ‖f′‖_p`.
    pub fn sobolev_norm(&self, p: Exponent<T>) -> T {
        self.lp_norm(p) + self.derivative().lp_norm(p)
    }

    /// Per-component DFT in sample-major layout.
    pub fn spectrum(&self) -> Vec<C<T>> {
        let (n, d) = (self.spec.len(), self.spec.fiber_dim());
        let mut out = vec![czero(); n * d];
        let mut buf = vec![czero(); n];
        for c in 0..d {
            for j in 0..n {
                buf[j] = self.values[j * d + c];
            }
            fft::forward(&mut buf);
            for k in 0..n {
                out[k * d + c] = buf[k];
            }
        }
        out
    }

    pub fn from_spectrum(spec: GridSpec<T>, spectrum: &[C<T>]) -> Result<Self> {
        let (n, d) = (spec.len(), spec.fiber_dim());
        if spectrum.len() != n * d {
            return Err(Error::DimensionMismatch { expected: n * d, got: spectrum.len() });
        }
        let mut values = vec![czero(); n * d];
        let mut buf = vec![czero(); n];
        for c in 0..d {
            for k in 0..n {
                buf[k] = spectrum[k * d + c];
            }
            fft::inverse(&mut buf);
            for j in 0..n {
                values[j * d + c] = buf[j];
            }
        }
        Ok(Self { spec, values })
    }

    /// Multiplies bin `k` of every component by `m[k]`.
    pub fn apply_symbol_values(&self, m: &[C<T>]) -> Result<Self> {
        let (n, d) = (self.spec.len(), self.spec.fiber_dim());
        if m.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.len() });
        }
        let mut s = self.spectrum();
        for k in 0..n {
            for c in 0..d {
                s[k * d + c] *= m[k];
            }
        }
        Self::from_spectrum(self.spec, &s)
    }

    /// `F^{−1}(m · Ff)`.
    pub fn apply_symbol<F: Fn(T) -> C<T>>(&self, m: F) -> Self {
        let vals: Vec<C<T>> = self.spec.frequencies().into_iter().map(m).collect();
        self.apply_symbol_values(&vals).expect("symbol sampled on own grid")
    }

    pub fn derivative(&self) -> Self {
        self.apply_symbol(|xi| cplx(T::zero(), xi))
    }

    /// `t ↦ f(t − a)`.
    pub fn translate(&self, a: T) -> Self {
        self.apply_symbol(|xi| cis(-a * xi))
    }

    /// Periodic convolution `(μ ∗ f)(t) = ∫ f(t − s) μ(ds)`.
    pub fn convolve_measure(&self, mu: &Measure<T>) -> Self {
        let reach = mu.support_radius();
        if reach > self.spec.half_length() * T::of(0.5) {
            log::warn!(
                "measure support radius {reach} exceeds half the grid window {}; periodic wrap-around",
                self.spec.half_length()
            );
        }
        let sym = mu.symbol_on_lattice(self.spec.len(), self.spec.h());
        self.apply_symbol_values(&sym).expect("lattice symbol length")
    }

    /// Circular shift by `m` samples: `g(t_j) = f(t_{j−m})`.
    pub fn roll(&self, m: isize) -> Self {
        let (n, d) = (self.spec.len(), self.spec.fiber_dim());
        let mut values = vec![czero(); n * d];
        for j in 0..n {
            let src = (j as isize - m).rem_euclid(n as isize) as usize;
            values[j * d..(j + 1) * d].copy_from_slice(&self.values[src * d..(src + 1) * d]);
        }
        Self { spec: self.spec, values }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self { spec: self.spec, values: self.values.iter().map(|v| *v * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { spec: self.spec, values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { spec: self.spec, values: self.values.iter().zip(&other.values).map(|(a, b)| *a - *b).collect() }
    }

    /// Pointwise map `f(t_j) ↦ g(t_j, f(t_j))` on fibers.
    pub fn map_samples<F: Fn(T, &[C<T>]) -> Vec<C<T>>>(&self, g: F) -> Self {
        let mut out = Self::zeros(self.spec);
        for j in 0..self.spec.len() {
            let v = g(self.spec.node(j), self.sample(j));
            out.sample_mut(j).copy_from_slice(&v);
        }
        out
    }

    /// `h Σ_j w(t_j) f(t_j)`, the rectangle-rule integral against a scalar weight.
    pub fn integrate_weighted<F: Fn(T) -> C<T>>(&self, w: F) -> Vec<C<T>> {
        let d = self.spec.fiber_dim();
        let mut acc = vec![czero(); d];
        for j in 0..self.spec.len() {
            let wt = w(self.spec.node(j));
            for (a, v) in acc.iter_mut().zip(self.sample(j)) {
                *a += *v * wt;
            }
        }
        let h = self.spec.h();
        acc.iter_mut().for_each(|a| *a = *a * h);
        acc
    }

    /// Fraction of the `L^p` mass living outside `|t| ≤ frac·R`.
    pub fn tail_mass(&self, p: Exponent<T>, frac: T) -> T {
        let total = self.lp_norm(p);
        if total == T::zero() {
            return T::zero();
        }
        let cut = frac * self.spec.half_length();
        let tail = self.map_samples(|t, v| {
            if Float::abs(t) > cut {
                v.to_vec()
            } else {
                vec![czero(); v.len()]
            }
        });
        tail.lp_norm(p) / total
    }

    /// CSV with columns `t, re_1, im_1, …, re_d, im_d`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let d = self.spec.fiber_dim();
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        for c in 1..=d {
            header.push(format!("re_{c}"));
            header.push(format!("im_{c}"));
        }
        wr.write_record(&header)?;
        for j in 0..self.spec.len() {
            let mut row = vec![format!("{:e}", self.spec.node(j))];
            for v in self.sample(j) {
                row.push(format!("{:e}", v.re));
                row.push(format!("{:e}", v.im));
            }
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`write_csv`](Self::write_csv); the grid is
    /// reconstructed from the first node and the sample count.
    pub fn read_csv<R: Read>(r: R, fiber_exponent: Exponent<T>) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.len() < 3 || headers.len() % 2 == 0 || &headers[0] != "t" {
            return Err(Error::Parse { line: 1, msg: "expected columns t, re_1, im_1, …".into() });
        }
        let d = (headers.len() - 1) / 2;
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let get = |c: usize| -> Result<T> {
                rec.get(c)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .map(T::of)
                    .ok_or(Error::Parse { line: i + 2, msg: format!("bad value in column {c}") })
            };
            ts.push(get(0)?);
            for c in 0..d {
                values.push(cplx(get(1 + 2 * c)?, get(2 + 2 * c)?));
            }
        }
        let n = ts.len();
        let left = *ts.first().ok_or(Error::Parse { line: 2, msg: "no samples".into() })?;
        let spec = GridSpec::new(-left, n, d, fiber_exponent)?;
        for (j, t) in ts.iter().enumerate() {
            if Float::abs(*t - spec.node(j)) > T::of(1e-9) * spec.half_length() {
                return Err(Error::Parse { line: j + 2, msg: format!("node {t} off the uniform grid") });
            }
        }
        Self::from_values(spec, values)
    }
}
