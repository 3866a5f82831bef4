//! Functional calculi for group generators: Hille–Phillips integrals, the
//! Cauchy integral over the boundary of a strip, `τ_k` regularization,
//! principal-value group integrals and the analytic Mikhlin norm.

mod contour;
mod phillips;
mod pv;

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::measure::Measure;
use crate::scalar::{cplx, fabs, Extended, Real, C};
use crate::{Error, Result};

pub use contour::{cauchy_strip, regularized_calculus, CauchyOutput, ContourOptions, RegularizedOutput};
pub use phillips::{group_type_bound, phillips, phillips_matrix};
pub use pv::{pv_group_integral, PvReport};

type Eval<T> = Arc<dyn Fn(C<T>) -> C<T> + Send + Sync>;

/// Holomorphic function on the strip `|Im z| < width`.
#[derive(Clone)]
pub struct StripFunction<T> {
    name: String,
    eval: Eval<T>,
    deriv: Eval<T>,
    width: T,
    decay_order: Option<T>,
}

impl<T: Real> fmt::Debug for StripFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StripFunction")
            .field("name", &self.name)
            .field("width", &self.width)
            .field("decay_order", &self.decay_order)
            .finish()
    }
}

fn i_unit<T: Real>() -> C<T> {
    cplx(T::zero(), T::one())
}

impl<T: Real> StripFunction<T> {
    pub fn new<F, D>(name: impl Into<String>, eval: F, deriv: D, width: T) -> Self
    where
        F: Fn(C<T>) -> C<T> + Send + Sync + 'static,
        D: Fn(C<T>) -> C<T> + Send + Sync + 'static,
    {
        Self { name: name.into(), eval: Arc::new(eval), deriv: Arc::new(deriv), width, decay_order: None }
    }

    /// Marks `|f(z)| ≤ c|z|^{−α}` at real infinity, making `f` elementary.
    pub fn with_decay(mut self, alpha: T) -> Result<Self> {
        if !(alpha > T::one()) {
            return Err(Error::InvalidParameter(format!("decay order {alpha} must exceed 1")));
        }
        self.decay_order = Some(alpha);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> T {
        self.width
    }

    pub fn decay_order(&self) -> Option<T> {
        self.decay_order
    }

    pub fn eval(&self, z: C<T>) -> C<T> {
        (self.eval)(z)
    }

    pub fn deriv(&self, z: C<T>) -> C<T> {
        (self.deriv)(z)
    }

    pub fn constant(c: C<T>) -> Self {
        Self::new(format!("const({c})"), move |_| c, |_| C::new(T::zero(), T::zero()), T::infinity())
    }

    /// `τ_k(z) = −k²(ik − z)^{−2}`.
    pub fn tau(k: T) -> Self {
        let ik = cplx(T::zero(), k);
        let k2 = k * k;
        Self::new(
            format!("tau({k})"),
            move |z| -(ik - z).powi(2).inv() * k2,
            move |z| -(ik - z).powi(3).inv() * (k2 + k2),
            k,
        )
        .with_decay(T::of(2.0))
        .expect("order 2")
    }

    /// `(λ − z)^{−1}`; holomorphic on `|Im z| < |Im λ|`, not elementary.
    pub fn inv_shift(lambda: C<T>) -> Self {
        Self::new(
            format!("inv_shift({lambda})"),
            move |z| (lambda - z).inv(),
            move |z| (lambda - z).powi(2).inv(),
            fabs(lambda.im),
        )
    }

    /// `(λ − z)^{−2}`.
    pub fn inv_shift_sq(lambda: C<T>) -> Self {
        Self::new(
            format!("inv_shift_sq({lambda})"),
            move |z| (lambda - z).powi(2).inv(),
            move |z| (lambda - z).powi(3).inv() * T::of(2.0),
            fabs(lambda.im),
        )
        .with_decay(T::of(2.0))
        .expect("order 2")
    }

    /// `e^{−z²}`; its decay along every horizontal line beats any power.
    pub fn gauss() -> Self {
        Self::new("gauss", |z: C<T>| (-z * z).exp(), |z: C<T>| -(-z * z).exp() * z * T::of(2.0), T::infinity())
            .with_decay(T::of(4.0))
            .expect("order 4")
    }

    /// `e^{iaz}`.
    pub fn exp_i(a: T) -> Self {
        let ia = cplx(T::zero(), a);
        Self::new(format!("exp_i({a})"), move |z| (ia * z).exp(), move |z| ia * (ia * z).exp(), T::infinity())
    }

    /// `Fμ(z) = ∫ e^{−isz} μ(ds)` on the strip allowed by the decay weight of `μ`.
    pub fn fourier_of(mu: &Measure<T>) -> Self {
        let width = match mu.decay_weight() {
            Extended::Finite(w) => w,
            Extended::Infinite => T::infinity(),
        };
        let (a, b) = (mu.clone(), mu.clone());
        Self::new(
            "fourier",
            move |z| a.fourier(z).unwrap_or(C::new(T::nan(), T::nan())),
            move |z| b.fourier_derivative(z).unwrap_or(C::new(T::nan(), T::nan())),
            width,
        )
    }

    /// Pointwise product; decay orders add.
    pub fn product(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        let (f2, g2) = (self.clone(), other.clone());
        let decay = match (self.decay_order, other.decay_order) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(T::zero()) + b.unwrap_or(T::zero())),
        };
        let mut out = Self::new(
            format!("{}*{}", self.name, other.name),
            move |z| f.eval(z) * g.eval(z),
            move |z| f2.deriv(z) * g2.eval(z) + f2.eval(z) * g2.deriv(z),
            self.width.min(other.width),
        );
        out.decay_order = decay;
        out
    }

    /// Largest mismatch among the Cauchy–Riemann difference quotients and the
    /// supplied derivative at `points` random points of `|Im z| < ω`, relative
    /// to `1 + |f′|`.
    pub fn holomorphy_residual(&self, omega: T, re_max: T, points: usize, rng: &mut ChaCha8Rng) -> T {
        let h = T::of(1e-5);
        let two = T::of(2.0);
        let mut worst = T::zero();
        for _ in 0..points {
            let x = T::of(rng.random_range(-1.0..1.0)) * re_max;
            let y = T::of(rng.random_range(-0.95..0.95)) * omega;
            let z = cplx(x, y);
            let dx = (self.eval(z + h) - self.eval(z - h)) / (two * h);
            let dy = (self.eval(z + i_unit::<T>() * h) - self.eval(z - i_unit::<T>() * h)) / (two * h) * -i_unit::<T>();
            let d = self.deriv(z);
            let scale = T::one() + d.norm();
            worst = worst.max((dx - dy).norm() / scale).max((dx - d).norm() / scale);
        }
        worst
    }

    /// `max |f(x ± iy)| |x|^α` over geometric samples `x ∈ [from, to]`.
    pub fn decay_constant(&self, alpha: T, y: T, from: T, to: T, samples: usize) -> T {
        let samples = samples.max(2);
        let ratio = (to / from).ln() / T::of_usize(samples - 1);
        let mut c = T::zero();
        for m in 0..samples {
            let x = from * (ratio * T::of_usize(m)).exp();
            for z in [cplx(x, y), cplx(x, -y), cplx(-x, y), cplx(-x, -y)] {
                c = c.max(self.eval(z).norm() * z.norm().powf(alpha));
            }
        }
        c
    }
}

/// Holomorphic function on a sector `|arg w| < ψ`.
#[derive(Clone)]
pub struct SectorFunction<T> {
    name: String,
    eval: Eval<T>,
    deriv: Eval<T>,
}

impl<T: Real> fmt::Debug for SectorFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SectorFunction({})", self.name)
    }
}

fn horner<T: Real>(coeffs: &[C<T>], w: C<T>) -> (C<T>, C<T>) {
    let mut p = C::new(T::zero(), T::zero());
    let mut dp = C::new(T::zero(), T::zero());
    for c in coeffs.iter().rev() {
        dp = dp * w + p;
        p = p * w + *c;
    }
    (p, dp)
}

impl<T: Real> SectorFunction<T> {
    pub fn new<F, D>(name: impl Into<String>, eval: F, deriv: D) -> Self
    where
        F: Fn(C<T>) -> C<T> + Send + Sync + 'static,
        D: Fn(C<T>) -> C<T> + Send + Sync + 'static,
    {
        Self { name: name.into(), eval: Arc::new(eval), deriv: Arc::new(deriv) }
    }

    /// `p(w)/q(w)` with coefficients in ascending powers.
    pub fn rational(num: Vec<C<T>>, den: Vec<C<T>>) -> Result<Self> {
        if den.iter().all(|c| c.norm() == T::zero()) {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        let name = format!("rational({} / {})", num.len(), den.len());
        let (n2, d2) = (num.clone(), den.clone());
        Ok(Self::new(
            name,
            move |w| {
                let (p, _) = horner(&num, w);
                let (q, _) = horner(&den, w);
                p / q
            },
            move |w| {
                let (p, dp) = horner(&n2, w);
                let (q, dq) = horner(&d2, w);
                (dp * q - p * dq) / (q * q)
            },
        ))
    }

    pub fn constant(c: C<T>) -> Self {
        Self::new("const", move |_| c, |_| C::new(T::zero(), T::zero()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, w: C<T>) -> C<T> {
        (self.eval)(w)
    }

    pub fn deriv(&self, w: C<T>) -> C<T> {
        (self.deriv)(w)
    }
}

/// `g = f∘exp` on `|Im z| < ψ`, with `g′(z) = e^z f′(e^z)`.
pub fn sector_pullback<T: Real>(f: &SectorFunction<T>, psi: T) -> Result<StripFunction<T>> {
    if !(psi > T::zero() && psi < T::PI()) {
        return Err(Error::InvalidParameter(format!("sector half-angle {psi} outside (0, π)")));
    }
    let (a, b) = (f.clone(), f.clone());
    Ok(StripFunction::new(
        format!("{}∘exp", f.name),
        move |z: C<T>| a.eval(z.exp()),
        move |z: C<T>| {
            let w = z.exp();
            w * b.deriv(w)
        },
        psi,
    ))
}

/// Sampling lattice for sup-norm searches over a strip.
#[derive(Clone, Copy, Debug)]
pub struct HinfSampling<T> {
    /// Truncation `|Re z| ≤ re_max`.
    pub re_max: T,
    /// Uniform points on `[−linear_extent, linear_extent]`.
    pub linear: usize,
    pub linear_extent: T,
    /// Geometric points on each side beyond the uniform block.
    pub log: usize,
    /// Interior horizontal lines besides the two boundary lines.
    pub interior_lines: usize,
    pub refine_iters: usize,
}

impl<T: Real> Default for HinfSampling<T> {
    fn default() -> Self {
        Self {
            re_max: T::of(1e4),
            linear: 2001,
            linear_extent: T::of(20.0),
            log: 300,
            interior_lines: 15,
            refine_iters: 200,
        }
    }
}

impl<T: Real> HinfSampling<T> {
    fn real_nodes(&self) -> Vec<T> {
        let mut xs = Vec::with_capacity(self.linear + 2 * self.log);
        let e = self.linear_extent.min(self.re_max);
        let n = self.linear.max(2);
        for j in 0..n {
            xs.push(-e + (e + e) * T::of_usize(j) / T::of_usize(n - 1));
        }
        if self.re_max > e && self.log > 0 {
            let r = (self.re_max / e).ln() / T::of_usize(self.log);
            for j in 1..=self.log {
                let x = e * (r * T::of_usize(j)).exp();
                xs.push(x);
                xs.push(-x);
            }
        }
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
        xs
    }

    fn imag_lines(&self, omega: T) -> Vec<T> {
        let edge = omega * (T::one() - T::of(1e-6));
        let m = self.interior_lines;
        let mut ys = vec![-edge, edge];
        for j in 1..=m {
            ys.push(-edge + (edge + edge) * T::of_usize(j) / T::of_usize(m + 1));
        }
        ys
    }
}

/// Result of a sup-norm search; `value` is infinite when the weighted values
/// keep growing up to the truncation edge, with `trend` the growth factor
/// between half the edge and the edge.
#[derive(Clone, Copy, Debug)]
pub struct HinfNorm<T> {
    pub value: Extended<T>,
    pub argmax: C<T>,
    pub trend: T,
}

fn search<T: Real, G: Fn(C<T>) -> T>(g: G, xs: &[T], ys: &[T], edge: T, s: &HinfSampling<T>) -> HinfNorm<T> {
    let mut best = (T::neg_infinity(), cplx(T::zero(), T::zero()));
    let mut column = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut col = T::neg_infinity();
        for &y in ys {
            let v = g(cplx(x, y));
            if v.is_nan() {
                continue;
            }
            col = col.max(v);
            if v > best.0 {
                best = (v, cplx(x, y));
            }
        }
        column.push(col);
    }
    let nearest = |target: T| -> T {
        let mut bestd = T::infinity();
        let mut val = T::neg_infinity();
        for (x, v) in xs.iter().zip(&column) {
            let d = fabs(fabs(*x) - target);
            if d < bestd - T::of(1e-12) * target {
                bestd = d;
                val = *v;
            } else if fabs(d - bestd) <= T::of(1e-12) * target {
                val = val.max(*v);
            }
        }
        val
    };
    let re_max = xs.iter().fold(T::zero(), |m, x| m.max(fabs(*x)));
    let v_edge = nearest(re_max);
    let v_half = nearest(re_max * T::of(0.5));
    let trend = if v_half > T::zero() { v_edge / v_half } else { T::one() };
    let near_edge = fabs(best.1.re) >= re_max * T::of(0.5);
    if near_edge && trend > T::of(1.05) {
        return HinfNorm { value: Extended::Infinite, argmax: best.1, trend };
    }
    let (mut z, mut v) = (best.1, best.0);
    let mut step = if fabs(z.re) <= s.linear_extent {
        (s.linear_extent + s.linear_extent) / T::of_usize(s.linear.max(2))
    } else {
        fabs(z.re) * T::of(0.05)
    };
    let mut ystep = (edge + edge) / T::of_usize(s.interior_lines + 1);
    for _ in 0..s.refine_iters {
        let mut moved = false;
        for (dx, dy) in [(step, T::zero()), (-step, T::zero()), (T::zero(), ystep), (T::zero(), -ystep)] {
            let cand = cplx(z.re + dx, (z.im + dy).max(-edge).min(edge));
            let cv = g(cand);
            if cv > v {
                z = cand;
                v = cv;
                moved = true;
            }
        }
        if !moved {
            step = step * T::of(0.5);
            ystep = ystep * T::of(0.5);
            if step < T::of(1e-12) && ystep < T::of(1e-12) {
                break;
            }
        }
    }
    HinfNorm { value: Extended::Finite(v), argmax: z, trend }
}

/// `sup_{|Im z| < ω} |f(z)| + (1+|z|)|f′(z)|`.
pub fn hinf1_norm<T: Real>(f: &StripFunction<T>, omega: T, sampling: &HinfSampling<T>) -> Result<HinfNorm<T>> {
    if !(omega > T::zero()) || omega > f.width() {
        return Err(Error::InvalidParameter(format!("strip {omega} not inside the domain width {}", f.width())));
    }
    let g = |z: C<T>| f.eval(z).norm() + (T::one() + z.norm()) * f.deriv(z).norm();
    let edge = omega * (T::one() - T::of(1e-6));
    Ok(search(g, &sampling.real_nodes(), &sampling.imag_lines(omega), edge, sampling))
}

/// `sup_{|arg w| < ψ} |f(w)| + (1+|log w|)|w f′(w)|`, searched on a polar lattice
/// `w = r e^{iφ}` with `r` geometric.
pub fn hlog_norm<T: Real>(f: &SectorFunction<T>, psi: T, sampling: &HinfSampling<T>) -> Result<HinfNorm<T>> {
    if !(psi > T::zero() && psi < T::PI()) {
        return Err(Error::InvalidParameter(format!("sector half-angle {psi} outside (0, π)")));
    }
    let g = |p: C<T>| {
        // p = (log r, φ)
        let w = C::from_polar(p.re.exp(), p.im);
        let logw = cplx(p.re, p.im);
        f.eval(w).norm() + (T::one() + logw.norm()) * (w * f.deriv(w)).norm()
    };
    let edge = psi * (T::one() - T::of(1e-6));
    let radii: Vec<T> = sampling.real_nodes();
    let angles = sampling.imag_lines(psi);
    Ok(search(g, &radii, &angles, edge, sampling))
}
