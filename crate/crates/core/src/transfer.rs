//! Transference factorizations `U_μ = P ∘ L_μ ∘ ι` through `L^p(ℝ; X)`.
//!
//! `ι x(s) = ψ(−s)U(−s)x`, `L_μ F = μ ∗ F` and `P F = ∫ φ(s)U(s)F(s) ds`, so
//! that `P L_μ ι x = ∫ (φ ∗ ψ)(s) U(s)x μ(ds)`; the kernels are built to make
//! `φ ∗ ψ` equal to one (bounded groups) or `1/cosh(ω·)` (growing groups,
//! paired with the weighted measure `cosh(ω·)μ`) on the support of `μ`.

use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::besov::{besov_norm, girardi_weis_bound, MultiplierSymbol};
use crate::dense::NormEstimate;
use crate::gridfn::{GridFunction, GridSpec};
use crate::groups::{random_band_limited, GroupModel};
use crate::calculus::phillips;
use crate::measure::Measure;
use crate::quad::{bump, bump_cdf, bump_derivative, integrate};
use crate::scalar::{cplx, czero, l2, l2_dist, Exponent, Extended, Real, C};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransferMode<T> {
    /// Compactly supported kernels for `supp μ ⊆ [−n, n]`.
    Bounded { n: T, alpha: T, beta: T },
    /// `ψ = 1/cosh(α·)`, `φ = (√8ω/π) cosh(ω·)/cosh(2ω·)`.
    Unbounded { omega: T, alpha: T },
}

#[derive(Clone, Debug)]
pub struct TransferKernels<T> {
    mode: TransferMode<T>,
    spec: GridSpec<T>,
    psi: GridFunction<T>,
    phi: GridFunction<T>,
    diagnostics: KernelDiagnostics<T>,
}

/// Defects of the kernel identities measured on the grid.
#[derive(Clone, Copy, Debug, Default)]
pub struct KernelDiagnostics<T> {
    /// `|h Σ φ(t_j) − 1|`; the unbounded-mode `φ` has mass 2 by construction.
    pub phi_mass_defect: T,
    /// `max |ψ − 1|` on the flat region (bounded mode).
    pub psi_flat_defect: T,
    /// `max |(ψ ∗ φ)(r) w(r) − 1|` over nodes with `|r| ≤ n` (bounded) or
    /// `|r| ≤ R/4` with `w = cosh(ω·)` (unbounded).
    pub identity_defect: T,
}

fn cdf<T: Real>(u: T) -> T {
    T::of(bump_cdf(u.as_f64()))
}

/// `σ ∗ 1_{[−l, l]}` with `σ = ρ(·/α)/α`.
fn smoothed_indicator<T: Real>(s: T, l: T, alpha: T) -> T {
    cdf((s + l) / alpha) - cdf((s - l) / alpha)
}

/// `‖σ′‖₁` for `σ = ρ(·/α)/α`, by quadrature of `|ρ′|`.
pub fn sigma_derivative_l1<T: Real>(alpha: T) -> T {
    let raw = integrate(|s| bump_derivative(s).abs(), -1.0, 1.0, 400, 20);
    T::of(raw) / alpha
}

/// `ρ(0)`.
pub fn bump_at_zero<T: Real>() -> T {
    T::of(bump(0.0))
}

fn periodic_convolution<T: Real>(a: &GridFunction<T>, b: &GridFunction<T>) -> GridFunction<T> {
    let h = a.spec().h();
    let sa = a.spectrum();
    let sb = b.spectrum();
    let prod: Vec<C<T>> = sa.iter().zip(&sb).map(|(x, y)| *x * *y * h).collect();
    // both factors start at −R, so the raw circular product starts at −2R
    let half = (a.spec().len() / 2) as isize;
    GridFunction::from_spectrum(*a.spec(), &prod).expect("same grid").roll(half)
}

impl<T: Real> TransferKernels<T> {
    /// Kernels for measures supported in `[−n, n]`; needs `R ≥ 2(n + 3α + β)`.
    pub fn bounded(n: T, alpha: T, beta: T, spec: GridSpec<T>) -> Result<Self> {
        if !(n > T::zero() && alpha > T::zero() && beta > T::zero()) {
            return Err(Error::InvalidParameter(format!("need N, α, β > 0, got {n}, {alpha}, {beta}")));
        }
        let need = T::of(2.0) * (n + T::of(3.0) * alpha + beta);
        if spec.half_length() < need {
            return Err(Error::GridTooShort { have: spec.half_length().as_f64(), need: need.as_f64() });
        }
        let spec = spec.with_fiber(1, Exponent::two())?;
        let l_psi = n + T::of(3.0) * alpha + beta;
        let l_phi = alpha + beta;
        let norm = T::one() / (T::of(2.0) * (alpha + beta));
        let psi = GridFunction::from_scalar_fn(spec, |s| cplx(smoothed_indicator(s, l_psi, alpha), T::zero()))?;
        let phi = GridFunction::from_scalar_fn(spec, |s| cplx(norm * smoothed_indicator(s, l_phi, alpha), T::zero()))?;
        let flat = T::of(2.0) * alpha + n + beta;
        let mut k = Self {
            mode: TransferMode::Bounded { n, alpha, beta },
            spec,
            psi,
            phi,
            diagnostics: KernelDiagnostics::default(),
        };
        k.diagnostics.psi_flat_defect = spec
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, t)| Float::abs(**t) <= flat)
            .map(|(j, _)| (k.psi.values()[j].re - T::one()).abs())
            .fold(T::zero(), T::max);
        k.measure_identity(n, |_| T::one());
        Ok(k)
    }

    /// Analytic kernels for groups with `‖U(s)‖ ≤ M cosh(ω₀ s)`, `ω₀ < ω < α`.
    pub fn unbounded(omega: T, alpha: T, spec: GridSpec<T>) -> Result<Self> {
        if !(omega > T::zero()) || !(alpha > omega) {
            return Err(Error::ParameterOrder(format!("need α > ω > 0, got α = {alpha}, ω = {omega}")));
        }
        let spec = spec.with_fiber(1, Exponent::two())?;
        let c = T::of(8.0).sqrt() * omega / T::PI();
        let psi = GridFunction::from_scalar_fn(spec, |s| cplx(T::one() / (alpha * s).cosh(), T::zero()))?;
        let phi = GridFunction::from_scalar_fn(spec, |s| {
            cplx(c * (omega * s).cosh() / (T::of(2.0) * omega * s).cosh(), T::zero())
        })?;
        let mut k = Self {
            mode: TransferMode::Unbounded { omega, alpha },
            spec,
            psi,
            phi,
            diagnostics: KernelDiagnostics::default(),
        };
        k.measure_identity(spec.half_length() * T::of(0.25), |r| (omega * r).cosh());
        Ok(k)
    }

    fn measure_identity<W: Fn(T) -> T>(&mut self, reach: T, weight: W) {
        let h = self.spec.h();
        let mass: T = self.phi.values().iter().map(|v| v.re).sum::<T>() * h;
        self.diagnostics.phi_mass_defect = (mass - T::one()).abs();
        let conv = periodic_convolution(&self.psi, &self.phi);
        self.diagnostics.identity_defect = self
            .spec
            .nodes()
            .iter()
            .zip(conv.values())
            .filter(|(t, _)| Float::abs(**t) <= reach)
            .map(|(t, v)| (*v * weight(*t) - T::one()).norm())
            .fold(T::zero(), T::max);
    }

    pub fn mode(&self) -> TransferMode<T> {
        self.mode
    }

    pub fn spec(&self) -> &GridSpec<T> {
        &self.spec
    }

    pub fn psi(&self) -> &GridFunction<T> {
        &self.psi
    }

    pub fn phi(&self) -> &GridFunction<T> {
        &self.phi
    }

    pub fn diagnostics(&self) -> KernelDiagnostics<T> {
        self.diagnostics
    }

    /// Grid of `L^p(ℝ; X)` for a group with states of length `d`.
    pub fn bochner_spec(&self, g: &GroupModel<T>) -> GridSpec<T> {
        self.spec.with_fiber(g.dim(), g.exponent()).expect("valid fiber")
    }

    /// The measure actually convolved: `μ` or `cosh(ω·)μ`.
    pub fn convolved_measure(&self, mu: &Measure<T>) -> Result<Measure<T>> {
        match self.mode {
            TransferMode::Bounded { n, .. } => {
                let reach = mu.support_radius();
                if reach > n * (T::one() + T::of(1e-12)) {
                    return Err(Error::SupportViolation { reach: reach.as_f64(), bound: n.as_f64() });
                }
                Ok(mu.clone())
            }
            TransferMode::Unbounded { omega, .. } => match mu.decay_weight() {
                Extended::Finite(d) if d <= omega => Err(Error::GrowthMismatch { decay: d.as_f64(), growth: omega.as_f64() }),
                _ => mu.cosh_weight(omega),
            },
        }
    }
}

/// `ι x(s) = ψ(−s) U(−s) x` on the kernel grid.
pub fn iota_map<T: Real>(k: &TransferKernels<T>, g: &GroupModel<T>, x: &[C<T>]) -> Result<GridFunction<T>> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: x.len() });
    }
    let spec = k.bochner_spec(g);
    let d = g.dim();
    let n = spec.len();
    let mut values = vec![czero(); n * d];
    let psi = k.psi.values();
    for j in 0..n {
        let t = spec.node(j);
        // both kernels are even
        let w = psi[j].re;
        if w == T::zero() {
            continue;
        }
        let u = g.apply_group(-t, x)?;
        for c in 0..d {
            values[j * d + c] = u[c] * w;
        }
    }
    GridFunction::from_values(spec, values)
}

/// `P F = ∫ φ(s) U(s) F(s) ds` by the rectangle rule on the kernel grid.
pub fn p_map<T: Real>(k: &TransferKernels<T>, g: &GroupModel<T>, f: &GridFunction<T>) -> Result<Vec<C<T>>> {
    let d = g.dim();
    if f.spec().fiber_dim() != d || f.spec().len() != k.spec.len() {
        return Err(Error::DimensionMismatch { expected: d, got: f.spec().fiber_dim() });
    }
    let h = k.spec.h();
    let mut acc = vec![czero(); d];
    for (j, w) in k.phi.values().iter().enumerate() {
        if w.re == T::zero() {
            continue;
        }
        let t = k.spec.node(j);
        let u = g.apply_group(t, f.sample(j))?;
        for c in 0..d {
            acc[c] += u[c] * (w.re * h);
        }
    }
    Ok(acc)
}

/// `P L ι x` for one probe.
pub fn factorized_apply<T: Real>(
    k: &TransferKernels<T>,
    g: &GroupModel<T>,
    mu: &Measure<T>,
    x: &[C<T>],
) -> Result<Vec<C<T>>> {
    let conv = k.convolved_measure(mu)?;
    let f = iota_map(k, g, x)?;
    p_map(k, g, &f.convolve_measure(&conv))
}

#[derive(Clone, Debug)]
pub struct FactorizationReport<T> {
    /// `‖U_μx − P L ι x‖ / ‖x‖` per probe.
    pub residuals: Vec<T>,
    pub max_residual: T,
}

/// Compares `U_μ x` with `P L ι x` on `probes` random states.
pub fn factorization_check<T: Real>(
    k: &TransferKernels<T>,
    g: &GroupModel<T>,
    mu: &Measure<T>,
    probes: usize,
    seed: u64,
) -> Result<FactorizationReport<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residuals = Vec::with_capacity(probes);
    for _ in 0..probes {
        let x = g.random_state(&mut rng);
        let direct = phillips(g, mu, &x)?;
        let fact = factorized_apply(k, g, mu, &x)?;
        residuals.push(l2_dist(&direct, &fact) / l2(&x));
    }
    let max_residual = residuals.iter().copied().fold(T::zero(), T::max);
    Ok(FactorizationReport { residuals, max_residual })
}

/// `‖L_μ‖` on `B^θ_{p,q}` over the grid `spec`.
///
/// For `p = 2` the operator norm is `max |Fμ(ξ_k)|` over the grid frequencies
/// (bounds coincide). Otherwise the lower bound is the best ratio over random
/// band-limited probes and single frequencies near the symbol's peak, and
/// the upper bound is the uncalibrated Girardi–Weis functional.
pub fn besov_operator_norm<T: Real>(
    mu: &Measure<T>,
    spec: &GridSpec<T>,
    theta: T,
    p: Exponent<T>,
    q: Exponent<T>,
    probes: usize,
    seed: u64,
) -> Result<NormEstimate<T>> {
    let spec = spec.with_fiber(1, Exponent::two())?;
    let sym = mu.symbol_on_lattice(spec.len(), spec.h());
    let peak = sym.iter().fold(T::zero(), |m, v| m.max(v.norm()));
    if p.is(2.0) {
        return Ok(NormEstimate { lower: peak, upper: peak });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = T::zero();
    let ratio = |f: &GridFunction<T>| -> T {
        let den = besov_norm(f, theta, p, q);
        if den > T::zero() {
            besov_norm(&f.convolve_measure(mu), theta, p, q) / den
        } else {
            T::zero()
        }
    };
    for _ in 0..probes {
        let f = random_band_limited(&mut rng, &spec, spec.nyquist() * T::of(0.5));
        lower = lower.max(ratio(&f));
    }
    let kmax = sym
        .iter()
        .enumerate()
        .filter(|(k, _)| Float::abs(spec.frequency(*k)) <= spec.nyquist() * T::of(0.5))
        .fold((0, T::zero()), |(bk, bv), (k, v)| if v.norm() > bv { (k, v.norm()) } else { (bk, bv) })
        .0;
    let xi = spec.frequency(kmax);
    // a wave packet at the peak frequency: localized so that L^p norms are meaningful
    let width = spec.half_length() * T::of(0.25);
    let packet = GridFunction::from_scalar_fn(spec, |t| {
        crate::scalar::cis(xi * t) * (-(t / width) * (t / width)).exp()
    })?;
    lower = lower.max(ratio(&packet));
    let upper = girardi_weis_bound(&MultiplierSymbol::from_measure(mu), &spec).max(lower);
    Ok(NormEstimate { lower, upper })
}

#[derive(Clone, Copy, Debug)]
pub struct ProbeRatio<T> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
}

#[derive(Clone, Debug)]
pub struct TransferenceReport<T> {
    pub rows: Vec<ProbeRatio<T>>,
    /// `‖L‖` estimate used in the right-hand sides.
    pub operator_norm: NormEstimate<T>,
    pub max_ratio: T,
    /// Whether the group acts through the reflected measure when written as a convolution.
    pub reflected: bool,
}

/// Options for [`transference_check`].
#[derive(Clone, Copy, Debug)]
pub struct TransferenceOptions<T> {
    pub theta: T,
    pub q: Exponent<T>,
    pub p: Exponent<T>,
    pub probes: usize,
    pub seed: u64,
    /// Operator-norm probes for `p ≠ 2`.
    pub norm_probes: usize,
}

/// Per-probe `‖U_μ x‖_{θ,q} / (‖L‖ ‖x‖_{θ,q})` on the couple `(X, D(A))` of `g`.
///
/// Probes are random states followed, for translation groups, by single
/// frequencies at the largest values of `|Fμ|`; for those the ratio is one.
pub fn transference_check<T: Real>(
    k: &TransferKernels<T>,
    g: &GroupModel<T>,
    mu: &Measure<T>,
    opts: &TransferenceOptions<T>,
) -> Result<TransferenceReport<T>> {
    let conv = k.convolved_measure(mu)?;
    let besov_spec = match g.grid() {
        Some(s) if matches!(g.kind(), crate::groups::GroupKind::Shift { .. }) => *s,
        _ => *k.spec(),
    };
    let operator_norm = besov_operator_norm(&conv, &besov_spec, opts.theta, opts.p, opts.q, opts.norm_probes, opts.seed)?;
    let couple = g.couple();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut states: Vec<Vec<C<T>>> = (0..opts.probes).map(|_| g.random_state(&mut rng)).collect();
    let mut reflected = false;
    if let crate::groups::GroupKind::Shift { spec, .. } = g.kind() {
        // U(s) acts on frequency ξ by e^{isξ}, i.e. as the convolution with the reflected measure
        reflected = true;
        let sym = conv.reflect().symbol_on_lattice(spec.len(), spec.h());
        let mut order: Vec<usize> = (0..spec.len()).collect();
        order.sort_by(|a, b| sym[*b].norm().partial_cmp(&sym[*a].norm()).expect("finite symbol"));
        for &kk in order.iter().take(3) {
            let xi = spec.frequency(kk);
            let f = GridFunction::from_fn(*spec, |t| vec![crate::scalar::cis(xi * t); spec.fiber_dim()])?;
            states.push(f.into_values());
        }
    }
    let mut rows = Vec::with_capacity(states.len());
    for x in &states {
        let y = phillips(g, mu, x)?;
        let lhs = g.interp_norm(&couple, &y, opts.theta, opts.q)?;
        let xn = g.interp_norm(&couple, x, opts.theta, opts.q)?;
        let rhs = operator_norm.lower * xn;
        let ratio = if rhs > T::zero() { lhs / rhs } else if lhs == T::zero() { T::zero() } else { T::infinity() };
        rows.push(ProbeRatio { lhs, rhs, ratio });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(T::zero(), T::max);
    Ok(TransferenceReport { rows, operator_norm, max_ratio, reflected })
}

/// Norm of a Bochner function using the group's own state norm in each fiber.
pub fn bochner_lp<T: Real>(g: &GroupModel<T>, f: &GridFunction<T>, p: Exponent<T>) -> T {
    let mags = (0..f.spec().len()).map(|j| g.norm(f.sample(j)));
    match p {
        Exponent::Infinity => p.combine(mags),
        Exponent::Finite(pv) => p.combine(mags) * f.spec().h().powf(T::one() / pv),
    }
}

/// Measured norms next to the Hölder bounds for `ι` and `P`, one probe.
#[derive(Clone, Copy, Debug)]
pub struct EmbeddingBounds<T> {
    pub iota: (T, T),
    pub projection: (T, T),
    pub iota_sobolev: (T, T),
    pub projection_sobolev: (T, T),
}

/// Checks `‖ιx‖_p ≤ M‖ψ w‖_p‖x‖`, `‖PF‖ ≤ M‖φ w‖_{p′}‖F‖_p` and the Sobolev
/// versions for `x` and `F = ιx`, with `w = cosh(ω₀·)` (`w ≡ 1` for bounded groups).
///
/// `m` is a constant with `‖U(s)‖ ≤ m cosh(ω₀ s)` on the grid.
pub fn embedding_bounds<T: Real>(
    k: &TransferKernels<T>,
    g: &GroupModel<T>,
    x: &[C<T>],
    p: Exponent<T>,
    m: T,
    omega0: T,
) -> Result<EmbeddingBounds<T>> {
    let w = |t: T| (omega0 * t).cosh();
    let weighted = |f: &GridFunction<T>| f.map_samples(|t, v| v.iter().map(|z| *z * w(t)).collect());
    let pc = p.conjugate();
    let psi_w = weighted(&k.psi);
    let phi_w = weighted(&k.phi);
    let dphi_w = weighted(&k.phi.derivative());
    let xn = g.norm(x);
    let xd = g.domain_norm(x)?;
    let f = iota_map(k, g, x)?;
    let fp = bochner_lp(g, &f, p);
    let fd = bochner_lp(g, &f.derivative(), p);
    let px = p_map(k, g, &f)?;
    let iota = (fp, m * psi_w.lp_norm(p) * xn);
    let projection = (g.norm(&px), m * phi_w.lp_norm(pc) * fp);
    let iota_const = match k.mode {
        TransferMode::Bounded { .. } => weighted(&k.psi).sobolev_norm(p),
        TransferMode::Unbounded { alpha, .. } => (alpha + T::one()) * psi_w.lp_norm(p),
    };
    let iota_sobolev = (fp + fd, m * iota_const * xd);
    let projection_sobolev = (g.domain_norm(&px)?, m * (phi_w.lp_norm(pc) + dphi_w.lp_norm(pc)) * (fp + fd));
    Ok(EmbeddingBounds { iota, projection, iota_sobolev, projection_sobolev })
}
