use num_traits::Float;

use crate::groups::{GroupKind, GroupModel};
use crate::quad::gauss_legendre;
use crate::scalar::{czero, l2, Real, C};
use crate::{Error, Result};

/// Partial integrals `I_ε = ∫_{ε≤|s|≤1} g(s)U(s)x ds/s` and their limit.
#[derive(Clone, Debug)]
pub struct PvReport<T> {
    pub limit: Vec<C<T>>,
    pub eps: Vec<T>,
    pub partials: Vec<Vec<C<T>>>,
    /// `‖I_{ε_k} − I_{ε_{k−1}}‖`, one per step of the schedule.
    pub residuals: Vec<T>,
    /// Ratios of consecutive residuals.
    pub contraction: Vec<T>,
}

fn oscillation<T: Real>(g: &GroupModel<T>) -> T {
    match g.kind() {
        GroupKind::Shift { spec, .. } => spec.nyquist(),
        GroupKind::Multiplication { symbol, .. } => symbol.iter().fold(T::one(), |m, a| m.max(Float::abs(*a))),
        GroupKind::Matrix { a, .. } => T::one().max(a.norm_inf()),
    }
}

/// `∫_a^b g(s)(U(s) − U(−s))x ds/s` in the variable `v = log s`.
fn segment<T: Real, G: Fn(T) -> T>(grp: &GroupModel<T>, g: &G, x: &[C<T>], a: T, b: T) -> Result<Vec<C<T>>> {
    let (nodes, weights) = gauss_legendre(20);
    let omega = oscillation(grp);
    let mut acc = vec![czero(); x.len()];
    let (mut v, vb) = (a.ln(), b.ln());
    while v < vb {
        let s_hi = (v + T::of(0.25)).exp().min(b);
        let dv = T::of(0.25).min(T::of(4.0) / (s_hi * omega)).min(vb - v);
        let mid = v + dv * T::of(0.5);
        for (xi, wi) in nodes.iter().zip(&weights) {
            let s = (mid + dv * T::of(0.5 * xi)).exp();
            let gs = g(s);
            if gs == T::zero() {
                continue;
            }
            let plus = grp.apply_group(s, x)?;
            let minus = grp.apply_group(-s, x)?;
            let c = gs * dv * T::of(0.5 * wi);
            for ((a, p), m) in acc.iter_mut().zip(&plus).zip(&minus) {
                *a += (*p - *m) * c;
            }
        }
        v = v + dv;
    }
    Ok(acc)
}

/// Principal value `lim_{ε→0} ∫_{ε≤|s|≤1} g(s)U(s)x ds/s` for even `g`.
///
/// The pairing `s ↔ −s` turns the integrand into `g(s)(U(s) − U(−s))x/s` on
/// `[ε, 1]`. The limit adds one Aitken-type correction using the observed
/// contraction rate of the last two residuals.
pub fn pv_group_integral<T: Real, G: Fn(T) -> T>(
    grp: &GroupModel<T>,
    g: G,
    x: &[C<T>],
    eps: &[T],
) -> Result<PvReport<T>> {
    if eps.is_empty() || eps.iter().any(|e| !(*e > T::zero() && *e < T::one())) {
        return Err(Error::InvalidParameter("ε schedule must lie in (0, 1)".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("ε schedule must decrease".into()));
    }
    for s in [0.1, 0.37, 0.9] {
        let s = T::of(s);
        let (a, b) = (g(s), g(-s));
        if Float::abs(a - b) > T::of(1e-12) * (T::one() + Float::abs(a)) {
            return Err(Error::InvalidParameter(format!("g is not even: g({s}) = {a}, g(−{s}) = {b}")));
        }
    }
    let mut partials = Vec::with_capacity(eps.len());
    let mut current = segment(grp, &g, x, eps[0], T::one())?;
    partials.push(current.clone());
    let mut residuals = Vec::new();
    for w in eps.windows(2) {
        let piece = segment(grp, &g, x, w[1], w[0])?;
        residuals.push(l2(&piece));
        for (c, p) in current.iter_mut().zip(&piece) {
            *c += *p;
        }
        partials.push(current.clone());
    }
    let contraction: Vec<T> =
        residuals.windows(2).map(|r| if r[1] > T::zero() { r[0] / r[1] } else { T::infinity() }).collect();
    let mut limit = current.clone();
    if partials.len() >= 2 {
        let rate = contraction.last().copied().unwrap_or(T::one());
        if rate.is_finite() && rate > T::of(1.5) {
            let prev = &partials[partials.len() - 2];
            for (l, (c, p)) in limit.iter_mut().zip(current.iter().zip(prev)) {
                *l = *c + (*c - *p) / (rate - T::one());
            }
        }
    }
    if residuals.len() >= 2 {
        let first = residuals[0];
        let last = *residuals.last().expect("nonempty");
        if last >= first && first > T::zero() {
            return Err(Error::NoConvergence(format!("PV residuals grew from {first:e} to {last:e}")));
        }
    }
    Ok(PvReport { limit, eps: eps.to_vec(), partials, residuals, contraction })
}
