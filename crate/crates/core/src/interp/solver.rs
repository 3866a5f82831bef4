//! Minimizers of `y ↦ ‖z − y‖_X + t‖y‖_Y`.
//!
//! Couples whose terms are all coordinatewise `ℓ¹` norms of diagonal maps are
//! solved in closed form. Otherwise a majorize-minimize iteration replaces each
//! norm by the quadratic `(‖v‖²/‖v₀‖ + ‖v₀‖)/2` and solves the resulting
//! weighted least-squares problem (diagonally, by dense LU, or by conjugate
//! gradients). Norms the quadratic majorizer cannot handle fall back to a
//! subgradient method with a Polyak-type step.

use crate::dense::CMatrix;
use crate::scalar::{czero, Exponent, Real, C};
use crate::{Error, Result};

use super::norms::{MmKind, Norm, NormTerm};

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<T> {
    /// Majorize-minimize iterations per solve.
    pub mm_iterations: usize,
    /// Subgradient iterations per start in the fallback.
    pub subgradient_iterations: usize,
    /// Relative objective decrease below which iteration stops.
    pub tolerance: T,
    /// Largest dimension assembled as a dense normal matrix.
    pub dense_limit: usize,
    /// Use the coordinatewise closed form when the couple allows it.
    pub separable_shortcut: bool,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            mm_iterations: 400,
            subgradient_iterations: 2000,
            tolerance: T::of(1e-13),
            dense_limit: 96,
            separable_shortcut: true,
        }
    }
}

/// A decomposition `z = (z − y) + y` with its two norms.
#[derive(Clone, Debug)]
pub struct Splitting<T> {
    pub y: Vec<C<T>>,
    pub x_part: T,
    pub y_part: T,
}

impl<T: Real> Splitting<T> {
    pub fn new(x: &Norm<T>, ynorm: &Norm<T>, z: &[C<T>], y: Vec<C<T>>) -> Self {
        let r: Vec<C<T>> = z.iter().zip(&y).map(|(a, b)| *a - *b).collect();
        Self { x_part: x.eval(&r), y_part: ynorm.eval(&y), y }
    }

    pub fn value(&self, t: T) -> T {
        self.x_part + t * self.y_part
    }
}

fn sub<T: Real>(a: &[C<T>], b: &[C<T>]) -> Vec<C<T>> {
    a.iter().zip(b).map(|(u, v)| *u - *v).collect()
}

fn max_abs<T: Real>(v: &[C<T>]) -> T {
    v.iter().fold(T::zero(), |a, z| a.max(z.norm()))
}

fn mm_capable<T: Real>(n: &Norm<T>) -> bool {
    n.terms.iter().all(|t| t.mm_kind().is_some())
}

/// Closed form for coordinatewise ℓ¹ couples with diagonal maps.
pub(crate) fn separable<T: Real>(x: &Norm<T>, yn: &Norm<T>, z: &[C<T>], t: T) -> Option<Splitting<T>> {
    if !x.terms.iter().chain(&yn.terms).all(NormTerm::separable) {
        return None;
    }
    let coef = |terms: &[NormTerm<T>], i: usize| -> T {
        terms.iter().map(|term| term.scale * term.op.diag_entry(i).expect("diagonal").norm()).sum()
    };
    let y = z
        .iter()
        .enumerate()
        .map(|(i, zi)| if t * coef(&yn.terms, i) < coef(&x.terms, i) { *zi } else { czero() })
        .collect();
    Some(Splitting::new(x, yn, z, y))
}

/// Per-entry weights of the quadratic majorizer of `term` at image `v`.
fn weights<T: Real>(term: &NormTerm<T>, v: &[C<T>], eps: T) -> Vec<T> {
    let half = T::of(0.5) * term.scale;
    match term.mm_kind().expect("majorizable term") {
        MmKind::Element => v.iter().map(|z| half / z.norm().max(eps)).collect(),
        MmKind::Group => {
            let mut w = Vec::with_capacity(v.len());
            for c in v.chunks(term.group) {
                let g = Exponent::two().combine(c.iter().map(|z| z.norm()));
                w.extend(std::iter::repeat_n(half / g.max(eps), c.len()));
            }
            w
        }
        MmKind::Whole => {
            let g = Exponent::two().combine(v.iter().map(|z| z.norm()));
            vec![half / g.max(eps); v.len()]
        }
    }
}

enum System<T> {
    Diagonal,
    Dense(Vec<CMatrix<T>>, Vec<CMatrix<T>>),
    Iterative,
}

/// Majorize-minimize iteration from `y0`.
pub(crate) fn majorize_minimize<T: Real>(
    x: &Norm<T>,
    yn: &Norm<T>,
    z: &[C<T>],
    t: T,
    y0: Vec<C<T>>,
    opts: &SolverOptions<T>,
) -> Vec<C<T>> {
    let n = z.len();
    let all_diag = x.terms.iter().chain(&yn.terms).all(|term| term.op.is_diagonal());
    let system = if all_diag {
        System::Diagonal
    } else if n <= opts.dense_limit {
        System::Dense(
            x.terms.iter().map(|term| term.op.materialize(n)).collect(),
            yn.terms.iter().map(|term| term.op.materialize(n)).collect(),
        )
    } else {
        System::Iterative
    };
    let eps_of = |term: &NormTerm<T>| T::of(1e-12) * max_abs(&term.op.apply(z)).max(T::min_positive_value());
    let eps_x: Vec<T> = x.terms.iter().map(eps_of).collect();
    let eps_y: Vec<T> = yn.terms.iter().map(eps_of).collect();
    let objective = |y: &[C<T>]| x.eval(&sub(z, y)) + t * yn.eval(y);

    let mut y = y0;
    let mut f = objective(&y);
    for it in 0..opts.mm_iterations {
        let r = sub(z, &y);
        let wx: Vec<Vec<T>> = x.terms.iter().zip(&eps_x).map(|(term, e)| weights(term, &term.op.apply(&r), *e)).collect();
        let wy: Vec<Vec<T>> = yn
            .terms
            .iter()
            .zip(&eps_y)
            .map(|(term, e)| weights(term, &term.op.apply(&y), *e).into_iter().map(|w| w * t).collect())
            .collect();
        let next = match &system {
            System::Diagonal => {
                let mut diag = vec![T::zero(); n];
                let mut rhs = vec![czero(); n];
                for (term, w) in x.terms.iter().zip(&wx) {
                    for i in 0..n {
                        let l = term.op.diag_entry(i).expect("diagonal").norm_sqr() * w[i];
                        diag[i] += l;
                        rhs[i] += z[i] * l;
                    }
                }
                for (term, w) in yn.terms.iter().zip(&wy) {
                    for i in 0..n {
                        diag[i] += term.op.diag_entry(i).expect("diagonal").norm_sqr() * w[i];
                    }
                }
                rhs.iter().zip(&diag).map(|(r, d)| if *d > T::zero() { *r / *d } else { czero() }).collect()
            }
            System::Dense(mx, my) => {
                let mut m = CMatrix::zeros(n);
                let mut rhs_m = CMatrix::zeros(n);
                let weighted = |l: &CMatrix<T>, w: &[T]| {
                    let mut wl = l.clone();
                    for i in 0..n {
                        for j in 0..n {
                            wl.set(i, j, l.get(i, j) * w[i]);
                        }
                    }
                    l.adjoint().mul(&wl)
                };
                for (l, w) in mx.iter().zip(&wx) {
                    let g = weighted(l, w);
                    m = m.add(&g);
                    rhs_m = rhs_m.add(&g);
                }
                for (l, w) in my.iter().zip(&wy) {
                    m = m.add(&weighted(l, w));
                }
                match m.solve(&rhs_m.mul_vec(z)) {
                    Ok(v) => v,
                    Err(_) => break,
                }
            }
            System::Iterative => {
                let apply = |v: &[C<T>], include_y: bool| {
                    let mut out = vec![czero(); n];
                    let mut add = |terms: &[NormTerm<T>], ws: &[Vec<T>]| {
                        for (term, w) in terms.iter().zip(ws) {
                            let lv: Vec<C<T>> = term.op.apply(v).iter().zip(w).map(|(a, b)| *a * *b).collect();
                            for (o, u) in out.iter_mut().zip(term.op.adjoint(&lv)) {
                                *o += u;
                            }
                        }
                    };
                    add(&x.terms, &wx);
                    if include_y {
                        add(&yn.terms, &wy);
                    }
                    out
                };
                let rhs = apply(z, false);
                conjugate_gradient(|v| apply(v, true), &rhs, y.clone(), 500, T::of(1e-14))
            }
        };
        let f_next = objective(&next);
        if !(f_next <= f) {
            if it > 0 {
                break;
            }
            continue;
        }
        let gain = f - f_next;
        y = next;
        f = f_next;
        if gain <= opts.tolerance * f.max(T::min_positive_value()) && it >= 2 {
            break;
        }
    }
    y
}

/// Conjugate gradients for a Hermitian positive definite map.
pub fn conjugate_gradient<T: Real, A: Fn(&[C<T>]) -> Vec<C<T>>>(
    a: A,
    b: &[C<T>],
    x0: Vec<C<T>>,
    max_iter: usize,
    tol: T,
) -> Vec<C<T>> {
    let dot = |u: &[C<T>], v: &[C<T>]| u.iter().zip(v).map(|(p, q)| p.conj() * *q).fold(czero::<T>(), |s, w| s + w);
    let mut x = x0;
    let ax = a(&x);
    let mut r: Vec<C<T>> = b.iter().zip(&ax).map(|(u, v)| *u - *v).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let bnorm = dot(b, b).re.sqrt();
    for _ in 0..max_iter {
        if rr.sqrt() <= tol * bnorm {
            break;
        }
        let ap = a(&p);
        let pap = dot(&p, &ap).re;
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rr / pap;
        for i in 0..x.len() {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..p.len() {
            p[i] = r[i] + p[i] * beta;
        }
    }
    x
}

/// Gradient (w.r.t. the image vector) of a norm term at `v`.
fn term_gradient<T: Real>(term: &NormTerm<T>, v: &[C<T>]) -> Vec<C<T>> {
    let g = term.group;
    let groups: Vec<T> = v.chunks(g).map(|c| term.inner.combine(c.iter().map(|z| z.norm()))).collect();
    let total = term.outer.combine(groups.iter().copied());
    let mut out = vec![czero(); v.len()];
    if total == T::zero() {
        return out;
    }
    let outer_w: Vec<T> = match term.outer {
        Exponent::Infinity => {
            let k = groups.iter().enumerate().fold(0, |b, (i, x)| if *x > groups[b] { i } else { b });
            (0..groups.len()).map(|i| if i == k { T::one() } else { T::zero() }).collect()
        }
        Exponent::Finite(p) => groups.iter().map(|n| (*n / total).powf(p - T::one())).collect(),
    };
    for (gi, c) in v.chunks(g).enumerate() {
        let ng = groups[gi];
        if ng == T::zero() || outer_w[gi] == T::zero() {
            continue;
        }
        let inner_w: Vec<T> = match term.inner {
            Exponent::Infinity => {
                let k = c.iter().enumerate().fold(0, |b, (i, x)| if x.norm() > c[b].norm() { i } else { b });
                (0..c.len()).map(|i| if i == k { T::one() } else { T::zero() }).collect()
            }
            Exponent::Finite(r) => c.iter().map(|z| (z.norm() / ng).powf(r - T::one())).collect(),
        };
        for (j, z) in c.iter().enumerate() {
            let a = z.norm();
            if a > T::zero() {
                out[gi * g + j] = *z / a * (term.scale * outer_w[gi] * inner_w[j]);
            }
        }
    }
    out
}

fn norm_gradient<T: Real>(n: &Norm<T>, v: &[C<T>]) -> Vec<C<T>> {
    let mut out = vec![czero(); v.len()];
    for term in &n.terms {
        let img = term.op.apply(v);
        let g = term.op.adjoint(&term_gradient(term, &img));
        for (o, u) in out.iter_mut().zip(g) {
            *o += u;
        }
    }
    out
}

/// Subgradient descent with a Polyak step toward a shrinking target below the best value.
pub(crate) fn subgradient<T: Real>(
    x: &Norm<T>,
    yn: &Norm<T>,
    z: &[C<T>],
    t: T,
    y0: Vec<C<T>>,
    iterations: usize,
    bound: T,
) -> Result<Vec<C<T>>> {
    let objective = |y: &[C<T>]| x.eval(&sub(z, y)) + t * yn.eval(y);
    let mut y = y0;
    let mut best = (objective(&y), y.clone());
    let mut gap = T::of(0.1);
    let mut stall = 0;
    for _ in 0..iterations {
        let f = objective(&y);
        let gx = norm_gradient(x, &sub(z, &y));
        let gy = norm_gradient(yn, &y);
        let g: Vec<C<T>> = gx.iter().zip(&gy).map(|(a, b)| *b * t - *a).collect();
        let gg: T = g.iter().map(|v| v.norm_sqr()).sum();
        if gg == T::zero() {
            break;
        }
        let target = best.0 * (T::one() - gap);
        let step = (f - target) / gg;
        for (yi, gi) in y.iter_mut().zip(&g) {
            *yi -= *gi * step;
        }
        let xn = x.eval(&y);
        if xn > bound {
            return Err(Error::SolverDiverged { norm: xn.as_f64(), bound: bound.as_f64() });
        }
        let fy = objective(&y);
        if fy < best.0 {
            best = (fy, y.clone());
            stall = 0;
        } else {
            stall += 1;
            if stall >= 25 {
                gap = gap * T::of(0.5);
                y = best.1.clone();
                stall = 0;
                if gap < T::of(1e-12) {
                    break;
                }
            }
        }
    }
    Ok(best.1)
}

/// Best splitting found from the trivial splits, an optional warm start and the iterative solvers.
pub fn solve<T: Real>(
    x: &Norm<T>,
    yn: &Norm<T>,
    z: &[C<T>],
    t: T,
    warm: Option<&[C<T>]>,
    opts: &SolverOptions<T>,
) -> Result<Splitting<T>> {
    let zero = vec![czero(); z.len()];
    let mut best = Splitting::new(x, yn, z, zero.clone());
    let consider = |s: Splitting<T>, best: &mut Splitting<T>| {
        if s.value(t) < best.value(t) {
            *best = s;
        }
    };
    consider(Splitting::new(x, yn, z, z.to_vec()), &mut best);
    if max_abs(z) == T::zero() {
        return Ok(best);
    }
    if opts.separable_shortcut {
        if let Some(s) = separable(x, yn, z, t) {
            consider(s, &mut best);
            return Ok(best);
        }
    }
    let bound = T::of(10.0) * x.eval(z);
    let half: Vec<C<T>> = z.iter().map(|v| *v * T::of(0.5)).collect();
    let mut starts = vec![half];
    if let Some(w) = warm {
        // keep the start off the non-smooth set so that the weights stay finite
        let eta = T::of(1e-3);
        starts.insert(0, w.iter().zip(z).map(|(a, b)| *a * (T::one() - eta) + *b * (eta * T::of(0.5))).collect());
    }
    if mm_capable(x) && mm_capable(yn) {
        for s in starts {
            let y = majorize_minimize(x, yn, z, t, s, opts);
            let sp = Splitting::new(x, yn, z, y);
            if x.eval(&sp.y) > bound {
                return Err(Error::SolverDiverged { norm: x.eval(&sp.y).as_f64(), bound: bound.as_f64() });
            }
            consider(polish(x, yn, z, t, &sp), &mut best);
        }
    } else {
        for s in [zero, z.to_vec()].into_iter().chain(starts) {
            let y = subgradient(x, yn, z, t, s, opts.subgradient_iterations, bound)?;
            consider(polish(x, yn, z, t, &Splitting::new(x, yn, z, y)), &mut best);
        }
    }
    Ok(best)
}

/// Snaps nearly-zero residual or nearly-zero entries exactly onto the non-smooth set.
fn polish<T: Real>(x: &Norm<T>, yn: &Norm<T>, z: &[C<T>], t: T, s: &Splitting<T>) -> Splitting<T> {
    let scale = max_abs(z);
    let mut best = s.clone();
    for delta in [1e-2, 1e-4, 1e-6, 1e-9] {
        let d = scale * T::of(delta);
        let y: Vec<C<T>> = s
            .y
            .iter()
            .zip(z)
            .map(|(yi, zi)| {
                if (*zi - *yi).norm() <= d {
                    *zi
                } else if yi.norm() <= d {
                    czero()
                } else {
                    *yi
                }
            })
            .collect();
        let cand = Splitting::new(x, yn, z, y);
        if cand.value(t) < best.value(t) {
            best = cand;
        }
    }
    best
}
