//! Norms of the form `Σ_terms s · ‖(L v)‖_{ℓ^p(ℓ^r)}` with `L` linear.

use std::sync::Arc;

use crate::dense::CMatrix;
use crate::scalar::{cplx, czero, Exponent, Real, C};

type VecMap<T> = Arc<dyn Fn(&[C<T>]) -> Vec<C<T>> + Send + Sync>;

/// Linear map inside a norm term.
#[derive(Clone)]
pub enum LinearOp<T> {
    Identity,
    Diagonal(Arc<Vec<C<T>>>),
    Dense(Arc<CMatrix<T>>),
    /// Matrix-free map with its adjoint.
    Operator { apply: VecMap<T>, adjoint: VecMap<T> },
}

impl<T> std::fmt::Debug for LinearOp<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LinearOp::Identity => write!(f, "Identity"),
            LinearOp::Diagonal(d) => write!(f, "Diagonal({})", d.len()),
            LinearOp::Dense(_) => write!(f, "Dense"),
            LinearOp::Operator { .. } => write!(f, "Operator"),
        }
    }
}

impl<T: Real> LinearOp<T> {
    pub fn diagonal(d: Vec<C<T>>) -> Self {
        LinearOp::Diagonal(Arc::new(d))
    }

    pub fn dense(m: CMatrix<T>) -> Self {
        LinearOp::Dense(Arc::new(m))
    }

    pub fn operator<F, G>(apply: F, adjoint: G) -> Self
    where
        F: Fn(&[C<T>]) -> Vec<C<T>> + Send + Sync + 'static,
        G: Fn(&[C<T>]) -> Vec<C<T>> + Send + Sync + 'static,
    {
        LinearOp::Operator { apply: Arc::new(apply), adjoint: Arc::new(adjoint) }
    }

    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        match self {
            LinearOp::Identity => v.to_vec(),
            LinearOp::Diagonal(d) => v.iter().zip(d.iter()).map(|(a, b)| *a * *b).collect(),
            LinearOp::Dense(m) => m.mul_vec(v),
            LinearOp::Operator { apply, .. } => apply(v),
        }
    }

    pub fn adjoint(&self, v: &[C<T>]) -> Vec<C<T>> {
        match self {
            LinearOp::Identity => v.to_vec(),
            LinearOp::Diagonal(d) => v.iter().zip(d.iter()).map(|(a, b)| *a * b.conj()).collect(),
            LinearOp::Dense(m) => m.adjoint().mul_vec(v),
            LinearOp::Operator { adjoint, .. } => adjoint(v),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, LinearOp::Identity | LinearOp::Diagonal(_))
    }

    /// Diagonal entry `i` for diagonal maps.
    pub fn diag_entry(&self, i: usize) -> Option<C<T>> {
        match self {
            LinearOp::Identity => Some(cplx(T::one(), T::zero())),
            LinearOp::Diagonal(d) => Some(d[i]),
            _ => None,
        }
    }

    /// Dense matrix of the map on `ℂ^n`.
    pub fn materialize(&self, n: usize) -> CMatrix<T> {
        match self {
            LinearOp::Dense(m) => (**m).clone(),
            _ => {
                let mut m = CMatrix::zeros(n);
                let mut e = vec![czero(); n];
                for j in 0..n {
                    e[j] = cplx(T::one(), T::zero());
                    let col = self.apply(&e);
                    for (i, v) in col.iter().enumerate() {
                        m.set(i, j, *v);
                    }
                    e[j] = czero();
                }
                m
            }
        }
    }
}

/// `scale · ‖(‖(L v)_g‖_{inner})_g‖_{outer}` over consecutive groups of `group` entries.
#[derive(Clone, Debug)]
pub struct NormTerm<T> {
    pub op: LinearOp<T>,
    pub group: usize,
    pub outer: Exponent<T>,
    pub inner: Exponent<T>,
    pub scale: T,
}

impl<T: Real> NormTerm<T> {
    pub fn new(op: LinearOp<T>, group: usize, outer: Exponent<T>, inner: Exponent<T>, scale: T) -> Self {
        Self { op, group: group.max(1), outer, inner, scale }
    }

    /// Value on an already transformed vector `Lv`.
    pub fn eval_image(&self, w: &[C<T>]) -> T {
        let g = self.group;
        let inner = self.inner;
        let mags = w.chunks(g).map(|c| inner.combine(c.iter().map(|z| z.norm())));
        self.scale * self.outer.combine(mags)
    }

    pub fn eval(&self, v: &[C<T>]) -> T {
        self.eval_image(&self.op.apply(v))
    }

    /// Structure the majorize-minimize solver can handle.
    pub(crate) fn mm_kind(&self) -> Option<MmKind> {
        let elementwise = self.group == 1 || self.inner.is(1.0);
        if self.outer.is(1.0) && elementwise {
            Some(MmKind::Element)
        } else if self.outer.is(1.0) && self.inner.is(2.0) {
            Some(MmKind::Group)
        } else if self.outer.is(2.0) && (self.group == 1 || self.inner.is(2.0)) {
            Some(MmKind::Whole)
        } else {
            None
        }
    }

    pub(crate) fn separable(&self) -> bool {
        self.op.is_diagonal() && matches!(self.mm_kind(), Some(MmKind::Element))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum MmKind {
    Element,
    Group,
    Whole,
}

/// Sum of norm terms.
#[derive(Clone, Debug)]
pub struct Norm<T> {
    pub terms: Vec<NormTerm<T>>,
}

impl<T: Real> Norm<T> {
    pub fn new(terms: Vec<NormTerm<T>>) -> Self {
        Self { terms }
    }

    /// `scale · ‖v‖_{ℓ^p(ℓ^r)}` with fibers of size `group`.
    pub fn mixed(group: usize, outer: Exponent<T>, inner: Exponent<T>, scale: T) -> Self {
        Self::new(vec![NormTerm::new(LinearOp::Identity, group, outer, inner, scale)])
    }

    /// Plain `ℓ^p` norm on `ℂ^n`.
    pub fn lp(p: Exponent<T>) -> Self {
        Self::mixed(1, p, p, T::one())
    }

    /// Graph norm `‖v‖ + ‖Av‖` built on the single-term norm `base`.
    pub fn graph(base: &Self, a: LinearOp<T>) -> Self {
        let mut terms = base.terms.clone();
        for t in &base.terms {
            if let LinearOp::Identity = t.op {
                terms.push(NormTerm { op: a.clone(), ..t.clone() });
            }
        }
        Self::new(terms)
    }

    pub fn eval(&self, v: &[C<T>]) -> T {
        self.terms.iter().map(|t| t.eval(v)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_norm_values() {
        let v = vec![cplx(3.0, 4.0), cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, -1.0)];
        let n12 = Norm::mixed(2, Exponent::one(), Exponent::two(), 2.0);
        assert!((n12.eval(&v) - 2.0 * (5.0 + 2f64.sqrt())).abs() < 1e-14);
        let l1 = Norm::<f64>::lp(Exponent::one());
        assert!((l1.eval(&v) - 7.0).abs() < 1e-14);
        let g = Norm::graph(&l1, LinearOp::diagonal(vec![cplx(2.0, 0.0); 4]));
        assert!((g.eval(&v) - 21.0).abs() < 1e-14);
    }

    #[test]
    fn materialized_operator_matches() {
        let op = LinearOp::operator(
            |v: &[C<f64>]| vec![v[0] + v[1], v[1] * 2.0],
            |v: &[C<f64>]| vec![v[0], v[0] + v[1] * 2.0],
        );
        let m = op.materialize(2);
        assert_eq!(m.get(0, 1), cplx(1.0, 0.0));
        assert_eq!(m.get(1, 1), cplx(2.0, 0.0));
        assert_eq!(m.get(1, 0), czero());
    }
}
