use crate::dense::CMatrix;
use crate::gridfn::GridFunction;
use crate::groups::{GroupKind, GroupModel};
use crate::measure::Measure;
use crate::scalar::{cplx, czero, Extended, Real, C};
use crate::{Error, Result};

/// Exponential type used to order strips: the exact `max |Im λ|` when the
/// spectrum is known, otherwise a fitted `θ` over `[0, 10]`.
pub fn group_type_bound<T: Real>(g: &GroupModel<T>) -> Result<T> {
    match g.spectral_strip() {
        Some(w) => Ok(w),
        None => Ok(g.estimate_group_type(T::of(10.0), 41)?.theta_hat),
    }
}

fn check_growth<T: Real>(g: &GroupModel<T>, mu: &Measure<T>) -> Result<()> {
    if matches!(g.kind(), GroupKind::Shift { .. } | GroupKind::Multiplication { .. }) {
        return Ok(());
    }
    let growth = group_type_bound(g)?;
    match mu.decay_weight() {
        Extended::Infinite => Ok(()),
        Extended::Finite(d) if d > growth || (growth == T::zero() && d == T::zero()) => Ok(()),
        Extended::Finite(d) => Err(Error::GrowthMismatch { decay: d.as_f64(), growth: growth.as_f64() }),
    }
}

/// `U_μ x = ∫ U(s)x μ(ds)`, densities integrated by the lattice rule.
///
/// Grid models and diagonalizable matrices apply the symbol `Fμ` on the
/// spectrum directly; that is the same lattice sum evaluated in closed form.
pub fn phillips<T: Real>(g: &GroupModel<T>, mu: &Measure<T>, x: &[C<T>]) -> Result<Vec<C<T>>> {
    check_growth(g, mu)?;
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: x.len() });
    }
    match g.kind() {
        GroupKind::Shift { spec, .. } => {
            let f = GridFunction::from_values(*spec, x.to_vec())?;
            // U(s) multiplies frequency ξ by e^{isξ} = e^{−is(−ξ)}
            let symbol: Vec<C<T>> =
                spec.frequencies().iter().map(|xi| mu.fourier(cplx(-*xi, T::zero()))).collect::<Result<_>>()?;
            Ok(f.apply_symbol_values(&symbol)?.into_values())
        }
        GroupKind::Multiplication { spec, symbol, .. } => {
            let d = spec.fiber_dim();
            let fa: Vec<C<T>> = symbol.iter().map(|a| mu.fourier(cplx(*a, T::zero()))).collect::<Result<_>>()?;
            Ok(x.iter().enumerate().map(|(i, v)| *v * fa[i / d]).collect())
        }
        GroupKind::Matrix { .. } => Ok(phillips_matrix(g, mu)?.mul_vec(x)),
    }
}

/// The matrix of `U_μ` for a matrix group.
pub fn phillips_matrix<T: Real>(g: &GroupModel<T>, mu: &Measure<T>) -> Result<CMatrix<T>> {
    check_growth(g, mu)?;
    let GroupKind::Matrix { a, .. } = g.kind() else {
        return Err(Error::InvalidParameter("phillips_matrix needs a matrix group".into()));
    };
    let n = a.dim();
    if a.is_diagonal() {
        let d: Vec<C<T>> = a.diagonal().into_iter().map(|l| mu.fourier(l)).collect::<Result<_>>()?;
        return Ok(CMatrix::from_diag(&d));
    }
    let mut acc = CMatrix::zeros(n);
    for (s, w) in mu.atoms() {
        acc = acc.add(&g.group_matrix(*s)?.scale(*w));
    }
    if let Some(d) = mu.density() {
        let step = g.group_matrix(d.h)?;
        let mut u = g.group_matrix(d.left)?;
        let mut sum = CMatrix::zeros(n);
        for (j, v) in d.samples.iter().enumerate() {
            if j > 0 {
                u = step.mul(&u);
            }
            if *v != czero() {
                sum = sum.add(&u.scale(*v));
            }
        }
        acc = acc.add(&sum.scale(cplx(d.h, T::zero())));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::GridSpec;
    use crate::scalar::{l2, l2_dist, Exponent};

    fn c(re: f64, im: f64) -> C<f64> {
        cplx(re, im)
    }

    #[test]
    fn dirac_gives_group_action() {
        let a = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.3]]).unwrap();
        let g = GroupModel::matrix(a, Exponent::two());
        let x = vec![c(1.0, 2.0), c(-0.5, 0.0)];
        let y = phillips(&g, &Measure::dirac(0.7), &x).unwrap();
        assert!(l2_dist(&y, &g.apply_group(0.7, &x).unwrap()) < 1e-14);
        assert!(l2_dist(&phillips(&g, &Measure::dirac(0.0), &x).unwrap(), &x) < 1e-15);
    }

    #[test]
    fn gaussian_gives_heat_operator() {
        let diag = [c(-1.5, 0.0), c(0.2, 0.0), c(2.0, 0.0)];
        let g = GroupModel::matrix(CMatrix::from_diag(&diag), Exponent::two());
        let mu = Measure::gaussian(1.0, 12.0, 0.05).unwrap();
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)];
        let y = phillips(&g, &mu, &x).unwrap();
        for j in 0..3 {
            let want = x[j] * (-diag[j].re * diag[j].re / 2.0).exp();
            assert!((y[j] - want).norm() < 1e-8, "{j}");
        }
    }

    #[test]
    fn jordan_density_matches_diagonal_route() {
        // upper-triangular with distinct eigenvalues: compare lattice recurrence with eigen route
        let a = CMatrix::from_real_rows(&[vec![0.5, 1.0], vec![0.0, -0.5]]).unwrap();
        let s = CMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, -1.0]]).unwrap();
        let g1 = GroupModel::matrix(a, Exponent::two());
        let g2 = GroupModel::from_eigen(s, vec![c(0.5, 0.0), c(-0.5, 0.0)], Exponent::two()).unwrap();
        let mu = Measure::gaussian(0.5, 8.0, 0.02).unwrap();
        let x = vec![c(0.3, -0.2), c(1.0, 0.5)];
        let y1 = phillips(&g1, &mu, &x).unwrap();
        let y2 = phillips(&g2, &mu, &x).unwrap();
        assert!(l2_dist(&y1, &y2) < 1e-11 * l2(&x));
    }

    #[test]
    fn shift_symbol_matches_translations() {
        let spec = GridSpec::scalar(8.0, 128).unwrap();
        let g = GroupModel::shift(spec, Exponent::two());
        let mu = Measure::from_atoms(vec![(0.25, c(1.0, 0.0)), (-1.0, c(0.0, 0.5))]).unwrap();
        let f = GridFunction::from_scalar_fn(spec, |t: f64| c((-t * t).exp(), 0.0)).unwrap();
        let y = phillips(&g, &mu, f.values()).unwrap();
        let mut want = g.apply_group(0.25, f.values()).unwrap();
        for (w, v) in want.iter_mut().zip(g.apply_group(-1.0, f.values()).unwrap()) {
            *w += v * c(0.0, 0.5);
        }
        assert!(l2_dist(&y, &want) < 1e-12);
    }

    #[test]
    fn growth_mismatch() {
        let g = GroupModel::matrix(CMatrix::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)]), Exponent::two());
        let mu = Measure::dirac(1.0).with_decay(Extended::Finite(0.5)).unwrap();
        assert!(matches!(phillips(&g, &mu, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::GrowthMismatch { .. })));
    }
}
