use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use translab::calculus::{cauchy_strip, phillips, ContourOptions};
use translab::interp::random_vector;
use translab::scalar::{cplx, l2, l2_dist};
use translab::transfer::embedding_bounds;
use translab::{
    CMatrix, CMatrix64, Exponent, GridFunction64, GridSpec, GridSpec64, GroupModel, GroupModel64, Measure, Measure64, StripFunction64,
    TransferKernels64, C64,
};

fn jordan(lambda: C64, n: usize) -> CMatrix64 {
    let mut m = CMatrix64::from_diag(&vec![lambda; n]);
    for i in 0..n - 1 {
        m.set(i, i + 1, cplx(1.0, 0.0));
    }
    m
}

#[test]
fn cauchy_integral_of_a_fourier_transform_matches_phillips() {
    // Gaussian of variance 2 has Fourier transform e^{−z²}
    let mu = Measure64::gaussian(2.0, 16.0, 0.05).unwrap();
    let f = StripFunction64::gauss();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for a in [jordan(cplx(0.4, 0.1), 4), CMatrix64::from_diag(&[cplx(-1.0, 0.2), cplx(0.5, -0.3), cplx(2.0, 0.0)])] {
        let g = GroupModel64::matrix(a.clone(), Exponent::two());
        let x = random_vector::<f64>(&mut rng, a.dim());
        let via_contour = cauchy_strip(&g, &f, &ContourOptions::new(1.0), &x).unwrap().value;
        let via_measure = phillips(&g, &mu, &x).unwrap();
        assert!(l2_dist(&via_contour, &via_measure) <= 1e-5 * l2(&x), "{}", l2_dist(&via_contour, &via_measure));
    }
}

#[test]
fn difference_quotients_converge_to_the_generator_at_first_order() {
    let spec = GridSpec64::scalar(16.0, 512).unwrap();
    let models = [
        GroupModel64::shift(spec, Exponent::two()),
        GroupModel64::multiplication(spec, |t| t.cos(), Exponent::two()),
        GroupModel64::matrix(jordan(cplx(0.5, 0.0), 3), Exponent::two()),
    ];
    for g in &models {
        let x: Vec<C64> = match g.grid() {
            Some(s) => GridFunction64::from_scalar_fn(*s, |t| cplx((-t * t / 4.0).exp(), 0.0)).unwrap().into_values(),
            None => vec![cplx(1.0, 0.0), cplx(-0.5, 0.2), cplx(0.3, 0.0)],
        };
        let ax = g.generator(&x).unwrap();
        let err = |h: f64| {
            let u = g.apply_group(h, &x).unwrap();
            let d: Vec<C64> = u.iter().zip(&x).zip(&ax).map(|((u, x), a)| (u - x) / h + cplx(0.0, 1.0) * a).collect();
            l2(&d)
        };
        let order = (err(1e-3) / err(5e-4)).log2();
        assert!(order >= 0.9, "observed order {order}");
    }
}

#[test]
fn resolvent_bounds_shrink_away_from_the_strip() {
    let g = GroupModel64::matrix(jordan(cplx(0.0, 0.3), 3), Exponent::two());
    let theta = g.estimate_group_type(10.0, 41).unwrap().theta_hat;
    let sup = |omega: f64| {
        let mut m = 0.0f64;
        for j in -40..=40 {
            for sign in [1.0, -1.0] {
                let lambda = cplx(0.25 * f64::from(j), sign * omega);
                m = m.max(g.resolvent_norm(lambda).unwrap().upper);
            }
        }
        m
    };
    let values: Vec<f64> = [0.2, 0.5, 1.0, 2.0].iter().map(|d| sup(theta.max(0.3) + d)).collect();
    assert!(values.iter().all(|v| v.is_finite()));
    assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
}

#[test]
fn embedding_and_projection_bounds_hold_per_probe() {
    let k = TransferKernels64::bounded(2.0, 0.5, 0.5, GridSpec64::scalar(8.0, 1024).unwrap()).unwrap();
    let s = CMatrix64::from_real_rows(&[vec![1.0, 0.5, 0.0], vec![0.0, 1.0, 0.3], vec![-0.2, 0.0, 1.0]]).unwrap();
    let g = GroupModel64::from_eigen(s, vec![cplx(0.7, 0.0), cplx(-1.2, 0.0), cplx(2.0, 0.0)], Exponent::two()).unwrap();
    let m = (-80..=80).map(|j| g.group_norm(f64::from(j) * 0.1).unwrap().upper).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let x = random_vector::<f64>(&mut rng, 3);
        let e = embedding_bounds(&k, &g, &x, Exponent::two(), m, 0.0).unwrap();
        for (name, (measured, bound)) in
            [("iota", e.iota), ("projection", e.projection), ("iota_sobolev", e.iota_sobolev), ("projection_sobolev", e.projection_sobolev)]
        {
            assert!(measured <= bound * (1.0 + 1e-9), "{name}: {measured} > {bound}");
        }
    }
}

#[test]
fn single_precision_instantiation() {
    let mu: Measure<f32> = Measure::gaussian(1.0, 8.0, 1.0 / 16.0).unwrap();
    let nu: Measure<f32> = Measure::dirac(0.5);
    let z = cplx(1.5f32, 0.0);
    let lhs = mu.convolve(&nu).unwrap().fourier(z).unwrap();
    let rhs = mu.fourier(z).unwrap() * nu.fourier(z).unwrap();
    assert!((lhs - rhs).norm() <= 1e-5);
    assert!((mu.fourier(z).unwrap().re - (-1.125f32).exp()).abs() <= 1e-4);

    let a: CMatrix<f32> = CMatrix::from_diag(&[cplx(0.5, 0.0), cplx(-1.0, 0.0)]);
    let g: GroupModel<f32> = GroupModel::matrix(a, Exponent::two());
    let x = vec![cplx(1.0f32, 0.0), cplx(0.0, 1.0)];
    let y = phillips(&g, &mu, &x).unwrap();
    assert!((y[0].re - (-0.125f32).exp()).abs() <= 1e-4);
    assert!((y[1].im - (-0.5f32).exp()).abs() <= 1e-4);

    let spec: GridSpec<f32> = GridSpec::scalar(8.0, 64).unwrap();
    assert!(translab::besov::DyadicPartition::new(&spec).unity_defect() <= 1e-5);
}

#[test]
fn shift_group_is_an_isometry_and_preserves_besov_norms() {
    let spec = GridSpec64::scalar(16.0, 256).unwrap();
    let g = GroupModel64::shift(spec, Exponent::Finite(3.0));
    let f = GridFunction64::from_scalar_fn(spec, |t| cplx((-t * t).exp(), (t / 3.0).sin() * (-t * t / 8.0).exp())).unwrap();
    let norm = translab::besov::besov_norm(&f, 0.5, Exponent::Finite(3.0), Exponent::two());
    for s in [-2.0, 0.5, 3.0] {
        let shifted = GridFunction64::from_values(spec, g.apply_group(s * spec.h() * 8.0, f.values()).unwrap()).unwrap();
        let moved = translab::besov::besov_norm(&shifted, 0.5, Exponent::Finite(3.0), Exponent::two());
        assert!((moved - norm).abs() <= 1e-10 * norm);
        assert!((g.norm(shifted.values()) - g.norm(f.values())).abs() <= 1e-10 * g.norm(f.values()));
    }
}
