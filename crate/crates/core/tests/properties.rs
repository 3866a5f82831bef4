use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use translab::besov::{besov_norm, DyadicPartition};
use translab::calculus::phillips;
use translab::groups::random_band_limited;
use translab::interp::{random_vector, LinearOp, Norm};
use translab::scalar::{cplx, l2, l2_dist};
use translab::{CMatrix64, Density, Exponent, Exponent64, Extended, GridFunction64, GridSpec64, GroupModel64, InterpCouple64, Measure64, C64};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| cplx(a, b))
}

/// Atoms on a `1/16` lattice plus an optional density with an even sample count.
fn measure() -> impl Strategy<Value = Measure64> {
    let atoms = prop::collection::vec((-32i32..=32, complex()), 0..4);
    let density = prop::option::of((-20i32..0, prop::collection::vec(complex(), 1..12)));
    (atoms, density).prop_map(|(atoms, density)| {
        let h = 1.0 / 16.0;
        let atoms = atoms.into_iter().map(|(j, w)| (f64::from(j) * h, w)).collect();
        let density = density.map(|(left, half)| {
            let mut s = half.clone();
            s.extend(half.iter().rev());
            Density::new(f64::from(left) * h, h, s).unwrap()
        });
        Measure64::new(atoms, density, Extended::Infinite).unwrap()
    })
}

fn unit_exponent() -> impl Strategy<Value = Exponent64> {
    prop_oneof![Just(Exponent::one()), Just(Exponent::two()), Just(Exponent::Finite(3.0)), Just(Exponent::Infinity)]
}

fn real_diag(values: &[f64]) -> CMatrix64 {
    CMatrix64::from_diag(&values.iter().map(|v| cplx(*v, 0.0)).collect::<Vec<_>>())
}

fn jordan(lambda: C64, n: usize) -> CMatrix64 {
    let mut m = CMatrix64::from_diag(&vec![lambda; n]);
    for i in 0..n - 1 {
        m.set(i, i + 1, cplx(1.0, 0.0));
    }
    m
}

fn spec() -> GridSpec64 {
    GridSpec64::scalar(8.0, 256).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fourier_turns_convolution_into_products(mu in measure(), nu in measure(), xi in -12.0..12.0f64) {
        let z = cplx(xi, 0.0);
        let (a, b) = (mu.fourier(z).unwrap(), nu.fourier(z).unwrap());
        let c = mu.convolve(&nu).unwrap().fourier(z).unwrap();
        prop_assert!((c - a * b).norm() <= 1e-6 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn weighted_variation_is_submultiplicative(mu in measure(), nu in measure(), omega in 0.0..1.5f64) {
        let tv = |m: &Measure64| m.total_variation_weighted(omega).finite().unwrap();
        let lhs = tv(&mu.convolve(&nu).unwrap());
        prop_assert!(lhs <= tv(&mu) * tv(&nu) * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn fourier_is_bounded_by_total_variation(mu in measure(), xi in -50.0..50.0f64) {
        prop_assert!(mu.fourier(cplx(xi, 0.0)).unwrap().norm() <= mu.total_variation() * (1.0 + 1e-12) + 1e-14);
    }

    #[test]
    fn young_inequality_on_the_grid(mu in measure(), seed in any::<u64>(), p in unit_exponent()) {
        let f = random_band_limited(&mut rng(seed), &spec(), spec().nyquist() * 0.5);
        let g = f.convolve_measure(&mu);
        prop_assert!(g.lp_norm(p) <= mu.total_variation() * f.lp_norm(p) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn convolution_commutes_with_grid_translation(mu in measure(), seed in any::<u64>(), m in -40isize..40) {
        let f = random_band_limited(&mut rng(seed), &spec(), spec().nyquist() * 0.5);
        let a = f.convolve_measure(&mu).roll(m);
        let b = f.roll(m).convolve_measure(&mu);
        prop_assert!(l2_dist(a.values(), b.values()) <= 1e-12 * (1.0 + l2(a.values())));
    }

    #[test]
    fn derivative_of_a_pure_frequency(k in 1usize..60, c in complex()) {
        let s = spec();
        let xi = s.frequency(k);
        let e = GridFunction64::from_scalar_fn(s, |t| c * translab::scalar::cis(xi * t)).unwrap();
        let d = e.derivative();
        prop_assert!((d.lp_norm(Exponent::two()) - xi.abs() * e.lp_norm(Exponent::two())).abs() <= 1e-9 * (1.0 + xi.abs()));
        let flat = GridFunction64::from_scalar_fn(s, |_| c).unwrap().derivative();
        prop_assert!(flat.lp_norm(Exponent::Infinity) <= 1e-12);
    }

    #[test]
    fn besov_norms_decrease_in_q(seed in any::<u64>(), r in 0.0..1.0f64, p in unit_exponent()) {
        let f = random_band_limited(&mut rng(seed), &spec(), spec().nyquist() * 0.75);
        let qs = [Exponent::one(), Exponent::two(), Exponent::Finite(4.0), Exponent::Infinity];
        let norms: Vec<f64> = qs.iter().map(|q| besov_norm(&f, r, p, *q)).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn multipliers_compose(seed in any::<u64>(), a in -2.0..2.0f64, b in 0.1..3.0f64) {
        let f = random_band_limited(&mut rng(seed), &spec(), spec().nyquist() * 0.5);
        let m1 = move |xi: f64| cplx((a * xi).sin(), 1.0);
        let m2 = move |xi: f64| cplx(1.0 / (1.0 + b * xi * xi), xi.cos());
        let two = f.apply_symbol(m1).apply_symbol(m2);
        let one = f.apply_symbol(move |xi| m1(xi) * m2(xi));
        prop_assert!(l2_dist(two.values(), one.values()) <= 1e-12 * (1.0 + l2(f.values())));
    }

    #[test]
    fn group_law_on_all_models(seed in any::<u64>(), s in -3.0..3.0f64, r in -3.0..3.0f64, lambda in complex()) {
        let models = [
            GroupModel64::shift(spec(), Exponent::two()),
            GroupModel64::multiplication(spec(), |t| (0.5 * t).sin(), Exponent::two()),
            GroupModel64::matrix(jordan(lambda, 4), Exponent::two()),
        ];
        let mut rng = rng(seed);
        for g in &models {
            let x = g.random_state(&mut rng);
            let a = g.apply_group(s, &g.apply_group(r, &x).unwrap()).unwrap();
            let b = g.apply_group(s + r, &x).unwrap();
            prop_assert!(l2_dist(&a, &b) <= 1e-9 * l2(&x) * (1.0 + (r.abs() + s.abs()) * 4.0).powi(3));
        }
    }

    #[test]
    fn resolvent_identity(seed in any::<u64>(), re in -3.0..3.0f64, im1 in 0.5..3.0f64, im2 in 0.5..3.0f64, sign in prop::bool::ANY) {
        let mut rng = rng(seed);
        let sgn = if sign { 1.0 } else { -1.0 };
        let lam = cplx(re, sgn * im1);
        let mu = cplx(-re, -sgn * im2);
        let models = [
            GroupModel64::shift(spec(), Exponent::two()),
            GroupModel64::matrix(jordan(cplx(0.3, 0.2), 3), Exponent::two()),
        ];
        for g in &models {
            let x = g.random_state(&mut rng);
            let lhs: Vec<C64> = g.resolvent(lam, &x).unwrap().iter().zip(g.resolvent(mu, &x).unwrap()).map(|(a, b)| a - b).collect();
            let rhs: Vec<C64> = g.resolvent(lam, &g.resolvent(mu, &x).unwrap()).unwrap().into_iter().map(|v| v * (mu - lam)).collect();
            prop_assert!(l2_dist(&lhs, &rhs) <= 1e-9 * l2(&x));
        }
    }

    #[test]
    fn phillips_is_multiplicative(mu in measure(), nu in measure(), seed in any::<u64>(), a in -1.0..1.0f64) {
        let mut rng = rng(seed);
        let models = [GroupModel64::shift(spec(), Exponent::two()), GroupModel64::matrix(jordan(cplx(a, 0.0), 4), Exponent::two())];
        for g in &models {
            let x = g.random_state(&mut rng);
            let lhs = phillips(g, &mu.convolve(&nu).unwrap(), &x).unwrap();
            let rhs = phillips(g, &mu, &phillips(g, &nu, &x).unwrap()).unwrap();
            prop_assert!(l2_dist(&lhs, &rhs) <= 1e-6 * l2(&x) * (1.0 + mu.total_variation() * nu.total_variation()));
        }
    }

    #[test]
    fn calculus_output_does_not_depend_on_the_norm(mu in measure(), seed in any::<u64>()) {
        let a = jordan(cplx(0.2, -0.1), 3);
        let g2 = GroupModel64::matrix(a.clone(), Exponent::two());
        let g1 = GroupModel64::matrix(a, Exponent::one());
        let x = random_vector::<f64>(&mut rng(seed), 3);
        let y2 = phillips(&g2, &mu, &x).unwrap();
        prop_assert_eq!(&y2, &phillips(&g1, &mu, &x).unwrap());
        let couple = g2.couple();
        let _ = g2.interp_norm(&couple, &y2, 0.5, Exponent::two()).unwrap();
        prop_assert_eq!(&y2, &phillips(&g2, &mu, &x).unwrap());
    }

    #[test]
    fn translated_calculus_obeys_the_group_bound(mu in measure(), seed in any::<u64>(), t in prop::sample::select(vec![-5.0, 0.0, 5.0])) {
        let mut rng = rng(seed);
        let s = CMatrix64::from_rows(&[
            vec![cplx(1.0, 0.0), cplx(0.4, 0.0), cplx(0.0, 0.0)],
            vec![cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(-0.3, 0.0)],
            vec![cplx(0.2, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0)],
        ]).unwrap();
        let values = [0.5, -1.0, 2.0];
        let g = GroupModel64::from_eigen(s.clone(), values.iter().map(|v| cplx(*v, 0.0)).collect(), Exponent::two()).unwrap();
        let gt = GroupModel64::from_eigen(s, values.iter().map(|v| cplx(v + t, 0.0)).collect(), Exponent::two()).unwrap();
        let m_hat = (-100..=100).map(|j| g.group_norm(f64::from(j) * 0.1).unwrap().upper).fold(0.0, f64::max);
        let x = random_vector::<f64>(&mut rng, 3);
        let y = phillips(&gt, &mu, &x).unwrap();
        prop_assert!(l2(&y) <= (m_hat + 1e-9) * mu.total_variation() * l2(&x) + 1e-12);
    }

    #[test]
    fn k_functional_bounds_and_shape(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a: Vec<C64> = (0..6).map(|j| cplx(f64::from(j) - 2.5, 0.3)).collect();
        let couple = InterpCouple64::domain(6, Norm::lp(Exponent::two()), LinearOp::diagonal(a));
        let z = random_vector::<f64>(&mut rng, 6);
        let ts: Vec<f64> = (0..13).map(|i| 10f64.powf(-3.0 + 0.5 * f64::from(i))).collect();
        let ks: Vec<f64> = ts.iter().map(|t| couple.k_functional(&z, *t).unwrap()).collect();
        let (nx, ny) = (couple.norm_x(&z), couple.norm_y(&z));
        for (t, k) in ts.iter().zip(&ks) {
            prop_assert!(*k <= nx.min(t * ny) * (1.0 + 1e-9));
        }
        for i in 1..ks.len() {
            prop_assert!(ks[i] >= ks[i - 1] - 1e-6 * ks[i]);
        }
        for i in 1..ks.len() - 1 {
            let w = (ts[i] - ts[i - 1]) / (ts[i + 1] - ts[i - 1]);
            prop_assert!(ks[i] >= ks[i - 1] + w * (ks[i + 1] - ks[i - 1]) - 1e-6 * ks[i + 1]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn interpolation_norm_is_a_norm(seed in any::<u64>(), c in complex(), theta in 0.2..0.8f64) {
        let mut rng = rng(seed);
        let a: Vec<C64> = (0..5).map(|j| cplx(f64::from(j), 0.0)).collect();
        let couple = InterpCouple64::domain(5, Norm::lp(Exponent::two()), LinearOp::diagonal(a));
        let (x, y) = (random_vector::<f64>(&mut rng, 5), random_vector::<f64>(&mut rng, 5));
        let n = |v: &[C64]| couple.interp_norm(v, theta, Exponent::two()).unwrap();
        let sum: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(n(&sum) <= (n(&x) + n(&y)) * (1.0 + 1e-6));
        let scaled: Vec<C64> = x.iter().map(|v| v * c).collect();
        prop_assert!((n(&scaled) - c.norm() * n(&x)).abs() <= 1e-6 * c.norm() * n(&x) + 1e-15);
    }
}

#[test]
fn partition_of_unity_on_several_grids() {
    for (r, n) in [(8.0, 64), (16.0, 256), (64.0, 4096), (32.0, 8192)] {
        let spec = GridSpec64::scalar(r, n).unwrap();
        assert!(DyadicPartition::new(&spec).unity_defect() <= 1e-10, "{r}x{n}");
    }
}

#[test]
fn diagonal_real_spectrum_gives_isometries() {
    let g = GroupModel64::matrix(real_diag(&[1.0, -2.0, 0.5]), Exponent::two());
    for s in [-4.0, 0.3, 7.0] {
        let n = g.group_norm(s).unwrap();
        assert!((n.upper - 1.0).abs() <= 2e-10 && (n.lower - 1.0).abs() <= 1e-12);
    }
}
