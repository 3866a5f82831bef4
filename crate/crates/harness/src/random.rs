//! Seeded random measures, matrices and groups for the experiment suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use translab::scalar::cplx;
use translab::{CMatrix64, Exponent64, Extended, GroupModel64, Measure64, C64};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn normal_c(rng: &mut ChaCha8Rng) -> C64 {
    cplx(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Gaussian bump `w·exp(−(s−c)²/(2σ²))` on the lattice `hℤ`, cut at `±8σ`.
fn bump(c: f64, sigma: f64, w: C64, h: f64) -> Measure64 {
    let lo = ((c - 8.0 * sigma) / h).floor();
    let hi = ((c + 8.0 * sigma) / h).ceil();
    let mut n = (hi - lo) as usize + 1;
    n -= n % 2;
    Measure64::sampled(move |s| w * (-(s - c) * (s - c) / (2.0 * sigma * sigma)).exp(), lo * h, h, n, Extended::Infinite)
        .expect("bump lattice")
}

fn sum(parts: Vec<Measure64>) -> Measure64 {
    let mut atoms = Vec::new();
    let mut total: Option<translab::Density<f64>> = None;
    for m in parts {
        atoms.extend_from_slice(m.atoms());
        if let Some(d) = m.density() {
            total = Some(match total {
                None => d.clone(),
                Some(t) => add_densities(&t, d),
            });
        }
    }
    Measure64::new(atoms, total, Extended::Infinite).expect("sum of measures")
}

fn add_densities(a: &translab::Density<f64>, b: &translab::Density<f64>) -> translab::Density<f64> {
    let h = a.h;
    let ia = (a.left / h).round() as i64;
    let ib = (b.left / h).round() as i64;
    let lo = ia.min(ib);
    let hi = (ia + a.samples.len() as i64).max(ib + b.samples.len() as i64);
    let mut s = vec![cplx(0.0, 0.0); (hi - lo) as usize];
    for (j, v) in a.samples.iter().enumerate() {
        s[(ia - lo) as usize + j] += *v;
    }
    for (j, v) in b.samples.iter().enumerate() {
        s[(ib - lo) as usize + j] += *v;
    }
    if s.len() % 2 == 1 {
        s.pop();
    }
    translab::Density::new(lo as f64 * h, h, s).expect("aligned densities")
}

/// Up to two atoms in `[−bound, bound]` plus one or two Gaussian bumps whose
/// cut-off support stays inside `[−bound, bound]`, on the lattice `hℤ`.
pub fn measure(rng: &mut ChaCha8Rng, h: f64, bound: f64, with_atoms: bool) -> Measure64 {
    let mut parts = Vec::new();
    if with_atoms {
        for _ in 0..rng.random_range(1..=2) {
            parts.push(Measure64::from_atoms(vec![(uniform(rng, -bound, bound), normal_c(rng) * 0.5)]).expect("atom"));
        }
    }
    for _ in 0..rng.random_range(1..=2) {
        let c = uniform(rng, -bound / 2.0, bound / 2.0);
        let sigma = uniform(rng, 0.4, 1.0) * ((bound - c.abs()) / 8.0).min(1.0);
        let w = normal_c(rng) / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        parts.push(bump(c, sigma, w, h));
    }
    sum(parts)
}

/// Gaussian bumps only, optionally with a point mass at the origin: the
/// Fourier transform then has finite Mikhlin norm.
pub fn mikhlin_measure(rng: &mut ChaCha8Rng, h: f64, bound: f64) -> Measure64 {
    let mut parts = vec![];
    if rng.random::<f64>() < 0.5 {
        parts.push(Measure64::from_atoms(vec![(0.0, normal_c(rng) * 0.5)]).expect("atom"));
    }
    parts.push(measure(rng, h, bound, false));
    sum(parts)
}

/// `n` complex numbers with `|Re| ≤ re` and `|Im| ≤ im`.
pub fn spectrum(rng: &mut ChaCha8Rng, n: usize, re: f64, im: f64) -> Vec<C64> {
    (0..n).map(|_| cplx(uniform(rng, -re, re), uniform(rng, -im, im))).collect()
}

pub fn diagonal_group(values: &[C64], p: Exponent64) -> GroupModel64 {
    GroupModel64::matrix(CMatrix64::from_diag(values), p)
}

/// `S diag(λ) S^{−1}` with real `λ ∈ [−re, re]` and `S = I + 0.4·G` for a real Gaussian `G/√n`.
pub fn similar_group(rng: &mut ChaCha8Rng, n: usize, re: f64, p: Exponent64) -> GroupModel64 {
    let values: Vec<C64> = (0..n).map(|_| cplx(uniform(rng, -re, re), 0.0)).collect();
    let scale = 0.4 / (n as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j)) + scale * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    let s = CMatrix64::from_real_rows(&rows).expect("square");
    GroupModel64::from_eigen(s, values, p).expect("invertible similarity")
}

/// Block-diagonal Jordan matrix with the given `(size, eigenvalue)` blocks.
pub fn jordan_matrix(blocks: &[(usize, C64)]) -> CMatrix64 {
    let n: usize = blocks.iter().map(|b| b.0).sum();
    let mut a = CMatrix64::zeros(n);
    let mut off = 0;
    for &(size, l) in blocks {
        for i in 0..size {
            a.set(off + i, off + i, l);
            if i + 1 < size {
                a.set(off + i, off + i + 1, cplx(1.0, 0.0));
            }
        }
        off += size;
    }
    a
}
