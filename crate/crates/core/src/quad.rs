//! Quadrature rules and the smooth compactly supported bump.

use once_cell::sync::Lazy;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        for (xi, wi) in x.iter().zip(&w) {
            sum += wi * f(mid + 0.5 * h * xi);
        }
    }
    0.5 * h * sum
}

fn bump_unnormalized(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 / (s * s - 1.0)).exp()
    }
}

const CDF_PANELS: usize = 1024;
const GL_ORDER: usize = 20;

struct BumpTable {
    c1: f64,
    cumulative: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static BUMP: Lazy<BumpTable> = Lazy::new(|| {
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let h = 2.0 / CDF_PANELS as f64;
    let mut cumulative = Vec::with_capacity(CDF_PANELS + 1);
    cumulative.push(0.0);
    let mut acc = 0.0;
    for p in 0..CDF_PANELS {
        let mid = -1.0 + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            s += w * bump_unnormalized(mid + 0.5 * h * x);
        }
        acc += 0.5 * h * s;
        cumulative.push(acc);
    }
    let total = acc;
    for c in cumulative.iter_mut() {
        *c /= total;
    }
    BumpTable { c1: 1.0 / total, cumulative, nodes, weights }
});

/// Normalization `c₁` making `∫ρ = 1`.
pub fn bump_normalization() -> f64 {
    BUMP.c1
}

/// `ρ(s) = c₁ exp(1/(s²−1))` on `|s| < 1`, zero elsewhere; `∫ρ = 1`.
pub fn bump(s: f64) -> f64 {
    BUMP.c1 * bump_unnormalized(s)
}

/// `ρ'(s)`.
pub fn bump_derivative(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        return 0.0;
    }
    let d = s * s - 1.0;
    bump(s) * (-2.0 * s / (d * d))
}

/// `H(u) = ∫_{−1}^{u} ρ`, clamped to 0 and 1 outside `[-1, 1]`.
pub fn bump_cdf(u: f64) -> f64 {
    if u <= -1.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let t = &*BUMP;
    let h = 2.0 / CDF_PANELS as f64;
    let idx = (((u + 1.0) / h).floor() as usize).min(CDF_PANELS - 1);
    let lo = -1.0 + idx as f64 * h;
    let len = u - lo;
    if len <= 0.0 {
        return t.cumulative[idx];
    }
    let mid = lo + 0.5 * len;
    let mut s = 0.0;
    for (x, w) in t.nodes.iter().zip(&t.weights) {
        s += w * bump(mid + 0.5 * len * x);
    }
    t.cumulative[idx] + 0.5 * len * s
}

/// Sine integral `Si(x) = ∫₀ˣ sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    let sinc = |t: f64| if t.abs() < 1e-8 { 1.0 - t * t / 6.0 } else { t.sin() / t };
    integrate(sinc, 0.0, x, 4 + (x.abs() / 2.0).ceil() as usize, 20)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exactness() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(1);
        assert_eq!(x, vec![0.0]);
        assert!((w[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bump_is_a_probability_density() {
        let total = integrate(bump, -1.0, 1.0, 400, 16);
        assert!((total - 1.0).abs() < 1e-13);
        assert_eq!(bump_cdf(-2.0), 0.0);
        assert_eq!(bump_cdf(1.5), 1.0);
        assert!((bump_cdf(0.0) - 0.5).abs() < 1e-13);
        // c₁ from direct quadrature of exp(1/(s²−1))
        let raw = integrate(|s| if s.abs() < 1.0 { (1.0 / (s * s - 1.0)).exp() } else { 0.0 }, -1.0, 1.0, 400, 16);
        assert!((bump_normalization() - 1.0 / raw).abs() < 1e-12);
    }

    #[test]
    fn cdf_matches_direct_integral() {
        for &u in &[-0.9, -0.3, 0.123, 0.77, 0.999] {
            let direct = integrate(bump, -1.0, u, 300, 16);
            assert!((bump_cdf(u) - direct).abs() < 1e-13, "u = {u}");
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &s in &[-0.7, -0.2, 0.4, 0.9] {
            let h = 1e-6;
            let fd = (bump(s + h) - bump(s - h)) / (2.0 * h);
            assert!((bump_derivative(s) - fd).abs() < 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn sine_integral_values() {
        // reference values from the series Σ (−1)^n x^{2n+1}/((2n+1)(2n+1)!)
        assert!((sine_integral(1.0) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((sine_integral(10.0) - 1.658_347_594_218_874).abs() < 1e-13);
        assert!((sine_integral(-2.0) + 1.605_412_976_802_695).abs() < 1e-14);
    }
}
