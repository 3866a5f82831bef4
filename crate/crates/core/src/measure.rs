//! Complex measures on the line made of finitely many atoms plus one sampled
//! density, together with the weighted total-variation norms `‖e^{ω|·|}μ‖`.
//!
//! A density with samples `d_j` at `left + j h` is integrated with the
//! rectangle rule, i.e. it acts as the lattice measure `Σ_j h d_j δ_{left+jh}`.
//! Since sampled densities vanish at their ends this coincides with the
//! trapezoid rule, and it makes Fourier transforms and convolutions
//! multiplicative up to rounding.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::fft;
use crate::scalar::{cis, cplx, czero, fabs, Extended, Real, C};
use crate::{Error, Result};

/// Largest sample count produced by [`Measure::convolve`].
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq)]
pub struct Density<T> {
    pub left: T,
    pub h: T,
    pub samples: Vec<C<T>>,
}

impl<T: Real> Density<T> {
    pub fn new(left: T, h: T, samples: Vec<C<T>>) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidMeasure(format!("density spacing {h} must be positive")));
        }
        if samples.is_empty() || samples.len() % 2 != 0 {
            return Err(Error::InvalidMeasure(format!(
                "density needs an even, nonzero sample count (got {})",
                samples.len()
            )));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || !left.is_finite() {
            return Err(Error::InvalidMeasure("density samples must be finite".into()));
        }
        Ok(Self { left, h, samples })
    }

    #[inline]
    pub fn location(&self, j: usize) -> T {
        self.left + self.h * T::of_usize(j)
    }

    pub fn right(&self) -> T {
        self.location(self.samples.len() - 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure<T> {
    atoms: Vec<(T, C<T>)>,
    density: Option<Density<T>>,
    decay: Extended<T>,
}

impl<T: Real> Measure<T> {
    /// Builds a measure and checks that its norm in `M_ω` is finite.
    ///
    /// `decay` is the exponential weight `ω` the measure is declared to carry.
    pub fn new(atoms: Vec<(T, C<T>)>, density: Option<Density<T>>, decay: Extended<T>) -> Result<Self> {
        if let Extended::Finite(w) = decay {
            if !(w >= T::zero()) {
                return Err(Error::InvalidMeasure(format!("negative decay weight {w}")));
            }
        }
        if atoms.iter().any(|(s, w)| !s.is_finite() || !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::InvalidMeasure("atoms must be finite".into()));
        }
        let m = Self { atoms, density, decay };
        let probe = match decay {
            Extended::Finite(w) => w,
            Extended::Infinite => T::zero(),
        };
        match m.total_variation_weighted(probe) {
            Extended::Finite(v) if v.is_finite() => Ok(m),
            _ => Err(Error::InvalidMeasure(format!("weighted total variation diverges at ω = {probe}"))),
        }
    }

    pub fn zero() -> Self {
        Self { atoms: Vec::new(), density: None, decay: Extended::Infinite }
    }

    pub fn dirac(a: T) -> Self {
        Self::from_atoms(vec![(a, cplx(T::one(), T::zero()))]).expect("finite atom")
    }

    /// Finitely many atoms; such measures lie in every `M_ω`.
    pub fn from_atoms(atoms: Vec<(T, C<T>)>) -> Result<Self> {
        Self::new(atoms, None, Extended::Infinite)
    }

    pub fn from_density(density: Density<T>, decay: Extended<T>) -> Result<Self> {
        Self::new(Vec::new(), Some(density), decay)
    }

    /// Samples `f` at `left + j h`, `j < n`.
    pub fn sampled<F: Fn(T) -> C<T>>(f: F, left: T, h: T, n: usize, decay: Extended<T>) -> Result<Self> {
        let samples = (0..n).map(|j| f(left + h * T::of_usize(j))).collect();
        Self::from_density(Density::new(left, h, samples)?, decay)
    }

    /// Centered Gaussian density of the given variance sampled on `[-half, half)`.
    pub fn gaussian(variance: T, half: T, h: T) -> Result<Self> {
        let mut n = (T::of(2.0) * half / h).round().to_usize().unwrap_or(0);
        n += n % 2;
        let left = -h * T::of_usize(n / 2);
        let norm = T::one() / (T::of(2.0) * T::PI() * variance).sqrt();
        Self::sampled(
            |s| cplx(norm * (-(s * s) / (T::of(2.0) * variance)).exp(), T::zero()),
            left,
            h,
            n,
            Extended::Infinite,
        )
    }

    pub fn with_decay(mut self, decay: Extended<T>) -> Result<Self> {
        self.decay = decay;
        Self::new(self.atoms, self.density, self.decay)
    }

    pub fn atoms(&self) -> &[(T, C<T>)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density<T>> {
        self.density.as_ref()
    }

    pub fn decay_weight(&self) -> Extended<T> {
        self.decay
    }

    /// Every point mass of the measure, including the lattice masses `h d_j`.
    pub fn point_masses(&self) -> impl Iterator<Item = (T, C<T>)> + '_ {
        let dens = self.density.iter().flat_map(|d| {
            d.samples.iter().enumerate().map(move |(j, v)| (d.location(j), *v * d.h))
        });
        self.atoms.iter().copied().chain(dens)
    }

    /// Smallest `r` with the support inside `[-r, r]`.
    pub fn support_radius(&self) -> T {
        let mut r = T::zero();
        for (s, w) in &self.atoms {
            if *w != czero() {
                r = r.max(fabs(*s));
            }
        }
        if let Some(d) = &self.density {
            let nz: Vec<usize> = (0..d.samples.len()).filter(|j| d.samples[*j] != czero()).collect();
            if let (Some(a), Some(b)) = (nz.first(), nz.last()) {
                r = r.max(fabs(d.location(*a))).max(fabs(d.location(*b)));
            }
        }
        r
    }

    fn check_strip(&self, z: C<T>) -> Result<()> {
        if z.im == T::zero() {
            return Ok(());
        }
        if let Extended::Finite(w) = self.decay {
            if fabs(z.im) > w {
                return Err(Error::StripViolation { im: fabs(z.im).as_f64(), width: w.as_f64() });
            }
        }
        Ok(())
    }

    /// `Fμ(z) = ∫ e^{−isz} μ(ds)`.
    pub fn fourier(&self, z: C<T>) -> Result<C<T>> {
        self.check_strip(z)?;
        let i = cplx(T::zero(), T::one());
        Ok(self.point_masses().map(|(s, w)| w * (-i * z * s).exp()).fold(czero(), |a, b| a + b))
    }

    /// `(Fμ)′(z) = ∫ (−is) e^{−isz} μ(ds)`.
    pub fn fourier_derivative(&self, z: C<T>) -> Result<C<T>> {
        self.check_strip(z)?;
        let i = cplx(T::zero(), T::one());
        Ok(self
            .point_masses()
            .map(|(s, w)| w * (-i * s) * (-i * z * s).exp())
            .fold(czero(), |a, b| a + b))
    }

    /// Values `Fμ(ξ_k)` at the DFT frequencies `ξ_k = 2π k/(n h)` of a length-`n`
    /// periodic grid, in FFT order with the Nyquist bin at `−π/h`.
    pub fn symbol_on_lattice(&self, n: usize, h: T) -> Vec<C<T>> {
        let xi = |k: usize| T::of(2.0) * T::PI() * T::of(fft::signed_index(k, n) as f64) / (T::of_usize(n) * h);
        let mut out: Vec<C<T>> = (0..n)
            .map(|k| {
                let x = xi(k);
                self.atoms.iter().map(|(s, w)| *w * cis(-x * *s)).fold(czero(), |a, b| a + b)
            })
            .collect();
        let Some(d) = &self.density else { return out };
        if fabs(d.h - h) <= T::of(1e-12) * h {
            // Σ_j d_j e^{−i j h ξ_k} is a length-n DFT of the folded samples
            let mut folded = vec![czero(); n];
            for (j, v) in d.samples.iter().enumerate() {
                folded[j % n] += *v;
            }
            fft::forward(&mut folded);
            for (k, o) in out.iter_mut().enumerate() {
                *o += folded[k] * d.h * cis(-xi(k) * d.left);
            }
        } else {
            for (k, o) in out.iter_mut().enumerate() {
                let x = xi(k);
                *o += d.samples.iter().enumerate().map(|(j, v)| *v * cis(-x * d.location(j))).fold(czero(), |a, b| a + b)
                    * d.h;
            }
        }
        out
    }

    /// `‖e^{ω|·|}μ‖_{M(ℝ)}`, or `+∞` when `ω` exceeds the declared decay weight.
    pub fn total_variation_weighted(&self, omega: T) -> Extended<T> {
        if !self.decay.exceeds(omega) && self.decay != Extended::Finite(omega) {
            return Extended::Infinite;
        }
        let v: T = self.point_masses().map(|(s, w)| w.norm() * (omega * fabs(s)).exp()).sum();
        if v.is_finite() {
            Extended::Finite(v)
        } else {
            Extended::Infinite
        }
    }

    pub fn total_variation(&self) -> T {
        self.point_masses().map(|(_, w)| w.norm()).sum()
    }

    /// `cosh(ωs) μ(ds)`; needs `ω` strictly below the decay weight.
    pub fn cosh_weight(&self, omega: T) -> Result<Self> {
        if let Extended::Finite(w) = self.decay {
            if omega >= w {
                return Err(Error::StripViolation { im: omega.as_f64(), width: w.as_f64() });
            }
        }
        let atoms = self.atoms.iter().map(|(s, w)| (*s, *w * (omega * *s).cosh())).collect();
        let density = self.density.as_ref().map(|d| Density {
            left: d.left,
            h: d.h,
            samples: d.samples.iter().enumerate().map(|(j, v)| *v * (omega * d.location(j)).cosh()).collect(),
        });
        let decay = match self.decay {
            Extended::Finite(w) => Extended::Finite(w - omega),
            Extended::Infinite => Extended::Infinite,
        };
        Self::new(atoms, density, decay)
    }

    /// Image under `s ↦ −s`.
    pub fn reflect(&self) -> Self {
        let atoms = self.atoms.iter().map(|(s, w)| (-*s, *w)).collect();
        let density = self.density.as_ref().map(|d| {
            let mut samples = d.samples.clone();
            samples.reverse();
            Density { left: -d.right(), h: d.h, samples }
        });
        Self { atoms, density, decay: self.decay }
    }

    pub fn scale(&self, c: C<T>) -> Self {
        Self {
            atoms: self.atoms.iter().map(|(s, w)| (*s, *w * c)).collect(),
            density: self.density.as_ref().map(|d| Density {
                left: d.left,
                h: d.h,
                samples: d.samples.iter().map(|v| *v * c).collect(),
            }),
            decay: self.decay,
        }
    }

    /// Multiplies atom weights and density samples by `f(s)`.
    pub fn map_weights<F: Fn(T) -> C<T>>(&self, f: F, decay: Extended<T>) -> Result<Self> {
        let atoms = self.atoms.iter().map(|(s, w)| (*s, *w * f(*s))).collect();
        let density = self.density.as_ref().map(|d| Density {
            left: d.left,
            h: d.h,
            samples: d.samples.iter().enumerate().map(|(j, v)| *v * f(d.location(j))).collect(),
        });
        Self::new(atoms, density, decay)
    }

    /// Restriction to `[-r, r]`.
    pub fn truncate(&self, r: T) -> Result<Self> {
        self.map_weights(|s| if fabs(s) <= r { cplx(T::one(), T::zero()) } else { czero() }, self.decay)
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_capped(other, DEFAULT_SUPPORT_CAP)
    }

    /// `μ ∗ ν` with the density part computed by zero-padded FFT products.
    ///
    /// Atom–density products whose offset is not a multiple of the lattice
    /// spacing are moved onto the common lattice by a band-limited phase shift.
    pub fn convolve_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let decay = self.decay.min(other.decay);
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for (s, w) in &self.atoms {
            for (r, v) in &other.atoms {
                atoms.push((*s + *r, *w * *v));
            }
        }
        let h = match (&self.density, &other.density) {
            (Some(a), Some(b)) => {
                if fabs(a.h - b.h) > T::of(1e-12) * a.h {
                    return Err(Error::GridMismatch(a.h.as_f64(), b.h.as_f64()));
                }
                a.h
            }
            (Some(a), None) => a.h,
            (None, Some(b)) => b.h,
            (None, None) => return Self::new(atoms, None, decay),
        };

        // (base position, samples, scale) for every density-valued piece
        enum Piece<'a, T> {
            Shifted(T, &'a [C<T>], C<T>),
            Product(T, &'a [C<T>], &'a [C<T>]),
        }
        let mut pieces: Vec<Piece<'_, T>> = Vec::new();
        if let (Some(a), Some(b)) = (&self.density, &other.density) {
            pieces.push(Piece::Product(a.left + b.left, &a.samples, &b.samples));
        }
        for (dens, ats) in [(&self.density, &other.atoms), (&other.density, &self.atoms)] {
            if let Some(d) = dens {
                for (s, w) in ats.iter() {
                    pieces.push(Piece::Shifted(d.left + *s, &d.samples, *w));
                }
            }
        }
        if pieces.is_empty() {
            return Self::new(atoms, None, decay);
        }
        let span = |p: &Piece<'_, T>| match p {
            Piece::Shifted(b, s, _) => (*b, s.len()),
            Piece::Product(b, x, y) => (*b, x.len() + y.len() - 1),
        };
        let lo = pieces.iter().map(|p| span(p).0).fold(T::infinity(), |a, b| a.min(b));
        let hi = pieces
            .iter()
            .map(|p| {
                let (b, n) = span(p);
                b + h * T::of_usize(n - 1)
            })
            .fold(T::neg_infinity(), |a, b| a.max(b));
        let origin = match pieces.iter().find(|p| matches!(p, Piece::Product(..))) {
            Some(p) => {
                let b = span(p).0;
                b - h * ((b - lo) / h - T::of(1e-9)).ceil().max(T::zero())
            }
            None => lo,
        };
        let mut len = (((hi - origin) / h) + T::of(1e-9)).floor().to_usize().unwrap_or(usize::MAX).saturating_add(2);
        len += len % 2;
        if len > cap {
            return Err(Error::GridOverflow { len, max: cap });
        }
        let padded = (len + 16).next_power_of_two().max(len.next_power_of_two());
        let mut acc = vec![czero(); padded];
        let shift = |spec: &mut [C<T>], r: T| {
            let pn = spec.len();
            for (k, v) in spec.iter_mut().enumerate() {
                let ks = fft::signed_index(k, pn);
                let phase = -T::of(2.0) * T::PI() * T::of(ks as f64) * r / T::of_usize(pn);
                if 2 * k == pn {
                    *v = *v * phase.cos();
                } else {
                    *v = *v * cis(phase);
                }
            }
        };
        let spectrum = |s: &[C<T>]| {
            let mut buf = vec![czero(); padded];
            buf[..s.len()].copy_from_slice(s);
            fft::forward(&mut buf);
            buf
        };
        for p in &pieces {
            let (base, _) = span(p);
            let mut r = (base - origin) / h;
            if fabs(r - r.round()) < T::of(1e-9) {
                r = r.round();
            }
            let mut spec = match p {
                Piece::Shifted(_, s, w) => {
                    let mut sp = spectrum(s);
                    sp.iter_mut().for_each(|v| *v = *v * *w);
                    sp
                }
                Piece::Product(_, x, y) => {
                    let sx = spectrum(x);
                    let sy = spectrum(y);
                    sx.iter().zip(&sy).map(|(a, b)| *a * *b * h).collect()
                }
            };
            shift(&mut spec, r);
            for (a, v) in acc.iter_mut().zip(&spec) {
                *a += *v;
            }
        }
        fft::inverse(&mut acc);
        acc.truncate(len);
        let density = Density::new(origin, h, acc)?;
        Self::new(atoms, Some(density), decay)
    }

    /// Text form: `decay <ω|inf>`, `atom <s> <re> <im>` lines, and an optional
    /// `density <left> <h> <n>` header followed by `n` lines `<re> <im>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "decay {}", self.decay);
        for (s, w) in &self.atoms {
            let _ = writeln!(out, "atom {s:e} {:e} {:e}", w.re, w.im);
        }
        if let Some(d) = &self.density {
            let _ = writeln!(out, "density {:e} {:e} {}", d.left, d.h, d.samples.len());
            for v in &d.samples {
                let _ = writeln!(out, "{:e} {:e}", v.re, v.im);
            }
        }
        out
    }
}

impl<T: Real> FromStr for Measure<T> {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let num = |tok: Option<&str>, line: usize| -> Result<T> {
            let tok = tok.ok_or(Error::Parse { line, msg: "missing number".into() })?;
            tok.parse::<f64>()
                .map(T::of)
                .map_err(|_| Error::Parse { line, msg: format!("bad number '{tok}'") })
        };
        let mut atoms = Vec::new();
        let mut density = None;
        let mut decay = Extended::Infinite;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        while let Some((ln, line)) = lines.next() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("decay") => {
                    let v = tok.next().ok_or(Error::Parse { line: ln, msg: "missing decay".into() })?;
                    decay = if v.eq_ignore_ascii_case("inf") {
                        Extended::Infinite
                    } else {
                        Extended::Finite(num(Some(v), ln)?)
                    };
                }
                Some("atom") => {
                    let s = num(tok.next(), ln)?;
                    let re = num(tok.next(), ln)?;
                    let im = num(tok.next(), ln)?;
                    atoms.push((s, cplx(re, im)));
                }
                Some("density") => {
                    if density.is_some() {
                        return Err(Error::Parse { line: ln, msg: "second density block".into() });
                    }
                    let left = num(tok.next(), ln)?;
                    let h = num(tok.next(), ln)?;
                    let n: usize = tok
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or(Error::Parse { line: ln, msg: "bad sample count".into() })?;
                    let mut samples = Vec::with_capacity(n);
                    while samples.len() < n {
                        let (l2, body) =
                            lines.next().ok_or(Error::Parse { line: ln, msg: "truncated density block".into() })?;
                        if body.is_empty() || body.starts_with('#') {
                            continue;
                        }
                        let mut t = body.split_whitespace();
                        let re = num(t.next(), l2)?;
                        let im = num(t.next(), l2)?;
                        samples.push(cplx(re, im));
                    }
                    density = Some(Density::new(left, h, samples).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?);
                }
                Some(other) => return Err(Error::Parse { line: ln, msg: format!("unknown record '{other}'") }),
                None => {}
            }
        }
        Measure::new(atoms, density, decay)
    }
}
