//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real floating point scalar: `f32` or `f64`.
///
/// `abs` and `signum` exist on both `Float` and `Signed` (pulled in by
/// `FftNum`); call them through [`fabs`] or `Float::abs` to avoid ambiguity.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + FftNum
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub fn fabs<T: Real>(x: T) -> T {
    Float::abs(x)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

/// `e^{iθ}`.
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Euclidean norm of a complex vector.
pub fn l2<T: Real>(v: &[C<T>]) -> T {
    let mut scale = T::zero();
    for z in v {
        scale = scale.max(fabs(z.re)).max(fabs(z.im));
    }
    if scale == T::zero() {
        return T::zero();
    }
    let s: T = v.iter().map(|z| (*z / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// `‖a − b‖₂`.
pub fn l2_dist<T: Real>(a: &[C<T>], b: &[C<T>]) -> T {
    let d: Vec<C<T>> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
    l2(&d)
}

/// Either a finite value or an explicit `+∞` marker.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match self {
            Extended::Finite(v) => Some(*v),
            Extended::Infinite => None,
        }
    }

    /// Value, panicking on `+∞`. For tests and call sites that already proved finiteness.
    pub fn unwrap(&self) -> T {
        self.finite().expect("finite value expected, got +∞")
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a.min(b)),
            (Extended::Finite(a), Extended::Infinite) | (Extended::Infinite, Extended::Finite(a)) => {
                Extended::Finite(a)
            }
            _ => Extended::Infinite,
        }
    }

    /// `self > x`, with `+∞` exceeding every real.
    pub fn exceeds(&self, x: T) -> bool {
        match self {
            Extended::Finite(v) => *v > x,
            Extended::Infinite => true,
        }
    }

    pub fn scale(self, c: T) -> Self {
        match self {
            Extended::Finite(v) => Extended::Finite(v * c),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T: Real> Display for Extended<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

/// Lebesgue / sequence exponent `p ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> Exponent<T> {
    pub fn new(p: T) -> crate::Result<Self> {
        if p.is_infinite() && p > T::zero() {
            Ok(Exponent::Infinity)
        } else if p >= T::one() {
            Ok(Exponent::Finite(p))
        } else {
            Err(crate::Error::InvalidParameter(format!("exponent {p} outside [1, ∞]")))
        }
    }

    pub fn one() -> Self {
        Exponent::Finite(T::one())
    }

    pub fn two() -> Self {
        Exponent::Finite(T::of(2.0))
    }

    /// Hölder conjugate `p'`.
    pub fn conjugate(&self) -> Self {
        match self {
            Exponent::Infinity => Exponent::Finite(T::one()),
            Exponent::Finite(p) if *p == T::one() => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(*p / (*p - T::one())),
        }
    }

    pub fn is(&self, p: f64) -> bool {
        matches!(self, Exponent::Finite(v) if *v == T::of(p))
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(&self) -> T {
        match self {
            Exponent::Infinity => T::zero(),
            Exponent::Finite(p) => T::one() / *p,
        }
    }

    /// ℓ^p norm of nonnegative magnitudes.
    pub fn combine<I: IntoIterator<Item = T>>(&self, mags: I) -> T {
        match self {
            Exponent::Infinity => mags.into_iter().fold(T::zero(), |a, b| a.max(b)),
            Exponent::Finite(p) if *p == T::one() => mags.into_iter().sum(),
            Exponent::Finite(p) if *p == T::of(2.0) => {
                let m: Vec<T> = mags.into_iter().collect();
                let scale = m.iter().fold(T::zero(), |a, b| a.max(*b));
                if scale == T::zero() {
                    return T::zero();
                }
                scale * m.iter().map(|x| (*x / scale) * (*x / scale)).sum::<T>().sqrt()
            }
            Exponent::Finite(p) => {
                let m: Vec<T> = mags.into_iter().collect();
                let scale = m.iter().fold(T::zero(), |a, b| a.max(*b));
                if scale == T::zero() {
                    return T::zero();
                }
                scale * m.iter().map(|x| (*x / scale).powf(*p)).sum::<T>().powf(T::one() / *p)
            }
        }
    }
}

impl<T: Real> Display for Exponent<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl<T: Real> std::str::FromStr for Exponent<T> {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
            return Ok(Exponent::Infinity);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| crate::Error::InvalidParameter(format!("cannot parse exponent '{s}'")))?;
        Exponent::new(T::of(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_exponents() {
        assert_eq!(Exponent::<f64>::one().conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::<f64>::Infinity.conjugate(), Exponent::one());
        assert_eq!(Exponent::<f64>::two().conjugate(), Exponent::two());
        assert!(Exponent::<f64>::new(0.5).is_err());
        let p: Exponent<f64> = "inf".parse().unwrap();
        assert_eq!(p, Exponent::Infinity);
    }

    #[test]
    fn lp_combination() {
        let e = Exponent::<f64>::Finite(3.0);
        let v = e.combine([1.0, 2.0]);
        assert!((v - 9f64.powf(1.0 / 3.0)).abs() < 1e-14);
        assert_eq!(Exponent::<f64>::Infinity.combine([1.0, 4.0, 2.0]), 4.0);
    }

    #[test]
    fn extended_ordering() {
        let a = Extended::Finite(2.0);
        assert_eq!(a.min(Extended::Infinite), a);
        assert!(Extended::<f64>::Infinite.exceeds(1e300));
        assert!(!a.exceeds(2.0));
    }
}
