//! Scalar abstractions.
//!
//! Exact algebra is written against [`Coeff`], which is satisfied both by
//! [`Rational`] (exact elimination) and by `Complex<T>` (numerical
//! evaluation of the same polynomials). Dynamics code is written against
//! [`Real`], implemented for `f32`, `f64` and the double-double [`Hi`].

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational number with big-integer numerator and denominator.
pub type Rational = BigRational;

/// Coefficient ring of a polynomial. Division is only required to be exact
/// where the caller divides by a unit.
pub trait Coeff: Clone + PartialEq + Debug + Num + Neg<Output = Self> + Send + Sync {}

impl<T> Coeff for T where T: Clone + PartialEq + Debug + Num + Neg<Output = T> + Send + Sync {}

/// Floating point scalar for numerical dynamics.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Nearest value to an `f64` literal.
    fn lit(v: f64) -> Self;

    /// Unit roundoff scale of the arithmetic.
    fn eps() -> Self {
        Self::epsilon()
    }
}

impl Real for f32 {
    fn lit(v: f64) -> Self {
        v as f32
    }
}

impl Real for f64 {
    fn lit(v: f64) -> Self {
        v
    }
}

// `FromPrimitive::from_f64` truncates to an integer for this type, so the
// conversion goes through `From<f64>`.
impl Real for twofloat::TwoFloat {
    fn lit(v: f64) -> Self {
        twofloat::TwoFloat::from(v)
    }

    // `Float::epsilon` is the smallest positive double for this type
    fn eps() -> Self {
        twofloat::TwoFloat::from(2f64.powi(-104))
    }
}

/// Double-double scalar (about 32 significant digits) for refining roots
/// and checking long orbits.
pub type Hi = twofloat::TwoFloat;

/// Conversion of exact coefficients into a floating type.
pub trait ToReal {
    fn to_real<T: Real>(&self) -> T;
}

impl ToReal for Rational {
    /// Rounded in two pieces so that [`Hi`] receives the full precision.
    fn to_real<T: Real>(&self) -> T {
        let hi = rational_to_f64(self);
        if !hi.is_finite() || hi == 0.0 {
            return T::lit(hi);
        }
        let lo = match Rational::from_float(hi) {
            Some(h) => rational_to_f64(&(self - h)),
            None => 0.0,
        };
        T::lit(hi) + T::lit(lo)
    }
}

impl ToReal for f64 {
    fn to_real<T: Real>(&self) -> T {
        T::lit(*self)
    }
}

/// Lift an exact rational into `Complex<T>`.
pub fn complex_of<T: Real>(r: &Rational) -> Complex<T> {
    Complex::new(r.to_real::<T>(), T::zero())
}

/// `f64` value of a rational, correct even when numerator and denominator
/// individually overflow.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() {
            return n / d;
        }
    }
    let ln = ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom());
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln.exp()
}

/// Natural log of |n| for a nonzero big integer, accurate to double precision.
pub fn ln_abs_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.abs().to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural log of |r| for a nonzero rational.
pub fn ln_abs_rational(r: &Rational) -> f64 {
    ln_abs_bigint(r.numer()) - ln_abs_bigint(r.denom())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"num/den"` or a bare integer `"num"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hi_division_is_double_double_accurate() {
        let b = Hi::lit(2.0) + Hi::lit(3.0).sqrt();
        let q = Hi::lit(1.0) / b;
        assert!((q * b - Hi::lit(1.0)).abs() < Hi::lit(1e-30));
    }

    #[test]
    fn hi_conversion_keeps_low_word() {
        let third: Hi = rat(1, 3).to_real();
        let err = third * Hi::lit(3.0) - Hi::lit(1.0);
        assert!(err.abs() < Hi::lit(1e-30), "{err:?}");
        assert_eq!(Hi::lit(0.25).hi(), 0.25);
        let f: f64 = rat(1, 3).to_real();
        assert_eq!(f, 1.0 / 3.0);
    }

    #[test]
    fn rational_text_roundtrip() {
        let r = rat(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(r));
        assert_eq!(parse_rational("7"), Some(rat_int(7)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = BigInt::from(10).pow(400);
        let r = Rational::new(big.clone() * 3, big * 2);
        assert!((rational_to_f64(&r) - 1.5).abs() < 1e-15);
        let r = Rational::new(BigInt::from(10).pow(400), BigInt::from(10).pow(399));
        assert!((rational_to_f64(&r) - 10.0).abs() < 1e-12);
        let ln = ln_abs_bigint(&BigInt::from(10).pow(400));
        assert!((ln - 400.0 * 10f64.ln()).abs() < 1e-9);
    }
}
