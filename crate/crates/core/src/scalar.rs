//! Scalar backends.
//!
//! Two rings implement [`Scalar`]: [`Exact`], the field Q(i, √2) with
//! arbitrary-precision rational parts, used wherever a claim must hold as an
//! exact zero; and [`Complex64`], used by the stochastic integrator.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficient ring for series and module vectors: either a scalar field
/// or a Grassmann algebra over one. Multiplication need not commute, but
/// scaling by `Base` always does.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    type Base: Scalar;

    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_base(b: Self::Base) -> Self;
    fn scale(&self, b: &Self::Base) -> Self;

    fn one() -> Self {
        Self::from_base(<Self::Base as Scalar>::from_frac(1, 1))
    }
}

/// A commutative coefficient field.
pub trait Scalar: Coeff<Base = Self> + fmt::Display + SubAssign {
    fn from_frac(num: i64, den: i64) -> Self;
    fn sqrt2() -> Self;
    fn imag_unit() -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn to_complex(&self) -> Complex64;
    /// Embed a finite real; exact for the rational backend since every
    /// finite double is a dyadic rational.
    fn from_real(x: f64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_frac(n, 1)
    }

    fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Coeff for Complex64 {
    type Base = Complex64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn from_base(b: Self) -> Self {
        b
    }
    fn scale(&self, b: &Self) -> Self {
        self * b
    }
}

impl Scalar for Complex64 {
    fn from_frac(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn sqrt2() -> Self {
        Complex64::new(std::f64::consts::SQRT_2, 0.0)
    }
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            None
        } else {
            Some(Complex64::new(1.0, 0.0) / self)
        }
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Element `a + b√2` of Q(√2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub rational: BigRational,
    pub surd: BigRational,
}

impl QSqrt2 {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        QSqrt2 { rational, surd }
    }

    pub fn from_rational(q: BigRational) -> Self {
        QSqrt2 { rational: q, surd: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    fn conj(&self) -> Self {
        QSqrt2 { rational: self.rational.clone(), surd: -self.surd.clone() }
    }

    /// Field norm `a² − 2b²`, nonzero unless the element is zero.
    fn norm(&self) -> BigRational {
        let two = BigRational::from_integer(BigInt::from(2));
        &self.rational * &self.rational - two * &self.surd * &self.surd
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(QSqrt2 { rational: c.rational / &n, surd: c.surd / n })
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN)
            + std::f64::consts::SQRT_2 * self.surd.to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { rational: self.rational + o.rational, surd: self.surd + o.surd }
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        QSqrt2 { rational: self.rational - o.rational, surd: self.surd - o.surd }
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2 { rational: -self.rational, surd: -self.surd }
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        if self.surd.is_zero() && o.surd.is_zero() {
            return QSqrt2::from_rational(self.rational * o.rational);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        QSqrt2 {
            rational: &self.rational * &o.rational + two * &self.surd * &o.surd,
            surd: &self.rational * &o.surd + &self.surd * &o.rational,
        }
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.surd.is_zero()) {
            (_, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}√2", self.surd),
            (false, false) => {
                let sign = if self.surd.is_negative() { "-" } else { "+" };
                write!(f, "{}{}{}√2", self.rational, sign, self.surd.abs())
            }
        }
    }
}

/// Exact element of Q(i, √2): `re + i·im` with `re, im ∈ Q(√2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exact {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl Exact {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Exact { re, im }
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Exact::from_frac(num, den)
    }

    pub fn from_big_rational(q: BigRational) -> Self {
        Exact { re: QSqrt2::from_rational(q), im: QSqrt2::zero() }
    }

    /// The value as a plain rational, if it has no `√2` or imaginary part.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.im.is_zero() && self.re.surd.is_zero() {
            Some(self.re.rational.clone())
        } else {
            None
        }
    }
}

impl Add for Exact {
    type Output = Exact;
    fn add(self, o: Exact) -> Exact {
        Exact { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Exact {
    type Output = Exact;
    fn sub(self, o: Exact) -> Exact {
        Exact { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact { re: -self.re, im: -self.im }
    }
}

impl Mul for Exact {
    type Output = Exact;
    fn mul(self, o: Exact) -> Exact {
        if self.im.is_zero() && o.im.is_zero() {
            return Exact { re: self.re * o.re, im: QSqrt2::zero() };
        }
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re * o.im + self.im * o.re;
        Exact { re, im }
    }
}

impl AddAssign for Exact {
    fn add_assign(&mut self, o: Exact) {
        self.re.rational += o.re.rational;
        self.re.surd += o.re.surd;
        self.im.rational += o.im.rational;
        self.im.surd += o.im.surd;
    }
}

impl SubAssign for Exact {
    fn sub_assign(&mut self, o: Exact) {
        self.re.rational -= o.re.rational;
        self.re.surd -= o.re.surd;
        self.im.rational -= o.im.rational;
        self.im.surd -= o.im.surd;
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})i", self.im)
        } else {
            write!(f, "{}+({})i", self.re, self.im)
        }
    }
}

impl Coeff for Exact {
    type Base = Exact;

    fn zero() -> Self {
        Exact { re: QSqrt2::zero(), im: QSqrt2::zero() }
    }
    fn one() -> Self {
        Exact::from_frac(1, 1)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_base(b: Self) -> Self {
        b
    }
    fn scale(&self, b: &Self) -> Self {
        self.clone() * b.clone()
    }
}

impl Scalar for Exact {
    fn from_frac(num: i64, den: i64) -> Self {
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        Exact::from_big_rational(q)
    }
    fn sqrt2() -> Self {
        Exact {
            re: QSqrt2::new(BigRational::zero(), BigRational::one()),
            im: QSqrt2::zero(),
        }
    }
    fn imag_unit() -> Self {
        Exact { re: QSqrt2::zero(), im: QSqrt2::from_rational(BigRational::one()) }
    }
    fn inv(&self) -> Option<Self> {
        if self.im.is_zero() {
            return self.re.inv().map(|re| Exact { re, im: QSqrt2::zero() });
        }
        // 1/(a+ib) = (a−ib)/(a²+b²), with a²+b² ∈ Q(√2).
        let n = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        let ninv = n.inv()?;
        Some(Exact { re: self.re.clone() * ninv.clone(), im: -(self.im.clone() * ninv) })
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
    fn from_real(x: f64) -> Self {
        let q = BigRational::from_float(x).expect("finite real");
        Exact::from_big_rational(q)
    }
}

impl AddAssign for QSqrt2 {
    fn add_assign(&mut self, o: QSqrt2) {
        self.rational += o.rational;
        self.surd += o.surd;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt2_squares_to_two() {
        let s = Exact::sqrt2();
        assert_eq!(s.clone() * s, Exact::from_int(2));
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = Exact::imag_unit();
        assert_eq!(i.clone() * i, Exact::from_int(-1));
    }

    #[test]
    fn inverse_in_full_field() {
        let x = Exact::from_frac(3, 7) + Exact::sqrt2() * Exact::from_frac(-2, 5)
            + Exact::imag_unit() * (Exact::one() + Exact::sqrt2());
        let y = x.inv().unwrap();
        assert_eq!(x * y, Exact::one());
        assert!(Exact::zero().inv().is_none());
    }

    #[test]
    fn to_complex_matches() {
        let x = Exact::sqrt2() + Exact::imag_unit() * Exact::from_frac(1, 2);
        let c = x.to_complex();
        assert!((c.re - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((c.im - 0.5).abs() < 1e-15);
    }

    #[test]
    fn from_real_is_exact_on_dyadics() {
        assert_eq!(Exact::from_real(0.375), Exact::from_frac(3, 8));
        assert_eq!(Exact::from_real(-2.0), Exact::from_int(-2));
    }
}
