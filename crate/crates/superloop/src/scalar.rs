//! Coefficient abstraction shared by the exact and floating-point kernels.
//!
//! Everything algebraic in this crate (Grassmann algebra, supermatrices,
//! fatgraph weights, formal series) is generic over a [`Scalar`]: a field of
//! characteristic zero that contains the imaginary unit and carries an
//! involutive conjugation. Two instantiations are used in practice and are
//! re-exported as aliases at the crate root: exact Gaussian rationals
//! [`crate::CQ`] for every identity that must hold on the nose, and
//! [`crate::C64`] for the spectral-curve / recursion layer.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// The imaginary unit.
    fn i() -> Self;

    fn conj(&self) -> Self;

    /// Multiplicative inverse; `None` for zero.
    fn try_inv(&self) -> Option<Self>;
}

/// Exact rational number.
pub type Q = BigRational;
/// Exact complex rational, the coefficient field of the tiny-size oracle.
pub type CQ = Complex<BigRational>;
/// Double-precision complex, the coefficient field of the curve layer.
pub type C64 = Complex<f64>;

impl Scalar for CQ {
    fn from_int(n: i64) -> Self {
        Complex::new(BigRational::from_integer(n.into()), Q::zero())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Complex::new(
            BigRational::new(num.into(), den.into()),
            Q::zero(),
        )
    }

    fn i() -> Self {
        Complex::new(Q::zero(), Q::one())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
}

impl Scalar for C64 {
    fn from_int(n: i64) -> Self {
        Complex::new(n as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }

    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        Complex::new(self.re, -self.im)
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::new(1.0, 0.0) / self)
        }
    }
}

/// Exact rational on fixed-width integers: numerator/denominator in i128,
/// kept reduced with a positive denominator. Arithmetic is checked; the
/// desk-scale property runs stay far below the overflow bound.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct R128 {
    n: i128,
    d: i128,
}

impl R128 {
    pub fn new(n: i128, d: i128) -> Self {
        assert!(d != 0, "zero denominator");
        let mut out = Self { n, d };
        out.reduce();
        out
    }

    fn reduce(&mut self) {
        if self.d < 0 {
            self.n = -self.n;
            self.d = -self.d;
        }
        if self.n == 0 {
            self.d = 1;
            return;
        }
        let g = gcd_i128(self.n.unsigned_abs(), self.d.unsigned_abs()) as i128;
        self.n /= g;
        self.d /= g;
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0
    }

    pub fn numer(&self) -> i128 {
        self.n
    }

    pub fn denom(&self) -> i128 {
        self.d
    }
}

fn gcd_i128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn rmul(a: R128, b: R128) -> R128 {
    R128::new(
        a.n.checked_mul(b.n).expect("rational overflow"),
        a.d.checked_mul(b.d).expect("rational overflow"),
    )
}

fn radd(a: R128, b: R128) -> R128 {
    let n = a
        .n
        .checked_mul(b.d)
        .and_then(|x| x.checked_add(b.n.checked_mul(a.d).expect("rational overflow")))
        .expect("rational overflow");
    R128::new(n, a.d.checked_mul(b.d).expect("rational overflow"))
}

impl fmt::Display for R128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 1 {
            write!(f, "{}", self.n)
        } else {
            write!(f, "{}/{}", self.n, self.d)
        }
    }
}

impl fmt::Debug for R128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Exact complex rational over [`R128`]; the fast instantiation of
/// [`Scalar`] for bulk exact property runs.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct CR128 {
    pub re: R128,
    pub im: R128,
}

impl CR128 {
    pub fn new(re: R128, im: R128) -> Self {
        Self { re, im }
    }
}

impl fmt::Display for CR128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}+({})i", self.re, self.im)
        }
    }
}

impl fmt::Debug for CR128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Add for CR128 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(radd(self.re, o.re), radd(self.im, o.im))
    }
}

impl Sub for CR128 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for CR128 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(R128::new(-self.re.n, self.re.d), R128::new(-self.im.n, self.im.d))
    }
}

fn rneg(a: R128) -> R128 {
    R128 { n: -a.n, d: a.d }
}

impl Mul for CR128 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            radd(rmul(self.re, o.re), rneg(rmul(self.im, o.im))),
            radd(rmul(self.re, o.im), rmul(self.im, o.re)),
        )
    }
}

impl Div for CR128 {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let norm_sq = radd(rmul(o.re, o.re), rmul(o.im, o.im));
        assert!(!norm_sq.is_zero(), "division by zero");
        let inv = R128::new(norm_sq.d, norm_sq.n);
        let num = self * o.conj();
        Self::new(rmul(num.re, inv), rmul(num.im, inv))
    }
}

impl Zero for CR128 {
    fn zero() -> Self {
        Self::new(R128::new(0, 1), R128::new(0, 1))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for CR128 {
    fn one() -> Self {
        Self::new(R128::new(1, 1), R128::new(0, 1))
    }
}

impl Scalar for CR128 {
    fn from_int(n: i64) -> Self {
        Self::new(R128::new(n as i128, 1), R128::new(0, 1))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(R128::new(num as i128, den as i128), R128::new(0, 1))
    }

    fn i() -> Self {
        Self::new(R128::new(0, 1), R128::new(1, 1))
    }

    fn conj(&self) -> Self {
        Self::new(self.re, R128::new(-self.im.n, self.im.d))
    }

    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(Self::one() / *self)
        }
    }
}

/// Shorthand for an exact rational scalar `num/den`.
pub fn cq(num: i64, den: i64) -> CQ {
    CQ::from_ratio(num, den)
}

/// Shorthand for an exact Gaussian rational `a/b + (c/d) i`.
pub fn cqi(a: i64, b: i64, c: i64, d: i64) -> CQ {
    CQ::from_ratio(a, b) + CQ::i() * CQ::from_ratio(c, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_cq(v: &CR128) -> CQ {
        let part = |r: &R128| {
            BigRational::new((r.numer() as i64).into(), (r.denom() as i64).into())
        };
        Complex::new(part(&v.re), part(&v.im))
    }

    #[test]
    fn fixed_width_rationals_track_bigint_rationals() {
        let samples: [(i64, i64, i64, i64); 3] = [(3, 4, -2, 5), (-7, 3, 1, 6), (5, 2, 0, 1)];
        let pair = |(n1, d1, n2, d2): (i64, i64, i64, i64)| {
            let a = CQ::from_ratio(n1, d1) + CQ::i() * CQ::from_ratio(n2, d2);
            let b = CR128::from_ratio(n1, d1) + CR128::i() * CR128::from_ratio(n2, d2);
            (a, b)
        };
        for &s1 in &samples {
            for &s2 in &samples {
                let (a1, b1) = pair(s1);
                let (a2, b2) = pair(s2);
                assert_eq!(a1.clone() + a2.clone(), to_cq(&(b1 + b2)));
                assert_eq!(a1.clone() - a2.clone(), to_cq(&(b1 - b2)));
                assert_eq!(a1.clone() * a2.clone(), to_cq(&(b1 * b2)));
                assert_eq!(a1.clone() / a2.clone(), to_cq(&(b1 / b2)));
                assert_eq!(Scalar::conj(&a1), to_cq(&Scalar::conj(&b1)));
                assert_eq!(
                    a1.try_inv().unwrap(),
                    to_cq(&b1.try_inv().unwrap())
                );
            }
        }
    }
}
