//! Working-precision real and complex arithmetic.
//!
//! A thin value-type layer over `astro_float::BigFloat` so that the numeric
//! code elsewhere can be written with ordinary operators. Every value carries
//! its precision in bits; binary operations run at the larger of the two.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: i64 = Word::BITS as i64;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Arbitrary-precision real number.
#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        Real { v, prec }
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn zero(prec: usize) -> Self {
        Real::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Real::from_i64(1, prec)
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        Real::wrap(BigFloat::from_i64(x, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Real::wrap(BigFloat::from_f64(x, prec), prec)
    }

    pub fn from_bigint(x: &BigInt, prec: usize) -> Self {
        if x.is_zero() {
            return Real::zero(prec);
        }
        let digits = x.magnitude().to_u64_digits();
        let sign = if x.is_negative() { Sign::Neg } else { Sign::Pos };
        let e = (digits.len() as i64 * WORD_BITS) as i32;
        let mut v = BigFloat::from_words(&digits, sign, e);
        v.set_precision(prec.max(64), RM).expect("precision");
        Real::wrap(v, prec)
    }

    pub fn from_rational(x: &BigRational, prec: usize) -> Self {
        Real::from_bigint(x.numer(), prec) / Real::from_bigint(x.denom(), prec)
    }

    pub fn pi(prec: usize) -> Self {
        Real::wrap(with_consts(|cc| cc.pi(prec, RM)), prec)
    }

    pub fn with_precision(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("precision");
        Real::wrap(v, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.v.is_zero() && self.v.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real::wrap(self.v.abs(), self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn ln(&self) -> Self {
        let p = self.prec;
        Real::wrap(with_consts(|cc| self.v.ln(p, RM, cc)), p)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec;
        Real::wrap(with_consts(|cc| self.v.exp(p, RM, cc)), p)
    }

    pub fn atan(&self) -> Self {
        let p = self.prec;
        Real::wrap(with_consts(|cc| self.v.atan(p, RM, cc)), p)
    }

    /// Four-quadrant arctangent of `y / x`, in `(-π, π]`.
    pub fn atan2(y: &Real, x: &Real) -> Real {
        let prec = y.prec.max(x.prec);
        if x.is_zero() {
            let half_pi = Real::pi(prec) / Real::from_i64(2, prec);
            return match y.cmp_zero() {
                Ordering::Less => -half_pi,
                Ordering::Equal => Real::zero(prec),
                Ordering::Greater => half_pi,
            };
        }
        let base = (y / x).atan();
        if !x.is_negative() {
            base
        } else if y.is_negative() {
            base - Real::pi(prec)
        } else {
            base + Real::pi(prec)
        }
    }

    pub fn powi(&self, n: usize) -> Self {
        Real::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    pub fn cmp_zero(&self) -> Ordering {
        if self.v.is_zero() {
            Ordering::Equal
        } else if self.v.is_negative() {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// Multiply by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.v.is_zero() {
            return self.clone();
        }
        let mut v = self.v.clone();
        let e = v.exponent().expect("finite value") as i64 + k;
        v.set_exponent(e as i32);
        Real::wrap(v, self.prec)
    }

    /// Nearest integer, halves rounded up.
    pub fn round_to_bigint(&self) -> BigInt {
        if self.v.is_zero() {
            return BigInt::zero();
        }
        let half = BigFloat::from_f64(0.5, self.prec.max(64));
        let r = self.v.add(&half, self.prec.max(64) + 64, RM).floor();
        to_bigint_exact(&r)
    }

    pub fn to_f64(&self) -> f64 {
        match self.v.as_raw_parts() {
            None => f64::NAN,
            Some((words, _, sign, e, _)) => {
                if words.iter().all(|w| *w == 0) {
                    return 0.0;
                }
                let top = *words.last().unwrap() as f64;
                let next = if words.len() >= 2 { words[words.len() - 2] as f64 } else { 0.0 };
                let m = top + next / 2f64.powi(WORD_BITS as i32);
                let val = m * 2f64.powi(e - WORD_BITS as i32);
                if sign == Sign::Neg {
                    -val
                } else {
                    val
                }
            }
        }
    }

    pub fn max(a: &Real, b: &Real) -> Real {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

fn to_bigint_exact(v: &BigFloat) -> BigInt {
    let (words, _, sign, e, _) = v.as_raw_parts().expect("finite value");
    let len_bits = words.len() as i64 * WORD_BITS;
    let mag = num_bigint::BigUint::from_slice(
        &words
            .iter()
            .flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32])
            .collect::<Vec<_>>(),
    );
    let shift = e as i64 - len_bits;
    let mag = if shift >= 0 { mag << shift as usize } else { mag >> (-shift) as usize };
    let s = if sign == Sign::Neg { BigSign::Minus } else { BigSign::Plus };
    BigInt::from_biguint(s, mag)
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                let p = self.prec.max(rhs.prec);
                Real::wrap(self.v.$m(&rhs.v, p, RM), p)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real {
                (&self).$m(rhs)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                self.$m(&rhs)
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.v.neg(), self.prec)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(-(self.v.clone()), self.prec)
    }
}

/// Arbitrary-precision complex number.
#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.precision();
        Complex { re, im: Real::zero(p) }
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn zero(prec: usize) -> Self {
        Complex::from_real(Real::zero(prec))
    }

    pub fn one(prec: usize) -> Self {
        Complex::from_real(Real::one(prec))
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    /// `log |z|`.
    pub fn ln_abs(&self) -> Real {
        let p = self.precision();
        self.norm_sqr().ln() / Real::from_i64(2, p)
    }

    pub fn arg(&self) -> Real {
        Real::atan2(&self.im, &self.re)
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, s: &Real) -> Complex {
        Complex { re: &self.re * s, im: &self.im * s }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, rhs: &Complex) -> Complex {
        Complex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, rhs: &Complex) -> Complex {
        Complex {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, rhs: &Complex) -> Complex {
        let d = rhs.norm_sqr();
        Complex {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &d,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &d,
        }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions_round_trip() {
        let x = Real::from_bigint(&BigInt::from(-123456789012345678i64), 128);
        assert_eq!(x.round_to_bigint(), BigInt::from(-123456789012345678i64));
        assert!((x.to_f64() + 1.2345678901234568e17).abs() < 1e3);
        let big: BigInt = BigInt::from(3u8).pow(90);
        assert_eq!(Real::from_bigint(&big, 256).round_to_bigint(), big);
        assert_eq!(Real::from_f64(2.5, 64).round_to_bigint(), BigInt::from(3));
        assert_eq!(Real::from_f64(-0.75, 64).round_to_bigint(), BigInt::from(-1));
        assert_eq!(Real::from_f64(0.3, 64).to_f64(), 0.3);
    }

    #[test]
    fn ln_and_atan2_at_high_precision() {
        let p = 192;
        let two = Real::from_i64(2, p);
        let back = two.ln().exp();
        assert!((back - Real::from_i64(2, p)).abs() < Real::from_f64(1e-55, p));
        let q = Real::atan2(&Real::from_i64(-1, p), &Real::from_i64(-1, p));
        let expected = -(Real::pi(p) * Real::from_f64(0.75, p));
        assert!((q - expected).abs() < Real::from_f64(1e-55, p));
    }

    #[test]
    fn scaled_rounding() {
        let third = Real::one(128) / Real::from_i64(3, 128);
        let scaled = third.mul_pow2(64).round_to_bigint();
        // floor(2^64 / 3) rounded
        assert_eq!(scaled, BigInt::from(6148914691236517205u64));
    }
}
