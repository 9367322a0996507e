use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;

/// Polynomial with integer coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPolynomial::from_i64(&[1])
    }

    /// `x - r`.
    pub fn linear_root(r: i64) -> Self {
        IntPolynomial::from_i64(&[-r, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPolynomial::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        IntPolynomial::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_matrix(&self, m: &IntMatrix) -> IntMatrix {
        let n = m.dim();
        let mut acc = IntMatrix::zeros(n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &IntMatrix::identity(n).scale(c);
        }
        acc
    }

    /// `p(x)` with `x ↦ -x`.
    pub fn reflect(&self) -> Self {
        IntPolynomial::new(
            self.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect(),
        )
    }

    /// Exact division; `None` if `d` does not divide `self` in ℤ[x].
    pub fn div_exact(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        let (q, r) = QPoly::from_int(self).div_rem(&QPoly::from_int(d));
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    /// Greatest common divisor in ℤ[x], primitive with positive leading coefficient.
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        let g = QPoly::from_int(self).gcd(&QPoly::from_int(other));
        g.primitive_int()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Number of distinct real roots, by a Sturm sequence.
    pub fn count_real_roots(&self) -> usize {
        let chain = sturm_chain(self);
        let sign_changes = |signs: Vec<i8>| {
            let s: Vec<i8> = signs.into_iter().filter(|&s| s != 0).collect();
            s.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_pos_inf = chain.iter().map(|p| p.leading_sign()).collect();
        let at_neg_inf = chain
            .iter()
            .map(|p| {
                let s = p.leading_sign();
                if p.degree() % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect();
        sign_changes(at_neg_inf) - sign_changes(at_pos_inf)
    }

    /// `(r, c)`: real roots and complex-conjugate pairs of a squarefree polynomial.
    pub fn signature(&self) -> (usize, usize) {
        let n = self.degree().unwrap_or(0);
        let r = self.count_real_roots();
        (r, (n - r) / 2)
    }

    /// Human-readable form, highest degree first.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                out.push_str(&mag.to_string());
            }
            match i {
                0 => {}
                1 => out.push('x'),
                _ => out.push_str(&format!("x^{i}")),
            }
        }
        out
    }
}

impl From<Vec<String>> for IntPolynomial {
    fn from(v: Vec<String>) -> Self {
        IntPolynomial::new(v.iter().map(|s| s.parse().unwrap_or_default()).collect())
    }
}

impl From<IntPolynomial> for Vec<String> {
    fn from(p: IntPolynomial) -> Self {
        p.coeffs.iter().map(ToString::to_string).collect()
    }
}

impl fmt::Display for IntPolynomial {
    /// Coefficient list, lowest degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", c.join(", "))
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pretty())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

/// Characteristic polynomial `det(xI - m)` by Faddeev–LeVerrier.
///
/// All divisions are exact over ℤ.
pub fn char_poly(m: &IntMatrix) -> IntPolynomial {
    let n = m.dim();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = IntMatrix::zeros(n);
    for k in 1..=n {
        let shifted = &mk + &IntMatrix::identity(n).scale(&coeffs[n - k + 1]);
        mk = m * &shifted;
        let tr = mk.trace();
        let (q, r) = (-tr).div_rem(&BigInt::from(k));
        debug_assert!(r.is_zero());
        coeffs[n - k] = q;
    }
    IntPolynomial::new(coeffs)
}

/// Dense polynomial over ℚ, lowest degree first, used for Euclidean steps.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct QPoly(pub Vec<BigRational>);

impl QPoly {
    pub fn from_int(p: &IntPolynomial) -> Self {
        QPoly(p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn leading_sign(&self) -> i8 {
        match self.0.last() {
            Some(c) if c.is_positive() => 1,
            Some(c) if c.is_negative() => -1,
            _ => 0,
        }
    }

    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let d = d.clone().trim();
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.clone().trim();
        if r.0.len() < d.0.len() {
            return (QPoly(vec![]), r);
        }
        let mut q = vec![BigRational::zero(); r.0.len() - d.0.len() + 1];
        let lead = d.0.last().unwrap().clone();
        while !r.is_zero() && r.0.len() >= d.0.len() {
            let shift = r.0.len() - d.0.len();
            let f = r.0.last().unwrap() / &lead;
            for (i, c) in d.0.iter().enumerate() {
                let t = &f * c;
                r.0[i + shift] -= t;
            }
            q[shift] = f;
            r.0.pop();
            r = r.trim();
        }
        (QPoly(q).trim(), r)
    }

    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let mut a = self.clone().trim();
        let mut b = other.clone().trim();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn to_int(&self) -> Option<IntPolynomial> {
        if self.0.iter().all(|c| c.is_integer()) {
            Some(IntPolynomial::new(self.0.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    pub fn primitive_int(&self) -> IntPolynomial {
        let lcm = self.0.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        IntPolynomial::new(self.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect())
            .primitive()
    }
}

fn sturm_chain(p: &IntPolynomial) -> Vec<QPoly> {
    let mut chain = vec![QPoly::from_int(p), QPoly::from_int(&p.derivative())];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(QPoly(r.0.iter().map(|c| -c).collect()));
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&IntMatrix::identity(2)), IntPolynomial::from_i64(&[1, -2, 1]));
        assert_eq!(char_poly(&im(&[&[2, 1], &[1, 1]])), IntPolynomial::from_i64(&[1, -3, 1]));
        let p = IntPolynomial::from_i64(&[-1, -3, 0, 1]);
        assert_eq!(char_poly(&IntMatrix::companion(&p).unwrap()), p);
    }

    #[test]
    fn cayley_hamilton() {
        let a = im(&[&[1, 2, 0, -1], &[3, 1, 1, 0], &[0, -2, 4, 1], &[1, 1, 1, 1]]);
        assert!(char_poly(&a).eval_matrix(&a).is_zero());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(IntPolynomial::from_i64(&[-1, -3, 0, 1]).count_real_roots(), 3);
        assert_eq!(IntPolynomial::from_i64(&[-1, -1, 0, 1]).count_real_roots(), 1);
        assert_eq!(IntPolynomial::from_i64(&[1, 0, 1]).count_real_roots(), 0);
        assert_eq!(IntPolynomial::from_i64(&[1, -3, 1]).signature(), (2, 0));
        // (x-1)^2 has one distinct real root
        assert_eq!(IntPolynomial::from_i64(&[1, -2, 1]).count_real_roots(), 1);
    }

    #[test]
    fn gcd_and_division() {
        let a = IntPolynomial::from_i64(&[-1, 1]);
        let b = IntPolynomial::from_i64(&[1, 1, 1]);
        let p = &a * &b;
        assert_eq!(p.div_exact(&b), Some(a.clone()));
        assert_eq!(p.gcd(&(&a * &a)), a);
        assert!(!(&p * &a).is_squarefree());
        assert!(p.is_squarefree());
        assert_eq!(IntPolynomial::from_i64(&[1, 0, 2]).div_exact(&IntPolynomial::from_i64(&[0, 2])), None);
    }

    #[test]
    fn pretty_print() {
        assert_eq!(IntPolynomial::from_i64(&[-1, -3, 0, 1]).pretty(), "x^3 - 3x - 1");
        assert_eq!(IntPolynomial::from_i64(&[1, -3, 1]).to_string(), "[1, -3, 1]");
    }
}
