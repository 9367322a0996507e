//! Irreducibility over ℤ for monic polynomials of desk-scale degree.
//!
//! Order of attack: squarefreeness (a repeated factor is returned directly),
//! then distinct-degree factorization modulo small primes (irreducible mod q
//! settles it; otherwise the possible factor degrees are intersected across
//! primes), then an exhaustive factor search over subsets of the complex
//! roots, each candidate confirmed by exact division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::roots::complex_roots;
use super::IntPolynomial;
use crate::mp::{Complex, Real};

const SMALL_PRIMES: &[u64] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103,
    107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199,
];

/// How irreducibility was established.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IrreducibilityCertificate {
    /// Degree one.
    Linear,
    /// The reduction modulo `prime` is irreducible.
    ModPrime { prime: u64 },
    /// Factor-degree patterns modulo these primes admit no proper factor degree.
    DegreeSieve { patterns: Vec<(u64, Vec<usize>)> },
    /// Every root subset of admissible size was tried; `bound` is the
    /// coefficient bound that sized the working precision.
    ExhaustedFactorSearch { bound: String, degrees: Vec<usize>, precision_bits: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Irreducibility {
    Irreducible { certificate: IrreducibilityCertificate },
    Reducible { factor: IntPolynomial },
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible { .. })
    }
}

/// Decide irreducibility of a monic polynomial over ℤ.
///
/// # Panics
/// If `p` is not monic or has degree zero.
pub fn is_irreducible_over_z(p: &IntPolynomial) -> Irreducibility {
    let n = p.degree().expect("nonzero polynomial");
    assert!(n >= 1 && p.is_monic(), "irreducibility test expects a monic polynomial of degree >= 1");
    if n == 1 {
        return Irreducibility::Irreducible { certificate: IrreducibilityCertificate::Linear };
    }
    let g = p.gcd(&p.derivative());
    if g.degree().unwrap_or(0) > 0 {
        return Irreducibility::Reducible { factor: g };
    }
    if !p.coeff(0).is_zero() {
        // cheap rational root test
        for d in divisors_small(&p.coeff(0)) {
            for r in [d.clone(), -d] {
                if p.eval(&r).is_zero() {
                    return Irreducibility::Reducible { factor: IntPolynomial::new(vec![-r, BigInt::from(1)]) };
                }
            }
        }
    } else {
        return Irreducibility::Reducible { factor: IntPolynomial::from_i64(&[0, 1]) };
    }

    let mut possible: Vec<bool> = (0..=n).map(|d| d >= 1 && d < n).collect();
    let mut patterns = Vec::new();
    for &q in SMALL_PRIMES {
        let f = reduce_mod(p, q);
        if f.len() != n + 1 || !fq::is_squarefree(&f, q) {
            continue;
        }
        let degrees = fq::distinct_degree_pattern(&f, q);
        if degrees.len() == 1 {
            return Irreducibility::Irreducible { certificate: IrreducibilityCertificate::ModPrime { prime: q } };
        }
        let sums = subset_sums(&degrees, n);
        for d in 1..n {
            possible[d] &= sums[d];
        }
        patterns.push((q, degrees));
        if possible.iter().all(|&b| !b) {
            return Irreducibility::Irreducible { certificate: IrreducibilityCertificate::DegreeSieve { patterns } };
        }
    }

    let degrees: Vec<usize> = (1..=n / 2).filter(|&d| possible[d]).collect();
    factor_search(p, &degrees)
}

fn divisors_small(c: &BigInt) -> Vec<BigInt> {
    let c = c.abs();
    match c.to_u64() {
        Some(v) if v <= 1_000_000 => (1..=v).filter(|d| v % d == 0).map(BigInt::from).collect(),
        // large constant terms are left to the later stages
        _ => vec![BigInt::from(1)],
    }
}

fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut s = vec![false; n + 1];
    s[0] = true;
    for &d in degrees {
        for t in (d..=n).rev() {
            if s[t - d] {
                s[t] = true;
            }
        }
    }
    s
}

fn reduce_mod(p: &IntPolynomial, q: u64) -> Vec<u64> {
    let qb = BigInt::from(q);
    let mut v: Vec<u64> = p.coeffs().iter().map(|c| c.mod_floor(&qb).to_u64().unwrap()).collect();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn mignotte_bound(p: &IntPolynomial, d: usize) -> BigInt {
    let norm2: BigInt = p.coeffs().iter().map(|c| c * c).sum::<BigInt>().sqrt() + 1;
    norm2 << d
}

fn factor_search(p: &IntPolynomial, degrees: &[usize]) -> Irreducibility {
    let n = p.degree().unwrap();
    let max_d = degrees.iter().copied().max().unwrap_or(0);
    let bound = mignotte_bound(p, max_d.max(1));
    let prec = bound.bits() as usize + 96 + 8 * n;
    let roots = complex_roots(p, prec).all();
    let tol = Real::one(prec).mul_pow2(-32);
    for &d in degrees {
        for subset in combinations(n, d) {
            let mut coeffs = vec![Complex::one(prec)];
            for &i in &subset {
                // multiply by (x - z_i)
                let mut next = vec![Complex::zero(prec); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k + 1] = &next[k + 1] + c;
                    next[k] = &next[k] - &(c * &roots[i]);
                }
                coeffs = next;
            }
            let mut ints = Vec::with_capacity(coeffs.len());
            let mut ok = true;
            for c in &coeffs {
                let r = c.re.round_to_bigint();
                if c.im.abs() > tol || (&c.re - Real::from_bigint(&r, prec)).abs() > tol {
                    ok = false;
                    break;
                }
                ints.push(r);
            }
            if !ok {
                continue;
            }
            let cand = IntPolynomial::new(ints);
            if p.div_exact(&cand).is_some() {
                return Irreducibility::Reducible { factor: cand };
            }
        }
    }
    Irreducibility::Irreducible {
        certificate: IrreducibilityCertificate::ExhaustedFactorSearch {
            bound: bound.to_string(),
            degrees: degrees.to_vec(),
            precision_bits: prec,
        },
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Polynomials over 𝔽_q with small q, lowest degree first.
mod fq {
    fn trim(mut v: Vec<u64>) -> Vec<u64> {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    }

    fn inv(a: u64, q: u64) -> u64 {
        pow(a, q - 2, q)
    }

    fn pow(mut a: u64, mut e: u64, q: u64) -> u64 {
        let mut r = 1u64;
        a %= q;
        while e > 0 {
            if e & 1 == 1 {
                r = r * a % q;
            }
            a = a * a % q;
            e >>= 1;
        }
        r
    }

    fn rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let b = trim(b.to_vec());
        let lead_inv = inv(*b.last().unwrap(), q);
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let f = r.last().unwrap() * lead_inv % q;
            for (i, c) in b.iter().enumerate() {
                r[i + shift] = (r[i + shift] + q - f * c % q) % q;
            }
            r = trim(r);
        }
        r
    }

    fn div(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut r = trim(a.to_vec());
        let b = trim(b.to_vec());
        let lead_inv = inv(*b.last().unwrap(), q);
        let mut out = vec![0u64; r.len().saturating_sub(b.len()) + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let f = r.last().unwrap() * lead_inv % q;
            out[shift] = f;
            for (i, c) in b.iter().enumerate() {
                r[i + shift] = (r[i + shift] + q - f * c % q) % q;
            }
            r.pop();
            r = trim(r);
        }
        trim(out)
    }

    fn mul_mod(a: &[u64], b: &[u64], m: &[u64], q: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % q;
            }
        }
        rem(&out, m, q)
    }

    fn gcd(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, q);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let li = inv(l, q);
            a.iter_mut().for_each(|c| *c = *c * li % q);
        }
        a
    }

    fn sub(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim((0..n).map(|i| (a.get(i).copied().unwrap_or(0) + q - b.get(i).copied().unwrap_or(0)) % q).collect())
    }

    pub fn is_squarefree(f: &[u64], q: u64) -> bool {
        let d: Vec<u64> = trim(f.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % q) * c % q).collect());
        if d.is_empty() {
            return false;
        }
        gcd(f, &d, q).len() == 1
    }

    fn x_pow_q(base: &[u64], m: &[u64], q: u64) -> Vec<u64> {
        // base^q mod m
        let mut result = vec![1u64];
        let mut b = rem(base, m, q);
        let mut e = q;
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &b, m, q);
            }
            b = mul_mod(&b, &b, m, q);
            e >>= 1;
        }
        result
    }

    /// Degrees of the irreducible factors of a squarefree `f`.
    pub fn distinct_degree_pattern(f: &[u64], q: u64) -> Vec<usize> {
        let x = vec![0u64, 1];
        let mut rest = trim(f.to_vec());
        let mut h = x.clone();
        let mut degrees = Vec::new();
        let mut d = 1;
        while rest.len() > 1 && 2 * d < rest.len() {
            h = x_pow_q(&h, &rest, q);
            let g = gcd(&rest, &sub(&h, &x, q), q);
            let gd = g.len() - 1;
            if gd > 0 {
                degrees.extend(std::iter::repeat_n(d, gd / d));
                rest = div(&rest, &g, q);
                h = rem(&h, &rest, q);
            }
            d += 1;
        }
        if rest.len() > 1 {
            degrees.push(rest.len() - 1);
        }
        degrees
    }

}
