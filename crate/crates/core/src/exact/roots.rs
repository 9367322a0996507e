//! Complex roots of integer polynomials at working precision.
//!
//! Aberth–Ehrlich iteration in `f64` for seeds, then the same iteration in
//! multiprecision arithmetic. Real roots are identified with the Sturm
//! count, so the real/complex split is exact even when the imaginary parts
//! of real roots come out as rounding noise.

use nalgebra::Complex as C64;
use num_traits::ToPrimitive;

use super::IntPolynomial;
use crate::mp::{Complex, Real};

/// Roots of a squarefree polynomial, split into real roots and one
/// representative (positive imaginary part) per complex-conjugate pair.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub real: Vec<Real>,
    pub complex: Vec<Complex>,
}

impl RootSet {
    /// All roots, conjugate pairs expanded, real roots first.
    pub fn all(&self) -> Vec<Complex> {
        let mut v: Vec<Complex> = self.real.iter().cloned().map(Complex::from_real).collect();
        for z in &self.complex {
            v.push(z.clone());
            v.push(z.conj());
        }
        v
    }
}

fn seeds_f64(coeffs: &[f64]) -> Vec<C64<f64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    // Cauchy bound
    let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<C64<f64>> = (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            C64::from_polar(radius * 0.7, ang)
        })
        .collect();
    let eval = |x: C64<f64>| {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: C64<f64> = (0..n).filter(|&j| j != i).map(|j| C64::new(1.0, 0.0) / (z[i] - z[j])).sum();
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// All complex roots of a squarefree polynomial at `prec` bits.
pub fn complex_roots(p: &IntPolynomial, prec: usize) -> RootSet {
    let n = p.degree().expect("nonzero polynomial");
    if n == 0 {
        return RootSet { real: vec![], complex: vec![] };
    }
    let work = prec + 32;
    let cf: Vec<f64> = p.coeffs().iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let seeds = seeds_f64(&cf);
    let coeffs: Vec<Real> = p.coeffs().iter().map(|c| Real::from_bigint(c, work)).collect();
    let mut z: Vec<Complex> = seeds.iter().map(|s| Complex::from_f64(s.re, s.im, work)).collect();
    let one = Complex::one(work);
    let tol = Real::one(work).mul_pow2(-(prec as i64) - 16);
    for _ in 0..200 {
        let mut converged = true;
        for i in 0..n {
            let (pv, dv) = horner(&coeffs, &z[i]);
            if pv.is_zero() {
                continue;
            }
            let ratio = &pv / &dv;
            let mut s = Complex::zero(work);
            for j in 0..n {
                if j != i {
                    s = &s + &(&one / &(&z[i] - &z[j]));
                }
            }
            let w = &ratio / &(&one - &(&ratio * &s));
            z[i] = &z[i] - &w;
            let scale = Real::max(&Real::one(work), &z[i].abs());
            if w.abs() > &tol * &scale {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    let r = p.count_real_roots();
    z.sort_by(|a, b| a.im.abs().partial_cmp(&b.im.abs()).unwrap());
    let mut real: Vec<Real> = z[..r].iter().map(|c| c.re.with_precision(prec)).collect();
    real.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut complex: Vec<Complex> = z[r..]
        .iter()
        .filter(|c| !c.im.is_negative())
        .map(|c| Complex::new(c.re.with_precision(prec), c.im.with_precision(prec)))
        .collect();
    complex.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
    RootSet { real, complex }
}

fn horner(coeffs: &[Real], z: &Complex) -> (Complex, Complex) {
    let prec = z.precision();
    let mut p = Complex::zero(prec);
    let mut dp = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + &Complex::from_real(c.clone());
    }
    (p, dp)
}

/// Evaluate a polynomial with rational coefficients at a complex point.
pub fn eval_rational(coeffs: &[num_rational::BigRational], z: &Complex) -> Complex {
    let prec = z.precision();
    let mut acc = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + &Complex::from_real(Real::from_rational(c, prec));
    }
    acc
}
