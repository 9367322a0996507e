//! Joint spectrum of a commuting family of integer matrices.
//!
//! Every matrix commuting with an element `S` of simple spectrum is a
//! polynomial in `S` over ℚ. We look for such an `S` among small integer
//! combinations of the generators, express each generator as `qⱼ(S)`
//! exactly, and evaluate `qⱼ` at the roots of the characteristic polynomial
//! of `S` at working precision.

use nalgebra::{Complex as C64, DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::exact::roots::{complex_roots, eval_rational, RootSet};
use crate::exact::{char_poly, IntMatrix, IntPolynomial, ToralMatrix};
use crate::mp::{Complex, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("no element of the generated algebra with simple spectrum was found")]
    DegenerateSpectrum,
    #[error("generator {0} is not a polynomial in the simple-spectrum element")]
    NotSimultaneouslyDiagonalizable(usize),
    #[error("generators do not commute")]
    NotCommuting,
}

/// One joint eigenvalue: a root of the char poly of `S` (real, or one
/// representative of a conjugate pair) and the corresponding eigenvalue of
/// every generator.
#[derive(Clone, Debug)]
pub struct JointEigen {
    pub root: Complex,
    pub is_real: bool,
    pub per_generator: Vec<Complex>,
}

#[derive(Clone, Debug)]
pub struct JointSpectrum {
    /// Integer combination of the generators with simple spectrum.
    pub element: IntMatrix,
    pub combination: Vec<i64>,
    pub char_poly: IntPolynomial,
    /// `generators[j] = Σᵢ poly[j][i] · elementⁱ`.
    pub polys: Vec<Vec<BigRational>>,
    pub eigen: Vec<JointEigen>,
    pub precision_bits: usize,
}

fn combinations_in_box(k: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    // unit vectors first, then by increasing height
    for j in 0..k {
        let mut v = vec![0; k];
        v[j] = 1;
        out.push(v);
    }
    let side = (2 * bound + 1) as usize;
    let total = side.pow(k as u32);
    let mut rest: Vec<Vec<i64>> = (0..total)
        .map(|mut idx| {
            (0..k)
                .map(|_| {
                    let d = (idx % side) as i64 - bound;
                    idx /= side;
                    d
                })
                .collect()
        })
        .filter(|v: &Vec<i64>| v.iter().any(|&x| x != 0) && !out.contains(v))
        .collect();
    rest.sort_by_key(|v| (v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
    out.extend(rest);
    out
}

/// Find `S` with squarefree characteristic polynomial in the algebra
/// generated by `generators` (including `I` so that shifts are available).
pub fn simple_element(generators: &[ToralMatrix]) -> Option<(Vec<i64>, IntMatrix, IntPolynomial)> {
    let n = generators[0].dim();
    let mut basis: Vec<IntMatrix> = generators.iter().map(|g| g.as_int().clone()).collect();
    // products of pairs enlarge the search space for decomposable actions
    if generators.len() > 1 {
        basis.push(&basis[0] * &basis[1]);
    }
    let k = basis.len();
    let bound = if k <= 3 { 2 } else { 1 };
    for c in combinations_in_box(k, bound) {
        let mut s = IntMatrix::zeros(n);
        for (cj, m) in c.iter().zip(&basis) {
            if *cj != 0 {
                s = &s + &m.scale(&BigInt::from(*cj));
            }
        }
        let p = char_poly(&s);
        if p.is_squarefree() {
            return Some((c, s, p));
        }
    }
    None
}

/// Solve `m = Σ qᵢ sⁱ` over ℚ, `i < N`.
pub fn as_polynomial_in(m: &IntMatrix, s: &IntMatrix) -> Option<Vec<BigRational>> {
    let n = s.dim();
    let mut powers = vec![IntMatrix::identity(n)];
    for i in 1..n {
        powers.push(&powers[i - 1] * s);
    }
    // augmented system: n*n equations in n unknowns
    let mut rows: Vec<Vec<BigRational>> = (0..n * n)
        .map(|e| {
            let (r, c) = (e / n, e % n);
            let mut row: Vec<BigRational> =
                powers.iter().map(|p| BigRational::from_integer(p[(r, c)].clone())).collect();
            row.push(BigRational::from_integer(m[(r, c)].clone()));
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (pivot_row..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(pivot_row, p);
        let pv = rows[pivot_row][col].clone();
        for x in rows[pivot_row].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..rows.len() {
            if i != pivot_row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let src = rows[pivot_row].clone();
                for (x, y) in rows[i].iter_mut().zip(&src) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut q = vec![BigRational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        q[col] = rows[i][n].clone();
    }
    Some(q)
}

pub fn joint_spectrum(generators: &[ToralMatrix], precision_bits: usize) -> Result<JointSpectrum, SpectrumError> {
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            if !a.commutes_with(b) {
                return Err(SpectrumError::NotCommuting);
            }
        }
    }
    let (combination, element, cp) = simple_element(generators).ok_or(SpectrumError::DegenerateSpectrum)?;
    let polys = generators
        .iter()
        .enumerate()
        .map(|(j, g)| as_polynomial_in(g.as_int(), &element).ok_or(SpectrumError::NotSimultaneouslyDiagonalizable(j)))
        .collect::<Result<Vec<_>, _>>()?;
    let roots: RootSet = complex_roots(&cp, precision_bits + 32);
    let mut eigen = Vec::new();
    for r in &roots.real {
        let z = Complex::from_real(r.clone());
        let per: Vec<Complex> = polys.iter().map(|q| real_part_only(eval_rational(q, &z))).collect();
        eigen.push(JointEigen { root: z, is_real: true, per_generator: per });
    }
    for z in &roots.complex {
        let per: Vec<Complex> = polys.iter().map(|q| eval_rational(q, z)).collect();
        eigen.push(JointEigen { root: z.clone(), is_real: false, per_generator: per });
    }
    Ok(JointSpectrum { element, combination, char_poly: cp, polys, eigen, precision_bits })
}

fn real_part_only(z: Complex) -> Complex {
    Complex::from_real(z.re)
}

impl JointSpectrum {
    /// `log |λ(Mⱼ)|` for every joint eigenvalue (rows) and generator (columns).
    pub fn log_moduli(&self) -> Vec<Vec<Real>> {
        self.eigen
            .iter()
            .map(|e| e.per_generator.iter().map(|z| z.ln_abs().with_precision(self.precision_bits)).collect())
            .collect()
    }

    /// Real basis of the eigenspace of `element` for joint eigenvalue `idx`
    /// (one vector for a real root, real and imaginary parts for a pair).
    pub fn eigenspace_basis(&self, idx: usize) -> Vec<Vec<f64>> {
        let e = &self.eigen[idx];
        let n = self.element.dim();
        let (re, im) = e.root.to_f64();
        let s = self.element.to_nalgebra();
        let shifted: DMatrix<C64<f64>> = DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { C64::new(re, im) } else { C64::new(0.0, 0.0) };
            C64::new(s[(i, j)], 0.0) - d
        });
        let v = null_vector(&shifted);
        if e.is_real {
            let mut x: Vec<f64> = v.iter().map(|c| c.re).collect();
            let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            x.iter_mut().for_each(|a| *a /= nrm);
            vec![x]
        } else {
            let x: Vec<f64> = v.iter().map(|c| c.re).collect();
            let y: Vec<f64> = v.iter().map(|c| c.im).collect();
            vec![x, y]
        }
    }
}

/// Unit null vector of a nearly singular complex matrix by inverse iteration.
fn null_vector(m: &DMatrix<C64<f64>>) -> DVector<C64<f64>> {
    let n = m.nrows();
    let scale = m.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    let eps = C64::new(scale * 1e-13, scale * 3e-14);
    let shifted = m - DMatrix::identity(n, n) * eps;
    let lu = shifted.lu();
    let mut v = DVector::from_fn(n, |i, _| C64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64));
    for _ in 0..3 {
        if let Some(x) = lu.solve(&v) {
            let nrm = x.norm();
            v = x / C64::new(nrm, 0.0);
        }
    }
    // fix the phase so the largest component is real and positive
    let (imax, _) = v.iter().enumerate().fold((0, 0.0), |acc, (i, c)| if c.norm() > acc.1 { (i, c.norm()) } else { acc });
    let phase = v[imax] / C64::new(v[imax].norm(), 0.0);
    v.map(|c| c / phase)
}

/// Exact eigenvalue test helper: `det(m - c·I)` for integer `c`.
pub fn shifted_det(m: &IntMatrix, c: i64) -> BigInt {
    (m - &IntMatrix::identity(m.dim()).scale(&BigInt::from(c))).determinant()
}
