//! Integer relation detection by LLL reduction.
//!
//! Given real vectors `x₁, …, x_k ∈ ℝᵐ`, look for `v ∈ ℤᵏ` with
//! `Σ vⱼ xⱼ ≈ 0`. The lattice spanned by the rows `(eⱼ | round(C·xⱼ))` is
//! LLL-reduced in exact rational arithmetic; short rows with a negligible
//! tail are relation candidates, and the Gram–Schmidt norms of the remaining
//! rows bound the height of any relation that was missed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::mp::Real;

/// Outcome of a relation search.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationSearch {
    /// Linearly independent relations, each primitive with a positive first
    /// nonzero entry.
    pub relations: Vec<Vec<BigInt>>,
    /// Every relation outside the span of `relations` has Euclidean norm at
    /// least this large (at the working precision).
    pub excluded_height: f64,
    /// Whether `excluded_height` clears the requested height bound.
    pub complete: bool,
}

impl RelationSearch {
    pub fn rank(&self, k: usize) -> usize {
        k - self.relations.len()
    }
}

/// Search for integer relations among `columns` (each a vector of length m).
///
/// `max_height` is the Euclidean height up to which the absence of further
/// relations is certified.
pub fn find_relations(columns: &[Vec<Real>], precision_bits: usize, max_height: f64) -> RelationSearch {
    let k = columns.len();
    if k == 0 {
        return RelationSearch { relations: vec![], excluded_height: f64::INFINITY, complete: true };
    }
    let m = columns[0].len();
    let scale_bits = (precision_bits as i64) - 24;
    let mut basis: Vec<Vec<BigInt>> = columns
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let mut row = vec![BigInt::zero(); k + m];
            row[j] = BigInt::one();
            for (i, x) in col.iter().enumerate() {
                row[k + i] = x.mul_pow2(scale_bits).round_to_bigint();
            }
            row
        })
        .collect();
    lll_reduce(&mut basis, BigRational::new(BigInt::from(99), BigInt::from(100)));

    // a genuine relation leaves only rounding noise in the tail
    let tail_tol = |head_norm: f64| 2.0 * (k as f64).sqrt() * (head_norm + 1.0) * (m as f64).sqrt();
    let verify_tol = Real::one(precision_bits).mul_pow2(-(precision_bits as i64) * 3 / 4);
    let mut relations = Vec::new();
    let mut others = Vec::new();
    for row in basis {
        let head: Vec<BigInt> = row[..k].to_vec();
        let head_norm = norm_f64(&head);
        let tail_norm = norm_f64(&row[k..]);
        let is_relation = head.iter().any(|h| !h.is_zero())
            && head_norm <= max_height
            && tail_norm <= tail_tol(head_norm)
            && residual_small(columns, &head, &verify_tol);
        if is_relation {
            relations.push(row);
        } else {
            others.push(row);
        }
    }

    let mut ordered = relations.clone();
    ordered.extend(others.iter().cloned());
    let gs = gram_schmidt_norms_sq(&ordered);
    let excluded = gs[relations.len()..]
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::INFINITY).sqrt())
        .fold(f64::INFINITY, f64::min);

    let rels: Vec<Vec<BigInt>> = relations.into_iter().map(|r| normalize(r[..k].to_vec())).collect();
    RelationSearch { relations: rels, excluded_height: excluded, complete: excluded > max_height }
}

/// Convenience wrapper for scalars.
pub fn find_scalar_relations(values: &[Real], precision_bits: usize, max_height: f64) -> RelationSearch {
    let cols: Vec<Vec<Real>> = values.iter().map(|v| vec![v.clone()]).collect();
    find_relations(&cols, precision_bits, max_height)
}

fn residual_small(columns: &[Vec<Real>], v: &[BigInt], tol: &Real) -> bool {
    let m = columns[0].len();
    let prec = columns[0].first().map(Real::precision).unwrap_or(64);
    let scale = Real::from_f64(1.0 + norm_f64(v), prec);
    (0..m).all(|i| {
        let s = columns
            .iter()
            .zip(v)
            .fold(Real::zero(prec), |acc, (col, c)| acc + &col[i] * Real::from_bigint(c, prec));
        s.abs() <= tol * &scale
    })
}

fn norm_f64(v: &[BigInt]) -> f64 {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY).powi(2)).sum::<f64>().sqrt()
}

/// Primitive, with positive first nonzero entry.
pub fn normalize(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() {
        v.iter_mut().for_each(|x| *x = &*x / &g);
    }
    if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        v.iter_mut().for_each(|x| *x = -&*x);
    }
    v
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn to_q(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn gram_schmidt(basis: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<Vec<BigRational>>) {
    let n = basis.len();
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let bi = to_q(&basis[i]);
        let mut v = bi.clone();
        for j in 0..i {
            let denom = dot(&star[j], &star[j]);
            if denom.is_zero() {
                continue;
            }
            mu[i][j] = dot(&bi, &star[j]) / denom;
            for (x, s) in v.iter_mut().zip(&star[j]) {
                *x -= &mu[i][j] * s;
            }
        }
        star.push(v);
    }
    (star, mu)
}

fn gram_schmidt_norms_sq(basis: &[Vec<BigInt>]) -> Vec<BigRational> {
    let (star, _) = gram_schmidt(basis);
    star.iter().map(|s| dot(s, s)).collect()
}

/// Textbook LLL with exact rational Gram–Schmidt data. Intended for the
/// handful-of-rows lattices used here.
pub fn lll_reduce(basis: &mut [Vec<BigInt>], delta: BigRational) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let (mut star, mut mu) = gram_schmidt(basis);
    let mut norms: Vec<BigRational> = star.iter().map(|s| dot(s, s)).collect();
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round().to_integer();
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qr = BigRational::from_integer(q);
                for l in 0..=j {
                    let t = if l == j { BigRational::one() } else { mu[j][l].clone() };
                    mu[k][l] -= &qr * t;
                }
            }
        }
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            let gs = gram_schmidt(basis);
            star = gs.0;
            mu = gs.1;
            norms = star.iter().map(|s| dot(s, s)).collect();
            k = (k - 1).max(1);
        }
    }
}
