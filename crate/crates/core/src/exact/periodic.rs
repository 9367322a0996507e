use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{IntMatrix, ToralMatrix};
use super::snf::smith_normal_form;
use super::ExactError;

/// Exact rational point of 𝕋ᴺ, coordinates in `[0, 1)`.
pub type TorusPoint = Vec<BigRational>;

/// One orbit of the Anosov element through points of period dividing `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub period: usize,
    #[serde(with = "rational_points")]
    pub points: Vec<TorusPoint>,
    pub stabilizer_index: usize,
}

impl PeriodicOrbit {
    pub fn points_f64(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()).collect()
    }
}

fn reduce_mod_one(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn apply_mod_one(a: &IntMatrix, p: &[BigRational]) -> TorusPoint {
    a.mul_rational_vec(p).iter().map(reduce_mod_one).collect()
}

/// All points with `aⁿ p ≡ p (mod ℤᴺ)`, grouped into `a`-orbits.
///
/// The points are `V y` with `yᵢ ∈ (1/dᵢ)ℤ` where `U (aⁿ − I) V = diag(d)`,
/// so there are exactly `|det(aⁿ − I)|` of them.
pub fn periodic_points(a: &ToralMatrix, n: usize) -> Result<Vec<PeriodicOrbit>, ExactError> {
    if n == 0 {
        return Err(ExactError::DimensionMismatch("period must be positive".into()));
    }
    let dim = a.dim();
    let an = a.as_int().pow_nonneg(n as u64);
    let b = &an - &IntMatrix::identity(dim);
    let snf = smith_normal_form(&b);
    let diag = snf.diagonal();
    if diag.iter().any(Zero::is_zero) {
        return Err(ExactError::DegenerateMatrix);
    }
    let sizes: Vec<u64> = diag
        .iter()
        .map(|d| d.to_u64().ok_or(ExactError::DegenerateMatrix))
        .collect::<Result<_, _>>()?;
    let total: u64 = sizes.iter().product();
    if total > 10_000_000 {
        return Err(ExactError::DimensionMismatch(format!("{total} periodic points is beyond enumeration scale")));
    }

    let mut remaining: BTreeSet<TorusPoint> = BTreeSet::new();
    let mut idx = vec![0u64; dim];
    loop {
        let y: Vec<BigRational> = idx
            .iter()
            .zip(&diag)
            .map(|(j, d)| BigRational::new(BigInt::from(*j), d.clone()))
            .collect();
        let x: TorusPoint = snf.v.mul_rational_vec(&y).iter().map(reduce_mod_one).collect();
        remaining.insert(x);
        // odometer over the index box
        let mut k = 0;
        loop {
            if k == dim {
                break;
            }
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == dim {
            break;
        }
    }
    debug_assert_eq!(remaining.len() as u64, total);

    let mut orbits = Vec::new();
    while let Some(start) = remaining.pop_first() {
        let mut points = vec![start.clone()];
        let mut cur = apply_mod_one(a.as_int(), &start);
        while cur != start {
            remaining.remove(&cur);
            points.push(cur.clone());
            cur = apply_mod_one(a.as_int(), &cur);
        }
        let period = points.len();
        orbits.push(PeriodicOrbit { period, points, stabilizer_index: period });
    }
    Ok(orbits)
}

/// Exact check `aᵖ x ≡ x (mod ℤᴺ)`.
pub fn is_periodic(a: &ToralMatrix, x: &[BigRational], period: usize) -> bool {
    let ap = a.as_int().pow_nonneg(period as u64);
    let y = ap.mul_rational_vec(x);
    y.iter().zip(x).all(|(u, v)| (u - v).is_integer())
}

/// `|det(aⁿ − I)|`.
pub fn periodic_count(a: &ToralMatrix, n: usize) -> BigInt {
    let an = a.as_int().pow_nonneg(n as u64);
    let d = (&an - &IntMatrix::identity(a.dim())).determinant();
    if d < BigInt::zero() {
        -d
    } else {
        d
    }
}

mod rational_points {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<String>> = v.iter().map(|p| p.iter().map(ToString::to_string).collect()).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let strs = Vec::<Vec<String>>::deserialize(d)?;
        strs.iter()
            .map(|p| p.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat() -> ToralMatrix {
        ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn cat_map_counts() {
        let fixed = periodic_points(&cat(), 1).unwrap();
        assert_eq!(fixed.len(), 1);
        assert_eq!(fixed[0].points, vec![vec![BigRational::zero(), BigRational::zero()]]);
        let two = periodic_points(&cat(), 2).unwrap();
        let total: usize = two.iter().map(|o| o.points.len()).sum();
        assert_eq!(total, 5);
        // origin plus two genuine 2-cycles
        let mut periods: Vec<usize> = two.iter().map(|o| o.period).collect();
        periods.sort();
        assert_eq!(periods, vec![1, 2, 2]);
        for o in &two {
            for p in &o.points {
                assert!(is_periodic(&cat(), p, 2));
            }
        }
    }

    #[test]
    fn identity_is_degenerate() {
        assert!(matches!(periodic_points(&ToralMatrix::identity(2), 1), Err(ExactError::DegenerateMatrix)));
    }

    #[test]
    fn counts_match_determinant() {
        let a = ToralMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 3], vec![0, 1, 0]]).unwrap();
        for n in 1..=5 {
            let total: usize = periodic_points(&a, n).unwrap().iter().map(|o| o.points.len()).sum();
            assert_eq!(BigInt::from(total), periodic_count(&a, n));
        }
    }
}
