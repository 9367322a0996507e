use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ExactError;

/// Largest |exponent| accepted by [`matrix_power`] and [`ToralMatrix::pow`].
pub const MAX_EXPONENT: i64 = 64;

/// Square matrix of arbitrary-precision integers, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    n: usize,
    #[serde(with = "bigint_vec")]
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(n: usize) -> Self {
        IntMatrix { n, data: vec![BigInt::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, ExactError> {
        let n = rows.len();
        if n == 0 {
            return Err(ExactError::DimensionMismatch("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(ExactError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {n}",
                    r.len()
                )));
            }
            data.extend(r.iter().cloned().map(Into::into));
        }
        Ok(IntMatrix { n, data })
    }

    /// Block-diagonal matrix `diag(a, b)`.
    pub fn block_diag(a: &IntMatrix, b: &IntMatrix) -> Self {
        let n = a.n + b.n;
        let mut m = IntMatrix::zeros(n);
        for i in 0..a.n {
            for j in 0..a.n {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.n {
            for j in 0..b.n {
                m[(a.n + i, a.n + j)] = b[(i, j)].clone();
            }
        }
        m
    }

    pub fn companion(poly: &super::IntPolynomial) -> Result<Self, ExactError> {
        let d = poly.degree().ok_or_else(|| ExactError::DimensionMismatch("zero polynomial".into()))?;
        if d == 0 || !poly.is_monic() {
            return Err(ExactError::DimensionMismatch("companion needs a monic polynomial of degree >= 1".into()));
        }
        let mut m = IntMatrix::zeros(d);
        for i in 1..d {
            m[(i, i - 1)] = BigInt::one();
        }
        for i in 0..d {
            m[(i, d - 1)] = -poly.coeff(i);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMatrix { n: self.n, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn mul_rational_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.n)
            .map(|i| {
                (0..self.n).fold(BigRational::zero(), |acc, j| {
                    acc + BigRational::from_integer(self[(i, j)].clone()) * &v[j]
                })
            })
            .collect()
    }

    pub fn commutes_with(&self, other: &IntMatrix) -> bool {
        self * other == other * self
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].to_f64().unwrap_or(f64::NAN))
    }

    /// Exact determinant by Bareiss fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        determinant(self)
    }

    pub fn pow_nonneg(&self, mut e: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Parse the matrix text format: a line `N` then `N` rows of `N` integers.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ExactError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, m) = parse_block(&mut lines)?;
        if let Some((line, _)) = lines.next() {
            return Err(ExactError::Parse { line, msg: "trailing content after matrix".into() });
        }
        Ok(m)
    }
}

/// Parse one matrix block from an iterator of `(line_number, trimmed_line)`.
pub(crate) fn parse_block<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<(usize, IntMatrix), ExactError> {
    let (hline, header) =
        lines.next().ok_or(ExactError::Parse { line: 0, msg: "missing dimension line".into() })?;
    let n: usize = header
        .parse()
        .map_err(|_| ExactError::Parse { line: hline, msg: format!("expected dimension, found `{header}`") })?;
    if n == 0 {
        return Err(ExactError::Parse { line: hline, msg: "dimension must be positive".into() });
    }
    let mut rows = Vec::with_capacity(n);
    let mut last = hline;
    for r in 0..n {
        let (line, text) = lines.next().ok_or(ExactError::Parse {
            line: last + 1,
            msg: format!("expected {n} rows, found {r}"),
        })?;
        last = line;
        let row: Result<Vec<BigInt>, _> = text.split_whitespace().map(str::parse::<BigInt>).collect();
        let row = row.map_err(|e| ExactError::Parse { line, msg: format!("bad integer: {e}") })?;
        if row.len() != n {
            return Err(ExactError::Parse { line, msg: format!("expected {n} entries, found {}", row.len()) });
        }
        rows.push(row);
    }
    Ok((last, IntMatrix::from_rows(&rows)?))
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = IntMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * &rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        IntMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix { n: self.n, data: self.data.iter().map(|x| -x).collect() }
    }
}

impl fmt::Display for IntMatrix {
    /// Matrix text format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.data.chunks(self.n) {
            let r: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", r.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            self.data.chunks(self.n).map(|r| r.iter().map(ToString::to_string).collect()).collect();
        write!(f, "{rows:?}")
    }
}

/// Bareiss fraction-free determinant.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.n;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.rows();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Exact inverse over the rationals; `None` when singular.
pub fn rational_inverse(m: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    let n = m.n;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        BigRational::from_integer(m[(i, j)].clone())
                    } else if j - n == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..2 * n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Element of GL(N, ℤ): an integer matrix with determinant ±1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct ToralMatrix {
    m: IntMatrix,
    det: i8,
}

impl ToralMatrix {
    pub fn new(m: IntMatrix) -> Result<Self, ExactError> {
        let d = m.determinant();
        if d.is_one() {
            Ok(ToralMatrix { m, det: 1 })
        } else if (-&d).is_one() {
            Ok(ToralMatrix { m, det: -1 })
        } else {
            Err(ExactError::NotUnimodular(d))
        }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, ExactError> {
        ToralMatrix::new(IntMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        ToralMatrix { m: IntMatrix::identity(n), det: 1 }
    }

    pub fn parse(text: &str) -> Result<Self, ExactError> {
        ToralMatrix::new(IntMatrix::parse(text)?)
    }

    pub fn det(&self) -> i8 {
        self.det
    }

    pub fn as_int(&self) -> &IntMatrix {
        &self.m
    }

    pub fn into_int(self) -> IntMatrix {
        self.m
    }

    /// Exact inverse; integral because the determinant is a unit.
    pub fn inverse(&self) -> ToralMatrix {
        let inv = rational_inverse(&self.m).expect("unimodular matrices are invertible");
        let rows: Vec<Vec<BigInt>> = inv
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| {
                        debug_assert!(x.is_integer());
                        x.to_integer()
                    })
                    .collect()
            })
            .collect();
        ToralMatrix { m: IntMatrix::from_rows(&rows).expect("square"), det: self.det }
    }

    /// `self^e` for `|e| <= MAX_EXPONENT`.
    pub fn pow(&self, e: i64) -> Result<ToralMatrix, ExactError> {
        if e.abs() > MAX_EXPONENT {
            return Err(ExactError::ExponentOutOfRange(e));
        }
        Ok(self.pow_unbounded(e))
    }

    pub(crate) fn pow_unbounded(&self, e: i64) -> ToralMatrix {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let m = base.m.pow_nonneg(e.unsigned_abs());
        let det = if e.is_odd() { self.det } else { 1 };
        ToralMatrix { m, det }
    }

    pub fn mul(&self, other: &ToralMatrix) -> ToralMatrix {
        ToralMatrix { m: &self.m * &other.m, det: self.det * other.det }
    }

    pub fn char_poly(&self) -> super::IntPolynomial {
        super::char_poly(&self.m)
    }
}

impl std::ops::Deref for ToralMatrix {
    type Target = IntMatrix;
    fn deref(&self) -> &IntMatrix {
        &self.m
    }
}

impl TryFrom<IntMatrix> for ToralMatrix {
    type Error = ExactError;
    fn try_from(m: IntMatrix) -> Result<Self, ExactError> {
        ToralMatrix::new(m)
    }
}

impl From<ToralMatrix> for IntMatrix {
    fn from(t: ToralMatrix) -> IntMatrix {
        t.m
    }
}

impl fmt::Display for ToralMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.m.fmt(f)
    }
}

impl fmt::Debug for ToralMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.m.fmt(f)
    }
}

/// Exact product `∏ generators[j]^exponents[j]`.
///
/// The generators are expected to commute, so the order of the factors is
/// irrelevant; the product is always formed in index order.
pub fn matrix_power(generators: &[ToralMatrix], exponents: &[i64]) -> Result<ToralMatrix, ExactError> {
    if generators.len() != exponents.len() {
        return Err(ExactError::DimensionMismatch(format!(
            "{} generators but {} exponents",
            generators.len(),
            exponents.len()
        )));
    }
    let n = generators
        .first()
        .map(|g| g.dim())
        .ok_or_else(|| ExactError::DimensionMismatch("empty generator list".into()))?;
    let mut acc = ToralMatrix::identity(n);
    for (g, &e) in generators.iter().zip(exponents) {
        if e != 0 {
            acc = acc.mul(&g.pow(e)?);
        }
    }
    Ok(acc)
}

mod bigint_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(ToString::to_string).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(IntMatrix::identity(3).determinant(), BigInt::from(1));
        assert_eq!(m(&[&[2, 1], &[1, 1]]).determinant(), BigInt::from(1));
        assert_eq!(m(&[&[1, 1], &[1, 0]]).determinant(), BigInt::from(-1));
        assert_eq!(m(&[&[0, 1, 0], &[0, 0, 1], &[1, 3, 0]]).determinant(), BigInt::from(1));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).determinant(), BigInt::from(0));
    }

    #[test]
    fn non_unimodular_rejected() {
        assert!(matches!(ToralMatrix::new(m(&[&[2, 0], &[0, 1]])), Err(ExactError::NotUnimodular(_))));
    }

    #[test]
    fn powers_and_inverse() {
        let a = ToralMatrix::new(m(&[&[2, 1], &[1, 1]])).unwrap();
        assert_eq!(a.pow(2).unwrap().as_int(), &m(&[&[5, 3], &[3, 2]]));
        let inv = a.pow(-1).unwrap();
        assert_eq!(inv.as_int(), &m(&[&[1, -1], &[-1, 2]]));
        assert_eq!(a.mul(&inv), ToralMatrix::identity(2));
        assert_eq!(matrix_power(std::slice::from_ref(&a), &[0]).unwrap(), ToralMatrix::identity(2));
        assert!(matches!(a.pow(65), Err(ExactError::ExponentOutOfRange(65))));
    }

    #[test]
    fn text_format() {
        let a = IntMatrix::parse("2\n2 1\n1 1\n").unwrap();
        assert_eq!(a, m(&[&[2, 1], &[1, 1]]));
        assert_eq!(IntMatrix::parse(&a.to_string()).unwrap(), a);
        match IntMatrix::parse("2\n2 1\n1 x\n") {
            Err(ExactError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match IntMatrix::parse("3\n1 0 0\n0 1\n") {
            Err(ExactError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn serde_mirror() {
        let a = ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
        let js = serde_json::to_string(&a).unwrap();
        let back: ToralMatrix = serde_json::from_str(&js).unwrap();
        assert_eq!(a, back);
        let bad = js.replace("\"2\"", "\"3\"");
        assert!(serde_json::from_str::<ToralMatrix>(&bad).is_err());
    }
}
