//! Commutative structure around a matrix with irreducible characteristic
//! polynomial: the rational centralizer ℚ[A], the Dirichlet rank, a bounded
//! search for independent units in ℤ[A], and symplectic membership.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::roots::{complex_roots, eval_rational};
use crate::exact::{
    is_irreducible_over_z, matrix_power, parse_block, ExactError, IntMatrix, IntPolynomial, Irreducibility,
    ToralMatrix, MAX_EXPONENT,
};
use crate::lattice::find_relations;
use crate::mp::{Complex, Real};
use crate::spectrum::{joint_spectrum, SpectrumError};

#[derive(Debug, Error)]
pub enum CentralizerError {
    #[error("characteristic polynomial is reducible (factor {})", .0.pretty())]
    NotIrreducible(IntPolynomial),
    #[error("found {} independent units, Dirichlet rank is {expected}", .found.k())]
    RankNotReached { found: Box<GeneratorSet>, expected: usize },
    #[error("independence verdict is ambiguous at {0} bits")]
    PrecisionExhausted(usize),
    #[error("symplectic form needs even dimension, got {0}")]
    OddDimension(usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("generators {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("generators satisfy the relation {0:?}")]
    Dependent(Vec<i64>),
    #[error("invalid generator set: {0}")]
    Invalid(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// A commuting family of toral automorphisms, the image of the standard
/// generators of ℤᵏ.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    n: usize,
    generators: Vec<ToralMatrix>,
    pub provenance: String,
}

impl GeneratorSet {
    /// Checks dimensions and commutation exactly. Independence is not
    /// checked here; see [`GeneratorSet::certified`].
    pub fn new(generators: Vec<ToralMatrix>, provenance: impl Into<String>) -> Result<Self, CentralizerError> {
        let n = generators.first().map(|g| g.dim()).ok_or(CentralizerError::Invalid("no generators".into()))?;
        if generators.iter().any(|g| g.dim() != n) {
            return Err(CentralizerError::Invalid("generators of different dimensions".into()));
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].commutes_with(&generators[j]) {
                    return Err(CentralizerError::NotCommuting(i, j));
                }
            }
        }
        Ok(GeneratorSet { n, generators, provenance: provenance.into() })
    }

    /// As [`GeneratorSet::new`], and additionally requires a certified
    /// `Independent` verdict.
    pub fn certified(
        generators: Vec<ToralMatrix>,
        provenance: impl Into<String>,
        precision_bits: usize,
    ) -> Result<Self, CentralizerError> {
        let gs = Self::new(generators, provenance)?;
        match multiplicative_independence(&gs, precision_bits)? {
            Independence::Independent { .. } => Ok(gs),
            Independence::Relation { exponents, .. } => Err(CentralizerError::Dependent(exponents)),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[ToralMatrix] {
        &self.generators
    }

    /// `ρ*(m)` for `m ∈ ℤᵏ`.
    pub fn power(&self, m: &[i64]) -> Result<ToralMatrix, ExactError> {
        matrix_power(&self.generators, m)
    }

    /// Header `n k`, then `k` blocks in the matrix text format.
    pub fn parse(text: &str) -> Result<Self, CentralizerError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) =
            lines.next().ok_or(ExactError::Parse { line: 0, msg: "missing `n k` header".into() })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| ExactError::Parse { line: hline, msg: format!("expected `n k`, found `{header}`") })?;
        let [n, k] = nums[..] else {
            return Err(ExactError::Parse { line: hline, msg: format!("expected `n k`, found `{header}`") }.into());
        };
        let mut gens = Vec::with_capacity(k);
        for _ in 0..k {
            let (line, m) = parse_block(&mut lines)?;
            if m.dim() != n {
                return Err(ExactError::Parse { line, msg: format!("matrix of dimension {} in a set of dimension {n}", m.dim()) }.into());
            }
            gens.push(ToralMatrix::new(m)?);
        }
        if let Some((line, _)) = lines.next() {
            return Err(ExactError::Parse { line, msg: "trailing content after generator set".into() }.into());
        }
        Self::new(gens, "parsed from text")
    }
}

impl fmt::Display for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n, self.k())?;
        for g in &self.generators {
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSet")
            .field("n", &self.n)
            .field("generators", &self.generators)
            .field("provenance", &self.provenance)
            .finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSearchConfig {
    pub coefficient_bound: i64,
    pub max_candidates: usize,
    pub precision_bits: usize,
}

impl Default for UnitSearchConfig {
    fn default() -> Self {
        UnitSearchConfig { coefficient_bound: 3, max_candidates: 2000, precision_bits: crate::DEFAULT_PRECISION }
    }
}

fn require_irreducible(a: &ToralMatrix) -> Result<IntPolynomial, CentralizerError> {
    let p = a.char_poly();
    match is_irreducible_over_z(&p) {
        Irreducibility::Irreducible { .. } => Ok(p),
        Irreducibility::Reducible { factor } => Err(CentralizerError::NotIrreducible(factor)),
    }
}

/// `I, A, …, A^{N−1}`, a ℚ-basis of the centralizer algebra ℚ[A].
pub fn centralizer_basis(a: &ToralMatrix) -> Result<Vec<IntMatrix>, CentralizerError> {
    require_irreducible(a)?;
    let n = a.dim();
    let mut out = vec![IntMatrix::identity(n)];
    for i in 1..n {
        out.push(&out[i - 1] * a.as_int());
    }
    Ok(out)
}

/// Number of real roots and of complex-conjugate pairs, by Sturm sequences.
pub fn signature(a: &ToralMatrix) -> Result<(usize, usize), CentralizerError> {
    Ok(require_irreducible(a)?.signature())
}

/// `r + c − 1`.
pub fn dirichlet_rank(a: &ToralMatrix) -> Result<usize, CentralizerError> {
    let (r, c) = signature(a)?;
    Ok(r + c - 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Independence {
    /// No relation of Euclidean height below `excluded_height`.
    Independent { precision_bits: usize, excluded_height: f64 },
    /// `∏ Mⱼ^{vⱼ}` has finite order `order`, checked exactly.
    Relation { exponents: Vec<i64>, order: usize },
}

const RELATION_HEIGHT: f64 = 1e6;
const MAX_FINITE_ORDER: usize = 840;

/// Smallest `m ≤ 840` with `pᵐ = I`, if any.
pub fn finite_order(p: &ToralMatrix) -> Option<usize> {
    let id = IntMatrix::identity(p.dim());
    let mut acc = p.as_int().clone();
    for m in 1..=MAX_FINITE_ORDER {
        if acc == id {
            return Some(m);
        }
        acc = &acc * p.as_int();
        // finite-order integer matrices have bounded entries
        if acc.rows().iter().flatten().any(|x| x.bits() > 64) {
            return None;
        }
    }
    None
}

pub fn multiplicative_independence(gs: &GeneratorSet, precision_bits: usize) -> Result<Independence, CentralizerError> {
    let js = joint_spectrum(gs.generators(), precision_bits)?;
    let logs = js.log_moduli();
    let k = gs.k();
    let columns: Vec<Vec<Real>> = (0..k).map(|j| logs.iter().map(|row| row[j].clone()).collect()).collect();
    let search = find_relations(&columns, precision_bits, RELATION_HEIGHT);
    if let Some(rel) = search.relations.first() {
        let exps: Option<Vec<i64>> = rel.iter().map(|x| x.to_i64().filter(|v| v.abs() <= MAX_EXPONENT)).collect();
        let exps = exps.ok_or(CentralizerError::PrecisionExhausted(precision_bits))?;
        let p = gs.power(&exps)?;
        return match finite_order(&p) {
            Some(order) => Ok(Independence::Relation { exponents: exps, order }),
            None => Err(CentralizerError::PrecisionExhausted(precision_bits)),
        };
    }
    if !search.complete {
        return Err(CentralizerError::PrecisionExhausted(precision_bits));
    }
    Ok(Independence::Independent { precision_bits, excluded_height: search.excluded_height })
}

/// Standard form `[[0, I], [−I, 0]]`.
pub fn symplectic_form(n: usize) -> IntMatrix {
    let h = n / 2;
    let mut j = IntMatrix::zeros(n);
    for i in 0..h {
        j[(i, h + i)] = BigInt::one();
        j[(h + i, i)] = -BigInt::one();
    }
    j
}

pub fn is_symplectic(m: &ToralMatrix) -> Result<bool, CentralizerError> {
    let n = m.dim();
    if !n.is_multiple_of(2) {
        return Err(CentralizerError::OddDimension(n));
    }
    let j = symplectic_form(n);
    Ok(&(&m.transpose() * &j) * m.as_int() == j)
}

struct Candidate {
    coeffs: Vec<i64>,
    matrix: ToralMatrix,
    logs: Vec<Real>,
    size: f64,
}

/// Box search over `p(A) = Σ cᵢ Aⁱ` for units, sorted by the size of the
/// log embedding and then by coefficients.
fn unit_candidates(
    a: &ToralMatrix,
    cp: &IntPolynomial,
    cfg: &UnitSearchConfig,
    filter: impl Fn(&ToralMatrix) -> bool + Sync,
) -> Vec<Candidate> {
    let n = a.dim();
    let b = cfg.coefficient_bound.max(1);
    let side = (2 * b + 1) as u64;
    let total = side.pow(n as u32);
    let mut powers = vec![IntMatrix::identity(n)];
    for i in 1..n {
        powers.push(&powers[i - 1] * a.as_int());
    }
    let units: Vec<(Vec<i64>, ToralMatrix)> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let c: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (idx % side) as i64 - b;
                    idx /= side;
                    d
                })
                .collect();
            // skip constants: ±I are torsion
            if c[1..].iter().all(|x| *x == 0) {
                return None;
            }
            let mut m = IntMatrix::zeros(n);
            for (ci, p) in c.iter().zip(&powers) {
                if *ci != 0 {
                    m = &m + &p.scale(&BigInt::from(*ci));
                }
            }
            let t = ToralMatrix::new(m).ok()?;
            filter(&t).then_some((c, t))
        })
        .collect();

    let roots = complex_roots(cp, cfg.precision_bits + 32);
    let points: Vec<Complex> = roots.real.iter().map(|r| Complex::from_real(r.clone())).chain(roots.complex.iter().cloned()).collect();
    let mut cands: Vec<Candidate> = units
        .into_iter()
        .map(|(coeffs, matrix)| {
            let q: Vec<BigRational> = coeffs.iter().map(|c| BigRational::from_integer(BigInt::from(*c))).collect();
            let logs: Vec<Real> =
                points.iter().map(|z| eval_rational(&q, z).ln_abs().with_precision(cfg.precision_bits)).collect();
            let size = logs.iter().map(|l| l.to_f64().abs()).fold(0.0, f64::max);
            Candidate { coeffs, matrix, logs, size }
        })
        .filter(|c| c.size > 1e-6)
        .collect();
    cands.sort_by(|x, y| x.size.total_cmp(&y.size).then_with(|| x.coeffs.cmp(&y.coeffs)));
    cands.truncate(cfg.max_candidates);
    cands
}

fn log_vector(cp: &IntPolynomial, prec: usize) -> Vec<Real> {
    let roots = complex_roots(cp, prec + 32);
    roots
        .real
        .iter()
        .map(|r| r.abs().ln().with_precision(prec))
        .chain(roots.complex.iter().map(|z| z.ln_abs().with_precision(prec)))
        .collect()
}

/// Greedy independent subset, starting from `A`.
fn greedy_units(
    a: &ToralMatrix,
    cp: &IntPolynomial,
    cands: Vec<Candidate>,
    target: usize,
    prec: usize,
    provenance: String,
) -> Result<GeneratorSet, CentralizerError> {
    let mut chosen = vec![a.clone()];
    let mut columns = vec![log_vector(cp, prec)];
    for c in cands {
        if chosen.len() >= target {
            break;
        }
        let mut trial = columns.clone();
        trial.push(c.logs.clone());
        let res = find_relations(&trial, prec, RELATION_HEIGHT);
        if res.relations.is_empty() && res.complete {
            columns = trial;
            chosen.push(c.matrix);
        }
    }
    let found = chosen.len();
    let gs = GeneratorSet::new(chosen, provenance)?;
    if found < target {
        return Err(CentralizerError::RankNotReached { found: Box::new(gs), expected: target });
    }
    Ok(gs)
}

/// Bounded search for `dirichlet_rank(a)` multiplicatively independent
/// units of ℤ[A], always including `A`.
pub fn find_units(a: &ToralMatrix, cfg: &UnitSearchConfig) -> Result<GeneratorSet, CentralizerError> {
    let cp = require_irreducible(a)?;
    let (r, c) = cp.signature();
    let rank = r + c - 1;
    if rank == 0 {
        let gs = GeneratorSet::new(vec![a.clone()], "rank-zero field")?;
        return Err(CentralizerError::RankNotReached { found: Box::new(gs), expected: 0 });
    }
    let cands = unit_candidates(a, &cp, cfg, |_| true);
    let provenance = format!(
        "units p(A) with |coefficients| <= {} for char poly {}",
        cfg.coefficient_bound,
        cp.pretty()
    );
    greedy_units(a, &cp, cands, rank, cfg.precision_bits, provenance)
}

/// Units of ℤ[A] that are also symplectic. For `N = 4` the input must have a
/// real eigenvalue.
pub fn symplectic_centralizer_front_end(a: &ToralMatrix, cfg: &UnitSearchConfig) -> Result<GeneratorSet, CentralizerError> {
    let n = a.dim();
    if n < 4 {
        return Err(CentralizerError::HypothesisViolation(format!("dimension {n} < 4")));
    }
    if !is_symplectic(a)? {
        return Err(CentralizerError::HypothesisViolation("matrix is not symplectic".into()));
    }
    let cp = match require_irreducible(a) {
        Ok(p) => p,
        Err(CentralizerError::NotIrreducible(f)) => {
            return Err(CentralizerError::HypothesisViolation(format!(
                "characteristic polynomial is reducible (factor {})",
                f.pretty()
            )))
        }
        Err(e) => return Err(e),
    };
    let (r, c) = cp.signature();
    if n == 4 && r == 0 {
        return Err(CentralizerError::HypothesisViolation("N = 4 and no real eigenvalue".into()));
    }
    let cands = unit_candidates(a, &cp, cfg, |m| is_symplectic(m).unwrap_or(false));
    let provenance = format!(
        "symplectic units p(A) with |coefficients| <= {} for char poly {}",
        cfg.coefficient_bound,
        cp.pretty()
    );
    // the symplectic units have rank at most r + c − 1; take what the box offers
    match greedy_units(a, &cp, cands, r + c - 1, cfg.precision_bits, provenance) {
        Ok(gs) => Ok(gs),
        Err(CentralizerError::RankNotReached { found, .. }) => Ok(*found),
        Err(e) => Err(e),
    }
}

/// Determinant sign of a unit `p(A)` read off from its eigenvalues, used as
/// an independent cross-check of the exact determinant in tests.
pub fn norm_sign(coeffs: &[i64], cp: &IntPolynomial, prec: usize) -> i32 {
    let q: Vec<BigRational> = coeffs.iter().map(|c| BigRational::from_integer(BigInt::from(*c))).collect();
    let roots = complex_roots(cp, prec);
    let neg = roots.real.iter().filter(|r| eval_rational(&q, &Complex::from_real((*r).clone())).re.is_negative()).count();
    if neg % 2 == 0 {
        1
    } else {
        -1
    }
}
