use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::grid::GridDisplacement;
use super::ConjugacyError;
use crate::exact::{ExactError, ToralMatrix};

/// A differentiable self-map of ℝᴺ given on lifts.
pub trait DiffMap: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn jacobian(&self, x: &[f64]) -> DMatrix<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Sin,
    Cos,
}

/// `coeff · wave(2π ⟨freq, x⟩)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub wave: Wave,
    pub freq: Vec<i64>,
    pub coeff: Vec<f64>,
}

impl TrigTerm {
    pub fn sin(freq: &[i64], coeff: &[f64]) -> Self {
        TrigTerm { wave: Wave::Sin, freq: freq.to_vec(), coeff: coeff.to_vec() }
    }

    pub fn cos(freq: &[i64], coeff: &[f64]) -> Self {
        TrigTerm { wave: Wave::Cos, freq: freq.to_vec(), coeff: coeff.to_vec() }
    }

    fn phase(&self, x: &[f64]) -> f64 {
        TAU * self.freq.iter().zip(x).map(|(k, v)| *k as f64 * v).sum::<f64>()
    }
}

pub fn trig_eval(terms: &[TrigTerm], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for t in terms {
        let s = match t.wave {
            Wave::Sin => t.phase(x).sin(),
            Wave::Cos => t.phase(x).cos(),
        };
        for (o, c) in out.iter_mut().zip(&t.coeff) {
            *o += c * s;
        }
    }
    out
}

pub fn trig_jacobian(terms: &[TrigTerm], x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for t in terms {
        let d = match t.wave {
            Wave::Sin => t.phase(x).cos(),
            Wave::Cos => -t.phase(x).sin(),
        };
        for r in 0..n {
            for c in 0..n {
                j[(r, c)] += t.coeff[r] * d * TAU * t.freq[c] as f64;
            }
        }
    }
    j
}

/// The periodic part `u` of `f(x) = A x + u(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Displacement {
    Zero,
    Trig { terms: Vec<TrigTerm> },
    Grid { grid: GridDisplacement },
    /// `f = φ ∘ A ∘ φ⁻¹` with `φ = id + ψ`, `ψ` trigonometric.
    Conjugated { psi: Vec<TrigTerm> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerturbedMap {
    pub linear: ToralMatrix,
    pub displacement: Displacement,
    pub smoothness: String,
    #[serde(skip)]
    a: DMatrix<f64>,
    #[serde(skip)]
    a_inv: DMatrix<f64>,
}

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX: usize = 50;

impl PerturbedMap {
    pub fn new(linear: ToralMatrix, displacement: Displacement) -> Self {
        let a = linear.to_nalgebra();
        let a_inv = linear.inverse().to_nalgebra();
        let smoothness = match &displacement {
            Displacement::Zero => "linear",
            Displacement::Trig { .. } | Displacement::Conjugated { .. } => "analytic",
            Displacement::Grid { .. } => "Lipschitz (grid)",
        }
        .to_string();
        PerturbedMap { linear, displacement, smoothness, a, a_inv }
    }

    pub fn linear_only(linear: ToralMatrix) -> Self {
        Self::new(linear, Displacement::Zero)
    }

    pub fn trig(linear: ToralMatrix, terms: Vec<TrigTerm>) -> Self {
        Self::new(linear, Displacement::Trig { terms })
    }

    pub fn conjugated(linear: ToralMatrix, psi: Vec<TrigTerm>) -> Self {
        Self::new(linear, Displacement::Conjugated { psi })
    }

    /// Restore the cached `f64` matrices after deserialization.
    pub fn rehydrate(self) -> Self {
        Self::new(self.linear, self.displacement)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn a_inv(&self) -> &DMatrix<f64> {
        &self.a_inv
    }

    fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
        (m * DVector::from_column_slice(x)).as_slice().to_vec()
    }

    pub fn linear_apply(&self, x: &[f64]) -> Vec<f64> {
        Self::mat_vec(&self.a, x)
    }

    /// `φ⁻¹(y)` for the conjugating map, by Newton iteration on the
    /// fractional part of `y` (φ commutes with integer translations).
    pub fn phi_inverse(psi: &[TrigTerm], y: &[f64]) -> Result<Vec<f64>, ConjugacyError> {
        let n = y.len();
        let shift: Vec<f64> = y.iter().map(|v| v.floor()).collect();
        let y: Vec<f64> = y.iter().zip(&shift).map(|(v, k)| v - k).collect();
        let mut x = y.clone();
        for _ in 0..NEWTON_MAX {
            let r: Vec<f64> = trig_eval(psi, &x).iter().zip(&x).zip(&y).map(|((p, xi), yi)| xi + p - yi).collect();
            if r.iter().map(|v| v.abs()).fold(0.0, f64::max) < NEWTON_TOL {
                return Ok(x.iter().zip(&shift).map(|(a, k)| a + k).collect());
            }
            let j = DMatrix::identity(n, n) + trig_jacobian(psi, &x);
            let dx = j.lu().solve(&DVector::from_vec(r)).ok_or(ConjugacyError::NonInvertible)?;
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi -= d;
            }
        }
        Err(ConjugacyError::NonInvertible)
    }

    pub fn phi(psi: &[TrigTerm], x: &[f64]) -> Vec<f64> {
        x.iter().zip(trig_eval(psi, x)).map(|(a, b)| a + b).collect()
    }

    /// `u(x) = f(x) − A x`.
    pub fn displacement_at(&self, x: &[f64]) -> Vec<f64> {
        let fx = self.apply(x);
        let ax = self.linear_apply(x);
        fx.iter().zip(ax).map(|(a, b)| a - b).collect()
    }

    /// `f⁻¹(y)` on lifts, Newton seeded at `A⁻¹y − A⁻¹u(A⁻¹y)`.
    pub fn inverse(&self, y: &[f64]) -> Result<Vec<f64>, ConjugacyError> {
        match &self.displacement {
            Displacement::Zero => return Ok(Self::mat_vec(&self.a_inv, y)),
            Displacement::Conjugated { psi } => {
                let z = Self::phi_inverse(psi, y)?;
                return Ok(Self::phi(psi, &Self::mat_vec(&self.a_inv, &z)));
            }
            _ => {}
        }
        let n = y.len();
        let z = Self::mat_vec(&self.a_inv, y);
        let uz = self.displacement_at(&z);
        let corr = Self::mat_vec(&self.a_inv, &uz);
        let mut x: Vec<f64> = z.iter().zip(corr).map(|(a, b)| a - b).collect();
        for _ in 0..NEWTON_MAX {
            let r: Vec<f64> = self.apply(&x).iter().zip(y).map(|(a, b)| a - b).collect();
            if r.iter().map(|v| v.abs()).fold(0.0, f64::max) < NEWTON_TOL {
                return Ok(x);
            }
            let dx = self.jacobian(&x).lu().solve(&DVector::from_vec(r)).ok_or(ConjugacyError::NonInvertible)?;
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi -= d;
            }
            if x.iter().any(|v| !v.is_finite()) || n == 0 {
                break;
            }
        }
        Err(ConjugacyError::NonInvertible)
    }

    /// Minimum of `|det Df|` over a grid of the given resolution.
    pub fn min_jacobian_det(&self, resolution: usize) -> f64 {
        let n = self.linear.dim();
        (0..resolution.pow(n as u32))
            .map(|p| self.jacobian(&super::grid::point(n, resolution, p)).determinant().abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Parse the text format: a matrix block, then either `displacement` or
    /// `conjugate`, a term count, and lines `<sin|cos> k₁ … k_N c₁ … c_N`.
    /// A matrix block alone gives the linear map.
    pub fn parse(text: &str) -> Result<Self, ExactError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (last, m) = crate::exact::parse_block(&mut lines)?;
        let a = ToralMatrix::new(m)?;
        let n = a.dim();
        let Some((kline, kind)) = lines.next() else {
            return Ok(Self::linear_only(a));
        };
        let conj = match kind {
            "displacement" => false,
            "conjugate" => true,
            other => {
                return Err(ExactError::Parse {
                    line: kline,
                    msg: format!("expected `displacement` or `conjugate`, found `{other}`"),
                })
            }
        };
        let (cline, count) = lines.next().ok_or(ExactError::Parse { line: kline + 1, msg: "missing term count".into() })?;
        let count: usize =
            count.parse().map_err(|_| ExactError::Parse { line: cline, msg: format!("bad term count `{count}`") })?;
        let mut terms = Vec::with_capacity(count);
        let mut prev = cline.max(last);
        for _ in 0..count {
            let (line, t) = lines.next().ok_or(ExactError::Parse { line: prev + 1, msg: "missing trigonometric term".into() })?;
            prev = line;
            let parts: Vec<&str> = t.split_whitespace().collect();
            if parts.len() != 1 + 2 * n {
                return Err(ExactError::Parse { line, msg: format!("expected 1 + {} fields, found {}", 2 * n, parts.len()) });
            }
            let wave = match parts[0] {
                "sin" => Wave::Sin,
                "cos" => Wave::Cos,
                w => return Err(ExactError::Parse { line, msg: format!("unknown wave `{w}`") }),
            };
            let freq: Vec<i64> = parts[1..=n]
                .iter()
                .map(|s| s.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| ExactError::Parse { line, msg: "bad frequency".into() })?;
            let coeff: Vec<f64> = parts[n + 1..]
                .iter()
                .map(|s| s.parse())
                .collect::<Result<_, _>>()
                .map_err(|_| ExactError::Parse { line, msg: "bad coefficient".into() })?;
            terms.push(TrigTerm { wave, freq, coeff });
        }
        if let Some((line, _)) = lines.next() {
            return Err(ExactError::Parse { line, msg: "trailing content".into() });
        }
        Ok(if conj { Self::conjugated(a, terms) } else { Self::trig(a, terms) })
    }

    /// Scale every trigonometric coefficient by `eps`.
    pub fn scaled(&self, eps: f64) -> Self {
        let scale = |ts: &[TrigTerm]| {
            ts.iter().map(|t| TrigTerm { coeff: t.coeff.iter().map(|c| c * eps).collect(), ..t.clone() }).collect()
        };
        let d = match &self.displacement {
            Displacement::Trig { terms } => Displacement::Trig { terms: scale(terms) },
            Displacement::Conjugated { psi } => Displacement::Conjugated { psi: scale(psi) },
            other => other.clone(),
        };
        Self::new(self.linear.clone(), d)
    }
}

impl DiffMap for PerturbedMap {
    fn dim(&self) -> usize {
        self.linear.dim()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.linear_apply(x);
        match &self.displacement {
            Displacement::Zero => ax,
            Displacement::Trig { terms } => ax.iter().zip(trig_eval(terms, x)).map(|(a, b)| a + b).collect(),
            Displacement::Grid { grid } => ax.iter().zip(grid.eval(x)).map(|(a, b)| a + b).collect(),
            Displacement::Conjugated { psi } => {
                // φ⁻¹ is well defined for small ψ; a failure here is a misuse
                let z = Self::phi_inverse(psi, x).expect("conjugating map is not invertible");
                Self::phi(psi, &self.linear_apply(&z))
            }
        }
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        match &self.displacement {
            Displacement::Zero => self.a.clone(),
            Displacement::Trig { terms } => &self.a + trig_jacobian(terms, x),
            Displacement::Grid { grid } => {
                let h = 0.5 / grid.resolution as f64;
                let mut j = self.a.clone();
                for c in 0..n {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[c] += h;
                    xm[c] -= h;
                    let (up, um) = (grid.eval(&xp), grid.eval(&xm));
                    for r in 0..n {
                        j[(r, c)] += (up[r] - um[r]) / (2.0 * h);
                    }
                }
                j
            }
            Displacement::Conjugated { psi } => {
                let z = Self::phi_inverse(psi, x).expect("conjugating map is not invertible");
                let az = self.linear_apply(&z);
                let dphi_az = DMatrix::identity(n, n) + trig_jacobian(psi, &az);
                let dphi_z = DMatrix::identity(n, n) + trig_jacobian(psi, &z);
                let inv = dphi_z.try_inverse().expect("conjugating map is singular");
                dphi_az * &self.a * inv
            }
        }
    }
}
