//! Lyapunov exponent functionals of a linear ℤᵏ action, coarse Lyapunov
//! classes and Weyl chambers.
//!
//! A functional χ is stored by its values on the standard generators, so
//! `χ(m) = Σ mⱼ χⱼ`. Values are kept both at working precision and as `f64`;
//! proportionality verdicts use the former, chamber geometry the latter.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centralizer::GeneratorSet;
use crate::mp::{Complex, Real};
use crate::spectrum::{joint_spectrum, SpectrumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LyapunovError {
    #[error("generator {0} is not diagonal in the joint eigenbasis")]
    NotSimultaneouslyDiagonalizable(usize),
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("chamber enumeration supports k <= 4, got k = {0}")]
    TooManyGenerators(usize),
    #[error("no lattice point with margin {margin} found in the open cone")]
    NoLatticePoint { margin: f64 },
    #[error("the open cone is empty")]
    EmptyCone,
}

impl From<SpectrumError> for LyapunovError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::NotSimultaneouslyDiagonalizable(j) => LyapunovError::NotSimultaneouslyDiagonalizable(j),
            other => LyapunovError::DegenerateSpectrum(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenType {
    Real,
    ComplexPair,
}

impl EigenType {
    pub fn dim(self) -> usize {
        match self {
            EigenType::Real => 1,
            EigenType::ComplexPair => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LyapunovFunctional {
    /// `χ(eⱼ) = log |eigenvalue of generator j|`.
    pub values: Vec<f64>,
    #[serde(skip)]
    pub values_mp: Vec<Real>,
    pub eigen_type: EigenType,
    /// Real basis of the eigenspace in ℝᴺ.
    pub eigenspace: Vec<Vec<f64>>,
    /// `(re, im)` of the eigenvalue of each generator (the representative
    /// with positive imaginary part for a pair).
    pub eigenvalue_per_generator: Vec<(f64, f64)>,
    #[serde(skip)]
    pub eigenvalues_mp: Vec<Complex>,
    pub precision_bits: usize,
}

impl LyapunovFunctional {
    pub fn eval(&self, m: &[i64]) -> f64 {
        self.values.iter().zip(m).map(|(v, x)| v * *x as f64).sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.values.iter().zip(x).map(|(v, y)| v * y).sum()
    }

    pub fn eval_mp(&self, m: &[i64]) -> Real {
        let p = self.precision_bits;
        self.values_mp.iter().zip(m).fold(Real::zero(p), |acc, (v, x)| acc + v * Real::from_i64(*x, p))
    }

    pub fn dim(&self) -> usize {
        self.eigen_type.dim()
    }

    /// Synthetic functional with no eigen data, for geometry-only use.
    pub fn from_values(values: &[f64], eigen_type: EigenType, precision_bits: usize) -> Self {
        LyapunovFunctional {
            values: values.to_vec(),
            values_mp: values.iter().map(|v| Real::from_f64(*v, precision_bits)).collect(),
            eigen_type,
            eigenspace: Vec::new(),
            eigenvalue_per_generator: Vec::new(),
            eigenvalues_mp: Vec::new(),
            precision_bits,
        }
    }
}

/// One functional per real eigenvalue and per complex pair, sorted
/// lexicographically by values.
pub fn exponent_functionals(gs: &GeneratorSet, precision_bits: usize) -> Result<Vec<LyapunovFunctional>, LyapunovError> {
    let js = joint_spectrum(gs.generators(), precision_bits)?;
    let logs = js.log_moduli();
    let mut out = Vec::with_capacity(js.eigen.len());
    for (idx, e) in js.eigen.iter().enumerate() {
        let eigenspace = js.eigenspace_basis(idx);
        let per: Vec<(f64, f64)> = e.per_generator.iter().map(|z| z.to_f64()).collect();
        validate_eigenvectors(gs, &eigenspace, &per)?;
        out.push(LyapunovFunctional {
            values: logs[idx].iter().map(Real::to_f64).collect(),
            values_mp: logs[idx].clone(),
            eigen_type: if e.is_real { EigenType::Real } else { EigenType::ComplexPair },
            eigenspace,
            eigenvalue_per_generator: per,
            eigenvalues_mp: e.per_generator.clone(),
            precision_bits,
        });
    }
    out.sort_by(|a, b| {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// `Mⱼ v = μⱼ v` in `f64` for the complex eigenvector `v = x + i y`.
fn validate_eigenvectors(gs: &GeneratorSet, basis: &[Vec<f64>], mu: &[(f64, f64)]) -> Result<(), LyapunovError> {
    let x = DVector::from_vec(basis[0].clone());
    let y = basis.get(1).map(|b| DVector::from_vec(b.clone())).unwrap_or_else(|| DVector::zeros(x.len()));
    for (j, (g, &(re, im))) in gs.generators().iter().zip(mu).enumerate() {
        let m = g.to_nalgebra();
        let scale = m.norm() * (x.norm() + y.norm());
        // (re + i im)(x + i y) = (re x − im y) + i (im x + re y)
        let rx = &m * &x - (&x * re - &y * im);
        let ry = &m * &y - (&x * im + &y * re);
        if rx.norm() + ry.norm() > 1e-8 * scale.max(1.0) {
            return Err(LyapunovError::NotSimultaneouslyDiagonalizable(j));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoarseSplitting {
    /// Functional indices of each class, in increasing order.
    pub groups: Vec<Vec<usize>>,
    /// `scales[c][i]`: `χ_{groups[c][i]} = scales[c][i] · χ_{groups[c][0]}`.
    pub scales: Vec<Vec<f64>>,
    /// Combined real eigenspace basis of each class.
    pub eigenspaces: Vec<Vec<Vec<f64>>>,
    pub functionals: Vec<LyapunovFunctional>,
    pub tolerance: f64,
}

impl CoarseSplitting {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Representative functional of class `c`.
    pub fn representative(&self, c: usize) -> &LyapunovFunctional {
        &self.functionals[self.groups[c][0]]
    }

    pub fn class_dim(&self, c: usize) -> usize {
        self.groups[c].iter().map(|&i| self.functionals[i].dim()).sum()
    }

    pub fn k(&self) -> usize {
        self.functionals.first().map_or(0, |f| f.values.len())
    }

    pub fn class_of(&self, functional: usize) -> usize {
        self.groups.iter().position(|g| g.contains(&functional)).expect("functional index out of range")
    }
}

/// Relative tolerance `2^{−prec/2}`.
pub fn default_tolerance(precision_bits: usize) -> f64 {
    2f64.powf(-(precision_bits as f64) / 2.0)
}

/// Squared relative distance of `psi` from the line through `chi`, and the
/// projection coefficient.
fn proportionality(chi: &[Real], psi: &[Real]) -> (Real, Real) {
    let p = chi[0].precision();
    let dot = |a: &[Real], b: &[Real]| a.iter().zip(b).fold(Real::zero(p), |acc, (x, y)| acc + x * y);
    let cc = dot(chi, chi);
    let pp = dot(psi, psi);
    let cp = dot(chi, psi);
    let c = &cp / &cc;
    let resid = (&pp - &(&cp * &c)) / pp;
    (resid, c)
}

/// Group functionals that are positive multiples of one another.
///
/// A pair is merged when the relative distance from proportionality is below
/// `tol`, kept apart when it exceeds `√tol`, and anything in between is
/// reported as `DegenerateSpectrum`.
pub fn coarse_spaces(fs: &[LyapunovFunctional], tol: f64) -> Result<CoarseSplitting, LyapunovError> {
    let prec = fs.first().map_or(64, |f| f.precision_bits);
    let tol_sq = Real::from_f64(tol * tol, prec);
    let amb_sq = Real::from_f64(tol, prec);
    for (i, f) in fs.iter().enumerate() {
        if f.values_mp.iter().all(|v| v.abs().to_f64() < tol) {
            return Err(LyapunovError::DegenerateSpectrum(format!("functional {i} vanishes")));
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut scales: Vec<Vec<f64>> = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let mut placed = false;
        for (g, s) in groups.iter_mut().zip(scales.iter_mut()) {
            let (resid, c) = proportionality(&fs[g[0]].values_mp, &f.values_mp);
            if resid < tol_sq {
                if c.is_negative() {
                    continue;
                }
                g.push(i);
                s.push(c.to_f64());
                placed = true;
                break;
            } else if resid < amb_sq {
                return Err(LyapunovError::DegenerateSpectrum(format!(
                    "functionals {} and {i} are nearly proportional (relative residual {:.3e})",
                    g[0],
                    resid.to_f64().sqrt()
                )));
            }
        }
        if !placed {
            groups.push(vec![i]);
            scales.push(vec![1.0]);
        }
    }
    let eigenspaces = groups.iter().map(|g| g.iter().flat_map(|&i| fs[i].eigenspace.clone()).collect()).collect();
    Ok(CoarseSplitting { groups, scales, eigenspaces, functionals: fs.to_vec(), tolerance: tol })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylChamber {
    /// `+1` or `−1` per coarse class.
    pub signs: Vec<i8>,
    pub representative: Vec<i64>,
    /// Functional indices whose kernels bound the chamber.
    pub walls: Vec<usize>,
    pub margin: f64,
}

pub const DEFAULT_MARGIN: f64 = 1e-3;

/// Maximize `t` subject to `sᵢ χᵢ·x ≥ t`, `|xⱼ| ≤ 1`, `t ≤ 1`.
fn cone_depth(ineqs: &[(Vec<f64>, i8)], k: usize) -> Option<(Vec<f64>, f64)> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..k).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    for (chi, s) in ineqs {
        let mut expr: Vec<_> = xs.iter().zip(chi).map(|(x, c)| (*x, *s as f64 * c)).collect();
        expr.push((t, -1.0));
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().ok()?;
    Some((xs.iter().map(|x| sol[*x]).collect(), sol[t]))
}

fn satisfies(ineqs: &[(Vec<f64>, i8)], m: &[i64], margin: f64) -> bool {
    ineqs.iter().all(|(chi, s)| {
        let v: f64 = chi.iter().zip(m).map(|(c, x)| c * *x as f64).sum();
        *s as f64 * v >= margin
    })
}

fn box_search(ineqs: &[(Vec<f64>, i8)], k: usize, radius: i64, margin: f64) -> Option<Vec<i64>> {
    let side = (2 * radius + 1) as usize;
    let mut best: Option<(i64, i64, Vec<i64>)> = None;
    for mut idx in 0..side.pow(k as u32) {
        let m: Vec<i64> = (0..k)
            .map(|_| {
                let d = (idx % side) as i64 - radius;
                idx /= side;
                d
            })
            .collect();
        if satisfies(ineqs, &m, margin) {
            let key = (m.iter().map(|x| x.abs()).max().unwrap_or(0), m.iter().map(|x| x.abs()).sum());
            if best.as_ref().is_none_or(|b| (key.0, key.1, &m) < (b.0, b.1, &b.2)) {
                best = Some((key.0, key.1, m));
            }
        }
    }
    best.map(|b| b.2)
}

/// Integer point of the open cone `{sᵢ χᵢ(m) > 0}` with every `|χᵢ(m)| ≥ margin`.
///
/// Small boxes are scanned first for a short witness; otherwise the LP
/// interior direction is scaled and rounded, then larger boxes are tried.
pub fn find_lattice_point(ineqs: &[(Vec<f64>, i8)], margin: f64) -> Result<Vec<i64>, LyapunovError> {
    let k = ineqs.first().map_or(0, |i| i.0.len());
    if k == 0 {
        return Err(LyapunovError::EmptyCone);
    }
    let (x, depth) = cone_depth(ineqs, k).ok_or(LyapunovError::EmptyCone)?;
    if depth <= 1e-12 {
        return Err(LyapunovError::EmptyCone);
    }
    let small = if k <= 3 { 4 } else { 2 };
    if let Some(m) = box_search(ineqs, k, small, margin) {
        return Ok(m);
    }
    let xmax = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut lambda = 1.0;
    while lambda < 1e9 {
        let m: Vec<i64> = x.iter().map(|v| (v / xmax * lambda).round() as i64).collect();
        if satisfies(ineqs, &m, margin) {
            return Ok(m);
        }
        lambda *= if lambda < 64.0 { 1.0 + 1.0 / lambda } else { 2.0 };
    }
    let big = if k <= 2 { 200 } else { 12 };
    box_search(ineqs, k, big, margin).ok_or(LyapunovError::NoLatticePoint { margin })
}

fn sign_vectors(n: usize) -> Vec<Vec<i8>> {
    (0..1u64 << n).map(|b| (0..n).map(|i| if b >> i & 1 == 1 { -1 } else { 1 }).collect()).collect()
}

fn class_inequalities(cs: &CoarseSplitting, signs: &[i8]) -> Vec<(Vec<f64>, i8)> {
    (0..cs.len()).map(|c| (cs.representative(c).values.clone(), signs[c])).collect()
}

/// Connected components of `ℝᵏ \ ∪ ker χ`, one per feasible sign vector.
pub fn weyl_chambers(cs: &CoarseSplitting, margin: f64) -> Result<Vec<WeylChamber>, LyapunovError> {
    let k = cs.k();
    if k > 4 {
        return Err(LyapunovError::TooManyGenerators(k));
    }
    let feasible: Vec<Vec<i8>> = sign_vectors(cs.len())
        .into_par_iter()
        .filter(|s| cone_depth(&class_inequalities(cs, s), k).is_some_and(|(_, t)| t > 1e-9))
        .collect();
    feasible
        .par_iter()
        .map(|s| {
            let representative = find_lattice_point(&class_inequalities(cs, s), margin)?;
            // chambers differing in one sign share a facet on that kernel
            let walls = (0..cs.len())
                .filter(|&c| {
                    let mut t = s.clone();
                    t[c] = -t[c];
                    feasible.contains(&t)
                })
                .flat_map(|c| cs.groups[c].clone())
                .collect();
            Ok(WeylChamber { signs: s.clone(), representative, walls, margin })
        })
        .collect()
}

/// Coarse class indices negative (stable) and positive (unstable) on the chamber.
pub fn stable_unstable(c: &WeylChamber) -> (Vec<usize>, Vec<usize>) {
    let stable = (0..c.signs.len()).filter(|&i| c.signs[i] < 0).collect();
    let unstable = (0..c.signs.len()).filter(|&i| c.signs[i] > 0).collect();
    (stable, unstable)
}

/// `Σ dim(Eᵢ) χᵢ` at working precision; vanishes since the generators
/// have determinant ±1.
pub fn zero_sum_defect(fs: &[LyapunovFunctional]) -> Vec<Real> {
    let k = fs.first().map_or(0, |f| f.values.len());
    let p = fs.first().map_or(64, |f| f.precision_bits);
    (0..k)
        .map(|j| {
            fs.iter()
                .fold(Real::zero(p), |acc, f| acc + &f.values_mp[j] * Real::from_i64(f.dim() as i64, p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centralizer::{find_units, UnitSearchConfig};
    use crate::exact::{IntMatrix, IntPolynomial, ToralMatrix};
    use proptest::prelude::*;

    fn cat_gs() -> GeneratorSet {
        GeneratorSet::new(vec![ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap()], "cat").unwrap()
    }

    fn cartan() -> GeneratorSet {
        let a = ToralMatrix::new(IntMatrix::companion(&IntPolynomial::from_i64(&[-1, -3, 0, 1])).unwrap()).unwrap();
        find_units(&a, &UnitSearchConfig { coefficient_bound: 3, ..Default::default() }).unwrap()
    }

    #[test]
    fn cat_functionals() {
        let fs = exponent_functionals(&cat_gs(), 128).unwrap();
        let g = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert_eq!(fs.len(), 2);
        assert!((fs[0].values[0] + g).abs() < 1e-15 && (fs[1].values[0] - g).abs() < 1e-15);
        let cs = coarse_spaces(&fs, default_tolerance(128)).unwrap();
        assert_eq!(cs.len(), 2);
        let ch = weyl_chambers(&cs, DEFAULT_MARGIN).unwrap();
        assert_eq!(ch.len(), 2);
        for c in &ch {
            let (s, u) = stable_unstable(c);
            assert_eq!((s.len(), u.len()), (1, 1));
            assert_eq!(c.representative.len(), 1);
            assert_eq!(c.representative[0].abs(), 1);
        }
    }

    #[test]
    fn cartan_geometry() {
        let gs = cartan();
        let fs = exponent_functionals(&gs, 128).unwrap();
        assert_eq!(fs.len(), 3);
        assert!(fs.iter().all(|f| f.eigen_type == EigenType::Real && f.values.len() == 2));
        for d in zero_sum_defect(&fs) {
            assert!(d.abs().to_f64() < 1e-30);
        }
        let cs = coarse_spaces(&fs, default_tolerance(128)).unwrap();
        assert_eq!(cs.len(), 3);
        let ch = weyl_chambers(&cs, DEFAULT_MARGIN).unwrap();
        assert_eq!(ch.len(), 6);
        for c in &ch {
            let neg: Vec<i8> = c.signs.iter().map(|s| -s).collect();
            assert_eq!(ch.iter().filter(|d| d.signs == neg).count(), 1);
            for (i, s) in c.signs.iter().enumerate() {
                let v = cs.representative(i).eval(&c.representative);
                assert!(*s as f64 * v >= DEFAULT_MARGIN);
            }
            // each sector in the plane has exactly two bounding lines
            assert_eq!(c.walls.len(), 2);
            let (st, un) = stable_unstable(c);
            let ds: usize = st.iter().map(|&i| cs.class_dim(i)).sum();
            let du: usize = un.iter().map(|&i| cs.class_dim(i)).sum();
            assert_eq!(ds + du, 3);
            // exact matrix has du eigenvalues outside the unit circle
            let m = gs.power(&c.representative).unwrap();
            let ev = m.to_nalgebra().complex_eigenvalues();
            assert_eq!(ev.iter().filter(|z| z.norm() > 1.0).count(), du);
        }
    }

    #[test]
    fn proportional_functionals_merge() {
        let f1 = LyapunovFunctional::from_values(&[1.0, 0.5], EigenType::Real, 64);
        let f2 = LyapunovFunctional::from_values(&[2.0, 1.0], EigenType::Real, 64);
        let f3 = LyapunovFunctional::from_values(&[-1.0, -0.5], EigenType::Real, 64);
        let cs = coarse_spaces(&[f1, f2, f3], 1e-12).unwrap();
        assert_eq!(cs.groups, vec![vec![0, 1], vec![2]]);
        assert!((cs.scales[0][1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nearly_proportional_is_ambiguous() {
        let f1 = LyapunovFunctional::from_values(&[1.0, 0.5], EigenType::Real, 128);
        let f2 = LyapunovFunctional::from_values(&[1.0, 0.5 + 1e-9], EigenType::Real, 128);
        assert!(matches!(coarse_spaces(&[f1, f2], 1e-12), Err(LyapunovError::DegenerateSpectrum(_))));
    }

    #[test]
    fn lattice_points() {
        assert_eq!(find_lattice_point(&[(vec![1.0, 0.0], -1)], 1e-3).unwrap(), vec![-1, 0]);
        assert_eq!(find_lattice_point(&[(vec![0.9624], -1)], 1e-3).unwrap(), vec![-1]);
        let empty = [(vec![1.0, 0.0], 1), (vec![1.0, 0.0], -1)];
        assert_eq!(find_lattice_point(&empty, 1e-3), Err(LyapunovError::EmptyCone));
        // thin cone forces the LP route
        let thin = [(vec![1.0, -1000.0], 1), (vec![-1.0, 1001.0], 1)];
        let m = find_lattice_point(&thin, 1e-3).unwrap();
        assert!(satisfies(&thin, &m, 1e-3), "{m:?}");
    }

    #[test]
    fn one_dimensional_chambers() {
        let f = LyapunovFunctional::from_values(&[0.7], EigenType::Real, 64);
        let g = LyapunovFunctional::from_values(&[-0.7], EigenType::Real, 64);
        let cs = coarse_spaces(&[f, g], 1e-12).unwrap();
        assert_eq!(weyl_chambers(&cs, DEFAULT_MARGIN).unwrap().len(), 2);
    }

    fn arrangement() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 2), 2..5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn chambers_cover_and_are_symmetric(vals in arrangement()) {
            // keep well-separated lines so the covering check is meaningful
            for v in &vals {
                prop_assume!(v[0].hypot(v[1]) > 0.3);
            }
            let fs: Vec<_> = vals.iter().map(|v| LyapunovFunctional::from_values(v, EigenType::Real, 64)).collect();
            let cs = match coarse_spaces(&fs, 1e-9) {
                Ok(cs) => cs,
                Err(_) => return Ok(()),
            };
            for i in 0..cs.len() {
                for j in 0..i {
                    let (a, b) = (&cs.representative(i).values, &cs.representative(j).values);
                    let sin = (a[0] * b[1] - a[1] * b[0]) / (a[0].hypot(a[1]) * b[0].hypot(b[1]));
                    prop_assume!(sin.abs() > 0.05);
                }
            }
            let ch = weyl_chambers(&cs, DEFAULT_MARGIN).unwrap();
            for c in &ch {
                let neg: Vec<i8> = c.signs.iter().map(|s| -s).collect();
                prop_assert_eq!(ch.iter().filter(|d| d.signs == neg).count(), 1);
            }
            for m0 in -6i64..=6 {
                for m1 in -6i64..=6 {
                    let m = [m0, m1];
                    let vals: Vec<f64> = (0..cs.len()).map(|c| cs.representative(c).eval(&m)).collect();
                    if vals.iter().any(|v| v.abs() <= DEFAULT_MARGIN) {
                        continue;
                    }
                    let hits = ch.iter().filter(|c| c.signs.iter().zip(&vals).all(|(s, v)| *s as f64 * v > 0.0)).count();
                    prop_assert_eq!(hits, 1);
                }
            }
        }
    }
}
