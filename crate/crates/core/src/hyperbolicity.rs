//! Hyperbolicity certificates from subadditive sequences, and Lyapunov
//! exponents at periodic orbits.
//!
//! A certificate is a time `N` with `a_N(x) < 0` at every point of a grid,
//! checked directly. The search for `N` follows the Birkhoff-average route:
//! find a block length `m` whose averages stay below some `c < 0`, then
//! take `N = l·m` large enough to absorb the boundary terms.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conjugacy::{torus_dist, DiffMap, GridDisplacement};
use crate::exact::{PeriodicOrbit, ToralMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperbolicityError {
    #[error("no certificate within horizon {horizon}; worst grid values {worst:?}")]
    HorizonExceeded { horizon: usize, worst: Vec<f64> },
    #[error("subadditivity fails at {x:?} for n = {n}, k = {k} (excess {excess:e})")]
    NotSubadditive { x: Vec<f64>, n: usize, k: usize, excess: f64 },
    #[error("bundle is not invariant (defect {0:e})")]
    NotInvariant(f64),
    #[error("Newton refinement diverged (residual {0:e})")]
    NewtonDiverged(f64),
    #[error("point is not periodic (residual {0:e})")]
    NonPeriodic(f64),
    #[error("conjugacy does not map orbit {orbit} to a periodic orbit (defect {defect:e})")]
    OrbitMismatch { orbit: usize, defect: f64 },
}

/// `a_n(x)` over a map, with the companion `b_n` of the second inequality.
pub trait SubadditiveSequence: Sync {
    fn dim(&self) -> usize;
    fn step(&self, x: &[f64]) -> Vec<f64>;
    fn a(&self, n: usize, x: &[f64]) -> f64;
    fn b(&self, _n: usize, _x: &[f64]) -> f64 {
        0.0
    }
}

/// `x ↦ d·x + Σ cⱼ sin(2π kⱼ x)` on the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleMap {
    pub degree: i64,
    /// `(coefficient, frequency)` pairs.
    pub terms: Vec<(f64, i64)>,
}

impl DiffMap for CircleMap {
    fn dim(&self) -> usize {
        1
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        vec![self.degree as f64 * x[0] + self.terms.iter().map(|(c, k)| c * (TAU * *k as f64 * x[0]).sin()).sum::<f64>()]
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.degree as f64
            + self.terms.iter().map(|(c, k)| c * TAU * *k as f64 * (TAU * *k as f64 * x[0]).cos()).sum::<f64>();
        DMatrix::from_element(1, 1, d)
    }
}

/// Which norm of the restricted derivative cocycle is tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CocycleMode {
    /// `a_n = log‖Dfⁿ|E‖`, `b_n = −log m(Dfⁿ|E)`.
    Contraction,
    /// `a_n = −log m(Dfⁿ|E)`, `b_n = log‖Dfⁿ|E‖`.
    Expansion,
}

/// Derivative cocycle of `map` restricted to a bundle given by an
/// orthonormal basis field.
pub struct CocycleSpec<'a> {
    pub map: &'a dyn DiffMap,
    pub bundle: &'a (dyn Fn(&[f64]) -> DMatrix<f64> + Sync),
    pub mode: CocycleMode,
}

impl CocycleSpec<'_> {
    /// Extreme singular values of `Dfⁿ(x)` on `E(x)`.
    pub fn extremes(&self, n: usize, x: &[f64]) -> (f64, f64) {
        let mut v = (self.bundle)(x);
        let mut y = x.to_vec();
        let mut log_scale = 0.0;
        for _ in 0..n {
            v = self.map.jacobian(&y) * v;
            y = self.map.apply(&y).iter().map(|c| c.rem_euclid(1.0)).collect();
            let s = v.norm();
            v /= s;
            log_scale += s.ln();
        }
        let sv = v.singular_values();
        (sv.max().ln() + log_scale, sv.min().ln() + log_scale)
    }

    /// Sup over grid points of the angle defect `|(I − P_{E(fx)}) Df E(x)|`.
    pub fn invariance_defect(&self, resolution: usize) -> f64 {
        let grid = GridDisplacement::zeros(self.map.dim(), resolution);
        (0..grid.len())
            .into_par_iter()
            .map(|p| {
                let x = grid.point(p);
                let img = self.map.jacobian(&x) * (self.bundle)(&x);
                let target = (self.bundle)(&self.map.apply(&x));
                let proj = &target * (target.transpose() * &img);
                (&img - proj).norm() / img.norm()
            })
            .reduce(|| 0.0, f64::max)
    }
}

impl SubadditiveSequence for CocycleSpec<'_> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn step(&self, x: &[f64]) -> Vec<f64> {
        self.map.apply(x).iter().map(|c| c.rem_euclid(1.0)).collect()
    }

    fn a(&self, n: usize, x: &[f64]) -> f64 {
        let (hi, lo) = self.extremes(n, x);
        match self.mode {
            CocycleMode::Contraction => hi,
            CocycleMode::Expansion => -lo,
        }
    }

    fn b(&self, n: usize, x: &[f64]) -> f64 {
        let (hi, lo) = self.extremes(n, x);
        match self.mode {
            CocycleMode::Contraction => -lo,
            CocycleMode::Expansion => hi,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NegativityConfig {
    /// Grid points per axis.
    pub resolution: usize,
    /// Largest block length `m` tried.
    pub horizon: usize,
    /// Length of the Birkhoff averages.
    pub birkhoff_len: usize,
    /// Largest `N` evaluated directly.
    pub max_n: usize,
    /// Random triples for the subadditivity spot check.
    pub spot_checks: usize,
}

impl Default for NegativityConfig {
    fn default() -> Self {
        NegativityConfig { resolution: 64, horizon: 8, birkhoff_len: 16, max_n: 64, spot_checks: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Time with `a_N < 0` on the whole grid.
    pub n: usize,
    /// `max_x a_N(x)`, strictly negative.
    pub max_a_n: f64,
    /// `max_x a_N(x) / N`.
    pub rate: f64,
    /// Block length and Birkhoff bound used, when the direct check at
    /// `N = 1` did not already succeed.
    pub block: Option<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleProfile {
    /// Grid points where `a_n ≥ 0` for every `n` up to the horizon.
    pub points: Vec<Vec<f64>>,
    /// `a_n(x)` for `n = 1..=horizon` at the worst of these points.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Negativity {
    Certified(Certificate),
    Counterexample(CounterexampleProfile),
}

impl Negativity {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Negativity::Certified(c) => Some(c),
            Negativity::Counterexample(_) => None,
        }
    }
}

fn grid_points(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let g = GridDisplacement::zeros(dim, resolution);
    (0..g.len()).map(|p| g.point(p)).collect()
}

fn grid_max(s: &dyn SubadditiveSequence, pts: &[Vec<f64>], n: usize) -> f64 {
    pts.par_iter().map(|x| s.a(n, x)).reduce(|| f64::NEG_INFINITY, f64::max)
}

/// Check `a_{n+k}(x) ≤ a_n(f^k x) + a_k(x)` on seeded random triples.
pub fn check_subadditivity(s: &dyn SubadditiveSequence, samples: usize, tol: f64) -> Result<(), HyperbolicityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5ab);
    let triples: Vec<(Vec<f64>, usize, usize)> = (0..samples)
        .map(|_| ((0..s.dim()).map(|_| rng.gen::<f64>()).collect(), rng.gen_range(1..=6), rng.gen_range(1..=6)))
        .collect();
    for (x, n, k) in triples {
        let mut fk = x.clone();
        for _ in 0..k {
            fk = s.step(&fk);
        }
        let excess = s.a(n + k, &x) - s.a(n, &fk) - s.a(k, &x);
        if excess > tol {
            return Err(HyperbolicityError::NotSubadditive { x, n, k, excess });
        }
    }
    Ok(())
}

/// Find `N` with `a_N < 0` on the grid, or the points where `a_n` never
/// becomes negative.
pub fn uniform_negativity(s: &dyn SubadditiveSequence, cfg: &NegativityConfig) -> Result<Negativity, HyperbolicityError> {
    let pts = grid_points(s.dim(), cfg.resolution);
    let direct = grid_max(s, &pts, 1);
    if direct < 0.0 {
        return Ok(Negativity::Certified(Certificate { n: 1, max_a_n: direct, rate: direct, block: None }));
    }
    for m in 1..=cfg.horizon {
        // c = worst Birkhoff average of a_m over the second half of the window
        let n0 = (cfg.birkhoff_len / 2).max(1);
        let c = pts
            .par_iter()
            .map(|x| {
                let mut y = x.clone();
                let mut sum = 0.0;
                let mut worst = f64::NEG_INFINITY;
                for j in 1..=cfg.birkhoff_len {
                    sum += s.a(m, &y);
                    y = s.step(&y);
                    if j >= n0 {
                        worst = worst.max(sum / j as f64);
                    }
                }
                worst
            })
            .reduce(|| f64::NEG_INFINITY, f64::max);
        if c >= 0.0 {
            continue;
        }
        let boundary: f64 = (1..=m)
            .map(|h| {
                pts.par_iter().map(|x| s.a(h, x).max(0.0) + s.b(h, x).max(0.0)).reduce(|| 0.0, f64::max)
            })
            .fold(0.0, f64::max);
        // c·N + m·(sup a_h + sup b_h) < 0 with N = l·m
        let mut l = (boundary / -c).floor() as usize + 1;
        while l * m <= cfg.max_n {
            let n = l * m;
            let v = grid_max(s, &pts, n);
            if v < 0.0 {
                return Ok(Negativity::Certified(Certificate {
                    n,
                    max_a_n: v,
                    rate: v / n as f64,
                    block: Some((m, c)),
                }));
            }
            l *= 2;
        }
    }
    // points that never go negative
    let horizon = cfg.horizon.max(1);
    let profiles: Vec<(Vec<f64>, Vec<f64>)> = pts
        .par_iter()
        .filter_map(|x| {
            let vals: Vec<f64> = (1..=horizon).map(|n| s.a(n, x)).collect();
            vals.iter().all(|v| *v >= -1e-12).then(|| (x.clone(), vals))
        })
        .collect();
    if !profiles.is_empty() {
        let values = profiles
            .iter()
            .max_by(|a, b| a.1.iter().sum::<f64>().total_cmp(&b.1.iter().sum::<f64>()))
            .map(|p| p.1.clone())
            .unwrap_or_default();
        return Ok(Negativity::Counterexample(CounterexampleProfile {
            points: profiles.into_iter().map(|p| p.0).collect(),
            values,
        }));
    }
    let worst = (1..=horizon).map(|n| grid_max(s, &pts, n)).collect();
    Err(HyperbolicityError::HorizonExceeded { horizon, worst })
}

/// Slack for the spot check: round-off in a numerical stable bundle grows
/// by the expansion ratio under forward iteration.
const SPOT_TOL: f64 = 1e-6;

/// Bundle invariance, the subadditivity spot check, then
/// [`uniform_negativity`] on `log‖Dfⁿ|E‖`.
pub fn certify_uniform_contraction(c: &CocycleSpec, cfg: &NegativityConfig, tol: f64) -> Result<Negativity, HyperbolicityError> {
    let defect = c.invariance_defect(cfg.resolution.min(64));
    if defect > tol {
        return Err(HyperbolicityError::NotInvariant(defect));
    }
    check_subadditivity(c, cfg.spot_checks, SPOT_TOL)?;
    uniform_negativity(c, cfg)
}

/// Uniform expansion of the full derivative, `a_n = −log m(Dfⁿ)`.
pub fn certify_expanding(f: &dyn DiffMap, cfg: &NegativityConfig) -> Result<Negativity, HyperbolicityError> {
    let d = f.dim();
    let id = move |_: &[f64]| DMatrix::identity(d, d);
    let spec = CocycleSpec { map: f, bundle: &id, mode: CocycleMode::Expansion };
    check_subadditivity(&spec, cfg.spot_checks, SPOT_TOL)?;
    uniform_negativity(&spec, cfg)
}

fn orthonormalize(v: DMatrix<f64>) -> DMatrix<f64> {
    v.qr().q()
}

/// Stable bundle at `x` by pulling back `seed` along `depth` forward iterates.
pub fn stable_bundle(f: &dyn DiffMap, x: &[f64], seed: &DMatrix<f64>, depth: usize) -> DMatrix<f64> {
    let mut orbit = vec![x.to_vec()];
    for _ in 0..depth {
        let next = f.apply(orbit.last().expect("nonempty"));
        orbit.push(next.iter().map(|v| v.rem_euclid(1.0)).collect());
    }
    let mut v = orthonormalize(seed.clone());
    for y in orbit[..depth].iter().rev() {
        let j = f.jacobian(y);
        v = orthonormalize(j.lu().solve(&v).expect("diffeomorphism"));
    }
    v
}

/// Lyapunov exponents at a periodic orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentReport {
    pub period: usize,
    pub points: Vec<Vec<f64>>,
    /// Sorted increasingly.
    pub exponents: Vec<f64>,
    /// `|f^period(x) − x|` in the torus metric after refinement.
    pub residual: f64,
    /// `exponents − reference` when a linear reference was supplied.
    pub comparison: Option<Vec<f64>>,
    /// `(1/period) Σ log|det Df|` along the orbit.
    pub mean_log_jacobian: f64,
}

const NEWTON_TARGET: f64 = 1e-12;

fn iterate(f: &dyn DiffMap, x: &[f64], p: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = f.dim();
    let mut y = x.to_vec();
    let mut j = DMatrix::identity(n, n);
    for _ in 0..p {
        j = f.jacobian(&y) * j;
        y = f.apply(&y);
    }
    (y, j)
}

/// Newton on `f^p(x) − x − k = 0` with the integer lift `k` fixed at the seed.
pub fn refine_periodic(f: &dyn DiffMap, seed: &[f64], period: usize) -> Result<Vec<f64>, HyperbolicityError> {
    let n = f.dim();
    let mut x = seed.to_vec();
    let (y0, _) = iterate(f, &x, period);
    let k: Vec<f64> = y0.iter().zip(&x).map(|(a, b)| (a - b).round()).collect();
    let mut res = f64::INFINITY;
    for _ in 0..60 {
        let (y, j) = iterate(f, &x, period);
        let r: Vec<f64> = (0..n).map(|i| y[i] - x[i] - k[i]).collect();
        res = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if res < 1e-14 {
            break;
        }
        let m = j - DMatrix::identity(n, n);
        let dx = m.lu().solve(&DVector::from_vec(r)).ok_or(HyperbolicityError::NewtonDiverged(res))?;
        for (xi, d) in x.iter_mut().zip(dx.iter()) {
            *xi -= d;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(HyperbolicityError::NewtonDiverged(f64::INFINITY));
        }
    }
    let (y, _) = iterate(f, &x, period);
    let res_t = torus_dist(&y, &x);
    if res_t >= NEWTON_TARGET {
        return Err(HyperbolicityError::NewtonDiverged(res.min(res_t)));
    }
    Ok(x.iter().map(|v| v.rem_euclid(1.0)).collect())
}

/// Exponents at the orbit through `x`: log-moduli of the eigenvalues of the
/// period-long derivative product, divided by the period.
pub fn periodic_exponents_at(
    f: &dyn DiffMap,
    x: &[f64],
    period: usize,
    refine: bool,
) -> Result<ExponentReport, HyperbolicityError> {
    let x = if refine {
        refine_periodic(f, x, period)?
    } else {
        let (y, _) = iterate(f, x, period);
        let r = torus_dist(&y, x);
        if r > 1e-8 {
            return Err(HyperbolicityError::NonPeriodic(r));
        }
        x.to_vec()
    };
    let n = f.dim();
    let mut pts = vec![x.clone()];
    let mut prod = DMatrix::identity(n, n);
    let mut log_scale = 0.0;
    let mut log_det = 0.0;
    let mut y = x.clone();
    for j in 0..period {
        let jac = f.jacobian(&y);
        log_det += jac.determinant().abs().ln();
        prod = jac * prod;
        let s = prod.norm();
        prod /= s;
        log_scale += s.ln();
        y = f.apply(&y);
        if j + 1 < period {
            pts.push(y.iter().map(|v| v.rem_euclid(1.0)).collect());
        }
    }
    let residual = torus_dist(&y, &x);
    let mut exponents: Vec<f64> =
        prod.complex_eigenvalues().iter().map(|z| (z.norm().ln() + log_scale) / period as f64).collect();
    exponents.sort_by(f64::total_cmp);
    Ok(ExponentReport {
        period,
        points: pts,
        exponents,
        residual,
        comparison: None,
        mean_log_jacobian: log_det / period as f64,
    })
}

/// [`periodic_exponents_at`] seeded at the first point of an exact orbit.
pub fn periodic_exponents(f: &dyn DiffMap, orbit: &PeriodicOrbit, refine: bool) -> Result<ExponentReport, HyperbolicityError> {
    periodic_exponents_at(f, &orbit.points_f64()[0], orbit.period, refine)
}

/// Sorted `log|λ|` of a toral matrix.
pub fn linear_exponents(a: &ToralMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = a.to_nalgebra().complex_eigenvalues().iter().map(|z| z.norm().ln()).collect();
    e.sort_by(f64::total_cmp);
    e
}

impl ExponentReport {
    pub fn compare_with(mut self, reference: &[f64]) -> Self {
        self.comparison = Some(self.exponents.iter().zip(reference).map(|(a, b)| a - b).collect());
        self
    }

    pub fn max_gap(&self) -> Option<f64> {
        self.comparison.as_ref().map(|c| c.iter().map(|v| v.abs()).fold(0.0, f64::max))
    }

    pub fn stable_dimension(&self) -> usize {
        self.exponents.iter().filter(|e| **e < 0.0).count()
    }
}

/// Seed for an `f`-periodic point from a linear one: `h⁻¹(p)` for
/// `h = id + w`, by the fixed-point iteration `q ← p − w(q)`.
pub fn transport_seed(w: &GridDisplacement, p: &[f64]) -> Vec<f64> {
    let mut q = p.to_vec();
    for _ in 0..30 {
        q = p.iter().zip(w.eval(&q)).map(|(a, b)| a - b).collect();
    }
    q
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BunchingVerdict {
    pub pass: bool,
    /// `max_p (χ₁⁺ − χ₂⁻)`.
    pub margin_first: f64,
    /// `max_p (χ₁⁺ + r χ₂⁺ − χ₂⁻)`.
    pub margin_second: f64,
    /// Smallest `r` at which the second inequality fails, if any orbit
    /// has `χ₂⁺ > 0`.
    pub threshold: Option<f64>,
    /// `min(k − 1, r)` for a `C^k` map.
    pub smoothness: f64,
}

/// Both bunching inequalities at every orbit. `in_first[i]` assigns the
/// `i`-th sorted exponent to `E₁`, otherwise to `E₂`.
pub fn bunching_at_periodic(reports: &[ExponentReport], in_first: &[bool], r: f64, k: f64) -> BunchingVerdict {
    let mut m1 = f64::NEG_INFINITY;
    let mut m2 = f64::NEG_INFINITY;
    let mut threshold: Option<f64> = None;
    for rep in reports {
        let e1 = rep.exponents.iter().zip(in_first).filter(|(_, f)| **f).map(|(e, _)| *e);
        let e2: Vec<f64> = rep.exponents.iter().zip(in_first).filter(|(_, f)| !**f).map(|(e, _)| *e).collect();
        let chi1_plus = e1.fold(f64::NEG_INFINITY, f64::max);
        let chi2_plus = e2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let chi2_minus = e2.iter().copied().fold(f64::INFINITY, f64::min);
        m1 = m1.max(chi1_plus - chi2_minus);
        m2 = m2.max(chi1_plus + r * chi2_plus - chi2_minus);
        if chi2_plus > 0.0 {
            let t = (chi2_minus - chi1_plus) / chi2_plus;
            threshold = Some(threshold.map_or(t, |u: f64| u.min(t)));
        }
    }
    BunchingVerdict { pass: m1 < 0.0 && m2 < 0.0, margin_first: m1, margin_second: m2, threshold, smoothness: (k - 1.0).min(r) }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StableDimensions {
    /// `(dim Eˢ_f, dim Eˢ_g)` per orbit.
    pub pairs: Vec<(usize, usize)>,
    pub mismatch: bool,
}

/// Count negative exponents at each `f`-orbit and at its `h`-image under `g`.
pub fn compare_stable_dimensions(
    f: &dyn DiffMap,
    g: &dyn DiffMap,
    h: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    orbits: &[(Vec<f64>, usize)],
    tol: f64,
) -> Result<StableDimensions, HyperbolicityError> {
    let mut pairs = Vec::new();
    for (i, (seed, period)) in orbits.iter().enumerate() {
        let rf = periodic_exponents_at(f, seed, *period, true)?;
        let y = h(&rf.points[0]);
        let (gy, _) = iterate(g, &y, *period);
        let defect = torus_dist(&gy, &y);
        if defect > tol {
            return Err(HyperbolicityError::OrbitMismatch { orbit: i, defect });
        }
        let rg = periodic_exponents_at(g, &y, *period, true)?;
        pairs.push((rf.stable_dimension(), rg.stable_dimension()));
    }
    let mismatch = pairs.iter().any(|(a, b)| a != b);
    Ok(StableDimensions { pairs, mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conjugacy::{PerturbedMap, TrigTerm};
    use crate::exact::periodic_points;
    use proptest::prelude::*;

    fn cat() -> ToralMatrix {
        ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap()
    }

    fn golden() -> f64 {
        ((3.0 + 5f64.sqrt()) / 2.0).ln()
    }

    struct Linear(f64);
    impl SubadditiveSequence for Linear {
        fn dim(&self) -> usize {
            1
        }
        fn step(&self, x: &[f64]) -> Vec<f64> {
            x.to_vec()
        }
        fn a(&self, n: usize, _: &[f64]) -> f64 {
            self.0 * n as f64
        }
    }

    /// Additive cocycle over the doubling map, vanishing at the fixed point 0.
    struct Indifferent;
    impl SubadditiveSequence for Indifferent {
        fn dim(&self) -> usize {
            1
        }
        fn step(&self, x: &[f64]) -> Vec<f64> {
            vec![(2.0 * x[0]).rem_euclid(1.0)]
        }
        fn a(&self, n: usize, x: &[f64]) -> f64 {
            let mut y = x[0];
            let mut s = 0.0;
            for _ in 0..n {
                s -= (std::f64::consts::PI * y).sin().powi(2);
                y = (2.0 * y).rem_euclid(1.0);
            }
            s
        }
    }

    #[test]
    fn constant_negative_sequence() {
        let c = uniform_negativity(&Linear(-1.0), &NegativityConfig { resolution: 8, ..Default::default() }).unwrap();
        assert_eq!(c.certificate().unwrap().n, 1);
    }

    #[test]
    fn indifferent_point_gives_counterexample() {
        let cfg = NegativityConfig { resolution: 64, ..Default::default() };
        match uniform_negativity(&Indifferent, &cfg).unwrap() {
            Negativity::Counterexample(p) => {
                assert!(p.points.iter().any(|x| x[0] == 0.0));
                assert!(p.values.iter().all(|v| *v == 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cat_stable_bundle() {
        let f = PerturbedMap::linear_only(cat());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let v = DVector::from_vec(vec![1.0, -phi]).normalize();
        let e = move |_: &[f64]| DMatrix::from_column_slice(2, 1, v.as_slice());
        let spec = CocycleSpec { map: &f, bundle: &e, mode: CocycleMode::Contraction };
        let cfg = NegativityConfig { resolution: 16, ..Default::default() };
        let c = certify_uniform_contraction(&spec, &cfg, 1e-9).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!(c.n, 1);
        assert!((c.rate + golden()).abs() < 1e-12);
    }

    #[test]
    fn perturbed_cat_stable_bundle() {
        let f = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let seed = DMatrix::from_column_slice(2, 1, &[1.0, -phi]);
        let e = |x: &[f64]| stable_bundle(&f, x, &seed, 30);
        let spec = CocycleSpec { map: &f, bundle: &e, mode: CocycleMode::Contraction };
        let cfg = NegativityConfig { resolution: 16, spot_checks: 200, ..Default::default() };
        let c = certify_uniform_contraction(&spec, &cfg, 1e-8).unwrap();
        let c = c.certificate().unwrap();
        assert!(c.n <= 2 && c.max_a_n < 0.0);
    }

    #[test]
    fn neutral_bundle_fails() {
        let f = PerturbedMap::linear_only(ToralMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap());
        let e = |_: &[f64]| DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
        let spec = CocycleSpec { map: &f, bundle: &e, mode: CocycleMode::Contraction };
        let r = certify_uniform_contraction(&spec, &NegativityConfig { resolution: 8, ..Default::default() }, 1e-9);
        assert!(matches!(r, Ok(Negativity::Counterexample(_))));
    }

    #[test]
    fn expanding_circle_maps() {
        let cfg = NegativityConfig { resolution: 256, ..Default::default() };
        let d = CircleMap { degree: 2, terms: vec![] };
        assert_eq!(certify_expanding(&d, &cfg).unwrap().certificate().unwrap().n, 1);
        let p = CircleMap { degree: 2, terms: vec![(0.1, 1)] };
        let c = certify_expanding(&p, &cfg).unwrap();
        // min f′ = 2 − 0.2π attained at x = ½
        assert!((c.certificate().unwrap().max_a_n + (2.0 - 0.2 * std::f64::consts::PI).ln()).abs() < 1e-12);
        let iso = CircleMap { degree: 1, terms: vec![] };
        assert!(matches!(certify_expanding(&iso, &cfg).unwrap(), Negativity::Counterexample(_)));
    }

    #[test]
    fn linear_exponents_at_periodic_points() {
        let f = PerturbedMap::linear_only(cat());
        for orbit in periodic_points(&cat(), 3).unwrap() {
            let r = periodic_exponents(&f, &orbit, false).unwrap();
            assert!((r.exponents[0] + golden()).abs() < 1e-12 && (r.exponents[1] - golden()).abs() < 1e-12);
        }
    }

    #[test]
    fn conjugated_map_has_linear_exponents() {
        let psi = vec![TrigTerm::sin(&[1, 1], &[0.03, -0.02])];
        let f = PerturbedMap::conjugated(cat(), psi.clone());
        let fixed = PerturbedMap::phi(&psi, &[0.0, 0.0]);
        let r = periodic_exponents_at(&f, &fixed, 1, true).unwrap();
        assert!(r.residual < 1e-12);
        let r = r.compare_with(&linear_exponents(&cat()));
        assert!(r.max_gap().unwrap() < 1e-10);
    }

    #[test]
    fn generic_perturbation_shows_a_gap() {
        let f = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
        let gaps: Vec<f64> = periodic_points(&cat(), 2)
            .unwrap()
            .iter()
            .map(|o| periodic_exponents(&f, o, true).unwrap().compare_with(&linear_exponents(&cat())).max_gap().unwrap())
            .collect();
        assert!(gaps.iter().any(|g| *g > 1e-3), "{gaps:?}");
    }

    #[test]
    fn cat_bunching_threshold() {
        let f = PerturbedMap::linear_only(cat());
        let reports: Vec<ExponentReport> =
            periodic_points(&cat(), 2).unwrap().iter().map(|o| periodic_exponents(&f, o, false).unwrap()).collect();
        let v = bunching_at_periodic(&reports, &[true, false], 1.0, 3.0);
        assert!(v.pass);
        assert!((v.margin_second + golden()).abs() < 1e-12);
        let r_star = v.threshold.unwrap();
        assert!((r_star - 2.0).abs() < 1e-9);
        assert!(bunching_at_periodic(&reports, &[true, false], r_star - 1e-9, 3.0).pass);
        assert!(!bunching_at_periodic(&reports, &[true, false], r_star + 1e-9, 3.0).pass);
        // unstable direction mislabelled as the first bundle
        assert!(!bunching_at_periodic(&reports, &[false, true], 1.0, 3.0).pass);
    }

    #[test]
    fn stable_dimensions_across_conjugacy() {
        let psi = vec![TrigTerm::sin(&[1, 0], &[0.03, 0.0])];
        let f = PerturbedMap::conjugated(cat(), psi.clone());
        let g = PerturbedMap::linear_only(cat());
        let h = |x: &[f64]| PerturbedMap::phi_inverse(&psi, x).unwrap();
        let orbits: Vec<(Vec<f64>, usize)> = periodic_points(&cat(), 2)
            .unwrap()
            .iter()
            .map(|o| (PerturbedMap::phi(&psi, &o.points_f64()[0]), o.period))
            .collect();
        let d = compare_stable_dimensions(&f, &g, &h, &orbits, 1e-9).unwrap();
        assert!(!d.mismatch && d.pairs.iter().all(|p| *p == (1, 1)));
        let bad = |x: &[f64]| vec![x[0] + 0.1, x[1]];
        assert!(matches!(
            compare_stable_dimensions(&f, &g, &bad, &orbits, 1e-9),
            Err(HyperbolicityError::OrbitMismatch { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn exponent_sum_and_cyclic_invariance(eps in -0.06f64..0.06, shift in 0usize..4) {
            let f = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 1], &[eps, 0.5 * eps])]);
            let orbit = periodic_points(&cat(), 4).unwrap().into_iter().find(|o| o.period == 4).unwrap();
            let r = periodic_exponents(&f, &orbit, true).unwrap();
            prop_assert!(r.residual < 1e-12);
            prop_assert!((r.exponents.iter().sum::<f64>() - r.mean_log_jacobian).abs() < 1e-10);
            let start = r.points[shift % r.period].clone();
            let r2 = periodic_exponents_at(&f, &start, r.period, false).unwrap();
            for (a, b) in r.exponents.iter().zip(&r2.exponents) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }

        #[test]
        fn certificates_pass_direct_recheck(eps in 0.0f64..0.08) {
            let f = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[eps, 0.0])]);
            let phi = (1.0 + 5f64.sqrt()) / 2.0;
            let seed = DMatrix::from_column_slice(2, 1, &[1.0, -phi]);
            let e = |x: &[f64]| stable_bundle(&f, x, &seed, 30);
            let spec = CocycleSpec { map: &f, bundle: &e, mode: CocycleMode::Contraction };
            let cfg = NegativityConfig { resolution: 8, spot_checks: 50, ..Default::default() };
            if let Negativity::Certified(c) = uniform_negativity(&spec, &cfg).unwrap() {
                let pts = grid_points(2, 8);
                prop_assert!(pts.iter().all(|x| spec.a(c.n, x) < 0.0));
            }
        }
    }
}
