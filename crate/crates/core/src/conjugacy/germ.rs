//! Local linearization of commuting contracting germs at a fixed point.
//!
//! Phase 1 builds polynomial jets of the weak flag manifolds of the
//! contraction `T` and asks every other map to preserve them; a jet
//! equation without a common solution is an obstruction. Phase 2 runs the
//! limit `h_m = (D₀T)^{−m} ∘ T^m` and checks `h ∘ S ≈ D₀S ∘ h` for every
//! member `S`.

use std::collections::BTreeMap;

use nalgebra::{Complex as C64, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GermError {
    #[error("no member is a contraction at 0 (spectral radius {0})")]
    NotContracting(f64),
    #[error("flag manifold W^{flag} is not invariant under map {map}: degree-{degree} jet equations are inconsistent (residual {residual:e})")]
    Obstruction { flag: usize, map: usize, degree: usize, residual: f64 },
    #[error("limit scheme did not converge; Cauchy differences {profile:?}")]
    NoConvergence { profile: Vec<f64> },
    #[error("degenerate germ: {0}")]
    Degenerate(String),
}

/// Sparse real polynomial in `d` variables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(d: usize, c: f64) -> Self {
        Self::monomial(vec![0; d], c)
    }

    pub fn monomial(exp: Vec<u32>, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(exp, c);
        }
        Poly { terms }
    }

    pub fn var(d: usize, i: usize) -> Self {
        let mut e = vec![0; d];
        e[i] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(k, v)| v.powi(*k as i32)).product::<f64>())
            .sum()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += c;
        }
        out.terms.retain(|_, c| *c != 0.0);
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).filter(|(_, c)| *c != 0.0).collect() }
    }

    /// Product truncated above total degree `max_deg`.
    pub fn mul(&self, o: &Poly, max_deg: u32) -> Poly {
        let mut out = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if e.iter().sum::<u32>() <= max_deg {
                    *out.entry(e).or_insert(0.0) += c1 * c2;
                }
            }
        }
        out.retain(|_, c: &mut f64| *c != 0.0);
        Poly { terms: out }
    }

    /// Terms of total degree exactly `m`.
    pub fn homogeneous(&self, m: u32) -> Poly {
        Poly { terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == m).map(|(e, c)| (e.clone(), *c)).collect() }
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                *out.entry(f).or_insert(0.0) += c * e[i] as f64;
            }
        }
        Poly { terms: out }
    }

    /// `self(g₁, …, g_k)` for `gᵢ` in `dim` variables, truncated above `max_deg`.
    pub fn compose(&self, g: &[Poly], dim: usize, max_deg: u32) -> Poly {
        let mut out = Poly::zero();
        let mut powers: Vec<Vec<Poly>> = g.iter().map(|p| vec![Poly::constant(dim, 1.0), p.clone()]).collect();
        for (e, c) in &self.terms {
            let mut term = Poly::constant(dim, *c);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("nonempty").mul(&g[i], max_deg);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize], max_deg);
            }
            out = out.add(&term);
        }
        out
    }
}

/// Polynomial self-map of ℝᵈ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyMap {
    pub components: Vec<Poly>,
}

impl PolyMap {
    pub fn new(components: Vec<Poly>) -> Self {
        PolyMap { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn linear(m: &DMatrix<f64>) -> Self {
        let d = m.nrows();
        PolyMap::new(
            (0..d).map(|r| (0..d).fold(Poly::zero(), |acc, c| acc.add(&Poly::var(d, c).scale(m[(r, c)])))).collect(),
        )
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.components[r].derivative(c).eval(x))
    }

    pub fn linear_part(&self) -> DMatrix<f64> {
        self.jacobian(&vec![0.0; self.dim()])
    }

    /// `self ∘ inner`, truncated above `max_deg`.
    pub fn compose(&self, inner: &PolyMap, max_deg: u32) -> PolyMap {
        PolyMap::new(self.components.iter().map(|p| p.compose(&inner.components, inner.dim(), max_deg)).collect())
    }

    pub fn truncate(&self, max_deg: u32) -> PolyMap {
        PolyMap::new(
            self.components
                .iter()
                .map(|p| Poly { terms: p.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() <= max_deg).map(|(e, c)| (e.clone(), *c)).collect() })
                .collect(),
        )
    }

    pub fn fixes_origin(&self) -> bool {
        self.eval(&vec![0.0; self.dim()]).iter().all(|v| v.abs() < 1e-14)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GermConfig {
    /// Index of the contraction `T`; the first contracting member if unset.
    pub contraction: Option<usize>,
    pub jet_degree: u32,
    pub obstruction_tol: f64,
    pub radius: f64,
    pub samples: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for GermConfig {
    fn default() -> Self {
        GermConfig { contraction: None, jet_degree: 4, obstruction_tol: 1e-9, radius: 0.5, samples: 400, max_iter: 400, tol: 1e-14 }
    }
}

/// The limit chart `h = lim (D₀T)^{−m} ∘ T^m`, evaluated at `iterations`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GermChart {
    pub contraction: usize,
    pub t: PolyMap,
    #[serde(skip)]
    pub linear: DMatrix<f64>,
    pub iterations: usize,
    /// Sup over samples of `|h_{m+1} − h_m|` per step.
    pub cauchy: Vec<f64>,
    /// `sup |h ∘ S − D₀S ∘ h|` per member on the verification ball.
    pub residuals: Vec<f64>,
    pub radius: f64,
    /// Flags checked in phase 1, as tangent dimensions.
    pub flags_checked: Vec<usize>,
}

impl GermChart {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        limit_step(&self.t, &self.linear, x, self.iterations)
    }
}

fn limit_step(t: &PolyMap, l: &DMatrix<f64>, x: &[f64], m: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    for _ in 0..m {
        y = t.eval(&y);
    }
    let lu = l.clone().lu();
    let mut v = DVector::from_vec(y);
    for _ in 0..m {
        v = lu.solve(&v).expect("contraction has invertible derivative");
    }
    v.as_slice().to_vec()
}

fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real basis adapted to `L`, ordered by increasing eigenvalue modulus, and
/// the start index of each modulus level.
fn adapted_basis(l: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<usize>), GermError> {
    let d = l.nrows();
    let mut eig: Vec<C64<f64>> = l.complex_eigenvalues().iter().copied().filter(|z| z.im >= -1e-12).collect();
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.im.total_cmp(&b.im)));
    let scale = l.norm().max(1.0);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut levels = Vec::new();
    let mut last_mod = f64::NEG_INFINITY;
    let mut i = 0;
    while i < eig.len() {
        let z = eig[i];
        // group numerically equal eigenvalues
        let mut mult = 1;
        while i + mult < eig.len() && (eig[i + mult] - z).norm() < 1e-9 * scale {
            mult += 1;
        }
        if (z.norm() - last_mod).abs() > 1e-9 * scale {
            levels.push(cols.len());
            last_mod = z.norm();
        }
        let shifted: DMatrix<C64<f64>> =
            DMatrix::from_fn(d, d, |r, c| C64::new(l[(r, c)], 0.0) - if r == c { z } else { C64::new(0.0, 0.0) });
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
        for &k in order.iter().take(mult) {
            if svd.singular_values[k] > 1e-8 * scale {
                return Err(GermError::Degenerate("linear part is not diagonalizable".into()));
            }
            let v: Vec<C64<f64>> = vt.row(k).iter().map(|c| c.conj()).collect();
            if z.im.abs() < 1e-12 {
                // real eigenvalue: the null vector can be taken real
                let (imax, _) =
                    v.iter().enumerate().fold((0, 0.0), |acc, (j, c)| if c.norm() > acc.1 { (j, c.norm()) } else { acc });
                let ph = v[imax] / v[imax].norm();
                cols.push(v.iter().map(|c| (c / ph).re).collect());
            } else {
                cols.push(v.iter().map(|c| c.re).collect());
                cols.push(v.iter().map(|c| c.im).collect());
            }
        }
        i += mult;
    }
    if cols.len() != d {
        return Err(GermError::Degenerate("could not build an eigenbasis".into()));
    }
    let p = DMatrix::from_fn(d, d, |r, c| cols[c][r]);
    if p.clone().try_inverse().is_none() || p.determinant().abs() < 1e-10 {
        return Err(GermError::Degenerate("eigenbasis is singular".into()));
    }
    Ok((p, levels))
}

/// Coefficients of `map_x(φ(y), y) − φ(map_y(φ(y), y))` in degree `m`, where
/// `x` are the first `s` coordinates and `φ` is the graph jet.
fn flag_defect(map: &PolyMap, phi: &[Poly], s: usize, m: u32) -> Vec<f64> {
    let d = map.dim();
    // embed φ as a map of ℝᵈ that depends on the weak coordinates only
    let graph: Vec<Poly> = (0..d).map(|i| if i < s { phi[i].clone() } else { Poly::var(d, i) }).collect();
    let on_graph: Vec<Poly> = map.components.iter().map(|p| p.compose(&graph, d, m)).collect();
    let weak_image: Vec<Poly> = (0..d).map(|i| if i < s { Poly::zero() } else { on_graph[i].clone() }).collect();
    let mut out = Vec::new();
    for i in 0..s {
        let rhs = phi[i].compose(&weak_image, d, m);
        let diff = on_graph[i].add(&rhs.scale(-1.0)).homogeneous(m);
        for e in monomials(d, s, m) {
            out.push(diff.terms.get(&e).copied().unwrap_or(0.0));
        }
    }
    out
}

/// Exponent vectors of total degree `m` in the variables `s..d`.
fn monomials(d: usize, s: usize, m: u32) -> Vec<Vec<u32>> {
    fn rec(v: usize, d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if v == d - 1 {
            cur[v] = left;
            out.push(cur.clone());
            cur[v] = 0;
            return;
        }
        for k in (0..=left).rev() {
            cur[v] = k;
            rec(v + 1, d, left - k, cur, out);
        }
        cur[v] = 0;
    }
    let mut out = Vec::new();
    if s < d {
        let mut cur = vec![0; d];
        rec(s, d, m, &mut cur, &mut out);
    }
    out
}

/// Phase 1 for one flag: strong coordinates `0..s` as a graph over the rest.
fn check_flag(maps: &[PolyMap], s: usize, cfg: &GermConfig, flag: usize) -> Result<(), GermError> {
    let d = maps[0].dim();
    let mut phi: Vec<Poly> = vec![Poly::zero(); s];
    for m in 2..=cfg.jet_degree {
        let monos = monomials(d, s, m);
        let unknowns = s * monos.len();
        let base: Vec<Vec<f64>> = maps.iter().map(|f| flag_defect(f, &phi, s, m)).collect();
        let rows = base[0].len();
        let mut a = DMatrix::zeros(rows * maps.len(), unknowns);
        let mut b = DVector::zeros(rows * maps.len());
        for (k, f) in maps.iter().enumerate() {
            for (j, (i, e)) in (0..s).flat_map(|i| monos.iter().map(move |e| (i, e))).enumerate() {
                let mut trial = phi.clone();
                trial[i] = trial[i].add(&Poly::monomial(e.clone(), 1.0));
                let col = flag_defect(f, &trial, s, m);
                for r in 0..rows {
                    a[(k * rows + r, j)] = col[r] - base[k][r];
                }
            }
            for r in 0..rows {
                b[k * rows + r] = -base[k][r];
            }
        }
        let svd = a.clone().svd(true, true);
        let sol = svd.solve(&b, 1e-10).map_err(|e| GermError::Degenerate(e.to_string()))?;
        let resid = &a * &sol - &b;
        let per_map: Vec<f64> =
            (0..maps.len()).map(|k| resid.rows(k * rows, rows).iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
        let (worst, &r) = per_map.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("at least one map");
        if r > cfg.obstruction_tol {
            return Err(GermError::Obstruction { flag, map: worst, degree: m as usize, residual: r });
        }
        for (j, (i, e)) in (0..s).flat_map(|i| monos.iter().map(move |e| (i, e))).enumerate() {
            phi[i] = phi[i].add(&Poly::monomial(e.clone(), sol[j]));
        }
    }
    Ok(())
}

/// Local chart linearizing every member, or the first flag obstruction.
pub fn linearize_germ(maps: &[PolyMap], cfg: &GermConfig) -> Result<GermChart, GermError> {
    let d = maps.first().map(PolyMap::dim).ok_or(GermError::Degenerate("no maps".into()))?;
    if maps.iter().any(|f| f.dim() != d || !f.fixes_origin()) {
        return Err(GermError::Degenerate("maps must share the dimension and fix 0".into()));
    }
    let radii: Vec<f64> = maps.iter().map(|f| spectral_radius(&f.linear_part())).collect();
    let ti = match cfg.contraction {
        Some(i) if radii[i] < 1.0 => i,
        Some(i) => return Err(GermError::NotContracting(radii[i])),
        None => radii
            .iter()
            .position(|&r| r < 1.0)
            .ok_or(GermError::NotContracting(radii.iter().copied().fold(f64::INFINITY, f64::min)))?,
    };
    let l = maps[ti].linear_part();

    // phase 1 in coordinates adapted to D₀T
    let (p, levels) = adapted_basis(&l)?;
    let p_inv = p.clone().try_inverse().expect("checked invertible");
    let (pm, pm_inv) = (PolyMap::linear(&p), PolyMap::linear(&p_inv));
    let deg = cfg.jet_degree;
    let conj: Vec<PolyMap> = maps.iter().map(|f| pm_inv.compose(&f.truncate(deg).compose(&pm, deg), deg)).collect();
    let mut flags_checked = Vec::new();
    for (i, &s) in levels.iter().enumerate().skip(1) {
        check_flag(&conj, s, cfg, i + 1)?;
        flags_checked.push(d - s);
    }

    // phase 2: the limit scheme on a sample of the ball
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e3);
    let mut pts: Vec<Vec<f64>> = vec![vec![0.0; d]];
    for a in 0..d {
        for s in [-1.0, 1.0] {
            let mut e = vec![0.0; d];
            e[a] = s * cfg.radius;
            pts.push(e);
        }
    }
    while pts.len() < cfg.samples {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-cfg.radius..=cfg.radius)).collect();
        if x.iter().map(|v| v * v).sum::<f64>().sqrt() <= cfg.radius {
            pts.push(x);
        }
    }
    let t = &maps[ti];
    let lu = l.clone().lu();
    let mut images: Vec<Vec<f64>> = pts.clone();
    let mut prev = pts.clone();
    let mut cauchy = Vec::new();
    let mut iterations = 0;
    // h_m(x) = L^{-m} T^m x, advanced one step at a time
    let mut lin_inv_pow = DMatrix::identity(d, d);
    let l_inv = lu.try_inverse().ok_or(GermError::Degenerate("D₀T is singular".into()))?;
    loop {
        iterations += 1;
        lin_inv_pow = &l_inv * &lin_inv_pow;
        let mut diff: f64 = 0.0;
        for (img, pr) in images.iter_mut().zip(prev.iter_mut()) {
            *img = t.eval(img);
            let h = (&lin_inv_pow * DVector::from_column_slice(img)).as_slice().to_vec();
            diff = diff.max(h.iter().zip(pr.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
            *pr = h;
        }
        cauchy.push(diff);
        if diff < cfg.tol {
            break;
        }
        let stalled = cauchy.len() > 20 && diff > cauchy[cauchy.len() - 11];
        if iterations >= cfg.max_iter || !diff.is_finite() || stalled {
            return Err(GermError::NoConvergence { profile: cauchy });
        }
    }

    let mut chart =
        GermChart { contraction: ti, t: t.clone(), linear: l, iterations, cauchy, residuals: Vec::new(), radius: cfg.radius, flags_checked };
    // verify on the part of the ball mapped back into the ball by every member
    let lips: Vec<f64> = maps.iter().map(|f| f.linear_part().norm().max(1.0)).collect();
    let inner = cfg.radius / lips.iter().copied().fold(1.0, f64::max) / 1.5;
    let verify: Vec<Vec<f64>> = pts.iter().map(|x| x.iter().map(|v| v * inner / cfg.radius).collect()).collect();
    let hs: Vec<Vec<f64>> = verify.iter().map(|x| chart.eval(x)).collect();
    chart.residuals = maps
        .iter()
        .map(|s| {
            let ds = s.linear_part();
            verify
                .iter()
                .zip(&hs)
                .map(|(x, hx)| {
                    let lhs = chart.eval(&s.eval(x));
                    let rhs = &ds * DVector::from_column_slice(hx);
                    lhs.iter().zip(rhs.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(chart)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(d: usize, terms: &[(&[u32], f64)]) -> Poly {
        terms.iter().fold(Poly::zero(), |acc, (e, c)| {
            assert_eq!(e.len(), d);
            acc.add(&Poly::monomial(e.to_vec(), *c))
        })
    }

    #[test]
    fn resonant_commuting_pair_is_obstructed() {
        let lam = 0.5;
        let f = PolyMap::new(vec![p(2, &[(&[1, 0], lam * lam)]), p(2, &[(&[0, 1], lam)])]);
        let g = PolyMap::new(vec![p(2, &[(&[1, 0], 1.0), (&[0, 2], 1.0)]), p(2, &[(&[0, 1], 1.0)])]);
        // the pair commutes exactly
        let fg = f.compose(&g, 4);
        let gf = g.compose(&f, 4);
        assert_eq!(fg, gf);
        match linearize_germ(&[f, g], &GermConfig::default()) {
            Err(GermError::Obstruction { flag, map, degree, .. }) => {
                assert_eq!((flag, map, degree), (2, 1, 2));
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
    }

    #[test]
    fn linear_maps_give_identity() {
        let f = PolyMap::linear(&DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.3]));
        let g = PolyMap::linear(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.5]));
        let c = linearize_germ(&[f, g], &GermConfig::default()).unwrap();
        assert_eq!(c.iterations, 1);
        assert!(c.residuals.iter().all(|r| *r < 1e-15));
        let y = c.eval(&[0.1, -0.2]);
        assert!((y[0] - 0.1).abs() < 1e-15 && (y[1] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn koenigs_series_in_one_dimension() {
        // h(T(x)) = ½ h(x) with h(x) = Σ cₖ xᵏ, c₁ = 1
        let t = PolyMap::new(vec![p(1, &[(&[1], 0.5), (&[2], 0.05)])]);
        let c = linearize_germ(std::slice::from_ref(&t), &GermConfig::default()).unwrap();
        let kmax = 60;
        let mut coef = vec![0.0; kmax + 1];
        coef[1] = 1.0;
        // cₖ (½ᵏ − ½) = −Σ_{j<k} c_j [xᵏ](½x + 0.05x²)ʲ
        let tp = &t.components[0];
        let mut powers = vec![Poly::constant(1, 1.0), tp.clone()];
        for j in 2..=kmax {
            powers.push(powers[j - 1].mul(tp, kmax as u32));
        }
        for k in 2..=kmax {
            let s: f64 = (1..k).map(|j| coef[j] * powers[j].terms.get(&vec![k as u32]).copied().unwrap_or(0.0)).sum();
            coef[k] = -s / (0.5f64.powi(k as i32) - 0.5);
        }
        let series = |x: f64| coef.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum::<f64>();
        for i in 0..=20 {
            let x = -0.5 + 0.05 * i as f64;
            assert!((c.eval(&[x])[0] - series(x)).abs() < 1e-10, "x = {x}");
        }
        assert!(c.residuals[0] < 1e-8);
    }

    #[test]
    fn commuting_conjugated_pair() {
        // T = φ L φ⁻¹, S = φ L' φ⁻¹ with φ(x, y) = (x, y + x²)
        let t = PolyMap::new(vec![p(2, &[(&[1, 0], 0.5)]), p(2, &[(&[0, 1], 0.6), (&[2, 0], -0.35)])]);
        let s = PolyMap::new(vec![p(2, &[(&[1, 0], 0.7)]), p(2, &[(&[0, 1], 0.8), (&[2, 0], -0.31)])]);
        let (ts, st) = (t.compose(&s, 6), s.compose(&t, 6));
        for x in [[0.1, 0.2], [-0.3, 0.25]] {
            let (a, b) = (ts.eval(&x), st.eval(&x));
            assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
        }
        let c = linearize_germ(&[t, s], &GermConfig::default()).unwrap();
        assert!(c.residuals.iter().all(|r| *r < 1e-8), "{:?}", c.residuals);
        // the chart is φ⁻¹
        let y = c.eval(&[0.3, 0.1]);
        assert!((y[0] - 0.3).abs() < 1e-10 && (y[1] - (0.1 - 0.09)).abs() < 1e-10);
    }

    #[test]
    fn expanding_germ_is_rejected() {
        let f = PolyMap::linear(&DMatrix::from_row_slice(1, 1, &[2.0]));
        assert!(matches!(linearize_germ(&[f], &GermConfig::default()), Err(GermError::NotContracting(_))));
    }
}
