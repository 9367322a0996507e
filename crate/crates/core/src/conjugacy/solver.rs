use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{dist, point, torus_dist, GridDisplacement};
use super::holder::{estimate_holder, HolderEstimate};
use super::map::{DiffMap, PerturbedMap};
use super::ConjugacyError;
use crate::centralizer::GeneratorSet;
use crate::exact::ToralMatrix;
use crate::spectrum::joint_spectrum;

/// Tolerance on `|log|λ||` below which an eigenvalue counts as neutral.
const NEUTRAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverConfig {
    pub resolution: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { resolution: 128, tol: 1e-11, max_iter: 500 }
    }
}

/// Real eigenbasis of a hyperbolic `A` in which it is block diagonal with
/// scalar or rotation-scaling blocks.
#[derive(Clone, Debug)]
pub struct SpectralFrame {
    pub basis: DMatrix<f64>,
    pub basis_inv: DMatrix<f64>,
    /// `(start, dim, block of B⁻¹AB, stable)`.
    pub blocks: Vec<(usize, usize, DMatrix<f64>, bool)>,
}

impl SpectralFrame {
    pub fn new(a: &ToralMatrix) -> Result<Self, ConjugacyError> {
        let n = a.dim();
        let js = joint_spectrum(std::slice::from_ref(a), 128)?;
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut spans = Vec::new();
        for (i, e) in js.eigen.iter().enumerate() {
            let modulus = e.per_generator[0].abs().to_f64();
            if modulus.ln().abs() < NEUTRAL_TOL {
                return Err(ConjugacyError::NotHyperbolic(modulus));
            }
            let vs = js.eigenspace_basis(i);
            spans.push((cols.len(), vs.len(), modulus < 1.0));
            cols.extend(vs);
        }
        let basis = DMatrix::from_fn(n, n, |r, c| cols[c][r]);
        let basis_inv = basis.clone().try_inverse().ok_or(ConjugacyError::NotHyperbolic(f64::NAN))?;
        let d = &basis_inv * a.to_nalgebra() * &basis;
        let blocks = spans.into_iter().map(|(s, k, st)| (s, k, d.view((s, s), (k, k)).into_owned(), st)).collect();
        Ok(SpectralFrame { basis, basis_inv, blocks })
    }

    /// `max(‖A|E_s‖, ‖A⁻¹|E_u‖)` in the block norms of this frame.
    pub fn contraction_bound(&self) -> f64 {
        self.blocks
            .iter()
            .map(|(_, _, b, st)| {
                let m = if *st { b.clone() } else { b.clone().try_inverse().expect("hyperbolic block") };
                m.singular_values().max()
            })
            .fold(0.0, f64::max)
    }

    fn block_norm_max(&self, v: &[f64]) -> f64 {
        self.blocks.iter().map(|(s, k, _, _)| super::grid::norm(&v[*s..s + k])).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugacyResult {
    pub w: GridDisplacement,
    /// Sup over grid points of the fixed-point defect of the discretized
    /// equations, in the torus metric.
    pub residual: f64,
    /// Sup over grid points of `|h(f(x)) − A h(x)|` with `h(f(x))` read off
    /// the interpolant.
    pub equation_residual: f64,
    pub iterations: usize,
    /// Sup-norm update size per sweep.
    pub deltas: Vec<f64>,
    pub contraction_bound: f64,
    pub holder: HolderEstimate,
}

impl ConjugacyResult {
    /// Largest ratio of consecutive updates above the round-off floor.
    pub fn observed_ratio(&self) -> f64 {
        self.deltas
            .windows(2)
            .filter(|w| w[0] > 1e-13)
            .map(|w| w[1] / w[0])
            .fold(0.0, f64::max)
    }

    pub fn h(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.w.eval(x)).map(|(a, b)| a + b).collect()
    }
}

struct Stencil {
    idx: Vec<usize>,
    weight: Vec<f64>,
}

fn stencil(n: usize, res: usize, x: &[f64]) -> Stencil {
    let r = res as f64;
    let mut base = vec![0usize; n];
    let mut frac = vec![0.0; n];
    for a in 0..n {
        let s = x[a].rem_euclid(1.0) * r;
        let fl = s.floor();
        base[a] = (fl as usize) % res;
        frac[a] = s - fl;
    }
    let mut idx = Vec::with_capacity(1 << n);
    let mut weight = Vec::with_capacity(1 << n);
    for corner in 0..1usize << n {
        let mut w = 1.0;
        let mut p = 0usize;
        for a in (0..n).rev() {
            let bit = corner >> a & 1;
            w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            p = p * res + (base[a] + bit) % res;
        }
        if w != 0.0 {
            idx.push(p);
            weight.push(w);
        }
    }
    Stencil { idx, weight }
}

fn interp(st: &Stencil, c: &[f64], n: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (p, w) in st.idx.iter().zip(&st.weight) {
        for (o, v) in out.iter_mut().zip(&c[p * n..(p + 1) * n]) {
            *o += w * v;
        }
    }
}

fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).as_slice().to_vec()
}

/// Solve `w ∘ f = A w − u` starting from `w = 0`.
pub fn solve_franks_manning(pm: &PerturbedMap, cfg: &SolverConfig) -> Result<ConjugacyResult, ConjugacyError> {
    solve_with_initial(pm, cfg, None)
}

/// Split fixed-point iteration: the unstable coordinates are updated by
/// `w_u ← A_u⁻¹ (w_u ∘ f + u_u)` and the stable ones by
/// `w_s ← A_s (w_s ∘ f⁻¹) − u_s ∘ f⁻¹`.
pub fn solve_with_initial(
    pm: &PerturbedMap,
    cfg: &SolverConfig,
    initial: Option<&GridDisplacement>,
) -> Result<ConjugacyResult, ConjugacyError> {
    let n = pm.dim();
    let res = cfg.resolution;
    let frame = SpectralFrame::new(&pm.linear)?;
    let count = res.pow(n as u32);
    if let Some(g) = initial {
        if g.n != n || g.resolution != res {
            return Err(ConjugacyError::DimensionMismatch(format!(
                "initial grid is {}-dimensional at resolution {}",
                g.n, g.resolution
            )));
        }
    }

    // images, preimages, and u in frame coordinates
    struct Pre {
        fwd: Stencil,
        back: Stencil,
        u: Vec<f64>,
        u_back: Vec<f64>,
    }
    let pre: Vec<Pre> = (0..count)
        .into_par_iter()
        .map(|p| {
            let x = point(n, res, p);
            let fx = pm.apply(&x);
            let ax = pm.linear_apply(&x);
            let u: Vec<f64> = fx.iter().zip(&ax).map(|(a, b)| a - b).collect();
            let y = pm.inverse(&x)?;
            let ay = pm.linear_apply(&y);
            let u_back: Vec<f64> = x.iter().zip(&ay).map(|(a, b)| a - b).collect();
            Ok(Pre {
                fwd: stencil(n, res, &fx),
                back: stencil(n, res, &y),
                u: mat_vec(&frame.basis_inv, &u),
                u_back: mat_vec(&frame.basis_inv, &u_back),
            })
        })
        .collect::<Result<_, ConjugacyError>>()?;

    let mut c: Vec<f64> = match initial {
        None => vec![0.0; count * n],
        Some(g) => g.samples.chunks(n).flat_map(|v| mat_vec(&frame.basis_inv, v)).collect(),
    };
    let inv_blocks: Vec<DMatrix<f64>> = frame
        .blocks
        .iter()
        .map(|(_, _, b, st)| if *st { b.clone() } else { b.clone().try_inverse().expect("hyperbolic block") })
        .collect();

    let sweep = |c: &[f64]| -> Vec<f64> {
        let mut next = vec![0.0; count * n];
        next.par_chunks_mut(n).zip(pre.par_iter()).for_each_init(
            || (vec![0.0; n], vec![0.0; n]),
            |(fwd, back), (out, pr)| {
                interp(&pr.fwd, c, n, fwd);
                interp(&pr.back, c, n, back);
                for ((s, k, _, st), m) in frame.blocks.iter().zip(&inv_blocks) {
                    let r = *s..s + k;
                    let v: Vec<f64> = if *st {
                        let t = mat_vec(m, &back[r.clone()]);
                        t.iter().zip(&pr.u_back[r.clone()]).map(|(a, b)| a - b).collect()
                    } else {
                        let t: Vec<f64> = fwd[r.clone()].iter().zip(&pr.u[r.clone()]).map(|(a, b)| a + b).collect();
                        mat_vec(m, &t)
                    };
                    out[r].copy_from_slice(&v);
                }
            },
        );
        next
    };
    let update_size = |a: &[f64], b: &[f64]| -> f64 {
        a.par_chunks(n)
            .zip(b.par_chunks(n))
            .map(|(x, y)| {
                let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
                frame.block_norm_max(&d)
            })
            .reduce(|| 0.0, f64::max)
    };

    let mut deltas = Vec::new();
    let mut iterations = 0;
    loop {
        let next = sweep(&c);
        let delta = update_size(&next, &c);
        c = next;
        iterations += 1;
        deltas.push(delta);
        if delta < cfg.tol {
            break;
        }
        if iterations >= cfg.max_iter || !delta.is_finite() {
            return Err(ConjugacyError::NoConvergence { iterations, last_delta: delta });
        }
    }

    let after = sweep(&c);
    let samples: Vec<f64> = c.par_chunks(n).flat_map_iter(|v| mat_vec(&frame.basis, v)).collect();
    let w = GridDisplacement { n, resolution: res, samples, interpolation: super::grid::Interpolation::Multilinear };
    let residual = c
        .par_chunks(n)
        .zip(after.par_chunks(n))
        .map(|(x, y)| {
            let d: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            let zero = vec![0.0; n];
            torus_dist(&mat_vec(&frame.basis, &d), &zero)
        })
        .reduce(|| 0.0, f64::max);
    let equation_residual = equation_residual(pm, &w);
    let holder = estimate_holder(&w, None);
    Ok(ConjugacyResult {
        w,
        residual,
        equation_residual,
        iterations,
        deltas,
        contraction_bound: frame.contraction_bound(),
        holder,
    })
}

/// `sup_x |h(g(x)) − M h(x)|` over grid points, torus metric.
fn conjugation_defect(map: &dyn DiffMap, m: &DMatrix<f64>, w: &GridDisplacement) -> f64 {
    (0..w.len())
        .into_par_iter()
        .map(|p| {
            let x = w.point(p);
            let gx = map.apply(&x);
            let lhs: Vec<f64> = gx.iter().zip(w.eval(&gx)).map(|(a, b)| a + b).collect();
            let hx: Vec<f64> = x.iter().zip(w.value(p)).map(|(a, b)| a + b).collect();
            torus_dist(&lhs, &mat_vec(m, &hx))
        })
        .reduce(|| 0.0, f64::max)
}

fn equation_residual(pm: &PerturbedMap, w: &GridDisplacement) -> f64 {
    conjugation_defect(pm, pm.a(), w)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EquivarianceReport {
    /// Sup-norm of `f ∘ g − g ∘ f` against the Anosov member, per map.
    pub commutator_norms: Vec<f64>,
    /// Whether every commutator norm is below the tolerance.
    pub commuting: bool,
    /// `sup |h ∘ ρ(n) − ρ*(n) ∘ h|` per generator.
    pub residuals: Vec<f64>,
}

/// Check that the conjugacy of the Anosov member `maps[anosov]` also
/// conjugates the other maps to the linear generators.
pub fn verify_equivariance(
    w: &GridDisplacement,
    linear: &GeneratorSet,
    maps: &[PerturbedMap],
    anosov: usize,
    tol: f64,
) -> Result<EquivarianceReport, ConjugacyError> {
    if maps.len() != linear.k() || anosov >= maps.len() {
        return Err(ConjugacyError::DimensionMismatch(format!(
            "{} maps for {} generators (Anosov index {anosov})",
            maps.len(),
            linear.k()
        )));
    }
    for (j, (m, g)) in maps.iter().zip(linear.generators()).enumerate() {
        if &m.linear != g {
            return Err(ConjugacyError::DimensionMismatch(format!("map {j} does not act as generator {j} in homology")));
        }
    }
    let f = &maps[anosov];
    let commutator_norms: Vec<f64> = maps
        .iter()
        .map(|g| {
            (0..w.len())
                .into_par_iter()
                .map(|p| {
                    let x = w.point(p);
                    torus_dist(&f.apply(&g.apply(&x)), &g.apply(&f.apply(&x)))
                })
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let commuting = commutator_norms.iter().all(|c| *c < tol);
    let residuals = maps.iter().map(|g| conjugation_defect(g, g.a(), w)).collect();
    Ok(EquivarianceReport { commutator_norms, commuting, residuals })
}

/// Sup over cell centres of the multilinear interpolation error of `g`.
pub fn interpolation_error(g: &GridDisplacement, exact: impl Fn(&[f64]) -> Vec<f64> + Sync) -> f64 {
    let half = 0.5 / g.resolution as f64;
    (0..g.len())
        .into_par_iter()
        .map(|p| {
            let x: Vec<f64> = g.point(p).iter().map(|v| v + half).collect();
            dist(&g.eval(&x), &exact(&x))
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::super::map::TrigTerm;
    use super::*;

    fn cat() -> ToralMatrix {
        ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap()
    }

    #[test]
    fn linear_map_gives_zero_displacement() {
        let pm = PerturbedMap::linear_only(cat());
        let r = solve_franks_manning(&pm, &SolverConfig { resolution: 32, ..Default::default() }).unwrap();
        assert_eq!(r.w.sup_norm(), 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn recovers_inverse_of_conjugating_map() {
        let psi = vec![TrigTerm::sin(&[1, 0], &[0.03, 0.0]), TrigTerm::cos(&[0, 1], &[0.0, 0.03])];
        let pm = PerturbedMap::conjugated(cat(), psi.clone());
        let cfg = SolverConfig { resolution: 64, tol: 1e-12, max_iter: 200 };
        let r = solve_franks_manning(&pm, &cfg).unwrap();
        // h = φ⁻¹, so w(x) = φ⁻¹(x) − x
        let exact = |x: &[f64]| -> Vec<f64> {
            let y = PerturbedMap::phi_inverse(&psi, x).unwrap();
            y.iter().zip(x).map(|(a, b)| a - b).collect()
        };
        let err = (0..r.w.len()).map(|p| dist(r.w.value(p), &exact(&r.w.point(p)))).fold(0.0, f64::max);
        let truth = GridDisplacement::from_fn(2, 64, exact);
        let ie = interpolation_error(&truth, exact);
        assert!(err < 5.0 * ie, "err {err:e} interpolation {ie:e}");
        assert!(r.observed_ratio() <= r.contraction_bound + 0.05);
    }

    #[test]
    fn unique_from_two_initial_guesses() {
        let pm = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
        let cfg = SolverConfig { resolution: 32, tol: 1e-11, max_iter: 200 };
        let a = solve_franks_manning(&pm, &cfg).unwrap();
        let init = GridDisplacement::from_fn(2, 32, |x| vec![0.1 * (6.0 * x[1]).sin(), -0.2]);
        let b = solve_with_initial(&pm, &cfg, Some(&init)).unwrap();
        assert!(a.w.distance(&b.w) < 10.0 * cfg.tol);
        assert!(a.residual < 1e-10);
    }

    #[test]
    fn non_hyperbolic_is_rejected() {
        let pm = PerturbedMap::linear_only(ToralMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap());
        let err = solve_franks_manning(&pm, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, ConjugacyError::NotHyperbolic(_) | ConjugacyError::Spectrum(_)));
    }

    #[test]
    fn equivariance_of_linear_action() {
        let gs = GeneratorSet::new(vec![cat(), cat().mul(&cat())], "test").unwrap();
        let maps: Vec<PerturbedMap> = gs.generators().iter().cloned().map(PerturbedMap::linear_only).collect();
        let w = GridDisplacement::zeros(2, 16);
        let rep = verify_equivariance(&w, &gs, &maps, 0, 1e-12).unwrap();
        assert!(rep.commuting);
        assert!(rep.residuals.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn non_commuting_maps_are_flagged() {
        let gs = GeneratorSet::new(vec![cat(), cat().mul(&cat())], "test").unwrap();
        let maps = vec![
            PerturbedMap::linear_only(cat()),
            PerturbedMap::trig(cat().mul(&cat()), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]),
        ];
        let rep = verify_equivariance(&GridDisplacement::zeros(2, 16), &gs, &maps, 0, 1e-9).unwrap();
        assert!(!rep.commuting);
        assert!(rep.commutator_norms[1] > 1e-3);
    }
}
