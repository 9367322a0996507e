//! Checks of the four standing hypotheses on a linear action: simple
//! spectrum, density of eigenvalue subgroups, separation of stable
//! functionals inside a chamber, and the bunching inequality. Front ends for
//! the centralizer and symplectic settings, and product actions.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centralizer::{
    dirichlet_rank, find_units, finite_order, symplectic_centralizer_front_end, CentralizerError, GeneratorSet,
    UnitSearchConfig,
};
use crate::exact::{IntMatrix, ToralMatrix};
use crate::lattice::find_scalar_relations;
use crate::lyapunov::{
    coarse_spaces, default_tolerance, exponent_functionals, find_lattice_point, stable_unstable, weyl_chambers,
    CoarseSplitting, EigenType, LyapunovError, LyapunovFunctional, WeylChamber,
};
use crate::mp::Real;
use crate::spectrum::simple_element;

#[derive(Debug, Error)]
pub enum HypothesisError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("unit search found only {found} independent units; at least 2 are needed")]
    InsufficientUnits { found: usize },
    #[error(transparent)]
    Centralizer(#[from] CentralizerError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
    Unknown { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
    fn fail(s: impl Into<String>) -> Self {
        Verdict::Fail { witness: s.into() }
    }
    fn unknown(s: impl Into<String>) -> Self {
        Verdict::Unknown { reason: s.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Dense,
    /// The subgroup is cyclic; `relations` are exactly verified.
    Discrete { relations: Vec<Vec<i64>> },
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityDetail {
    pub functional: usize,
    pub eigen_type: EigenType,
    pub log_rank: usize,
    /// ℚ-rank of `{arg λ(Mⱼ)} ∪ {2π}` for complex pairs.
    pub arg_rank: Option<usize>,
    pub density: Density,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub chamber: usize,
    pub functional: usize,
    pub m: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BunchingWitness {
    pub chamber: usize,
    pub m: Vec<i64>,
    /// `χ_C^s(m) + χ_C^{u,+}(m) − χ_C^{u,−}(m)`.
    pub quantity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub verdict_i: Verdict,
    pub verdict_ii: Verdict,
    pub verdict_iii: Verdict,
    pub verdict_iv: Verdict,
    pub density: Vec<DensityDetail>,
    pub witnesses_iii: Vec<SeparationWitness>,
    pub witnesses_iv: Vec<BunchingWitness>,
    /// Set for product actions, where the bunching verdict is a search
    /// result and not a consequence of the factors.
    pub iv_empirical_only: bool,
    pub precision_bits: usize,
    pub diagnostics: Vec<String>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        [&self.verdict_i, &self.verdict_ii, &self.verdict_iii, &self.verdict_iv].iter().all(|v| v.is_pass())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub unit_search: UnitSearchConfig,
    pub precision_bits: usize,
    pub relation_height: f64,
    pub box_radius: i64,
    pub margin: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            unit_search: UnitSearchConfig::default(),
            precision_bits: 192,
            relation_height: 1e6,
            box_radius: 20,
            margin: crate::lyapunov::DEFAULT_MARGIN,
        }
    }
}

/// Modulus of the eigenvalue of `p` on the invariant subspace spanned by
/// `basis`, from the restricted matrix `(BᵀB)⁻¹BᵀPB`.
pub fn eigen_modulus_on(p: &IntMatrix, basis: &[Vec<f64>]) -> f64 {
    let n = p.dim();
    let d = basis.len();
    let b = DMatrix::from_fn(n, d, |i, j| basis[j][i]);
    let pm = p.to_nalgebra();
    let gram = b.transpose() * &b;
    let r = gram.try_inverse().expect("eigenspace basis is degenerate") * b.transpose() * pm * &b;
    r.determinant().abs().powf(1.0 / d as f64)
}

/// Exact-matrix re-check that `χ_f(m)` has sign `s` for each `(f, s)`.
pub fn verify_signs(gs: &GeneratorSet, fs: &[LyapunovFunctional], m: &[i64], expect: &[(usize, i8)]) -> bool {
    let Ok(p) = gs.power(m) else { return false };
    expect.iter().all(|&(f, s)| {
        let lm = eigen_modulus_on(p.as_int(), &fs[f].eigenspace).ln();
        lm * s as f64 > 0.0
    })
}

/// Simple joint spectrum and coarse classes equal to Lyapunov spaces.
///
/// Simplicity is certified by an element of the action algebra with
/// squarefree characteristic polynomial; each generator's own squarefreeness
/// is reported in the witness text when it fails.
pub fn check_i(gs: &GeneratorSet, fs: &Result<Vec<LyapunovFunctional>, LyapunovError>, cs: Option<&CoarseSplitting>) -> Verdict {
    let non_sqfree: Vec<usize> =
        (0..gs.k()).filter(|&j| !gs.generators()[j].char_poly().is_squarefree()).collect();
    if simple_element(gs.generators()).is_none() {
        return Verdict::fail(format!(
            "no element with simple spectrum; generators with repeated eigenvalues: {non_sqfree:?}"
        ));
    }
    let fs = match fs {
        Ok(fs) => fs,
        Err(e) => return Verdict::fail(e.to_string()),
    };
    let expected: usize = fs.iter().map(LyapunovFunctional::dim).sum();
    if expected != gs.n() {
        return Verdict::fail(format!("eigenspaces span dimension {expected}, torus has {}", gs.n()));
    }
    match cs {
        None => Verdict::unknown("coarse classes unavailable"),
        Some(cs) => match cs.groups.iter().find(|g| g.len() > 1) {
            Some(g) => Verdict::fail(format!("functionals {g:?} are positively proportional")),
            None => Verdict::Pass,
        },
    }
}

fn rank_and_relations(values: &[Real], prec: usize, height: f64) -> (usize, Vec<Vec<i64>>, bool) {
    let res = find_scalar_relations(values, prec, height);
    let rels: Vec<Vec<i64>> =
        res.relations.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect()).collect();
    (values.len() - rels.len(), rels, res.complete)
}

/// Relation `v` on functional `f` holds exactly: `ρ*(v)` has finite order,
/// or (real case) has eigenvalue `±1`.
fn relation_verified(gs: &GeneratorSet, f: &LyapunovFunctional, v: &[i64]) -> bool {
    if v.iter().any(|x| x.abs() > crate::exact::MAX_EXPONENT) {
        return false;
    }
    let Ok(p) = gs.power(v) else { return false };
    if finite_order(&p).is_some() {
        return true;
    }
    f.eigen_type == EigenType::Real && {
        let id = IntMatrix::identity(p.dim());
        (p.as_int() - &id).determinant() == 0.into() || (p.as_int() + &id).determinant() == 0.into()
    }
}

fn density_of(gs: &GeneratorSet, idx: usize, f: &LyapunovFunctional, prec: usize, height: f64) -> DensityDetail {
    let (log_rank, rels, complete) = rank_and_relations(&f.values_mp, prec, height);
    let detail = |density, arg_rank| DensityDetail { functional: idx, eigen_type: f.eigen_type, log_rank, arg_rank, density };

    if log_rank <= 1 {
        if rels.iter().all(|v| relation_verified(gs, f, v)) {
            return detail(Density::Discrete { relations: rels }, None);
        }
        return detail(Density::Unknown { reason: "candidate relation failed exact verification".into() }, None);
    }
    if !complete {
        return detail(Density::Unknown { reason: format!("relation search incomplete at {prec} bits") }, None);
    }
    if f.eigen_type == EigenType::Real {
        return detail(Density::Dense, None);
    }
    let args: Vec<Real> = f
        .eigenvalues_mp
        .iter()
        .map(|z| z.arg().with_precision(prec))
        .chain(std::iter::once(Real::pi(prec).mul_pow2(1)))
        .collect();
    let (ar, _, complete) = rank_and_relations(&args, prec, height);
    let d = if ar >= 2 && complete {
        Density::Dense
    } else if ar >= 2 {
        Density::Unknown { reason: "argument relation search incomplete".into() }
    } else {
        Density::Discrete { relations: vec![] }
    };
    detail(d, Some(ar))
}

/// Density of each eigenvalue subgroup. `fs` is recomputed when it was
/// built at lower precision than requested.
pub fn check_ii(gs: &GeneratorSet, fs: &[LyapunovFunctional], precision_bits: usize, height: f64) -> (Verdict, Vec<DensityDetail>) {
    let recomputed;
    let fs = if fs.first().is_some_and(|f| f.precision_bits < precision_bits) {
        match exponent_functionals(gs, precision_bits) {
            Ok(v) => {
                recomputed = v;
                &recomputed[..]
            }
            Err(e) => return (Verdict::unknown(e.to_string()), vec![]),
        }
    } else {
        fs
    };
    let details: Vec<DensityDetail> = fs.iter().enumerate().map(|(i, f)| density_of(gs, i, f, precision_bits, height)).collect();
    let verdict = if let Some(d) = details.iter().find(|d| matches!(d.density, Density::Discrete { .. })) {
        Verdict::fail(format!("eigenvalue subgroup of functional {} is discrete", d.functional))
    } else if details.iter().all(|d| d.density == Density::Dense) {
        Verdict::Pass
    } else {
        Verdict::unknown(format!("density undecided at {precision_bits} bits and height {height:e}"))
    };
    (verdict, details)
}

fn stable_functionals(cs: &CoarseSplitting, c: &WeylChamber) -> Vec<usize> {
    let (st, _) = stable_unstable(c);
    st.iter().flat_map(|&i| cs.groups[i].clone()).collect()
}

fn unstable_functionals(cs: &CoarseSplitting, c: &WeylChamber) -> Vec<usize> {
    let (_, un) = stable_unstable(c);
    un.iter().flat_map(|&i| cs.groups[i].clone()).collect()
}

/// For each chamber and each stable Lyapunov functional `χ_E`, an element
/// with `χ_E < 0` and `χ_F > 0` for the other stable `F`.
pub fn check_iii(gs: &GeneratorSet, cs: &CoarseSplitting, chambers: &[WeylChamber], margin: f64) -> (Verdict, Vec<SeparationWitness>) {
    let tasks: Vec<(usize, usize)> = chambers
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| stable_functionals(cs, c).into_iter().map(move |e| (ci, e)))
        .collect();
    let results: Vec<Result<SeparationWitness, String>> = tasks
        .par_iter()
        .map(|&(ci, e)| {
            let stable = stable_functionals(cs, &chambers[ci]);
            let expect: Vec<(usize, i8)> =
                stable.iter().map(|&f| (f, if f == e { -1 } else { 1 })).collect();
            let ineqs: Vec<(Vec<f64>, i8)> = expect.iter().map(|&(f, s)| (cs.functionals[f].values.clone(), s)).collect();
            let m = find_lattice_point(&ineqs, margin)
                .map_err(|err| format!("chamber {ci}, functional {e}: {err}"))?;
            if !verify_signs(gs, &cs.functionals, &m, &expect) {
                return Err(format!("chamber {ci}, functional {e}: witness {m:?} failed exact re-check"));
            }
            Ok(SeparationWitness { chamber: ci, functional: e, m })
        })
        .collect();
    let mut witnesses = Vec::new();
    for r in results {
        match r {
            Ok(w) => witnesses.push(w),
            Err(msg) => return (Verdict::fail(msg), witnesses),
        }
    }
    (Verdict::Pass, witnesses)
}

fn bunching_quantity(fs: &[LyapunovFunctional], stable: &[usize], unstable: &[usize], m: &[i64]) -> f64 {
    let s = stable.iter().map(|&f| fs[f].eval(m)).fold(f64::NEG_INFINITY, f64::max);
    let s = if stable.is_empty() { 0.0 } else { s };
    let up = unstable.iter().map(|&f| fs[f].eval(m)).fold(f64::NEG_INFINITY, f64::max);
    let um = unstable.iter().map(|&f| fs[f].eval(m)).fold(f64::INFINITY, f64::min);
    let spread = if unstable.is_empty() { 0.0 } else { up - um };
    s + spread
}

fn bunching_quantity_mp(fs: &[LyapunovFunctional], stable: &[usize], unstable: &[usize], m: &[i64]) -> Real {
    let vals = |ix: &[usize]| ix.iter().map(|&f| fs[f].eval_mp(m)).collect::<Vec<_>>();
    let p = fs[0].precision_bits;
    let sv = vals(stable);
    let uv = vals(unstable);
    let max = |v: &[Real]| v.iter().skip(1).fold(v[0].clone(), |a, b| Real::max(&a, b));
    let min = |v: &[Real]| v.iter().skip(1).fold(v[0].clone(), |a, b| -Real::max(&-a, &-b.clone()));
    let s = if sv.is_empty() { Real::zero(p) } else { max(&sv) };
    let spread = if uv.is_empty() { Real::zero(p) } else { max(&uv) - min(&uv) };
    s + spread
}

/// LP-guided candidates: for each choice of which stable functional attains
/// the max and which unstable ones attain max and min, the region where the
/// quantity is linear is a cone; look for a lattice point in it.
fn lp_bunching_candidate(cs: &CoarseSplitting, c: &WeylChamber, margin: f64) -> Option<Vec<i64>> {
    let fs = &cs.functionals;
    let stable = stable_functionals(cs, c);
    let unstable = unstable_functionals(cs, c);
    let k = cs.k();
    let s_choices: Vec<Option<usize>> = if stable.is_empty() { vec![None] } else { stable.iter().map(|&s| Some(s)).collect() };
    let u_choices: Vec<(Option<usize>, Option<usize>)> = if unstable.is_empty() {
        vec![(None, None)]
    } else {
        unstable.iter().flat_map(|&a| unstable.iter().map(move |&b| (Some(a), Some(b)))).collect()
    };
    let diff = |a: usize, b: usize| -> Vec<f64> { (0..k).map(|j| fs[a].values[j] - fs[b].values[j]).collect() };
    for s in &s_choices {
        for (up, um) in &u_choices {
            let mut ineqs: Vec<(Vec<f64>, i8)> =
                (0..cs.len()).map(|i| (cs.representative(i).values.clone(), c.signs[i])).collect();
            if let Some(s) = s {
                ineqs.extend(stable.iter().filter(|&&t| t != *s).map(|&t| (diff(*s, t), 1)));
            }
            if let (Some(up), Some(um)) = (up, um) {
                ineqs.extend(unstable.iter().filter(|&&t| t != *up).map(|&t| (diff(*up, t), 1)));
                ineqs.extend(unstable.iter().filter(|&&t| t != *um).map(|&t| (diff(t, *um), 1)));
            }
            let q: Vec<f64> = (0..k)
                .map(|j| {
                    s.map_or(0.0, |s| fs[s].values[j]) + up.map_or(0.0, |u| fs[u].values[j])
                        - um.map_or(0.0, |u| fs[u].values[j])
                })
                .collect();
            ineqs.push((q, -1));
            if !cone_is_open(&ineqs, k) {
                continue;
            }
            if let Ok(m) = find_lattice_point(&ineqs, margin) {
                return Some(m);
            }
        }
    }
    None
}

fn cone_is_open(ineqs: &[(Vec<f64>, i8)], k: usize) -> bool {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let xs: Vec<_> = (0..k).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    for (chi, s) in ineqs {
        let mut e: Vec<_> = xs.iter().zip(chi).map(|(x, c)| (*x, *s as f64 * c)).collect();
        e.push((t, -1.0));
        lp.add_constraint(e.as_slice(), ComparisonOp::Ge, 0.0);
    }
    lp.solve().is_ok_and(|sol| sol[t] > 1e-9)
}

/// Bunching: for each chamber an element `m` with
/// `χ_C^s(m) + χ_C^{u,+}(m) − χ_C^{u,−}(m) < 0`, found by scanning
/// `|mⱼ| ≤ box_radius` and then by LP-guided cones.
pub fn check_iv(
    gs: &GeneratorSet,
    cs: &CoarseSplitting,
    chambers: &[WeylChamber],
    box_radius: i64,
    margin: f64,
) -> (Verdict, Vec<BunchingWitness>) {
    let k = cs.k();
    let fs = &cs.functionals;
    let side = (2 * box_radius + 1) as u64;
    let total = side.pow(k as u32);
    let split: Vec<(Vec<usize>, Vec<usize>)> =
        chambers.iter().map(|c| (stable_functionals(cs, c), unstable_functionals(cs, c))).collect();

    // best witness per chamber: shortest (L∞, L1, lex) with quantity < −margin
    let best: Vec<Option<(i64, i64, Vec<i64>)>> = (0..total)
        .into_par_iter()
        .fold(
            || vec![None; chambers.len()],
            |mut acc: Vec<Option<(i64, i64, Vec<i64>)>>, mut idx| {
                let m: Vec<i64> = (0..k)
                    .map(|_| {
                        let d = (idx % side) as i64 - box_radius;
                        idx /= side;
                        d
                    })
                    .collect();
                let vals: Vec<f64> = (0..cs.len()).map(|c| cs.representative(c).eval(&m)).collect();
                if vals.iter().any(|v| v.abs() < margin) {
                    return acc;
                }
                let Some(ci) = chambers
                    .iter()
                    .position(|c| c.signs.iter().zip(&vals).all(|(s, v)| *s as f64 * v > 0.0))
                else {
                    return acc;
                };
                let q = bunching_quantity(fs, &split[ci].0, &split[ci].1, &m);
                if q < -margin {
                    let key = (m.iter().map(|x| x.abs()).max().unwrap_or(0), m.iter().map(|x| x.abs()).sum::<i64>());
                    if acc[ci].as_ref().is_none_or(|b| (key.0, key.1, &m) < (b.0, b.1, &b.2)) {
                        acc[ci] = Some((key.0, key.1, m));
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![None; chambers.len()],
            |a, b| {
                a.into_iter()
                    .zip(b)
                    .map(|(x, y)| match (x, y) {
                        (Some(x), Some(y)) => Some(if (x.0, x.1, &x.2) <= (y.0, y.1, &y.2) { x } else { y }),
                        (x, None) => x,
                        (None, y) => y,
                    })
                    .collect()
            },
        );

    let mut witnesses = Vec::new();
    for (ci, c) in chambers.iter().enumerate() {
        let m = match &best[ci] {
            Some(b) => b.2.clone(),
            None => match lp_bunching_candidate(cs, c, margin) {
                Some(m) => m,
                None => {
                    return (
                        Verdict::unknown(format!("no bunching witness for chamber {ci} within |m| <= {box_radius} or LP cones")),
                        witnesses,
                    )
                }
            },
        };
        let (st, un) = &split[ci];
        let q = bunching_quantity_mp(fs, st, un, &m);
        let expect: Vec<(usize, i8)> = st.iter().map(|&f| (f, -1)).chain(un.iter().map(|&f| (f, 1))).collect();
        if !q.is_negative() || !verify_signs(gs, fs, &m, &expect) {
            return (Verdict::fail(format!("chamber {ci}: witness {m:?} failed re-check")), witnesses);
        }
        witnesses.push(BunchingWitness { chamber: ci, m, quantity: q.to_f64() });
    }
    (Verdict::Pass, witnesses)
}

/// Run all four checks on a generator set.
pub fn check_all(gs: &GeneratorSet, cfg: &CheckConfig) -> HypothesisReport {
    let prec = cfg.precision_bits;
    let fs = exponent_functionals(gs, prec);
    let mut diagnostics = Vec::new();
    let cs = fs.as_ref().ok().map(|fs| coarse_spaces(fs, default_tolerance(prec)));
    let cs_ok = match &cs {
        Some(Ok(cs)) => Some(cs),
        Some(Err(e)) => {
            diagnostics.push(e.to_string());
            None
        }
        None => None,
    };
    let verdict_i = check_i(gs, &fs, cs_ok);
    let (verdict_ii, density) = match &fs {
        Ok(fs) => check_ii(gs, fs, prec, cfg.relation_height),
        Err(e) => (Verdict::unknown(e.to_string()), vec![]),
    };
    let chambers = cs_ok.map(|cs| weyl_chambers(cs, cfg.margin));
    let (verdict_iii, witnesses_iii, verdict_iv, witnesses_iv) = match (cs_ok, chambers) {
        (Some(cs), Some(Ok(ch))) => {
            let (v3, w3) = check_iii(gs, cs, &ch, cfg.margin);
            let (v4, w4) = check_iv(gs, cs, &ch, cfg.box_radius, cfg.margin);
            (v3, w3, v4, w4)
        }
        (_, Some(Err(e))) => (Verdict::unknown(e.to_string()), vec![], Verdict::unknown(e.to_string()), vec![]),
        _ => (
            Verdict::unknown("functionals unavailable"),
            vec![],
            Verdict::unknown("functionals unavailable"),
            vec![],
        ),
    };
    HypothesisReport {
        verdict_i,
        verdict_ii,
        verdict_iii,
        verdict_iv,
        density,
        witnesses_iii,
        witnesses_iv,
        iv_empirical_only: false,
        precision_bits: prec,
        diagnostics,
    }
}

fn flag_front_end(report: &mut HypothesisReport) {
    for (name, v) in [("i", &report.verdict_i), ("ii", &report.verdict_ii), ("iii", &report.verdict_iii), ("iv", &report.verdict_iv)] {
        match v {
            Verdict::Fail { .. } => report.diagnostics.push(format!("red flag: hypothesis {name} fails on an action expected to satisfy it")),
            Verdict::Unknown { .. } => report.diagnostics.push(format!("precision advisory: hypothesis {name} undecided")),
            Verdict::Pass => {}
        }
    }
}

/// Irreducible `A` with centralizer rank at least 2: build units and check.
pub fn theorem_1_1_check(a: &ToralMatrix, cfg: &CheckConfig) -> Result<(GeneratorSet, HypothesisReport), HypothesisError> {
    let rank = match dirichlet_rank(a) {
        Ok(r) => r,
        Err(CentralizerError::NotIrreducible(f)) => {
            return Err(HypothesisError::HypothesisViolation(format!(
                "characteristic polynomial is reducible (factor {})",
                f.pretty()
            )))
        }
        Err(e) => return Err(e.into()),
    };
    if rank < 2 {
        return Err(HypothesisError::HypothesisViolation(format!("centralizer has rank {rank} < 2")));
    }
    let mut notes = Vec::new();
    let gs = match find_units(a, &cfg.unit_search) {
        Ok(gs) => gs,
        Err(CentralizerError::RankNotReached { found, expected }) if found.k() >= 2 => {
            notes.push(format!("unit search reached rank {} of {expected}", found.k()));
            *found
        }
        Err(CentralizerError::RankNotReached { found, .. }) => return Err(HypothesisError::InsufficientUnits { found: found.k() }),
        Err(e) => return Err(e.into()),
    };
    let mut report = check_all(&gs, cfg);
    report.diagnostics.extend(notes);
    flag_front_end(&mut report);
    Ok((gs, report))
}

/// Symplectic `A` with irreducible characteristic polynomial, `N ≥ 4`, and
/// for `N = 4` a real eigenvalue.
pub fn theorem_2_2_check(a: &ToralMatrix, cfg: &CheckConfig) -> Result<(GeneratorSet, HypothesisReport), HypothesisError> {
    let gs = match symplectic_centralizer_front_end(a, &cfg.unit_search) {
        Ok(gs) => gs,
        Err(CentralizerError::HypothesisViolation(s)) => return Err(HypothesisError::HypothesisViolation(s)),
        Err(CentralizerError::OddDimension(n)) => {
            return Err(HypothesisError::HypothesisViolation(format!("odd dimension {n}")))
        }
        Err(e) => return Err(e.into()),
    };
    let mut report = check_all(&gs, cfg);
    flag_front_end(&mut report);
    Ok((gs, report))
}

/// Block-diagonal product action of `ℤ^{k₁+k₂}` on `𝕋^{N₁+N₂}`.
pub fn product_action(gs1: &GeneratorSet, gs2: &GeneratorSet, cfg: &CheckConfig) -> Result<(GeneratorSet, HypothesisReport), HypothesisError> {
    let id1 = IntMatrix::identity(gs1.n());
    let id2 = IntMatrix::identity(gs2.n());
    let gens: Vec<ToralMatrix> = gs1
        .generators()
        .iter()
        .map(|g| IntMatrix::block_diag(g.as_int(), &id2))
        .chain(gs2.generators().iter().map(|g| IntMatrix::block_diag(&id1, g.as_int())))
        .map(|m| ToralMatrix::new(m).expect("block product of unimodular matrices"))
        .collect();
    let gs = GeneratorSet::new(gens, format!("product of ({}) and ({})", gs1.provenance, gs2.provenance))?;
    let mut report = check_all(&gs, cfg);
    report.iv_empirical_only = true;
    report
        .diagnostics
        .push("bunching for a product action is checked by search only; it is not implied by the factors".into());
    Ok((gs, report))
}
