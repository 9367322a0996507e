use std::path::PathBuf;

use anyhow::{bail, Result};
use serde::Serialize;

use toral_core::centralizer::GeneratorSet;
use toral_core::conjugacy::{
    check_splitting_grid, solve_franks_manning, verify_equivariance, BlockFrame, Displacement, EquivarianceReport,
    HolderEstimate, PerturbedMap, SpectralFrame, SplittingReport,
};
use toral_core::hyperbolicity::{
    bunching_at_periodic, certify_uniform_contraction, linear_exponents, stable_bundle, BunchingVerdict, CocycleMode,
    CocycleSpec, Negativity, NegativityConfig,
};
use toral_core::hypothesis::theorem_1_1_check;
use toral_core::lyapunov::{coarse_spaces, default_tolerance, exponent_functionals};

use crate::analyze::{acting_group, HypothesisOutcome};
use crate::certify::{
    certificate_resolution, orbit_exponents, read_map, stable_seed, write_orbits_csv, OrbitFailure, BUNDLE_DEPTH,
    CERTIFICATE_POINTS,
};
use crate::config::RunConfig;
use crate::io::{emit_json, read_matrix};

/// Random samples for the block-coupling check.
const SPLITTING_SAMPLES: usize = 200;

#[derive(Serialize)]
struct ExponentSummary {
    orbits: usize,
    max_gap: f64,
    worst_orbit: Option<Vec<f64>>,
    failures: Vec<OrbitFailure>,
    linear: Vec<f64>,
}

#[derive(Serialize)]
struct Signatures {
    exponents_match: bool,
    equivariant: bool,
    holder_regular: bool,
    stable_bundle_certified: bool,
    bunching: bool,
    /// Informational: couplings are measured in fixed linear frames.
    splitting_confirmed: Option<bool>,
    rigid: bool,
}

#[derive(Serialize)]
struct RigidityReport {
    config: RunConfig,
    matrix_file: PathBuf,
    perturbation_file: PathBuf,
    hypotheses: HypothesisOutcome,
    action: GeneratorSet,
    anosov_generator: usize,
    residual: f64,
    equation_residual: f64,
    iterations: usize,
    equivariance: EquivarianceReport,
    holder: HolderEstimate,
    splitting: Option<SplittingReport>,
    exponents: ExponentSummary,
    bunching: BunchingVerdict,
    stable_bundle: Negativity,
    signatures: Signatures,
    diagnostics: Vec<String>,
}

/// End-to-end comparison of a perturbed action against its linearization.
pub fn rigidity(cfg: &RunConfig, matrix_file: PathBuf, perturbation_file: PathBuf) -> Result<()> {
    let a = read_matrix(&matrix_file)?;
    let pert = read_map(&perturbation_file)?;
    if pert.linear.dim() != a.dim() {
        bail!("perturbation acts on dimension {}, matrix has dimension {}", pert.linear.dim(), a.dim());
    }
    let mut diagnostics = Vec::new();
    let (_, hypotheses) = HypothesisOutcome::from_check(theorem_1_1_check(&a, &cfg.check()))?;

    let (action, maps) = match &pert.displacement {
        Displacement::Zero | Displacement::Conjugated { .. } => {
            let gs = acting_group(cfg, &a)?;
            let maps: Vec<PerturbedMap> =
                gs.generators().iter().map(|g| PerturbedMap::new(g.clone(), pert.displacement.clone())).collect();
            (gs, maps)
        }
        _ => {
            diagnostics.push("displacement is not a common conjugation; only the perturbed map itself is tested".into());
            (GeneratorSet::new(vec![pert.linear.clone()], "perturbed map")?, vec![pert.clone()])
        }
    };
    let Some(anosov) = action.generators().iter().position(|g| SpectralFrame::new(g).is_ok()) else {
        bail!("no hyperbolic generator in the action");
    };
    let f = &maps[anosov];
    let linear_g = &action.generators()[anosov];

    let sol = solve_franks_manning(f, &cfg.solver())?;
    let equivariance = verify_equivariance(&sol.w, &action, &maps, anosov, cfg.verify_tol)?;

    let splitting = match exponent_functionals(&action, cfg.precision)
        .map_err(anyhow::Error::from)
        .and_then(|fs| Ok(coarse_spaces(&fs, default_tolerance(cfg.precision))?))
    {
        Ok(cs) => {
            let frame = BlockFrame::from_coarse(&cs);
            Some(check_splitting_grid(&sol.w, &frame, &frame, SPLITTING_SAMPLES, cfg.verify_tol.sqrt()))
        }
        Err(e) => {
            diagnostics.push(format!("coarse splitting unavailable: {e}"));
            None
        }
    };

    let linear = linear_exponents(linear_g);
    let (reports, failures) = orbit_exponents(f, cfg.period_bound, Some(&sol.w))?;
    let reports: Vec<_> = reports.into_iter().map(|r| r.compare_with(&linear)).collect();
    if let Some(path) = &cfg.csv {
        write_orbits_csv(path, a.dim(), &reports)?;
    }
    let worst = reports.iter().max_by(|x, y| x.max_gap().unwrap_or(0.0).total_cmp(&y.max_gap().unwrap_or(0.0)));
    let exponents = ExponentSummary {
        orbits: reports.len(),
        max_gap: worst.and_then(|r| r.max_gap()).unwrap_or(0.0),
        worst_orbit: worst.map(|r| r.points[0].clone()),
        failures,
        linear: linear.clone(),
    };

    let in_first: Vec<bool> = linear.iter().map(|e| *e < 0.0).collect();
    let k = if matches!(f.displacement, Displacement::Grid { .. }) { 1.0 } else { f64::INFINITY };
    let bunching = bunching_at_periodic(&reports, &in_first, 1.0, k);

    let seed = stable_seed(linear_g)?;
    let bundle = |x: &[f64]| stable_bundle(f, x, &seed, BUNDLE_DEPTH);
    let spec = CocycleSpec { map: f, bundle: &bundle, mode: CocycleMode::Contraction };
    let resolution = certificate_resolution(a.dim(), cfg.resolution, CERTIFICATE_POINTS);
    let ncfg = NegativityConfig { resolution, spot_checks: 200, ..Default::default() };
    let stable = certify_uniform_contraction(&spec, &ncfg, cfg.verify_tol)?;

    let max_residual = equivariance.residuals.iter().copied().fold(0.0, f64::max);
    let exponents_match = exponents.failures.is_empty() && exponents.max_gap < cfg.verify_tol;
    // the other generators are conjugated as accurately as the grid allows for the Anosov one
    let equivariant = equivariance.commuting && max_residual <= 10.0 * sol.equation_residual.max(cfg.verify_tol);
    let holder_regular = sol.holder.degenerate || sol.holder.theta >= 0.9;
    let signatures = Signatures {
        exponents_match,
        equivariant,
        holder_regular,
        stable_bundle_certified: stable.certificate().is_some(),
        bunching: bunching.pass,
        splitting_confirmed: splitting.as_ref().map(|s| s.confirmed),
        rigid: exponents_match && equivariant && holder_regular,
    };
    let report = RigidityReport {
        config: cfg.clone(),
        matrix_file,
        perturbation_file,
        hypotheses,
        anosov_generator: anosov,
        residual: sol.residual,
        equation_residual: sol.equation_residual,
        iterations: sol.iterations,
        equivariance,
        holder: sol.holder.clone(),
        splitting,
        exponents,
        bunching,
        stable_bundle: stable,
        signatures,
        diagnostics,
        action,
    };
    emit_json(&report, cfg.output.as_deref())
}
