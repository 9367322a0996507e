use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nalgebra::DMatrix;
use serde::Serialize;

use toral_core::conjugacy::{Displacement, GridDisplacement, PerturbedMap, SpectralFrame};
use toral_core::exact::{periodic_points, ToralMatrix};
use toral_core::hyperbolicity::{
    certify_uniform_contraction, periodic_exponents_at, stable_bundle, transport_seed, CocycleMode, CocycleSpec,
    ExponentReport, Negativity, NegativityConfig,
};

use crate::config::RunConfig;
use crate::io::{emit_json, read, write_csv};

/// Pull-back depth for numerically computed stable bundles.
pub const BUNDLE_DEPTH: usize = 30;

/// Grid-size budget for certificates.
pub const CERTIFICATE_POINTS: usize = 4096;

pub fn read_map(path: &Path) -> Result<PerturbedMap> {
    PerturbedMap::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Largest power-of-two resolution `≤ cap` with at most `budget` grid points.
pub fn certificate_resolution(dim: usize, cap: usize, budget: usize) -> usize {
    let mut r = cap.max(2);
    while r > 2 && r.pow(dim as u32) > budget {
        r /= 2;
    }
    r
}

/// Real basis of the stable subspace of `A`.
pub fn stable_seed(a: &ToralMatrix) -> Result<DMatrix<f64>> {
    let frame = SpectralFrame::new(a)?;
    let cols: Vec<usize> = frame.blocks.iter().filter(|b| b.3).flat_map(|b| b.0..b.0 + b.1).collect();
    Ok(frame.basis.select_columns(&cols))
}

/// An orbit that failed to refine, kept in the report.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitFailure {
    pub period: usize,
    pub seed: Vec<f64>,
    pub error: String,
}

/// Exponents at every orbit of minimal period `≤ bound` of the linear part,
/// seeded at the exact points (transported through `w` when given).
pub fn orbit_exponents(
    f: &PerturbedMap,
    bound: usize,
    w: Option<&GridDisplacement>,
) -> Result<(Vec<ExponentReport>, Vec<OrbitFailure>)> {
    let linear = matches!(f.displacement, Displacement::Zero);
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=bound {
        for orbit in periodic_points(&f.linear, n)?.iter().filter(|o| o.period == n) {
            let p = orbit.points_f64().swap_remove(0);
            let seed = w.map_or_else(|| p.clone(), |w| transport_seed(w, &p));
            match periodic_exponents_at(f, &seed, n, !linear) {
                Ok(r) => reports.push(r),
                Err(e) => failures.push(OrbitFailure { period: n, seed, error: e.to_string() }),
            }
        }
    }
    Ok((reports, failures))
}

pub fn write_orbits_csv(path: &Path, dim: usize, reports: &[ExponentReport]) -> Result<()> {
    let mut header = vec!["period".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    header.extend((0..dim).map(|i| format!("exponent{i}")));
    header.push("max_gap".into());
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut row = vec![r.period.to_string()];
            row.extend(r.points[0].iter().map(|v| format!("{v:.17e}")));
            row.extend(r.exponents.iter().map(|v| format!("{v:.17e}")));
            row.push(r.max_gap().map_or(String::new(), |g| format!("{g:.6e}")));
            row
        })
        .collect();
    write_csv(path, &header, &rows)
}

#[derive(Serialize)]
struct CertifyReport {
    config: RunConfig,
    input: PathBuf,
    map: PerturbedMap,
    stable_dimension: usize,
    invariance_defect: f64,
    result: Negativity,
    orbits: usize,
    orbit_failures: Vec<OrbitFailure>,
}

/// Uniform contraction of the stable bundle of a perturbed automorphism.
pub fn certify(cfg: &RunConfig, input: PathBuf) -> Result<()> {
    let f = read_map(&input)?;
    let seed = stable_seed(&f.linear)?;
    let linear = matches!(f.displacement, Displacement::Zero);
    let fixed = seed.clone().qr().q();
    let bundle = |x: &[f64]| if linear { fixed.clone() } else { stable_bundle(&f, x, &seed, BUNDLE_DEPTH) };
    let spec = CocycleSpec { map: &f, bundle: &bundle, mode: CocycleMode::Contraction };
    let resolution = certificate_resolution(f.linear.dim(), cfg.resolution, CERTIFICATE_POINTS);
    let ncfg = NegativityConfig { resolution, ..Default::default() };
    let invariance_defect = spec.invariance_defect(ncfg.resolution);
    let outcome = certify_uniform_contraction(&spec, &ncfg, cfg.verify_tol)?;

    let (reports, orbit_failures) = orbit_exponents(&f, cfg.period_bound, None)?;
    if let Some(path) = &cfg.csv {
        write_orbits_csv(path, f.linear.dim(), &reports)?;
    }
    let report = CertifyReport {
        config: cfg.clone(),
        input,
        stable_dimension: seed.ncols(),
        invariance_defect,
        result: outcome,
        orbits: reports.len(),
        orbit_failures,
        map: f.clone(),
    };
    emit_json(&report, cfg.output.as_deref())
}
