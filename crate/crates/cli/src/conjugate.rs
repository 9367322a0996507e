use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use toral_core::conjugacy::{solve_franks_manning, HolderEstimate, PerturbedMap};

use crate::certify::read_map;
use crate::config::RunConfig;
use crate::io::emit_json;

#[derive(Serialize)]
struct GridLayout {
    path: PathBuf,
    dim: usize,
    resolution: usize,
    /// Little-endian `f64`, `dim` values per grid point, the first axis
    /// varying fastest.
    encoding: &'static str,
    bytes: usize,
}

#[derive(Serialize)]
struct ConjugateReport {
    config: RunConfig,
    input: PathBuf,
    epsilon: f64,
    map: PerturbedMap,
    grid: GridLayout,
    residual: f64,
    equation_residual: f64,
    iterations: usize,
    contraction_bound: f64,
    observed_ratio: f64,
    sup_norm: f64,
    holder: HolderEstimate,
}

/// Solve for `h = id + w` with `h ∘ f = A ∘ h`, dump `w` as raw samples and
/// report the metadata.
pub fn conjugate(cfg: &RunConfig, input: PathBuf, grid: PathBuf, epsilon: f64) -> Result<()> {
    let pm = read_map(&input)?.scaled(epsilon);
    let r = solve_franks_manning(&pm, &cfg.solver())?;
    let bytes = r.w.to_bytes();
    fs::write(&grid, &bytes).with_context(|| format!("writing {}", grid.display()))?;
    let report = ConjugateReport {
        config: cfg.clone(),
        input,
        epsilon,
        grid: GridLayout {
            path: grid,
            dim: r.w.n,
            resolution: r.w.resolution,
            encoding: "f64-le, point-major",
            bytes: bytes.len(),
        },
        residual: r.residual,
        equation_residual: r.equation_residual,
        iterations: r.iterations,
        contraction_bound: r.contraction_bound,
        observed_ratio: r.observed_ratio(),
        sup_norm: r.w.sup_norm(),
        holder: r.holder.clone(),
        map: pm,
    };
    emit_json(&report, cfg.output.as_deref())
}
