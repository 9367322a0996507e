use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use toral_core::conjugacy::{
    exponent_relation_defect, fit_complex_form, fit_power_law_real, ComplexSample, Orientation, PowerLawFit,
};

use crate::config::RunConfig;
use crate::io::emit_json;

#[derive(Deserialize)]
struct RealRow {
    x: f64,
    h: f64,
}

#[derive(Deserialize)]
struct ComplexRow {
    z_re: f64,
    z_im: f64,
    h_re: f64,
    h_im: f64,
}

/// `(ρ, ρ*)` generator pair given as `rho:rho_star`.
pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `rho:rho_star`, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

#[derive(Serialize)]
struct FitReport {
    config: RunConfig,
    input: PathBuf,
    samples: usize,
    fit: PowerLawFit,
    within_tolerance: bool,
    relation_defect: Option<f64>,
}

fn rows<T: for<'de> Deserialize<'de>>(input: &PathBuf) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(input).with_context(|| format!("reading {}", input.display()))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.with_context(|| format!("{}: record {}", input.display(), i + 1)))
        .collect()
}

/// Rigid power-law fit of sampled conjugacy values. Real samples have
/// columns `x,h`; complex samples `z_re,z_im,h_re,h_im`.
pub fn fit(
    cfg: &RunConfig,
    input: PathBuf,
    complex: bool,
    orientation: Option<Orientation>,
    pairs: Vec<(f64, f64)>,
) -> Result<()> {
    let (samples, fit) = if complex {
        let data: Vec<ComplexSample> = rows::<ComplexRow>(&input)?
            .into_iter()
            .map(|r| ComplexSample { z: (r.z_re, r.z_im), h: (r.h_re, r.h_im) })
            .collect();
        (data.len(), fit_complex_form(&data, orientation)?)
    } else {
        if orientation.is_some() {
            bail!("--orientation applies to complex samples only");
        }
        let data: Vec<(f64, f64)> = rows::<RealRow>(&input)?.into_iter().map(|r| (r.x, r.h)).collect();
        (data.len(), fit_power_law_real(&data)?)
    };
    let relation_defect = (!pairs.is_empty()).then(|| exponent_relation_defect(&pairs, fit.t));
    let report = FitReport {
        config: cfg.clone(),
        input,
        samples,
        within_tolerance: fit.rms < cfg.fit_tol && relation_defect.is_none_or(|d| d < cfg.fit_tol),
        fit,
        relation_defect,
    };
    emit_json(&report, cfg.output.as_deref())
}
