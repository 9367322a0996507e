use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use toral_core::centralizer::{dirichlet_rank, is_symplectic, signature, GeneratorSet};
use toral_core::exact::{is_irreducible_over_z, Irreducibility, IntPolynomial, ToralMatrix};
use toral_core::hypothesis::{check_all, theorem_1_1_check, theorem_2_2_check, HypothesisError, HypothesisReport};
use toral_core::lyapunov::{
    coarse_spaces, default_tolerance, exponent_functionals, stable_unstable, weyl_chambers, LyapunovFunctional,
    WeylChamber, DEFAULT_MARGIN,
};

use crate::config::RunConfig;
use crate::io::{emit_json, join, read_input, read_matrix, write_csv, Input};

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HypothesisOutcome {
    Checked { all_pass: bool, report: Box<HypothesisReport> },
    Violation { message: String },
}

impl HypothesisOutcome {
    pub fn from_check(r: Result<(GeneratorSet, HypothesisReport), HypothesisError>) -> Result<(Option<GeneratorSet>, Self)> {
        match r {
            Ok((gs, report)) => Ok((Some(gs), HypothesisOutcome::Checked { all_pass: report.all_pass(), report: Box::new(report) })),
            Err(HypothesisError::HypothesisViolation(message)) => Ok((None, HypothesisOutcome::Violation { message })),
            Err(e) => Err(e.into()),
        }
    }
}

#[derive(Serialize)]
pub struct Geometry {
    pub functionals: Vec<LyapunovFunctional>,
    pub coarse_classes: Vec<Vec<usize>>,
    pub chambers: Vec<WeylChamber>,
}

/// Functionals, coarse classes and Weyl chambers of an action.
pub fn geometry(gs: &GeneratorSet, precision: usize) -> Result<Geometry> {
    let functionals = exponent_functionals(gs, precision)?;
    let cs = coarse_spaces(&functionals, default_tolerance(precision))?;
    let chambers = weyl_chambers(&cs, DEFAULT_MARGIN)?;
    Ok(Geometry { functionals, coarse_classes: cs.groups.clone(), chambers })
}

#[derive(Serialize)]
struct AnalyzeReport {
    config: RunConfig,
    input: PathBuf,
    matrix: ToralMatrix,
    det: i8,
    char_poly: String,
    char_poly_coefficients: IntPolynomial,
    irreducibility: Irreducibility,
    signature: Option<(usize, usize)>,
    dirichlet_rank: Option<usize>,
    symplectic: bool,
    units: Option<GeneratorSet>,
    geometry: Option<Geometry>,
    hypotheses: HypothesisOutcome,
    symplectic_hypotheses: Option<HypothesisOutcome>,
    diagnostics: Vec<String>,
}

pub fn analyze(cfg: &RunConfig, input: PathBuf) -> Result<()> {
    let a = read_matrix(&input)?;
    let mut diagnostics = Vec::new();
    let cp = a.char_poly();
    let irreducibility = is_irreducible_over_z(&cp);
    let irreducible = irreducibility.is_irreducible();
    let (sig, rank) = if irreducible { (Some(signature(&a)?), Some(dirichlet_rank(&a)?)) } else { (None, None) };
    let symplectic = a.dim() % 2 == 0 && is_symplectic(&a)?;

    let (units, hypotheses) = HypothesisOutcome::from_check(theorem_1_1_check(&a, &cfg.check()))?;
    let symplectic_hypotheses = if symplectic && a.dim() >= 4 {
        match HypothesisOutcome::from_check(theorem_2_2_check(&a, &cfg.check())) {
            Ok((_, o)) => Some(o),
            Err(e) => {
                diagnostics.push(format!("symplectic front end: {e}"));
                None
            }
        }
    } else {
        None
    };

    // geometry of the located units, or of the cyclic action when there are none
    let acting = match &units {
        Some(gs) => Some(gs.clone()),
        None if irreducible => Some(GeneratorSet::new(vec![a.clone()], "cyclic action of the input")?),
        None => None,
    };
    let geometry = match acting.as_ref().map(|gs| geometry(gs, cfg.precision)) {
        Some(Ok(g)) => Some(g),
        Some(Err(e)) => {
            diagnostics.push(format!("Lyapunov geometry unavailable: {e}"));
            None
        }
        None => None,
    };
    if let (Some(g), Some(path)) = (&geometry, &cfg.csv) {
        write_chambers_csv(path, &g.chambers)?;
    }

    let report = AnalyzeReport {
        config: cfg.clone(),
        input,
        det: a.det(),
        char_poly: cp.pretty(),
        char_poly_coefficients: cp,
        irreducibility,
        signature: sig,
        dirichlet_rank: rank,
        symplectic,
        units,
        geometry,
        hypotheses,
        symplectic_hypotheses,
        diagnostics,
        matrix: a,
    };
    emit_json(&report, cfg.output.as_deref())
}

#[derive(Serialize)]
struct CheckReport {
    config: RunConfig,
    input: PathBuf,
    generators: Option<GeneratorSet>,
    hypotheses: HypothesisOutcome,
}

/// Hypothesis check of a matrix (via its units) or of a given generator set.
pub fn check(cfg: &RunConfig, input: PathBuf) -> Result<()> {
    let (generators, hypotheses) = match read_input(&input)? {
        Input::Matrix(a) => HypothesisOutcome::from_check(theorem_1_1_check(&a, &cfg.check()))?,
        Input::Set(gs) => {
            let report = check_all(&gs, &cfg.check());
            (Some(gs), HypothesisOutcome::Checked { all_pass: report.all_pass(), report: Box::new(report) })
        }
    };
    emit_json(&CheckReport { config: cfg.clone(), input, generators, hypotheses }, cfg.output.as_deref())
}

pub fn write_chambers_csv(path: &std::path::Path, chambers: &[WeylChamber]) -> Result<()> {
    let header = ["chamber", "signs", "representative", "walls", "stable_classes", "unstable_classes"].map(String::from);
    let rows: Vec<Vec<String>> = chambers
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (s, u) = stable_unstable(c);
            vec![i.to_string(), join(&c.signs), join(&c.representative), join(&c.walls), join(&s), join(&u)]
        })
        .collect();
    write_csv(path, &header, &rows)
}

#[derive(Serialize)]
struct ChambersReport {
    config: RunConfig,
    input: PathBuf,
    generators: GeneratorSet,
    geometry: Geometry,
}

/// Weyl chambers of a generator set, or of the units of a matrix (the
/// matrix alone when it has rank one).
pub fn chambers(cfg: &RunConfig, input: PathBuf) -> Result<()> {
    let generators = match read_input(&input)? {
        Input::Set(gs) => gs,
        Input::Matrix(a) => acting_group(cfg, &a)?,
    };
    let geometry = geometry(&generators, cfg.precision)?;
    if let Some(path) = &cfg.csv {
        write_chambers_csv(path, &geometry.chambers)?;
    }
    emit_json(&ChambersReport { config: cfg.clone(), input, generators, geometry }, cfg.output.as_deref())
}

/// Units of `ℤ[A]` when the rank is at least two, otherwise `{A}`.
pub fn acting_group(cfg: &RunConfig, a: &ToralMatrix) -> Result<GeneratorSet> {
    if dirichlet_rank(a)? >= 2 {
        Ok(toral_core::centralizer::find_units(a, &cfg.unit_search())?)
    } else {
        Ok(GeneratorSet::new(vec![a.clone()], "cyclic action of the input")?)
    }
}
