use std::path::PathBuf;

use anyhow::{ensure, Result};
use clap::Args;
use serde::Serialize;

use toral_core::centralizer::UnitSearchConfig;
use toral_core::conjugacy::SolverConfig;
use toral_core::hypothesis::CheckConfig;

/// Settings shared by every subcommand. Embedded verbatim in each report.
#[derive(Args, Clone, Debug, Serialize)]
pub struct RunConfig {
    /// Working precision in bits for exact-spectrum and relation searches.
    #[arg(long, global = true, env = "TORAL_PRECISION", default_value_t = 192)]
    pub precision: usize,

    /// Grid points per axis; must be a power of two.
    #[arg(long, global = true, default_value_t = 128)]
    pub resolution: usize,

    /// Stopping tolerance of the conjugacy fixed-point iteration.
    #[arg(long, global = true, default_value_t = 1e-11)]
    pub tol: f64,

    #[arg(long, global = true, default_value_t = 500)]
    pub max_iter: usize,

    /// Tolerance for verification predicates (exponent gaps, invariance).
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub verify_tol: f64,

    /// Largest acceptable rms of a power-law fit.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub fit_tol: f64,

    /// Coefficient box for the unit search.
    #[arg(long, global = true, default_value_t = 3)]
    pub coefficient_bound: i64,

    /// Lattice box `|mⱼ| ≤ B` for the bunching search.
    #[arg(long, global = true, default_value_t = 20)]
    pub lattice_box: i64,

    /// Height bound for integer relation searches.
    #[arg(long, global = true, default_value_t = 1e6)]
    pub relation_height: f64,

    /// Largest period for periodic-orbit comparisons.
    #[arg(long, global = true, default_value_t = 6)]
    pub period_bound: usize,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// CSV side output (chambers, orbits), where the subcommand has one.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.precision >= 53, "precision must be at least 53 bits, got {}", self.precision);
        ensure!(
            self.resolution >= 2 && self.resolution.is_power_of_two(),
            "resolution must be a power of two, got {}",
            self.resolution
        );
        for (name, v) in [
            ("tol", self.tol),
            ("verify-tol", self.verify_tol),
            ("fit-tol", self.fit_tol),
            ("relation-height", self.relation_height),
        ] {
            ensure!(v.is_finite() && v > 0.0, "{name} must be positive, got {v}");
        }
        ensure!(self.max_iter > 0, "max-iter must be positive");
        ensure!(self.coefficient_bound > 0 && self.lattice_box > 0, "search bounds must be positive");
        ensure!(self.period_bound > 0, "period-bound must be positive");
        Ok(())
    }

    pub fn unit_search(&self) -> UnitSearchConfig {
        UnitSearchConfig { coefficient_bound: self.coefficient_bound, precision_bits: self.precision, ..Default::default() }
    }

    pub fn check(&self) -> CheckConfig {
        CheckConfig {
            unit_search: self.unit_search(),
            precision_bits: self.precision,
            relation_height: self.relation_height,
            box_radius: self.lattice_box,
            ..Default::default()
        }
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig { resolution: self.resolution, tol: self.tol, max_iter: self.max_iter }
    }
}
