use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 samples, got {0}")]
    InsufficientSamples(usize),
    #[error("phase unwrapping failed between |z| = {0} and |z| = {1}")]
    BranchAmbiguity(f64, f64),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserving,
    Reversing,
}

/// A rigid functional form.
///
/// Real case: `h(x) = α₊ |x|ᵗ` for `x > 0` and `h(x) = α₋ |x|ᵗ` for
/// `x < 0`, with signed coefficients. Complex case:
/// `h(z) = α z |z|^{t−1} exp(i a log|z|)`, with `z̄` in place of `z` when
/// reversing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub t: f64,
    pub alpha_plus: Option<f64>,
    pub alpha_minus: Option<f64>,
    pub alpha: Option<(f64, f64)>,
    pub a: Option<f64>,
    pub orientation: Orientation,
    pub rms: f64,
}

/// Least squares on `log|h| = log|α±| + t log|x|` with one intercept per side.
pub fn fit_power_law_real(samples: &[(f64, f64)]) -> Result<PowerLawFit, FitError> {
    if samples.len() < 3 {
        return Err(FitError::InsufficientSamples(samples.len()));
    }
    let mut sign = [0.0f64; 2];
    for &(x, h) in samples {
        if x == 0.0 || h == 0.0 || !x.is_finite() || !h.is_finite() {
            return Err(FitError::InvalidSample(format!("({x}, {h})")));
        }
        let side = usize::from(x < 0.0);
        let s = h.signum();
        if sign[side] == 0.0 {
            sign[side] = s;
        } else if sign[side] != s {
            return Err(FitError::InvalidSample(format!("h changes sign on one side at x = {x}")));
        }
    }
    // normal equations for (t, c₊, c₋), dropping an unused side
    let sides: Vec<usize> = (0..2).filter(|&s| sign[s] != 0.0).collect();
    let m = 1 + sides.len();
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for &(x, h) in samples {
        let side = usize::from(x < 0.0);
        let col = 1 + sides.iter().position(|&s| s == side).expect("side seen");
        let (lx, lh) = (x.abs().ln(), h.abs().ln());
        let mut row = vec![0.0; m];
        row[0] = lx;
        row[col] = 1.0;
        for i in 0..m {
            atb[i] += row[i] * lh;
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let sol = solve_small(ata, atb).ok_or(FitError::InvalidSample("all |x| equal".into()))?;
    let t = sol[0];
    let mut coef = [None, None];
    for (k, &s) in sides.iter().enumerate() {
        coef[s] = Some(sign[s] * sol[1 + k].exp());
    }
    let rms = (samples
        .iter()
        .map(|&(x, h)| {
            let side = usize::from(x < 0.0);
            let c = sol[1 + sides.iter().position(|&s| s == side).expect("side seen")];
            (h.abs().ln() - c - t * x.abs().ln()).powi(2)
        })
        .sum::<f64>()
        / samples.len() as f64)
        .sqrt();
    let orientation = match (coef[0], coef[1]) {
        (Some(p), _) if p < 0.0 => Orientation::Reversing,
        (None, Some(q)) if q > 0.0 => Orientation::Reversing,
        _ => Orientation::Preserving,
    };
    Ok(PowerLawFit { t, alpha_plus: coef[0], alpha_minus: coef[1], alpha: None, a: None, orientation, rms })
}

fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for c in (0..n).rev() {
        x[c] = (b[c] - (c + 1..n).map(|k| a[c][k] * x[k]).sum::<f64>()) / a[c][c];
    }
    Some(x)
}

/// `max_j |log ρ*(e_j) − t log ρ(e_j)|` over generator pairs `(ρ, ρ*)`.
pub fn exponent_relation_defect(pairs: &[(f64, f64)], t: f64) -> f64 {
    pairs.iter().map(|&(r, rs)| (rs.abs().ln() - t * r.abs().ln()).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSample {
    pub z: (f64, f64),
    pub h: (f64, f64),
}

fn c_abs(z: (f64, f64)) -> f64 {
    z.0.hypot(z.1)
}

fn c_arg(z: (f64, f64)) -> f64 {
    z.1.atan2(z.0)
}

fn wrap(a: f64) -> f64 {
    a - TAU * (a / TAU).round()
}

fn fit_oriented(samples: &[ComplexSample], o: Orientation) -> Result<PowerLawFit, FitError> {
    let s = if o == Orientation::Preserving { 1.0 } else { -1.0 };
    let mut data: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|q| (c_abs(q.z).ln(), c_abs(q.h).ln(), wrap(c_arg(q.h) - s * c_arg(q.z))))
        .collect();
    data.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 1..data.len() {
        let d = wrap(data[i].2 - data[i - 1].2);
        if d.abs() > 0.9 * PI {
            return Err(FitError::BranchAmbiguity(data[i - 1].0.exp(), data[i].0.exp()));
        }
        data[i].2 = data[i - 1].2 + d;
    }
    let lz: Vec<f64> = data.iter().map(|d| d.0).collect();
    let lh: Vec<f64> = data.iter().map(|d| d.1).collect();
    let ph: Vec<f64> = data.iter().map(|d| d.2).collect();
    let (t, log_mod) = super::holder::least_squares(&lz, &lh);
    let (a, phase) = super::holder::least_squares(&lz, &ph);
    let rms = (data
        .iter()
        .map(|&(x, y, p)| (y - log_mod - t * x).powi(2) + (p - phase - a * x).powi(2))
        .sum::<f64>()
        / data.len() as f64)
        .sqrt();
    let m = log_mod.exp();
    Ok(PowerLawFit {
        t,
        alpha_plus: None,
        alpha_minus: None,
        alpha: Some((m * phase.cos(), m * phase.sin())),
        a: Some(a),
        orientation: o,
        rms,
    })
}

/// Fit `(t, a, α)`; with no orientation given both are tried and the
/// smaller residual wins.
pub fn fit_complex_form(samples: &[ComplexSample], orientation: Option<Orientation>) -> Result<PowerLawFit, FitError> {
    if samples.len() < 3 {
        return Err(FitError::InsufficientSamples(samples.len()));
    }
    if let Some(q) = samples.iter().find(|q| c_abs(q.z) == 0.0 || c_abs(q.h) == 0.0) {
        return Err(FitError::InvalidSample(format!("{:?}", q)));
    }
    let mut lz: Vec<f64> = samples.iter().map(|q| c_abs(q.z)).collect();
    lz.sort_by(f64::total_cmp);
    if lz[0] == lz[lz.len() - 1] {
        return Err(FitError::InvalidSample("all |z| equal".into()));
    }
    match orientation {
        Some(o) => fit_oriented(samples, o),
        None => match (fit_oriented(samples, Orientation::Preserving), fit_oriented(samples, Orientation::Reversing)) {
            (Ok(p), Ok(r)) => Ok(if r.rms < p.rms { r } else { p }),
            (Ok(p), Err(_)) => Ok(p),
            (Err(_), Ok(r)) => Ok(r),
            (Err(e), Err(_)) => Err(e),
        },
    }
}
