use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{dist, GridDisplacement};

/// Moduli of continuity below this are treated as round-off.
const NOISE_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// Estimated exponent, clipped to `(0, 1]`.
    pub theta: f64,
    /// Dyadic scales `s`, distances `2⁻ˢ`.
    pub scales: Vec<u32>,
    /// `ω(2⁻ˢ)` per scale.
    pub omegas: Vec<f64>,
    /// RMS residual of the log-log regression.
    pub regression_residual: f64,
    /// Set when the data are below the noise floor; `theta` is then 1.
    pub degenerate: bool,
}

/// Grid modulus of continuity at offset `k` grid steps along each axis.
fn modulus(g: &GridDisplacement, k: i64) -> f64 {
    let n = g.n;
    (0..g.len())
        .into_par_iter()
        .map(|p| {
            let mut idx: Vec<i64> = Vec::with_capacity(n);
            let mut q = p;
            for _ in 0..n {
                idx.push((q % g.resolution) as i64);
                q /= g.resolution;
            }
            let v = g.value(p);
            (0..n)
                .map(|a| {
                    let mut j = idx.clone();
                    j[a] += k;
                    dist(v, g.at_index(&j))
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Least-squares slope of `log ω` against `log δ` over dyadic scales.
///
/// Default scales are the six finest dyadic ones for resolution `2ʳ`,
/// `r−5 ..= r`, but never coarser than `2⁻³` so that periodicity does not
/// flatten the modulus.
pub fn estimate_holder(g: &GridDisplacement, scales: Option<&[u32]>) -> HolderEstimate {
    let r = g.resolution.max(1).ilog2();
    let scales: Vec<u32> = match scales {
        Some(s) => s.iter().copied().filter(|&s| s <= r && s >= 1).collect(),
        None => (r.saturating_sub(5).max(3)..=r).collect(),
    };
    let omegas: Vec<f64> = scales.iter().map(|&s| modulus(g, 1i64 << (r - s))).collect();
    if scales.len() < 2 || omegas.iter().any(|&w| w < NOISE_FLOOR) {
        return HolderEstimate { theta: 1.0, scales, omegas, regression_residual: 0.0, degenerate: true };
    }
    let xs: Vec<f64> = scales.iter().map(|&s| -(s as f64) * std::f64::consts::LN_2).collect();
    let ys: Vec<f64> = omegas.iter().map(|w| w.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    HolderEstimate { theta: slope.clamp(f64::MIN_POSITIVE, 1.0), scales, omegas, regression_residual: rms, degenerate: false }
}

pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_data_has_exponent_one() {
        let g = GridDisplacement::from_fn(1, 4096, |x| vec![0.3 * (2.0 * PI * x[0]).sin()]);
        let h = estimate_holder(&g, None);
        assert!(!h.degenerate);
        assert!(h.scales.len() >= 4);
        assert!((h.theta - 1.0).abs() < 0.02, "{h:?}");
    }

    #[test]
    fn coarse_grid_smooth_data() {
        let g = GridDisplacement::from_fn(2, 32, |x| vec![0.01 * (2.0 * PI * x[0]).sin(), 0.02 * (2.0 * PI * (x[0] + x[1])).cos()]);
        let h = estimate_holder(&g, None);
        assert_eq!(h.scales, vec![3, 4, 5]);
        assert!(h.theta > 0.95, "{h:?}");
    }

    #[test]
    fn square_root_cusp() {
        // ω(δ) = sin(πδ)^½ exactly, attained at the zero of sin
        let g = GridDisplacement::from_fn(1, 1 << 14, |x| vec![(PI * x[0]).sin().abs().sqrt()]);
        let h = estimate_holder(&g, None);
        assert!((h.theta - 0.5).abs() < 0.05, "{h:?}");
    }

    #[test]
    fn constant_data_is_degenerate() {
        let g = GridDisplacement::from_fn(2, 256, |_| vec![0.25, -1.0]);
        let h = estimate_holder(&g, None);
        assert!(h.degenerate);
        assert_eq!(h.theta, 1.0);
    }
}
