use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{norm, GridDisplacement};
use crate::lyapunov::CoarseSplitting;

/// A basis of ℝᴺ partitioned into blocks of consecutive columns.
#[derive(Clone, Debug)]
pub struct BlockFrame {
    pub basis: DMatrix<f64>,
    pub blocks: Vec<Range<usize>>,
}

impl BlockFrame {
    pub fn standard(n: usize, sizes: &[usize]) -> Self {
        let mut blocks = Vec::new();
        let mut s = 0;
        for &k in sizes {
            blocks.push(s..s + k);
            s += k;
        }
        assert_eq!(s, n, "block sizes must sum to the dimension");
        BlockFrame { basis: DMatrix::identity(n, n), blocks }
    }

    /// Columns are the eigenspace bases of the coarse classes, in class order.
    pub fn from_coarse(cs: &CoarseSplitting) -> Self {
        let cols: Vec<&Vec<f64>> = cs.eigenspaces.iter().flatten().collect();
        let n = cols.len();
        let basis = DMatrix::from_fn(n, n, |r, c| cols[c][r]);
        let sizes: Vec<usize> = cs.eigenspaces.iter().map(|e| e.len()).collect();
        let mut f = Self::standard(n, &sizes);
        f.basis = basis;
        f
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplittingReport {
    /// `couplings[i][j]`: sup of the divided differences of output block `i`
    /// along input block `j`.
    pub couplings: Vec<Vec<f64>>,
    pub max_off_diagonal: f64,
    pub confirmed: bool,
}

/// Central divided differences of `h` between the block coordinates of two
/// frames, at `samples` given in input-frame coordinates.
pub fn check_splitting(
    h: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    frame_in: &BlockFrame,
    frame_out: &BlockFrame,
    samples: &[Vec<f64>],
    step: f64,
    tol: f64,
) -> SplittingReport {
    let out_inv = frame_out.basis.clone().try_inverse().expect("output frame must be a basis");
    let coords = |y: &[f64]| -> Vec<f64> {
        let x = &frame_in.basis * DVector::from_column_slice(y);
        let hx = h(x.as_slice());
        (&out_inv * DVector::from_vec(hx)).as_slice().to_vec()
    };
    let (bi, bo) = (frame_in.blocks.len(), frame_out.blocks.len());
    let couplings = samples
        .par_iter()
        .map(|y| {
            let mut c = vec![vec![0.0; bi]; bo];
            for (j, rj) in frame_in.blocks.iter().enumerate() {
                for col in rj.clone() {
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp[col] += step;
                    ym[col] -= step;
                    let (zp, zm) = (coords(&yp), coords(&ym));
                    for (i, ri) in frame_out.blocks.iter().enumerate() {
                        let d: Vec<f64> = ri.clone().map(|r| (zp[r] - zm[r]) / (2.0 * step)).collect();
                        c[i][j] = f64::max(c[i][j], norm(&d));
                    }
                }
            }
            c
        })
        .reduce(
            || vec![vec![0.0; bi]; bo],
            |a, b| a.iter().zip(&b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.max(*y)).collect()).collect(),
        );
    let max_off_diagonal = (0..bo)
        .flat_map(|i| (0..bi).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| couplings[i][j])
        .fold(0.0, f64::max);
    SplittingReport { couplings, max_off_diagonal, confirmed: max_off_diagonal < tol }
}

/// [`check_splitting`] for `h = id + w`, sampled at `count` seeded random
/// points with a step of two grid cells.
pub fn check_splitting_grid(
    w: &GridDisplacement,
    frame_in: &BlockFrame,
    frame_out: &BlockFrame,
    count: usize,
    tol: f64,
) -> SplittingReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let samples: Vec<Vec<f64>> = (0..count).map(|_| (0..w.n).map(|_| rng.gen::<f64>()).collect()).collect();
    let h = |x: &[f64]| -> Vec<f64> { x.iter().zip(w.eval(x)).map(|(a, b)| a + b).collect() };
    check_splitting(&h, frame_in, frame_out, &samples, 2.0 / w.resolution as f64, tol)
}
