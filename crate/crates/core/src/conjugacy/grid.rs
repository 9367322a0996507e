use serde::{Deserialize, Serialize};

/// How off-grid values are reconstructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    Multilinear,
}

/// A ℤᴺ-periodic map `𝕋ᴺ → ℝᴺ` sampled on the regular grid `(i/R)`.
///
/// Samples are stored point-major: the vector at grid index `p` occupies
/// `samples[p*n .. (p+1)*n]`, and `p = Σ iₐ Rᵃ` with axis 0 fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDisplacement {
    pub n: usize,
    pub resolution: usize,
    pub samples: Vec<f64>,
    pub interpolation: Interpolation,
}

impl GridDisplacement {
    pub fn zeros(n: usize, resolution: usize) -> Self {
        GridDisplacement {
            n,
            resolution,
            samples: vec![0.0; resolution.pow(n as u32) * n],
            interpolation: Interpolation::Multilinear,
        }
    }

    pub fn from_fn(n: usize, resolution: usize, f: impl Fn(&[f64]) -> Vec<f64> + Sync) -> Self {
        use rayon::prelude::*;
        let count = resolution.pow(n as u32);
        let samples: Vec<f64> = (0..count).into_par_iter().flat_map_iter(|p| f(&point(n, resolution, p))).collect();
        GridDisplacement { n, resolution, samples, interpolation: Interpolation::Multilinear }
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn point(&self, p: usize) -> Vec<f64> {
        point(self.n, self.resolution, p)
    }

    pub fn value(&self, p: usize) -> &[f64] {
        &self.samples[p * self.n..(p + 1) * self.n]
    }

    pub fn value_mut(&mut self, p: usize) -> &mut [f64] {
        &mut self.samples[p * self.n..(p + 1) * self.n]
    }

    /// Value at the grid point with integer coordinates `idx` (wrapped).
    pub fn at_index(&self, idx: &[i64]) -> &[f64] {
        let r = self.resolution as i64;
        let mut p = 0usize;
        for a in (0..self.n).rev() {
            p = p * self.resolution + idx[a].rem_euclid(r) as usize;
        }
        self.value(p)
    }

    /// Multilinear interpolation with periodic wrap.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let r = self.resolution as f64;
        let mut base = vec![0i64; n];
        let mut frac = vec![0.0; n];
        for a in 0..n {
            let s = x[a].rem_euclid(1.0) * r;
            let fl = s.floor();
            base[a] = fl as i64;
            frac[a] = s - fl;
        }
        let mut out = vec![0.0; n];
        let mut idx = vec![0i64; n];
        for corner in 0..1usize << n {
            let mut w = 1.0;
            for a in 0..n {
                let bit = corner >> a & 1;
                idx[a] = base[a] + bit as i64;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.at_index(&idx)) {
                *o += w * v;
            }
        }
        out
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.chunks(self.n).map(norm).fold(0.0, f64::max)
    }

    /// Sup over grid points of the Euclidean distance to `other`.
    pub fn distance(&self, other: &GridDisplacement) -> f64 {
        self.samples.chunks(self.n).zip(other.samples.chunks(self.n)).map(|(a, b)| dist(a, b)).fold(0.0, f64::max)
    }

    /// Little-endian `f64` dump of the samples.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.samples.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn from_bytes(n: usize, resolution: usize, bytes: &[u8]) -> Option<Self> {
        let count = resolution.pow(n as u32) * n;
        if bytes.len() != count * 8 {
            return None;
        }
        let samples = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
        Some(GridDisplacement { n, resolution, samples, interpolation: Interpolation::Multilinear })
    }
}

pub(crate) fn point(n: usize, resolution: usize, mut p: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let i = p % resolution;
            p /= resolution;
            i as f64 / resolution as f64
        })
        .collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance on 𝕋ᴺ between two lifts.
pub fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            let d = d - d.round();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}
