//! Periodic boxes, wave-vector bookkeeping and n-dimensional FFTs.
//!
//! Grid points sit at `x_j = j·L/N` for `j = 0..N`, stored row-major with the
//! last axis contiguous. Wave numbers follow the signed FFT ordering
//! `n ∈ [-N/2, N/2)`, `k = 2π n / L`. Fields are expected to be band-limited
//! strictly below the Nyquist index; content at `n = -N/2` has no partner
//! `+N/2` and breaks real-valuedness under odd derivatives.

use std::sync::Arc;

use nalgebra::SVector;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Real3, Result, C64, ZERO};

/// Rectangular periodic box with a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    lengths: [f64; 3],
    points: [usize; 3],
}

impl BoxSpec {
    pub fn new(lengths: [f64; 3], points: [usize; 3]) -> Result<Self> {
        for (axis, &l) in lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidBox(format!(
                    "length along axis {axis} must be positive, got {l}"
                )));
            }
        }
        for (axis, &n) in points.iter().enumerate() {
            if n < 2 || n % 2 != 0 {
                return Err(Error::InvalidBox(format!(
                    "grid points along axis {axis} must be a positive even integer, got {n}"
                )));
            }
        }
        Ok(Self { lengths, points })
    }

    pub fn cubic(length: f64, points: usize) -> Result<Self> {
        Self::new([length; 3], [points; 3])
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn points(&self) -> [usize; 3] {
        self.points
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.len() as f64
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        (c[0] * self.points[1] + c[1]) * self.points[2] + c[2]
    }

    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let [_, ny, nz] = self.points;
        [idx / (ny * nz), (idx / nz) % ny, idx % nz]
    }

    pub fn position(&self, idx: usize) -> Real3 {
        let c = self.coords(idx);
        Real3::from_fn(|a, _| c[a] as f64 * self.lengths[a] / self.points[a] as f64)
    }

    /// Position relative to the box center, in `[-L/2, L/2)`.
    pub fn centered_position(&self, idx: usize) -> Real3 {
        let c = self.coords(idx);
        Real3::from_fn(|a, _| {
            (c[a] as f64 / self.points[a] as f64 - 0.5) * self.lengths[a]
        })
    }

    /// Signed FFT mode number of a grid index.
    pub fn mode_number(&self, idx: usize) -> [i64; 3] {
        let c = self.coords(idx);
        let mut n = [0i64; 3];
        for a in 0..3 {
            let half = (self.points[a] / 2) as i64;
            let j = c[a] as i64;
            n[a] = if j < half { j } else { j - self.points[a] as i64 };
        }
        n
    }

    pub fn wave_vector_of(&self, n: [i64; 3]) -> Real3 {
        Real3::from_fn(|a, _| 2.0 * std::f64::consts::PI * n[a] as f64 / self.lengths[a])
    }

    pub fn wave_vector(&self, idx: usize) -> Real3 {
        self.wave_vector_of(self.mode_number(idx))
    }

    /// Grid index holding mode `n`, if `n` lies in `[-N/2, N/2)` on every axis.
    pub fn index_of_mode(&self, n: [i64; 3]) -> Option<usize> {
        let mut c = [0usize; 3];
        for a in 0..3 {
            let half = (self.points[a] / 2) as i64;
            if n[a] < -half || n[a] >= half {
                return None;
            }
            c[a] = n[a].rem_euclid(self.points[a] as i64) as usize;
        }
        Some(self.index(c))
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        let n = self.mode_number(idx);
        (0..3).any(|a| n[a] == -((self.points[a] / 2) as i64))
    }

    /// Largest `|k|` on the grid.
    pub fn k_max(&self) -> f64 {
        let k = Real3::from_fn(|a, _| std::f64::consts::PI * self.points[a] as f64 / self.lengths[a]);
        k.norm()
    }

    pub fn fft(&self) -> FftNd {
        FftNd::new(&self.points)
    }

    /// Forward transform `F(k) = Σ_x f(x) e^{-ik·x}` of a vector field.
    pub fn forward<const D: usize>(&self, field: &[SVector<C64, D>]) -> Vec<SVector<C64, D>> {
        transform_components(&self.fft(), field, false)
    }

    /// Inverse transform `f(x) = (1/N) Σ_k F(k) e^{ik·x}`.
    pub fn inverse<const D: usize>(&self, spec: &[SVector<C64, D>]) -> Vec<SVector<C64, D>> {
        transform_components(&self.fft(), spec, true)
    }

    pub fn check_len(&self, got: usize) -> Result<()> {
        if got != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }
}

/// Planned complex FFT over a row-major array of arbitrary rank.
pub struct FftNd {
    shape: Vec<usize>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl FftNd {
    pub fn new(shape: &[usize]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = shape.iter().map(|&n| planner.plan_fft_forward(n)).collect();
        let inverse = shape.iter().map(|&n| planner.plan_fft_inverse(n)).collect();
        Self {
            shape: shape.to_vec(),
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&self, data: &mut [C64]) {
        self.process(data, false);
    }

    /// Inverse transform including the `1/N` factor, in place.
    pub fn inverse(&self, data: &mut [C64]) {
        self.process(data, true);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn process(&self, data: &mut [C64], inverse: bool) {
        assert_eq!(data.len(), self.len(), "FFT buffer has wrong length");
        let total = data.len();
        for (axis, &n) in self.shape.iter().enumerate() {
            if n == 1 {
                continue;
            }
            let stride: usize = self.shape[axis + 1..].iter().product();
            let plan = if inverse {
                &self.inverse[axis]
            } else {
                &self.forward[axis]
            };
            let mut line = vec![ZERO; n];
            let mut scratch = vec![ZERO; plan.get_inplace_scratch_len()];
            for outer in 0..total / (n * stride) {
                for inner in 0..stride {
                    let base = outer * n * stride + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
    }
}

pub(crate) fn transform_components<const D: usize>(
    fft: &FftNd,
    field: &[SVector<C64, D>],
    inverse: bool,
) -> Vec<SVector<C64, D>> {
    let mut out = vec![SVector::<C64, D>::zeros(); field.len()];
    let mut buf = vec![ZERO; field.len()];
    for c in 0..D {
        for (b, v) in buf.iter_mut().zip(field) {
            *b = v[c];
        }
        if inverse {
            fft.inverse(&mut buf);
        } else {
            fft.forward(&mut buf);
        }
        for (o, b) in out.iter_mut().zip(&buf) {
            o[c] = *b;
        }
    }
    out
}

/// Grid L2 norm `sqrt(Σ |f|² dV)`.
pub fn l2_norm<const D: usize>(field: &[SVector<C64, D>], cell_volume: f64) -> f64 {
    (field.iter().map(|v| v.norm_squared()).sum::<f64>() * cell_volume).sqrt()
}

pub fn max_norm<const D: usize>(field: &[SVector<C64, D>]) -> f64 {
    field.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
