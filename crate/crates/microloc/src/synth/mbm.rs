//! Multifractional Brownian motion as a causal moving average of one shared
//! white noise,
//!
//!   X(t) = ∫ [(t-s)_+^{H(t)-1/2} - (-s)_+^{H(t)-1/2}] dW(s).
//!
//! The recent past (one path length before 0) uses grid cells and an FFT
//! convolution per node of a fine grid in H; the field is then interpolated
//! in H at H(t_i). The far past uses geometrically growing cells up to a
//! truncation distance, evaluated on a coarse time grid and interpolated.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use statrs::function::gamma::gamma;

use crate::error::Result;
use crate::function::ScalarFunctionSpec;
use crate::rng::Stream;

use super::{Grid, PathGenerator};

/// Spacing of the H nodes used for interpolation.
const H_STEP: f64 = 0.02;
/// Relative incremental variance allowed for the truncated far past.
const TAIL_REL: f64 = 1e-3;
/// Growth ratio of far-past cells.
const FAR_RATIO: f64 = 1.05;
/// Hard cap on the truncation distance, in path lengths.
const FAR_CAP: f64 = 1e15;
/// Coarse time nodes for the far-past field.
const COARSE: usize = 33;

/// Var X(1) for the unnormalized moving-average kernel with constant H.
pub fn mvn_variance_constant(h: f64) -> f64 {
    gamma(h + 0.5).powi(2) / (gamma(2.0 * h + 1.0) * (PI * h).sin())
}

/// Distance beyond which the omitted kernel tail adds less than `TAIL_REL`
/// of the incremental variance at lag `span`, from
/// ∫_T^∞ ((s+δ)^{H-1/2} - s^{H-1/2})² ds ≤ (H-1/2)² δ² T^{2H-2} / (2-2H).
fn truncation_distance(h: f64, span: f64) -> f64 {
    let a = (h - 0.5).powi(2);
    if a == 0.0 {
        return 0.0;
    }
    let ratio = a / ((2.0 - 2.0 * h) * mvn_variance_constant(h) * TAIL_REL);
    span * ratio.max(1.0).powf(1.0 / (2.0 - 2.0 * h))
}

/// Weights for 4-point Lagrange interpolation at offset u in [0, 1) from
/// node 0, over nodes -1, 0, 1, 2.
fn lagrange4(u: f64) -> [f64; 4] {
    [
        -u * (u - 1.0) * (u - 2.0) / 6.0,
        (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0,
        -(u + 1.0) * u * (u - 2.0) / 2.0,
        (u + 1.0) * u * (u - 1.0) / 6.0,
    ]
}

/// (base node, weights) for interpolating at fractional node position f.
fn stencil(f: f64, nodes: usize) -> (usize, [f64; 4]) {
    let base = (f.floor() as isize).clamp(1, nodes as isize - 3) as usize;
    (base, lagrange4(f - base as f64))
}

pub struct MbmGenerator {
    grid: Grid,
    /// Fine past cells before 0.
    past: usize,
    nodes: Vec<f64>,
    /// Per grid point: base node and weights (or a single node when H is
    /// constant).
    stencils: Vec<(usize, [f64; 4])>,
    fft_size: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    kernel_spectra: Vec<Vec<Complex64>>,
    far_sd: Vec<f64>,
    /// far_basis[g][c * far_sd.len() + r]
    far_basis: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

impl MbmGenerator {
    pub fn new(h: &ScalarFunctionSpec, grid: Grid) -> Result<Self> {
        grid.validate()?;
        let n = grid.n;
        let dt = grid.dt;
        let (h_min, h_max) = h.hurst_range_on_grid(0.0, dt, n)?;
        let hs: Vec<f64> = (0..n).map(|i| h.eval(i as f64 * dt)).collect();
        let constant = h_max - h_min < 1e-12;

        let (nodes, stencils) = if constant {
            (vec![h_min], vec![(0usize, [1.0, 0.0, 0.0, 0.0]); n])
        } else {
            let g = (((h_max - h_min) / H_STEP).ceil() as usize + 3).max(4);
            let nodes: Vec<f64> = (0..g).map(|k| h_min - H_STEP + k as f64 * H_STEP).collect();
            let st = hs
                .iter()
                .map(|&v| stencil((v - nodes[0]) / H_STEP, g))
                .collect();
            (nodes, st)
        };

        let past = n;
        let cells = n - 1 + past;
        let fft_size = (2 * cells).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(fft_size);
        let inv = planner.plan_fft_inverse(fft_size);

        let kernel_spectra = nodes
            .iter()
            .map(|&hn| {
                let a = hn + 0.5;
                let c = dt.powf(hn - 0.5) / a;
                let mut w = vec![Complex64::new(0.0, 0.0); fft_size];
                let mut prev = 0.0f64;
                for (k, slot) in w.iter_mut().enumerate().take(cells + 1).skip(1) {
                    let cur = (k as f64).powf(a);
                    slot.re = c * (cur - prev);
                    prev = cur;
                }
                fwd.process(&mut w);
                w
            })
            .collect();

        let span = (n - 1) as f64 * dt;
        let b0 = past as f64 * dt;
        let mut t_trunc = nodes
            .iter()
            .map(|&hn| truncation_distance(hn, span))
            .fold(0.0, f64::max);
        let mut warnings = Vec::new();
        if t_trunc > FAR_CAP * span {
            warnings.push(format!(
                "far-past truncation capped at {FAR_CAP:e} path lengths; tail bound not met"
            ));
            t_trunc = FAR_CAP * span;
        }
        let mut bounds = vec![b0];
        while *bounds.last().unwrap() < t_trunc {
            let b = *bounds.last().unwrap();
            bounds.push(b * FAR_RATIO);
        }
        let far_sd: Vec<f64> = bounds.windows(2).map(|w| (w[1] - w[0]).sqrt()).collect();
        let mids: Vec<f64> = bounds.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let coarse_dt = span / (COARSE - 1) as f64;
        let far_basis = nodes
            .iter()
            .map(|&hn| {
                let e = hn - 0.5;
                let mut basis = Vec::with_capacity(COARSE * mids.len());
                for c in 0..COARSE {
                    let t = c as f64 * coarse_dt;
                    basis.extend(mids.iter().map(|&d| (t + d).powf(e) - d.powf(e)));
                }
                basis
            })
            .collect();

        Ok(Self {
            grid,
            past,
            nodes,
            stencils,
            fft_size,
            fwd,
            inv,
            kernel_spectra,
            far_sd,
            far_basis,
            warnings,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn far_cells(&self) -> usize {
        self.far_sd.len()
    }
}

impl PathGenerator for MbmGenerator {
    fn sample(&self, rng: &mut Stream) -> Vec<f64> {
        let n = self.grid.n;
        let cells = n - 1 + self.past;
        let sd = self.grid.dt.sqrt();
        let mut noise = vec![Complex64::new(0.0, 0.0); self.fft_size];
        for z in noise.iter_mut().take(cells) {
            z.re = sd * rng.sample::<f64, _>(StandardNormal);
        }
        let far_z: Vec<f64> = self
            .far_sd
            .iter()
            .map(|s| s * rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.fwd.process(&mut noise);

        let scale = 1.0 / self.fft_size as f64;
        let r = far_z.len();
        let span = (n - 1) as f64 * self.grid.dt;
        let coarse_dt = span / (COARSE - 1) as f64;
        let mut field = vec![vec![0.0; n]; self.nodes.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft_size];
        for (g, spec) in self.kernel_spectra.iter().enumerate() {
            for ((b, a), k) in buf.iter_mut().zip(&noise).zip(spec) {
                *b = a * k;
            }
            self.inv.process(&mut buf);
            let origin = buf[self.past].re * scale;
            let row = &mut field[g];
            for (i, v) in row.iter_mut().enumerate() {
                *v = buf[i + self.past].re * scale - origin;
            }
            if r > 0 {
                let basis = &self.far_basis[g];
                let coarse: Vec<f64> = (0..COARSE)
                    .map(|c| {
                        basis[c * r..(c + 1) * r]
                            .iter()
                            .zip(&far_z)
                            .map(|(b, z)| b * z)
                            .sum()
                    })
                    .collect();
                for (i, v) in row.iter_mut().enumerate() {
                    let (base, w) = stencil(i as f64 * self.grid.dt / coarse_dt, COARSE);
                    *v += (0..4).map(|j| w[j] * coarse[base + j - 1]).sum::<f64>();
                }
            }
        }
        if self.nodes.len() == 1 {
            return field.swap_remove(0);
        }
        (0..n)
            .map(|i| {
                let (base, w) = self.stencils[i];
                (0..4).map(|j| w[j] * field[base + j - 1][i]).sum()
            })
            .collect()
    }

    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }
}
