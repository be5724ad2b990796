//! Fractional Brownian motion by circulant embedding of the fractional
//! Gaussian noise covariance, with a dense Cholesky fallback.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::process::check_hurst;
use crate::rng::Stream;

use super::{Grid, PathGenerator};

/// Negative circulant eigenvalues above this magnitude trigger the fallback.
pub const EMBEDDING_TOL: f64 = 1e-10;
/// Largest increment count the dense fallback will factor.
pub const CHOLESKY_MAX: usize = 4096;

/// Autocovariance of unit-lag fractional Gaussian noise.
pub fn fgn_autocov(hurst: f64, k: usize) -> f64 {
    let k = k as f64;
    let h2 = 2.0 * hurst;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

enum Method {
    Circulant {
        sqrt_eig: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Cholesky(DMatrix<f64>),
}

pub struct FbmGenerator {
    hurst: f64,
    grid: Grid,
    method: Method,
    warnings: Vec<String>,
}

impl FbmGenerator {
    pub fn new(hurst: f64, grid: Grid) -> Result<Self> {
        check_hurst(hurst)?;
        grid.validate()?;
        let m = grid.n - 1;
        let half = m.next_power_of_two();
        let size = 2 * half;
        let mut c: Vec<Complex64> = (0..size)
            .map(|k| {
                let lag = if k <= half { k } else { size - k };
                Complex64::new(fgn_autocov(hurst, lag), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut c);
        let min_eig = c.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min_eig < -EMBEDDING_TOL {
            let warning = format!(
                "circulant embedding not non-negative (min eigenvalue {min_eig:e}); used dense Cholesky"
            );
            return Self::cholesky(hurst, grid, vec![warning]);
        }
        let sqrt_eig = c
            .iter()
            .map(|z| (z.re.max(0.0) / size as f64).sqrt())
            .collect();
        Ok(Self {
            hurst,
            grid,
            method: Method::Circulant { sqrt_eig, fft },
            warnings: Vec::new(),
        })
    }

    /// Exact sampler from the Cholesky factor of the fBm covariance at the
    /// grid times after 0.
    pub fn cholesky(hurst: f64, grid: Grid, warnings: Vec<String>) -> Result<Self> {
        check_hurst(hurst)?;
        grid.validate()?;
        let m = grid.n - 1;
        if m > CHOLESKY_MAX {
            return Err(Error::Numeric(format!(
                "dense fBm factorization limited to {CHOLESKY_MAX} increments, asked for {m}"
            )));
        }
        let h2 = 2.0 * hurst;
        let cov = DMatrix::from_fn(m, m, |i, j| {
            let (t, u) = ((i + 1) as f64, (j + 1) as f64);
            0.5 * (t.powf(h2) + u.powf(h2) - (t - u).abs().powf(h2))
        });
        let chol = cov
            .cholesky()
            .ok_or_else(|| Error::Numeric("fBm covariance is not positive definite".into()))?;
        Ok(Self {
            hurst,
            grid,
            method: Method::Cholesky(chol.l()),
            warnings,
        })
    }

    pub fn uses_fallback(&self) -> bool {
        matches!(self.method, Method::Cholesky(_))
    }
}

impl PathGenerator for FbmGenerator {
    fn sample(&self, rng: &mut Stream) -> Vec<f64> {
        let m = self.grid.n - 1;
        let scale = self.grid.dt.powf(self.hurst);
        let mut out = Vec::with_capacity(self.grid.n);
        out.push(0.0);
        match &self.method {
            Method::Circulant { sqrt_eig, fft } => {
                let mut w: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|&s| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut w);
                let mut acc = 0.0;
                for z in &w[..m] {
                    acc += scale * z.re;
                    out.push(acc);
                }
            }
            Method::Cholesky(l) => {
                let z = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
                let x = l * z;
                out.extend(x.iter().map(|v| scale * v));
            }
        }
        out
    }

    fn warnings(&self) -> Vec<String> {
        self.warnings.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::stats;

    #[test]
    fn autocov_at_half_is_white() {
        assert_eq!(fgn_autocov(0.5, 0), 1.0);
        assert!(fgn_autocov(0.5, 3).abs() < 1e-15);
        assert!(fgn_autocov(0.7, 1) > 0.0 && fgn_autocov(0.3, 1) < 0.0);
    }

    #[test]
    fn starts_at_zero_and_has_length_n() {
        let g = FbmGenerator::new(0.3, Grid::new(100, 0.01)).unwrap();
        let x = g.sample(&mut stream(1, 0));
        assert_eq!(x.len(), 100);
        assert_eq!(x[0], 0.0);
        assert!(!g.uses_fallback());
    }

    #[test]
    fn cholesky_fallback_matches_variance_law() {
        let grid = Grid::new(11, 0.1);
        let g = FbmGenerator::cholesky(0.7, grid, vec![]).unwrap();
        let paths = 20_000;
        let sq: Vec<f64> = (0..paths)
            .map(|p| {
                let x = g.sample(&mut stream(5, p));
                (x[7] - x[3]).powi(2)
            })
            .collect();
        let want = 0.4f64.powf(1.4);
        let (m, se) = (stats::mean(&sq), stats::std_error(&sq));
        assert!((m - want).abs() < 5.0 * se, "{m} vs {want} ± {se}");
    }
}
