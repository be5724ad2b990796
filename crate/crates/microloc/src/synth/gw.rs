//! Generalized Weierstrass process Σ_j Z_j λ^{-j h(t)} sin(λ^j t).

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::function::ScalarFunctionSpec;
use crate::process::{check_lambda, gw_min_depth, GW_TOL};
use crate::rng::Stream;

use super::{Grid, PathGenerator};

/// Basis tables above this many entries are recomputed per path instead.
const CACHE_LIMIT: usize = 1 << 23;

pub struct GwGenerator {
    grid: Grid,
    h: Vec<f64>,
    lambda: f64,
    depth: usize,
    basis: Option<Vec<f64>>,
}

/// λ^{-j h} sin(λ^j t) for one term.
pub(crate) fn term(lambda: f64, j: usize, h: f64, t: f64) -> f64 {
    let lj = lambda.powi(j as i32);
    lj.powf(-h) * (lj * t).sin()
}

impl GwGenerator {
    pub fn new(h: &ScalarFunctionSpec, lambda: f64, depth: usize, grid: Grid) -> Result<Self> {
        grid.validate()?;
        check_lambda(lambda)?;
        let (h_min, _) = h.hurst_range_on_grid(0.0, grid.dt, grid.n)?;
        let min_depth = gw_min_depth(h_min, lambda, GW_TOL);
        if depth < min_depth {
            return Err(Error::DepthTooSmall {
                depth,
                min_depth,
                tol: GW_TOL,
            });
        }
        let hs: Vec<f64> = (0..grid.n).map(|i| h.eval(i as f64 * grid.dt)).collect();
        let basis = (grid.n * depth <= CACHE_LIMIT).then(|| {
            let mut b = Vec::with_capacity(grid.n * depth);
            for (i, &hi) in hs.iter().enumerate() {
                let t = i as f64 * grid.dt;
                b.extend((1..=depth).map(|j| term(lambda, j, hi, t)));
            }
            b
        });
        Ok(Self {
            grid,
            h: hs,
            lambda,
            depth,
            basis,
        })
    }
}

impl PathGenerator for GwGenerator {
    fn sample(&self, rng: &mut Stream) -> Vec<f64> {
        let z: Vec<f64> = (0..self.depth)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        match &self.basis {
            Some(b) => b
                .chunks(self.depth)
                .map(|row| row.iter().zip(&z).map(|(a, c)| a * c).sum())
                .collect(),
            None => (0..self.grid.n)
                .map(|i| {
                    let t = i as f64 * self.grid.dt;
                    (1..=self.depth)
                        .map(|j| z[j - 1] * term(self.lambda, j, self.h[i], t))
                        .sum()
                })
                .collect(),
        }
    }
}

/// Deterministic Weierstrass function Σ_{j=1..depth} λ^{-j h} sin(λ^j t)
/// sampled on the grid (all Z_j = 1).
pub fn weierstrass_samples(h: f64, lambda: f64, grid: Grid, t_start: f64) -> Vec<f64> {
    let depth = gw_min_depth(h, lambda, GW_TOL);
    (0..grid.n)
        .map(|i| {
            let t = t_start + i as f64 * grid.dt;
            (1..=depth).map(|j| term(lambda, j, h, t)).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn value_at_zero_is_exactly_zero() {
        let g = GwGenerator::new(&ScalarFunctionSpec::constant(0.5), 2.0, 60, Grid::new(64, 0.01))
            .unwrap();
        let x = g.sample(&mut stream(9, 0));
        assert_eq!(x[0], 0.0);
    }

    #[test]
    fn depth_below_minimum_names_it() {
        let err = GwGenerator::new(&ScalarFunctionSpec::constant(0.5), 2.0, 10, Grid::new(8, 0.1))
            .err()
            .unwrap();
        match err {
            Error::DepthTooSmall { min_depth, .. } => assert_eq!(min_depth, 60),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn cached_and_streamed_bases_agree() {
        let h = ScalarFunctionSpec::Linear { a: 0.4, b: 0.3 };
        let grid = Grid::new(50, 0.02);
        let a = GwGenerator::new(&h, 2.5, 80, grid).unwrap();
        let mut b = GwGenerator::new(&h, 2.5, 80, grid).unwrap();
        b.basis = None;
        let xa = a.sample(&mut stream(4, 2));
        let xb = b.sample(&mut stream(4, 2));
        for (p, q) in xa.iter().zip(&xb) {
            assert!((p - q).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_small_lambda() {
        assert!(GwGenerator::new(&ScalarFunctionSpec::constant(0.5), 1.5, 100, Grid::new(8, 0.1)).is_err());
    }
}
