//! Integrals of a deterministic kernel against a symmetric α-stable random
//! measure, by left-point sums of Chambers–Mallows–Stuck variates.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_distr::{Exp1, Uniform};

use crate::error::Result;
use crate::function::ScalarFunctionSpec;
use crate::process::check_alpha;
use crate::rng::Stream;

use super::{Grid, PathGenerator};

/// One standard symmetric α-stable variate, E exp(iuS) = exp(-|u|^α).
pub fn symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v: f64 = rng.sample(Uniform::new(-FRAC_PI_2, FRAC_PI_2).expect("valid range"));
    let w: f64 = rng.sample(Exp1);
    let a = alpha * v;
    a.sin() / v.cos().powf(1.0 / alpha) * ((v - a).cos() / w).powf((1.0 - alpha) / alpha)
}

pub struct StableGenerator {
    grid: Grid,
    alpha: f64,
    eta: Vec<f64>,
}

impl StableGenerator {
    pub fn new(eta: &ScalarFunctionSpec, alpha: f64, grid: Grid) -> Result<Self> {
        grid.validate()?;
        eta.validate()?;
        check_alpha(alpha)?;
        Ok(Self {
            grid,
            alpha,
            eta: (0..grid.n - 1).map(|i| eta.eval(i as f64 * grid.dt)).collect(),
        })
    }
}

impl PathGenerator for StableGenerator {
    fn sample(&self, rng: &mut Stream) -> Vec<f64> {
        let scale = self.grid.dt.powf(1.0 / self.alpha);
        let mut out = Vec::with_capacity(self.grid.n);
        out.push(0.0);
        let mut acc = 0.0;
        for e in &self.eta {
            let s = symmetric_stable(self.alpha, rng);
            acc += e * scale * s;
            out.push(acc);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn characteristic_function_matches() {
        for &alpha in &[0.7, 1.5, 1.9] {
            let mut rng = stream(21, 0);
            let draws: Vec<f64> = (0..100_000).map(|_| symmetric_stable(alpha, &mut rng)).collect();
            for &u in &[0.5, 1.0, 2.0] {
                let emp = draws.iter().map(|s| (u * s).cos()).sum::<f64>() / draws.len() as f64;
                let want = (-(u as f64).powf(alpha)).exp();
                // cos is bounded by 1, so the standard error is below 1/sqrt(N)
                assert!((emp - want).abs() < 5.0 / (draws.len() as f64).sqrt(), "α={alpha} u={u}: {emp} vs {want}");
            }
        }
    }

    #[test]
    fn zero_kernel_gives_zero_path() {
        let g = StableGenerator::new(&ScalarFunctionSpec::constant(0.0), 1.5, Grid::new(50, 0.02)).unwrap();
        assert!(g.sample(&mut stream(2, 0)).iter().all(|v| *v == 0.0));
    }
}
