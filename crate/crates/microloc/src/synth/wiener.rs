//! Wiener integrals ∫_0^t η dB + ψ(t) by left-point Itô sums.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::function::ScalarFunctionSpec;
use crate::rng::Stream;

use super::{Grid, PathGenerator};

pub struct WienerGenerator {
    grid: Grid,
    eta: Vec<f64>,
    psi: Vec<f64>,
}

impl WienerGenerator {
    pub fn new(eta: &ScalarFunctionSpec, psi: &ScalarFunctionSpec, grid: Grid) -> Result<Self> {
        grid.validate()?;
        eta.validate()?;
        psi.validate()?;
        let t = |i: usize| i as f64 * grid.dt;
        Ok(Self {
            grid,
            eta: (0..grid.n - 1).map(|i| eta.eval(t(i))).collect(),
            psi: (0..grid.n).map(|i| psi.eval(t(i))).collect(),
        })
    }
}

impl PathGenerator for WienerGenerator {
    fn sample(&self, rng: &mut Stream) -> Vec<f64> {
        let sd = self.grid.dt.sqrt();
        let mut out = Vec::with_capacity(self.grid.n);
        out.push(self.psi[0]);
        let mut acc = 0.0;
        for (i, e) in self.eta.iter().enumerate() {
            let db = sd * rng.sample::<f64, _>(StandardNormal);
            acc += e * db;
            out.push(acc + self.psi[i + 1]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_kernel_returns_drift_exactly() {
        let psi = ScalarFunctionSpec::Power { gamma: 0.8, t0: 0.5 };
        let g = WienerGenerator::new(&ScalarFunctionSpec::constant(0.0), &psi, Grid::new(101, 0.01))
            .unwrap();
        let x = g.sample(&mut stream(1, 0));
        for (i, v) in x.iter().enumerate() {
            assert_eq!(*v, psi.eval(i as f64 * 0.01));
        }
    }
}
