//! Seeded path synthesis for every supported process.

pub mod fbm;
pub mod gw;
pub mod mbm;
pub mod stable;
pub mod wiener;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::function::ScalarFunctionSpec;
use crate::path::{PathMeta, SampledPath};
use crate::process::ProcessSpec;
use crate::rng::{stream, Stream};

pub use fbm::FbmGenerator;
pub use gw::GwGenerator;
pub use mbm::MbmGenerator;
pub use stable::StableGenerator;
pub use wiener::WienerGenerator;

/// Sample times k·dt for k < n. Synthesized paths always start at 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub dt: f64,
}

impl Grid {
    pub fn new(n: usize, dt: f64) -> Self {
        Self { n, dt }
    }

    /// n samples covering [0, 1).
    pub fn unit(n: usize) -> Self {
        Self::new(n, 1.0 / n as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return param(format!("need at least 2 samples, got {}", self.n));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return param(format!("dt must be positive, got {}", self.dt));
        }
        Ok(())
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }
}

/// A prepared sampler: everything that depends only on (spec, grid) is
/// computed once, and each call draws one path from the given stream.
pub trait PathGenerator: Send + Sync {
    fn sample(&self, rng: &mut Stream) -> Vec<f64>;

    fn warnings(&self) -> Vec<String> {
        Vec::new()
    }
}

pub fn generator(spec: &ProcessSpec, grid: Grid) -> Result<Box<dyn PathGenerator>> {
    spec.validate()?;
    Ok(match spec {
        ProcessSpec::Fbm { hurst } => Box::new(FbmGenerator::new(*hurst, grid)?),
        ProcessSpec::Mbm { h } => Box::new(MbmGenerator::new(h, grid)?),
        ProcessSpec::Gw { h, lambda, depth } => Box::new(GwGenerator::new(h, *lambda, *depth, grid)?),
        ProcessSpec::WienerIntegral { eta, psi } => Box::new(WienerGenerator::new(eta, psi, grid)?),
        ProcessSpec::StableIntegral { eta, alpha } => {
            Box::new(StableGenerator::new(eta, *alpha, grid)?)
        }
    })
}

/// Path number `index` of the ensemble keyed by `seed`.
pub fn draw(
    gen: &dyn PathGenerator,
    spec: &ProcessSpec,
    grid: Grid,
    seed: u64,
    index: u64,
) -> SampledPath {
    let values = gen.sample(&mut stream(seed, index));
    let meta = PathMeta {
        spec: Some(spec.clone()),
        seed: Some(seed),
        stream: Some(index),
        warnings: gen.warnings(),
        ..PathMeta::default()
    };
    SampledPath::new(0.0, grid.dt, values)
        .expect("synthesizers produce finite paths of validated length")
        .with_meta(meta)
}

pub fn synthesize(spec: &ProcessSpec, grid: Grid, seed: u64) -> Result<SampledPath> {
    let gen = generator(spec, grid)?;
    Ok(draw(gen.as_ref(), spec, grid, seed, 0))
}

/// Applies `f` to each path of an ensemble in parallel without keeping the
/// paths. Results are in path order and independent of the thread count.
pub fn ensemble_map<T, F>(
    spec: &ProcessSpec,
    grid: Grid,
    seed: u64,
    n_paths: usize,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&SampledPath) -> T + Sync + Send,
{
    let gen = generator(spec, grid)?;
    Ok((0..n_paths as u64)
        .into_par_iter()
        .map(|i| f(&draw(gen.as_ref(), spec, grid, seed, i)))
        .collect())
}

pub fn ensemble(spec: &ProcessSpec, grid: Grid, seed: u64, n_paths: usize) -> Result<Vec<SampledPath>> {
    ensemble_map(spec, grid, seed, n_paths, |p| p.clone())
}

pub fn synth_fbm(hurst: f64, n: usize, dt: f64, seed: u64) -> Result<SampledPath> {
    synthesize(&ProcessSpec::Fbm { hurst }, Grid::new(n, dt), seed)
}

pub fn synth_mbm(h: &ScalarFunctionSpec, n: usize, dt: f64, seed: u64) -> Result<SampledPath> {
    synthesize(&ProcessSpec::Mbm { h: h.clone() }, Grid::new(n, dt), seed)
}

pub fn synth_gw(
    h: &ScalarFunctionSpec,
    lambda: f64,
    depth: usize,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<SampledPath> {
    let spec = ProcessSpec::Gw {
        h: h.clone(),
        lambda,
        depth,
    };
    synthesize(&spec, Grid::new(n, dt), seed)
}

pub fn synth_wiener_integral(
    eta: &ScalarFunctionSpec,
    psi: &ScalarFunctionSpec,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<SampledPath> {
    let spec = ProcessSpec::WienerIntegral {
        eta: eta.clone(),
        psi: psi.clone(),
    };
    synthesize(&spec, Grid::new(n, dt), seed)
}

pub fn synth_stable_integral(
    eta: &ScalarFunctionSpec,
    alpha: f64,
    n: usize,
    dt: f64,
    seed: u64,
) -> Result<SampledPath> {
    let spec = ProcessSpec::StableIntegral {
        eta: eta.clone(),
        alpha,
    };
    synthesize(&spec, Grid::new(n, dt), seed)
}
