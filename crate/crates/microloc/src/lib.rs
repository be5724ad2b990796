//! Synthesis and 2-microlocal analysis of fractional, multifractional,
//! Weierstrass-type and stable processes.

pub mod covariance;
pub mod error;
pub mod estimate;
pub mod fracdiff;
pub mod frontier;
pub mod function;
pub mod path;
pub mod process;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use frontier::Frontier;
pub use function::ScalarFunctionSpec;
pub use path::{PathMeta, SampledPath};
pub use process::ProcessSpec;
pub use synth::Grid;
