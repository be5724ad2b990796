//! Symbolic process descriptions.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::function::ScalarFunctionSpec;

/// Default truncation tolerance for the Weierstrass-type series.
pub const GW_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "snake_case")]
pub enum ProcessSpec {
    Fbm {
        hurst: f64,
    },
    Mbm {
        h: ScalarFunctionSpec,
    },
    Gw {
        h: ScalarFunctionSpec,
        lambda: f64,
        depth: usize,
    },
    WienerIntegral {
        eta: ScalarFunctionSpec,
        psi: ScalarFunctionSpec,
    },
    StableIntegral {
        eta: ScalarFunctionSpec,
        alpha: f64,
    },
}

/// Smallest depth with λ^(-depth·h_min) ≤ tol.
pub fn gw_min_depth(h_min: f64, lambda: f64, tol: f64) -> usize {
    ((1.0 / tol).ln() / (h_min * lambda.ln())).ceil().max(1.0) as usize
}

pub(crate) fn check_hurst(h: f64) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        param(format!("Hurst exponent must lie in (0,1), got {h}"))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return param(format!("stability index must lie in (0,2), got {alpha}"));
    }
    if alpha == 1.0 {
        return Err(crate::Error::Unsupported(
            "alpha = 1 stable integrals are not supported".into(),
        ));
    }
    Ok(())
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 2.0 && lambda.is_finite() {
        Ok(())
    } else {
        param(format!("lambda must be >= 2, got {lambda}"))
    }
}

impl ProcessSpec {
    /// Generalized Weierstrass process with the depth set by the default
    /// tolerance, using `h_min` as the lower bound of h on the window.
    pub fn gw_auto(h: ScalarFunctionSpec, lambda: f64, h_min: f64) -> Self {
        Self::Gw {
            h,
            lambda,
            depth: gw_min_depth(h_min, lambda, GW_TOL),
        }
    }

    /// Parameter checks that do not need a grid. Hurst functions are
    /// range-checked on the grid at synthesis time.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Fbm { hurst } => check_hurst(*hurst),
            Self::Mbm { h } => h.validate(),
            Self::Gw { h, lambda, depth } => {
                h.validate()?;
                check_lambda(*lambda)?;
                if *depth == 0 {
                    return param("depth must be positive");
                }
                Ok(())
            }
            Self::WienerIntegral { eta, psi } => eta.validate().and(psi.validate()),
            Self::StableIntegral { eta, alpha } => {
                eta.validate()?;
                check_alpha(*alpha)
            }
        }
    }

    pub fn is_gaussian(&self) -> bool {
        !matches!(self, Self::StableIntegral { .. })
    }
}
