//! Symbolic deterministic functions used as Hurst functions, kernels and
//! drifts. Each variant knows its value and, where one exists in closed
//! form, its pseudo-frontier at its own centre.

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::frontier::Frontier;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFunctionSpec {
    Constant {
        c: f64,
    },
    /// a + b·t
    Linear {
        a: f64,
        b: f64,
    },
    /// |t - t0|^gamma
    Power {
        gamma: f64,
        t0: f64,
    },
    /// |t - t0|^gamma · sin(|t - t0|^-beta), zero at t0
    Chirp {
        gamma: f64,
        beta: f64,
        t0: f64,
    },
    /// a + b·chirp(gamma, beta, t0)
    AffineChirp {
        a: f64,
        b: f64,
        gamma: f64,
        beta: f64,
        t0: f64,
    },
    /// (|t - t0|^gamma · |sin(|t - t0|^-beta)|)^(1/root_order)
    SqrtAbsChirp {
        gamma: f64,
        beta: f64,
        t0: f64,
        root_order: f64,
    },
    /// Linear interpolation of samples on t_start + k·dt, held constant
    /// outside the table.
    Table {
        t_start: f64,
        dt: f64,
        values: Vec<f64>,
    },
}

fn chirp(gamma: f64, beta: f64, x: f64) -> f64 {
    let r = x.abs();
    if r == 0.0 {
        0.0
    } else {
        r.powf(gamma) * r.powf(-beta).sin()
    }
}

impl ScalarFunctionSpec {
    pub fn constant(c: f64) -> Self {
        Self::Constant { c }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::Linear { a, b } => a + b * t,
            Self::Power { gamma, t0 } => (t - t0).abs().powf(gamma),
            Self::Chirp { gamma, beta, t0 } => chirp(gamma, beta, t - t0),
            Self::AffineChirp {
                a,
                b,
                gamma,
                beta,
                t0,
            } => a + b * chirp(gamma, beta, t - t0),
            Self::SqrtAbsChirp {
                gamma,
                beta,
                t0,
                root_order,
            } => chirp(gamma, beta, t - t0).abs().powf(1.0 / root_order),
            Self::Table {
                t_start,
                dt,
                ref values,
            } => {
                let x = (t - t_start) / dt;
                let last = values.len() - 1;
                if x <= 0.0 {
                    values[0]
                } else if x >= last as f64 {
                    values[last]
                } else {
                    let k = x.floor() as usize;
                    let w = x - k as f64;
                    values[k] * (1.0 - w) + values[k + 1] * w
                }
            }
        }
    }

    /// Point of non-smoothness, for variants that have one.
    pub fn centre(&self) -> Option<f64> {
        match *self {
            Self::Power { t0, .. }
            | Self::Chirp { t0, .. }
            | Self::AffineChirp { t0, .. }
            | Self::SqrtAbsChirp { t0, .. } => Some(t0),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                param(format!("{name} must be finite"))
            }
        };
        match *self {
            Self::Constant { c } => finite("c", c),
            Self::Linear { a, b } => finite("a", a).and(finite("b", b)),
            Self::Power { gamma, t0 } => {
                finite("t0", t0)?;
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    param(format!("power exponent must be > 0, got {gamma}"))
                }
            }
            Self::Chirp { gamma, beta, t0 }
            | Self::AffineChirp {
                gamma, beta, t0, ..
            }
            | Self::SqrtAbsChirp {
                gamma, beta, t0, ..
            } => {
                finite("t0", t0)?;
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return param(format!("chirp gamma must be > 0, got {gamma}"));
                }
                if !(beta > 0.0 && beta.is_finite()) {
                    return param(format!("chirp beta must be > 0, got {beta}"));
                }
                if let Self::AffineChirp { a, b, .. } = *self {
                    finite("a", a)?;
                    finite("b", b)?;
                }
                if let Self::SqrtAbsChirp { root_order, .. } = *self {
                    if !(root_order > 0.0 && root_order.is_finite()) {
                        return param(format!("root order must be > 0, got {root_order}"));
                    }
                }
                Ok(())
            }
            Self::Table {
                t_start,
                dt,
                ref values,
            } => {
                finite("t_start", t_start)?;
                if !(dt > 0.0 && dt.is_finite()) {
                    return param("table dt must be positive");
                }
                if values.len() < 2 {
                    return param("table needs at least 2 samples");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return param("table samples must be finite");
                }
                Ok(())
            }
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match *self {
            Self::Constant { c } => c == 0.0,
            Self::Linear { a, b } => a == 0.0 && b == 0.0,
            Self::AffineChirp { a, b, .. } => a == 0.0 && b == 0.0,
            Self::Table { ref values, .. } => values.iter().all(|v| *v == 0.0),
            _ => false,
        }
    }

    /// Checks that the function maps the grid t_start + k·dt, k < n, into
    /// (0, 1), as a Hurst function must. Returns (min, max) over the grid.
    pub fn hurst_range_on_grid(&self, t_start: f64, dt: f64, n: usize) -> Result<(f64, f64)> {
        self.validate()?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..n {
            let t = t_start + k as f64 * dt;
            let h = self.eval(t);
            if !(h > 0.0 && h < 1.0) {
                return param(format!("Hurst function leaves (0,1) at t = {t}: H = {h}"));
            }
            lo = lo.min(h);
            hi = hi.max(h);
        }
        Ok((lo, hi))
    }

    /// Closed-form pseudo-frontier at the function's own centre, when known.
    /// Constants give the +∞ frontier, affine functions 1 + s'.
    pub fn pseudo_frontier(&self) -> Option<Frontier> {
        match *self {
            Self::Constant { .. } => Some(Frontier::infinite()),
            Self::Linear { b, .. } => Some(if b == 0.0 {
                Frontier::infinite()
            } else {
                Frontier::line(1.0, 1.0)
            }),
            Self::Power { gamma, .. } => Some(capped_line(1.0, gamma)),
            Self::Chirp { gamma, beta, .. } => {
                Some(capped_line(1.0 / (beta + 1.0), gamma / (beta + 1.0)))
            }
            Self::AffineChirp {
                b, gamma, beta, ..
            } => Some(if b == 0.0 {
                Frontier::infinite()
            } else {
                capped_line(1.0 / (beta + 1.0), gamma / (beta + 1.0))
            }),
            _ => None,
        }
    }

    /// Closed-form pseudo-frontier, at the centre, of the primitive
    /// t ↦ ∫ |f|^power. The integrand is non-negative, so the primitive is
    /// monotone and its increments over a ball of radius ρ are of order
    /// |t-u|·ρ^g where |f|^power ~ |t-t0|^g; that gives min(1, 1 + g + s').
    pub fn primitive_pseudo_frontier(&self, power: f64) -> Option<Frontier> {
        if !(power > 0.0) {
            return None;
        }
        let g = match *self {
            Self::Constant { c } => {
                return Some(if c == 0.0 {
                    Frontier::infinite()
                } else {
                    Frontier::line(1.0, 1.0)
                });
            }
            Self::Power { gamma, .. } | Self::Chirp { gamma, .. } => gamma * power,
            Self::SqrtAbsChirp {
                gamma, root_order, ..
            } => gamma * power / root_order,
            _ => return None,
        };
        Some(capped_line(1.0, 1.0 + g))
    }
}

fn capped_line(slope: f64, intercept: f64) -> Frontier {
    let line = Frontier::line(slope, intercept);
    if intercept <= 1.0 {
        line
    } else {
        Frontier::min(&line, &Frontier::line(0.0, 1.0))
    }
}
