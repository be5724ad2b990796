//! Grünwald–Letnikov fractional differences and the frontier translation
//! check built on them.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{estimate_frontier, Scales};
use crate::path::SampledPath;
use crate::stats::median;

/// Above this many multiply-adds the convolution goes through the FFT.
const DIRECT_LIMIT: usize = 1 << 22;
/// Minimal burn-in, in units of time.
const BURN_IN_TIME: f64 = 0.05;
/// Half-width of the accepted band around eps for the median difference.
pub const TRANSLATION_TOL: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracOrder {
    /// Positive differentiates, negative integrates.
    pub eps: f64,
    /// Number of past samples used; None keeps the full history.
    pub window: Option<usize>,
}

impl FracOrder {
    pub fn new(eps: f64) -> Self {
        Self { eps, window: None }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.abs() < 1.0) {
            return Err(Error::Unsupported(format!(
                "fractional order must satisfy |eps| < 1, got {}",
                self.eps
            )));
        }
        if self.window == Some(0) {
            return Err(Error::Parameter("window must be positive".into()));
        }
        Ok(())
    }
}

/// w_0 = 1, w_j = w_{j-1}·(j - 1 - ε)/j.
pub fn gl_weights(eps: f64, len: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(len);
    if len == 0 {
        return w;
    }
    w.push(1.0);
    for j in 1..len {
        let prev = w[j - 1];
        w.push(prev * (j as f64 - 1.0 - eps) / j as f64);
    }
    w
}

/// Index of the first sample outside the boundary-affected prefix.
pub fn burn_in(order: &FracOrder, path: &SampledPath) -> usize {
    let time = (BURN_IN_TIME / path.dt()).ceil() as usize;
    let b = match order.window {
        Some(w) => w.max(time),
        None => time,
    };
    b.min(path.len() - 1)
}

fn convolve(x: &[f64], w: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n * w.len() <= DIRECT_LIMIT {
        return (0..n)
            .map(|k| {
                let top = k.min(w.len() - 1);
                (0..=top).map(|j| w[j] * x[k - j]).sum()
            })
            .collect();
    }
    let size = (n + w.len()).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut b = vec![Complex64::new(0.0, 0.0); size];
        for (d, s) in b.iter_mut().zip(v) {
            d.re = *s;
        }
        b
    };
    let (mut a, mut b) = (pad(x), pad(w));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (p, q) in a.iter_mut().zip(&b) {
        *p *= q;
    }
    inv.process(&mut a);
    a[..n].iter().map(|z| z.re / size as f64).collect()
}

/// y_k = dt^{-ε} Σ_{j=0}^{min(k,W)} w_j x_{k-j} on the input grid.
pub fn frac_diff(path: &SampledPath, order: FracOrder) -> Result<SampledPath> {
    order.validate()?;
    let n = path.len();
    if let Some(w) = order.window {
        if w > n {
            return Err(Error::Parameter(format!(
                "window {w} longer than the path ({n} samples)"
            )));
        }
    }
    let values = if order.eps == 0.0 {
        path.values().to_vec()
    } else {
        let len = order.window.map_or(n, |w| w + 1).min(n);
        let w = gl_weights(order.eps, len);
        let scale = path.dt().powf(-order.eps);
        convolve(path.values(), &w).into_iter().map(|v| scale * v).collect()
    };
    let mut meta = path.meta.clone();
    meta.frac_order = Some(order.eps);
    meta.frac_window = order.window;
    meta.burn_in = Some(burn_in(&order, path));
    Ok(SampledPath::new(path.t_start(), path.dt(), values)?.with_meta(meta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub eps: f64,
    pub t0: f64,
    pub s_grid: Vec<f64>,
    pub sigma_original: Vec<f64>,
    pub sigma_transformed: Vec<f64>,
    /// σ̂_orig(s') - σ̂_diff(s').
    pub difference: Vec<f64>,
    pub median_difference: f64,
    pub pass: bool,
    /// The largest ball reaches into the burn-in prefix.
    pub touches_burn_in: bool,
}

pub fn verify_translation(
    path: &SampledPath,
    order: FracOrder,
    t0: f64,
    s_grid: &[f64],
    scales: Scales,
) -> Result<TranslationReport> {
    let d = frac_diff(path, order)?;
    let a = estimate_frontier(path, t0, s_grid, scales)?;
    let b = estimate_frontier(&d, t0, s_grid, scales)?;
    Ok(translation_report(path, order, t0, s_grid, scales, a.sigma_hat, b.sigma_hat))
}

/// Same comparison on ensemble medians of σ̂, which removes most of the
/// single-path regression noise.
pub fn verify_translation_ensemble(
    paths: &[SampledPath],
    order: FracOrder,
    t0: f64,
    s_grid: &[f64],
    scales: Scales,
) -> Result<TranslationReport> {
    let first = paths.first().ok_or_else(|| Error::Parameter("empty ensemble".into()))?;
    let per_path = paths
        .par_iter()
        .map(|p| {
            let d = frac_diff(p, order)?;
            let a = estimate_frontier(p, t0, s_grid, scales)?;
            let b = estimate_frontier(&d, t0, s_grid, scales)?;
            Ok((a.sigma_hat, b.sigma_hat))
        })
        .collect::<Result<Vec<_>>>()?;
    let med = |pick: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| -> Vec<f64> {
        (0..s_grid.len())
            .map(|i| median(&per_path.iter().map(|r| pick(r)[i]).collect::<Vec<_>>()))
            .collect()
    };
    let (a, b) = (med(|r| &r.0), med(|r| &r.1));
    Ok(translation_report(first, order, t0, s_grid, scales, a, b))
}

fn translation_report(
    path: &SampledPath,
    order: FracOrder,
    t0: f64,
    s_grid: &[f64],
    scales: Scales,
    a: Vec<f64>,
    b: Vec<f64>,
) -> TranslationReport {
    let difference: Vec<f64> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| if x == y { 0.0 } else { x - y })
        .collect();
    let med = median(&difference);
    let edge = path.time(burn_in(&order, path));
    let radius = (-(scales.n_min as f64)).exp2();
    TranslationReport {
        eps: order.eps,
        t0,
        s_grid: s_grid.to_vec(),
        sigma_original: a,
        sigma_transformed: b,
        difference,
        median_difference: med,
        pass: (med - order.eps).abs() <= TRANSLATION_TOL,
        touches_burn_in: order.eps != 0.0 && t0 - radius < edge,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    fn path(values: Vec<f64>, dt: f64) -> SampledPath {
        SampledPath::new(0.0, dt, values).unwrap()
    }

    #[test]
    fn zero_order_is_identity() {
        let p = path((0..100).map(|k| (k as f64).sin()).collect(), 0.01);
        let d = frac_diff(&p, FracOrder::new(0.0)).unwrap();
        assert_eq!(d.values(), p.values());
    }

    #[test]
    fn weights_match_binomial_coefficients() {
        // w_j = Γ(j - ε) / (Γ(-ε) Γ(j + 1)), sign from Γ(-ε) < 0 for ε in (0,1)
        let eps: f64 = 0.3;
        let w = gl_weights(eps, 50);
        for (j, wj) in w.iter().enumerate().skip(1) {
            let j = j as f64;
            let mag = (ln_gamma(j - eps) - ln_gamma(1.0 - eps) - ln_gamma(j + 1.0)).exp() * eps;
            assert!((wj.abs() - mag).abs() < 1e-12 * mag.max(1e-300), "j={j}");
            assert!(*wj < 0.0);
        }
    }

    #[test]
    fn rejects_large_orders() {
        let p = path(vec![0.0; 10], 0.1);
        assert!(matches!(frac_diff(&p, FracOrder::new(1.0)), Err(Error::Unsupported(_))));
        assert!(frac_diff(&p, FracOrder { eps: 0.2, window: Some(20) }).is_err());
    }

    #[test]
    fn constant_signal_decays_like_partial_weight_sums() {
        // Σ_{j≤k} w_j = Γ(k + 1 - ε) / (Γ(1 - ε) Γ(k + 1)) for the GL weights.
        let (eps, c, dt) = (0.3f64, 2.0, 1e-4);
        let n = 20_000;
        let d = frac_diff(&path(vec![c; n], dt), FracOrder::new(eps)).unwrap();
        let scale = dt.powf(-eps);
        let partial = |k: usize| {
            let k = k as f64;
            (ln_gamma(k + 1.0 - eps) - ln_gamma(1.0 - eps) - ln_gamma(k + 1.0)).exp()
        };
        for &k in &[1000usize, 5000, 19_999] {
            let want = c * scale * partial(k);
            assert!((d.values()[k] - want).abs() < 1e-9 * want, "k={k}");
        }
        // the bound |y_k| ≤ 0.05·|c|·dt^-ε first holds near k ≈ 9000, not 1000
        let first = (1..n).find(|&k| partial(k) <= 0.05).unwrap();
        assert!((8000..10_000).contains(&first), "first = {first}");
        for k in first..n {
            assert!(d.values()[k].abs() <= 0.05 * c * scale * (1.0 + 1e-9));
        }
    }

    #[test]
    fn fft_and_direct_paths_agree() {
        let x: Vec<f64> = (0..3000).map(|k| ((k as f64) * 0.01).sin() + 0.3).collect();
        let w = gl_weights(0.4, 3000);
        let direct: Vec<f64> = (0..x.len())
            .map(|k| (0..=k).map(|j| w[j] * x[k - j]).sum())
            .collect();
        let size = 3000usize;
        assert!(size * size > DIRECT_LIMIT);
        let fast = convolve(&x, &w);
        for (a, b) in direct.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn linearity() {
        let dt = 1e-3;
        let x: Vec<f64> = (0..500).map(|k| (k as f64 * 0.03).cos()).collect();
        let y: Vec<f64> = (0..500).map(|k| (k as f64 * 0.001).powi(2)).collect();
        let (a, b) = (1.7, -0.4);
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let o = FracOrder::new(0.35);
        let fx = frac_diff(&path(x, dt), o).unwrap();
        let fy = frac_diff(&path(y, dt), o).unwrap();
        let fm = frac_diff(&path(mix, dt), o).unwrap();
        for k in 0..500 {
            let lin = a * fx.values()[k] + b * fy.values()[k];
            assert!((fm.values()[k] - lin).abs() <= 1e-12 * (1.0 + lin.abs()));
        }
    }

    #[test]
    fn semigroup_on_smooth_signal() {
        let n = 1 << 14;
        let dt = 1.0 / n as f64;
        // vanishes to high order at 0, so boundary terms stay small
        let x: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                t.powi(3) * (3.0 * t).sin()
            })
            .collect();
        let p = path(x, dt);
        let (e1, e2) = (0.2, 0.3);
        let twice = frac_diff(&frac_diff(&p, FracOrder::new(e1)).unwrap(), FracOrder::new(e2)).unwrap();
        let once = frac_diff(&p, FracOrder::new(e1 + e2)).unwrap();
        let start = burn_in(&FracOrder::new(e1 + e2), &p);
        let (mut num, mut den) = (0.0, 0.0);
        for k in start..n {
            num += (twice.values()[k] - once.values()[k]).powi(2);
            den += once.values()[k].powi(2);
        }
        assert!((num / den).sqrt() < 1e-3, "rel err {}", (num / den).sqrt());
    }

    #[test]
    fn window_limits_history_and_burn_in() {
        let p = path(vec![1.0; 1000], 1e-3);
        let o = FracOrder { eps: 0.3, window: Some(80) };
        assert_eq!(burn_in(&o, &p), 80);
        assert_eq!(burn_in(&FracOrder::new(0.3), &p), 50);
        let d = frac_diff(&p, o).unwrap();
        let w = gl_weights(0.3, 81);
        let want = 1e-3f64.powf(-0.3) * w.iter().sum::<f64>();
        assert!((d.values()[500] - want).abs() < 1e-12 * want.abs().max(1.0));
        assert_eq!(d.meta.burn_in, Some(80));
    }

    #[test]
    fn zero_order_translation_is_zero() {
        let p = path((0..4096).map(|k| ((k as f64) * 0.37).sin()).collect(), 1.0 / 4096.0);
        let r = verify_translation(&p, FracOrder::new(0.0), 0.5, &[-0.5, 0.0], Scales::new(2, 6)).unwrap();
        assert!(r.difference.iter().all(|d| *d == 0.0));
    }
}
