//! Incremental second moments, the deterministic frontier built from them,
//! and numerical checks of covariance expansions, bounds and moment
//! conditions.

use rand::Rng;
use rand_distr::Uniform;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{param, Error, Result};
use crate::estimate::{dyadic_indices, fit_frontier, level_cap, FrontierEstimate, PyramidCell, RegressionOptions, Scales};
use crate::function::ScalarFunctionSpec;
use crate::path::SampledPath;
use crate::process::ProcessSpec;
use crate::quad::integrate;
use crate::rng::stream;
use crate::stats::{fit_line, mean, nonneg_two_term_fit, std_error};
use crate::synth::{ensemble, ensemble_map, gw::term, Grid};

/// Absolute target for kernel quadratures.
pub const QUAD_TOL: f64 = 1e-9;
/// Smallest ensemble accepted by the Monte Carlo estimators.
pub const MIN_MC_PATHS: usize = 100;
/// Allowed second-difference defect of a deterministic frontier.
pub const CONCAVITY_TOL: f64 = 0.02;
/// Standard errors of slack granted to Monte Carlo ratios.
pub const MOMENT_SLACK_SE: f64 = 5.0;
/// Relative residual accepted by the mBm expansion fit.
pub const EXPANSION_TOL: f64 = 0.1;

fn splits(f: &ScalarFunctionSpec) -> Vec<f64> {
    f.centre().into_iter().collect()
}

fn gw_variance(h: &ScalarFunctionSpec, lambda: f64, depth: usize, t: f64, u: f64) -> f64 {
    let (ht, hu) = (h.eval(t), h.eval(u));
    (1..=depth)
        .map(|j| {
            let d = term(lambda, j, ht, t) - term(lambda, j, hu, u);
            d * d
        })
        .sum()
}

/// E[X_t - X_u]^2 in closed or series form. For stable integrals this is
/// ∫_u^t |η|^α, the quantity whose 1/α power sets the scale of the
/// increment.
pub fn incremental_variance_exact(spec: &ProcessSpec, t: f64, u: f64) -> Result<f64> {
    spec.validate()?;
    if t == u {
        return Ok(0.0);
    }
    let (lo, hi) = (t.min(u), t.max(u));
    match spec {
        ProcessSpec::Fbm { hurst } => Ok((hi - lo).powf(2.0 * hurst)),
        ProcessSpec::Gw { h, lambda, depth } => Ok(gw_variance(h, *lambda, *depth, t, u)),
        ProcessSpec::WienerIntegral { eta, psi } => {
            let f = |x: f64| eta.eval(x).powi(2);
            let d = psi.eval(t) - psi.eval(u);
            Ok(integrate(&f, lo, hi, QUAD_TOL, &splits(eta)) + d * d)
        }
        ProcessSpec::StableIntegral { eta, alpha } => {
            let f = |x: f64| eta.eval(x).abs().powf(*alpha);
            Ok(integrate(&f, lo, hi, QUAD_TOL, &splits(eta)))
        }
        ProcessSpec::Mbm { .. } => Err(Error::Unsupported(
            "mBm has no closed incremental variance; use incremental_variance_mc".into(),
        )),
    }
}

fn grid_index(grid: Grid, t: f64) -> Result<usize> {
    let k = (t / grid.dt).round();
    if k < 0.0 || k >= grid.n as f64 || (k * grid.dt - t).abs() > 1e-6 * grid.dt {
        return param(format!("t = {t} is not a point of the grid"));
    }
    Ok(k as usize)
}

/// Monte Carlo (mean, standard error) of (X_i - X_j)^2 for each index pair.
pub fn incremental_variances_mc(
    spec: &ProcessSpec,
    grid: Grid,
    pairs: &[(usize, usize)],
    n_paths: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if n_paths < MIN_MC_PATHS {
        return param(format!("need at least {MIN_MC_PATHS} paths, got {n_paths}"));
    }
    if pairs.iter().any(|&(i, j)| i >= grid.n || j >= grid.n) {
        return param("pair index outside the grid");
    }
    let sq = ensemble_map(spec, grid, seed, n_paths, |p| {
        let x = p.values();
        pairs.iter().map(|&(i, j)| (x[i] - x[j]).powi(2)).collect::<Vec<f64>>()
    })?;
    Ok((0..pairs.len())
        .map(|k| {
            let col: Vec<f64> = sq.iter().map(|r| r[k]).collect();
            (mean(&col), std_error(&col))
        })
        .collect())
}

/// Monte Carlo estimate of E[X_t - X_u]^2 with its standard error. Both
/// times must be grid points.
pub fn incremental_variance_mc(
    spec: &ProcessSpec,
    grid: Grid,
    t: f64,
    u: f64,
    n_paths: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let (i, j) = (grid_index(grid, t)?, grid_index(grid, u)?);
    if n_paths < MIN_MC_PATHS {
        return param(format!("need at least {MIN_MC_PATHS} paths, got {n_paths}"));
    }
    if i == j {
        return Ok((0.0, 0.0));
    }
    Ok(incremental_variances_mc(spec, grid, &[(i, j)], n_paths, seed)?[0])
}

/// Increment sizes on the fine points t0 + k·h, k_lo ≤ k ≤ k_hi.
enum SizeOracle<'a> {
    Closed(&'a ProcessSpec),
    /// Prefix sums of ∫ f over the fine intervals; size is
    /// (S + Δψ²)^(1/root).
    Integral {
        prefix: Vec<f64>,
        psi: Option<&'a ScalarFunctionSpec>,
        root: f64,
    },
}

impl SizeOracle<'_> {
    /// Size between fine points i < j (offsets from k_lo) at times ti, tj.
    fn size(&self, i: usize, j: usize, ti: f64, tj: f64) -> f64 {
        match self {
            SizeOracle::Closed(spec) => incremental_variance_exact(spec, ti, tj)
                .expect("validated spec")
                .sqrt(),
            SizeOracle::Integral { prefix, psi, root } => {
                let mut s = (prefix[j] - prefix[i]).max(0.0);
                if let Some(p) = psi {
                    s += (p.eval(tj) - p.eval(ti)).powi(2);
                }
                s.powf(1.0 / root)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterministicFrontier {
    pub estimate: FrontierEstimate,
    /// σ̂(0) on the same cone.
    pub local_exponent: f64,
    /// Largest amount by which a grid value falls below the chord of its
    /// neighbours.
    pub concavity_defect: f64,
}

impl DeterministicFrontier {
    pub fn is_concave(&self, tol: f64) -> bool {
        self.concavity_defect <= tol
    }

    pub fn to_json(&self) -> Value {
        let mut csv = String::from("s_prime,sigma\n");
        for (s, v) in self.estimate.s_grid.iter().zip(&self.estimate.sigma_hat) {
            csv.push_str(&format!("{s},{v}\n"));
        }
        json!({
            "t0": self.estimate.t0,
            "local_exponent": self.local_exponent,
            "concavity_defect": self.concavity_defect,
            "table": csv,
        })
    }
}

pub fn concavity_defect(s: &[f64], sigma: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 1..s.len().saturating_sub(1) {
        let (a, b, c) = (sigma[i - 1], sigma[i], sigma[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let w = (s[i] - s[i - 1]) / (s[i + 1] - s[i - 1]);
        worst = worst.max(a * (1.0 - w) + c * w - b);
    }
    worst
}

/// Frontier from exact increment sizes on the dyadic cone the pathwise
/// estimator would use on `grid`: same cells, same rays, no smoothing and
/// no count correction. Gaussian processes use √E[X_t - X_u]^2, stable
/// integrals use (∫|η|^α)^(1/α).
pub fn deterministic_frontier(
    spec: &ProcessSpec,
    t0: f64,
    s_grid: &[f64],
    scales: Scales,
    grid: Grid,
) -> Result<DeterministicFrontier> {
    spec.validate()?;
    grid.validate()?;
    scales.validate()?;
    let t_end = grid.time(grid.n - 1);
    if !(t0 >= 0.0 && t0 <= t_end) {
        return param(format!("t0 = {t0} outside [0, {t_end}]"));
    }
    let cap = level_cap(grid.dt)?;
    if scales.n_max > cap {
        return Err(Error::InsufficientResolution(format!(
            "n_max = {} exceeds the finest admissible level {cap}",
            scales.n_max
        )));
    }
    let h = (-(cap as f64)).exp2();
    let k_lo = ((0.0 - t0) / h - 1e-9).ceil() as i64;
    let k_hi = ((t_end - t0) / h + 1e-9).floor() as i64;
    let time = |k: i64| t0 + k as f64 * h;
    let integral_oracle = |f: &dyn Fn(f64) -> f64, centre: Vec<f64>, psi, root| {
        let mut prefix = vec![0.0; (k_hi - k_lo + 1) as usize];
        for k in k_lo..k_hi {
            let i = (k - k_lo) as usize;
            prefix[i + 1] = prefix[i] + integrate(&f, time(k), time(k + 1), QUAD_TOL * h, &centre);
        }
        SizeOracle::Integral { prefix, psi, root }
    };
    let oracle = match spec {
        ProcessSpec::Fbm { .. } | ProcessSpec::Gw { .. } => SizeOracle::Closed(spec),
        ProcessSpec::WienerIntegral { eta, psi } => {
            integral_oracle(&|x| eta.eval(x).powi(2), splits(eta), Some(psi), 2.0)
        }
        ProcessSpec::StableIntegral { eta, alpha } => {
            integral_oracle(&|x| eta.eval(x).abs().powf(*alpha), splits(eta), None, *alpha)
        }
        ProcessSpec::Mbm { .. } => {
            return Err(Error::Unsupported(
                "deterministic frontier needs an exact incremental variance".into(),
            ))
        }
    };
    let mut cells = Vec::new();
    for n in scales.n_min..=scales.n_max {
        for m in 0..=(cap - n) {
            let step = 1i64 << (cap - n - m);
            let kmax = 1i64 << m;
            let ks: Vec<i64> = (-kmax..=kmax)
                .map(|k| k * step)
                .filter(|k| (k_lo..=k_hi).contains(k))
                .collect();
            let mut value = 0.0f64;
            for w in ks.windows(2) {
                let (i, j) = ((w[0] - k_lo) as usize, (w[1] - k_lo) as usize);
                value = value.max(oracle.size(i, j, time(w[0]), time(w[1])));
            }
            let pairs = ks.len().saturating_sub(1);
            if pairs >= 2 {
                cells.push(PyramidCell { n, m, value, pairs });
            }
        }
    }
    let estimate = fit_frontier(t0, &cells, scales, s_grid, RegressionOptions::EXACT)?;
    let local = fit_frontier(t0, &cells, scales, &[0.0], RegressionOptions::EXACT)?;
    let concavity_defect = concavity_defect(&estimate.s_grid, &estimate.sigma_hat);
    Ok(DeterministicFrontier {
        estimate,
        local_exponent: local.sigma_hat[0],
        concavity_defect,
    })
}

/// E|X_t - X_u|^η ≤ C|t - u|^{1+μ} ρ^{-ν} for t, u in B(t0, ρ), ρ ≤ ρ0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentCondition {
    pub eta_order: f64,
    pub mu: f64,
    pub nu: f64,
    pub c: f64,
    pub rho0: f64,
}

impl MomentCondition {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_order > 0.0 && self.mu > 0.0 && self.nu < 0.0 && self.c > 0.0 && self.rho0 > 0.0) {
            return param("moment condition needs η > 0, μ > 0, ν < 0, C > 0 and ρ0 > 0");
        }
        Ok(())
    }

    /// (s', σ) = (ν/η, μ/η), the point the condition puts under the frontier.
    pub fn implied_point(&self) -> (f64, f64) {
        (self.nu / self.eta_order, self.mu / self.eta_order)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCell {
    pub n: usize,
    pub m: usize,
    pub pairs: usize,
    /// Empirical moment over the bound, averaged over the cell's pairs.
    pub ratio: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub condition: MomentCondition,
    pub t0: f64,
    pub n_paths: usize,
    pub cells: Vec<MomentCell>,
    pub max_ratio: f64,
    pub implied_s_prime: f64,
    pub implied_sigma: f64,
    /// No cell exceeds 1 by more than MOMENT_SLACK_SE standard errors.
    pub pass: bool,
}

impl MomentReport {
    pub fn to_json(&self) -> Value {
        let mut csv = String::from("n,m,pairs,ratio,stderr\n");
        for c in &self.cells {
            csv.push_str(&format!("{},{},{},{},{}\n", c.n, c.m, c.pairs, c.ratio, c.stderr));
        }
        json!({
            "condition": self.condition,
            "t0": self.t0,
            "n_paths": self.n_paths,
            "max_ratio": self.max_ratio,
            "implied_point": [self.implied_s_prime, self.implied_sigma],
            "pass": self.pass,
            "table": csv,
        })
    }
}

/// Empirical check of a moment condition on an ensemble sharing one grid.
/// Cells are the dyadic (n, m) cells of the oscillation pyramid with
/// 2^-n ≤ ρ0.
pub fn check_moment_condition(
    paths: &[SampledPath],
    t0: f64,
    cond: MomentCondition,
    scales: Scales,
) -> Result<MomentReport> {
    cond.validate()?;
    scales.validate()?;
    let first = paths.first().ok_or_else(|| Error::Parameter("empty ensemble".into()))?;
    if paths.len() < 2 {
        return param("need at least two paths");
    }
    if paths
        .iter()
        .any(|p| p.len() != first.len() || p.dt() != first.dt() || p.t_start() != first.t_start())
    {
        return param("ensemble paths must share one grid");
    }
    if !first.contains(t0) {
        return param(format!("t0 = {t0} outside the path domain"));
    }
    let cap = level_cap(first.dt())?;
    // per cell: (n, m, [(i, j, bound)])
    let mut layout = Vec::new();
    for n in scales.n_min..=scales.n_max.min(cap) {
        let rho = (-(n as f64)).exp2();
        if rho > cond.rho0 {
            continue;
        }
        for m in 0..=(cap - n) {
            let idx = dyadic_indices(first, t0, n, m);
            let pairs: Vec<(usize, usize, f64)> = idx
                .windows(2)
                .filter(|w| w[0] != w[1])
                .map(|w| {
                    let d = (first.time(w[1]) - first.time(w[0])).abs();
                    (w[0], w[1], cond.c * d.powf(1.0 + cond.mu) * rho.powf(-cond.nu))
                })
                .collect();
            if !pairs.is_empty() {
                layout.push((n, m, pairs));
            }
        }
    }
    if layout.is_empty() {
        return param("no dyadic cell fits inside rho0");
    }
    let per_path: Vec<Vec<f64>> = paths
        .par_iter()
        .map(|p| {
            let x = p.values();
            layout
                .iter()
                .map(|(_, _, pairs)| {
                    pairs
                        .iter()
                        .map(|&(i, j, b)| (x[j] - x[i]).abs().powf(cond.eta_order) / b)
                        .sum::<f64>()
                        / pairs.len() as f64
                })
                .collect()
        })
        .collect();
    let cells: Vec<MomentCell> = layout
        .iter()
        .enumerate()
        .map(|(k, (n, m, pairs))| {
            let col: Vec<f64> = per_path.iter().map(|r| r[k]).collect();
            MomentCell {
                n: *n,
                m: *m,
                pairs: pairs.len(),
                ratio: mean(&col),
                stderr: std_error(&col),
            }
        })
        .collect();
    let max_ratio = cells.iter().map(|c| c.ratio).fold(0.0, f64::max);
    let pass = cells.iter().all(|c| c.ratio - MOMENT_SLACK_SE * c.stderr <= 1.0);
    let (implied_s_prime, implied_sigma) = cond.implied_point();
    Ok(MomentReport {
        condition: cond,
        t0,
        n_paths: paths.len(),
        cells,
        max_ratio,
        implied_s_prime,
        implied_sigma,
        pass,
    })
}

/// Synthesizes the ensemble, then runs `check_moment_condition`.
pub fn check_moment_condition_spec(
    spec: &ProcessSpec,
    grid: Grid,
    seed: u64,
    n_paths: usize,
    t0: f64,
    cond: MomentCondition,
    scales: Scales,
) -> Result<MomentReport> {
    let paths = ensemble(spec, grid, seed, n_paths)?;
    check_moment_condition(&paths, t0, cond, scales)
}

/// (2p - 1)!!
pub fn double_factorial_odd(p: u32) -> f64 {
    (1..=p).map(|k| (2 * k - 1) as f64).product()
}

/// Empirical E[Y^{2p}] / (E[Y^2])^p from paired samples of Y^2 and Y^{2p}.
pub fn gaussian_moment_ratio(y2: &[f64], y2p: &[f64], p: u32) -> Result<f64> {
    if !(1..=3).contains(&p) {
        return param(format!("p must be 1, 2 or 3, got {p}"));
    }
    if y2.is_empty() || y2.len() != y2p.len() {
        return param("moment samples must be non-empty and of equal length");
    }
    let m2 = mean(y2);
    if m2 == 0.0 {
        return Err(Error::Numeric("zero second moment".into()));
    }
    Ok(mean(y2p) / m2.powi(p as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionScale {
    pub n: usize,
    pub pairs: usize,
    /// Root mean square of the relative fit error.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MbmExpansionReport {
    pub t0: f64,
    pub k_hat: f64,
    /// None when H is constant over the sampled pairs.
    pub l_hat: Option<f64>,
    pub scales: Vec<ExpansionScale>,
    pub pass: bool,
}

impl MbmExpansionReport {
    pub fn to_json(&self) -> Value {
        let mut csv = String::from("n,pairs,residual\n");
        for s in &self.scales {
            csv.push_str(&format!("{},{},{}\n", s.n, s.pairs, s.residual));
        }
        json!({
            "t0": self.t0,
            "k_hat": self.k_hat,
            "l_hat": self.l_hat,
            "pass": self.pass,
            "table": csv,
        })
    }
}

/// Fits Monte Carlo increment variances of mBm to
/// K|t - u|^{H(t)+H(u)} + L(H(t) - H(u))^2 on the pairs of nine points
/// t0 + k·2^-n/4 at each scale n, in relative least squares.
pub fn mbm_expansion_check(
    h: &ScalarFunctionSpec,
    t0: f64,
    scales: Scales,
    grid: Grid,
    n_paths: usize,
    seed: u64,
) -> Result<MbmExpansionReport> {
    grid.validate()?;
    if scales.n_max < scales.n_min + 1 {
        return Err(Error::TooFewScales {
            min: 1,
            got: scales.n_max.saturating_sub(scales.n_min),
        });
    }
    if (-(scales.n_max as f64)).exp2() / 4.0 < grid.dt * (1.0 - 1e-9) {
        return Err(Error::InsufficientResolution(format!(
            "scale 2^-{} is finer than four grid steps",
            scales.n_max
        )));
    }
    let mut pairs = Vec::new();
    let mut scale_of = Vec::new();
    for n in scales.n_min..=scales.n_max {
        let r = (-(n as f64)).exp2() / 4.0;
        let mut pts: Vec<usize> = (-4i64..=4)
            .map(|k| t0 + k as f64 * r)
            .filter(|&t| t >= 0.0 && t <= grid.time(grid.n - 1))
            .map(|t| (t / grid.dt).round() as usize)
            .collect();
        pts.dedup();
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                pairs.push((pts[a], pts[b]));
                scale_of.push(n);
            }
        }
    }
    let spec = ProcessSpec::Mbm { h: h.clone() };
    let v = incremental_variances_mc(&spec, grid, &pairs, n_paths, seed)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut y = Vec::new();
    for (&(i, j), &(vij, _)) in pairs.iter().zip(&v) {
        let (t, u) = (grid.time(i), grid.time(j));
        let (ht, hu) = (h.eval(t), h.eval(u));
        a.push((u - t).abs().powf(ht + hu));
        b.push((ht - hu).powi(2));
        y.push(vij);
    }
    let rel = |col: &[f64]| -> Vec<f64> { col.iter().zip(&y).map(|(c, v)| c / v).collect() };
    let (ar, br) = (rel(&a), rel(&b));
    let ones = vec![1.0; y.len()];
    let identifiable = br.iter().any(|q| *q > 1e-12);
    let (k_hat, l_hat) = if identifiable {
        let (k, l) = nonneg_two_term_fit(&ar, &br, &ones);
        (k, Some(l))
    } else {
        let aa: f64 = ar.iter().map(|x| x * x).sum();
        (ar.iter().sum::<f64>() / aa, None)
    };
    let l = l_hat.unwrap_or(0.0);
    let mut report_scales = Vec::new();
    for n in scales.n_min..=scales.n_max {
        let errs: Vec<f64> = (0..y.len())
            .filter(|&k| scale_of[k] == n)
            .map(|k| (1.0 - k_hat * ar[k] - l * br[k]).powi(2))
            .collect();
        report_scales.push(ExpansionScale {
            n,
            pairs: errs.len(),
            residual: mean(&errs).sqrt(),
        });
    }
    let pass = report_scales.iter().rev().take(2).all(|s| s.residual < EXPANSION_TOL);
    Ok(MbmExpansionReport {
        t0,
        k_hat,
        l_hat,
        scales: report_scales,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecadeRatio {
    /// Pairs with 10^decade ≤ |t - u| < 10^(decade+1).
    pub decade: i32,
    pub pairs: usize,
    pub max_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequencePoint {
    pub n: usize,
    pub t: f64,
    pub u: f64,
    /// |sin λ^n t_n|
    pub sin_abs: f64,
    /// |sin λ^n u_n - sin λ^n t_n|
    pub sin_increment: f64,
    /// √E[X_t - X_u]^2 / |t - u|^{(H(t)+H(u))/2}
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GwBoundsReport {
    pub k_hat: f64,
    pub l_hat: f64,
    pub decades: Vec<DecadeRatio>,
    /// Slope of log10(max ratio) against decade; negative values mean the
    /// bound degrades at small separations.
    pub upper_growth: f64,
    pub upper_pass: bool,
    pub sequence: Vec<SequencePoint>,
    pub k1_hat: f64,
    pub l1_hat: f64,
    /// Slope of ln(ratio) against n along the sequence.
    pub lower_decay: f64,
    pub lower_pass: bool,
}

impl GwBoundsReport {
    pub fn to_json(&self) -> Value {
        let mut csv = String::from("n,t,u,sin_abs,sin_increment,ratio\n");
        for p in &self.sequence {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.n, p.t, p.u, p.sin_abs, p.sin_increment, p.ratio
            ));
        }
        json!({
            "k_hat": self.k_hat,
            "l_hat": self.l_hat,
            "decades": self.decades,
            "upper_growth": self.upper_growth,
            "upper_pass": self.upper_pass,
            "k1_hat": self.k1_hat,
            "l1_hat": self.l1_hat,
            "lower_decay": self.lower_decay,
            "lower_pass": self.lower_pass,
            "table": csv,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwBoundsConfig {
    pub h: ScalarFunctionSpec,
    pub lambda: f64,
    pub depth: usize,
    pub window: (f64, f64),
    pub n_pairs: usize,
    pub seed: u64,
    /// Centre of the lower-bound sequences.
    pub t0: f64,
    pub n_seq: usize,
}

/// Worst tolerated upper_growth.
pub const GW_UPPER_GROWTH_MIN: f64 = -0.1;
/// Worst tolerated lower_decay.
pub const GW_LOWER_DECAY_MIN: f64 = -0.05;

/// Upper covariance bound over random pairs and lower bound along the
/// sequences t_n = t0 + π/λ^n (shifted by π/(2λ^n) when |sin λ^n t_n| ≤ ½),
/// u_n = t_n + h_n with the first h_n in [λ^-(n+1), λ^-n] for which
/// |sin λ^n u_n - sin λ^n t_n| ≥ 1/10.
pub fn gw_covariance_bounds_check(cfg: &GwBoundsConfig) -> Result<GwBoundsReport> {
    let spec = ProcessSpec::Gw {
        h: cfg.h.clone(),
        lambda: cfg.lambda,
        depth: cfg.depth,
    };
    spec.validate()?;
    let (wa, wb) = cfg.window;
    if !(wb > wa && wa >= 0.0) {
        return param("window must satisfy 0 ≤ a < b");
    }
    if cfg.n_pairs < 10 || cfg.n_seq < 3 {
        return param("need at least 10 pairs and 3 sequence terms");
    }
    let hf = &cfg.h;
    let var = |t: f64, u: f64| gw_variance(hf, cfg.lambda, cfg.depth, t, u);

    let mut rng = stream(cfg.seed, 0);
    let dmin: f64 = 1e-6;
    let dmax = (wb - wa) / 2.0;
    let lu = Uniform::new(dmin.ln(), dmax.ln()).map_err(|e| Error::Parameter(e.to_string()))?;
    let ut = Uniform::new(wa, wb).map_err(|e| Error::Parameter(e.to_string()))?;
    let mut rows = Vec::with_capacity(cfg.n_pairs);
    while rows.len() < cfg.n_pairs {
        let t: f64 = rng.sample(ut);
        let d = rng.sample(lu).exp();
        let u = if t + d <= wb { t + d } else { t - d };
        if u < wa {
            continue;
        }
        let (ht, hu) = (hf.eval(t), hf.eval(u));
        let v = var(t, u);
        if v > 0.0 {
            rows.push((d, d.powf(ht + hu), (ht - hu).powi(2), v));
        }
    }
    let ar: Vec<f64> = rows.iter().map(|r| r.1 / r.3).collect();
    let br: Vec<f64> = rows.iter().map(|r| r.2 / r.3).collect();
    let (mut k, mut l) = nonneg_two_term_fit(&ar, &br, &vec![1.0; rows.len()]);
    if k == 0.0 && l == 0.0 {
        k = 1.0;
    }
    let worst = rows
        .iter()
        .map(|r| r.3 / (k * r.1 + l * r.2))
        .fold(0.0, f64::max);
    k *= worst;
    l *= worst;
    let mut decades: Vec<DecadeRatio> = Vec::new();
    for r in &rows {
        let dec = r.0.log10().floor() as i32;
        let ratio = r.3 / (k * r.1 + l * r.2);
        match decades.iter_mut().find(|x| x.decade == dec) {
            Some(x) => {
                x.pairs += 1;
                x.max_ratio = x.max_ratio.max(ratio);
            }
            None => decades.push(DecadeRatio {
                decade: dec,
                pairs: 1,
                max_ratio: ratio,
            }),
        }
    }
    decades.sort_by_key(|x| x.decade);
    let used: Vec<&DecadeRatio> = decades.iter().filter(|x| x.pairs >= 5).collect();
    let upper_growth = fit_line(
        &used.iter().map(|x| x.decade as f64).collect::<Vec<_>>(),
        &used.iter().map(|x| x.max_ratio.log10()).collect::<Vec<_>>(),
    )
    .map(|f| f.slope)
    .unwrap_or(f64::NAN);
    let upper_pass = upper_growth >= GW_UPPER_GROWTH_MIN;

    let lam = cfg.lambda;
    let mut sequence = Vec::with_capacity(cfg.n_seq);
    for n in 1..=cfg.n_seq {
        let ln = lam.powi(n as i32);
        let mut t = cfg.t0 + std::f64::consts::PI / ln;
        if (ln * t).sin().abs() <= 0.5 {
            t += std::f64::consts::FRAC_PI_2 / ln;
        }
        let (hlo, hhi) = (1.0 / (ln * lam), 1.0 / ln);
        let cand = |q: usize| hlo + (hhi - hlo) * q as f64 / 64.0;
        let inc = |hq: f64| ((ln * (t + hq)).sin() - (ln * t).sin()).abs();
        let hn = (0..=64)
            .map(cand)
            .find(|&hq| inc(hq) >= 0.1)
            .unwrap_or_else(|| (0..=64).map(cand).fold(hlo, |b, x| if inc(x) > inc(b) { x } else { b }));
        let u = t + hn;
        let (ht, hu) = (hf.eval(t), hf.eval(u));
        sequence.push(SequencePoint {
            n,
            t,
            u,
            sin_abs: (ln * t).sin().abs(),
            sin_increment: inc(hn),
            ratio: var(t, u).sqrt() / hn.powf((ht + hu) / 2.0),
        });
    }
    let l1_hat = l.sqrt();
    let k1_hat = sequence
        .iter()
        .map(|p| {
            let dh = (hf.eval(p.t) - hf.eval(p.u)).abs();
            let a = (p.u - p.t).powf((hf.eval(p.t) + hf.eval(p.u)) / 2.0);
            p.ratio + l1_hat * dh / a
        })
        .fold(f64::INFINITY, f64::min);
    let lower_decay = fit_line(
        &sequence.iter().map(|p| p.n as f64).collect::<Vec<_>>(),
        &sequence.iter().map(|p| p.ratio.ln()).collect::<Vec<_>>(),
    )
    .map(|f| f.slope)
    .unwrap_or(f64::NAN);
    let lower_pass = k1_hat > 0.0 && lower_decay >= GW_LOWER_DECAY_MIN;
    Ok(GwBoundsReport {
        k_hat: k,
        l_hat: l,
        decades,
        upper_growth,
        upper_pass,
        sequence,
        k1_hat,
        l1_hat,
        lower_decay,
        lower_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::default_s_grid;

    fn c(v: f64) -> ScalarFunctionSpec {
        ScalarFunctionSpec::constant(v)
    }

    fn gw(h: f64) -> ProcessSpec {
        ProcessSpec::gw_auto(c(h), 2.0, h)
    }

    #[test]
    fn exact_examples() {
        let v = incremental_variance_exact(&ProcessSpec::Fbm { hurst: 0.5 }, 0.3, 0.7).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
        let w = ProcessSpec::WienerIntegral { eta: c(1.0), psi: c(0.0) };
        let v = incremental_variance_exact(&w, 0.2, 0.9).unwrap();
        assert!((v - 0.7).abs() < 1e-9);
        assert_eq!(incremental_variance_exact(&gw(0.5), 0.1, 0.1).unwrap(), 0.0);
        let m = ProcessSpec::Mbm { h: c(0.5) };
        assert!(matches!(incremental_variance_exact(&m, 0.1, 0.2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn stable_exact_is_kernel_power_integral() {
        let s = ProcessSpec::StableIntegral {
            eta: ScalarFunctionSpec::Linear { a: 0.0, b: 1.0 },
            alpha: 1.5,
        };
        // ∫_0^1 t^1.5 dt
        let v = incremental_variance_exact(&s, 0.0, 1.0).unwrap();
        assert!((v - 0.4).abs() < 1e-9);
    }

    #[test]
    fn mc_rejects_small_ensembles_and_off_grid_times() {
        let g = Grid::unit(64);
        let f = ProcessSpec::Fbm { hurst: 0.5 };
        assert!(incremental_variance_mc(&f, g, 0.25, 0.5, 50, 1).is_err());
        assert!(incremental_variance_mc(&f, g, 0.2501, 0.5, 200, 1).is_err());
        assert_eq!(incremental_variance_mc(&f, g, 0.25, 0.25, 100, 1).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn fbm_mc_matches_exact() {
        let spec = ProcessSpec::Fbm { hurst: 0.7 };
        let g = Grid::new(1001, 0.001);
        let (est, se) = incremental_variance_mc(&spec, g, 0.3, 0.7, 10_000, 3).unwrap();
        let exact = 0.4f64.powf(1.4);
        assert!((est - exact).abs() < 5.0 * se, "{est} vs {exact} ± {se}");
    }

    #[test]
    fn fbm_deterministic_frontier_is_the_line() {
        let g = Grid::unit(1 << 14);
        let s = default_s_grid();
        for h in [0.3, 0.5, 0.7] {
            let d = deterministic_frontier(&ProcessSpec::Fbm { hurst: h }, 0.5, &s, Scales::default_for(g.n), g)
                .unwrap();
            for (x, v) in s.iter().zip(&d.estimate.sigma_hat) {
                assert!((v - (h + x)).abs() < 1e-9, "H={h} s'={x}: {v}");
            }
            assert!((d.local_exponent - h).abs() < 1e-9);
            assert!(d.is_concave(CONCAVITY_TOL));
        }
    }

    #[test]
    fn gw_deterministic_frontier_is_near_the_line() {
        let g = Grid::unit(1 << 14);
        let s = default_s_grid();
        let d = deterministic_frontier(&gw(0.5), 0.5, &s, Scales::default_for(g.n), g).unwrap();
        for (x, v) in s.iter().zip(&d.estimate.sigma_hat) {
            assert!((v - (0.5 + x)).abs() < 0.05, "s'={x}: {v}");
        }
        assert!(d.is_concave(CONCAVITY_TOL));
    }

    #[test]
    fn mbm_deterministic_frontier_is_unsupported() {
        let g = Grid::unit(1 << 10);
        let r = deterministic_frontier(&ProcessSpec::Mbm { h: c(0.5) }, 0.5, &[0.0], Scales::new(2, 5), g);
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn concavity_defect_of_a_kink() {
        let s = [-0.2, -0.1, 0.0];
        assert_eq!(concavity_defect(&s, &[0.0, 0.1, 0.1]), 0.0);
        assert!((concavity_defect(&s, &[0.0, 0.0, 0.2]) - 0.1).abs() < 1e-12);
    }

    fn canonical(c: f64) -> MomentCondition {
        MomentCondition {
            eta_order: 4.0,
            mu: 1.8,
            nu: -0.01,
            c,
            rho0: 0.25,
        }
    }

    #[test]
    fn fbm_moment_condition_passes_and_fails_by_constant() {
        let g = Grid::unit(1 << 12);
        let paths = ensemble(&ProcessSpec::Fbm { hurst: 0.7 }, g, 5, 400).unwrap();
        let sc = Scales::new(2, 7);
        let ok = check_moment_condition(&paths, 0.5, canonical(3.3), sc).unwrap();
        assert!(ok.pass, "max ratio {}", ok.max_ratio);
        assert_eq!((ok.implied_s_prime, ok.implied_sigma), (-0.0025, 0.45));
        let bad = check_moment_condition(&paths, 0.5, canonical(2.0), sc).unwrap();
        assert!(!bad.pass);
    }

    #[test]
    fn constant_paths_have_zero_ratio() {
        let paths = vec![SampledPath::new(0.0, 1.0 / 1024.0, vec![2.0; 1025]).unwrap(); 3];
        let r = check_moment_condition(&paths, 0.5, canonical(1e-3), Scales::new(2, 6)).unwrap();
        assert_eq!(r.max_ratio, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn moment_condition_rejects_non_negative_nu() {
        let mut c = canonical(1.0);
        c.nu = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn moment_ratio_examples() {
        let y2 = [1.0, 4.0, 0.25];
        assert!((gaussian_moment_ratio(&y2, &y2, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!(gaussian_moment_ratio(&y2, &y2, 4).is_err());
        assert_eq!(double_factorial_odd(2), 3.0);
        assert_eq!(double_factorial_odd(3), 15.0);
    }

    #[test]
    fn constant_h_expansion_recovers_unit_constant() {
        let r = mbm_expansion_check(&c(0.5), 0.5, Scales::new(2, 6), Grid::unit(1 << 10), 400, 11).unwrap();
        assert!(r.l_hat.is_none());
        assert!((r.k_hat - 1.0).abs() < 0.1, "K = {}", r.k_hat);
        assert!(r.pass, "{:?}", r.scales);
    }

    #[test]
    fn gw_bounds_for_constant_h() {
        let h = 0.5;
        let cfg = GwBoundsConfig {
            h: c(h),
            lambda: 2.0,
            depth: crate::process::gw_min_depth(h, 2.0, crate::process::GW_TOL),
            window: (0.2, 0.8),
            n_pairs: 1000,
            seed: 4,
            t0: 0.5,
            n_seq: 20,
        };
        let r = gw_covariance_bounds_check(&cfg).unwrap();
        assert!(r.upper_pass, "growth {}", r.upper_growth);
        assert!(r.sequence.iter().all(|p| p.sin_abs > 0.5));
        for p in &r.sequence {
            let hn = p.u - p.t;
            let ln = 2f64.powi(p.n as i32);
            assert!(hn >= 1.0 / (2.0 * ln) - 1e-15 && hn <= 1.0 / ln + 1e-15);
        }
        assert!(r.lower_pass, "k1 {} decay {}", r.k1_hat, r.lower_decay);
        assert_eq!(r.l_hat, 0.0);
    }
}
