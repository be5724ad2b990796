//! Empirical 2-microlocal frontier from dyadic oscillation statistics.
//!
//! For a ball B(t0, 2^-n) and a resolution 2^-(m+n), M(n,m) is the largest
//! increment between adjacent points of {t0 + k·2^-(m+n) : |k| ≤ 2^m}
//! snapped to the grid. A frontier point σ(s') bounds
//! M(n,m) ≲ 2^{-σ(m+n)} 2^{s'n}, so along any ray m ≈ κn the quantity
//! -log2 M + s'n grows like σ·(m+n). We fit that slope on a few rays and
//! keep the smallest, since the bound must hold on all of them.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::frontier::Frontier;
use crate::path::SampledPath;
use crate::quad::integrate;
use crate::stats::{fit_line, LineFit};

/// Slopes m/n of the rays used by the regression.
pub const RAYS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
/// Minimum cells on a ray for it to take part.
pub const MIN_RAY_CELLS: usize = 3;
/// Minimum n_max - n_min.
pub const MIN_SCALE_SPAN: usize = 3;
/// Exponents at or above this are reported as saturated.
pub const SATURATION: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub n_min: usize,
    pub n_max: usize,
}

impl Scales {
    pub fn new(n_min: usize, n_max: usize) -> Self {
        Self { n_min, n_max }
    }

    /// n_min = 2, n_max = floor(log2 N) - 6.
    pub fn default_for(samples: usize) -> Self {
        let l = (samples as f64).log2().floor() as usize;
        Self::new(2, l.saturating_sub(6))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < self.n_min + MIN_SCALE_SPAN {
            return Err(Error::TooFewScales {
                min: MIN_SCALE_SPAN,
                got: self.n_max.saturating_sub(self.n_min),
            });
        }
        Ok(())
    }
}

/// {-0.9, -0.8, ..., 0}.
pub fn default_s_grid() -> Vec<f64> {
    (0..=9).map(|k| (k as f64 - 9.0) / 10.0).collect()
}

/// Largest admissible m + n: resolution 2^-(m+n) stays at least 4·dt.
pub fn level_cap(dt: f64) -> Result<usize> {
    let l = (1.0 / dt).log2() + 1e-9;
    if l < 3.0 {
        return Err(Error::InsufficientResolution(format!(
            "dt = {dt} leaves no admissible dyadic level"
        )));
    }
    Ok(l.floor() as usize - 2)
}

fn ball_indices(path: &SampledPath, t0: f64, rho: f64) -> (isize, isize) {
    let slack = 1e-9;
    let lo = ((t0 - rho - path.t_start()) / path.dt() - slack).ceil() as isize;
    let hi = ((t0 + rho - path.t_start()) / path.dt() + slack).floor() as isize;
    (lo.max(0), hi.min(path.len() as isize - 1))
}

/// max - min of the samples whose grid time lies in [t0 - ρ, t0 + ρ].
pub fn oscillation(path: &SampledPath, t0: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return param(format!("radius must be positive, got {rho}"));
    }
    let (lo, hi) = ball_indices(path, t0, rho);
    if hi < lo + 1 {
        return Err(Error::InsufficientResolution(format!(
            "ball B({t0}, {rho}) holds fewer than 2 samples"
        )));
    }
    let v = &path.values()[lo as usize..=hi as usize];
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PyramidCell {
    pub n: usize,
    pub m: usize,
    /// Largest adjacent increment.
    pub value: f64,
    /// Number of adjacent pairs inside the path.
    pub pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationPyramid {
    pub t0: f64,
    pub scales: Scales,
    pub level_cap: usize,
    pub cells: Vec<PyramidCell>,
}

impl OscillationPyramid {
    pub fn get(&self, n: usize, m: usize) -> Option<&PyramidCell> {
        self.cells.iter().find(|c| c.n == n && c.m == m)
    }

    pub fn is_flat(&self) -> bool {
        self.cells.iter().all(|c| c.value == 0.0)
    }
}

/// Grid indices of t0 + k·h for |k| ≤ K that fall inside the path, in
/// increasing k.
pub fn dyadic_indices(path: &SampledPath, t0: f64, n: usize, m: usize) -> Vec<usize> {
    let h = (-((m + n) as f64)).exp2();
    let kmax = 1i64 << m;
    let (a, b) = (path.t_start(), path.t_end());
    let slack = 1e-9 * path.dt();
    (-kmax..=kmax)
        .filter_map(|k| {
            let t = t0 + k as f64 * h;
            (t >= a - slack && t <= b + slack).then(|| path.nearest_index(t))
        })
        .collect()
}

pub fn build_pyramid(path: &SampledPath, t0: f64, scales: Scales) -> Result<OscillationPyramid> {
    scales.validate()?;
    if !path.contains(t0) {
        return param(format!(
            "t0 = {t0} outside the path domain [{}, {}]",
            path.t_start(),
            path.t_end()
        ));
    }
    let cap = level_cap(path.dt())?;
    if scales.n_max > cap {
        return Err(Error::InsufficientResolution(format!(
            "n_max = {} exceeds the finest admissible level {cap}",
            scales.n_max
        )));
    }
    let x = path.values();
    let mut cells = Vec::new();
    for n in scales.n_min..=scales.n_max {
        for m in 0..=(cap - n) {
            let idx = dyadic_indices(path, t0, n, m);
            let mut value = 0.0f64;
            let mut pairs = 0;
            for w in idx.windows(2) {
                if w[0] != w[1] {
                    value = value.max((x[w[1]] - x[w[0]]).abs());
                    pairs += 1;
                }
            }
            if pairs >= 2 {
                cells.push(PyramidCell { n, m, value, pairs });
            }
        }
    }
    Ok(OscillationPyramid {
        t0,
        scales,
        level_cap: cap,
        cells,
    })
}

/// E[max of k i.i.d. |N(0,1)|] = ∫_0^∞ 1 - erf(x/√2)^k dx.
pub fn expected_abs_normal_max(k: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&k) {
        return *v;
    }
    let kf = k as f64;
    let f = |x: f64| {
        let e = statrs::function::erf::erf(x / std::f64::consts::SQRT_2);
        1.0 - (kf * e.ln()).exp()
    };
    let v = integrate(&f, 0.0, 12.0, 1e-11, &[]);
    cache.lock().unwrap().insert(k, v);
    v
}

/// How cells are turned into regression inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionOptions {
    /// Replace M(n,m) by the max over m-1, m, m+1.
    pub smoothing: bool,
    /// Divide M(n,m) by the expected maximum of as many |N(0,1)| as the
    /// cell has pairs, so that cells with many pairs are not favoured.
    pub count_correction: bool,
}

impl RegressionOptions {
    pub const PATHWISE: Self = Self {
        smoothing: true,
        count_correction: true,
    };
    pub const EXACT: Self = Self {
        smoothing: false,
        count_correction: false,
    };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierEstimate {
    pub t0: f64,
    pub s_grid: Vec<f64>,
    pub sigma_hat: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Ray slope m/n that produced each minimum.
    pub ray: Vec<f64>,
    pub residual_norm: Vec<f64>,
    pub scales: Scales,
    pub m_max: usize,
}

impl FrontierEstimate {
    pub fn at(&self, s: f64) -> Option<f64> {
        self.s_grid
            .iter()
            .position(|x| (x - s).abs() < 1e-12)
            .map(|i| self.sigma_hat[i])
    }

    /// Concave, non-decreasing, slope-limited envelope of the estimate: the
    /// least concave majorant of the points with slopes clamped to [0, 1].
    pub fn to_frontier(&self) -> Result<Frontier> {
        if self.sigma_hat.iter().any(|v| v.is_infinite()) {
            return Ok(Frontier::infinite());
        }
        let pts: Vec<(f64, f64)> = self.s_grid.iter().copied().zip(self.sigma_hat.iter().copied()).collect();
        if pts.len() < 2 {
            return param("need at least two s' values to build a frontier");
        }
        let mut hull: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
                // drop b when it lies on or below the chord a-p
                if (b.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (b.0 - a.0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        let mut out = vec![*hull.last().unwrap()];
        for i in (0..hull.len() - 1).rev() {
            let (a, b) = (hull[i], hull[i + 1]);
            let m = ((b.1 - a.1) / (b.0 - a.0)).clamp(0.0, 1.0);
            let right = out.last().unwrap().1;
            out.push((a.0, right - m * (b.0 - a.0)));
        }
        out.reverse();
        Frontier::from_breakpoints(&out)
    }
}

struct RayFit {
    kappa: f64,
    fit: LineFit,
}

/// Regression of the frontier from pyramid cells; shared by the pathwise
/// estimator and the exact-variance deterministic frontier.
pub fn fit_frontier(
    t0: f64,
    cells: &[PyramidCell],
    scales: Scales,
    s_grid: &[f64],
    opts: RegressionOptions,
) -> Result<FrontierEstimate> {
    if s_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return param("s_grid must be strictly increasing");
    }
    if s_grid.iter().any(|s| !(*s > -1.0 && *s <= 0.0)) {
        return param("s_grid must lie in (-1, 0]");
    }
    let m_max = cells.iter().map(|c| c.m).max().unwrap_or(0);
    let k = s_grid.len();
    let mut est = FrontierEstimate {
        t0,
        s_grid: s_grid.to_vec(),
        sigma_hat: vec![f64::INFINITY; k],
        stderr: vec![0.0; k],
        ray: vec![f64::NAN; k],
        residual_norm: vec![0.0; k],
        scales,
        m_max,
    };
    if cells.iter().all(|c| c.value == 0.0) {
        return Ok(est);
    }
    let lookup: HashMap<(usize, usize), &PyramidCell> = cells.iter().map(|c| ((c.n, c.m), c)).collect();
    // regression input per cell: -log2 M̃ + log2 E[max]
    let mut level: HashMap<(usize, usize), f64> = HashMap::new();
    for c in cells {
        let mut v = c.value;
        if opts.smoothing {
            for dm in [-1i64, 1] {
                let m2 = c.m as i64 + dm;
                if m2 >= 0 {
                    if let Some(o) = lookup.get(&(c.n, m2 as usize)) {
                        v = v.max(o.value);
                    }
                }
            }
        }
        if v > 0.0 {
            let mut l = -v.log2();
            if opts.count_correction {
                l += expected_abs_normal_max(c.pairs).log2();
            }
            level.insert((c.n, c.m), l);
        }
    }
    let rays: Vec<(f64, Vec<(usize, usize)>)> = RAYS
        .iter()
        .map(|&kappa| {
            let pts = (scales.n_min..=scales.n_max)
                .map(|n| (n, (kappa * n as f64).round_ties_even() as usize))
                .filter(|key| level.contains_key(key))
                .collect();
            (kappa, pts)
        })
        .filter(|(_, pts): &(f64, Vec<_>)| pts.len() >= MIN_RAY_CELLS)
        .collect();
    if rays.is_empty() {
        return Err(Error::InsufficientResolution(format!(
            "no ray has {MIN_RAY_CELLS} usable pyramid cells"
        )));
    }
    for (i, &s) in s_grid.iter().enumerate() {
        let mut best: Option<RayFit> = None;
        for (kappa, pts) in &rays {
            let x: Vec<f64> = pts.iter().map(|&(n, m)| (n + m) as f64).collect();
            let y: Vec<f64> = pts.iter().map(|&(n, m)| level[&(n, m)] + s * n as f64).collect();
            if let Some(fit) = fit_line(&x, &y) {
                if best.as_ref().is_none_or(|b| fit.slope < b.fit.slope) {
                    best = Some(RayFit { kappa: *kappa, fit });
                }
            }
        }
        let b = best.ok_or_else(|| Error::Numeric("degenerate regression".into()))?;
        est.sigma_hat[i] = b.fit.slope;
        est.stderr[i] = b.fit.slope_stderr;
        est.ray[i] = b.kappa;
        est.residual_norm[i] = b.fit.residual_norm;
    }
    Ok(est)
}

pub fn estimate_frontier(
    path: &SampledPath,
    t0: f64,
    s_grid: &[f64],
    scales: Scales,
) -> Result<FrontierEstimate> {
    let pyr = build_pyramid(path, t0, scales)?;
    fit_frontier(t0, &pyr.cells, scales, s_grid, RegressionOptions::PATHWISE)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub saturated: bool,
}

/// Slope of log2 osc(t0, 2^-n) against -n.
pub fn estimate_pointwise_exponent(path: &SampledPath, t0: f64, scales: Scales) -> Result<ExponentEstimate> {
    scales.validate()?;
    if !path.contains(t0) {
        return param(format!("t0 = {t0} outside the path domain"));
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for n in scales.n_min..=scales.n_max {
        let o = oscillation(path, t0, (-(n as f64)).exp2())?;
        if o > 0.0 {
            x.push(-(n as f64));
            y.push(o.log2());
        }
    }
    if x.is_empty() {
        return Ok(ExponentEstimate {
            value: f64::INFINITY,
            stderr: 0.0,
            saturated: true,
        });
    }
    let fit = fit_line(&x, &y).ok_or_else(|| Error::InsufficientResolution("fewer than 2 non-flat balls".into()))?;
    Ok(ExponentEstimate {
        value: fit.slope,
        stderr: fit.slope_stderr,
        saturated: fit.slope >= SATURATION,
    })
}

/// σ̂(0).
pub fn estimate_local_exponent(path: &SampledPath, t0: f64, scales: Scales) -> Result<ExponentEstimate> {
    let e = estimate_frontier(path, t0, &[0.0], scales)?;
    Ok(ExponentEstimate {
        value: e.sigma_hat[0],
        stderr: e.stderr[0],
        saturated: e.sigma_hat[0] >= SATURATION,
    })
}

/// estimate_frontier at every point of `t0_grid`, in parallel.
pub fn estimate_field(
    path: &SampledPath,
    t0_grid: &[f64],
    s_grid: &[f64],
    scales: Scales,
) -> Vec<Result<FrontierEstimate>> {
    t0_grid
        .par_iter()
        .map(|&t0| estimate_frontier(path, t0, s_grid, scales))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::ScalarFunctionSpec;

    fn sampled(f: impl Fn(f64) -> f64, n: usize) -> SampledPath {
        let dt = 1.0 / (n - 1) as f64;
        SampledPath::new(0.0, dt, (0..n).map(|k| f(k as f64 * dt)).collect()).unwrap()
    }

    #[test]
    fn oscillation_examples() {
        let p = sampled(|t| t, 1001);
        assert!((oscillation(&p, 0.5, 0.1).unwrap() - 0.2).abs() < 1e-12);
        let p = sampled(|t| (t - 0.5).abs(), 1001);
        assert!((oscillation(&p, 0.5, 0.1).unwrap() - 0.1).abs() < 1e-12);
        assert!(oscillation(&p, 0.5, 1e-5).is_err());
    }

    #[test]
    fn default_grids() {
        let s = default_s_grid();
        assert_eq!(s.len(), 10);
        assert_eq!(s[0], -0.9);
        assert_eq!(s[9], 0.0);
        assert_eq!(Scales::default_for(1 << 14), Scales::new(2, 8));
        assert!(Scales::new(2, 4).validate().is_err());
    }

    #[test]
    fn expected_max_small_cases() {
        // E|N| = sqrt(2/π)
        let e1 = expected_abs_normal_max(1);
        assert!((e1 - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-9);
        assert!(expected_abs_normal_max(2) > e1);
        assert!(expected_abs_normal_max(1 << 12) < 4.5);
    }

    #[test]
    fn constant_path_gives_infinite_sentinels() {
        let p = sampled(|_| 3.0, 1 << 12);
        let pyr = build_pyramid(&p, 0.5, Scales::new(2, 6)).unwrap();
        assert!(pyr.is_flat());
        let e = estimate_frontier(&p, 0.5, &default_s_grid(), Scales::new(2, 6)).unwrap();
        assert!(e.sigma_hat.iter().all(|v| *v == f64::INFINITY));
        let field = estimate_field(&p, &[0.3, 0.5], &[0.0], Scales::new(2, 6));
        assert!(field.iter().all(|r| r.as_ref().unwrap().sigma_hat[0] == f64::INFINITY));
    }

    #[test]
    fn linear_path_pyramid_is_spacing() {
        let n = (1 << 12) + 1;
        let p = sampled(|t| t, n);
        let pyr = build_pyramid(&p, 0.5, Scales::new(2, 6)).unwrap();
        for c in &pyr.cells {
            let h = (-((c.m + c.n) as f64)).exp2();
            assert!((c.value - h).abs() < 1e-12, "({}, {}): {} vs {h}", c.n, c.m, c.value);
        }
    }

    #[test]
    fn pyramid_bounded_by_oscillation() {
        let f = ScalarFunctionSpec::Chirp {
            gamma: 0.5,
            beta: 1.0,
            t0: 0.4,
        };
        let p = SampledPath::from_function(&f, 0.0, 1.0 / 4096.0, 4096).unwrap();
        let pyr = build_pyramid(&p, 0.4, Scales::new(2, 6)).unwrap();
        for c in &pyr.cells {
            let o = oscillation(&p, 0.4, (-(c.n as f64)).exp2()).unwrap();
            assert!(c.value <= o);
        }
    }

    #[test]
    fn errors() {
        let p = sampled(|t| t, 1 << 10);
        assert!(build_pyramid(&p, 2.0, Scales::new(2, 6)).is_err());
        assert!(matches!(
            build_pyramid(&p, 0.5, Scales::new(2, 4)),
            Err(Error::TooFewScales { min: 3, .. })
        ));
        assert!(matches!(
            build_pyramid(&p, 0.5, Scales::new(2, 12)),
            Err(Error::InsufficientResolution(_))
        ));
    }

    #[test]
    fn frontier_envelope_is_valid() {
        let est = FrontierEstimate {
            t0: 0.0,
            s_grid: vec![-0.6, -0.4, -0.2, 0.0],
            sigma_hat: vec![-0.1, 0.15, 0.2, 0.18],
            stderr: vec![0.0; 4],
            ray: vec![0.0; 4],
            residual_norm: vec![0.0; 4],
            scales: Scales::new(2, 8),
            m_max: 10,
        };
        let f = est.to_frontier().unwrap();
        assert!(f.check_invariants().is_ok());
        for (s, v) in est.s_grid.iter().zip(&est.sigma_hat) {
            assert!(f.eval(*s) >= *v - 0.05);
        }
    }
}
