//! Exact piecewise-linear frontier algebra on s' ∈ [-1, 0].
//!
//! A frontier stores its breakpoints, the slope of every segment and a
//! pending vertical shift. Slopes are kept separately from the values so
//! that closed-form lines keep an exact slope of 1 through min, translate
//! and exponent extraction. The shift is held as an unevaluated double-double
//! sum, which makes translate(translate(f, a), -a) return f bit for bit.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{param, Error, Result};

const COINCIDE: f64 = 1e-12;
const SLOPE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Frontier {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
    shift_hi: f64,
    shift_lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.breakpoints() == other.breakpoints()
    }
}

impl Frontier {
    fn raw(xs: Vec<f64>, ys: Vec<f64>, slopes: Vec<f64>) -> Self {
        Self {
            xs,
            ys,
            slopes,
            shift_hi: 0.0,
            shift_lo: 0.0,
        }
    }

    /// σ(s') = slope·s' + intercept on [-1, 0].
    pub fn line(slope: f64, intercept: f64) -> Self {
        Self::raw(vec![-1.0, 0.0], vec![intercept - slope, intercept], vec![slope])
    }

    /// The frontier that is +∞ everywhere (smooth functions, zero kernels).
    pub fn infinite() -> Self {
        Self::raw(
            vec![-1.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY],
            vec![0.0],
        )
    }

    /// Builds a frontier from explicit breakpoints and checks the frontier
    /// invariants: s' strictly increasing inside [-1, 0], concave,
    /// slopes in [0, 1].
    pub fn from_breakpoints(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return param("a frontier needs at least two breakpoints");
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        if xs[0] < -1.0 || *xs.last().unwrap() > 0.0 {
            return param("frontier breakpoints must lie in [-1, 0]");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return param("frontier breakpoints must have strictly increasing s'");
        }
        if ys.iter().all(|y| *y == f64::INFINITY) {
            return Ok(Self::raw(xs.clone(), ys, vec![0.0; xs.len() - 1]));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return param("a frontier is either finite everywhere or +inf everywhere");
        }
        let slopes = (0..xs.len() - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let f = Self::raw(xs, ys, slopes);
        f.check_invariants()?;
        Ok(f)
    }

    pub fn check_invariants(&self) -> Result<()> {
        if self.is_infinite() {
            return Ok(());
        }
        for (i, &m) in self.slopes.iter().enumerate() {
            if !(m >= -SLOPE_TOL && m <= 1.0 + SLOPE_TOL) {
                return param(format!("segment {i} has slope {m} outside [0, 1]"));
            }
        }
        for w in self.slopes.windows(2) {
            if w[1] > w[0] + SLOPE_TOL {
                return param("frontier is not concave");
            }
        }
        Ok(())
    }

    pub fn is_infinite(&self) -> bool {
        self.ys[0] == f64::INFINITY
    }

    fn y(&self, i: usize) -> f64 {
        (self.ys[i] - self.shift_hi) - self.shift_lo
    }

    /// Breakpoints with any pending shift applied.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        (0..self.xs.len()).map(|i| (self.xs[i], self.y(i))).collect()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// σ(s'), extended beyond the breakpoints by the end slopes.
    pub fn eval(&self, s: f64) -> f64 {
        if self.is_infinite() {
            return f64::INFINITY;
        }
        let n = self.xs.len();
        if let Some(i) = self.xs.iter().position(|&x| x == s) {
            return self.y(i);
        }
        // segment whose right end is the first breakpoint above s
        let j = match self.xs.iter().position(|&x| x > s) {
            Some(0) => 1,
            Some(j) => j,
            None => n - 1,
        };
        if s > self.xs[n - 1] {
            return self.y(n - 1) + self.slopes[n - 2] * (s - self.xs[n - 1]);
        }
        self.y(j) - self.slopes[j - 1] * (self.xs[j] - s)
    }

    fn slope_at(&self, s: f64) -> f64 {
        let j = self.xs.iter().position(|&x| x > s).unwrap_or(self.xs.len() - 1);
        self.slopes[j.saturating_sub(1).min(self.slopes.len() - 1)]
    }

    /// σ - eps. The breakpoints are untouched.
    pub fn translate(&self, eps: f64) -> Self {
        let mut f = self.clone();
        if f.is_infinite() {
            return f;
        }
        let (s, e) = two_sum(f.shift_hi, eps);
        let (hi, lo) = two_sum(s, f.shift_lo + e);
        f.shift_hi = hi;
        f.shift_lo = lo;
        f
    }

    /// Pointwise minimum. Intersection points become breakpoints.
    pub fn min(a: &Self, b: &Self) -> Self {
        if a.is_infinite() {
            return b.clone();
        }
        if b.is_infinite() {
            return a.clone();
        }
        let lo = a.xs[0].min(b.xs[0]);
        let hi = a.xs.last().unwrap().max(*b.xs.last().unwrap());
        let mut cand: Vec<f64> = a.xs.iter().chain(&b.xs).copied().collect();
        cand.push(lo);
        cand.push(hi);
        cand.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cand.dedup_by(|x, y| (*x - *y).abs() <= COINCIDE);
        let mut xs = vec![cand[0]];
        for w in cand.windows(2) {
            let (l, r) = (w[0], w[1]);
            let (dl, dr) = (a.eval(l) - b.eval(l), a.eval(r) - b.eval(r));
            if dl * dr < 0.0 {
                let x = r - dr * (r - l) / (dr - dl);
                if x - l > COINCIDE && r - x > COINCIDE {
                    xs.push(x);
                }
            }
            xs.push(r);
        }
        let ys: Vec<f64> = xs.iter().map(|&x| a.eval(x).min(b.eval(x))).collect();
        let slopes = xs
            .windows(2)
            .map(|w| {
                let m = 0.5 * (w[0] + w[1]);
                if a.eval(m) <= b.eval(m) {
                    a.slope_at(m)
                } else {
                    b.slope_at(m)
                }
            })
            .collect();
        Self::raw(xs, ys, slopes).merge_collinear()
    }

    fn merge_collinear(self) -> Self {
        if self.xs.len() <= 2 {
            return self;
        }
        let mut keep = vec![0usize];
        for i in 1..self.xs.len() - 1 {
            if (self.slopes[i - 1] - self.slopes[i]).abs() > SLOPE_TOL {
                keep.push(i);
            }
        }
        keep.push(self.xs.len() - 1);
        if keep.len() == self.xs.len() {
            return self;
        }
        let xs = keep.iter().map(|&i| self.xs[i]).collect();
        let ys = keep.iter().map(|&i| self.ys[i]).collect();
        let slopes = keep.windows(2).map(|w| self.slopes[w[0]]).collect();
        Self {
            xs,
            ys,
            slopes,
            ..self
        }
    }

    /// s' ↦ outer·σ(inner·s') + offset on [-1, 0], using the end-slope
    /// extension wherever inner·s' leaves the breakpoint range.
    pub fn compose(&self, outer: f64, inner: f64, offset: f64) -> Self {
        if self.is_infinite() {
            return Self::infinite();
        }
        let mut xs = vec![-1.0, 0.0];
        for &x in &self.xs {
            let s = x / inner;
            if s > -1.0 + COINCIDE && s < -COINCIDE {
                xs.push(s);
            }
        }
        xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
        xs.dedup_by(|p, q| (*p - *q).abs() <= COINCIDE);
        let ys = xs.iter().map(|&s| outer * self.eval(inner * s) + offset).collect();
        let slopes = xs
            .windows(2)
            .map(|w| outer * inner * self.slope_at(inner * 0.5 * (w[0] + w[1])))
            .collect();
        Self::raw(xs, ys, slopes).merge_collinear()
    }

    /// Pointwise exponent -inf{s' : σ(s') ≥ 0}. The second value is true
    /// when the zero crossing lies on the extension below the domain.
    pub fn pointwise_exponent(&self) -> (f64, bool) {
        if self.is_infinite() {
            return (f64::INFINITY, false);
        }
        let n = self.xs.len();
        if self.y(0) >= 0.0 {
            let m = self.slopes[0];
            if m <= 0.0 {
                return (f64::INFINITY, true);
            }
            // solve on the first segment's line, anchored at its right end
            let s = self.xs[1] - self.y(1) / m;
            return (-s, s < self.xs[0]);
        }
        for j in 1..n {
            if self.y(j) >= 0.0 {
                let s = self.xs[j] - self.y(j) / self.slopes[j - 1];
                return (-s, false);
            }
        }
        let m = self.slopes[n - 2];
        if m <= 0.0 {
            return (f64::NEG_INFINITY, true);
        }
        (-(self.xs[n - 1] - self.y(n - 1) / m), true)
    }

    pub fn local_exponent(&self) -> f64 {
        self.eval(0.0)
    }

    /// Restriction to region D = {-1 < s' < 0, 0 < σ < 1 + s'}. σ is
    /// non-decreasing and σ - s' non-increasing, so the admissible s' form
    /// an interval (s_lo, 0).
    pub fn clip_to_region_d(&self) -> RegionClip {
        let empty = RegionClip {
            frontier: None,
            intersects: false,
        };
        if self.is_infinite() {
            return empty;
        }
        let (lo, hi) = (-1.0f64, 0.0f64);
        // last s' with σ ≤ 0 and last s' with σ - s' ≥ 1, on [lo, hi]
        let z1 = self.last_at_or_below(|s| self.eval(s), 0.0, lo, hi);
        let z2 = self.last_at_or_below(|s| 1.0 + s - self.eval(s), 0.0, lo, hi);
        let s_lo = z1.max(z2).max(lo);
        if s_lo >= hi {
            return empty;
        }
        let mid = 0.5 * (s_lo + hi);
        let v = self.eval(mid);
        if !(v > 0.0 && v < 1.0 + mid) {
            return empty;
        }
        let mut pts = vec![(s_lo, self.eval(s_lo))];
        for (x, y) in self.breakpoints() {
            if x > s_lo + COINCIDE && x < hi - COINCIDE {
                pts.push((x, y));
            }
        }
        pts.push((hi, self.eval(hi)));
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let slopes = xs
            .windows(2)
            .map(|w| self.slope_at(0.5 * (w[0] + w[1])))
            .collect();
        RegionClip {
            frontier: Some(Self::raw(xs, ys, slopes)),
            intersects: true,
        }
    }

    /// Largest s in [lo, hi] with g(s) ≤ level for a non-decreasing
    /// piecewise-linear g whose kinks are among the breakpoints; lo - 1 when
    /// g > level on the whole interval.
    fn last_at_or_below<G: Fn(f64) -> f64>(&self, g: G, level: f64, lo: f64, hi: f64) -> f64 {
        let mut knots = vec![lo];
        knots.extend(self.xs.iter().copied().filter(|&x| x > lo && x < hi));
        knots.push(hi);
        if g(lo) > level {
            return lo - 1.0;
        }
        if g(hi) <= level {
            return hi;
        }
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ga, gb) = (g(a), g(b));
            if ga <= level && gb > level {
                return a + (level - ga) * (b - a) / (gb - ga);
            }
        }
        hi
    }

    pub fn report(&self) -> RegularityReport {
        let (pointwise, extended) = self.pointwise_exponent();
        RegularityReport {
            pointwise_exponent: pointwise,
            pointwise_from_extension: extended,
            local_exponent: self.local_exponent(),
            in_region_d: self.clip_to_region_d().intersects,
            frontier: self.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "s_prime,sigma")?;
        for (x, y) in self.breakpoints() {
            writeln!(w, "{x},{y}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty CSV".into()))??;
        if header.trim() != "s_prime,sigma" {
            return Err(Error::Format(format!("expected header s_prime,sigma, got {header:?}")));
        }
        let mut pts = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Format(format!("bad row {line:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("bad number {s:?}: {e}")))
            };
            pts.push((parse(a)?, parse(b)?));
        }
        Self::from_breakpoints(&pts)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionClip {
    pub frontier: Option<Frontier>,
    pub intersects: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub pointwise_exponent: f64,
    pub pointwise_from_extension: bool,
    pub local_exponent: f64,
    pub frontier: Frontier,
    pub in_region_d: bool,
}

/// JSON number, with non-finite values written as strings.
pub fn json_number(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::Value::from(v)
    } else if v > 0.0 {
        serde_json::Value::from("+inf")
    } else if v < 0.0 {
        serde_json::Value::from("-inf")
    } else {
        serde_json::Value::Null
    }
}

#[derive(Serialize)]
struct ReportJson {
    pointwise: serde_json::Value,
    local: serde_json::Value,
    #[serde(rename = "in_region_D")]
    in_region_d: bool,
    breakpoints: Vec<[serde_json::Value; 2]>,
}

impl RegularityReport {
    pub fn to_json(&self) -> serde_json::Value {
        let r = ReportJson {
            pointwise: json_number(self.pointwise_exponent),
            local: json_number(self.local_exponent),
            in_region_d: self.in_region_d,
            breakpoints: self
                .frontier
                .breakpoints()
                .into_iter()
                .map(|(x, y)| [json_number(x), json_number(y)])
                .collect(),
        };
        serde_json::to_value(r).expect("report serializes")
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        param(format!("{name} must be > 0, got {v}"))
    }
}

fn unit_open(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        param(format!("{name} must lie in (0,1), got {v}"))
    }
}

/// σ(s') = s' + γ.
pub fn power_frontier(gamma: f64) -> Result<Frontier> {
    positive("gamma", gamma)?;
    Ok(Frontier::line(1.0, gamma))
}

/// σ(s') = s'/(β+1) + γ/(β+1).
pub fn chirp_frontier(gamma: f64, beta: f64) -> Result<Frontier> {
    positive("gamma", gamma)?;
    positive("beta", beta)?;
    Ok(Frontier::line(1.0 / (beta + 1.0), gamma / (beta + 1.0)))
}

pub fn weierstrass_frontier(h: f64) -> Result<Frontier> {
    unit_open("h", h)?;
    Ok(Frontier::line(1.0, h))
}

pub fn fbm_frontier(hurst: f64) -> Result<Frontier> {
    unit_open("H", hurst)?;
    Ok(Frontier::line(1.0, hurst))
}

pub fn min_frontier(a: &Frontier, b: &Frontier) -> Frontier {
    Frontier::min(a, b)
}

/// (H(t0) + s') ∧ frontier of the Hurst function at t0.
pub fn mbm_frontier(h_t0: f64, h_frontier: &Frontier) -> Result<Frontier> {
    Ok(Frontier::min(&fbm_frontier(h_t0)?, h_frontier))
}

/// ½·φ(2s') ∧ ψ(s') from the pseudo-frontiers of the primitive of η² and
/// of the drift.
pub fn wiener_frontier(phi_pseudo: &Frontier, psi_pseudo: &Frontier) -> Frontier {
    Frontier::min(&phi_pseudo.compose(0.5, 2.0, 0.0), psi_pseudo)
}

/// (1/α)·φ(α·s') - 1/α. The flag is set when a slope left [0, 1] and had to
/// be clamped.
pub fn stable_lower_bound_frontier(phi_pseudo: &Frontier, alpha: f64) -> Result<(Frontier, bool)> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return param(format!("alpha must lie in (0,2), got {alpha}"));
    }
    let f = phi_pseudo.compose(1.0 / alpha, alpha, -1.0 / alpha);
    if f.is_infinite() || f.check_invariants().is_ok() {
        return Ok((f, false));
    }
    // rebuild from σ(0) leftwards with clamped, non-increasing slopes
    let n = f.xs.len();
    let mut slopes: Vec<f64> = f.slopes.iter().map(|m| m.clamp(0.0, 1.0)).collect();
    for i in (0..n - 2).rev() {
        slopes[i] = slopes[i].max(slopes[i + 1]);
    }
    let mut ys = vec![0.0; n];
    ys[n - 1] = f.y(n - 1);
    for i in (0..n - 1).rev() {
        ys[i] = ys[i + 1] - slopes[i] * (f.xs[i + 1] - f.xs[i]);
    }
    Ok((Frontier::raw(f.xs.clone(), ys, slopes), true))
}

pub fn pointwise_exponent(f: &Frontier) -> f64 {
    f.pointwise_exponent().0
}

pub fn local_exponent(f: &Frontier) -> f64 {
    f.local_exponent()
}

pub fn translate_frontier(f: &Frontier, eps: f64) -> Frontier {
    f.translate(eps)
}

pub fn clip_to_region_d(f: &Frontier) -> RegionClip {
    f.clip_to_region_d()
}

pub fn report(f: &Frontier) -> RegularityReport {
    f.report()
}
