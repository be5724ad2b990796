//! Acceptance suite for microloc. Every criterion runs at pinned sizes,
//! seeds and tolerances and returns the individual checks it made, so the
//! acceptance test and the `verify` command print the same table.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{StandardNormal, Uniform};
use serde::Serialize;

use microloc::covariance::{deterministic_frontier, gaussian_moment_ratio};
use microloc::{Error, Result};
use microloc::estimate::{
    build_pyramid, default_s_grid, estimate_frontier, estimate_local_exponent, estimate_pointwise_exponent,
    level_cap, oscillation, Scales,
};
use microloc::fracdiff::{frac_diff, verify_translation_ensemble, FracOrder};
use microloc::frontier::{
    chirp_frontier, fbm_frontier, local_exponent, mbm_frontier, min_frontier, pointwise_exponent, power_frontier,
    stable_lower_bound_frontier, translate_frontier, weierstrass_frontier, wiener_frontier, Frontier,
};
use microloc::function::ScalarFunctionSpec;
use microloc::path::SampledPath;
use microloc::process::ProcessSpec;
use microloc::stats::median;
use microloc::synth::{ensemble, ensemble_map, gw::weierstrass_samples, Grid};

pub const IDS: [&str; 10] = ["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10"];

/// Samples per path for the ensemble criteria.
pub const SAMPLES: usize = 1 << 14;
/// Samples for single deterministic paths.
pub const DET_SAMPLES: usize = 1 << 16;
pub const PATHS: usize = 100;
pub const STABLE_PATHS: usize = 200;
pub const T0: f64 = 0.5;

pub const TOL_LINE: f64 = 0.1;
pub const TOL_DET: f64 = 0.05;
pub const TOL_BRIDGE: f64 = 0.1;
pub const TOL_LAMBDA2: f64 = 0.1;
pub const TOL_LAMBDA3: f64 = 1.0;
/// Four ulps around the larger operand.
pub const MACHINE_TOL: f64 = 4.0 * f64::EPSILON;

/// Amplitude of the chirp term in the mBm Hurst function a + b·chirp.
pub const MBM_CHIRP_AMPLITUDE: f64 = 0.4;
pub const ORACLE_PATHS: usize = 200;
pub const ORACLE_MAX_LEN: usize = 512;
pub const ALGEBRA_CASES: usize = 1000;
pub const NORMAL_DRAWS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Relation {
    /// |value - target| ≤ tol
    Within,
    /// value ≥ target - tol
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn within(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let passed = (value - target).abs() <= tol;
        Self {
            label: label.into(),
            value,
            target,
            tol,
            relation: Relation::Within,
            passed,
        }
    }

    pub fn at_least(label: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            value,
            target,
            tol,
            relation: Relation::AtLeast,
            passed: value >= target - tol,
        }
    }

    /// Exact agreement up to `MACHINE_TOL` relative to the larger operand.
    pub fn exact(label: impl Into<String>, value: f64, target: f64) -> Self {
        let tol = MACHINE_TOL * value.abs().max(target.abs()).max(1.0);
        Self::within(label, value, target, tol)
    }

    pub fn describe(&self) -> String {
        match self.relation {
            Relation::Within if self.tol < 1e-3 => format!(
                "{} = {:.6} vs {:.6} ± {:.1e}",
                self.label, self.value, self.target, self.tol
            ),
            Relation::Within => format!("{} = {:.4} vs {:.4} ± {}", self.label, self.value, self.target, self.tol),
            Relation::AtLeast => format!("{} = {:.4} ≥ {:.4} - {}", self.label, self.value, self.target, self.tol),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
    /// Context that does not enter the verdict.
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    /// One summary line: verdict, title, count, and the failed checks (or
    /// the tightest passing one).
    pub fn line(&self) -> String {
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let detail = if self.passed() {
            self.checks
                .iter()
                .max_by(|a, b| margin(a).total_cmp(&margin(b)))
                .map(|c| format!("tightest: {}", c.describe()))
                .unwrap_or_default()
        } else {
            self.checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.describe())
                .collect::<Vec<_>>()
                .join("; ")
        };
        format!(
            "{:<4}{verdict}  {} ({ok}/{} checks, {:.1}s) {detail}",
            self.id,
            self.title,
            self.checks.len(),
            self.seconds
        )
    }
}

/// Fraction of the tolerance used up.
fn margin(c: &Check) -> f64 {
    let used = match c.relation {
        Relation::Within => (c.value - c.target).abs(),
        Relation::AtLeast => c.target - c.value,
    };
    if c.tol > 0.0 {
        used / c.tol
    } else {
        used
    }
}

/// Criteria selected by a suite name: "all", a criterion id, or one of
/// fbm, mbm, gw, wiener, fracdiff, stable, oracle, frontier, bridge,
/// moments.
pub fn suite(name: &str) -> Result<Vec<&'static str>> {
    let one = |id: &'static str| Ok(vec![id]);
    match name.to_ascii_lowercase().as_str() {
        "all" => Ok(IDS.to_vec()),
        "fbm" => one("A1"),
        "mbm" => one("A2"),
        "gw" => one("A3"),
        "wiener" => one("A4"),
        "fracdiff" | "translation" => one("A5"),
        "stable" => one("A6"),
        "oracle" => one("A7"),
        "frontier" | "algebra" => one("A8"),
        "bridge" => one("A9"),
        "moments" => one("A10"),
        other => match IDS.iter().find(|id| id.eq_ignore_ascii_case(other)) {
            Some(id) => one(id),
            None => Err(Error::Parameter(format!("unknown suite '{name}'"))),
        },
    }
}

pub fn run(id: &str) -> Result<Outcome> {
    let start = Instant::now();
    let (title, checks, notes) = match id {
        "A1" => a1()?,
        "A2" => a2()?,
        "A3" => a3()?,
        "A4" => a4()?,
        "A5" => a5()?,
        "A6" => a6()?,
        "A7" => a7()?,
        "A8" => a8()?,
        "A9" => a9()?,
        "A10" => a10()?,
        other => return Err(Error::Parameter(format!("unknown criterion '{other}'"))),
    };
    Ok(Outcome {
        id: id.to_string(),
        title: title.to_string(),
        checks,
        notes,
        seconds: start.elapsed().as_secs_f64(),
    })
}

type Parts = (&'static str, Vec<Check>, Vec<String>);

fn grid() -> Grid {
    Grid::unit(SAMPLES)
}

fn scales() -> Scales {
    Scales::default_for(SAMPLES)
}

/// Per-path σ̂ on `s`, pointwise and local exponents.
struct PathStats {
    sigma: Vec<f64>,
    pointwise: f64,
    local: f64,
}

fn ensemble_stats(spec: &ProcessSpec, seed: u64, n_paths: usize, s: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
    let sc = scales();
    let rows = ensemble_map(spec, grid(), seed, n_paths, |p| -> Result<PathStats> {
        Ok(PathStats {
            sigma: estimate_frontier(p, T0, s, sc)?.sigma_hat,
            pointwise: estimate_pointwise_exponent(p, T0, sc)?.value,
            local: estimate_local_exponent(p, T0, sc)?.value,
        })
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let sigma = (0..s.len())
        .map(|i| median(&rows.iter().map(|r| r.sigma[i]).collect::<Vec<_>>()))
        .collect();
    let pw = median(&rows.iter().map(|r| r.pointwise).collect::<Vec<_>>());
    let loc = median(&rows.iter().map(|r| r.local).collect::<Vec<_>>());
    Ok((sigma, pw, loc))
}

fn a1() -> Result<Parts> {
    let s = [-0.6, -0.3, 0.0];
    let mut checks = Vec::new();
    for (k, h) in [0.3, 0.5, 0.7].into_iter().enumerate() {
        let (sigma, pw, loc) = ensemble_stats(&ProcessSpec::Fbm { hurst: h }, 1001 + k as u64, PATHS, &s)?;
        for (x, v) in s.iter().zip(&sigma) {
            checks.push(Check::within(format!("H={h} σ̂({x})"), *v, h + x, TOL_LINE));
        }
        checks.push(Check::within(format!("H={h} pointwise"), pw, h, TOL_LINE));
        checks.push(Check::within(format!("H={h} local"), loc, h, TOL_LINE));
    }
    Ok(("fBm frontier line", checks, vec![]))
}

fn chirped_mbm(a: f64, gamma: f64, delta: f64) -> ProcessSpec {
    ProcessSpec::Mbm {
        h: ScalarFunctionSpec::AffineChirp {
            a,
            b: MBM_CHIRP_AMPLITUDE,
            gamma,
            beta: delta,
            t0: T0,
        },
    }
}

fn a2() -> Result<Parts> {
    let mut checks = Vec::new();
    let s = [-0.6, -0.3, 0.0];
    let (sigma, _, _) = ensemble_stats(&chirped_mbm(0.3, 0.8, 1.0), 2001, PATHS, &s)?;
    for (x, v) in s.iter().zip(&sigma) {
        checks.push(Check::within(format!("(0.3,0.8,1) σ̂({x})"), *v, 0.3 + x, TOL_LINE));
    }
    let s = [-0.3, 0.0];
    let (sigma, pw, _) = ensemble_stats(&chirped_mbm(0.5, 0.7, 1.0), 2002, PATHS, &s)?;
    checks.push(Check::within("(0.5,0.7,1) σ̂(-0.3) at the kink", sigma[0], 0.2, TOL_LINE));
    checks.push(Check::within("(0.5,0.7,1) σ̂(0)", sigma[1], 0.35, TOL_LINE));
    checks.push(Check::within("(0.5,0.7,1) pointwise", pw, 0.5, TOL_LINE));
    Ok(("mBm chirp regimes", checks, vec![format!("H = a + {MBM_CHIRP_AMPLITUDE}·chirp")]))
}

fn gw_half() -> ProcessSpec {
    ProcessSpec::gw_auto(ScalarFunctionSpec::constant(0.5), 2.0, 0.5)
}

fn a3() -> Result<Parts> {
    let s = [-0.4, -0.2, 0.0];
    let (sigma, _, _) = ensemble_stats(&gw_half(), 3001, PATHS, &s)?;
    let checks = s
        .iter()
        .zip(&sigma)
        .map(|(x, v)| Check::within(format!("σ̂({x})"), *v, 0.5 + x, TOL_LINE))
        .collect();
    Ok(("GW constant-H frontier", checks, vec![]))
}

pub fn wiener_chirp() -> ProcessSpec {
    ProcessSpec::WienerIntegral {
        eta: ScalarFunctionSpec::SqrtAbsChirp {
            gamma: 0.3,
            beta: 0.5,
            t0: T0,
            root_order: 2.0,
        },
        psi: ScalarFunctionSpec::constant(0.0),
    }
}

fn a4() -> Result<Parts> {
    let spec = wiener_chirp();
    let s = default_s_grid();
    let (_, pw, loc) = ensemble_stats(&spec, 4001, PATHS, &[0.0])?;
    let mut checks = vec![
        Check::within("median pointwise", pw, 0.9, TOL_LINE),
        Check::within("median local", loc, 0.6, TOL_LINE),
    ];
    let det = deterministic_frontier(&spec, T0, &s, scales(), grid())?;
    for (x, v) in s.iter().zip(&det.estimate.sigma_hat) {
        checks.push(Check::within(format!("deterministic σ({x})"), *v, x / 1.5 + 0.6, TOL_DET));
    }
    let notes = vec![format!(
        "E[X_t - X_t0]^2 grows like |t - t0|^1.3 for this kernel, so the variance law alone gives \
         pointwise 0.65 and local 0.5; measured pointwise {pw:.3}, local {loc:.3}, deterministic σ(0) {:.3}",
        det.local_exponent
    )];
    Ok(("Wiener chirp integral", checks, notes))
}

fn a5() -> Result<Parts> {
    let g = Grid::unit(DET_SAMPLES);
    let w = SampledPath::new(0.0, g.dt, weierstrass_samples(0.7, 2.0, g, 0.0))?;
    let d = frac_diff(&w, FracOrder::new(0.2))?;
    let loc = estimate_local_exponent(&d, T0, Scales::default_for(DET_SAMPLES))?.value;
    let mut checks = vec![Check::within("Weierstrass h=0.7, ε=0.2 local", loc, 0.5, TOL_LINE)];
    let paths = ensemble(&ProcessSpec::Fbm { hurst: 0.6 }, grid(), 5001, PATHS)?;
    let r = verify_translation_ensemble(&paths, FracOrder::new(0.2), T0, &default_s_grid(), scales())?;
    checks.push(Check::within(
        "fBm H=0.6, ε=0.2 median shift",
        r.median_difference,
        0.2,
        microloc::fracdiff::TRANSLATION_TOL,
    ));
    let notes = vec![format!("translation on ensemble medians of {PATHS} paths; pass = {}", r.pass)];
    Ok(("frontier translation", checks, notes))
}

fn a6() -> Result<Parts> {
    let spec = ProcessSpec::StableIntegral {
        eta: ScalarFunctionSpec::SqrtAbsChirp {
            gamma: 0.6,
            beta: 1.0,
            t0: T0,
            root_order: 1.5,
        },
        alpha: 1.5,
    };
    let s = [-0.4, 0.0];
    let (sigma, _, _) = ensemble_stats(&spec, 6001, STABLE_PATHS, &s)?;
    let checks = s
        .iter()
        .zip(&sigma)
        .map(|(x, v)| Check::at_least(format!("σ̂({x})"), *v, x / 2.0 + 0.2, TOL_LINE))
        .collect();
    Ok(("stable lower bound", checks, vec![]))
}

/// Max over all pairs in the ball, by exhaustive search; None when the
/// ball holds fewer than two samples.
fn brute_oscillation(p: &SampledPath, t0: f64, rho: f64) -> Option<f64> {
    let x = p.values();
    let slack = 1e-9 * p.dt();
    let inside: Vec<usize> = (0..p.len())
        .filter(|&k| (p.time(k) - t0).abs() <= rho + slack)
        .collect();
    let mut best = 0.0f64;
    for &i in &inside {
        for &j in &inside {
            best = best.max((x[i] - x[j]).abs());
        }
    }
    (inside.len() >= 2).then_some(best)
}

/// Nearest index by linear scan; ties resolve to the later index, as
/// rounding half away from zero does for non-negative offsets.
fn brute_nearest(p: &SampledPath, t: f64) -> usize {
    let mut best = 0;
    for k in 0..p.len() {
        if (p.time(k) - t).abs() <= (p.time(best) - t).abs() {
            best = k;
        }
    }
    best
}

fn brute_cell(p: &SampledPath, t0: f64, n: usize, m: usize) -> Option<(f64, usize)> {
    let h = 1.0 / (1u64 << (n + m)) as f64;
    let slack = 1e-9 * p.dt();
    let mut idx = Vec::new();
    for k in -(1i64 << m)..=(1i64 << m) {
        let t = t0 + k as f64 * h;
        if t >= p.t_start() - slack && t <= p.t_end() + slack {
            idx.push(brute_nearest(p, t));
        }
    }
    let x = p.values();
    let mut value = 0.0f64;
    let mut pairs = 0;
    for w in idx.windows(2) {
        if w[0] != w[1] {
            value = value.max((x[w[1]] - x[w[0]]).abs());
            pairs += 1;
        }
    }
    (pairs >= 2).then_some((value, pairs))
}

fn a7() -> Result<Parts> {
    let mut rng = ChaCha8Rng::seed_from_u64(7001);
    let mut osc_bad = 0usize;
    let mut cell_bad = 0usize;
    let mut cells_seen = 0usize;
    for _ in 0..ORACLE_PATHS {
        let len = rng.random_range(16..=ORACLE_MAX_LEN);
        let dt = 1.0 / rng.random_range(64.0..2048.0f64);
        let t_start = rng.random_range(-1.0..1.0f64);
        let values: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let p = SampledPath::new(t_start, dt, values)?;
        let t0 = t_start + rng.random::<f64>() * (len - 1) as f64 * dt;
        for _ in 0..4 {
            let rho = rng.random_range(0.0..0.6f64);
            if oscillation(&p, t0, rho).ok() != brute_oscillation(&p, t0, rho) {
                osc_bad += 1;
            }
        }
        let cap = level_cap(dt)?;
        let sc = Scales::new(1, cap.min(6).max(4));
        if sc.n_max > cap {
            continue;
        }
        let pyr = build_pyramid(&p, t0, sc)?;
        for n in sc.n_min..=sc.n_max {
            for m in 0..=(cap - n) {
                let got = pyr.get(n, m).map(|c| (c.value, c.pairs));
                cells_seen += 1;
                if got != brute_cell(&p, t0, n, m) {
                    cell_bad += 1;
                }
            }
        }
    }
    let checks = vec![
        Check::within("oscillation mismatches", osc_bad as f64, 0.0, 0.0),
        Check::within("pyramid cell mismatches", cell_bad as f64, 0.0, 0.0),
    ];
    let notes = vec![format!("{ORACLE_PATHS} paths, {cells_seen} pyramid cells compared")];
    Ok(("oracle equivalence", checks, notes))
}

fn random_frontier(rng: &mut ChaCha8Rng) -> Frontier {
    let mut u = |lo: f64, hi: f64| rng.sample(Uniform::new(lo, hi).expect("valid range"));
    match (u(0.0, 4.0) as usize).min(3) {
        0 => power_frontier(u(0.01, 2.0)).expect("valid"),
        1 => chirp_frontier(u(0.01, 2.0), u(0.01, 4.0)).expect("valid"),
        2 => fbm_frontier(u(0.01, 0.99)).expect("valid"),
        _ => {
            let h = u(0.01, 0.99);
            let c = chirp_frontier(u(0.01, 2.0), u(0.01, 4.0)).expect("valid");
            mbm_frontier(h, &c).expect("valid")
        }
    }
}

fn algebra_violations(rng: &mut ChaCha8Rng) -> usize {
    let grid: Vec<f64> = (0..=100).map(|k| -1.0 + k as f64 / 100.0).collect();
    let mut bad = 0;
    for _ in 0..ALGEBRA_CASES {
        let (a, b, c) = (random_frontier(rng), random_frontier(rng), random_frontier(rng));
        let e = rng.random_range(-2.0..2.0f64);
        let ab = min_frontier(&a, &b);
        let ba = min_frontier(&b, &a);
        let l = min_frontier(&ab, &c);
        let r = min_frontier(&a, &min_frontier(&b, &c));
        let mut ok = a.check_invariants().is_ok() && ab.check_invariants().is_ok();
        ok &= a.slopes().iter().all(|s| (0.0..=1.0).contains(s));
        ok &= min_frontier(&a, &a) == a;
        ok &= translate_frontier(&translate_frontier(&a, e), -e) == a;
        for w in grid.windows(2) {
            ok &= a.eval(w[1]) >= a.eval(w[0]) - 1e-12;
        }
        for &s in &grid {
            ok &= (ab.eval(s) - ba.eval(s)).abs() < 1e-12;
            ok &= (l.eval(s) - r.eval(s)).abs() < 1e-12;
            ok &= ab.eval(s) <= a.eval(s).min(b.eval(s)) + 1e-12;
        }
        let h = rng.random_range(0.01..0.99f64);
        let eh = rng.random_range(-0.5..0.5f64);
        let f = fbm_frontier(h).expect("valid");
        ok &= pointwise_exponent(&translate_frontier(&f, eh)) == pointwise_exponent(&f) - eh;
        if !ok {
            bad += 1;
        }
    }
    bad
}

fn a8() -> Result<Parts> {
    let mut ch = Vec::new();
    let grid: Vec<f64> = (0..=10).map(|k| -0.1 * k as f64).collect();
    ch.push(Check::exact("power γ=1 σ(-0.5)", power_frontier(1.0)?.eval(-0.5), 0.5));
    let c11 = chirp_frontier(1.0, 1.0)?;
    for &s in &grid {
        ch.push(Check::exact(format!("chirp(1,1) σ({s:.1})"), c11.eval(s), 0.5 * s + 0.5));
    }
    ch.push(Check::exact("chirp(1,1) zero crossing", pointwise_exponent(&c11), 1.0));
    ch.push(Check::exact("Weierstrass h=0.5 σ(-0.2)", weierstrass_frontier(0.5)?.eval(-0.2), 0.3));
    let f5 = fbm_frontier(0.5)?;
    for &s in &grid {
        ch.push(Check::exact(format!("fBm 0.5 σ({s:.1})"), f5.eval(s), 0.5 + s));
    }
    ch.push(Check::exact("fBm 0.5 pointwise", pointwise_exponent(&f5), 0.5));
    ch.push(Check::exact("fBm 0.5 local", local_exponent(&f5), 0.5));
    ch.push(Check::exact("fBm 0.7 local", local_exponent(&fbm_frontier(0.7)?), 0.7));
    let low = mbm_frontier(0.3, &chirp_frontier(0.8, 1.0)?)?;
    let high = mbm_frontier(0.8, &chirp_frontier(0.5, 1.0)?)?;
    let reg = mbm_frontier(0.4, &power_frontier(0.9)?)?;
    let (hc, f3, f4) = (chirp_frontier(0.5, 1.0)?, fbm_frontier(0.3)?, fbm_frontier(0.4)?);
    for &s in &grid {
        ch.push(Check::exact(format!("mBm a<γ/(δ+1) σ({s:.1})"), low.eval(s), f3.eval(s)));
        ch.push(Check::exact(format!("mBm a>γ σ({s:.1})"), high.eval(s), hc.eval(s)));
        ch.push(Check::exact(format!("regular mBm σ({s:.1})"), reg.eval(s), f4.eval(s)));
    }
    let (g, d) = (0.3, 0.5);
    let w = wiener_frontier(&chirp_frontier(g, d)?.translate(-1.0), &Frontier::infinite());
    for &s in &grid {
        let want = s / (d + 1.0) + g / (2.0 * d + 2.0) + 0.5;
        ch.push(Check::exact(format!("Wiener composition σ({s:.1})"), w.eval(s), want));
    }
    let (gs, ds, alpha) = (0.6, 1.0, 1.5);
    let (sb, _) = stable_lower_bound_frontier(&chirp_frontier(gs, ds)?.translate(-1.0), alpha)?;
    for &s in &grid {
        let want = s / (ds + 1.0) + gs / (alpha * (ds + 1.0));
        ch.push(Check::exact(format!("stable bound σ({s:.1})"), sb.eval(s), want));
    }
    ch.push(Check::exact(
        "chirp(1,1) ε=0.2 pointwise",
        pointwise_exponent(&translate_frontier(&c11, 0.2)),
        0.6,
    ));
    let mid = mbm_frontier(0.5, &chirp_frontier(0.7, 1.0)?)?;
    let p0 = pointwise_exponent(&mid);
    for eps in [0.1, 0.2, 0.25, 0.3] {
        let drop = p0 - pointwise_exponent(&translate_frontier(&mid, eps));
        let want = if eps <= 0.2 { eps } else { 0.2 + (eps - 0.2) * 2.0 };
        ch.push(Check::exact(format!("chirped mBm ε={eps} drop"), drop, want));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8001);
    let bad = algebra_violations(&mut rng);
    ch.push(Check::within(
        format!("property violations in {ALGEBRA_CASES} cases"),
        bad as f64,
        0.0,
        0.0,
    ));
    Ok(("frontier algebra", ch, vec![]))
}

fn a9() -> Result<Parts> {
    let s = default_s_grid();
    let mut checks = Vec::new();
    for (name, spec, seed) in [
        ("fBm(0.5)", ProcessSpec::Fbm { hurst: 0.5 }, 9001),
        ("GW(0.5)", gw_half(), 9002),
    ] {
        let (sigma, _, _) = ensemble_stats(&spec, seed, PATHS, &s)?;
        let det = deterministic_frontier(&spec, T0, &s, scales(), grid())?;
        for ((x, v), d) in s.iter().zip(&sigma).zip(&det.estimate.sigma_hat) {
            checks.push(Check::within(format!("{name} σ̂({x:.1})"), *v, *d, TOL_BRIDGE));
        }
    }
    Ok(("deterministic vs pathwise bridge", checks, vec![]))
}

fn a10() -> Result<Parts> {
    let mut rng = ChaCha8Rng::seed_from_u64(10_001);
    let y: Vec<f64> = (0..NORMAL_DRAWS).map(|_| rng.sample(StandardNormal)).collect();
    let y2: Vec<f64> = y.iter().map(|v| v * v).collect();
    let y4: Vec<f64> = y2.iter().map(|v| v * v).collect();
    let y6: Vec<f64> = y4.iter().zip(&y2).map(|(a, b)| a * b).collect();
    let checks = vec![
        Check::within("λ̂₂", gaussian_moment_ratio(&y2, &y4, 2)?, 3.0, TOL_LAMBDA2),
        Check::within("λ̂₃", gaussian_moment_ratio(&y2, &y6, 3)?, 15.0, TOL_LAMBDA3),
    ];
    Ok(("Gaussian moment identity", checks, vec![]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_resolve() {
        assert_eq!(suite("all").unwrap().len(), 10);
        assert_eq!(suite("fbm").unwrap(), vec!["A1"]);
        assert_eq!(suite("a10").unwrap(), vec!["A10"]);
        assert!(suite("nope").is_err());
        assert!(run("A11").is_err());
    }

    #[test]
    fn check_relations() {
        assert!(Check::within("x", 0.35, 0.3, 0.1).passed);
        assert!(!Check::within("x", 0.45, 0.3, 0.1).passed);
        assert!(Check::at_least("x", 0.15, 0.2, 0.1).passed);
        assert!(!Check::at_least("x", 0.05, 0.2, 0.1).passed);
        assert!(Check::exact("x", 0.1 + 0.2, 0.3).passed);
    }

    #[test]
    fn brute_nearest_matches_rounding() {
        let p = SampledPath::new(0.0, 0.25, vec![0.0; 5]).unwrap();
        for t in [0.0, 0.1, 0.125, 0.3, 0.375, 0.9, 1.2] {
            assert_eq!(brute_nearest(&p, t), p.nearest_index(t), "t = {t}");
        }
    }
}
