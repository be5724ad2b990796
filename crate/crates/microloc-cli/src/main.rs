//! `microloc`: synthesize paths, compute and estimate 2-microlocal
//! frontiers, and run the acceptance suite.

mod config;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use microloc::covariance::{
    check_moment_condition_spec, deterministic_frontier, gw_covariance_bounds_check,
    incremental_variance_exact, incremental_variance_mc, mbm_expansion_check, GwBoundsConfig,
    MomentCondition,
};
use microloc::estimate::{
    default_s_grid, estimate_field, estimate_frontier, estimate_local_exponent,
    estimate_pointwise_exponent, Scales,
};
use microloc::fracdiff::{frac_diff, verify_translation, FracOrder};
use microloc::frontier::{
    chirp_frontier, fbm_frontier, json_number, mbm_frontier, power_frontier, weierstrass_frontier,
};
use microloc::synth::{synthesize, Grid};
use microloc::{Frontier, ProcessSpec, SampledPath};
use microloc_verify as verify;
use serde_json::json;

use config::{pick, require, RunConfig};

const WORKERS_ENV: &str = "MICROLOC_WORKERS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Module(microloc::Error),
    Acceptance(Vec<String>),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Config(_) => 2,
            Self::Module(_) => 3,
            Self::Acceptance(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Config(m) => write!(f, "configuration error: {m}"),
            Self::Module(e) => write!(f, "{e}"),
            Self::Acceptance(ids) => write!(f, "acceptance failure: {}", ids.join(", ")),
        }
    }
}

impl From<microloc::Error> for CliError {
    fn from(e: microloc::Error) -> Self {
        Self::Module(e)
    }
}

type Res<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "microloc", version, about = "2-microlocal analysis of sampled processes")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: MICROLOC_WORKERS, else all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize one path and write it to disk.
    Synth(SynthArgs),
    /// Closed-form frontier of a model, as CSV breakpoints.
    Frontier(FrontierArgs),
    /// Estimate the frontier of a path at t0 or on a grid of points.
    Estimate(EstimateArgs),
    /// Fractional difference (or integral) of a path.
    Fracdiff(FracdiffArgs),
    /// Covariance-level tools.
    Covlab(CovlabArgs),
    /// Run acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct SourceArgs {
    /// fBm with this Hurst exponent.
    #[arg(long)]
    fbm_h: Option<f64>,
    /// Process as inline JSON, e.g. '{"process":"fbm","hurst":0.3}'.
    #[arg(long)]
    process: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Sampling step (default 1/n).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Output path; a .csv extension selects CSV, anything else binary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrontierArgs {
    /// Chirp |t|^γ sin|t|^-β.
    #[arg(long, num_args = 2, value_names = ["GAMMA", "BETA"])]
    chirp: Option<Vec<f64>>,
    #[arg(long)]
    fbm_h: Option<f64>,
    /// |t|^γ.
    #[arg(long, value_name = "GAMMA")]
    power: Option<f64>,
    #[arg(long, value_name = "H")]
    weierstrass: Option<f64>,
    /// mBm with H = a + b·chirp(γ, δ): a, γ, δ.
    #[arg(long, num_args = 3, value_names = ["A", "GAMMA", "DELTA"])]
    mbm_chirp: Option<Vec<f64>>,
    /// Shift by a fractional difference of this order.
    #[arg(long, allow_hyphen_values = true)]
    translate: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON with exponents and the region-D flag.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long)]
    t0: Option<f64>,
    /// Comma-separated s' values (default -0.9,...,0).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s_grid: Option<Vec<f64>>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Path file (.csv or binary); otherwise a path is synthesized.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    scales: ScaleArgs,
    /// Comma-separated t0 values; writes a field with a leading t0 column.
    #[arg(long, value_delimiter = ',')]
    t0_grid: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct FracdiffArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    /// Order; positive differentiates, negative integrates.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    /// Past samples kept in the convolution.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also compare frontiers before and after at t0 and write this JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    scales: ScaleArgs,
}

#[derive(Args)]
struct CovlabArgs {
    #[command(subcommand)]
    tool: CovTool,
}

#[derive(Subcommand)]
enum CovTool {
    /// E[X_t - X_u]^2, exact and optionally Monte Carlo.
    Variance {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        u: f64,
        /// Monte Carlo paths (needs --seed).
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frontier from exact increment sizes.
    Frontier {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        scales: ScaleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// E|X_t - X_u|^η ≤ C|t - u|^(1+μ) ρ^-ν over a pyramid.
    Moments {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        scales: ScaleArgs,
        #[arg(long)]
        eta_order: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.25)]
        rho0: f64,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit of the mBm local covariance expansion.
    MbmExpansion {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        scales: ScaleArgs,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper and lower covariance bounds for a GW process.
    GwBounds {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        #[arg(long, default_value_t = 20)]
        n_seq: usize,
        #[arg(long, num_args = 2, default_values_t = [0.2, 0.8])]
        window: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// all, a criterion id, or fbm, mbm, gw, wiener, fracdiff, stable,
    /// oracle, frontier, bridge, moments.
    #[arg(long)]
    suite: Option<String>,
    /// JSON with every check.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed stdout (e.g. piped into head) is not a failure
        Err(CliError::Module(microloc::Error::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("microloc: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Res<()> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    set_workers(cli.workers)?;
    match cli.command {
        Command::Synth(a) => synth_cmd(a, &cfg),
        Command::Frontier(a) => frontier_cmd(a),
        Command::Estimate(a) => estimate_cmd(a, &cfg),
        Command::Fracdiff(a) => fracdiff_cmd(a, &cfg),
        Command::Covlab(a) => covlab_cmd(a.tool, &cfg),
        Command::Verify(a) => verify_cmd(a, &cfg),
    }
}

fn set_workers(flag: Option<usize>) -> Res<()> {
    let workers = match flag {
        Some(w) => Some(w),
        None => match std::env::var(WORKERS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("{WORKERS_ENV}={v:?} is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(w) = workers {
        if w == 0 {
            return Err(CliError::Usage("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn process_spec(src: &SourceArgs, cfg: &RunConfig) -> Res<Option<ProcessSpec>> {
    if src.fbm_h.is_some() && src.process.is_some() {
        return Err(CliError::Usage("--fbm-h and --process are exclusive".into()));
    }
    if let Some(h) = src.fbm_h {
        return Ok(Some(ProcessSpec::Fbm { hurst: h }));
    }
    if let Some(text) = &src.process {
        let spec = serde_json::from_str(text).map_err(|e| CliError::Config(format!("--process: {e}")))?;
        return Ok(Some(spec));
    }
    Ok(cfg.spec.clone())
}

fn grid(src: &SourceArgs, cfg: &RunConfig) -> Res<Grid> {
    let n = require(pick(src.n, &cfg.n), "sample count (--n)")?;
    let dt = pick(src.dt, &cfg.dt).unwrap_or(1.0 / n as f64);
    let g = Grid::new(n, dt);
    g.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(g)
}

fn seed(src: &SourceArgs, cfg: &RunConfig) -> Res<u64> {
    pick(src.seed, &cfg.seed).ok_or_else(|| CliError::Config("--seed is mandatory for stochastic commands".into()))
}

fn spec_required(src: &SourceArgs, cfg: &RunConfig) -> Res<ProcessSpec> {
    process_spec(src, cfg)?.ok_or_else(|| CliError::Config("no process given (--fbm-h, --process or config spec)".into()))
}

/// The input file, a sampled config function, or a synthesized path.
fn load_path(input: Option<&PathBuf>, src: &SourceArgs, cfg: &RunConfig) -> Res<SampledPath> {
    if let Some(p) = input.or(cfg.input.as_ref()) {
        let file = File::open(p).map_err(|e| CliError::Config(format!("cannot open {}: {e}", p.display())))?;
        let r = BufReader::new(file);
        return Ok(if is_csv(p) {
            SampledPath::read_csv(r)?
        } else {
            SampledPath::read_binary(r)?
        });
    }
    if let (Some(f), None) = (&cfg.function, process_spec(src, cfg)?) {
        let g = grid(src, cfg)?;
        return Ok(SampledPath::from_function(f, 0.0, g.dt, g.n)?);
    }
    let spec = spec_required(src, cfg)?;
    let g = grid(src, cfg)?;
    let seed = seed(src, cfg)?;
    Ok(synthesize(&spec, g, seed)?)
}

fn is_csv(p: &Path) -> bool {
    p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn create(p: &Path) -> Res<BufWriter<File>> {
    File::create(p)
        .map(BufWriter::new)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))
}

/// Runs `f` on the file at `p`, or on stdout.
fn emit(p: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> microloc::Result<()>) -> Res<()> {
    match p {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w)?;
            w.flush().map_err(microloc::Error::from)?;
        }
        None => {
            let out = io::stdout();
            let mut w = out.lock();
            f(&mut w)?;
        }
    }
    Ok(())
}

fn emit_json(p: Option<&Path>, v: &serde_json::Value) -> Res<()> {
    emit(p, |w| {
        serde_json::to_writer_pretty(&mut *w, v)?;
        writeln!(w)?;
        Ok(())
    })
}

fn write_path(p: &Path, path: &SampledPath) -> Res<()> {
    let w = create(p)?;
    if is_csv(p) {
        path.write_csv(w)?;
    } else {
        path.write_binary(w)?;
    }
    let mut meta = p.as_os_str().to_owned();
    meta.push(".meta.json");
    path.write_meta_json(create(Path::new(&meta))?)?;
    Ok(())
}

fn synth_cmd(a: SynthArgs, cfg: &RunConfig) -> Res<()> {
    let out = require(pick(a.out, &cfg.out), "output path (--out)")?;
    let spec = spec_required(&a.source, cfg)?;
    let g = grid(&a.source, cfg)?;
    let seed = seed(&a.source, cfg)?;
    let path = synthesize(&spec, g, seed)?;
    write_path(&out, &path)?;
    for w in &path.meta.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn frontier_cmd(a: FrontierArgs) -> Res<()> {
    let mut chosen: Vec<Frontier> = Vec::new();
    if let Some(v) = &a.chirp {
        chosen.push(chirp_frontier(v[0], v[1])?);
    }
    if let Some(h) = a.fbm_h {
        chosen.push(fbm_frontier(h)?);
    }
    if let Some(g) = a.power {
        chosen.push(power_frontier(g)?);
    }
    if let Some(h) = a.weierstrass {
        chosen.push(weierstrass_frontier(h)?);
    }
    if let Some(v) = &a.mbm_chirp {
        chosen.push(mbm_frontier(v[0], &chirp_frontier(v[1], v[2])?)?);
    }
    if chosen.len() != 1 {
        return Err(CliError::Usage(
            "give exactly one of --chirp, --fbm-h, --power, --weierstrass, --mbm-chirp".into(),
        ));
    }
    let mut f = chosen.remove(0);
    if let Some(eps) = a.translate {
        f = f.translate(eps);
    }
    emit(a.out.as_deref(), |w| f.write_csv(w))?;
    if let Some(r) = &a.report {
        emit_json(Some(r), &f.report().to_json())?;
    }
    Ok(())
}

fn scales_for(s: &ScaleArgs, cfg: &RunConfig, len: usize) -> Scales {
    let d = Scales::default_for(len);
    Scales::new(pick(s.n_min, &cfg.n_min).unwrap_or(d.n_min), pick(s.n_max, &cfg.n_max).unwrap_or(d.n_max))
}

fn s_grid(s: &ScaleArgs, cfg: &RunConfig) -> Vec<f64> {
    pick(s.s_grid.clone(), &cfg.s_grid).unwrap_or_else(default_s_grid)
}

fn t0(s: &ScaleArgs, cfg: &RunConfig) -> f64 {
    pick(s.t0, &cfg.t0).unwrap_or(0.5)
}

fn estimate_cmd(a: EstimateArgs, cfg: &RunConfig) -> Res<()> {
    let path = load_path(a.input.as_ref(), &a.source, cfg)?;
    let sc = scales_for(&a.scales, cfg, path.len());
    let s = s_grid(&a.scales, cfg);
    let out = pick(a.out, &cfg.out);
    let report = pick(a.report, &cfg.report);
    if let Some(t0s) = pick(a.t0_grid, &cfg.t0_grid) {
        let field = estimate_field(&path, &t0s, &s, sc)
            .into_iter()
            .collect::<microloc::Result<Vec<_>>>()?;
        emit(out.as_deref(), |w| {
            writeln!(w, "t0,s_prime,sigma_hat,stderr")?;
            for e in &field {
                for i in 0..e.s_grid.len() {
                    writeln!(w, "{},{},{},{}", e.t0, e.s_grid[i], e.sigma_hat[i], e.stderr[i])?;
                }
            }
            Ok(())
        })?;
        if let Some(r) = report {
            emit_json(Some(&r), &json!({ "scales": sc, "field": field }))?;
        }
        return Ok(());
    }
    let t0 = t0(&a.scales, cfg);
    let e = estimate_frontier(&path, t0, &s, sc)?;
    emit(out.as_deref(), |w| {
        writeln!(w, "s_prime,sigma_hat,stderr")?;
        for i in 0..e.s_grid.len() {
            writeln!(w, "{},{},{}", e.s_grid[i], e.sigma_hat[i], e.stderr[i])?;
        }
        Ok(())
    })?;
    if let Some(r) = report {
        let pw = estimate_pointwise_exponent(&path, t0, sc)?;
        let loc = estimate_local_exponent(&path, t0, sc)?;
        let v = json!({
            "t0": t0,
            "samples": path.len(),
            "dt": path.dt(),
            "scales": sc,
            "pointwise_exponent": json_number(pw.value),
            "pointwise_saturated": pw.saturated,
            "local_exponent": json_number(loc.value),
            "local_saturated": loc.saturated,
            "estimate": {
                "s_grid": e.s_grid,
                "sigma_hat": e.sigma_hat.iter().map(|v| json_number(*v)).collect::<Vec<_>>(),
                "stderr": e.stderr,
                "ray": e.ray,
                "m_max": e.m_max,
            },
        });
        emit_json(Some(&r), &v)?;
    }
    Ok(())
}

fn fracdiff_cmd(a: FracdiffArgs, cfg: &RunConfig) -> Res<()> {
    let path = load_path(a.input.as_ref(), &a.source, cfg)?;
    let eps = require(pick(a.eps, &cfg.eps), "order (--eps)")?;
    let order = FracOrder {
        eps,
        window: pick(a.window, &cfg.window),
    };
    let d = frac_diff(&path, order)?;
    let out = require(pick(a.out, &cfg.out), "output path (--out)")?;
    write_path(&out, &d)?;
    if let Some(r) = pick(a.report, &cfg.report) {
        let sc = scales_for(&a.scales, cfg, path.len());
        let rep = verify_translation(&path, order, t0(&a.scales, cfg), &s_grid(&a.scales, cfg), sc)?;
        emit_json(Some(&r), &serde_json::to_value(&rep).map_err(microloc::Error::from)?)?;
    }
    Ok(())
}

fn covlab_cmd(tool: CovTool, cfg: &RunConfig) -> Res<()> {
    match tool {
        CovTool::Variance { source, t, u, paths, out } => {
            let spec = spec_required(&source, cfg)?;
            let exact = incremental_variance_exact(&spec, t, u)?;
            let mut v = json!({ "t": t, "u": u, "exact": exact });
            if let Some(p) = pick(paths, &cfg.paths) {
                let (m, se) = incremental_variance_mc(&spec, grid(&source, cfg)?, t, u, p, seed(&source, cfg)?)?;
                v["mc_mean"] = json!(m);
                v["mc_stderr"] = json!(se);
                v["paths"] = json!(p);
            }
            emit_json(pick(out, &cfg.out).as_deref(), &v)
        }
        CovTool::Frontier { source, scales, out, report } => {
            let spec = spec_required(&source, cfg)?;
            let g = grid(&source, cfg)?;
            let sc = scales_for(&scales, cfg, g.n);
            let d = deterministic_frontier(&spec, t0(&scales, cfg), &s_grid(&scales, cfg), sc, g)?;
            emit(pick(out, &cfg.out).as_deref(), |w| {
                writeln!(w, "s_prime,sigma")?;
                for (s, v) in d.estimate.s_grid.iter().zip(&d.estimate.sigma_hat) {
                    writeln!(w, "{s},{v}")?;
                }
                Ok(())
            })?;
            if let Some(r) = pick(report, &cfg.report) {
                emit_json(Some(&r), &d.to_json())?;
            }
            Ok(())
        }
        CovTool::Moments {
            source,
            scales,
            eta_order,
            mu,
            nu,
            c,
            rho0,
            paths,
            out,
        } => {
            let spec = spec_required(&source, cfg)?;
            let g = grid(&source, cfg)?;
            let cond = MomentCondition {
                eta_order,
                mu,
                nu,
                c,
                rho0,
            };
            let sc = scales_for(&scales, cfg, g.n);
            let n_paths = pick(paths, &cfg.paths).unwrap_or(400);
            let r = check_moment_condition_spec(&spec, g, seed(&source, cfg)?, n_paths, t0(&scales, cfg), cond, sc)?;
            emit_json(pick(out, &cfg.out).as_deref(), &r.to_json())
        }
        CovTool::MbmExpansion {
            source,
            scales,
            paths,
            out,
        } => {
            let Some(ProcessSpec::Mbm { h }) = process_spec(&source, cfg)? else {
                return Err(CliError::Config("mbm-expansion needs an mbm process".into()));
            };
            let g = grid(&source, cfg)?;
            let d = Scales::new(2, 6);
            let sc = Scales::new(scales.n_min.unwrap_or(d.n_min), scales.n_max.unwrap_or(d.n_max));
            let n_paths = pick(paths, &cfg.paths).unwrap_or(1000);
            let r = mbm_expansion_check(&h, t0(&scales, cfg), sc, g, n_paths, seed(&source, cfg)?)?;
            emit_json(pick(out, &cfg.out).as_deref(), &r.to_json())
        }
        CovTool::GwBounds {
            source,
            t0,
            pairs,
            n_seq,
            window,
            out,
        } => {
            let Some(ProcessSpec::Gw { h, lambda, depth }) = process_spec(&source, cfg)? else {
                return Err(CliError::Config("gw-bounds needs a gw process".into()));
            };
            let c = GwBoundsConfig {
                h,
                lambda,
                depth,
                window: (window[0], window[1]),
                n_pairs: pairs,
                seed: seed(&source, cfg)?,
                t0: pick(t0, &cfg.t0).unwrap_or(0.5),
                n_seq,
            };
            let r = gw_covariance_bounds_check(&c)?;
            emit_json(pick(out, &cfg.out).as_deref(), &r.to_json())
        }
    }
}

fn verify_cmd(a: VerifyArgs, cfg: &RunConfig) -> Res<()> {
    let name = pick(a.suite, &cfg.suite).unwrap_or_else(|| "all".into());
    let ids = verify::suite(&name).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut outcomes = Vec::new();
    let mut failed = Vec::new();
    for id in ids {
        let o = verify::run(id)?;
        println!("{}", o.line());
        for n in &o.notes {
            println!("      {n}");
        }
        if !o.passed() {
            failed.push(o.id.clone());
        }
        outcomes.push(o);
    }
    if let Some(r) = pick(a.report, &cfg.report) {
        emit_json(Some(&r), &serde_json::to_value(&outcomes).map_err(microloc::Error::from)?)?;
    }
    if failed.is_empty() {
        println!("{} of {} criteria pass", outcomes.len(), outcomes.len());
        Ok(())
    } else {
        Err(CliError::Acceptance(failed))
    }
}
