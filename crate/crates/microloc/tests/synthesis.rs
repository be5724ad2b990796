use microloc::covariance::{incremental_variance_exact, incremental_variances_mc};
use microloc::estimate::{estimate_local_exponent, oscillation, Scales};
use microloc::stats::{mean, median, skewness, std_error};
use microloc::synth::{self, ensemble_map, synthesize, Grid};
use microloc::{ProcessSpec, ScalarFunctionSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn wiener_sqrt_chirp() -> ProcessSpec {
    ProcessSpec::WienerIntegral {
        eta: ScalarFunctionSpec::SqrtAbsChirp {
            gamma: 0.3,
            beta: 0.5,
            t0: 0.5,
            root_order: 2.0,
        },
        psi: ScalarFunctionSpec::constant(0.0),
    }
}

fn specs() -> Vec<ProcessSpec> {
    vec![
        ProcessSpec::Fbm { hurst: 0.3 },
        ProcessSpec::Mbm {
            h: ScalarFunctionSpec::Linear { a: 0.4, b: 0.2 },
        },
        ProcessSpec::gw_auto(ScalarFunctionSpec::constant(0.5), 2.0, 0.5),
        wiener_sqrt_chirp(),
        ProcessSpec::StableIntegral {
            eta: ScalarFunctionSpec::constant(1.0),
            alpha: 1.5,
        },
    ]
}

fn random_pairs(n: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            if i != j {
                break (i.min(j), i.max(j));
            }
        })
        .collect()
}

#[test]
fn same_seed_same_bits_for_every_process() {
    let grid = Grid::unit(513);
    for spec in specs() {
        let a = synthesize(&spec, grid, 17).unwrap();
        let b = synthesize(&spec, grid, 17).unwrap();
        let c = synthesize(&spec, grid, 18).unwrap();
        let bits = |p: &microloc::SampledPath| p.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b), "{spec:?}");
        assert_ne!(bits(&a), bits(&c), "{spec:?}");
    }
}

#[test]
fn ensembles_do_not_depend_on_thread_count() {
    let spec = ProcessSpec::Fbm { hurst: 0.6 };
    let grid = Grid::unit(257);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let many = pool.install(|| ensemble_map(&spec, grid, 5, 12, |p| p.values().to_vec()).unwrap());
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| ensemble_map(&spec, grid, 5, 12, |p| p.values().to_vec()).unwrap());
    assert_eq!(many, one);
}

#[test]
fn brownian_one_step_variance_is_dt() {
    let n = 65;
    let dt = 1.0 / 64.0;
    let sq = ensemble_map(&ProcessSpec::Fbm { hurst: 0.5 }, Grid::new(n, dt), 101, 10_000, |p| {
        (p.values()[1] - p.values()[0]).powi(2)
    })
    .unwrap();
    let (m, se) = (mean(&sq), std_error(&sq));
    assert!((m - dt).abs() < 5.0 * se, "{m} vs {dt} ± {se}");
}

#[test]
fn fbm_variance_and_covariance() {
    let grid = Grid::unit(1025);
    let (i, j) = (grid_index(0.3, grid), grid_index(0.7, grid));
    let spec = ProcessSpec::Fbm { hurst: 0.7 };
    let v = incremental_variances_mc(&spec, grid, &[(i, j)], 10_000, 102).unwrap();
    let want = 0.4f64.powf(1.4);
    assert!((want - 0.2771).abs() < 5e-4);
    assert!((v[0].0 - want).abs() < 5.0 * v[0].1, "{:?} vs {want}", v[0]);

    let (a, b) = (grid_index(0.25, grid), grid_index(0.75, grid));
    let prod = ensemble_map(&ProcessSpec::Fbm { hurst: 0.5 }, grid, 103, 10_000, |p| {
        p.values()[a] * p.values()[b]
    })
    .unwrap();
    let (m, se) = (mean(&prod), std_error(&prod));
    assert!((m - 0.25).abs() < 5.0 * se, "{m} ± {se}");
}

fn grid_index(t: f64, grid: Grid) -> usize {
    (t / grid.dt).round() as usize
}

#[test]
fn refining_the_grid_scales_one_step_variance() {
    let h = 0.3;
    let mean_sq = |n: usize, seed: u64| {
        let per_path = ensemble_map(&ProcessSpec::Fbm { hurst: h }, Grid::unit(n), seed, 400, |p| {
            let x = p.values();
            mean(&x.windows(2).map(|w| (w[1] - w[0]).powi(2)).collect::<Vec<_>>())
        })
        .unwrap();
        (mean(&per_path), std_error(&per_path))
    };
    let (coarse, se_c) = mean_sq(257, 104);
    let (fine, se_f) = mean_sq(513, 105);
    let ratio = fine / coarse;
    let want = 2f64.powf(-2.0 * h);
    let se = ratio * ((se_c / coarse).powi(2) + (se_f / fine).powi(2)).sqrt();
    assert!((ratio - want).abs() < 5.0 * se, "{ratio} vs {want} ± {se}");
}

#[test]
fn mbm_with_constant_h_is_fbm_shaped() {
    let h = 0.6;
    let grid = Grid::unit(257);
    let spec = ProcessSpec::Mbm {
        h: ScalarFunctionSpec::constant(h),
    };
    let pairs = [(64, 128), (64, 96), (64, 72)];
    let v = incremental_variances_mc(&spec, grid, &pairs, 4000, 106).unwrap();
    // the variance law holds up to one constant factor
    let c = v[0].0 / 0.25f64.powf(2.0 * h);
    for (k, &(i, j)) in pairs.iter().enumerate().skip(1) {
        let lag = (j - i) as f64 * grid.dt;
        let rel = v[k].0 / (c * lag.powf(2.0 * h));
        assert!((rel - 1.0).abs() < 0.1, "lag {lag}: {rel}");
    }

    let g = Grid::unit(1 << 14);
    let locals = ensemble_map(&spec, g, 107, 30, |p| {
        estimate_local_exponent(p, 0.5, Scales::default_for(g.n)).unwrap().value
    })
    .unwrap();
    assert!((median(&locals) - h).abs() < 0.1, "{}", median(&locals));
}

#[test]
fn gw_series_matches_monte_carlo() {
    let spec = ProcessSpec::gw_auto(ScalarFunctionSpec::constant(0.5), 2.0, 0.5);
    let grid = Grid::unit(257);
    let pairs = random_pairs(grid.n, 12, 108);
    let mc = incremental_variances_mc(&spec, grid, &pairs, 4000, 109).unwrap();
    for (&(i, j), (m, se)) in pairs.iter().zip(mc) {
        let exact = incremental_variance_exact(&spec, grid.time(i), grid.time(j)).unwrap();
        assert!((m - exact).abs() < 5.0 * se, "({i},{j}): {m} vs {exact} ± {se}");
    }
}

#[test]
fn rougher_gw_oscillates_more() {
    let osc = |h: f64| {
        let spec = ProcessSpec::gw_auto(ScalarFunctionSpec::constant(h), 2.0, h);
        let v = ensemble_map(&spec, Grid::unit(4097), 110, 100, |p| oscillation(p, 0.5, 1.0 / 64.0).unwrap()).unwrap();
        median(&v)
    };
    assert!(osc(0.3) > osc(0.7));
}

#[test]
fn wiener_quadrature_matches_monte_carlo() {
    let spec = wiener_sqrt_chirp();
    let grid = Grid::unit(1025);
    let pairs = random_pairs(grid.n, 10, 111);
    let mc = incremental_variances_mc(&spec, grid, &pairs, 10_000, 112).unwrap();
    for (&(i, j), (m, se)) in pairs.iter().zip(mc) {
        let exact = incremental_variance_exact(&spec, grid.time(i), grid.time(j)).unwrap();
        assert!((m - exact).abs() < 5.0 * se, "({i},{j}): {m} vs {exact} ± {se}");
    }
}

#[test]
fn wiener_left_point_sums_next_to_the_centre() {
    // one step beside t0 the left-point sum, not the integral, is what the
    // generator reproduces
    let spec = wiener_sqrt_chirp();
    let ProcessSpec::WienerIntegral { eta, .. } = &spec else { unreachable!() };
    let grid = Grid::unit(1025);
    let c = grid_index(0.5, grid);
    let pairs = [(c + 1, c + 2), (c - 3, c + 2)];
    let mc = incremental_variances_mc(&spec, grid, &pairs, 10_000, 113).unwrap();
    for (&(i, j), (m, se)) in pairs.iter().zip(mc) {
        let sum: f64 = (i..j).map(|k| eta.eval(grid.time(k)).powi(2) * grid.dt).sum();
        assert!((m - sum).abs() < 5.0 * se, "({i},{j}): {m} vs {sum} ± {se}");
    }
}

#[test]
fn wiener_unit_kernel_is_brownian() {
    let spec = ProcessSpec::WienerIntegral {
        eta: ScalarFunctionSpec::constant(1.0),
        psi: ScalarFunctionSpec::constant(0.0),
    };
    let grid = Grid::unit(129);
    let v = incremental_variances_mc(&spec, grid, &[(32, 96)], 10_000, 112).unwrap();
    assert!((v[0].0 - 0.5).abs() < 5.0 * v[0].1, "{:?}", v[0]);
}

#[test]
fn degenerate_kernels() {
    let psi = ScalarFunctionSpec::Linear { a: 1.0, b: -2.0 };
    let p = synth::synth_wiener_integral(&ScalarFunctionSpec::constant(0.0), &psi, 33, 1.0 / 32.0, 7).unwrap();
    for (k, v) in p.values().iter().enumerate() {
        assert_eq!(*v, psi.eval(k as f64 / 32.0));
    }
    let s = synth::synth_stable_integral(&ScalarFunctionSpec::constant(0.0), 1.5, 33, 1.0 / 32.0, 7).unwrap();
    assert!(s.values().iter().all(|v| *v == 0.0));
}

#[test]
fn stable_first_moment_scales_as_t_to_one_over_alpha() {
    let alpha = 1.5;
    let spec = ProcessSpec::StableIntegral {
        eta: ScalarFunctionSpec::constant(1.0),
        alpha,
    };
    let grid = Grid::unit(65);
    let idx = [8usize, 16, 32, 64];
    let abs = ensemble_map(&spec, grid, 113, 20_000, |p| idx.iter().map(|&k| p.values()[k].abs()).collect::<Vec<_>>()).unwrap();
    let x: Vec<f64> = idx.iter().map(|&k| grid.time(k).ln()).collect();
    let y: Vec<f64> = (0..idx.len())
        .map(|c| mean(&abs.iter().map(|r| r[c]).collect::<Vec<_>>()).ln())
        .collect();
    let fit = microloc::stats::fit_line(&x, &y).unwrap();
    assert!((fit.slope - 1.0 / alpha).abs() < 0.05, "{}", fit.slope);
}

#[test]
fn gaussian_increments_have_no_skew() {
    let n_paths = 10_000;
    let se = (6.0 / n_paths as f64).sqrt();
    for spec in specs().into_iter().take(4) {
        let inc = ensemble_map(&spec, Grid::unit(257), 114, n_paths, |p| p.values()[200] - p.values()[100]).unwrap();
        let s = skewness(&inc);
        assert!(s.abs() < 5.0 * se, "{spec:?}: skewness {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 6,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn exact_and_mc_variances_agree(seed in 0u64..1000, which in 0usize..3) {
        let spec = match which {
            0 => ProcessSpec::Fbm { hurst: 0.35 },
            1 => ProcessSpec::gw_auto(ScalarFunctionSpec::constant(0.6), 3.0, 0.6),
            _ => wiener_sqrt_chirp(),
        };
        // the Wiener kernel is singular at its centre, where left-point sums
        // need a fine grid to match the integral
        let grid = Grid::unit(if which == 2 { 1025 } else { 129 });
        let pairs = random_pairs(grid.n, 10, seed);
        let mc = incremental_variances_mc(&spec, grid, &pairs, 2000, seed + 1).unwrap();
        for (&(i, j), (m, se)) in pairs.iter().zip(mc) {
            let exact = incremental_variance_exact(&spec, grid.time(i), grid.time(j)).unwrap();
            prop_assert!((m - exact).abs() < 5.0 * se, "({}, {}): {} vs {} ± {}", i, j, m, exact, se);
        }
    }

    #[test]
    fn paths_start_at_zero_and_stay_finite(seed in any::<u64>(), h in 0.1f64..0.9) {
        let p = synth::synth_fbm(h, 200, 0.01, seed).unwrap();
        prop_assert_eq!(p.len(), 200);
        prop_assert_eq!(p.values()[0], 0.0);
        prop_assert!(p.values().iter().all(|v| v.is_finite()));
    }
}
