//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line. Run with `--nocapture` to see the lines:
//!
//! ```text
//! cargo test -p mezzo-cli --test acceptance -- --nocapture
//! ```

use mezzo_core::quadrature::integrate;
use mezzo_core::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;

fn report(number: u32, name: &str, started: Instant, failures: Vec<String>) {
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "acceptance {number} ({name}): {verdict} [{:.2?}]",
        started.elapsed()
    );
    assert!(
        failures.is_empty(),
        "acceptance {number} ({name}) failed:\n{}",
        failures.join("\n")
    );
}

fn wb(r: f64, sigma: f64) -> WienerBachelierParams {
    WienerBachelierParams::new(r, sigma).unwrap()
}

fn ou(r: f64, sigma: f64, q: f64) -> OrnsteinUhlenbeckParams {
    OrnsteinUhlenbeckParams::new(r, sigma, q).unwrap()
}

/// 1. Closed form vs quadrature oracle: 1e-7 relative over 1000 randomized
///    draws per model (sigma in [0.05, 1.5], q in [0.1, 5], r in [-0.05, 0.1],
///    T in [0.05, 5], K/S0 in [0.3, 3]).
#[test]
fn criterion_1_closed_form_vs_oracle() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for draw in 0..1000 {
        let sigma = rng.random_range(0.05..1.5);
        let q = rng.random_range(0.1..5.0);
        let r = rng.random_range(-0.05..0.1);
        let t = rng.random_range(0.05..5.0);
        let ratio = rng.random_range(0.3..3.0);
        let opt = OptionSpec::new(1.0, ratio, t).unwrap();

        let params = wb(r, sigma);
        let closed = price_call_bs(&params, &opt).unwrap().value;
        let oracle = price_call_quadrature(&Model::WienerBachelier(params), &opt, 1e-9)
            .unwrap()
            .value;
        if (closed - oracle).abs() > 1e-7 * 1.0_f64.max(closed) {
            failures.push(format!(
                "draw {draw} bs: closed {closed} vs oracle {oracle}"
            ));
        }

        let params = ou(r, sigma, q);
        let closed = price_call_ou(&params, &opt).unwrap().value;
        let oracle = price_call_quadrature(&Model::OrnsteinUhlenbeck(params), &opt, 1e-9)
            .unwrap()
            .value;
        if (closed - oracle).abs() > 1e-7 * 1.0_f64.max(closed) {
            failures.push(format!(
                "draw {draw} ou: closed {closed} vs oracle {oracle}"
            ));
        }
    }
    report(1, "closed form vs oracle", started, failures);
}

/// 2. Black-Scholes golden value 10.450584 +- 1e-5 at
///    (S0, K, r, sigma, T) = (100, 100, 0.05, 0.2, 1), cross-checked by the
///    quadrature oracle.
#[test]
fn criterion_2_black_scholes_golden_value() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let opt = OptionSpec::new(100.0, 100.0, 1.0).unwrap();
    let params = wb(0.05, 0.2);
    let closed = price_call_bs(&params, &opt).unwrap().value;
    let oracle = price_call_quadrature(&Model::WienerBachelier(params), &opt, 1e-9)
        .unwrap()
        .value;
    // Reference frozen from an independent 40-digit quadrature of the
    // discounted payoff integral.
    let golden = 10.450583572185567;
    if (closed - golden).abs() > 1e-5 {
        failures.push(format!("closed {closed} vs golden {golden}"));
    }
    if (closed - 10.450584).abs() > 1e-5 {
        failures.push(format!("closed {closed} vs rounded golden 10.450584"));
    }
    if (oracle - golden).abs() > 1e-7 {
        failures.push(format!("oracle {oracle} vs golden {golden}"));
    }
    report(2, "Black-Scholes golden value", started, failures);
}

/// 3. The comparison command reproduces the log-price-gap curve:
///    finite and smooth over b in [-2, 2] with r=0, sigma=q=1, T=1, and the
///    b=0 value matches the independent 2N(s/2)-1 vs 2N(1/2)-1 derivation
///    within 1e-3.
#[test]
fn criterion_3_comparison_curve() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let out = std::env::temp_dir().join(format!("mezzo-acceptance-{}.csv", std::process::id()));
    let output = Command::new(env!("CARGO_BIN_EXE_mezzo"))
        .args(["compare", "--out", out.to_str().unwrap()])
        .output()
        .expect("binary runs");
    if output.status.code() != Some(0) {
        failures.push(format!("compare exited with {:?}", output.status.code()));
    }
    let rows: Vec<(f64, f64)> = std::fs::read_to_string(&out)
        .unwrap_or_default()
        .lines()
        .skip(1)
        .map(|line| {
            let mut fields = line.split(',');
            (
                fields.next().unwrap().parse().unwrap(),
                fields.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    std::fs::remove_file(&out).ok();

    if rows.len() != 101 {
        failures.push(format!("expected 101 rows, got {}", rows.len()));
    }
    if !rows.iter().all(|(b, g)| b.is_finite() && g.is_finite()) {
        failures.push("curve contains non-finite values".into());
    }
    if rows.first().map(|r| r.0) != Some(-2.0) || rows.last().map(|r| r.0) != Some(2.0) {
        failures.push("curve does not span b in [-2, 2]".into());
    }
    // Independent reference at b = 0: both prices reduce to 2N(.)-1.
    let s = (1.0 - (-2.0f64).exp()).sqrt();
    let reference =
        (2.0 * std_normal_cdf(0.5 * s) - 1.0).ln() - (2.0 * std_normal_cdf(0.5) - 1.0).ln();
    match rows.iter().find(|(b, _)| b.abs() < 1e-12) {
        Some((_, gap)) => {
            if (gap - reference).abs() > 1e-3 {
                failures.push(format!("gap at b=0 is {gap}, reference {reference}"));
            }
        }
        None => failures.push("no b = 0 sample in the default grid".into()),
    }
    // Smoothness: the second difference never flips sign beyond tolerance.
    let second: Vec<f64> = rows
        .windows(3)
        .map(|w| w[2].1 - 2.0 * w[1].1 + w[0].1)
        .collect();
    let flips = second
        .windows(2)
        .filter(|pair| {
            pair[0].signum() != pair[1].signum() && pair[0].abs() > 1e-9 && pair[1].abs() > 1e-9
        })
        .count();
    if flips != 0 {
        failures.push(format!("second difference changes sign {flips} times"));
    }
    report(3, "comparison curve", started, failures);
}

/// 4. Growth identities by quadrature: E e^X = e^{rt} (Brownian) and
///    e^{rqt} (mean-reverting) within 1e-8 relative over the randomized box.
#[test]
fn criterion_4_martingale_identities() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for draw in 0..200 {
        let sigma = rng.random_range(0.05..2.0);
        let q = rng.random_range(0.1..5.0);
        let t = rng.random_range(0.01..10.0);
        let r = rng.random_range(-0.1..0.2);
        for model in [
            Model::WienerBachelier(wb(r, sigma)),
            Model::OrnsteinUhlenbeck(ou(r, sigma, q)),
        ] {
            let law = model.log_price_density(t).unwrap();
            let (m, v, sd) = (law.mean(), law.variance(), law.std_dev());
            let want = model.growth_exponent(t).exp();
            let got = integrate(
                |x| x.exp() * law.pdf(x),
                m - 13.0 * sd,
                m + v + 13.0 * sd,
                1e-10 * want,
            )
            .unwrap()
            .value;
            if ((got - want) / want).abs() > 1e-8 {
                failures.push(format!("draw {draw} {model:?}: {got} vs {want}"));
            }
        }
    }
    report(4, "martingale identities", started, failures);
}

/// 5. Cumulants: analytic values match central differences of ln Phi at
///    lambda = 0 (step 1e-5) within 1e-5; the third cumulant vanishes
///    within 1e-4; and the short-time slope of the log-MGF gap matches
///    ((q-1) r + sigma^2 (lambda-1)(q-1/2)) lambda within 1% at t = 1e-4.
#[test]
fn criterion_5_cumulants_and_short_time_expansion() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let h = 1e-5;
    let cases = [
        (0.0, 1.0, 1.0, 1.0),
        (0.05, 0.2, 2.0, 1.0),
        (-0.02, 0.6, 0.4, 3.0),
        (0.1, 1.5, 4.0, 0.2),
    ];
    for (r, sigma, q, t) in cases {
        for model in [
            Model::WienerBachelier(wb(r, sigma)),
            Model::OrnsteinUhlenbeck(ou(r, sigma, q)),
        ] {
            let g = |lambda: f64| model.log_mgf(lambda, t);
            let first = (g(h) - g(-h)) / (2.0 * h);
            let second = (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
            let third = (g(2.0 * h) - 2.0 * g(h) + 2.0 * g(-h) - g(-2.0 * h)) / (2.0 * h * h * h);
            let analytic = model.cumulants(t);
            if (first - analytic.first).abs() > 1e-5 {
                failures.push(format!("{model:?} t={t}: s1 {first} vs {}", analytic.first));
            }
            if (second - analytic.second).abs() > 1e-5 {
                failures.push(format!(
                    "{model:?} t={t}: s2 {second} vs {}",
                    analytic.second
                ));
            }
            if third.abs() > 1e-4 {
                failures.push(format!("{model:?} t={t}: s3 {third} should vanish"));
            }
        }
    }
    // Short-time slope of the gap.
    let t = 1e-4;
    for (r, sigma, q, lambda) in [(0.05, 0.2, 2.0, 0.5), (0.1, 0.5, 3.0, -1.0)] {
        let coefficient = ((q - 1.0) * r + sigma * sigma * (lambda - 1.0) * (q - 0.5)) * lambda;
        let gap = short_time_cumulant_gap(&wb(r, sigma), &ou(r, sigma, q), lambda, t).unwrap();
        let slope = gap / t;
        if ((slope - coefficient) / coefficient).abs() > 0.01 {
            failures.push(format!(
                "slope {slope} vs coefficient {coefficient} at (r={r}, sigma={sigma}, q={q}, lambda={lambda})"
            ));
        }
    }
    report(5, "cumulants and short-time expansion", started, failures);
}

/// 6. Monte Carlo consistency: 1e6-path estimates within 3 standard errors
///    of the closed forms on 10 fixed seeds for both models, and the closed
///    form inside the 99% confidence interval in at least 45 of 50 seeds.
#[test]
fn criterion_6_monte_carlo_consistency() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let paths = 1_000_000;
    let z99 = 2.5758293035489004; // two-sided 99% normal quantile

    let setups = [
        (
            Model::WienerBachelier(wb(0.05, 0.2)),
            OptionSpec::new(100.0, 100.0, 1.0).unwrap(),
            price_call_bs(&wb(0.05, 0.2), &OptionSpec::new(100.0, 100.0, 1.0).unwrap())
                .unwrap()
                .value,
        ),
        (
            Model::OrnsteinUhlenbeck(ou(0.0, 1.0, 1.0)),
            OptionSpec::new(1.0, 1.0, 1.0).unwrap(),
            price_call_ou(&ou(0.0, 1.0, 1.0), &OptionSpec::new(1.0, 1.0, 1.0).unwrap())
                .unwrap()
                .value,
        ),
    ];

    for (model, opt, closed) in &setups {
        for seed in 0..10u64 {
            let cfg = SimConfig::new(paths, 1, opt.maturity(), seed, Scheme::Exact).unwrap();
            let mc = mc_price_call(model, opt, &cfg).unwrap();
            let se = mc.std_error.unwrap();
            if (mc.value - closed).abs() > 3.0 * se {
                failures.push(format!(
                    "{model:?} seed {seed}: {} vs closed {closed} (se {se})",
                    mc.value
                ));
            }
        }
        let mut covered = 0;
        for seed in 0..50u64 {
            let cfg = SimConfig::new(paths, 1, opt.maturity(), seed, Scheme::Exact).unwrap();
            let mc = mc_price_call(model, opt, &cfg).unwrap();
            let half_width = z99 * mc.std_error.unwrap();
            if (mc.value - closed).abs() <= half_width {
                covered += 1;
            }
        }
        if covered < 45 {
            failures.push(format!(
                "{model:?}: closed form inside the 99% CI only {covered}/50 times"
            ));
        }
    }
    report(6, "Monte Carlo consistency", started, failures);
}

/// 7. Sampler law: Kolmogorov-Smirnov distance of 1e5 exact-sampler
///    terminal values against the analytic time-T law below the 1%
///    critical value.
#[test]
fn criterion_7_sampler_law() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let n = 100_000;
    let critical = 1.62762 / (n as f64).sqrt();

    let params = wb(0.05, 0.2);
    let cfg = SimConfig::new(n, 8, 1.0, 70, Scheme::Exact).unwrap();
    let batch = simulate_gbm_log(&params, 0.0, &cfg).unwrap();
    let law = params.log_price_density(1.0).unwrap();
    let d = ks_statistic(&batch.terminal_values(), |x| law.cdf(x));
    if d >= critical {
        failures.push(format!("gbm KS {d} vs critical {critical}"));
    }

    let params = ou(0.0, 1.0, 1.0);
    let x0 = params.calibrate_x0(1.0).unwrap();
    let cfg = SimConfig::new(n, 8, 1.0, 71, Scheme::Exact).unwrap();
    let batch = simulate_ou_log(&params, x0, &cfg).unwrap();
    let law = params.log_price_density(1.0).unwrap();
    let d = ks_statistic(&batch.terminal_values(), |x| law.cdf(x));
    if d >= critical {
        failures.push(format!("ou KS {d} vs critical {critical}"));
    }
    report(7, "sampler law (KS)", started, failures);
}

/// 8. Kernel diagnostics on the 1024-node default grid: fixed-point
///    residual <= 1e-6, semigroup residual <= 1e-5, conjugated-kernel
///    deviation from the transition density (sigma^2 = sigma_r / 2)
///    <= 1e-10.
#[test]
fn criterion_8_tactics_kernel() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let sigma_r = 1.0;
    let grid = KernelGrid::default_for_scale(sigma_r).unwrap();

    for gamma in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let params = TacticParams::new(gamma, sigma_r).unwrap();
        let residual = fixed_point_residual(&params, grid).unwrap();
        if residual > 1e-6 {
            failures.push(format!("fixed point at gamma {gamma}: {residual}"));
        }
    }

    let ground = StrategyFunction::ground_state(grid, sigma_r).unwrap();
    let first = TacticParams::new(0.3, sigma_r).unwrap();
    let second = TacticParams::new(0.5, sigma_r).unwrap();
    let residual = check_semigroup(&first, &second, &ground).unwrap();
    if residual > 1e-5 {
        failures.push(format!("semigroup residual {residual}"));
    }
    let excited = StrategyFunction::from_fn(grid, |y| y * (-0.5 * y * y).exp()).unwrap();
    let residual = check_semigroup(&first, &second, &excited).unwrap();
    if residual > 1e-5 {
        failures.push(format!("semigroup residual on excited mode {residual}"));
    }

    let params = TacticParams::new(1.0, sigma_r).unwrap();
    let deviation = h_transform_max_deviation(&params, grid).unwrap();
    if deviation > 1e-10 {
        failures.push(format!("conjugated-kernel deviation {deviation}"));
    }
    report(8, "tactics kernel", started, failures);
}

/// 9. Calibration round-trip: the AR(1) fit on a 1e5-step simulated path
///    recovers q within 10% and sigma within 5%.
#[test]
fn criterion_9_calibration_round_trip() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let truth = ou(0.0, 1.0, 1.0);
    let cfg = SimConfig::new(1, 100_000, 1000.0, 2024, Scheme::Exact).unwrap();
    let batch = simulate_ou_log(&truth, 0.0, &cfg).unwrap();
    let fitted = calibrate_ou(batch.path(0), cfg.dt(), 0.0).unwrap();
    if (fitted.mean_reversion() - 1.0).abs() > 0.1 {
        failures.push(format!("q recovered as {}", fitted.mean_reversion()));
    }
    if (fitted.sigma() - 1.0).abs() > 0.05 {
        failures.push(format!("sigma recovered as {}", fitted.sigma()));
    }
    report(9, "calibration round trip", started, failures);
}
