//! The five subcommands. Each one resolves flags against the optional
//! config file, validates through the library constructors, calls exactly
//! one library entry point and formats the result; no numerics live here.

use crate::config::{require, resolve, ConfigMap};
use crate::failure::{CmdResult, Failure};
use crate::output;
use clap::{Args, ValueEnum};
use mezzo_core::{
    calibrate_ou, check_semigroup, compare_curve, fixed_point_residual, h_transform_max_deviation,
    mc_price_call, price_call_bs, price_call_ou, price_call_quadrature, simulate_gbm_log,
    simulate_ou_log, KernelGrid, Model, OptionSpec, OrnsteinUhlenbeckParams, Scheme, SimConfig,
    StrategyFunction, TacticParams, WienerBachelierParams,
};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriceModel {
    Bs,
    Ou,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Closed,
    Quad,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModel {
    Gbm,
    Ou,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Exact,
    Euler,
}

fn parse_enum<T: ValueEnum>(raw: &str, key: &str) -> std::result::Result<T, Failure> {
    T::from_str(raw, true)
        .map_err(|_| Failure::Usage(format!("config value {key}={raw} is not valid")))
}

fn enum_from_config<T: ValueEnum>(
    cfg: &ConfigMap,
    key: &str,
) -> std::result::Result<Option<T>, Failure> {
    cfg.str(key).map(|raw| parse_enum(raw, key)).transpose()
}

#[derive(Args, Debug)]
pub struct PriceArgs {
    /// Model: bs (Black-Scholes) or ou (mean-reverting)
    #[arg(long, value_enum)]
    model: Option<PriceModel>,
    /// Spot price S0
    #[arg(long, allow_negative_numbers = true)]
    s0: Option<f64>,
    /// Strike K
    #[arg(long, allow_negative_numbers = true)]
    strike: Option<f64>,
    /// Risk-free rate r
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Volatility sigma
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Maturity T in years
    #[arg(long, allow_negative_numbers = true)]
    maturity: Option<f64>,
    /// Mean-reversion speed q (ou model only)
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// Pricing method
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Monte Carlo path count
    #[arg(long)]
    paths: Option<usize>,
    /// Monte Carlo seed
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute tolerance for the quadrature method
    #[arg(long, allow_negative_numbers = true)]
    tolerance: Option<f64>,
    /// Optional key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn price(args: PriceArgs) -> CmdResult {
    let cfg = ConfigMap::load(args.config.as_deref())?;
    let model_tag = require(
        resolve(args.model, enum_from_config(&cfg, "model")?),
        "model",
    )?;
    let s0 = require(resolve(args.s0, cfg.parse("s0")?), "s0")?;
    let strike = require(resolve(args.strike, cfg.parse("strike")?), "strike")?;
    let rate = require(resolve(args.rate, cfg.parse("rate")?), "rate")?;
    let sigma = require(resolve(args.sigma, cfg.parse("sigma")?), "sigma")?;
    let maturity = require(resolve(args.maturity, cfg.parse("maturity")?), "maturity")?;
    let method = resolve(args.method, enum_from_config(&cfg, "method")?).unwrap_or(Method::Closed);
    let paths = resolve(args.paths, cfg.parse("paths")?).unwrap_or(1_000_000);
    let seed = resolve(args.seed, cfg.parse("seed")?).unwrap_or(0);
    let tolerance = resolve(args.tolerance, cfg.parse("tolerance")?).unwrap_or(1e-8);

    let opt = OptionSpec::new(s0, strike, maturity)?;
    let model = match model_tag {
        PriceModel::Bs => Model::WienerBachelier(WienerBachelierParams::new(rate, sigma)?),
        PriceModel::Ou => {
            let q = require(resolve(args.q, cfg.parse("q")?), "q")?;
            Model::OrnsteinUhlenbeck(OrnsteinUhlenbeckParams::new(rate, sigma, q)?)
        }
    };

    let result = match (method, &model) {
        (Method::Closed, Model::WienerBachelier(p)) => price_call_bs(p, &opt)?,
        (Method::Closed, Model::OrnsteinUhlenbeck(p)) => price_call_ou(p, &opt)?,
        (Method::Quad, m) => price_call_quadrature(m, &opt, tolerance)?,
        (Method::Mc, m) => {
            let horizon = if maturity > 0.0 { maturity } else { 1.0 };
            let sim = SimConfig::new(paths, 1, horizon, seed, Scheme::Exact)?;
            mc_price_call(m, &opt, &sim)?
        }
    };

    match result.std_error {
        Some(se) => println!(
            "value={} method={} stderr={}",
            output::human(result.value),
            result.method,
            output::human(se)
        ),
        None => println!(
            "value={} method={}",
            output::human(result.value),
            result.method
        ),
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Lower end of the log-moneyness range b = ln(S0/K)
    #[arg(long, allow_negative_numbers = true)]
    b_min: Option<f64>,
    /// Upper end of the log-moneyness range
    #[arg(long, allow_negative_numbers = true)]
    b_max: Option<f64>,
    /// Number of samples (>= 2)
    #[arg(long)]
    points: Option<usize>,
    /// Risk-free rate shared by both models
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Volatility shared by both models
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Mean-reversion speed of the ou model
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// Maturity T in years
    #[arg(long, allow_negative_numbers = true)]
    maturity: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn compare(args: CompareArgs) -> CmdResult {
    let cfg = ConfigMap::load(args.config.as_deref())?;
    let b_min = resolve(args.b_min, cfg.parse("b-min")?).unwrap_or(-2.0);
    let b_max = resolve(args.b_max, cfg.parse("b-max")?).unwrap_or(2.0);
    let points = resolve(args.points, cfg.parse("points")?).unwrap_or(101);
    let rate = resolve(args.rate, cfg.parse("rate")?).unwrap_or(0.0);
    let sigma = resolve(args.sigma, cfg.parse("sigma")?).unwrap_or(1.0);
    let q = resolve(args.q, cfg.parse("q")?).unwrap_or(1.0);
    let maturity = resolve(args.maturity, cfg.parse("maturity")?).unwrap_or(1.0);
    let out = require(resolve(args.out, cfg.parse("out")?), "out")?;

    let classical = WienerBachelierParams::new(rate, sigma)?;
    let reverting = OrnsteinUhlenbeckParams::new(rate, sigma, q)?;
    let curve = compare_curve(&classical, &reverting, maturity, b_min, b_max, points)?;

    output::write_atomic(&out, |w| {
        writeln!(w, "b,ln_cq_minus_ln_c")?;
        for point in &curve {
            writeln!(
                w,
                "{},{}",
                output::full(point.moneyness),
                output::full(point.log_price_gap)
            )?;
        }
        Ok(())
    })?;
    println!(
        "wrote {} samples to {} (convention: strike fixed at 1, spot = e^b)",
        curve.len(),
        out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Dynamics: gbm (Brownian log-price) or ou (mean-reverting)
    #[arg(long, value_enum)]
    model: Option<SimModel>,
    /// Number of paths
    #[arg(long)]
    paths: Option<usize>,
    /// Number of time steps
    #[arg(long)]
    steps: Option<usize>,
    /// Horizon T in years
    #[arg(long, allow_negative_numbers = true)]
    maturity: Option<f64>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Discretization scheme
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Risk-free rate r
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Volatility sigma
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Mean-reversion speed q (ou model only)
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    /// Initial log-price (default 0)
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> CmdResult {
    let cfg = ConfigMap::load(args.config.as_deref())?;
    let model = require(
        resolve(args.model, enum_from_config(&cfg, "model")?),
        "model",
    )?;
    let paths = require(resolve(args.paths, cfg.parse("paths")?), "paths")?;
    let steps = require(resolve(args.steps, cfg.parse("steps")?), "steps")?;
    let maturity = require(resolve(args.maturity, cfg.parse("maturity")?), "maturity")?;
    let seed = require(resolve(args.seed, cfg.parse("seed")?), "seed")?;
    let scheme = require(
        resolve(args.scheme, enum_from_config(&cfg, "scheme")?),
        "scheme",
    )?;
    let rate = require(resolve(args.rate, cfg.parse("rate")?), "rate")?;
    let sigma = require(resolve(args.sigma, cfg.parse("sigma")?), "sigma")?;
    let x0 = resolve(args.x0, cfg.parse("x0")?).unwrap_or(0.0);
    let out = require(resolve(args.out, cfg.parse("out")?), "out")?;

    let scheme = match scheme {
        SchemeArg::Exact => Scheme::Exact,
        SchemeArg::Euler => Scheme::Euler,
    };
    let sim = SimConfig::new(paths, steps, maturity, seed, scheme)?;
    let batch = match model {
        SimModel::Gbm => simulate_gbm_log(&WienerBachelierParams::new(rate, sigma)?, x0, &sim)?,
        SimModel::Ou => {
            let q = require(resolve(args.q, cfg.parse("q")?), "q")?;
            simulate_ou_log(&OrnsteinUhlenbeckParams::new(rate, sigma, q)?, x0, &sim)?
        }
    };

    output::write_atomic(&out, |w| batch.write_csv(w))?;
    println!(
        "wrote {} paths x {} steps to {}",
        batch.paths(),
        batch.steps(),
        out.display()
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Input CSV with columns t,log_price (header optional)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Observation spacing in years
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Rate to attach to the estimate (not identified by the fit)
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Optional key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn calibrate(args: CalibrateArgs) -> CmdResult {
    let cfg = ConfigMap::load(args.config.as_deref())?;
    let input = require(resolve(args.input, cfg.parse("input")?), "input")?;
    let dt = require(resolve(args.dt, cfg.parse("dt")?), "dt")?;
    let rate = resolve(args.rate, cfg.parse("rate")?).unwrap_or(0.0);

    let text = std::fs::read_to_string(&input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
    let mut series = Vec::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let _t = fields.next();
        let value = fields.next().map(str::trim).unwrap_or("");
        match value.parse::<f64>() {
            Ok(v) => series.push(v),
            Err(_) if number == 0 => continue, // header
            Err(_) => {
                return Err(Failure::Usage(format!(
                    "{}: cannot parse line {}: {line:?}",
                    input.display(),
                    number + 1
                )))
            }
        }
    }

    let fitted = calibrate_ou(&series, dt, rate)?;
    println!(
        "q={} sigma={}",
        output::human(fitted.mean_reversion()),
        output::human(fitted.sigma())
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct TacticArgs {
    /// Tactic time gamma (> 0)
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Kernel scale sigma_r (> 0)
    #[arg(long, allow_negative_numbers = true)]
    sigma_r: Option<f64>,
    /// Grid points (default 1024)
    #[arg(long)]
    grid_n: Option<usize>,
    /// Half-width in ground-state standard deviations (default 10)
    #[arg(long, allow_negative_numbers = true)]
    grid_span: Option<f64>,
    /// Optional key=value config file; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

const FIXED_POINT_LIMIT: f64 = 1e-6;
const SEMIGROUP_LIMIT: f64 = 1e-5;
const H_TRANSFORM_LIMIT: f64 = 1e-10;

pub fn tactic(args: TacticArgs) -> CmdResult {
    let cfg = ConfigMap::load(args.config.as_deref())?;
    let gamma = require(resolve(args.gamma, cfg.parse("gamma")?), "gamma")?;
    let sigma_r = require(resolve(args.sigma_r, cfg.parse("sigma-r")?), "sigma-r")?;
    let grid_n = resolve(args.grid_n, cfg.parse("grid-n")?).unwrap_or(1024);
    let grid_span = resolve(args.grid_span, cfg.parse("grid-span")?).unwrap_or(10.0);

    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Failure::Usage(format!(
            "--gamma must be positive, got {gamma}"
        )));
    }
    let params = TacticParams::new(gamma, sigma_r)?;
    let grid = KernelGrid::spanning(sigma_r, grid_span, grid_n)?;

    let fixed_point = fixed_point_residual(&params, grid)?;
    let half = TacticParams::new(gamma / 2.0, sigma_r)?;
    let ground = StrategyFunction::ground_state(grid, sigma_r)?;
    let semigroup = check_semigroup(&half, &half, &ground)?;
    let h_deviation = h_transform_max_deviation(&params, grid)?;

    println!("fixed_point_residual={fixed_point:.6e} limit={FIXED_POINT_LIMIT:.0e}");
    println!("semigroup_residual={semigroup:.6e} limit={SEMIGROUP_LIMIT:.0e}");
    println!("h_transform_deviation={h_deviation:.6e} limit={H_TRANSFORM_LIMIT:.0e}");

    let mut breaches = Vec::new();
    if fixed_point > FIXED_POINT_LIMIT {
        breaches.push(format!(
            "fixed_point_residual={fixed_point:.6e} exceeds {FIXED_POINT_LIMIT:.0e}"
        ));
    }
    if semigroup > SEMIGROUP_LIMIT {
        breaches.push(format!(
            "semigroup_residual={semigroup:.6e} exceeds {SEMIGROUP_LIMIT:.0e}"
        ));
    }
    if h_deviation > H_TRANSFORM_LIMIT {
        breaches.push(format!(
            "h_transform_deviation={h_deviation:.6e} exceeds {H_TRANSFORM_LIMIT:.0e}"
        ));
    }
    if !breaches.is_empty() {
        return Err(Failure::Numerical(format!(
            "tolerance breached: {}",
            breaches.join("; ")
        )));
    }
    println!("status=ok");
    Ok(())
}
