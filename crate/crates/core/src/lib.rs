//! Pricing and simulation for a Brownian log-price model and its
//! mean-reverting alternative.
//!
//! The crate covers:
//!
//! - [`models`]: the Wiener-Bachelier and Ornstein-Uhlenbeck log-return
//!   laws, their arbitrage-free calibration, moment generating functions
//!   and cumulants;
//! - [`pricing`]: Black-Scholes and mean-reverting closed forms for
//!   European calls, an independent adaptive-quadrature pricer that serves
//!   as their oracle, and the log-price comparison curve between them;
//! - [`simulation`]: exact and Euler-Maruyama path samplers with
//!   counter-based reproducible randomness, a Monte Carlo pricer with
//!   standard errors, and AR(1) parameter estimation;
//! - [`tactics`]: the discretized strategy-update kernel whose ground
//!   state is an exact fixed point and whose conjugate is the
//!   mean-reverting transition density;
//! - [`quadrature`]: the adaptive Gauss-Kronrod integrator backing the
//!   oracles.

pub mod error;
pub mod math;
pub mod models;
pub mod pricing;
pub mod quadrature;
pub mod simulation;
pub mod tactics;

pub use error::{Error, Result};
pub use models::{
    short_time_cumulant_gap, CumulantPair, LogPriceDensity, Model, ModelKind,
    OrnsteinUhlenbeckParams, WienerBachelierParams,
};
pub use pricing::{
    compare_curve, price_call_bs, price_call_ou, price_call_quadrature, std_normal_cdf, CurvePoint,
    OptionSpec, PriceMethod, PriceResult,
};
pub use simulation::{
    calibrate_ou, ks_statistic, mc_price_call, simulate_gbm_log, simulate_ou_log, PathBatch,
    Scheme, SimConfig,
};
pub use tactics::{
    apply_tactic, check_semigroup, fixed_point_residual, h_transform, h_transform_max_deviation,
    kernel_value, KernelGrid, StrategyFunction, TacticParams,
};
