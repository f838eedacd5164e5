//! Path simulation, Monte Carlo pricing and parameter estimation.
//!
//! Randomness is counter-based: every path owns a ChaCha stream derived
//! from (seed, stream index), so batches are bit-identical no matter how
//! the work is split across threads.

use crate::error::{Error, Result};
use crate::models::{Model, OrnsteinUhlenbeckParams, WienerBachelierParams};
use crate::pricing::{OptionSpec, PriceMethod, PriceResult};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::io::{self, Write};

/// Discretization scheme for the path recursions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// One-step sampling from the exact transition law.
    Exact,
    /// Explicit Euler-Maruyama discretization.
    Euler,
}

/// Batch simulation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    paths: usize,
    steps: usize,
    horizon: f64,
    seed: u64,
    scheme: Scheme,
}

impl SimConfig {
    /// Validates paths >= 1, steps >= 1 and horizon > 0.
    pub fn new(
        paths: usize,
        steps: usize,
        horizon: f64,
        seed: u64,
        scheme: Scheme,
    ) -> Result<Self> {
        if paths == 0 {
            return Err(Error::Config("need at least one path".into()));
        }
        if steps == 0 {
            return Err(Error::Config("need at least one step".into()));
        }
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::Config(format!(
                "horizon must be positive and finite, got {horizon}"
            )));
        }
        Ok(Self {
            paths,
            steps,
            horizon,
            seed,
            scheme,
        })
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }
}

/// A stream of standard normal draws; the seam that lets tests inject
/// degenerate noise.
pub trait NormalSource {
    fn next_standard_normal(&mut self) -> f64;
}

/// Production noise: ChaCha8 keyed by the batch seed, with one counter
/// stream per path.
pub struct StreamRng {
    rng: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }
}

impl NormalSource for StreamRng {
    #[inline]
    fn next_standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }
}

/// Simulated log-price trajectories with their generation metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    model: Model,
    seed: u64,
    times: Vec<f64>,
    // Row-major [paths x (steps + 1)].
    values: Vec<f64>,
    paths: usize,
    steps: usize,
}

impl PathBatch {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform time grid 0 = t_0 < ... < t_steps = horizon.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn paths(&self) -> usize {
        self.paths
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Log-price trajectory of one path, including the initial value.
    pub fn path(&self, index: usize) -> &[f64] {
        let width = self.steps + 1;
        &self.values[index * width..(index + 1) * width]
    }

    /// Terminal log-price of every path.
    pub fn terminal_values(&self) -> Vec<f64> {
        (0..self.paths).map(|p| self.path(p)[self.steps]).collect()
    }

    /// Writes the batch as CSV: header `t,path_0,...,path_{P-1}`, one row
    /// per grid time, numbers with 17 significant digits.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        write!(out, "t")?;
        for p in 0..self.paths {
            write!(out, ",path_{p}")?;
        }
        writeln!(out)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(out, "{t:.16e}")?;
            for p in 0..self.paths {
                write!(out, ",{:.16e}", self.path(p)[k])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn time_grid(cfg: &SimConfig) -> Vec<f64> {
    let steps = cfg.steps;
    (0..=steps)
        .map(|k| cfg.horizon * k as f64 / steps as f64)
        .collect()
}

/// Runs one recursion per path in parallel; `step` maps (current value,
/// normal draw) to the next value.
fn generate<S, F, G>(
    model: Model,
    x0: f64,
    cfg: &SimConfig,
    source_for_path: F,
    step: G,
) -> PathBatch
where
    S: NormalSource,
    F: Fn(u64) -> S + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    let width = cfg.steps + 1;
    let mut values = vec![0.0_f64; cfg.paths * width];
    values
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(path, row)| {
            let mut source = source_for_path(path as u64);
            row[0] = x0;
            let mut x = x0;
            for slot in row.iter_mut().skip(1) {
                x = step(x, source.next_standard_normal());
                *slot = x;
            }
        });
    PathBatch {
        model,
        seed: cfg.seed(),
        times: time_grid(cfg),
        values,
        paths: cfg.paths,
        steps: cfg.steps,
    }
}

/// Brownian log-price paths with drift r - sigma^2/2, from a caller-chosen
/// noise source. The log recursion is exact, so both schemes share it.
pub fn simulate_gbm_log_with<S, F>(
    params: &WienerBachelierParams,
    x0: f64,
    cfg: &SimConfig,
    source_for_path: F,
) -> Result<PathBatch>
where
    S: NormalSource,
    F: Fn(u64) -> S + Sync,
{
    let dt = cfg.dt();
    let drift = params.drift() * dt;
    let diffusion = params.sigma() * dt.sqrt();
    Ok(generate(
        Model::WienerBachelier(*params),
        x0,
        cfg,
        source_for_path,
        |x, z| x + drift + diffusion * z,
    ))
}

/// Brownian log-price paths using the batch's counter-based streams.
pub fn simulate_gbm_log(
    params: &WienerBachelierParams,
    x0: f64,
    cfg: &SimConfig,
) -> Result<PathBatch> {
    let seed = cfg.seed();
    simulate_gbm_log_with(params, x0, cfg, move |path| StreamRng::new(seed, path))
}

/// Mean-reverting log-price paths from a caller-chosen noise source.
///
/// The exact scheme draws each step from the transition law
/// x e^{-q dt} + sigma sqrt(1 - e^{-2 q dt}) z; the Euler scheme uses
/// x - q x dt + sigma sqrt(2 q dt) z and refuses q dt >= 1, where the
/// explicit recursion stops contracting.
pub fn simulate_ou_log_with<S, F>(
    params: &OrnsteinUhlenbeckParams,
    x0: f64,
    cfg: &SimConfig,
    source_for_path: F,
) -> Result<PathBatch>
where
    S: NormalSource,
    F: Fn(u64) -> S + Sync,
{
    let dt = cfg.dt();
    let q = params.mean_reversion();
    let sigma = params.sigma();
    let model = Model::OrnsteinUhlenbeck(*params);
    match cfg.scheme() {
        Scheme::Exact => {
            let decay = (-q * dt).exp();
            let diffusion = sigma * crate::models::reversion_variance_factor(q * dt).sqrt();
            Ok(generate(model, x0, cfg, source_for_path, move |x, z| {
                x * decay + diffusion * z
            }))
        }
        Scheme::Euler => {
            if q * dt >= 1.0 {
                return Err(Error::Config(format!(
                    "euler scheme is unstable for q*dt = {} >= 1; increase steps",
                    q * dt
                )));
            }
            let shrink = 1.0 - q * dt;
            let diffusion = sigma * (2.0 * q * dt).sqrt();
            Ok(generate(model, x0, cfg, source_for_path, move |x, z| {
                x * shrink + diffusion * z
            }))
        }
    }
}

/// Mean-reverting log-price paths using the batch's counter-based streams.
pub fn simulate_ou_log(
    params: &OrnsteinUhlenbeckParams,
    x0: f64,
    cfg: &SimConfig,
) -> Result<PathBatch> {
    let seed = cfg.seed();
    simulate_ou_log_with(params, x0, cfg, move |path| StreamRng::new(seed, path))
}

// Draws per counter stream in the Monte Carlo pricer. Fixed so that the
// estimate does not depend on the parallel split.
const MC_BLOCK: usize = 8192;

/// Monte Carlo price of a European call with its standard error.
///
/// The terminal log-return is drawn directly from the model's law at the
/// option maturity (the calibrated law already fixes the start point), so
/// only `paths` and `seed` of the configuration are used.
pub fn mc_price_call(model: &Model, opt: &OptionSpec, cfg: &SimConfig) -> Result<PriceResult> {
    let n = cfg.paths();
    let t = opt.maturity();
    if t == 0.0 {
        return Ok(PriceResult {
            value: (opt.spot() - opt.strike()).max(0.0),
            method: PriceMethod::MonteCarlo,
            std_error: Some(0.0),
        });
    }
    let law = model.log_price_density(t)?;
    let (mean, sd) = (law.mean(), law.std_dev());
    let discount = model.discount_factor(t);
    let (s0, k) = (opt.spot(), opt.strike());
    let seed = cfg.seed();

    let blocks = n.div_ceil(MC_BLOCK);
    let partials: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let lo = block * MC_BLOCK;
            let hi = ((block + 1) * MC_BLOCK).min(n);
            let mut rng = StreamRng::new(seed, block as u64);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in lo..hi {
                let z = rng.next_standard_normal();
                let payoff = (s0 * (mean + sd * z).exp() - k).max(0.0);
                sum += payoff;
                sum_sq += payoff * payoff;
            }
            (sum, sum_sq)
        })
        .collect();

    // Reduce in block order so the result is independent of thread count.
    let (sum, sum_sq) = partials
        .iter()
        .fold((0.0, 0.0), |(s, ss), (bs, bss)| (s + bs, ss + bss));

    let nf = n as f64;
    let mean_payoff = sum / nf;
    let std_error = if n > 1 {
        let variance = ((sum_sq - sum * sum / nf) / (nf - 1.0)).max(0.0);
        discount * (variance / nf).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(PriceResult {
        value: discount * mean_payoff,
        method: PriceMethod::MonteCarlo,
        std_error: Some(std_error),
    })
}

/// Least-squares fit of the exact one-step recursion x_{k+1} = a x_k + eps
/// with eps ~ N(0, v); maps back to q = -ln(a)/dt and
/// sigma = sqrt(v / (1 - a^2)).
///
/// The rate does not show up in a single observed path (it only shifts the
/// calibrated start point), so it is taken from the caller.
pub fn calibrate_ou(log_prices: &[f64], dt: f64, rate: f64) -> Result<OrnsteinUhlenbeckParams> {
    if log_prices.len() < 3 {
        return Err(Error::Estimation(format!(
            "need at least 3 observations, got {}",
            log_prices.len()
        )));
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::Estimation(format!(
            "step size must be positive, got {dt}"
        )));
    }
    let pairs = log_prices.len() - 1;
    let mut cross = 0.0;
    let mut energy = 0.0;
    for k in 0..pairs {
        cross += log_prices[k] * log_prices[k + 1];
        energy += log_prices[k] * log_prices[k];
    }
    if energy <= f64::MIN_POSITIVE * pairs as f64 {
        return Err(Error::Estimation(
            "series has no variation around zero; cannot fit mean reversion".into(),
        ));
    }
    let a = cross / energy;
    if a <= 0.0 || a >= 1.0 {
        return Err(Error::Estimation(format!(
            "fitted autoregression coefficient {a} is outside (0, 1); no valid mean reversion"
        )));
    }
    let mut residual_sq = 0.0;
    for k in 0..pairs {
        let eps = log_prices[k + 1] - a * log_prices[k];
        residual_sq += eps * eps;
    }
    let noise_variance = residual_sq / (pairs as f64 - 1.0);
    if noise_variance <= 0.0 {
        return Err(Error::Estimation(
            "series is noiseless; cannot estimate sigma".into(),
        ));
    }
    let q = -a.ln() / dt;
    let sigma = (noise_variance / (1.0 - a * a)).sqrt();
    OrnsteinUhlenbeckParams::new(rate, sigma, q)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut distance: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        distance = distance
            .max(((i + 1) as f64 / n - f).abs())
            .max((f - i as f64 / n).abs());
    }
    distance
}
