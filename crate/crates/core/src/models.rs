//! The two log-price models and their analytic machinery.
//!
//! Both models describe the log-return x = ln(S_t / S_0) of a stock. The
//! Wiener-Bachelier model drives x by Brownian motion with the
//! arbitrage-free drift r - sigma^2/2, so E S_t = S_0 e^{rt}. The
//! Ornstein-Uhlenbeck model lets x mean-revert with speed q; recentring
//! its start point via [`OrnsteinUhlenbeckParams::calibrate_x0`] pins the
//! expected growth to E S_t = S_0 e^{rqt}. At any fixed time the
//! log-return is Gaussian under either model, which is what every closed
//! form in this crate leans on.

use crate::error::{Error, Result};
use crate::math;

/// 1 - e^{-2qt}, the mean-reversion variance factor, computed without
/// cancellation for small qt.
#[inline]
pub(crate) fn reversion_variance_factor(qt: f64) -> f64 {
    -(-2.0 * qt).exp_m1()
}

/// Wiener-Bachelier (Brownian log-price) model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerBachelierParams {
    rate: f64,
    sigma: f64,
}

impl WienerBachelierParams {
    /// Validates sigma > 0 and finite inputs. Negative rates are allowed.
    pub fn new(rate: f64, sigma: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rate must be finite, got {rate}"
            )));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { rate, sigma })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Arbitrage-free drift mu = r - sigma^2/2.
    pub fn drift(&self) -> f64 {
        self.rate - 0.5 * self.sigma * self.sigma
    }

    /// Gaussian law of the log-return at time t > 0.
    pub fn log_price_density(&self, t: f64) -> Result<LogPriceDensity> {
        require_positive_time(t)?;
        Ok(LogPriceDensity {
            kind: ModelKind::WienerBachelier,
            mean: self.drift() * t,
            variance: self.sigma * self.sigma * t,
            time: t,
        })
    }

    /// Density of the log-return at (x, t), t > 0.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.log_price_density(t)?.pdf(x))
    }

    /// ln E e^{lambda X_t} = lambda (2r + (lambda - 1) sigma^2) t / 2.
    pub fn log_mgf(&self, lambda: f64, t: f64) -> f64 {
        0.5 * lambda * (2.0 * self.rate + (lambda - 1.0) * self.sigma * self.sigma) * t
    }

    /// Moment generating function E e^{lambda X_t}.
    pub fn mgf(&self, lambda: f64, t: f64) -> f64 {
        self.log_mgf(lambda, t).exp()
    }

    /// First two cumulants of the log-return: (rt - sigma^2 t / 2, sigma^2 t).
    pub fn cumulants(&self, t: f64) -> CumulantPair {
        CumulantPair {
            first: self.drift() * t,
            second: self.sigma * self.sigma * t,
        }
    }
}

/// Ornstein-Uhlenbeck (mean-reverting log-price) model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrnsteinUhlenbeckParams {
    rate: f64,
    sigma: f64,
    mean_reversion: f64,
}

impl OrnsteinUhlenbeckParams {
    /// Validates sigma > 0, mean-reversion speed q > 0 and finite inputs.
    pub fn new(rate: f64, sigma: f64, mean_reversion: f64) -> Result<Self> {
        if !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rate must be finite, got {rate}"
            )));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        if !mean_reversion.is_finite() || mean_reversion <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mean-reversion speed must be positive and finite, got {mean_reversion}"
            )));
        }
        Ok(Self {
            rate,
            sigma,
            mean_reversion,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Mean-reversion speed q.
    pub fn mean_reversion(&self) -> f64 {
        self.mean_reversion
    }

    /// Variance of the log-return at time t: sigma^2 (1 - e^{-2qt}).
    pub fn variance(&self, t: f64) -> f64 {
        self.sigma * self.sigma * reversion_variance_factor(self.mean_reversion * t)
    }

    /// Transition density at (x, t) of a path started at x0.
    ///
    /// Gaussian with mean x0 e^{-qt} and variance sigma^2 (1 - e^{-2qt}).
    pub fn transition_density(&self, x: f64, x0: f64, t: f64) -> Result<f64> {
        require_positive_time(t)?;
        let mean = x0 * (-self.mean_reversion * t).exp();
        let variance = self.variance(t);
        Ok(gaussian_pdf(x, mean, variance))
    }

    /// Start point x0(t) = r q t e^{qt} - sigma^2 sinh(qt) that makes the
    /// expected price grow like e^{rqt}.
    ///
    /// Fails with a range error once qt > 700, where e^{qt} leaves the
    /// double range.
    pub fn calibrate_x0(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("time must be >= 0, got {t}")));
        }
        let qt = self.mean_reversion * t;
        if qt > 700.0 {
            return Err(Error::Range(format!(
                "qt = {qt} overflows the start-point calibration (limit 700)"
            )));
        }
        Ok(self.rate * qt * qt.exp() - self.sigma * self.sigma * qt.sinh())
    }

    /// Gaussian law of the calibrated log-return at time t > 0.
    ///
    /// Mean r q t - sigma^2 (1 - e^{-2qt}) / 2, variance
    /// sigma^2 (1 - e^{-2qt}); this is the transition law started from
    /// the calibrated x0(t).
    pub fn log_price_density(&self, t: f64) -> Result<LogPriceDensity> {
        require_positive_time(t)?;
        let variance = self.variance(t);
        Ok(LogPriceDensity {
            kind: ModelKind::OrnsteinUhlenbeck,
            mean: self.rate * self.mean_reversion * t - 0.5 * variance,
            variance,
            time: t,
        })
    }

    /// Density of the calibrated log-return at (x, t), t > 0.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.log_price_density(t)?.pdf(x))
    }

    /// ln E e^{lambda X_t} = lambda r q t + lambda (lambda - 1) sigma^2 (1 - e^{-2qt}) / 2.
    ///
    /// The variance factor equals e^{-qt} sinh(qt) * 2, so this matches the
    /// sinh form of the exponent exactly.
    pub fn log_mgf(&self, lambda: f64, t: f64) -> f64 {
        let half_factor = 0.5 * reversion_variance_factor(self.mean_reversion * t);
        lambda * self.rate * self.mean_reversion * t
            + lambda * (lambda - 1.0) * self.sigma * self.sigma * half_factor
    }

    /// Moment generating function E e^{lambda X_t}.
    pub fn mgf(&self, lambda: f64, t: f64) -> f64 {
        self.log_mgf(lambda, t).exp()
    }

    /// First two cumulants: (rqt - sigma^2 (1 - e^{-2qt}) / 2, sigma^2 (1 - e^{-2qt})).
    pub fn cumulants(&self, t: f64) -> CumulantPair {
        let variance = self.variance(t);
        CumulantPair {
            first: self.rate * self.mean_reversion * t - 0.5 * variance,
            second: variance,
        }
    }
}

/// Tags which model produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    WienerBachelier,
    OrnsteinUhlenbeck,
}

/// A model with its parameters, for call sites that are generic over the
/// dynamic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    WienerBachelier(WienerBachelierParams),
    OrnsteinUhlenbeck(OrnsteinUhlenbeckParams),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::WienerBachelier(_) => ModelKind::WienerBachelier,
            Model::OrnsteinUhlenbeck(_) => ModelKind::OrnsteinUhlenbeck,
        }
    }

    /// Exponent g(t) with E S_t = S_0 e^{g(t)}: rt for Wiener-Bachelier,
    /// rqt for Ornstein-Uhlenbeck.
    pub fn growth_exponent(&self, t: f64) -> f64 {
        match self {
            Model::WienerBachelier(p) => p.rate() * t,
            Model::OrnsteinUhlenbeck(p) => p.rate() * p.mean_reversion() * t,
        }
    }

    /// Discount factor e^{-g(t)} matching the model's growth exponent.
    pub fn discount_factor(&self, t: f64) -> f64 {
        (-self.growth_exponent(t)).exp()
    }

    pub fn log_price_density(&self, t: f64) -> Result<LogPriceDensity> {
        match self {
            Model::WienerBachelier(p) => p.log_price_density(t),
            Model::OrnsteinUhlenbeck(p) => p.log_price_density(t),
        }
    }

    pub fn log_mgf(&self, lambda: f64, t: f64) -> f64 {
        match self {
            Model::WienerBachelier(p) => p.log_mgf(lambda, t),
            Model::OrnsteinUhlenbeck(p) => p.log_mgf(lambda, t),
        }
    }

    pub fn mgf(&self, lambda: f64, t: f64) -> f64 {
        self.log_mgf(lambda, t).exp()
    }

    pub fn cumulants(&self, t: f64) -> CumulantPair {
        match self {
            Model::WienerBachelier(p) => p.cumulants(t),
            Model::OrnsteinUhlenbeck(p) => p.cumulants(t),
        }
    }
}

/// Gaussian law of the log-return at a fixed evaluation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPriceDensity {
    kind: ModelKind,
    mean: f64,
    variance: f64,
    time: f64,
}

impl LogPriceDensity {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn pdf(&self, x: f64) -> f64 {
        gaussian_pdf(x, self.mean, self.variance)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        math::std_normal_cdf((x - self.mean) / self.std_dev())
    }
}

/// First two cumulants of a log-return law; the higher ones vanish for
/// these Gaussian models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantPair {
    pub first: f64,
    pub second: f64,
}

/// ln Phi_ou(lambda, t) - ln Phi_wb(lambda, t) for parameter sets sharing
/// rate and sigma.
///
/// For small t this behaves like ((q-1) r + sigma^2 (lambda-1)(q-1/2)) lambda t,
/// which is how fast the mean-reverting law peels away from the Brownian one.
pub fn short_time_cumulant_gap(
    wb: &WienerBachelierParams,
    ou: &OrnsteinUhlenbeckParams,
    lambda: f64,
    t: f64,
) -> Result<f64> {
    if wb.rate() != ou.rate() || wb.sigma() != ou.sigma() {
        return Err(Error::Domain(format!(
            "parameter sets must share rate and sigma: ({}, {}) vs ({}, {})",
            wb.rate(),
            wb.sigma(),
            ou.rate(),
            ou.sigma()
        )));
    }
    Ok(ou.log_mgf(lambda, t) - wb.log_mgf(lambda, t))
}

#[inline]
fn gaussian_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let z = x - mean;
    (-z * z / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

fn require_positive_time(t: f64) -> Result<()> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!(
            "densities are defined for finite t > 0, got {t}"
        )));
    }
    Ok(())
}
