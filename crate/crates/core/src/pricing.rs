//! European call pricing under both models.
//!
//! Each model gets a closed form plus a shared adaptive-quadrature pricer
//! that integrates the discounted payoff against the log-return density.
//! The quadrature path never touches the closed forms, so the two routes
//! check each other.

use crate::error::{Error, Result};
use crate::math;
use crate::models::{Model, OrnsteinUhlenbeckParams, WienerBachelierParams};
use crate::quadrature;

/// Standard normal CDF, accurate to about 1e-16 absolute.
pub fn std_normal_cdf(z: f64) -> f64 {
    math::std_normal_cdf(z)
}

/// A European call: spot, strike and maturity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    spot: f64,
    strike: f64,
    maturity: f64,
}

impl OptionSpec {
    /// Validates spot > 0, strike >= 0, maturity >= 0.
    pub fn new(spot: f64, strike: f64, maturity: f64) -> Result<Self> {
        if !spot.is_finite() || spot <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "spot must be positive and finite, got {spot}"
            )));
        }
        if !strike.is_finite() || strike < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "strike must be non-negative and finite, got {strike}"
            )));
        }
        if !maturity.is_finite() || maturity < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "maturity must be non-negative and finite, got {maturity}"
            )));
        }
        Ok(Self {
            spot,
            strike,
            maturity,
        })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn strike(&self) -> f64 {
        self.strike
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    /// Log-moneyness b = ln(spot / strike).
    pub fn log_moneyness(&self) -> f64 {
        (self.spot / self.strike).ln()
    }
}

/// How a price was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceMethod {
    Closed,
    Quadrature,
    MonteCarlo,
}

impl std::fmt::Display for PriceMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PriceMethod::Closed => "closed",
            PriceMethod::Quadrature => "quadrature",
            PriceMethod::MonteCarlo => "monte-carlo",
        };
        f.write_str(name)
    }
}

/// A call value with its provenance; `std_error` is set for Monte Carlo only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceResult {
    pub value: f64,
    pub method: PriceMethod,
    pub std_error: Option<f64>,
}

impl PriceResult {
    fn closed(value: f64) -> Self {
        Self {
            value,
            method: PriceMethod::Closed,
            std_error: None,
        }
    }
}

/// Handles the degenerate maturities and strikes shared by all pricers.
///
/// T = 0 is the intrinsic value; K = 0 discounts the full expected price,
/// which the drift calibration makes exactly the spot under both models.
fn continuous_extension(opt: &OptionSpec) -> Option<f64> {
    if opt.maturity == 0.0 {
        return Some((opt.spot - opt.strike).max(0.0));
    }
    if opt.strike == 0.0 {
        return Some(opt.spot);
    }
    None
}

/// Black-Scholes closed form for a European call.
pub fn price_call_bs(params: &WienerBachelierParams, opt: &OptionSpec) -> Result<PriceResult> {
    if let Some(value) = continuous_extension(opt) {
        return Ok(PriceResult::closed(value));
    }
    let (s0, k, t) = (opt.spot, opt.strike, opt.maturity);
    let (r, sigma) = (params.rate(), params.sigma());
    let vol = sigma * t.sqrt();
    let d1 = ((s0 / k).ln() + (r + 0.5 * sigma * sigma) * t) / vol;
    let d2 = d1 - vol;
    let value = s0 * std_normal_cdf(d1) - k * (-r * t).exp() * std_normal_cdf(d2);
    Ok(PriceResult::closed(value.max(0.0)))
}

/// Closed form for a European call under the mean-reverting model.
///
/// With b = ln(S0/K) and v = sigma^2 (1 - e^{-2qT}) the arguments are
/// d_{1,2} = (rqT + b +- v/2) / sqrt(v) and the discount is e^{-rqT}.
/// Multiplying numerator and denominator by e^{qT} turns these into the
/// equivalent sinh form (rqT + b) e^{qT} +- sigma^2 sinh(qT) over
/// sigma sqrt(2 e^{qT} sinh qT); the v form is used because it stays
/// finite for large qT.
pub fn price_call_ou(params: &OrnsteinUhlenbeckParams, opt: &OptionSpec) -> Result<PriceResult> {
    if let Some(value) = continuous_extension(opt) {
        return Ok(PriceResult::closed(value));
    }
    let (s0, k, t) = (opt.spot, opt.strike, opt.maturity);
    let qt = params.mean_reversion() * t;
    if qt > 700.0 {
        return Err(Error::Range(format!(
            "qT = {qt} overflows the closed form (limit 700)"
        )));
    }
    let growth = params.rate() * qt;
    let v = params.variance(t);
    let sd = v.sqrt();
    let b = (s0 / k).ln();
    let d1 = (growth + b + 0.5 * v) / sd;
    let d2 = (growth + b - 0.5 * v) / sd;
    let value = s0 * std_normal_cdf(d1) - k * (-growth).exp() * std_normal_cdf(d2);
    Ok(PriceResult::closed(value.max(0.0)))
}

/// Number of standard deviations after which the payoff integral is cut
/// off and the remainder bounded analytically.
const TAIL_WIDTH: f64 = 12.0;

/// Prices the call by adaptive quadrature of the discounted payoff against
/// the model's log-return density. This is the verification oracle for the
/// closed forms.
///
/// The integral runs over [ln(K/S0), m + 12 sqrt(v)]; the exponential-tail
/// mass beyond the cut (and below m - 13 sqrt(v), when the strike region
/// starts further left) is bounded by Gaussian tail estimates and charged
/// against the error budget instead of being integrated.
pub fn price_call_quadrature(model: &Model, opt: &OptionSpec, abs_tol: f64) -> Result<PriceResult> {
    if !abs_tol.is_finite() || abs_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {abs_tol}"
        )));
    }
    if let Some(value) = continuous_extension(opt) {
        return Ok(PriceResult {
            value,
            method: PriceMethod::Quadrature,
            std_error: None,
        });
    }
    let (s0, k, t) = (opt.spot, opt.strike, opt.maturity);
    let law = model.log_price_density(t)?;
    let (m, v, sd) = (law.mean(), law.variance(), law.std_dev());
    let discount = model.discount_factor(t);
    // E S_T / S_0 = e^{m + v/2}; the drift calibration makes discount times
    // this equal one, but the bound below does not rely on that.
    let tilted = (m + 0.5 * v).exp();

    let lower = (k / s0).ln();
    let upper = m + TAIL_WIDTH * sd;
    // Price mass above the cut: int_u^inf S0 e^x pdf dx = S0 e^{m+v/2} N(sd - 12).
    let right_tail = s0 * tilted * std_normal_cdf(sd - TAIL_WIDTH);

    if lower >= upper {
        // The strike sits beyond the truncation point; the whole price is
        // bounded by the exponential tail from `lower`, since the payoff
        // never exceeds S0 e^x.
        let bound = s0 * tilted * std_normal_cdf((m + v - lower) / sd);
        if bound > abs_tol {
            return Err(Error::QuadratureNonConvergence {
                achieved: bound,
                requested: abs_tol,
            });
        }
        return Ok(PriceResult {
            value: 0.0,
            method: PriceMethod::Quadrature,
            std_error: None,
        });
    }

    // Clip a far-left strike bound: below m - (12+1) sd the integrand mass
    // is below N(-13) of either term.
    let clip = m - (TAIL_WIDTH + 1.0) * sd;
    let (lower_eff, left_tail) = if lower < clip {
        let bound =
            s0 * tilted * std_normal_cdf((clip - m - v) / sd) + k * std_normal_cdf((clip - m) / sd);
        (clip, bound)
    } else {
        (lower, 0.0)
    };

    let tail_budget = right_tail + left_tail;
    if tail_budget > 0.5 * abs_tol {
        return Err(Error::QuadratureNonConvergence {
            achieved: tail_budget,
            requested: abs_tol,
        });
    }

    let integrand = |x: f64| (s0 * x.exp() - k) * law.pdf(x);
    let integral = quadrature::integrate(integrand, lower_eff, upper, abs_tol - tail_budget)?;
    let value = (discount * integral.value).max(0.0);
    Ok(PriceResult {
        value,
        method: PriceMethod::Quadrature,
        std_error: None,
    })
}

/// One sample of the model-comparison curve: log-moneyness b and
/// ln c_ou - ln c_bs at that moneyness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub moneyness: f64,
    pub log_price_gap: f64,
}

/// Samples ln c_ou - ln c_bs against log-moneyness b = ln(S0/K).
///
/// The strike is fixed at 1 and the spot set to e^b (the gap is not
/// invariant under the opposite convention, so callers should surface
/// this one). Both parameter sets must share rate and sigma.
pub fn compare_curve(
    wb: &WienerBachelierParams,
    ou: &OrnsteinUhlenbeckParams,
    maturity: f64,
    b_min: f64,
    b_max: f64,
    points: usize,
) -> Result<Vec<CurvePoint>> {
    if wb.rate() != ou.rate() || wb.sigma() != ou.sigma() {
        return Err(Error::Domain(
            "parameter sets must share rate and sigma".into(),
        ));
    }
    if points < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 sample points, got {points}"
        )));
    }
    if !b_min.is_finite() || !b_max.is_finite() || b_min >= b_max {
        return Err(Error::InvalidParameter(format!(
            "need finite b_min < b_max, got [{b_min}, {b_max}]"
        )));
    }
    if !maturity.is_finite() || maturity <= 0.0 {
        return Err(Error::Domain(format!(
            "maturity must be positive, got {maturity}"
        )));
    }

    let mut curve = Vec::with_capacity(points);
    for i in 0..points {
        let frac = i as f64 / (points - 1) as f64;
        let b = b_min + (b_max - b_min) * frac;
        let opt = OptionSpec::new(b.exp(), 1.0, maturity)?;
        let classical = price_call_bs(wb, &opt)?.value;
        let reverting = price_call_ou(ou, &opt)?.value;
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(classical) || !positive(reverting) {
            return Err(Error::Numerical(format!(
                "non-positive call price at b = {b} (bs = {classical}, ou = {reverting})"
            )));
        }
        curve.push(CurvePoint {
            moneyness: b,
            log_price_gap: reverting.ln() - classical.ln(),
        });
    }
    Ok(curve)
}
