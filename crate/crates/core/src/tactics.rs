//! Discretized strategy-update kernel.
//!
//! The integral operator acts on square-integrable strategy amplitudes
//! psi(y) of the log transaction price y. Its ground state
//! e^{-y^2 / (2 sigma_r)} is an exact fixed point, repeated application
//! composes like a semigroup in the tactic time gamma, and conjugating the
//! kernel by the ground state turns it into the mean-reverting transition
//! density with sigma^2 = sigma_r / 2 and q t = gamma. All three facts are
//! checked numerically on a uniform grid.

use crate::error::{Error, Result};
use crate::models::{reversion_variance_factor, OrnsteinUhlenbeckParams};
use rayon::prelude::*;
use std::io::{self, BufRead, Write};

/// Admission threshold for the truncation check in [`apply_tactic`]:
/// boundary amplitudes above this fraction of the peak mean the grid is
/// too narrow for the quadrature to be trusted.
pub const BOUNDARY_RATIO: f64 = 1e-9;

/// Uniform grid over the strategy coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelGrid {
    y_min: f64,
    y_max: f64,
    n: usize,
}

impl KernelGrid {
    /// Validates y_min < y_max and n >= 16.
    pub fn new(y_min: f64, y_max: f64, n: usize) -> Result<Self> {
        if !y_min.is_finite() || !y_max.is_finite() || y_min >= y_max {
            return Err(Error::InvalidParameter(format!(
                "need finite y_min < y_max, got [{y_min}, {y_max}]"
            )));
        }
        if n < 16 {
            return Err(Error::InvalidParameter(format!(
                "need at least 16 grid points, got {n}"
            )));
        }
        Ok(Self { y_min, y_max, n })
    }

    /// Symmetric grid of `n` points spanning +-`span` ground-state standard
    /// deviations sqrt(sigma_r / 2).
    pub fn spanning(sigma_r: f64, span: f64, n: usize) -> Result<Self> {
        if sigma_r.is_nan() || sigma_r <= 0.0 || span.is_nan() || span <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need positive sigma_r and span, got {sigma_r}, {span}"
            )));
        }
        let half_width = span * (0.5 * sigma_r).sqrt();
        Self::new(-half_width, half_width, n)
    }

    /// Default diagnostics grid: +-10 sqrt(sigma_r / 2) with 1024 points.
    pub fn default_for_scale(sigma_r: f64) -> Result<Self> {
        Self::spanning(sigma_r, 10.0, 1024)
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.y_min + self.spacing() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.point(i))
    }
}

/// A strategy amplitude sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyFunction {
    grid: KernelGrid,
    values: Vec<f64>,
}

impl StrategyFunction {
    /// Wraps explicit node values; all of them must be finite.
    pub fn from_values(grid: KernelGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "strategy values must be finite, found {bad}"
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples a function at the grid nodes.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: KernelGrid, f: F) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::from_values(grid, values)
    }

    /// The exact fixed point of the kernel: e^{-y^2 / (2 sigma_r)}.
    pub fn ground_state(grid: KernelGrid, sigma_r: f64) -> Result<Self> {
        if sigma_r.is_nan() || sigma_r <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma_r must be positive, got {sigma_r}"
            )));
        }
        Self::from_fn(grid, |y| (-y * y / (2.0 * sigma_r)).exp())
    }

    pub fn grid(&self) -> &KernelGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest node-wise difference to another function on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::Domain("functions live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Writes `y,value` rows with 17 significant digits.
    pub fn to_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "y,value")?;
        for (y, v) in self.grid.points().zip(&self.values) {
            writeln!(out, "{y:.16e},{v:.16e}")?;
        }
        Ok(())
    }

    /// Reads a two-column `y,value` CSV written by [`Self::to_csv`] (the
    /// header row is optional). The y column must be a uniform increasing
    /// grid.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Config(format!("strategy csv: {e}")))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let y = fields.next().map(str::trim).unwrap_or("");
            let v = fields.next().map(str::trim).unwrap_or("");
            match (y.parse::<f64>(), v.parse::<f64>()) {
                (Ok(y), Ok(v)) => rows.push((y, v)),
                _ if idx == 0 => continue, // header
                _ => {
                    return Err(Error::Config(format!(
                        "strategy csv: cannot parse line {}: {line:?}",
                        idx + 1
                    )))
                }
            }
        }
        if rows.len() < 16 {
            return Err(Error::InvalidParameter(format!(
                "strategy csv needs at least 16 rows, got {}",
                rows.len()
            )));
        }
        let n = rows.len();
        let spacing = (rows[n - 1].0 - rows[0].0) / (n - 1) as f64;
        if spacing.is_nan() || spacing <= 0.0 {
            return Err(Error::InvalidParameter(
                "strategy csv grid must be increasing".into(),
            ));
        }
        for (i, (y, _)) in rows.iter().enumerate() {
            let expected = rows[0].0 + spacing * i as f64;
            if (y - expected).abs() > 1e-9 * spacing.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "strategy csv grid is not uniform at row {} (y = {y}, expected {expected})",
                    i + 1
                )));
            }
        }
        let grid = KernelGrid::new(rows[0].0, rows[n - 1].0, n)?;
        Self::from_values(grid, rows.into_iter().map(|(_, v)| v).collect())
    }
}

/// Tactic time gamma and the kernel scale sigma_r.
///
/// sigma_r is the scale of the kernel display itself; it maps to the
/// transition-density variance through sigma^2 = sigma_r / 2 (the two
/// conventions differ by that factor).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TacticParams {
    gamma: f64,
    sigma_r: f64,
}

impl TacticParams {
    /// Validates gamma >= 0 and sigma_r > 0.
    pub fn new(gamma: f64, sigma_r: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be >= 0 and finite, got {gamma}"
            )));
        }
        if !sigma_r.is_finite() || sigma_r <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma_r must be positive and finite, got {sigma_r}"
            )));
        }
        Ok(Self { gamma, sigma_r })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma_r(&self) -> f64 {
        self.sigma_r
    }

    fn require_positive_gamma(&self) -> Result<()> {
        if self.gamma == 0.0 {
            return Err(Error::Domain(
                "gamma must be positive; at gamma = 0 the kernel degenerates to a point mass"
                    .into(),
            ));
        }
        Ok(())
    }
}

#[inline]
fn kernel_unchecked(gamma: f64, sigma_r: f64, y: f64, y_prime: f64) -> f64 {
    let u = reversion_variance_factor(gamma);
    let prefactor = 1.0 / (std::f64::consts::PI * sigma_r * u).sqrt();
    let drift = (-gamma).exp() * y - y_prime;
    let exponent = -(y * y - y_prime * y_prime) / (2.0 * sigma_r) - drift * drift / (sigma_r * u);
    prefactor * exponent.exp()
}

/// Kernel value R_gamma(y, y') for gamma > 0:
///
/// (pi sigma_r (1 - e^{-2 gamma}))^{-1/2}
///   exp(-(y^2 - y'^2)/(2 sigma_r) - (e^{-gamma} y - y')^2 / (sigma_r (1 - e^{-2 gamma}))).
pub fn kernel_value(params: &TacticParams, y: f64, y_prime: f64) -> Result<f64> {
    params.require_positive_gamma()?;
    Ok(kernel_unchecked(params.gamma, params.sigma_r, y, y_prime))
}

/// Ground-state conjugate of the kernel,
/// T_gamma(y, y') = R_gamma(y, y') e^{-(y'^2 - y^2)/(2 sigma_r)}.
///
/// This is a probability density in y': the transition density with
/// sigma^2 = sigma_r / 2, q t = gamma, started at y.
pub fn h_transform(params: &TacticParams, y: f64, y_prime: f64) -> Result<f64> {
    let kernel = kernel_value(params, y, y_prime)?;
    Ok(kernel * (-(y_prime * y_prime - y * y) / (2.0 * params.sigma_r)).exp())
}

/// Composite Simpson weights for `n` nodes with spacing `h`; when the
/// interval count is odd the last three intervals use the 3/8 rule.
fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 4);
    let mut weights = vec![0.0_f64; n];
    let intervals = n - 1;
    let simpson_end = if intervals.is_multiple_of(2) {
        n - 1
    } else {
        n - 4
    };
    if simpson_end > 0 {
        let third = h / 3.0;
        weights[0] += third;
        weights[simpson_end] += third;
        for (offset, w) in weights[1..simpson_end].iter_mut().enumerate() {
            *w += if offset.is_multiple_of(2) {
                4.0 * third
            } else {
                2.0 * third
            };
        }
    }
    if !intervals.is_multiple_of(2) {
        let eighth = 3.0 * h / 8.0;
        weights[n - 4] += eighth;
        weights[n - 3] += 3.0 * eighth;
        weights[n - 2] += 3.0 * eighth;
        weights[n - 1] += eighth;
    }
    weights
}

fn check_boundary(psi: &StrategyFunction) -> Result<()> {
    let max = psi.max_abs();
    if max == 0.0 {
        return Ok(());
    }
    let values = psi.values();
    let left = values[0].abs();
    let right = values[values.len() - 1].abs();
    for (name, amplitude, y) in [
        ("left", left, psi.grid().y_min()),
        ("right", right, psi.grid().y_max()),
    ] {
        if amplitude > BOUNDARY_RATIO * max {
            return Err(Error::Domain(format!(
                "strategy is truncated at the {name} boundary y = {y}: |psi| there is {:.3e} of its maximum (limit {BOUNDARY_RATIO:.0e}); widen the grid",
                amplitude / max
            )));
        }
    }
    Ok(())
}

fn integrate_rows<F>(psi: &StrategyFunction, kernel_at: F) -> StrategyFunction
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let grid = *psi.grid();
    let weights = simpson_weights(grid.len(), grid.spacing());
    let nodes: Vec<f64> = grid.points().collect();
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&y| {
            let mut acc = 0.0;
            for ((&y_prime, &w), &v) in nodes.iter().zip(&weights).zip(psi.values()) {
                acc += w * kernel_at(y, y_prime) * v;
            }
            acc
        })
        .collect();
    StrategyFunction { grid, values }
}

/// Applies the kernel to a strategy:
/// (R_gamma psi)(y) = int R_gamma(y, y') psi(y') dy', by composite Simpson
/// quadrature on the strategy's grid.
///
/// The grid must be wide enough that |psi| at both boundaries is below
/// [`BOUNDARY_RATIO`] of its maximum, otherwise the truncated integral
/// would be silently wrong.
pub fn apply_tactic(params: &TacticParams, psi: &StrategyFunction) -> Result<StrategyFunction> {
    params.require_positive_gamma()?;
    check_boundary(psi)?;
    let (gamma, sigma_r) = (params.gamma, params.sigma_r);
    Ok(integrate_rows(psi, move |y, y_prime| {
        kernel_unchecked(gamma, sigma_r, y, y_prime)
    }))
}

/// Adjoint action, integrating over the kernel's first argument:
/// (R_gamma^T psi)(y') = int R_gamma(y, y') psi(y) dy.
pub fn apply_tactic_adjoint(
    params: &TacticParams,
    psi: &StrategyFunction,
) -> Result<StrategyFunction> {
    params.require_positive_gamma()?;
    check_boundary(psi)?;
    let (gamma, sigma_r) = (params.gamma, params.sigma_r);
    Ok(integrate_rows(psi, move |y_prime, y| {
        kernel_unchecked(gamma, sigma_r, y, y_prime)
    }))
}

/// Max-norm residual of the semigroup property:
/// ||R_{g1}(R_{g2} psi) - R_{g1+g2} psi||_inf. Both parameter sets must
/// share sigma_r.
pub fn check_semigroup(
    first: &TacticParams,
    second: &TacticParams,
    psi: &StrategyFunction,
) -> Result<f64> {
    if first.sigma_r != second.sigma_r {
        return Err(Error::Domain(format!(
            "tactic parameters must share sigma_r: {} vs {}",
            first.sigma_r, second.sigma_r
        )));
    }
    let inner = apply_tactic(second, psi)?;
    let composed = apply_tactic(first, &inner)?;
    let combined = TacticParams::new(first.gamma + second.gamma, first.sigma_r)?;
    let direct = apply_tactic(&combined, psi)?;
    composed.max_abs_diff(&direct)
}

/// Relative max-norm residual ||R_gamma psi0 - psi0|| / ||psi0|| of the
/// ground state on the given grid. Pure quadrature error; the fixed point
/// is exact in the continuum.
pub fn fixed_point_residual(params: &TacticParams, grid: KernelGrid) -> Result<f64> {
    let ground = StrategyFunction::ground_state(grid, params.sigma_r)?;
    let mapped = apply_tactic(params, &ground)?;
    Ok(mapped.max_abs_diff(&ground)? / ground.max_abs())
}

/// Largest pointwise deviation over the grid between the h-transformed
/// kernel and the mean-reverting transition density with
/// sigma^2 = sigma_r / 2 and q t = gamma.
pub fn h_transform_max_deviation(params: &TacticParams, grid: KernelGrid) -> Result<f64> {
    params.require_positive_gamma()?;
    let process = OrnsteinUhlenbeckParams::new(0.0, (0.5 * params.sigma_r).sqrt(), params.gamma)?;
    let nodes: Vec<f64> = grid.points().collect();
    let deviation = nodes
        .par_iter()
        .map(|&y| {
            let mut worst = 0.0_f64;
            for &y_prime in &nodes {
                let transformed = h_transform(params, y, y_prime).expect("gamma checked above");
                let density = process
                    .transition_density(y_prime, y, 1.0)
                    .expect("t = 1 is valid");
                worst = worst.max((transformed - density).abs());
            }
            worst
        })
        .reduce(|| 0.0_f64, f64::max);
    Ok(deviation)
}
