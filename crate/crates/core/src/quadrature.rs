//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule is applied per
//! segment; the worst segment (largest error estimate) is bisected until
//! the summed error estimate drops below the requested absolute tolerance.
//! The error model is the QUADPACK one, including its round-off floor.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae (positive half); odd indices are the embedded
// 7-point Gauss nodes. Literals keep the published 30-digit values.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Value of an integral together with the accumulated error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Errors are checked finite before insertion.
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut gauss = WG[3] * fc;
    let mut kronrod = WGK[7] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut low = [0.0_f64; 7];
    let mut high = [0.0_f64; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        low[j] = f1;
        high[j] = f2;
        let fsum = f1 + f2;
        if !j.is_multiple_of(2) {
            gauss += WG[j / 2] * fsum;
        }
        kronrod += WGK[j] * fsum;
        resabs += WGK[j] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((low[j] - mean).abs() + (high[j] - mean).abs());
    }

    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * f64::min(1.0, (200.0 * error / resasc).powf(1.5));
    }
    let floor = 50.0 * f64::EPSILON;
    if resabs > f64::MIN_POSITIVE / floor {
        error = error.max(floor * resabs);
    }
    (value, error)
}

const MAX_SEGMENTS: usize = 4096;

/// Integrates `f` over `[a, b]` to the requested absolute tolerance.
///
/// Fails with [`Error::QuadratureNonConvergence`] (carrying the achieved
/// error estimate) when the tolerance cannot be met, and with
/// [`Error::Numerical`] when the integrand returns a non-finite value.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<Integral> {
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(Error::InvalidParameter(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if !abs_tol.is_finite() || abs_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {abs_tol}"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_bound: 0.0,
        });
    }

    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Segment>, a: f64, b: f64| -> Result<()> {
        let (value, error) = kronrod_15(&f, a, b);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Numerical(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        heap.push(Segment { a, b, value, error });
        Ok(())
    };
    push(&mut heap, a, b)?;

    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= abs_tol {
            let mut segments: Vec<Segment> = heap.into_vec();
            segments.sort_by(|x, y| x.a.total_cmp(&y.a));
            let value = segments.iter().map(|s| s.value).sum();
            return Ok(Integral {
                value,
                error_bound: total_error,
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        let width_floor = 32.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1.0);
        if heap.len() + 2 > MAX_SEGMENTS || (worst.b - worst.a) <= width_floor {
            return Err(Error::QuadratureNonConvergence {
                achieved: total_error,
                requested: abs_tol,
            });
        }
        push(&mut heap, worst.a, mid)?;
        push(&mut heap, mid, worst.b)?;
    }
}
