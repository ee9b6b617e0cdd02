use std::collections::BTreeMap;

use log::warn;
use num_complex::Complex64;

use crate::error::{Error, Result};

use super::{check_t, curve_point, periodic_mean, schwarz};

/// Hard cap on the number of series terms.
pub const SERIES_TERM_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    Series,
    Contour,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub t: f64,
    pub method: MomentMethod,
    pub entries: BTreeMap<i64, Complex64>,
}

fn ln_factorial(m: i64) -> f64 {
    (2..=m).map(|j| (j as f64).ln()).sum()
}

/// `C_k(t) = sum_{n >= max(1, 1-k)} n^{k+2n-2} / ((n+k-1)! n!) e^{-2(t+1) n}`.
///
/// Terms grow over the first few `n` before they decay, so the sum is cut
/// only once the ratio of consecutive terms is below one and the running
/// term is below `tol` relative to the partial sum.
pub fn harmonic_moment_series(k: i64, t: f64, tol: f64) -> Result<Complex64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {tol}")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be finite, got {t}")));
    }
    let q = -2.0 * (t + 1.0);
    let n0 = 1.max(1 - k);
    let mut n = n0;
    let mut term = (((k + 2 * n - 2) as f64) * (n as f64).ln()
        - ln_factorial(n + k - 1)
        - ln_factorial(n)
        + q * n as f64)
        .exp();
    let mut sum = term;
    let mut ratio = f64::INFINITY;
    for _ in 1..SERIES_TERM_CAP {
        let nf = n as f64;
        ratio = (((k + 2 * n - 2) as f64) * (1.0 / nf).ln_1p() + q).exp() * (nf + 1.0)
            / (nf + k as f64);
        term *= ratio;
        sum += term;
        n += 1;
        if ratio < 1.0 && term < tol * sum.abs() {
            return Ok(Complex64::new(sum, 0.0));
        }
    }
    if ratio >= 1.0 || !sum.is_finite() {
        return Err(Error::Numeric(format!(
            "moment series for k = {k}, t = {t} is not decreasing after {SERIES_TERM_CAP} terms (last ratio {ratio})"
        )));
    }
    warn!(
        "moment series for k = {k}, t = {t} hit the {SERIES_TERM_CAP}-term cap; last term {term:e}"
    );
    Ok(Complex64::new(sum, 0.0))
}

fn contour_integrand(k: i32, t: f64, theta: f64) -> Result<Complex64> {
    // dz = -i z/(z-1) dtheta, so (1/2 pi i) dz = -(1/2pi) z/(z-1) dtheta
    let z = curve_point(t, theta)?;
    Ok(-z.powi(-k) * schwarz(z, t)? * z / (z - 1.0))
}

fn moment_index(k: i64) -> Result<i32> {
    i32::try_from(k).map_err(|_| Error::InvalidArgument(format!("moment index {k}")))
}

/// `(1/2 pi i) oint z^{-k} S(z, t) dz` over `gamma_t`, trapezoid rule in
/// `theta` on the midpoint grid.
pub fn harmonic_moment_contour(k: i64, t: f64, n_points: usize) -> Result<Complex64> {
    check_t(t)?;
    if n_points < 64 {
        return Err(Error::InvalidArgument(format!(
            "need at least 64 quadrature points, got {n_points}"
        )));
    }
    let k = moment_index(k)?;
    periodic_mean(n_points, |theta| contour_integrand(k, t, theta))
}

/// Contour moment with the node count doubled until successive values agree
/// to `tol` (starting at 256, up to 2^18 nodes). Agreement is relative to the
/// value, with a floor at the rounding level of the integrand.
fn contour_converged(k: i64, t: f64, tol: f64) -> Result<Complex64> {
    let ki = moment_index(k)?;
    let magnitude = periodic_mean(256, |theta| Ok(contour_integrand(ki, t, theta)?.norm().into()))?.re;
    let floor = 1e3 * f64::EPSILON * magnitude;
    let mut n = 256;
    let mut prev = harmonic_moment_contour(k, t, n)?;
    while n < 1 << 18 {
        n *= 2;
        let next = harmonic_moment_contour(k, t, n)?;
        if (next - prev).norm() <= tol * next.norm() + floor {
            return Ok(next);
        }
        prev = next;
    }
    warn!("contour moment k = {k}, t = {t} not converged at {n} nodes");
    Ok(prev)
}

pub fn moment_table(
    t: f64,
    k_min: i64,
    k_max: i64,
    method: MomentMethod,
    tol: f64,
) -> Result<MomentTable> {
    check_t(t)?;
    if k_min > k_max {
        return Err(Error::InvalidArgument(format!("empty range {k_min}..={k_max}")));
    }
    let entries = (k_min..=k_max)
        .map(|k| {
            let c = match method {
                MomentMethod::Series => harmonic_moment_series(k, t, tol)?,
                MomentMethod::Contour => contour_converged(k, t, tol)?,
            };
            Ok((k, c))
        })
        .collect::<Result<_>>()?;
    Ok(MomentTable { t, method, entries })
}

/// `sum_{k=-K}^{K} C_k(t) z^{k-1}`, the truncated Laurent expansion of
/// `S(z, t)` in the annulus `x1 < |z| < x2`.
pub fn laurent_partial_sum(z: Complex64, t: f64, order: usize) -> Result<Complex64> {
    let table = moment_table(t, -(order as i64), order as i64, MomentMethod::Series, 1e-17)?;
    Ok(table
        .entries
        .iter()
        .map(|(&k, c)| c * z.powi(k as i32 - 1))
        .sum())
}
