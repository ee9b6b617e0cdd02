//! Electrostatics of the conductor `gamma_t` in the external field
//! `Re z - log|z|`, its image in the `w = z e^{1-z}` plane, and the dual
//! velocity field whose streamlines are level curves of the potential.

use std::f64::consts::{PI, TAU};

use log::warn;
use num_complex::Complex64;

use crate::curve::{check_t, curve_point, forward_map, midpoint_grid, tangent_and_flow};
use crate::error::{Error, Result};
use crate::lambert::BranchIndex;
use crate::numeric::{dopri5_step, integrate_adaptive};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `D_t^+`, the bounded component containing the origin.
    Interior,
    /// `D_t^-`.
    Exterior,
    OnCurve,
}

/// Which one-sided limit to take on the curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub z: Complex64,
    pub u: f64,
    /// Field vector `E_x + i E_y`; `None` on the curve, where only one-sided
    /// limits exist.
    pub e: Option<Complex64>,
    pub region: Region,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogPotentialMethod {
    ClosedForm,
    Quadrature,
}

fn check_nonzero(z: Complex64, what: &str) -> Result<()> {
    if z.norm() == 0.0 {
        Err(Error::Singular(format!("{what} is singular at the origin")))
    } else {
        Ok(())
    }
}

/// Interior when `|z e^{1-z}| < e^{-t}` inside the unit disk; the right-hand
/// component of that sublevel set lies outside the disk and is exterior.
pub fn classify(z: Complex64, t: f64, band: f64) -> Region {
    let level = (-t).exp();
    let m = forward_map(z).norm();
    if (m - level).abs() <= band && z.norm() <= 1.0 {
        Region::OnCurve
    } else if m < level && z.norm() < 1.0 {
        Region::Interior
    } else {
        Region::Exterior
    }
}

/// Region used by the pointwise field functions; the band absorbs rounding in
/// `|z e^{1-z}|` only.
fn region_of(z: Complex64, t: f64) -> Region {
    classify(z, t, 4.0 * f64::EPSILON * (-t).exp().max(f64::MIN_POSITIVE))
}

/// Total potential `U_t`. On the curve both one-sided forms equal `t + 1`.
/// `t = +inf` gives the external potential `Re z - log|z|` everywhere.
pub fn potential(z: Complex64, t: f64) -> Result<f64> {
    check_nonzero(z, "potential")?;
    if t == f64::INFINITY {
        return Ok(z.re - z.norm().ln());
    }
    check_t(t)?;
    Ok(match region_of(z, t) {
        Region::Interior => potential_side(z, t, Side::Interior),
        _ => potential_side(z, t, Side::Exterior),
    })
}

pub fn potential_side(z: Complex64, t: f64, side: Side) -> f64 {
    let ext = z.re - z.norm().ln();
    match side {
        Side::Exterior => ext,
        Side::Interior => 2.0 * (t + 1.0) - ext,
    }
}

/// `Omega_t` with the principal logarithm: `z - log z` outside,
/// `-z + log z + 2(t+1)` inside.
pub fn complex_potential(z: Complex64, t: f64) -> Result<Complex64> {
    check_nonzero(z, "complex potential")?;
    check_t(t)?;
    Ok(match region_of(z, t) {
        Region::Interior => complex_potential_side(z, t, Side::Interior),
        _ => complex_potential_side(z, t, Side::Exterior),
    })
}

pub fn complex_potential_side(z: Complex64, t: f64, side: Side) -> Complex64 {
    let ext = z - z.ln();
    match side {
        Side::Exterior => ext,
        Side::Interior => 2.0 * (t + 1.0) - ext,
    }
}

/// Logarithmic potential `-2 oint log|z - z'| dmu_t(z')` of the equilibrium
/// measure.
pub fn log_potential(
    z: Complex64,
    t: f64,
    method: LogPotentialMethod,
    n_points: usize,
) -> Result<f64> {
    check_nonzero(z, "logarithmic potential")?;
    check_t(t)?;
    match method {
        LogPotentialMethod::ClosedForm => Ok(match region_of(z, t) {
            Region::Interior => -2.0 * z.re + 2.0 * (t + 1.0),
            _ => -2.0 * z.norm().ln(),
        }),
        LogPotentialMethod::Quadrature => log_potential_quadrature(z, t, n_points),
    }
}

fn log_potential_quadrature(z: Complex64, t: f64, n_points: usize) -> Result<f64> {
    if n_points < 16 {
        return Err(Error::InvalidArgument(format!(
            "need at least 16 quadrature points, got {n_points}"
        )));
    }
    // dmu_t = dtheta / 2pi exactly, so the integrand is log|z - z(theta)|.
    let nearest = nearest_parameter(z);
    let z_near = curve_point(t, nearest)?;
    let spacing = TAU / n_points as f64 * tangent_and_flow(t, nearest).map_or(1.0, |(d, _)| d.norm());
    let integrand = |theta: f64| {
        curve_point(t, theta).map_or(f64::NAN, |zp| (z - zp).norm().ln())
    };
    if (z - z_near).norm() > 8.0 * spacing {
        let mut acc = 0.0;
        for theta in midpoint_grid(n_points) {
            acc += integrand(theta);
        }
        return Ok(-2.0 * acc / n_points as f64);
    }
    let tol = 1e-13;
    let value = if (z - z_near).norm() <= 1e-9 * z.norm() {
        warn!("log potential evaluated on the curve at {z}; integrand is log-singular");
        // Remove the singularity with ln|2 sin((theta - theta*)/2)|, whose
        // integral over a period vanishes; rounding in |z - z(theta)| would
        // otherwise dominate the panels next to theta*.
        let regular = |theta: f64| {
            let chord = (2.0 * (0.5 * (theta - nearest)).sin()).abs();
            integrand(theta) - chord.ln()
        };
        integrate_adaptive(regular, nearest - PI, nearest, tol)
            + integrate_adaptive(regular, nearest, nearest + PI, tol)
    } else {
        integrate_adaptive(integrand, nearest - PI, nearest, tol)
            + integrate_adaptive(integrand, nearest, nearest + PI, tol)
    };
    if !value.is_finite() {
        return Err(Error::Numeric(format!("log potential quadrature failed at {z}")));
    }
    Ok(-value / PI)
}

/// Curve parameter of the point of `gamma_t` closest to a point near it:
/// `theta = arg(z e^{1-z})`.
pub fn nearest_parameter(z: Complex64) -> f64 {
    forward_map(z).arg()
}

/// Electric field `-grad U_t` as `E_x + i E_y`, off the curve.
pub fn electric_field(z: Complex64, t: f64) -> Result<Complex64> {
    check_nonzero(z, "electric field")?;
    check_t(t)?;
    match region_of(z, t) {
        Region::Interior => Ok(electric_field_side(z, Side::Interior)),
        Region::Exterior => Ok(electric_field_side(z, Side::Exterior)),
        Region::OnCurve => Err(Error::Domain(format!(
            "{z} lies on gamma_t; the field only has one-sided limits there"
        ))),
    }
}

/// Closed form of the field on one side, also valid as the one-sided limit
/// on the curve.
pub fn electric_field_side(z: Complex64, side: Side) -> Complex64 {
    let ext = -1.0 + 1.0 / z.conj();
    match side {
        Side::Exterior => ext,
        Side::Interior => -ext,
    }
}

/// Velocity `v_t = i E_t`, tangent to the level curves of `U_t`.
pub fn velocity(z: Complex64, t: f64) -> Result<Complex64> {
    Ok(Complex64::i() * electric_field(z, t)?)
}

pub fn velocity_side(z: Complex64, side: Side) -> Complex64 {
    Complex64::i() * electric_field_side(z, side)
}

pub fn field_sample(z: Complex64, t: f64, band: f64) -> Result<FieldSample> {
    check_nonzero(z, "field")?;
    check_t(t)?;
    let region = classify(z, t, band);
    let (u, e) = match region {
        Region::Interior => (
            potential_side(z, t, Side::Interior),
            Some(electric_field_side(z, Side::Interior)),
        ),
        Region::Exterior => (
            potential_side(z, t, Side::Exterior),
            Some(electric_field_side(z, Side::Exterior)),
        ),
        Region::OnCurve => (t + 1.0, None),
    };
    Ok(FieldSample { z, u, e, region })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub theta: f64,
    pub z: Complex64,
    /// `dz/dtheta`.
    pub dz: Complex64,
    /// Weight per unit `theta`; identically `1/2pi`.
    pub rho: f64,
    /// Weight per unit arclength.
    pub line_density: f64,
}

/// `dmu_t = (1/2 pi i) (1 - z)/z dz` at `z = z(t, theta)`.
pub fn density(theta: f64, t: f64) -> Result<DensitySample> {
    let (dz, _) = tangent_and_flow(t, theta)?;
    let z = curve_point(t, theta)?;
    let rho = ((1.0 - z) / (TAU * z)).norm() * dz.norm();
    Ok(DensitySample {
        theta,
        z,
        dz,
        rho,
        line_density: rho / dz.norm(),
    })
}

/// `oint f(z) dmu_t` on the midpoint grid, using the complex measure
/// `(1/2 pi i)(1 - z)/z dz`.
pub fn integrate_against_density<F>(t: f64, n_points: usize, f: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let h = TAU / n_points as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for theta in midpoint_grid(n_points) {
        let s = density(theta, t)?;
        let dmu = (1.0 - s.z) / s.z * s.dz / (TAU * Complex64::i());
        acc += f(s.z) * dmu * h;
    }
    Ok(acc)
}

/// `E_se = (1/2) oint U_log dmu_t`, expected `t + 1`.
pub fn self_energy(t: f64, n_points: usize) -> Result<f64> {
    check_t(t)?;
    if n_points < 128 {
        return Err(Error::InvalidArgument(format!(
            "need at least 128 quadrature points, got {n_points}"
        )));
    }
    let h = TAU / n_points as f64;
    let mut acc = 0.0;
    for theta in midpoint_grid(n_points) {
        let s = density(theta, t)?;
        // on the curve both closed forms agree; the exterior one is cheaper
        acc += -2.0 * s.z.norm().ln() * s.rho * h;
    }
    Ok(0.5 * acc)
}

/// `u_0 - E_se` with `u_0 = t + 1`; vanishes for the equilibrium measure.
pub fn total_energy(t: f64, n_points: usize) -> Result<f64> {
    Ok((t + 1.0) - self_energy(t, n_points)?)
}

/// Potential of the transformed model in the `w` plane. Sheet 0 carries the
/// image of the conductor on `|w| = e^{-t}`.
pub fn w_plane_potential(w: Complex64, t: f64, k: BranchIndex) -> Result<f64> {
    check_nonzero(w, "w-plane potential")?;
    check_t(t)?;
    let r = w.norm();
    Ok(if k.0 == 0 && r < (-t).exp() {
        r.ln() + 2.0 * t + 1.0
    } else {
        1.0 - r.ln()
    })
}

/// Potential of a unit charge spread uniformly on `|w| = e^{-t}`.
pub fn w_plane_log_potential(w: Complex64, t: f64) -> Result<f64> {
    check_nonzero(w, "w-plane logarithmic potential")?;
    check_t(t)?;
    let r = w.norm();
    Ok(if r < (-t).exp() { 2.0 * t } else { -2.0 * r.ln() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    /// Returned within one step of the start after at least ten steps.
    Closed,
    MaxSteps,
    /// Left the region the path started in.
    CurveCrossing,
    /// Came within ten steps of a singular point (`0` or the stagnation
    /// point `1`).
    NearSingular(Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub points: Vec<Complex64>,
    pub closed: bool,
    /// Largest deviation of `U_t = Re Omega_t` from its starting value.
    pub invariant_drift: f64,
    pub stop: StopReason,
}

/// Integrates `dz/dtau = v_t(z)` with adaptive Dormand-Prince steps no longer
/// than `step`.
pub fn streamline(z0: Complex64, t: f64, step: f64, max_steps: usize) -> Result<PathSample> {
    check_t(t)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let region = region_of(z0, t);
    let side = match region {
        Region::Interior => Side::Interior,
        Region::Exterior => Side::Exterior,
        Region::OnCurve => {
            return Err(Error::Domain(format!("streamline start {z0} lies on gamma_t")))
        }
    };
    for s in [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)] {
        if (z0 - s).norm() < 10.0 * step {
            return Err(Error::Singular(format!("streamline start {z0} is too close to {s}")));
        }
    }
    let u0 = potential_side(z0, t, side);
    let f = |z: Complex64| velocity_side(z, side);
    let tol = 1e-11;
    let mut points = vec![z0];
    let mut z = z0;
    let mut h = step;
    let mut drift: f64 = 0.0;
    let mut stop = StopReason::MaxSteps;
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < max_steps {
        attempts += 1;
        if attempts > 50 * max_steps.max(1) {
            return Err(Error::NoConvergence {
                iterations: attempts,
                residual: drift,
            });
        }
        let (next, err) = dopri5_step(&f, z, h);
        let scale = tol * (1.0 + z.norm());
        if !(err <= scale) {
            h *= (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.5);
            continue;
        }
        accepted += 1;
        let prev = z;
        z = next;
        points.push(z);
        drift = drift.max((potential_side(z, t, side) - u0).abs());
        if let Some(s) = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
            .into_iter()
            .find(|s| (z - s).norm() < 10.0 * step)
        {
            stop = StopReason::NearSingular(s);
            break;
        }
        if region_of(z, t) != region {
            stop = StopReason::CurveCrossing;
            break;
        }
        if accepted >= 10 && segment_distance(z0, prev, z) < step {
            stop = StopReason::Closed;
            break;
        }
        if err > 0.0 {
            h *= (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0);
        } else {
            h *= 5.0;
        }
        h = h.min(step);
    }
    Ok(PathSample {
        points,
        closed: stop == StopReason::Closed,
        invariant_drift: drift,
        stop,
    })
}

/// Distance from `p` to the segment `[a, b]`.
fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + s * d)).norm()
}
