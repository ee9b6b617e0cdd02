//! Penner matrix model `W(z) = z + log z`: saddle points, resolvent,
//! Schwinger-Dyson diagnostics and trajectories of `-R(z) dz^2`.
//!
//! At coupling `g` the saddle points are `g` times the zeros of
//! `L_n^{(alpha)}` with `alpha = -1 - 1/g`; `saddle_newton` solves the saddle
//! equations directly so the two constructions can be cross-checked.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::curve::check_t;
use crate::error::{Error, Result};
use crate::field::{density, nearest_parameter};
use crate::laguerre::laguerre_zeros;
use crate::numeric::{bisect, min_cost_assignment, rk4_step};

const NEWTON_MAX_ITER: usize = 200;
const NEWTON_TOL: f64 = 1e-10;

/// 't Hooft parameter `T = n g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PennerParams {
    pub t_hooft: f64,
}

impl PennerParams {
    pub fn new(t_hooft: f64) -> Result<Self> {
        if !t_hooft.is_finite() || t_hooft == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "'t Hooft parameter must be finite and nonzero, got {t_hooft}"
            )));
        }
        Ok(Self { t_hooft })
    }

    pub fn coupling(&self, n: usize) -> f64 {
        self.t_hooft / n as f64
    }

    /// Laguerre parameter `alpha_n = -1 - 1/g_n`.
    pub fn alpha(&self, n: usize) -> f64 {
        -1.0 - 1.0 / self.coupling(n)
    }

    /// Charge `A = -1/T` of the electrostatic model.
    pub fn charge(&self) -> f64 {
        -1.0 / self.t_hooft
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleConfig {
    pub n: usize,
    pub g: f64,
    pub points: Vec<Complex64>,
    /// Max modulus of the saddle equations over the points.
    pub residual: f64,
}

impl SaddleConfig {
    /// `sum 1/z_i`, equal to `-n` at a saddle.
    pub fn reciprocal_sum(&self) -> Complex64 {
        self.points.iter().map(|z| 1.0 / z).sum()
    }
}

fn check_coupling(g: f64) -> Result<()> {
    if g.is_finite() && g != 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("coupling must be finite and nonzero, got {g}")))
    }
}

/// `F_i = (1/g)(1 + 1/z_i) + sum_{j != i} 2/(z_j - z_i)`.
pub fn saddle_equations(g: f64, points: &[Complex64]) -> Vec<Complex64> {
    points
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let pair: Complex64 = points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| 2.0 / (zj - zi))
                .sum();
            (1.0 + 1.0 / zi) / g + pair
        })
        .collect()
}

/// Max modulus; NaN if any entry is NaN.
fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Saddle point from the zeros of `L_n^{(-1-1/g)}`.
pub fn saddle_from_laguerre(n: usize, g: f64) -> Result<SaddleConfig> {
    check_coupling(g)?;
    let zs = laguerre_zeros(n, -1.0 - 1.0 / g)?;
    let points: Vec<Complex64> = zs.zeros.iter().map(|z| g * z).collect();
    let residual = max_norm(&saddle_equations(g, &points));
    Ok(SaddleConfig {
        n,
        g,
        points,
        residual,
    })
}

/// `n` points on `|z| = e^{-t-1}`, rotated half a step off the real axis.
pub fn default_init(n: usize, t: f64) -> Vec<Complex64> {
    let r = (-t - 1.0).exp();
    (0..n)
        .map(|j| Complex64::from_polar(r, TAU * (j as f64 + 0.5) / n as f64))
        .collect()
}

fn min_separation(points: &[Complex64]) -> Result<f64> {
    let mut d = f64::INFINITY;
    for i in 0..points.len() {
        d = d.min(points[i].norm());
        for j in i + 1..points.len() {
            let dij = (points[i] - points[j]).norm();
            if dij == 0.0 {
                return Err(Error::Collision { i, j });
            }
            d = d.min(dij);
        }
    }
    Ok(d)
}

/// Damped Newton on the saddle equations. Each step is capped at half the
/// smallest pairwise distance (or distance to the pole at 0) and then
/// backtracked until the residual decreases.
pub fn saddle_newton(n: usize, g: f64, init: &[Complex64]) -> Result<SaddleConfig> {
    check_coupling(g)?;
    if init.len() != n || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "need {n} >= 1 initial points, got {}",
            init.len()
        )));
    }
    if let Some(i) = init.iter().position(|z| z.norm() == 0.0 || !z.is_finite()) {
        return Err(Error::InvalidArgument(format!("initial point {i} is zero or not finite")));
    }
    min_separation(init)?;
    let mut z = init.to_vec();
    let mut f = saddle_equations(g, &z);
    let mut res = max_norm(&f);
    for iter in 0..NEWTON_MAX_ITER {
        if res < NEWTON_TOL {
            return Ok(SaddleConfig {
                n,
                g,
                points: z,
                residual: res,
            });
        }
        let sep = min_separation(&z)?;
        let jac = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                let pair: Complex64 = (0..n)
                    .filter(|&k| k != i)
                    .map(|k| 2.0 / (z[k] - z[i]).powi(2))
                    .sum();
                -1.0 / (g * z[i] * z[i]) + pair
            } else {
                -2.0 / (z[j] - z[i]).powi(2)
            }
        });
        let rhs = DVector::from_iterator(n, f.iter().map(|v| -v));
        let step = jac.lu().solve(&rhs).ok_or_else(|| {
            Error::Singular(format!("saddle Jacobian is singular at iteration {iter}"))
        })?;
        let longest = step.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let cap = if longest > 0.5 * sep { 0.5 * sep / longest } else { 1.0 };
        let mut lambda = cap;
        loop {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, d)| a + lambda * d).collect();
            let ft = saddle_equations(g, &trial);
            let rt = max_norm(&ft);
            if rt.is_finite() && rt < (1.0 - 1e-4 * lambda) * res {
                z = trial;
                f = ft;
                res = rt;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 * cap {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: res,
                });
            }
        }
    }
    if res < NEWTON_TOL {
        return Ok(SaddleConfig {
            n,
            g,
            points: z,
            residual: res,
        });
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_MAX_ITER,
        residual: res,
    })
}

/// Optimal one-to-one matching of two point sets; returns the assignment
/// and the largest matched distance.
pub fn match_sets(a: &[Complex64], b: &[Complex64]) -> Result<(Vec<usize>, f64)> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "sets have different sizes {} and {}",
            a.len(),
            b.len()
        )));
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let assignment = min_cost_assignment(&cost);
    let worst = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max);
    Ok((assignment, worst))
}

fn check_off_points(cfg: &SaddleConfig, z: Complex64) -> Result<()> {
    let tol = 1e-12 * z.norm().max(1.0);
    match cfg.points.iter().position(|p| (z - p).norm() <= tol) {
        Some(i) => Err(Error::Singular(format!("{z} coincides with saddle point {i}"))),
        None => Ok(()),
    }
}

/// `omega_n(z) = (1/n) sum 1/(z - z_i)`.
pub fn resolvent(cfg: &SaddleConfig, z: Complex64) -> Result<Complex64> {
    check_off_points(cfg, z)?;
    Ok(cfg.points.iter().map(|p| 1.0 / (z - p)).sum::<Complex64>() / cfg.n as f64)
}

/// `R_PM(z) = (1/T^2)(1 + 1/z)^2 - 4/(T z)`.
pub fn r_penner(z: Complex64, t_hooft: f64) -> Result<Complex64> {
    PennerParams::new(t_hooft)?;
    if z.norm() == 0.0 {
        return Err(Error::Singular("R_PM has a double pole at z = 0".into()));
    }
    let a = 1.0 + 1.0 / z;
    Ok(a * a / (t_hooft * t_hooft) - 4.0 / (t_hooft * z))
}

/// `|y_n^2 - R_PM(z; n g)|` with `y_n = (1/(n g))(1 + 1/z) - 2 omega_n(z)`.
pub fn sd_residual(cfg: &SaddleConfig, z: Complex64) -> Result<f64> {
    if z.norm() == 0.0 {
        return Err(Error::Singular("z = 0 is a pole of W'".into()));
    }
    let t_hooft = cfg.n as f64 * cfg.g;
    let y = (1.0 + 1.0 / z) / t_hooft - 2.0 * resolvent(cfg, z)?;
    Ok((y * y - r_penner(z, t_hooft)?).norm())
}

/// Residual of `S'' - (1/g)(1 + 1/z) S' + n/(g z) S = 0` for the monic
/// polynomial with the saddle points as roots, relative to the magnitudes of
/// its terms.
pub fn ri1b_residual(cfg: &SaddleConfig, z: Complex64) -> Result<f64> {
    if z.norm() == 0.0 {
        return Err(Error::Singular("z = 0 is a pole of the equation".into()));
    }
    check_off_points(cfg, z)?;
    // divided through by S: S'/S = sum 1/(z - z_i), S''/S = (S'/S)^2 - sum 1/(z - z_i)^2
    let d1: Complex64 = cfg.points.iter().map(|p| 1.0 / (z - p)).sum();
    let d2 = d1 * d1 - cfg.points.iter().map(|p| (z - p).powi(-2)).sum::<Complex64>();
    let terms = [d2, -(1.0 + 1.0 / z) / cfg.g * d1, cfg.n as f64 / (cfg.g * z) * Complex64::new(1.0, 0.0)];
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    Ok(terms.iter().sum::<Complex64>().norm() / scale)
}

/// Eigenvalue density of the Penner model at 't Hooft parameter `T`,
/// `(1/|T|) rho_t(z/T)` per unit arclength. `z/T` must lie on `gamma_t`.
pub fn density_scaling(z: Complex64, t: f64, t_hooft: f64) -> Result<f64> {
    check_t(t)?;
    PennerParams::new(t_hooft)?;
    let w = z / t_hooft;
    let level = (w.norm().ln() + 1.0 - w.re) + t;
    if w.norm() == 0.0 || level.abs() > 1e-8 || w.norm() > 1.0 + 1e-8 {
        return Err(Error::Domain(format!("z/T = {w} is not on gamma_{t}")));
    }
    Ok(density(nearest_parameter(w), t)?.line_density / t_hooft.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Complex64>,
    pub closed: bool,
    /// Distance between the start and the point where the path returns to
    /// the ray through it.
    pub closure_gap: f64,
    /// Max `|Re(z - log z) - (t + 1)|` over the returned points.
    pub level_drift: f64,
    /// Largest level defect an integration step produced before projection.
    pub max_step_defect: f64,
    pub winding: i64,
}

fn level(z: Complex64) -> f64 {
    z.re - z.norm().ln()
}

/// Newton projection of `z` onto `Re(z - log z) = c` along the gradient.
fn project(mut z: Complex64, c: f64) -> Complex64 {
    for _ in 0..8 {
        let f = level(z) - c;
        let g = (1.0 - 1.0 / z).conj();
        let dz = -f * g / g.norm_sqr();
        z += dz;
        if dz.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}

/// Winding number of a closed polygon about the origin.
pub fn winding_number(points: &[Complex64]) -> i64 {
    let n = points.len();
    let total: f64 = (0..n).map(|k| (points[(k + 1) % n] / points[k]).arg()).sum();
    (total / TAU).round() as i64
}

/// Trace the trajectory of `-R(z) dz^2`, `R = (1 - 1/z)^2`, through `z0` on
/// the level set `Re(z - log z) = t + 1`, with unit-speed RK4 steps of arc
/// length `step`, each projected back onto the level set. The branch of
/// `sqrt R` is fixed by continuity and re-anchored to counter-clockwise
/// orientation every 100 steps.
pub fn trajectory(t: f64, z0: Complex64, step: f64, max_steps: usize) -> Result<Trajectory> {
    check_t(t)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if z0.norm() < 1e-12 {
        return Err(Error::Singular("trajectory start at the pole z = 0".into()));
    }
    if (z0 - 1.0).norm() < 1e-12 {
        return Err(Error::Singular("z = 1 is the critical point of the quadratic differential".into()));
    }
    let c = t + 1.0;
    if (level(z0) - c).abs() > 1e-8 {
        return Err(Error::Domain(format!(
            "start {z0} is off the level set: Re(z - log z) - (t + 1) = {:e}",
            level(z0) - c
        )));
    }
    let ccw = |z: Complex64| Complex64::i() * z / (1.0 - z);
    let mut sigma = 1.0;
    if (z0.conj() * sigma * Complex64::i() / (1.0 - 1.0 / z0)).im < 0.0 {
        sigma = -1.0;
    }
    let mut sqrt_r_prev = sigma * (1.0 - 1.0 / z0);
    let mut points = vec![z0];
    let mut z = z0;
    let mut turned = 0.0;
    let mut max_step_defect: f64 = 0.0;
    for k in 1..=max_steps {
        let sqrt_r = 1.0 - 1.0 / z;
        if (sigma * sqrt_r - sqrt_r_prev).norm() > (sigma * sqrt_r + sqrt_r_prev).norm() {
            sigma = -sigma;
        }
        if k % 100 == 0 {
            let v = sigma * Complex64::i() / sqrt_r;
            if (v / ccw(z)).re < 0.0 {
                sigma = -sigma;
            }
        }
        sqrt_r_prev = sigma * sqrt_r;
        let s = sigma;
        let dir = move |w: Complex64| {
            let v = s * Complex64::i() / (1.0 - 1.0 / w);
            v / v.norm()
        };
        let raw = rk4_step(&dir, z, step);
        max_step_defect = max_step_defect.max((level(raw) - c).abs());
        let next = project(raw, c);
        if t == 0.0 && (next - 1.0).norm() < 2.0 * step {
            return Err(Error::Singular(format!(
                "critical trajectory reaches the corner z = 1 after {k} steps"
            )));
        }
        if next.norm() < 1e-12 {
            return Err(Error::Singular("trajectory runs into the pole z = 0".into()));
        }
        let dturn = (next / z).arg();
        if turned + dturn >= TAU {
            // closing segment: cubic Hermite between z and next, crossing the ray through z0
            let (m0, m1) = (step * dir(z), step * dir(next));
            let herm = |u: f64| {
                let (u2, u3) = (u * u, u * u * u);
                z * (2.0 * u3 - 3.0 * u2 + 1.0)
                    + m0 * (u3 - 2.0 * u2 + u)
                    + next * (-2.0 * u3 + 3.0 * u2)
                    + m1 * (u3 - u2)
            };
            let u = bisect(|u| (herm(u) / z0).arg(), 0.0, 1.0).unwrap_or(0.5);
            let closure_gap = (herm(u) - z0).norm();
            let level_drift = points.iter().map(|&p| (level(p) - c).abs()).fold(0.0, f64::max);
            let winding = winding_number(&points);
            return Ok(Trajectory {
                points,
                closed: true,
                closure_gap,
                level_drift,
                max_step_defect,
                winding,
            });
        }
        turned += dturn;
        points.push(next);
        z = next;
    }
    let level_drift = points.iter().map(|&p| (level(p) - c).abs()).fold(0.0, f64::max);
    Ok(Trajectory {
        closure_gap: (z - z0).norm(),
        closed: false,
        level_drift,
        max_step_defect,
        winding: 0,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{curve_point, real_crossing};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_point_saddle() {
        for &g in &[0.3, 1.0, -2.0] {
            let l = saddle_from_laguerre(1, g).unwrap();
            assert!((l.points[0] + 1.0).norm() < 1e-14);
            let nw = saddle_newton(1, g, &[c(0.4, 0.7)]).unwrap();
            assert!((nw.points[0] + 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn laguerre_saddle_satisfies_equations() {
        let cfg = saddle_from_laguerre(5, 0.2).unwrap();
        assert!(cfg.residual < 1e-8, "{}", cfg.residual);
        assert!((cfg.reciprocal_sum() + 5.0).norm() < 1e-10);
    }

    #[test]
    fn newton_recovers_perturbed_saddle() {
        let exact = saddle_from_laguerre(10, 0.1).unwrap();
        let init: Vec<_> = exact
            .points
            .iter()
            .enumerate()
            .map(|(k, z)| z * Complex64::from_polar(1.0 + 0.01 * (k as f64).sin(), 0.01 * (k as f64).cos()))
            .collect();
        let nw = saddle_newton(10, 0.1, &init).unwrap();
        let (_, worst) = match_sets(&nw.points, &exact.points).unwrap();
        assert!(worst < 1e-8, "{worst}");
        assert!((nw.reciprocal_sum() + 10.0).norm() < 1e-10);
    }

    #[test]
    fn newton_reports_collisions() {
        let init = [c(0.3, 0.1), c(0.3, 0.1)];
        assert!(matches!(saddle_newton(2, 0.5, &init), Err(Error::Collision { i: 0, j: 1 })));
    }

    #[test]
    fn resolvent_basics() {
        let cfg = SaddleConfig {
            n: 1,
            g: 1.0,
            points: vec![c(-1.0, 0.0)],
            residual: 0.0,
        };
        let z = c(0.3, 2.0);
        assert!((resolvent(&cfg, z).unwrap() - 1.0 / (z + 1.0)).norm() < 1e-15);
        assert!(resolvent(&cfg, c(-1.0, 0.0)).is_err());
        let big = saddle_from_laguerre(8, 0.125).unwrap();
        let far = c(1e4, 3e3);
        assert!((resolvent(&big, far).unwrap() * far - 1.0).norm() < 1e-3);
    }

    #[test]
    fn penner_r_values() {
        let z = c(0.7, -0.2);
        assert!((r_penner(z, 1.0).unwrap() - (1.0 - 1.0 / z).powi(2)).norm() < 1e-14);
        assert_eq!(r_penner(c(1.0, 0.0), 1.0).unwrap(), c(0.0, 0.0));
        assert!((r_penner(c(2.0, 0.0), 2.0).unwrap() - c(-7.0 / 16.0, 0.0)).norm() < 1e-15);
        assert!(r_penner(c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn one_point_sd_residual() {
        // n = 1, g = 1: y = 1 + 1/z - 2/(z+1), R = (1 - 1/z)^2
        let cfg = saddle_from_laguerre(1, 1.0).unwrap();
        let z = c(2.0, 1.0);
        let y = 1.0 + 1.0 / z - 2.0 / (z + 1.0);
        let expect = (y * y - (1.0 - 1.0 / z).powi(2)).norm();
        assert!((sd_residual(&cfg, z).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn ri1b_holds_for_saddle_points() {
        let cfg = saddle_from_laguerre(12, 1.0 / 12.0).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.5 + 0.1 * k as f64, 0.7 * k as f64);
            assert!(ri1b_residual(&cfg, z).unwrap() < 1e-8);
        }
    }

    #[test]
    fn oval_closes() {
        let t = 0.4;
        let tr = trajectory(t, c(real_crossing(t), 0.0), 1e-3, 100_000).unwrap();
        assert!(tr.closed);
        assert!(tr.closure_gap < 1e-6, "{}", tr.closure_gap);
        assert!(tr.level_drift < 1e-8);
        assert_eq!(tr.winding, 1);
        for p in &tr.points {
            assert!(((p * (1.0 - p).exp()).norm() - (-t).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn critical_trajectory_hits_corner() {
        let z0 = curve_point(0.0, 0.05).unwrap();
        assert!(matches!(trajectory(0.0, z0, 1e-3, 100_000), Err(Error::Singular(_))));
        assert!(matches!(trajectory(0.4, c(0.5, 0.0), 1e-3, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn density_scaling_halves() {
        let t = 0.4;
        let w = curve_point(t, 1.1).unwrap();
        let base = density_scaling(w, t, 1.0).unwrap();
        let scaled = density_scaling(2.0 * w, t, 2.0).unwrap();
        assert!((scaled - 0.5 * base).abs() < 1e-12 * base);
        assert!(density_scaling(0.5 * w, t, 1.0).is_err());
    }
}
