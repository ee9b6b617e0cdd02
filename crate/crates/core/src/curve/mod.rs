//! The curves `gamma_t`: parametrization, Schwarz function and reflection,
//! curvature, the conformal map onto the disk, branch cuts and harmonic
//! moments.

mod cuts;
mod moments;

pub use cuts::{
    analyticity_cuts, branch_point_residual, quadratrix_point, quadratrix_samples, CutSet,
    OffAxisCut, QuadratrixKind, QuadratrixPath,
};
pub use moments::{
    harmonic_moment_contour, harmonic_moment_series, laurent_partial_sum, moment_table,
    MomentMethod, MomentTable, SERIES_TERM_CAP,
};

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Cut, Error, Result};
use crate::lambert::{w0, wk, INV_E};
use crate::numeric::central_difference;

/// A member of the family `|z e^{1-z}| = e^{-t}`, `|z| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveId {
    t: f64,
}

impl CurveId {
    pub fn new(t: f64) -> Result<Self> {
        check_t(t)?;
        Ok(Self { t })
    }

    /// The classical Szegő curve.
    pub fn szego() -> Self {
        Self { t: 0.0 }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn point(&self, theta: f64) -> Result<Complex64> {
        curve_point(self.t, theta)
    }

    /// Points on the midpoint grid `theta_j = 2 pi (j + 1/2) / n`, which
    /// never lands on the corner of the Szegő curve.
    pub fn samples(&self, n: usize) -> Result<Vec<(f64, Complex64)>> {
        midpoint_grid(n)
            .map(|theta| Ok((theta, curve_point(self.t, theta)?)))
            .collect()
    }

    /// Real crossing `x0 = -W0(-e^{-(t+1)})`, the point of largest modulus.
    pub fn x0(&self) -> f64 {
        real_crossing(self.t)
    }
}

pub(crate) fn check_t(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("t must be finite and >= 0, got {t}")))
    }
}

/// `theta_j = 2 pi (j + 1/2) / n` for `j = 0..n`.
pub fn midpoint_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| TAU * (j as f64 + 0.5) / n as f64)
}

/// `x0 = -W0(-e^{-(t+1)})`, computed on the real fast path.
pub fn real_crossing(t: f64) -> f64 {
    -w0(Complex64::new(-(-(t + 1.0)).exp(), 0.0))
        .expect("argument lies in [-1/e, 0)")
        .re
}

/// `z(t, theta) = -W0(-e^{-(t+1) + i theta})`.
pub fn curve_point(t: f64, theta: f64) -> Result<Complex64> {
    check_t(t)?;
    let arg = -Complex64::from_polar((-(t + 1.0)).exp(), theta);
    Ok(-w0(arg)?)
}

/// `(dz/dtheta, dz/dt)` at `z(t, theta)`: `dz/dt = z/(z-1)` and
/// `dz/dtheta = -i z/(z-1)`.
pub fn tangent_and_flow(t: f64, theta: f64) -> Result<(Complex64, Complex64)> {
    let z = curve_point(t, theta)?;
    if (z - 1.0).norm() < 1e-12 {
        return Err(Error::Singular(
            "tangent undefined at the corner z = 1 of the Szegő curve".into(),
        ));
    }
    let dz_dt = z / (z - 1.0);
    Ok((-Complex64::i() * dz_dt, dz_dt))
}

/// Unsigned curvature of `gamma_t` at parameter `theta`.
pub fn curvature(t: f64, theta: f64) -> Result<f64> {
    check_t(t)?;
    let zeta = -Complex64::from_polar((-(t + 1.0)).exp(), theta);
    let w = w0(zeta)?;
    let wb = w0(zeta.conj())?;
    let denom = (1.0 + wb).powi(3) * w;
    if (1.0 + wb).norm() < 1e-12 {
        return Err(Error::Singular(
            "curvature undefined at the corner z = 1 of the Szegő curve".into(),
        ));
    }
    Ok(((1.0 + (w * (2.0 + w)).re) / denom).norm())
}

/// `e^{t+1} - e^{-(t+1)} (1 - 3/2 cos 2 theta)`.
pub fn curvature_asymptotic(t: f64, theta: f64) -> f64 {
    (t + 1.0).exp() - (-(t + 1.0)).exp() * (1.0 - 1.5 * (2.0 * theta).cos())
}

/// The argument `-e^{-2(t+1)} e^z / z` of the principal Lambert branch in the
/// Schwarz function.
pub fn schwarz_argument(z: Complex64, t: f64) -> Complex64 {
    -(z - 2.0 * (t + 1.0)).exp() / z
}

/// Schwarz function `S(z, t) = -W0(-e^{-2(t+1)} e^z / z)`.
pub fn schwarz(z: Complex64, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t must be finite, got {t}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::OnCut(Cut::Origin));
    }
    let arg = schwarz_argument(z, t);
    if !arg.is_finite() {
        return Err(Error::Overflow(format!("exp overflow in Schwarz argument at z = {z}")));
    }
    if let Some(cut) = locate_cut(z, t, arg) {
        return Err(Error::OnCut(cut));
    }
    Ok(-w0(arg)?)
}

/// Which cut, if any, the point `z` sits on. The Schwarz argument must be
/// real and at most `-1/e`; the branch point itself is not a cut.
fn locate_cut(z: Complex64, t: f64, arg: Complex64) -> Option<Cut> {
    let tol = 16.0 * f64::EPSILON * z.norm().max(1.0);
    if arg.im.abs() > tol * arg.norm() || arg.re >= -INV_E * (1.0 + 1e-13) {
        return None;
    }
    if z.im.abs() <= tol {
        let rhs = 2.0 * t + 1.0;
        return Some(if z.re < 1.0 {
            Cut::RealInner {
                x1: -w0(Complex64::new(-(-rhs).exp(), 0.0)).ok()?.re,
            }
        } else {
            Cut::RealOuter {
                x2: -wk(-1, Complex64::new(-(-rhs).exp(), 0.0)).ok()?.re,
            }
        });
    }
    let k = (z.im.abs() / TAU).floor() as i64;
    Some(Cut::OffAxis {
        k: if z.im > 0.0 { k } else { -k },
    })
}

/// Schwarz reflection `z* = conj(S(z, t))` across `gamma_t`.
pub fn reflect(z: Complex64, t: f64) -> Result<Complex64> {
    Ok(schwarz(z, t)?.conj())
}

/// `|dS/dt - 2z/(1-z) dS/dz|` with both partials from central differences of
/// step `h`.
pub fn schwarz_pde_residual(z: Complex64, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    if (z - 1.0).norm() < 1e-14 {
        return Err(Error::Singular("coefficient 2z/(1-z) diverges at z = 1".into()));
    }
    let s_t = central_difference(|tt| schwarz(z, tt), t, h, false)?;
    let s_z = (schwarz(z + h, t)? - schwarz(z - h, t)?) / (2.0 * h);
    Ok((s_t - 2.0 * z / (1.0 - z) * s_z).norm())
}

/// `w(z) = z e^{1-z}`, the conformal map of the interior onto `|w| < e^{-t}`.
pub fn forward_map(z: Complex64) -> Complex64 {
    z * (1.0 - z).exp()
}

/// `z_k(w) = -W_k(-w/e)`. The cut of sheet 0 is `w >= 1`; every other sheet
/// is cut along `w >= 0`.
pub fn inverse_map(w: Complex64, k: crate::lambert::BranchIndex) -> Result<Complex64> {
    let on_cut = w.im == 0.0
        && if k.0 == 0 {
            w.re > 1.0
        } else {
            w.re >= 0.0
        };
    if on_cut {
        return Err(Error::OnCut(Cut::Sheet { k: k.0 }));
    }
    Ok(-wk(k.0, -w * INV_E)?)
}

/// Sum of `f(theta)` over the midpoint grid scaled to approximate
/// `(1/2pi) int_0^{2pi} f`.
pub(crate) fn periodic_mean<F>(n: usize, f: F) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut acc = Complex64::new(0.0, 0.0);
    for theta in midpoint_grid(n) {
        acc += f(theta)?;
    }
    Ok(acc / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambert::BranchIndex;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Bisection on `x e^{-x} = e^{-(t+1)}` in `(0, 1)`.
    fn crossing_oracle(t: f64) -> f64 {
        let target = -(t + 1.0);
        let (mut lo, mut hi) = (1e-300f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid.ln() - mid < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn szego_corner_and_real_crossing() {
        assert_eq!(curve_point(0.0, 0.0).unwrap(), c(1.0, 0.0));
        let x0 = curve_point(1.0, 0.0).unwrap();
        assert_eq!(x0.im, 0.0);
        assert!((x0.re - crossing_oracle(1.0)).abs() < 1e-15);
        assert!((x0.re - 0.158_594_339_563_039_8).abs() < 1e-12);
        assert_eq!(CurveId::new(1.0).unwrap().x0(), x0.re);
    }

    #[test]
    fn negative_real_point() {
        // -W0(e^{-2}) solves x e^{-x} = -e^{-2} on (-1, 0)
        let z = curve_point(1.0, PI).unwrap();
        assert!(z.im.abs() < 1e-15);
        let x = z.re;
        assert!((x * (-x).exp() + (-2f64).exp()).abs() < 1e-15);
        assert!((x + 0.120_028_238_987_641_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_t() {
        assert!(matches!(curve_point(-0.1, 0.0), Err(Error::InvalidArgument(_))));
        assert!(CurveId::new(f64::NAN).is_err());
    }

    #[test]
    fn schwarz_trivial_values() {
        let s = schwarz(c(1.0, 0.0), 0.0).unwrap();
        assert!((s - 1.0).norm() < 1e-15);
        let x0 = real_crossing(1.0);
        let s = schwarz(c(x0, 0.0), 1.0).unwrap();
        assert!((s.re - x0).abs() < 1e-14 && s.im == 0.0);
        let z = curve_point(0.4, 1.3).unwrap();
        assert!((schwarz(z, 0.4).unwrap() - z.conj()).norm() < 1e-12);
    }

    #[test]
    fn schwarz_errors_name_the_cut() {
        assert_eq!(schwarz(c(0.0, 0.0), 0.2), Err(Error::OnCut(Cut::Origin)));
        match schwarz(c(0.01, 0.0), 1.0) {
            Err(Error::OnCut(Cut::RealInner { x1 })) => assert!((x1 - 0.052_469).abs() < 1e-5),
            other => panic!("{other:?}"),
        }
        match schwarz(c(6.0, 0.0), 1.0) {
            Err(Error::OnCut(Cut::RealOuter { x2 })) => assert!((x2 - 4.505_241).abs() < 1e-5),
            other => panic!("{other:?}"),
        }
        let cuts = analyticity_cuts(0.1, 1).unwrap();
        let arc = cuts.off_axis[0];
        let y = 0.5 * (arc.y_start + arc.y_end);
        assert_eq!(schwarz(arc.point(y), 0.1), Err(Error::OnCut(Cut::OffAxis { k: 1 })));
        assert_eq!(
            schwarz(arc.point(y).conj(), 0.1),
            Err(Error::OnCut(Cut::OffAxis { k: -1 }))
        );
        // between the two real cuts and off the arcs everything is fine
        assert!(schwarz(c(0.5, 0.0), 1.0).is_ok());
        assert!(schwarz(c(-3.0, 0.0), 1.0).is_ok());
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let (t, th) = (0.1, std::f64::consts::FRAC_PI_2);
        let (dth, dt) = tangent_and_flow(t, th).unwrap();
        let h = 1e-5;
        let fd_th = central_difference(|s| curve_point(t, s), th, h, true).unwrap();
        let fd_t = central_difference(|s| curve_point(s, th), t, h, true).unwrap();
        assert!((fd_th - dth).norm() < 1e-6);
        assert!((fd_t - dt).norm() < 1e-6);
        assert_eq!(dt, Complex64::i() * dth);
    }

    #[test]
    fn inward_flow_on_positive_axis() {
        let (_, dt) = tangent_and_flow(1.0, 0.0).unwrap();
        assert!(dt.re < 0.0 && dt.im == 0.0);
        assert!(matches!(tangent_and_flow(0.0, 0.0), Err(Error::Singular(_))));
        for j in 0..32 {
            let (a, b) = tangent_and_flow(0.4, j as f64 * 0.2).unwrap();
            assert_eq!(a.norm(), b.norm());
        }
    }

    /// Curvature from second finite differences of the parametrization.
    fn fd_curvature(t: f64, th: f64) -> f64 {
        let h = 1e-4;
        let zm = curve_point(t, th - h).unwrap();
        let z0 = curve_point(t, th).unwrap();
        let zp = curve_point(t, th + h).unwrap();
        let d1 = (zp - zm) / (2.0 * h);
        let d2 = (zp - 2.0 * z0 + zm) / (h * h);
        (d1.conj() * d2).im.abs() / d1.norm().powi(3)
    }

    #[test]
    fn curvature_matches_finite_differences() {
        for &(t, th) in &[(0.4, 1.0), (0.1, 0.3), (1.0, 2.5), (0.0, 1.0)] {
            let k = curvature(t, th).unwrap();
            let fd = fd_curvature(t, th);
            assert!((k - fd).abs() < 1e-4 * k.max(1.0), "t={t} th={th}: {k} vs {fd}");
        }
        assert!(curvature(0.0, 0.0).is_err());
    }

    #[test]
    fn curvature_symmetry_and_asymptotics() {
        for j in 1..20 {
            let th = 0.3 * j as f64;
            let a = curvature(0.7, th).unwrap();
            let b = curvature(0.7, -th).unwrap();
            assert!((a - b).abs() < 1e-12 * a);
            let d = curvature_asymptotic(2.0, th) - curvature_asymptotic(2.0, th + PI);
            assert!(d.abs() < 1e-12);
        }
        let k = curvature(5.0, 0.0).unwrap();
        let a = 6f64.exp() + 0.5 * (-6f64).exp();
        assert!((k - a).abs() < 1e-2 * a);
    }

    #[test]
    fn schwarz_pde_probe() {
        let z = c(0.3, 0.2);
        let r1 = schwarz_pde_residual(z, 0.4, 1e-5).unwrap();
        assert!(r1 < 1e-6, "{r1}");
        let a = schwarz_pde_residual(z, 0.4, 2e-2).unwrap();
        let b = schwarz_pde_residual(z, 0.4, 1e-2).unwrap();
        let ratio = a / b;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn reflection_identity_and_involution() {
        let t = 0.4;
        let z = c(0.5, 0.1);
        let zs = reflect(z, t).unwrap();
        let lhs = z * (-z).exp() * zs.conj() * (-zs.conj()).exp();
        assert!((lhs - (-2.0 * (t + 1.0)).exp()).norm() < 1e-10 * lhs.norm());
        for j in 0..24 {
            let on = curve_point(t, 0.26 * j as f64 + 0.1).unwrap();
            assert!((reflect(on, t).unwrap() - on).norm() < 1e-12);
            for s in [0.9, 1.1] {
                let p = on * s;
                let back = reflect(reflect(p, t).unwrap(), t).unwrap();
                assert!((back - p).norm() < 1e-8, "{p}");
            }
        }
    }

    #[test]
    fn conformal_map_round_trips() {
        assert_eq!(forward_map(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(forward_map(c(1.0, 0.0)), c(1.0, 0.0));
        assert_eq!(inverse_map(c(0.0, 0.0), BranchIndex(0)).unwrap(), c(0.0, 0.0));
        let t = 0.6;
        for j in 0..16 {
            let th = 0.4 * j as f64;
            let z = curve_point(t, th).unwrap();
            assert!((forward_map(z).norm() - (-t as f64).exp()).abs() < 1e-12);
            let back = inverse_map(Complex64::from_polar((-t).exp(), th), BranchIndex(0)).unwrap();
            assert!((back - z).norm() < 1e-14);
        }
        for k in -3..=3 {
            let w = c(0.0, 0.5);
            let z = inverse_map(w, BranchIndex(k)).unwrap();
            assert!((forward_map(z) - w).norm() < 1e-12 * w.norm().max(1.0));
        }
        assert!(matches!(
            inverse_map(c(2.0, 0.0), BranchIndex(0)),
            Err(Error::OnCut(Cut::Sheet { k: 0 }))
        ));
        assert!(inverse_map(c(0.5, 0.0), BranchIndex(0)).is_ok());
        assert!(matches!(
            inverse_map(c(0.5, 0.0), BranchIndex(2)),
            Err(Error::OnCut(Cut::Sheet { k: 2 }))
        ));
    }

    #[test]
    fn bound_attained_at_theta_zero() {
        for &t in &[0.1, 0.4, 1.0] {
            let x0 = real_crossing(t);
            let curve = CurveId::new(t).unwrap();
            let max = curve
                .samples(512)
                .unwrap()
                .iter()
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            assert!(max <= x0 + 1e-12);
            assert!((curve.point(0.0).unwrap().norm() - x0).abs() < 1e-15);
        }
    }
}
