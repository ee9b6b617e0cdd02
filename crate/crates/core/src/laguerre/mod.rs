//! Varying Laguerre polynomials `L_n^{(alpha_n)}(n z)`: evaluation, zeros
//! and their distance to `gamma_t`.
//!
//! The monomial form is catastrophically ill-conditioned in the regime of
//! interest (`alpha = -n - c`): at `n = 400` evaluating near the curve
//! cancels about 320 bits. Coefficients are therefore built in
//! multiprecision from the exact shift `c`, and the zero finder takes its
//! Newton ratios from multiprecision evaluation.

mod aberth;
mod mp;

use std::f64::consts::TAU;

use astro_float::BigFloat;
use log::warn;
use num_complex::Complex64;

use crate::curve::{check_t, curve_point, midpoint_grid};
use crate::error::{Error, Result};
use crate::numeric::golden_min;
use mp::{from_f64, from_int, log2_abs, MpPoly, RM};

/// The shift `c` in `alpha = -n - c`, kept exact even when it lies far below
/// the resolution of `alpha` in `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    Value(f64),
    /// `c = e^x`.
    Exp(f64),
}

impl Shift {
    /// Nearest `f64` to `c` (may underflow to zero for `Exp`).
    pub fn value(&self) -> f64 {
        match *self {
            Shift::Value(c) => c,
            Shift::Exp(x) => x.exp(),
        }
    }
}

/// Sequences `alpha_n = -n - c_n` from the convergence theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceSpec {
    /// `c_n = c` for every `n`; `c > 0` gives `gamma_0`, `c = 0` gives the
    /// point mass at the origin.
    ShiftC(f64),
    /// `c_n = e^{-t n}`, converging to `gamma_t`.
    RateT(f64),
}

impl SequenceSpec {
    pub fn shift(&self, n: usize) -> Result<Shift> {
        match *self {
            SequenceSpec::ShiftC(c) if c.is_finite() && c >= 0.0 => Ok(Shift::Value(c)),
            SequenceSpec::ShiftC(c) => Err(Error::InvalidArgument(format!(
                "shift c must be finite and >= 0, got {c}"
            ))),
            SequenceSpec::RateT(t) => {
                check_t(t)?;
                Ok(Shift::Exp(-t * n as f64))
            }
        }
    }

    pub fn alpha(&self, n: usize) -> Result<f64> {
        Ok(-(n as f64) - self.shift(n)?.value())
    }

    /// The curve the scaled zeros accumulate on, or `None` for the point mass.
    pub fn limit_t(&self) -> Option<f64> {
        match *self {
            SequenceSpec::ShiftC(c) if c == 0.0 => None,
            SequenceSpec::ShiftC(_) => Some(0.0),
            SequenceSpec::RateT(t) => Some(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub n: usize,
    /// `alpha` rounded to `f64`; see `shift` for the exact value.
    pub alpha: f64,
    pub shift: Option<Shift>,
    /// Zeros of `L_n^{(alpha)}(zeta)` in the `zeta` variable.
    pub zeros: Vec<Complex64>,
    /// Divide `zeros` by this to get the `z` variable.
    pub scale: f64,
    /// Worst backward error `|p(x)| / sum |b_k| |x|^k` of the monic scaled
    /// polynomial, checked at twice the working precision.
    pub residual: f64,
}

impl ZeroSet {
    /// Zeros in the `z` variable.
    pub fn scaled(&self) -> Vec<Complex64> {
        self.zeros.iter().map(|z| z / self.scale).collect()
    }

    /// `sum 1/zeta_i`, equal to `n/(alpha+1)` by Vieta.
    pub fn reciprocal_sum(&self) -> Complex64 {
        self.zeros.iter().map(|z| 1.0 / z).sum()
    }
}

/// `(L, L', L'')` of `L_n^{(alpha)}` at `zeta` by the three-term recurrence
/// and its derivatives, run in multiprecision: for negative `alpha` the
/// recurrence cancels badly in `f64` off the positive axis.
pub fn laguerre_eval_with_derivatives(
    n: usize,
    alpha: f64,
    zeta: Complex64,
) -> Result<[Complex64; 3]> {
    if !alpha.is_finite() || !zeta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} and zeta = {zeta} must be finite"
        )));
    }
    let p = working_precision(n);
    let zr = from_f64(zeta.re, p);
    let zi = from_f64(zeta.im, p);
    let al = from_f64(alpha, p);
    let zero = || mp::Complex::zero(p);
    let mut prev = [zero(), zero(), zero()];
    let mut cur = [mp::Complex::real(from_f64(1.0, p)), zero(), zero()];
    for k in 0..n {
        // a = 2k + 1 + alpha - zeta, b = k + alpha
        let ar = from_int(2 * k as i64 + 1, p).add(&al, p, RM).sub(&zr, p, RM);
        let a = mp::Complex { re: ar, im: zi.neg() };
        let b = from_int(k as i64, p).add(&al, p, RM);
        let inv = from_f64(1.0, p).div(&from_int(k as i64 + 1, p), p, RM);
        let step = |c: &mp::Complex, pv: &mp::Complex, lower: Option<(&mp::Complex, i64)>| {
            let mut v = a.mul(c, p).sub(&pv.scale(&b, p), p);
            if let Some((d, m)) = lower {
                v = v.sub(&d.scale(&from_int(m, p), p), p);
            }
            v.scale(&inv, p)
        };
        let next = [
            step(&cur[0], &prev[0], None),
            step(&cur[1], &prev[1], Some((&cur[0], 1))),
            step(&cur[2], &prev[2], Some((&cur[1], 2))),
        ];
        prev = std::mem::replace(&mut cur, next);
    }
    let out = [cur[0].to_f64(), cur[1].to_f64(), cur[2].to_f64()];
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow(format!(
            "L_{n}^({alpha}) overflows at zeta = {zeta}; evaluate in the scaled variable z = zeta/n"
        )));
    }
    Ok(out)
}

/// `L_n^{(alpha)}(zeta)` by the three-term recurrence in `n`.
pub fn laguerre_eval(n: usize, alpha: f64, zeta: Complex64) -> Result<Complex64> {
    Ok(laguerre_eval_with_derivatives(n, alpha, zeta)?[0])
}

/// `|zeta u'' + (alpha + 1 - zeta) u' + n u|` relative to the sum of the
/// magnitudes of its three terms.
pub fn ode_residual(n: usize, alpha: f64, zeta: Complex64) -> Result<f64> {
    let [u, du, ddu] = laguerre_eval_with_derivatives(n, alpha, zeta)?;
    let terms = [zeta * ddu, (alpha + 1.0 - zeta) * du, n as f64 * u];
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    let sum: Complex64 = terms.iter().sum();
    Ok(if scale == 0.0 { 0.0 } else { sum.norm() / scale })
}

enum AlphaRepr {
    Plain(f64),
    Shifted(Shift),
}

/// Multiprecision `alpha + m`.
fn alpha_plus(repr: &AlphaRepr, n: usize, m: i64, c_mp: &Option<BigFloat>, prec: usize) -> BigFloat {
    match repr {
        AlphaRepr::Plain(a) => from_f64(*a, prec).add(&from_int(m, prec), prec, RM),
        AlphaRepr::Shifted(_) => from_int(m - n as i64, prec).sub(
            c_mp.as_ref().expect("shift materialized"),
            prec,
            RM,
        ),
    }
}

/// Monic coefficients of `L_n^{(alpha)}(n x)` in `x`, lowest degree first:
/// `b_n = 1`, `b_k = -b_{k+1} (k+1)(alpha+k+1) / ((n-k) n)`.
fn scaled_monic(n: usize, repr: &AlphaRepr, prec: usize) -> Result<Vec<BigFloat>> {
    let c_mp = match repr {
        AlphaRepr::Shifted(Shift::Value(c)) => Some(from_f64(*c, prec)),
        AlphaRepr::Shifted(Shift::Exp(x)) => Some(mp::exp(*x, prec)?),
        AlphaRepr::Plain(_) => None,
    };
    let nn = from_int(n as i64, prec);
    let mut coeffs = vec![from_f64(0.0, prec); n + 1];
    coeffs[n] = from_f64(1.0, prec);
    for k in (0..n).rev() {
        let num = alpha_plus(repr, n, k as i64 + 1, &c_mp, prec).mul(&from_int(k as i64 + 1, prec), prec, RM);
        let den = from_int((n - k) as i64, prec).mul(&nn, prec, RM);
        coeffs[k] = coeffs[k + 1].mul(&num, prec, RM).div(&den, prec, RM).neg();
    }
    Ok(coeffs)
}

fn working_precision(n: usize) -> usize {
    (128 + 2 * n).div_ceil(64) * 64
}

fn zeros_impl(n: usize, repr: AlphaRepr) -> Result<(Vec<Complex64>, f64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let prec = working_precision(n);
    let coeffs = scaled_monic(n, &repr, prec)?;
    // b_k = 0 forces every lower coefficient to vanish: exact zeros at 0
    let n_zero = coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); n_zero];
    let reduced = &coeffs[n_zero..];
    let m = reduced.len() - 1;
    if m == 0 {
        return Ok((roots, 0.0));
    }
    // rescale x = 2^s y so that the roots are of order one in y
    let bound = (0..m)
        .map(|k| log2_abs(&reduced[k]) / (m - k) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    let s = if bound.is_finite() { bound.round() as i32 } else { 0 };
    let two_s = from_f64(2f64.powi(s), prec);
    let mut scaled = reduced.to_vec();
    let mut factor = from_f64(1.0, prec);
    for k in (0..m).rev() {
        factor = factor.mul(&two_s, prec, RM);
        scaled[k] = scaled[k].div(&factor, prec, RM);
    }
    let poly = MpPoly {
        coeffs: scaled,
        prec,
    };
    let mut y = if m == 1 {
        vec![Complex64::new(-mp::to_f64(&poly.coeffs[0]), 0.0)]
    } else {
        let mut y = aberth::initial_guesses(&poly);
        aberth::phase_f64(&poly.to_f64(), &mut y);
        aberth::phase_mp(&poly, &mut y)?;
        y
    };
    let check = poly.with_precision(2 * prec);
    let residual = y.iter().map(|&v| check.backward_error(v)).fold(0.0, f64::max);
    if !(residual < 1e-10) {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual,
        });
    }
    warn_if_clustered(&y);
    let back = 2f64.powi(s) * n as f64;
    roots.extend(y.iter_mut().map(|v| *v * back));
    Ok((roots, residual))
}

fn warn_if_clustered(roots: &[Complex64]) {
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < 1e-8 * roots[i].norm().max(1.0) {
                warn!("clustered zeros {} and {} at distance {:e}", roots[i], roots[j], (roots[i] - roots[j]).norm());
                return;
            }
        }
    }
}

/// Zeros of `L_n^{(alpha)}` for a plain `f64` parameter.
pub fn laguerre_zeros(n: usize, alpha: f64) -> Result<ZeroSet> {
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite, got {alpha}")));
    }
    let (zeros, residual) = zeros_impl(n, AlphaRepr::Plain(alpha))?;
    Ok(ZeroSet {
        n,
        alpha,
        shift: None,
        zeros,
        scale: 1.0,
        residual,
    })
}

/// Zeros of `L_n^{(-n-c)}` with `c` carried exactly.
pub fn laguerre_zeros_shifted(n: usize, shift: Shift) -> Result<ZeroSet> {
    let c = shift.value();
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("shift must be finite, got {shift:?}")));
    }
    let (zeros, residual) = zeros_impl(n, AlphaRepr::Shifted(shift))?;
    Ok(ZeroSet {
        n,
        alpha: -(n as f64) - c,
        shift: Some(shift),
        zeros,
        scale: 1.0,
        residual,
    })
}

/// Zeros of `L_n^{(alpha_n)}(n z)`: `scale = n`.
pub fn scaled_zeros(spec: SequenceSpec, n: usize) -> Result<ZeroSet> {
    let mut set = laguerre_zeros_shifted(n, spec.shift(n)?)?;
    set.scale = n as f64;
    Ok(set)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveDistance {
    pub max_dist: f64,
    pub mean_dist: f64,
    /// Per-zero distance, in the order of `ZeroSet::scaled`.
    pub distances: Vec<f64>,
}

const DISTANCE_GRID: usize = 2048;

/// Distance from each scaled zero to `gamma_t`: nearest point of a
/// 2048-point grid, refined by golden-section search.
pub fn zero_curve_distance(zs: &ZeroSet, t: f64) -> Result<CurveDistance> {
    let points: Vec<Complex64> = zs.scaled();
    distance_to_curve(&points, t)
}

pub fn distance_to_curve(points: &[Complex64], t: f64) -> Result<CurveDistance> {
    check_t(t)?;
    let grid: Vec<(f64, Complex64)> = midpoint_grid(DISTANCE_GRID)
        .map(|th| Ok((th, curve_point(t, th)?)))
        .collect::<Result<_>>()?;
    let h = TAU / DISTANCE_GRID as f64;
    let distances: Vec<f64> = points
        .iter()
        .map(|&z| {
            let (th, d0) = grid
                .iter()
                .map(|&(th, c)| (th, (z - c).norm()))
                .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let f = |s: f64| curve_point(t, s).map_or(f64::INFINITY, |c| (z - c).norm());
            let (_, d) = golden_min(f, th - h, th + h, 80);
            d.min(d0)
        })
        .collect();
    let max_dist = distances.iter().copied().fold(0.0, f64::max);
    let mean_dist = if distances.is_empty() {
        0.0
    } else {
        distances.iter().sum::<f64>() / distances.len() as f64
    };
    Ok(CurveDistance {
        max_dist,
        mean_dist,
        distances,
    })
}
