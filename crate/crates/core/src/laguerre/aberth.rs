//! Aberth-Ehrlich simultaneous iteration. A cheap `f64` phase brings the
//! approximations close; the second phase keeps positions in `f64` but takes
//! every Newton ratio from a multiprecision Horner evaluation, which is what
//! makes high degrees reachable at all.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::mp::{log2_abs, MpPoly};
use crate::error::{Error, Result};

const F64_SWEEPS: usize = 400;
const MP_SWEEPS: usize = 120;

fn horner_f64(coeffs: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[coeffs.len() - 1], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev().skip(1) {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

fn aberth_sum(roots: &[Complex64], i: usize) -> Complex64 {
    let xi = roots[i];
    roots
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &xj)| 1.0 / (xi - xj))
        .sum()
}

/// Initial approximations on a circle whose radius is the geometric mean of
/// the root moduli, rotated off the real axis.
pub(crate) fn initial_guesses(poly: &MpPoly) -> Vec<Complex64> {
    let m = poly.degree();
    let lead = log2_abs(&poly.coeffs[m]);
    let r = 2f64.powf((log2_abs(&poly.coeffs[0]) - lead) / m as f64);
    (0..m)
        .map(|j| Complex64::from_polar(r, TAU * (j as f64 + 0.25) / m as f64 + 0.4))
        .collect()
}

/// `f64` phase. Evaluations may be meaningless where cancellation is
/// severe; the phase only needs to land in the right neighborhood.
pub(crate) fn phase_f64(coeffs: &[f64], roots: &mut [Complex64]) {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return;
    }
    for _ in 0..F64_SWEEPS {
        let mut max_rel: f64 = 0.0;
        for i in 0..roots.len() {
            let (p, dp) = horner_f64(coeffs, roots[i]);
            let ratio = p / dp;
            if !ratio.is_finite() {
                continue;
            }
            let w = ratio / (1.0 - ratio * aberth_sum(roots, i));
            if !w.is_finite() {
                continue;
            }
            roots[i] -= w;
            max_rel = max_rel.max(w.norm() / roots[i].norm().max(f64::MIN_POSITIVE));
        }
        if max_rel < 1e-14 {
            break;
        }
    }
}

/// Multiprecision phase. Each root is frozen once its correction drops to
/// the rounding level of its `f64` position.
pub(crate) fn phase_mp(poly: &MpPoly, roots: &mut [Complex64]) -> Result<()> {
    let m = roots.len();
    let mut done = vec![false; m];
    let mut worst = f64::INFINITY;
    for _ in 0..MP_SWEEPS {
        worst = 0.0;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let ratio = poly.eval(roots[i]).ratio;
            if !ratio.is_finite() {
                // p' vanished or overflowed: nudge and retry next sweep
                roots[i] *= Complex64::from_polar(1.0 + 1e-9, 1e-9);
                worst = f64::INFINITY;
                continue;
            }
            let w = ratio / (1.0 - ratio * aberth_sum(roots, i));
            let w = if w.is_finite() { w } else { ratio };
            roots[i] -= w;
            let rel = w.norm() / roots[i].norm().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            if rel <= 4.0 * f64::EPSILON {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(());
        }
    }
    Err(Error::NoConvergence {
        iterations: MP_SWEEPS,
        residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::super::mp::{from_f64, MpPoly};
    use super::*;

    #[test]
    fn quartic_roots() {
        // (x - 1)(x + 2)(x^2 + 9)
        let coeffs = [-18.0, 9.0, 7.0, 1.0, 1.0];
        let poly = MpPoly {
            coeffs: coeffs.iter().map(|&c| from_f64(c, 192)).collect(),
            prec: 192,
        };
        let mut roots = initial_guesses(&poly);
        phase_f64(&coeffs, &mut roots);
        phase_mp(&poly, &mut roots).unwrap();
        let mut expect = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-2.0, 0.0),
            Complex64::new(0.0, 3.0),
            Complex64::new(0.0, -3.0),
        ];
        for z in roots {
            let (k, d) = expect
                .iter()
                .enumerate()
                .map(|(k, e)| (k, (e - z).norm()))
                .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            assert!(d < 1e-14, "{z}");
            expect.remove(k);
        }
    }
}
