//! Multi-branch complex Lambert W.
//!
//! Branch layout follows the usual convention: `W_0` is real on
//! `[-1/e, inf)`, `W_{-1}` is real on `[-1/e, 0)`, and every branch takes its
//! value on a cut from the upper half-plane ("counter-clockwise continuity").
//! Callers that need the lower side of a cut evaluate at `conj(z)` on branch
//! `-k` and conjugate the result.
//!
//! Evaluation is a Halley iteration on `w - z e^{-w}`, seeded by a branch
//! point expansion near `-1/e`, a Padé approximant near the origin, or the
//! asymptotic `log z + 2 pi i k - log(log z + 2 pi i k)` elsewhere.

use std::f64::consts::{E, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `1/e`, the location of the branch point shared by `W_0` and `W_{-1}`.
pub const INV_E: f64 = 0.367_879_441_171_442_33;

/// Inputs this close to `-1/e` evaluate to exactly `-1` on the branches that
/// meet there.
pub const BRANCH_POINT_SNAP: f64 = 1e-12;

const EPS: f64 = f64::EPSILON;

/// Index `k` of a Lambert W branch; `0` is the principal branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BranchIndex(pub i64);

impl BranchIndex {
    pub const PRINCIPAL: BranchIndex = BranchIndex(0);
    pub const LOWER: BranchIndex = BranchIndex(-1);
}

impl From<i64> for BranchIndex {
    fn from(k: i64) -> Self {
        BranchIndex(k)
    }
}

/// A converged Lambert W value with its functional-equation residual
/// `|w e^w - z|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WEval {
    pub value: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LambertOptions {
    /// Accepted residual `|w e^w - z| / max(1, |z|)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LambertOptions {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            max_iter: 64,
        }
    }
}

/// Principal branch `W_0(z)`.
pub fn w_principal(z: Complex64) -> Result<WEval> {
    w_branch(BranchIndex::PRINCIPAL, z)
}

/// Branch `W_k(z)` with default options.
pub fn w_branch(k: BranchIndex, z: Complex64) -> Result<WEval> {
    w_branch_with(k, z, &LambertOptions::default())
}

pub fn w_branch_with(k: BranchIndex, z: Complex64, opts: &LambertOptions) -> Result<WEval> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    // -0.0 imaginary parts belong to the upper side of any cut.
    let z = Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
    let k = k.0;

    if z.re == 0.0 && z.im == 0.0 {
        return if k == 0 {
            Ok(WEval {
                value: Complex64::new(0.0, 0.0),
                residual: 0.0,
                iterations: 0,
            })
        } else {
            Err(Error::Domain(format!("W_{k}(0) is not finite")))
        };
    }

    let meets_branch_point = k == 0 || (k == -1 && z.im >= 0.0) || (k == 1 && z.im < 0.0);
    if meets_branch_point && (z + INV_E).norm() <= BRANCH_POINT_SNAP {
        let w = Complex64::new(-1.0, 0.0);
        return Ok(WEval {
            value: w,
            residual: (w * w.exp() - z).norm(),
            iterations: 0,
        });
    }

    if z.im == 0.0 {
        let x = z.re;
        if k == 0 && x >= -INV_E {
            return real_halley(x, real_seed_principal(x), opts);
        }
        if k == -1 && (-INV_E..0.0).contains(&x) {
            return real_halley(x, real_seed_lower(x), opts);
        }
    }

    complex_halley(z, complex_seed(k, z), opts)
}

/// Derivative `W_k'(z) = e^{-W_k(z)} / (1 + W_k(z))`.
pub fn w_derivative(k: BranchIndex, z: Complex64) -> Result<Complex64> {
    let w = w_branch(k, z)?.value;
    let one_plus = w + 1.0;
    if one_plus.norm() < 1e-12 {
        return Err(Error::Singular(format!(
            "W_{}'(z) diverges at the branch point z = {z}",
            k.0
        )));
    }
    Ok((-w).exp() / one_plus)
}

/// Partial sum of the Taylor series of `W_0` about the origin, up to and
/// including the `z^{n_max}` term.
pub fn w_series(z: Complex64, n_max: usize) -> Result<Complex64> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if z.norm() >= INV_E {
        return Err(Error::Domain(format!(
            "|z| = {} is outside the disk of convergence |z| < 1/e",
            z.norm()
        )));
    }
    // t_{n+1} / t_n = -z (1 + 1/n)^{n-1}
    let mut term = z;
    let mut sum = z;
    for n in 1..n_max {
        let nf = n as f64;
        let growth = ((nf - 1.0) * (1.0 / nf).ln_1p()).exp();
        term = -term * z * growth;
        sum += term;
    }
    Ok(sum)
}

/// Principal branch value, discarding diagnostics.
pub(crate) fn w0(z: Complex64) -> Result<Complex64> {
    w_principal(z).map(|e| e.value)
}

pub(crate) fn wk(k: i64, z: Complex64) -> Result<Complex64> {
    w_branch(BranchIndex(k), z).map(|e| e.value)
}

fn accept(z: Complex64, w: Complex64, iterations: usize, opts: &LambertOptions) -> Result<WEval> {
    let residual = (w * w.exp() - z).norm();
    if residual <= opts.tol * z.norm().max(1.0) {
        Ok(WEval {
            value: w,
            residual,
            iterations,
        })
    } else {
        Err(Error::NoConvergence {
            iterations,
            residual,
        })
    }
}

fn complex_halley(z: Complex64, seed: Complex64, opts: &LambertOptions) -> Result<WEval> {
    let mut w = seed;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let f = w - z * (-w).exp();
        let two_w_two = 2.0 * w + 2.0;
        let denom = if two_w_two.norm() == 0.0 {
            w + 1.0
        } else {
            w + 1.0 - (w + 2.0) * f / two_w_two
        };
        let next = w - f / denom;
        if !next.re.is_finite() || !next.im.is_finite() {
            break;
        }
        let step = (next - w).norm();
        w = next;
        if step <= 4.0 * EPS * w.norm() {
            break;
        }
    }
    accept(z, w, iterations, opts)
}

fn real_halley(x: f64, seed: f64, opts: &LambertOptions) -> Result<WEval> {
    let mut w = seed;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let f = w - x * (-w).exp();
        let two_w_two = 2.0 * w + 2.0;
        let denom = if two_w_two == 0.0 {
            w + 1.0
        } else {
            w + 1.0 - (w + 2.0) * f / two_w_two
        };
        let next = w - f / denom;
        if !next.is_finite() {
            break;
        }
        let step = (next - w).abs();
        w = next;
        if step <= 4.0 * EPS * w.abs() {
            break;
        }
    }
    accept(Complex64::new(x, 0.0), Complex64::new(w, 0.0), iterations, opts)
}

/// `z (1 + 19/10 z + 17/60 z^2) / (1 + 29/10 z + 101/60 z^2)`, the [3/2]
/// Padé approximant of `W_0` at the origin.
fn pade0<T>(z: T) -> T
where
    T: Copy
        + std::ops::Add<f64, Output = T>
        + std::ops::Mul<T, Output = T>
        + std::ops::Mul<f64, Output = T>
        + std::ops::Div<T, Output = T>,
{
    let num = (z * (17.0 / 60.0) + 1.9) * z + 1.0;
    let den = (z * (101.0 / 60.0) + 2.9) * z + 1.0;
    z * num / den
}

/// Expansion of the branches meeting at `-1/e` in `p = sqrt(2(e z + 1))`;
/// `sign = +1` gives `W_0`, `sign = -1` the other sheet.
fn branch_point_series(p: Complex64, sign: f64) -> Complex64 {
    let p = p * sign;
    -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
}

fn asymptotic_seed(k: i64, z: Complex64) -> Complex64 {
    let l1 = z.ln() + Complex64::new(0.0, 2.0 * PI * k as f64);
    let l2 = l1.ln();
    l1 - l2 + l2 / l1
}

fn complex_seed(k: i64, z: Complex64) -> Complex64 {
    let near_branch_point = (z + INV_E).norm() < 0.3;
    let p = (2.0 * (E * z + 1.0)).sqrt();
    match k {
        0 => {
            if near_branch_point {
                branch_point_series(p, 1.0)
            } else if z.re > -1.0 && z.re < 1.5 && z.im.abs() < 1.0 && z.re > -2.5 * z.im.abs() - 0.2
            {
                pade0(z)
            } else {
                asymptotic_seed(0, z)
            }
        }
        -1 if near_branch_point && z.im >= 0.0 => branch_point_series(p, -1.0),
        1 if near_branch_point && z.im < 0.0 => branch_point_series(p, -1.0),
        _ => asymptotic_seed(k, z),
    }
}

fn real_seed_principal(x: f64) -> f64 {
    if x < -INV_E + 0.3 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + p * p * p * (11.0 / 72.0)
    } else if x < 1.5 {
        pade0(x)
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn real_seed_lower(x: f64) -> f64 {
    if x < -INV_E + 0.3 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 - p - p * p / 3.0 - p * p * p * (11.0 / 72.0)
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}
