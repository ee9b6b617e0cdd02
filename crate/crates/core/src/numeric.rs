//! Small numerical building blocks shared by the curve, field and penner
//! modules: bracketed root finding, 1-D minimization, adaptive quadrature,
//! finite differences and an embedded Runge-Kutta pair.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bisection on a sign change of `f` over `[lo, hi]`, run until the bracket
/// stops shrinking in floating point.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (f_lo, f_hi) = (f(a), f(b));
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket {
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }
    if f_lo == 0.0 {
        return Ok(a);
    }
    if f_hi == 0.0 {
        return Ok(b);
    }
    let negative_at_a = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == negative_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 7/15-point Gauss-Kronrod panel: `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Adaptive Gauss-Kronrod quadrature with bisection; tolerates integrable
/// endpoint singularities such as `log|x|`. The per-panel tolerance halves
/// with each split but never drops below the panel's own rounding level.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if !value.is_finite() {
            return value;
        }
        if err <= tol.max(64.0 * f64::EPSILON * value.abs()) || depth == 0 {
            return value;
        }
        let mid = 0.5 * (a + b);
        recurse(f, a, mid, 0.5 * tol, depth - 1) + recurse(f, mid, b, 0.5 * tol, depth - 1)
    }
    recurse(&f, a, b, tol, 40)
}

/// Central difference of a complex-valued function of a real variable, with
/// one optional Richardson extrapolation step (`h` and `h/2`).
pub fn central_difference<F>(f: F, x: f64, h: f64, richardson: bool) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let d = |h: f64| -> Result<Complex64> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    if !richardson {
        return Ok(coarse);
    }
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Dormand-Prince 5(4) step for a planar field written as a complex ODE
/// `z' = f(z)`. Returns the 5th-order solution and the embedded error
/// estimate.
pub fn dopri5_step<F: Fn(Complex64) -> Complex64>(f: &F, z: Complex64, h: f64) -> (Complex64, f64) {
    let k1 = f(z);
    let k2 = f(z + h * (k1 * (1.0 / 5.0)));
    let k3 = f(z + h * (k1 * (3.0 / 40.0) + k2 * (9.0 / 40.0)));
    let k4 = f(z + h * (k1 * (44.0 / 45.0) - k2 * (56.0 / 15.0) + k3 * (32.0 / 9.0)));
    let k5 = f(z + h
        * (k1 * (19372.0 / 6561.0) - k2 * (25360.0 / 2187.0) + k3 * (64448.0 / 6561.0)
            - k4 * (212.0 / 729.0)));
    let k6 = f(z + h
        * (k1 * (9017.0 / 3168.0) - k2 * (355.0 / 33.0)
            + k3 * (46732.0 / 5247.0)
            + k4 * (49.0 / 176.0)
            - k5 * (5103.0 / 18656.0)));
    let incr = k1 * (35.0 / 384.0) + k3 * (500.0 / 1113.0) + k4 * (125.0 / 192.0)
        - k5 * (2187.0 / 6784.0)
        + k6 * (11.0 / 84.0);
    let z5 = z + h * incr;
    let k7 = f(z5);
    let err = h
        * (k1 * (71.0 / 57600.0) - k3 * (71.0 / 16695.0) + k4 * (71.0 / 1920.0)
            - k5 * (17253.0 / 339200.0)
            + k6 * (22.0 / 525.0)
            - k7 * (1.0 / 40.0));
    (z5, err.norm())
}

/// Classical fixed-step RK4.
pub fn rk4_step<F: Fn(Complex64) -> Complex64>(f: &F, z: Complex64, h: f64) -> Complex64 {
    let k1 = f(z);
    let k2 = f(z + 0.5 * h * k1);
    let k3 = f(z + 0.5 * h * k2);
    let k4 = f(z + h * k3);
    z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, `O(n^3)`). Returns `assignment[row] = column`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based rows/columns; column 0 is the virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            assignment[row_of[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bisect_reports_bad_bracket() {
        match bisect(|x| x * x + 1.0, -1.0, 1.0) {
            Err(Error::Bracket { f_lo, f_hi, .. }) => {
                assert_eq!(f_lo, 2.0);
                assert_eq!(f_hi, 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kronrod_panel_is_exact_for_polynomials() {
        let (v, _) = gk15(&|x: f64| x.powi(20) + 3.0 * x.powi(7), -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_log_singularity() {
        // int_0^1 ln x dx = -1
        let v = integrate_adaptive(|x: f64| x.ln(), 0.0, 1.0, 1e-13);
        assert!((v + 1.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn golden_section_minimum() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 80);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn richardson_improves_central_difference() {
        let f = |x: f64| Ok(Complex64::new(x.sin(), x.exp()));
        let exact = Complex64::new(1f64.cos(), 1f64.exp());
        let plain = central_difference(f, 1.0, 1e-2, false).unwrap();
        let rich = central_difference(f, 1.0, 1e-2, true).unwrap();
        assert!((rich - exact).norm() < (plain - exact).norm() * 1e-2);
    }

    #[test]
    fn dopri_rotation_keeps_radius() {
        let f = |z: Complex64| Complex64::i() * z;
        let mut z = Complex64::new(1.0, 0.0);
        let h = 0.01;
        for _ in 0..628 {
            let (next, err) = dopri5_step(&f, z, h);
            assert!(err < 1e-12);
            z = next;
        }
        assert!((z.norm() - 1.0).abs() < 1e-12);
        assert!((z - Complex64::from_polar(1.0, 6.28)).norm() < 1e-11);
    }

    #[test]
    fn assignment_picks_cheapest_permutation() {
        let cost = vec![
            vec![4.0, 1.0, 3.0],
            vec![2.0, 0.0, 5.0],
            vec![3.0, 2.0, 2.0],
        ];
        let a = min_cost_assignment(&cost);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert_eq!(total, 5.0);
        assert_eq!(a, vec![1, 0, 2]);
    }
}
