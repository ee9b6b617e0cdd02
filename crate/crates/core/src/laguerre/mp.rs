//! Multiprecision helpers on top of `astro_float`: real/complex values,
//! conversion back to `f64`, and Horner evaluation of a real polynomial at a
//! complex point.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) fn from_f64(x: f64, prec: usize) -> BigFloat {
    BigFloat::from_f64(x, prec)
}

pub(crate) fn from_int(k: i64, prec: usize) -> BigFloat {
    // exact for |k| < 2^53, which covers every degree we handle
    BigFloat::from_f64(k as f64, prec)
}

pub(crate) fn exp(x: f64, prec: usize) -> Result<BigFloat> {
    let mut cc = Consts::new().map_err(|e| Error::Numeric(format!("constant cache: {e:?}")))?;
    Ok(from_f64(x, prec).exp(prec, RM, &mut cc))
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Nearest `f64` (to within one ulp; lower mantissa words are dropped).
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let Some(&top) = words.last() else {
        return 0.0;
    };
    if top == 0 {
        return 0.0;
    }
    // value = 0.m * 2^e with the most significant word last
    let v = ldexp(top as f64, e as i64 - 64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// `log2 |x|`, or `-inf` for zero.
pub(crate) fn log2_abs(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        Some((words, _, _, e, _)) => match words.last() {
            Some(&top) if top != 0 => (top as f64).log2() - 64.0 + e as f64,
            _ => f64::NEG_INFINITY,
        },
        None => f64::NAN,
    }
}

/// Complex number with multiprecision parts.
#[derive(Clone)]
pub(crate) struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn zero(prec: usize) -> Complex {
        Complex {
            re: from_f64(0.0, prec),
            im: from_f64(0.0, prec),
        }
    }

    pub fn real(re: BigFloat) -> Complex {
        let prec = re.precision().unwrap_or(64);
        Complex {
            re,
            im: from_f64(0.0, prec),
        }
    }

    pub fn mul(&self, o: &Complex, p: usize) -> Complex {
        Complex {
            re: self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM),
            im: self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM),
        }
    }

    pub fn sub(&self, o: &Complex, p: usize) -> Complex {
        Complex {
            re: self.re.sub(&o.re, p, RM),
            im: self.im.sub(&o.im, p, RM),
        }
    }

    pub fn scale(&self, s: &BigFloat, p: usize) -> Complex {
        Complex {
            re: self.re.mul(s, p, RM),
            im: self.im.mul(s, p, RM),
        }
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

/// Polynomial with real multiprecision coefficients, lowest degree first.
pub(crate) struct MpPoly {
    pub coeffs: Vec<BigFloat>,
    pub prec: usize,
}

pub(crate) struct HornerOut {
    pub p: Complex64,
    /// `p / p'` computed before rounding to `f64`.
    pub ratio: Complex64,
}

impl MpPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Same coefficients rounded to a new working precision.
    pub fn with_precision(&self, prec: usize) -> MpPoly {
        MpPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    let _ = c.set_precision(prec, RM);
                    c
                })
                .collect(),
            prec,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    /// `p(x)`, `p'(x)` and `p(x)/p'(x)` by complex Horner in working
    /// precision.
    pub fn eval(&self, x: Complex64) -> HornerOut {
        let p = self.prec;
        let xr = from_f64(x.re, p);
        let xi = from_f64(x.im, p);
        let zero = from_f64(0.0, p);
        let (mut pr, mut pi) = (self.coeffs[self.degree()].clone(), zero.clone());
        let (mut dr, mut di) = (zero.clone(), zero);
        for c in self.coeffs.iter().rev().skip(1) {
            // dp = dp x + p
            let ndr = dr.mul(&xr, p, RM).sub(&di.mul(&xi, p, RM), p, RM).add(&pr, p, RM);
            let ndi = dr.mul(&xi, p, RM).add(&di.mul(&xr, p, RM), p, RM).add(&pi, p, RM);
            dr = ndr;
            di = ndi;
            // p = p x + c
            let npr = pr.mul(&xr, p, RM).sub(&pi.mul(&xi, p, RM), p, RM).add(c, p, RM);
            let npi = pr.mul(&xi, p, RM).add(&pi.mul(&xr, p, RM), p, RM);
            pr = npr;
            pi = npi;
        }
        // p / dp = p conj(dp) / |dp|^2
        let den = dr.mul(&dr, p, RM).add(&di.mul(&di, p, RM), p, RM);
        let ratio = if den.is_zero() {
            Complex64::new(f64::NAN, f64::NAN)
        } else {
            let nr = pr.mul(&dr, p, RM).add(&pi.mul(&di, p, RM), p, RM);
            let ni = pi.mul(&dr, p, RM).sub(&pr.mul(&di, p, RM), p, RM);
            Complex64::new(to_f64(&nr.div(&den, p, RM)), to_f64(&ni.div(&den, p, RM)))
        };
        HornerOut {
            p: Complex64::new(to_f64(&pr), to_f64(&pi)),
            ratio,
        }
    }

    /// Backward error `|p(x)| / sum |c_k| |x|^k`.
    pub fn backward_error(&self, x: Complex64) -> f64 {
        let p = self.prec;
        let out = self.eval(x);
        let r = from_f64(x.norm(), p);
        let mut scale = from_f64(0.0, p);
        for c in self.coeffs.iter().rev() {
            scale = scale.mul(&r, p, RM).add(&c.abs(), p, RM);
        }
        // |p| may be far outside f64 range relative to the scale; divide in
        // log space
        let lp = out_log2_norm(&self.eval_p_only(x));
        let ls = log2_abs(&scale);
        if !lp.is_finite() {
            return if out.p.norm() == 0.0 { 0.0 } else { f64::INFINITY };
        }
        2f64.powf(lp - ls)
    }

    fn eval_p_only(&self, x: Complex64) -> (BigFloat, BigFloat) {
        let p = self.prec;
        let xr = from_f64(x.re, p);
        let xi = from_f64(x.im, p);
        let (mut pr, mut pi) = (self.coeffs[self.degree()].clone(), from_f64(0.0, p));
        for c in self.coeffs.iter().rev().skip(1) {
            let npr = pr.mul(&xr, p, RM).sub(&pi.mul(&xi, p, RM), p, RM).add(c, p, RM);
            let npi = pr.mul(&xi, p, RM).add(&pi.mul(&xr, p, RM), p, RM);
            pr = npr;
            pi = npi;
        }
        (pr, pi)
    }
}

fn out_log2_norm((re, im): &(BigFloat, BigFloat)) -> f64 {
    let a = log2_abs(re);
    let b = log2_abs(im);
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + 0.5 * (2f64.powf(2.0 * (a - m)) + 2f64.powf(2.0 * (b - m))).log2()
}
