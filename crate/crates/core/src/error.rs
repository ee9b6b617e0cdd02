use std::fmt;

use thiserror::Error;

/// Branch cuts that can block evaluation of the Schwarz function or the
/// inverse conformal maps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cut {
    /// The logarithmic branch point at the origin.
    Origin,
    /// The real segment `[0, x1]`.
    RealInner { x1: f64 },
    /// The real ray `[x2, +inf)`.
    RealOuter { x2: f64 },
    /// Off-axis arc `z = y cot y + i y` starting at `y = 2 k pi` (negative `k`
    /// for the mirrored arc in the lower half-plane).
    OffAxis { k: i64 },
    /// Cut of `W_k(-w/e)` in the `w`-plane for the given sheet.
    Sheet { k: i64 },
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::Origin => write!(f, "logarithmic branch point z = 0"),
            Cut::RealInner { x1 } => write!(f, "real cut [0, {x1:.6}]"),
            Cut::RealOuter { x2 } => write!(f, "real cut [{x2:.6}, inf)"),
            Cut::OffAxis { k } => write!(f, "off-axis cut k = {k}"),
            Cut::Sheet { k } => write!(f, "w-plane cut of sheet k = {k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("point lies on the {0}")]
    OnCut(Cut),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("points {i} and {j} coincide")]
    Collision { i: usize, j: usize },

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
