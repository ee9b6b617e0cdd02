use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lambert::{w0, wk};
use crate::numeric::bisect;

use super::check_t;

/// One off-axis cut of the Schwarz function, the arc `z = y cot y + i y` for
/// `y` between `y_start = 2 k pi` (where the arc runs off to infinity) and the
/// branch point at `y_end`. Negative `k` is the mirror image in the lower
/// half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffAxisCut {
    pub k: i64,
    pub y_start: f64,
    pub y_end: f64,
}

impl OffAxisCut {
    pub fn point(&self, y: f64) -> Complex64 {
        quadratrix_point(y)
    }

    pub fn branch_point(&self) -> Complex64 {
        quadratrix_point(self.y_end)
    }
}

/// Branch cuts of `S(z, t)`: `[0, x1]`, `[x2, inf)` and the off-axis arcs
/// for `1 <= |k| <= k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSet {
    pub t: f64,
    pub x1: f64,
    pub x2: f64,
    pub off_axis: Vec<OffAxisCut>,
}

/// `y cot y + i y`, with the removable point `y = 0` mapped to `1`.
pub fn quadratrix_point(y: f64) -> Complex64 {
    if y == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(y / y.tan(), y)
    }
}

/// Relative residual of `e^{y cot y} sin(y)/y = e^{2t+1}`.
pub fn branch_point_residual(y: f64, t: f64) -> f64 {
    ((y / y.tan() + (y.sin() / y).ln() - (2.0 * t + 1.0)).exp() - 1.0).abs()
}

pub fn analyticity_cuts(t: f64, k_max: usize) -> Result<CutSet> {
    check_t(t)?;
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let arg = Complex64::new(-(-(2.0 * t + 1.0)).exp(), 0.0);
    let x1 = -w0(arg)?.re;
    let x2 = -wk(-1, arg)?.re;
    let rhs = 2.0 * t + 1.0;
    let mut off_axis = Vec::with_capacity(2 * k_max);
    for k in 1..=k_max as i64 {
        let a = 2.0 * k as f64 * PI;
        let b = a + PI;
        // log form: +inf just above 2k pi, -inf just below (2k+1) pi
        let g = |y: f64| y / y.tan() + (y.sin() / y).ln() - rhs;
        let margin = 1e-9 * b;
        let y = bisect(g, a + margin, b - margin)?;
        off_axis.push(OffAxisCut {
            k,
            y_start: a,
            y_end: y,
        });
        off_axis.push(OffAxisCut {
            k: -k,
            y_start: -a,
            y_end: -y,
        });
    }
    Ok(CutSet {
        t,
        x1,
        x2,
        off_axis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratrixKind {
    /// Arc over `y in (-pi, pi)` for `j = 0`, otherwise over
    /// `(2 j pi, (2 j + 1) pi)` (negative `j` mirrored).
    Arc { j: i64 },
    /// The ray `[1, inf)` of the real axis.
    RealRay,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratrixPath {
    pub kind: QuadratrixKind,
    pub points: Vec<Complex64>,
}

/// Boundaries of the univalence regions of `z e^{1-z}` for sheets
/// `|k| <= k_range`: the central arc through `z = 1`, one arc pair per
/// `j = 1..=k_range`, and the ray `[1, inf)`. Arcs are sampled on midpoint
/// grids, so the points stay finite although each arc runs off to infinity.
pub fn quadratrix_samples(k_range: usize, n_per_arc: usize) -> Vec<QuadratrixPath> {
    let sample = |a: f64, b: f64| -> Vec<Complex64> {
        (0..n_per_arc)
            .map(|i| quadratrix_point(a + (b - a) * ((i as f64 + 0.5) / n_per_arc as f64)))
            .collect()
    };
    let mut paths = vec![QuadratrixPath {
        kind: QuadratrixKind::Arc { j: 0 },
        points: sample(-PI, PI),
    }];
    for j in 1..=k_range as i64 {
        let a = 2.0 * j as f64 * PI;
        paths.push(QuadratrixPath {
            kind: QuadratrixKind::Arc { j },
            points: sample(a, a + PI),
        });
        paths.push(QuadratrixPath {
            kind: QuadratrixKind::Arc { j: -j },
            points: sample(-a - PI, -a),
        });
    }
    let reach = 2.0 * PI * (k_range as f64 + 1.0);
    let n_ray = n_per_arc.max(2);
    paths.push(QuadratrixPath {
        kind: QuadratrixKind::RealRay,
        points: (0..n_ray)
            .map(|i| Complex64::new(1.0 + reach * i as f64 / (n_ray - 1) as f64, 0.0))
            .collect(),
    });
    paths
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_cut_endpoints() {
        for &t in &[0.0, 0.1, 0.4, 1.0, 3.0] {
            let cuts = analyticity_cuts(t, 2).unwrap();
            for x in [cuts.x1, cuts.x2] {
                assert!((x - x.ln() - (2.0 * t + 1.0)).abs() < 1e-12 * (2.0 * t + 1.0));
            }
            assert!(cuts.x1 <= 1.0 && cuts.x2 >= 1.0);
        }
        let one = analyticity_cuts(1.0, 1).unwrap();
        assert!((one.x1 - 0.052_469_097_457_714_87).abs() < 1e-13);
        assert!((one.x2 - 4.505_241_495_792_883).abs() < 1e-12);
        let zero = analyticity_cuts(0.0, 1).unwrap();
        assert_eq!((zero.x1, zero.x2), (1.0, 1.0));
    }

    #[test]
    fn off_axis_branch_points() {
        let cuts = analyticity_cuts(0.1, 3).unwrap();
        assert_eq!(cuts.off_axis.len(), 6);
        for arc in &cuts.off_axis {
            let k = arc.k.abs() as f64;
            let y = arc.y_end.abs();
            assert!(y > 2.0 * k * PI && y < (2.0 * k + 1.0) * PI);
            assert!(branch_point_residual(arc.y_end, 0.1) < 1e-10);
            assert_eq!(arc.y_start, 2.0 * arc.k as f64 * PI);
        }
        // mirror pairs
        assert_eq!(cuts.off_axis[0].branch_point(), cuts.off_axis[1].branch_point().conj());
        assert!(analyticity_cuts(0.1, 0).is_err());
    }

    #[test]
    fn off_axis_arcs_lie_farther_than_the_real_cut() {
        // the k = 1 arc stays farther from gamma_t than the ray [x2, inf)
        let cuts = analyticity_cuts(0.1, 1).unwrap();
        assert!(cuts.off_axis[0].branch_point().norm() > cuts.x2);
    }

    #[test]
    fn quadratrix_layout() {
        assert_eq!(quadratrix_point(0.0), Complex64::new(1.0, 0.0));
        assert!((quadratrix_point(1e-8) - 1.0).norm() < 2e-8);
        let paths = quadratrix_samples(2, 41);
        assert_eq!(paths.len(), 6);
        let arcs: Vec<_> = paths
            .iter()
            .filter_map(|p| match p.kind {
                QuadratrixKind::Arc { j } => Some(j),
                _ => None,
            })
            .collect();
        assert_eq!(arcs, vec![0, 1, -1, 2, -2]);
        // central arc passes through 1 and is conjugation symmetric
        assert!(paths[0].points.contains(&Complex64::new(1.0, 0.0)));
        for (a, b) in paths[1].points.iter().zip(paths[2].points.iter().rev()) {
            assert!((a - b.conj()).norm() < 1e-9 * a.norm());
        }
    }
}
