//! One function per subcommand, each producing a [`Dataset`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Map, Value};
use szego::curve::{
    analyticity_cuts, curve_point, moment_table, quadratrix_samples, CurveId, MomentMethod,
    QuadratrixKind,
};
use szego::field::{field_sample, streamline, Region, StopReason};
use szego::laguerre::{distance_to_curve, scaled_zeros, SequenceSpec};
use szego::lambert::{w_principal, INV_E};
use szego::penner::{match_sets, saddle_equations, saddle_from_laguerre, saddle_newton, trajectory};

use crate::error::{invalid, CliError};
use crate::output::{Dataset, Table};
use crate::{Command, SequenceKind};

type Tolerances = BTreeMap<String, f64>;

/// Run `cmd`; returns the data and the tolerances actually used.
pub fn dispatch(cmd: &Command, overrides: &Tolerances) -> Result<(Dataset, Tolerances), CliError> {
    let defaults: &[(&str, f64)] = match cmd {
        Command::Moments { .. } => &[("series", 1e-16), ("contour", 1e-12)],
        Command::Field { .. } => &[("band", 1e-9)],
        _ => &[],
    };
    let mut tol: Tolerances = defaults.iter().map(|&(k, v)| (k.to_string(), v)).collect();
    for (k, v) in overrides {
        if !tol.contains_key(k) {
            let known: Vec<_> = defaults.iter().map(|d| d.0).collect();
            return Err(invalid(format!(
                "unknown tolerance `{k}` for {}; known: {known:?}",
                cmd.name()
            )));
        }
        tol.insert(k.clone(), *v);
    }
    let data = match *cmd {
        Command::Curve { t, resolution } => curve(t, resolution)?,
        Command::Cuts { t, kmax, resolution } => cuts(t, kmax, resolution)?,
        Command::Moments { t, kmin, kmax } => moments(t, kmin, kmax, tol["series"], tol["contour"])?,
        Command::Field {
            t,
            resolution,
            xmin,
            xmax,
            ymin,
            ymax,
        } => field(t, resolution, [xmin, xmax, ymin, ymax], tol["band"])?,
        Command::Flow {
            t,
            lines,
            step,
            max_steps,
        } => flow(t, lines, step, max_steps)?,
        Command::Zeros { kind, param, ref n } => zeros(kind, param, n)?,
        Command::Penner { ref n, g, t_hooft } => penner(n, g, t_hooft)?,
        Command::Trajectory { t, step, max_steps } => traced(t, step, max_steps)?,
    };
    Ok((data, tol))
}

fn check_t(t: f64) -> Result<(), CliError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("t must be finite and >= 0, got {t}")))
    }
}

fn check_resolution(r: usize) -> Result<(), CliError> {
    if r >= 16 {
        Ok(())
    } else {
        Err(invalid(format!("resolution must be >= 16, got {r}")))
    }
}

fn check_step(step: f64) -> Result<(), CliError> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("step must be positive, got {step}")))
    }
}

fn level_residual(z: Complex64, t: f64) -> f64 {
    (z.re - z.norm().ln() - (t + 1.0)).abs()
}

fn curve(t: f64, resolution: usize) -> Result<Dataset, CliError> {
    check_t(t)?;
    check_resolution(resolution)?;
    let mut table = Table::new(&["theta", "re", "im", "level_residual"]);
    for (theta, z) in CurveId::new(t)?.samples(resolution)? {
        table.push(vec![theta.into(), z.re.into(), z.im.into(), level_residual(z, t).into()]);
    }
    Ok(Dataset {
        table,
        summary: None,
    })
}

fn cuts(t: f64, kmax: usize, resolution: usize) -> Result<Dataset, CliError> {
    check_t(t)?;
    check_resolution(resolution)?;
    if kmax == 0 {
        return Err(invalid("kmax must be >= 1"));
    }
    let set = analyticity_cuts(t, kmax)?;
    let mut table = Table::new(&["feature", "index", "param", "re", "im"]);
    table.push(vec!["real_inner".into(), 0i64.into(), 0.0.into(), 0.0.into(), 0.0.into()]);
    table.push(vec!["real_inner".into(), 0i64.into(), 1.0.into(), set.x1.into(), 0.0.into()]);
    table.push(vec!["real_outer".into(), 0i64.into(), 0.0.into(), set.x2.into(), 0.0.into()]);
    for cut in &set.off_axis {
        // y_start is the end at infinity; sample up to the branch point
        for j in 1..=resolution {
            let s = j as f64 / resolution as f64;
            let y = cut.y_start + s * (cut.y_end - cut.y_start);
            let z = cut.point(y);
            table.push(vec!["off_axis".into(), cut.k.into(), y.into(), z.re.into(), z.im.into()]);
        }
    }
    for path in quadratrix_samples(kmax, resolution) {
        let (feature, index) = match path.kind {
            QuadratrixKind::Arc { j } => ("quadratrix_arc", j),
            QuadratrixKind::RealRay => ("quadratrix_ray", 0),
        };
        for (j, z) in path.points.iter().enumerate() {
            table.push(vec![feature.into(), index.into(), j.into(), z.re.into(), z.im.into()]);
        }
    }
    let mut summary = Map::new();
    summary.insert("x1".into(), json!(set.x1));
    summary.insert("x2".into(), json!(set.x2));
    summary.insert(
        "branch_points".into(),
        Value::Array(
            set.off_axis
                .iter()
                .map(|c| {
                    let b = c.branch_point();
                    json!({ "k": c.k, "y": c.y_end, "re": b.re, "im": b.im })
                })
                .collect(),
        ),
    );
    Ok(Dataset {
        table,
        summary: Some(summary),
    })
}

fn moments(t: f64, kmin: i64, kmax: i64, series_tol: f64, contour_tol: f64) -> Result<Dataset, CliError> {
    check_t(t)?;
    if kmin > kmax {
        return Err(invalid(format!("kmin {kmin} > kmax {kmax}")));
    }
    let series = moment_table(t, kmin, kmax, MomentMethod::Series, series_tol)?;
    let contour = moment_table(t, kmin, kmax, MomentMethod::Contour, contour_tol)?;
    let mut table = Table::new(&["k", "series", "contour_re", "contour_im", "delta"]);
    let mut worst: f64 = 0.0;
    for (k, s) in &series.entries {
        let c = contour.entries[k];
        let delta = (s - c).norm();
        worst = worst.max(delta);
        table.push(vec![(*k).into(), s.re.into(), c.re.into(), c.im.into(), delta.into()]);
    }
    let mut summary = Map::new();
    summary.insert("max_delta".into(), json!(worst));
    Ok(Dataset {
        table,
        summary: Some(summary),
    })
}

fn region_name(r: Region) -> &'static str {
    match r {
        Region::Interior => "interior",
        Region::Exterior => "exterior",
        Region::OnCurve => "on_curve",
    }
}

fn field(t: f64, resolution: usize, b: [f64; 4], band: f64) -> Result<Dataset, CliError> {
    check_t(t)?;
    check_resolution(resolution)?;
    let [xmin, xmax, ymin, ymax] = b;
    if !(xmin < xmax && ymin < ymax) || b.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("empty window [{xmin}, {xmax}] x [{ymin}, {ymax}]")));
    }
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (resolution - 1) as f64;
    let mut table = Table::new(&["x", "y", "u", "ex", "ey", "region"]);
    for iy in 0..resolution {
        let y = at(ymin, ymax, iy);
        for ix in 0..resolution {
            let x = at(xmin, xmax, ix);
            let z = Complex64::new(x, y);
            let row = match field_sample(z, t, band) {
                Ok(s) => {
                    let e = s.e.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                    vec![x.into(), y.into(), s.u.into(), e.re.into(), e.im.into(), region_name(s.region).into()]
                }
                // the charge at the origin
                Err(szego::Error::Singular(_)) | Err(szego::Error::Domain(_)) => vec![
                    x.into(),
                    y.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    "singular".into(),
                ],
                Err(e) => return Err(e.into()),
            };
            table.push(row);
        }
    }
    Ok(Dataset {
        table,
        summary: None,
    })
}

fn stop_name(s: &StopReason) -> String {
    match s {
        StopReason::Closed => "closed".into(),
        StopReason::MaxSteps => "max_steps".into(),
        StopReason::CurveCrossing => "curve_crossing".into(),
        StopReason::NearSingular(z) => format!("near_singular({}, {})", z.re, z.im),
    }
}

fn flow(t: f64, lines: usize, step: f64, max_steps: usize) -> Result<Dataset, CliError> {
    check_t(t)?;
    check_step(step)?;
    if lines == 0 {
        return Err(invalid("lines must be >= 1"));
    }
    let x0 = CurveId::new(t)?.x0();
    // the tracer refuses starts within ten steps of the charge at 0
    let lo = 12.0 * step;
    if lo >= x0 {
        return Err(invalid(format!("step {step} is too large for gamma_{t} (x0 = {x0})")));
    }
    let mut seeds: Vec<(&str, Complex64)> = (0..lines)
        .map(|j| ("interior", Complex64::new(lo + (x0 - lo) * (j as f64 + 0.5) / lines as f64, 0.0)))
        .collect();
    // exterior level sets through (-b, -a) close around the origin, where
    // -a = z(t, pi) and b = W0(1/e) marks U = 1
    let a = -curve_point(t, std::f64::consts::PI)?.re;
    let b = w_principal(Complex64::new(INV_E, 0.0))?.value.re;
    if a < b {
        seeds.extend((0..lines).map(|j| {
            ("exterior", Complex64::new(-(a + (b - a) * (j as f64 + 0.5) / lines as f64), 0.0))
        }));
    }
    let mut table = Table::new(&["line", "region", "step", "re", "im"]);
    let mut report = Vec::new();
    for (line, (region, z0)) in seeds.iter().enumerate() {
        let path = streamline(*z0, t, step, max_steps)?;
        for (k, z) in path.points.iter().enumerate() {
            table.push(vec![line.into(), (*region).into(), k.into(), z.re.into(), z.im.into()]);
        }
        report.push(json!({
            "line": line,
            "region": region,
            "seed": [z0.re, z0.im],
            "points": path.points.len(),
            "closed": path.closed,
            "stop": stop_name(&path.stop),
            "invariant_drift": path.invariant_drift,
        }));
    }
    let mut summary = Map::new();
    summary.insert("lines".into(), Value::Array(report));
    Ok(Dataset {
        table,
        summary: Some(summary),
    })
}

fn zeros(kind: SequenceKind, param: f64, ns: &[usize]) -> Result<Dataset, CliError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(invalid("degrees must be >= 1"));
    }
    let spec = match kind {
        SequenceKind::ShiftC if param.is_finite() && param >= 0.0 => SequenceSpec::ShiftC(param),
        SequenceKind::ShiftC => return Err(invalid(format!("shift c must be >= 0, got {param}"))),
        SequenceKind::RateT => {
            check_t(param)?;
            SequenceSpec::RateT(param)
        }
    };
    let mut table = Table::new(&["n", "alpha", "re", "im", "dist_to_curve"]);
    let mut ladder = Vec::new();
    for &n in ns {
        let zs = scaled_zeros(spec, n)?;
        let pts = zs.scaled();
        // the c = 0 limit is the point mass at the origin
        let dist: Vec<f64> = match spec.limit_t() {
            Some(t) => distance_to_curve(&pts, t)?.distances,
            None => pts.iter().map(|z| z.norm()).collect(),
        };
        for (z, d) in pts.iter().zip(&dist) {
            table.push(vec![n.into(), zs.alpha.into(), z.re.into(), z.im.into(), (*d).into()]);
        }
        let mean_inv: Complex64 = if pts.iter().any(|z| z.norm() == 0.0) {
            Complex64::new(f64::NAN, f64::NAN)
        } else {
            pts.iter().map(|z| 1.0 / z).sum::<Complex64>() / n as f64
        };
        ladder.push(json!({
            "n": n,
            "alpha": zs.alpha,
            "max_dist": dist.iter().copied().fold(0.0, f64::max),
            "mean_dist": dist.iter().sum::<f64>() / n as f64,
            "backward_error": zs.residual,
            "mean_reciprocal": [mean_inv.re, mean_inv.im],
        }));
    }
    let mut summary = Map::new();
    summary.insert("limit_t".into(), json!(spec.limit_t()));
    summary.insert("ladder".into(), Value::Array(ladder));
    Ok(Dataset {
        table,
        summary: Some(summary),
    })
}

fn penner(ns: &[usize], g: Option<f64>, t_hooft: f64) -> Result<Dataset, CliError> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(invalid("n must be >= 1"));
    }
    let mut table = Table::new(&["n", "g", "re", "im", "residual"]);
    let mut configs = Vec::new();
    for &n in ns {
        let g = g.unwrap_or(t_hooft / n as f64);
        if !(g.is_finite() && g != 0.0) {
            return Err(invalid(format!("coupling must be finite and nonzero, got {g}")));
        }
        let cfg = saddle_from_laguerre(n, g)?;
        let eqs = saddle_equations(g, &cfg.points);
        for (z, f) in cfg.points.iter().zip(&eqs) {
            table.push(vec![n.into(), g.into(), z.re.into(), z.im.into(), f.norm().into()]);
        }
        // independent Newton solve from a deterministic perturbation
        let init: Vec<Complex64> = cfg
            .points
            .iter()
            .enumerate()
            .map(|(k, z)| z * Complex64::from_polar(1.0 + 1e-3 * (k as f64).sin(), 1e-3 * (k as f64).cos()))
            .collect();
        let newton = saddle_newton(n, g, &init)
            .and_then(|nw| Ok((nw.residual, match_sets(&nw.points, &cfg.points)?.1)));
        let recip = cfg.reciprocal_sum();
        let mut entry = json!({
            "n": n,
            "g": g,
            "t_hooft": n as f64 * g,
            "residual": cfg.residual,
            "recip_sum": [recip.re, recip.im],
            "recip_sum_error": (recip + n as f64).norm(),
        });
        match newton {
            Ok((res, dist)) => {
                entry["newton_residual"] = json!(res);
                entry["newton_match_distance"] = json!(dist);
            }
            Err(e) => entry["newton_error"] = json!(e.to_string()),
        }
        configs.push(entry);
    }
    let mut summary = Map::new();
    summary.insert("configs".into(), Value::Array(configs));
    Ok(Dataset {
        table,
        summary: Some(summary),
    })
}

fn traced(t: f64, step: f64, max_steps: usize) -> Result<Dataset, CliError> {
    check_t(t)?;
    check_step(step)?;
    let x0 = CurveId::new(t)?.x0();
    let tr = trajectory(t, Complex64::new(x0, 0.0), step, max_steps)?;
    let mut table = Table::new(&["step", "re", "im", "level_residual"]);
    for (k, z) in tr.points.iter().enumerate() {
        table.push(vec![k.into(), z.re.into(), z.im.into(), level_residual(*z, t).into()]);
    }
    let mut summary = Map::new();
    summary.insert("closed".into(), json!(tr.closed));
    summary.insert("closure_gap".into(), json!(tr.closure_gap));
    summary.insert("level_drift".into(), json!(tr.level_drift));
    summary.insert("max_step_defect".into(), json!(tr.max_step_defect));
    summary.insert("winding".into(), json!(tr.winding));
    Ok(Dataset {
        table,
        summary: Some(summary),
    })
}
