use crate::manifest::RunManifest;
use crate::{integration, read_curve, svg, CliError, Common};
use num_integer::Integer;
use serde::Serialize;
use serde_json::json;
use shadowtrace::circle_oracle::{cross_validate, BatteryOptions, Fault};
use shadowtrace::dynamics::integrate_rse;
use shadowtrace::export::{cusps_to_json, write_sweep_csv, write_trajectory_csv};
use shadowtrace::rotation::{critical_distance, find_distance_for_rotation, rotation_sweep, turning_distance_from};
use shadowtrace::singularities::{count_cusps_per_period, detect_singular_times};
use shadowtrace::{CuspCountReport, DistanceReport};
use std::f64::consts::TAU;
use std::path::Path;

/// Collects output files under one directory.
struct Outputs<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
        Ok(Outputs { dir, written: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|source| CliError::Io { path: path.clone(), source })?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("report serializes");
        self.write(name, text + "\n")
    }

    fn finish(mut self, mut manifest: RunManifest) -> Result<(), CliError> {
        let path = self.dir.join("manifest.json");
        self.written.push(path.display().to_string());
        manifest.outputs = self.written;
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|source| CliError::Io { path, source })
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory");
    buf
}

pub fn trace(common: &Common, r: f64, theta0: f64, t_span: (f64, f64)) -> Result<(), CliError> {
    let spec = read_curve(&common.curve)?;
    let curve = spec.build()?;
    let cfg = integration(common.steps_per_period)?;
    let traj = integrate_rse(&curve, r, theta0, t_span, &cfg)?;
    let cusps = detect_singular_times(&curve, &traj)?;

    let mut out = Outputs::new(&common.out)?;
    out.write("trajectory.csv", csv_bytes(|b| write_trajectory_csv(&traj, b)))?;
    out.write("trajectory.svg", svg::trajectory_svg(&curve, &traj, &cusps))?;
    out.write("cusps.json", cusps_to_json(&cusps) + "\n")?;
    let params = json!({"R": r, "theta0": theta0, "t_span": [t_span.0, t_span.1]});
    out.finish(RunManifest::new("trace", spec, params, cfg))?;
    println!(
        "{}",
        json!({
            "samples": traj.samples.len(),
            "cusps": cusps.len(),
            "max_distance_error": traj.max_distance_error(),
        })
    );
    Ok(())
}

pub fn sweep(common: &Common, r_min: f64, r_max: f64, n_points: usize, n_periods: usize) -> Result<(), CliError> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < R-min < R-max, got {r_min}, {r_max}")));
    }
    if n_points == 0 {
        return Err(CliError::Usage("n-points must be at least 1".into()));
    }
    let spec = read_curve(&common.curve)?;
    let curve = spec.build()?;
    let cfg = integration(common.steps_per_period)?;
    let grid: Vec<f64> = if n_points == 1 {
        vec![r_min]
    } else {
        (0..n_points)
            .map(|i| r_min + (r_max - r_min) * i as f64 / (n_points - 1) as f64)
            .collect()
    };
    let points = rotation_sweep(&curve, &grid, n_periods, &cfg)?;

    let mut out = Outputs::new(&common.out)?;
    out.write("sweep.csv", csv_bytes(|b| write_sweep_csv(&points, b)))?;
    out.write("sweep.svg", svg::sweep_svg(&points))?;
    let params = json!({"R_min": r_min, "R_max": r_max, "n_points": n_points, "n_periods": n_periods});
    out.finish(RunManifest::new("sweep", spec, params, cfg))?;
    let failed = points.iter().filter(|p| p.estimate.is_err()).count();
    println!("{}", json!({"points": points.len(), "failed": failed}));
    Ok(())
}

pub fn critical(common: &Common, tol: f64, turning: bool, n_periods: usize) -> Result<(), CliError> {
    let spec = read_curve(&common.curve)?;
    let curve = spec.build()?;
    let cfg = integration(common.steps_per_period)?;
    let crit = critical_distance(&curve, tol, &cfg)?;
    let turn = if turning {
        Some(turning_distance_from(&curve, &crit, tol, n_periods, &cfg)?)
    } else {
        None
    };

    let mut out = Outputs::new(&common.out)?;
    out.json("critical.json", &crit)?;
    if let Some(t) = &turn {
        out.json("turning.json", t)?;
    }
    let params = json!({"tol": tol, "turning": turning, "n_periods": n_periods});
    out.finish(RunManifest::new("critical", spec, params, cfg))?;
    println!(
        "{}",
        json!({"critical": crit.estimate, "turning": turn.as_ref().map(|t| t.estimate)})
    );
    Ok(())
}

#[derive(Serialize)]
struct SubharmonicReport {
    p: u64,
    q: u64,
    target_rotation: f64,
    distance: DistanceReport,
    theta0: f64,
    /// `‖r(2pπ) − r(0)‖`.
    closure: f64,
    /// `min ‖r(2jπ) − r(0)‖` over `0 < j < p`.
    shorter_period_gap: Option<f64>,
    /// Cusps along the traced period.
    traced_cusps: usize,
    /// The count checked against the convex-curve bound, when it applies.
    cusps: CuspCountReport,
    warnings: Vec<String>,
}

/// Closure beyond this is reported as a failure.
const CLOSURE_LIMIT: f64 = 1e-3;

pub fn subharmonic(common: &Common, p: u64, q: u64, tol: f64, theta0: f64) -> Result<(), CliError> {
    if !(p > q && q >= 1 && p.gcd(&q) == 1) {
        return Err(CliError::Usage(format!("need coprime p > q >= 1, got p = {p}, q = {q}")));
    }
    let spec = read_curve(&common.curve)?;
    let curve = spec.build()?;
    let cfg = integration(common.steps_per_period)?;
    let omega = curve.rotation_index();
    let ratio = q as f64 / p as f64;
    if ratio >= omega.unsigned_abs() as f64 {
        return Err(CliError::Usage(format!("q/p = {ratio} must be below |omega0| = {}", omega.abs())));
    }
    let target = omega.signum() as f64 * (omega.unsigned_abs() as f64 - ratio);
    let distance = find_distance_for_rotation(&curve, target, None, tol, &cfg)?;
    let r = distance.estimate;

    let period = TAU * p as f64;
    let traj = integrate_rse(&curve, r, theta0, (0.0, period), &cfg)?;
    let start = traj.first().position;
    let at = |t: f64| traj.position_at(t).expect("inside the traced span");
    let closure = traj.last().position.distance(start);
    let shorter_period_gap = (1..p)
        .map(|j| at(TAU * j as f64).distance(start))
        .reduce(f64::min);
    let cusps = count_cusps_per_period(&curve, r, theta0, &cfg)?;
    let all_cusps = detect_singular_times(&curve, &traj)?;

    let mut warnings = Vec::new();
    if closure > 1e-6 {
        warnings.push(format!(
            "closure {closure:.2e}: the periodic orbit is sensitive to the distance; bracket width {:.2e}",
            distance.bracket.1 - distance.bracket.0
        ));
    }
    let report = SubharmonicReport {
        p,
        q,
        target_rotation: target,
        distance,
        theta0,
        closure,
        shorter_period_gap,
        // Half-open: a cusp at the closing time repeats the one at 0.
        traced_cusps: all_cusps.iter().filter(|e| e.time < period - 1e-8).count(),
        cusps,
        warnings,
    };

    let mut out = Outputs::new(&common.out)?;
    out.json("subharmonic.json", &report)?;
    out.write("trajectory.csv", csv_bytes(|b| write_trajectory_csv(&traj, b)))?;
    out.write("trajectory.svg", svg::trajectory_svg(&curve, &traj, &all_cusps))?;
    let params = json!({"p": p, "q": q, "tol": tol, "theta0": theta0});
    out.finish(RunManifest::new("subharmonic", spec, params, cfg))?;
    println!(
        "{}",
        json!({"R": r, "closure": closure, "cusps": report.traced_cusps, "counted": report.cusps.consistent, "warnings": report.warnings})
    );
    if closure > CLOSURE_LIMIT {
        return Err(CliError::Check(format!("orbit does not close: {closure:.3e} > {CLOSURE_LIMIT:e}")));
    }
    Ok(())
}

pub fn oracle_check(n_periods: usize, steps_per_period: usize, dir: &Path, fault: Option<&str>) -> Result<(), CliError> {
    let fault = match fault {
        None => None,
        Some("flip-se-sign") => Some(Fault::FlipSeSign),
        Some(other) => return Err(CliError::Usage(format!("unknown fault {other:?}"))),
    };
    let opts = BatteryOptions {
        n_periods,
        fault,
        cfg: integration(steps_per_period)?,
        ..Default::default()
    };
    let card = cross_validate(&opts)?;
    let mut out = Outputs::new(dir)?;
    out.json("scorecard.json", &card)?;
    for c in &card.checks {
        println!(
            "{} {}: error {:.3e}, tolerance {:.3e} ({})",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tolerance,
            c.detail
        );
    }
    if !card.passed {
        let names: Vec<&str> = card.failures().map(|c| c.name.as_str()).collect();
        return Err(CliError::Check(format!("failed checks: {}", names.join(", "))));
    }
    Ok(())
}
