//! Rotation numbers of the bearing-angle flow and the distances derived
//! from them.

use crate::dynamics::{check_radius, IntegrationConfig, PoincareMap};
use crate::error::{Error, Result};
use crate::geometry::{polish_max, ClosedCurve, GEOMETRY_GRID};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default iteration count for sweeps and diagnostics.
pub const DEFAULT_PERIODS: usize = 512;

const SCAN_FACTOR: f64 = 1.05;
const LOCK_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub value: f64,
    /// `1/n`: a lift of a circle homeomorphism stays within 2π of `n·2πρ`.
    pub error_bound: f64,
    pub periods_used: usize,
}

/// `(θ(2πn) − θ0)/(2πn)` from `θ0 = 0`.
pub fn rotation_number(curve: &ClosedCurve, radius: f64, n_periods: usize, cfg: &IntegrationConfig) -> Result<RotationEstimate> {
    rotation_number_from(curve, radius, 0.0, n_periods, cfg)
}

pub fn rotation_number_from(
    curve: &ClosedCurve,
    radius: f64,
    theta0: f64,
    n_periods: usize,
    cfg: &IntegrationConfig,
) -> Result<RotationEstimate> {
    if n_periods < 16 {
        return Err(Error::param("n_periods", format!("must be at least 16, got {n_periods}")));
    }
    let map = PoincareMap::new(curve, radius, cfg)?;
    let end = map.iterate(theta0, n_periods)?;
    Ok(RotationEstimate {
        value: (end - theta0) / (TAU * n_periods as f64),
        error_bound: 1.0 / n_periods as f64,
        periods_used: n_periods,
    })
}

/// Weighted Birkhoff average of the per-period advance along an orbit of
/// `n_periods` iterates. Converges much faster than the plain average when
/// the map is smoothly conjugate to an irrational rotation, but carries no
/// rigorous bound.
pub fn rotation_number_weighted(curve: &ClosedCurve, radius: f64, n_periods: usize, cfg: &IntegrationConfig) -> Result<f64> {
    if n_periods < 16 {
        return Err(Error::param("n_periods", format!("must be at least 16, got {n_periods}")));
    }
    let map = PoincareMap::new(curve, radius, cfg)?;
    let bump = |x: f64| if x <= 0.0 || x >= 1.0 { 0.0 } else { (-1.0 / (x * (1.0 - x))).exp() };
    let (mut num, mut den) = (0.0, 0.0);
    let mut th = 0.0;
    for j in 0..n_periods {
        let next = map.apply(th)?;
        let w = bump((j as f64 + 0.5) / n_periods as f64);
        num += w * (next - th);
        den += w;
        th = next;
    }
    Ok(num / (den * TAU))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    #[serde(rename = "R")]
    pub radius: f64,
    pub estimate: Result<RotationEstimate, String>,
}

/// Rotation numbers over a grid of distances. Points are independent, so a
/// failure is recorded per point and the sweep carries on. Output order
/// matches the grid.
pub fn rotation_sweep(curve: &ClosedCurve, grid: &[f64], n_periods: usize, cfg: &IntegrationConfig) -> Result<Vec<SweepPoint>> {
    if grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::param("R_grid", "all distances must be positive"));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("R_grid", "must be sorted"));
    }
    Ok(grid
        .par_iter()
        .map(|&r| SweepPoint {
            radius: r,
            estimate: rotation_number(curve, r, n_periods, cfg).map_err(|e| e.to_string()),
        })
        .collect())
}

/// Geometric grid `start·factorⁱ` up to and including the first point ≥ `end`.
pub fn geometric_grid(start: f64, end: f64, factor: f64) -> Vec<f64> {
    let mut out = vec![start];
    let mut r = start;
    while r < end {
        r *= factor;
        out.push(r);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: f64,
    pub value: f64,
    pub error_bound: f64,
    pub passed: bool,
}

/// `|ρ(R)| ≤ ℓ₀/(2πR)`, allowing for the estimate's error bound.
pub fn check_upper_bound(perimeter: f64, estimate: &RotationEstimate, radius: f64) -> BoundCheck {
    let bound = perimeter / (TAU * radius);
    BoundCheck {
        bound,
        value: estimate.value,
        error_bound: estimate.error_bound,
        passed: estimate.value.abs() <= bound + estimate.error_bound,
    }
}

fn area_hypothesis(curve: &ClosedCurve) -> Result<f64> {
    let area = curve.enclosed_area()?;
    if area.abs() <= 1e-9 * curve.scale().powi(2) {
        return Err(Error::Hypothesis(format!("enclosed algebraic area is zero ({area:.3e})")));
    }
    Ok(area)
}

/// `ρ(R)·2πR²/A₀` for large distances, which tends to one.
pub fn asymptotic_area_ratio(curve: &ClosedCurve, radii: &[f64], cfg: &IntegrationConfig) -> Result<Vec<f64>> {
    let area = area_hypothesis(curve)?;
    let (_, r_max) = curve.radius_of_curvature_extrema();
    let scale = if r_max.is_finite() { r_max } else { curve.scale() };
    for &r in radii {
        check_radius(r)?;
        if r < 10.0 * scale {
            return Err(Error::param("R", format!("{r} is not in the asymptotic range (needs >= {})", 10.0 * scale)));
        }
    }
    radii
        .par_iter()
        .map(|&r| {
            // The orbit has to wind several times for the weighted average
            // to settle; size it from the expected ρ ≈ A₀/(2πR²).
            let rho_guess = area.abs() / (TAU * r * r);
            let n = ((8.0 / rho_guess).ceil() as usize).max(1024);
            let rho = rotation_number_weighted(curve, r, n, cfg)?;
            Ok(rho * TAU * r * r / area)
        })
        .collect()
}

/// `r_min`: below it the rotation number equals the rotation index.
pub fn guaranteed_plateau_radius(curve: &ClosedCurve) -> Result<f64> {
    let (r_min, r_max) = curve.radius_of_curvature_extrema();
    if r_max.is_infinite() {
        let n = GEOMETRY_GRID;
        let t = (0..n)
            .map(|i| TAU * i as f64 / n as f64)
            .min_by(|a, b| curve.curvature(*a).abs().total_cmp(&curve.curvature(*b).abs()))
            .unwrap_or(0.0);
        return Err(Error::VanishingCurvature { t });
    }
    Ok(r_min)
}

/// Minimum and maximum of a 2π-periodic function, from a uniform grid
/// with the extremes polished.
pub(crate) fn periodic_range(f: impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let h = TAU / LOCK_GRID as f64;
    let values = (0..LOCK_GRID).map(|i| f(i as f64 * h)).collect::<Result<Vec<f64>>>()?;
    let (mut imin, mut imax) = (0, 0);
    for (i, v) in values.iter().enumerate() {
        if *v < values[imin] {
            imin = i;
        }
        if *v > values[imax] {
            imax = i;
        }
    }
    let d = |th: f64| f(th).unwrap_or(f64::NAN);
    let neg = |th: f64| -d(th);
    let around = |i: usize| ((i as f64 - 1.0) * h, i as f64 * h, (i as f64 + 1.0) * h);
    let (a, b, c) = around(imax);
    let hi = polish_max(&d, a, b, c).max(values[imax]);
    let (a, b, c) = around(imin);
    let lo = (-polish_max(&neg, a, b, c)).min(values[imin]);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite("period-map displacement"));
    }
    Ok((lo, hi))
}

/// Whether the rotation number equals the rotation index at `R`: the
/// period map then has a point with `P(θ) = θ + 2πω₀`.
pub fn is_locked(curve: &ClosedCurve, radius: f64, cfg: &IntegrationConfig) -> Result<bool> {
    let map = PoincareMap::new(curve, radius, cfg)?;
    let shift = curve.rotation_index() as f64;
    let (lo, hi) = periodic_range(|th| map.displacement(th, shift))?;
    Ok(lo <= 0.0 && hi >= 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    Critical,
    Turning,
    TargetRotation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticPoint {
    #[serde(rename = "R")]
    pub radius: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub kind: DistanceKind,
    pub estimate: f64,
    pub bracket: (f64, f64),
    pub rho_at_estimate: f64,
    pub diagnostics: Vec<DiagnosticPoint>,
    pub heuristic: bool,
    pub notes: Vec<String>,
}

fn require_nonzero_index(curve: &ClosedCurve) -> Result<i64> {
    match curve.rotation_index() {
        0 => Err(Error::Hypothesis("rotation index is zero".into())),
        w => Ok(w),
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::param("tol", format!("must be positive, got {tol}")))
    }
}

/// Bisects a predicate that is false at `lo` and true at `hi`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, mut pred: impl FnMut(f64) -> Result<bool>) -> Result<(f64, f64)> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

fn diagnostics(curve: &ClosedCurve, radii: &[f64], cfg: &IntegrationConfig) -> Vec<DiagnosticPoint> {
    radii
        .par_iter()
        .map(|&r| DiagnosticPoint {
            radius: r,
            rho: rotation_number(curve, r, DEFAULT_PERIODS, cfg).map(|e| e.value).unwrap_or(f64::NAN),
        })
        .collect()
}

/// Largest `R₀` with `ρ ≡ ω₀` on `(0, R₀]`, located by an upward scan from
/// the guaranteed plateau and bisection on the locking predicate.
pub fn critical_distance(curve: &ClosedCurve, tol: f64, cfg: &IntegrationConfig) -> Result<DistanceReport> {
    check_tol(tol)?;
    let omega = require_nonzero_index(curve)?;
    let metrics = curve.metrics()?;
    let mu = metrics.mu;
    let start = if metrics.r_max.is_finite() { 0.9 * metrics.r_min } else { 0.1 * mu };
    let limit = 10.0 * mu;
    if !is_locked(curve, start, cfg)? {
        return Err(Error::Hypothesis(format!("rotation number differs from the index already at R = {start}")));
    }
    let mut scanned = vec![start];
    let mut r = start;
    let (lo, hi) = loop {
        let next = r * SCAN_FACTOR;
        if next > limit {
            return Err(Error::NoDeparture { limit });
        }
        scanned.push(next);
        if !is_locked(curve, next, cfg)? {
            break (r, next);
        }
        r = next;
    };
    let (lo, hi) = bisect(lo, hi, tol, |r| Ok(!is_locked(curve, r, cfg)?))?;
    let estimate = 0.5 * (lo + hi);
    let mut notes = vec![format!("scan factor {SCAN_FACTOR} from R = {start}; locking decided by the period-map fixed-point test")];
    let upper = mu / omega.unsigned_abs() as f64;
    if estimate > upper + tol {
        notes.push(format!("estimate exceeds the upper bound mu/|omega0| = {upper}"));
    }
    Ok(DistanceReport {
        kind: DistanceKind::Critical,
        estimate,
        bracket: (lo, hi),
        rho_at_estimate: rotation_number(curve, estimate, DEFAULT_PERIODS, cfg)?.value,
        diagnostics: diagnostics(curve, &scanned, cfg),
        heuristic: false,
        notes,
    })
}

/// Onset of the monotone tail of `ρ(R) ≠ ω₀`, checked on a geometric grid
/// from the critical distance to `20μ`. Monotonicity on an unbounded
/// interval cannot be verified finitely, so the report is marked heuristic.
pub fn turning_distance(curve: &ClosedCurve, tol: f64, n_periods: usize, cfg: &IntegrationConfig) -> Result<DistanceReport> {
    let critical = critical_distance(curve, tol, cfg)?;
    turning_distance_from(curve, &critical, tol, n_periods, cfg)
}

/// As [`turning_distance`], starting from an existing critical report.
pub fn turning_distance_from(
    curve: &ClosedCurve,
    critical: &DistanceReport,
    tol: f64,
    n_periods: usize,
    cfg: &IntegrationConfig,
) -> Result<DistanceReport> {
    check_tol(tol)?;
    if critical.kind != DistanceKind::Critical {
        return Err(Error::param("critical", "expected a critical-distance report"));
    }
    let omega = require_nonzero_index(curve)? as f64;
    let area = area_hypothesis(curve)?;
    let mu = curve.metrics()?.mu;
    // ρ decreases toward zero for counterclockwise curves with positive area.
    let direction = -area.signum();
    let eb = 1.0 / n_periods as f64;

    let grid = geometric_grid(critical.bracket.1, 20.0 * mu, SCAN_FACTOR);
    let rows: Vec<(f64, bool, f64)> = grid
        .par_iter()
        .map(|&r| {
            let rho = rotation_number(curve, r, n_periods, cfg)?.value;
            // A locked map has ρ = ω₀ exactly, so only estimates near ω₀ need the test.
            let locked = (rho - omega).abs() <= 2.0 * eb && is_locked(curve, r, cfg)?;
            Ok((r, locked, rho))
        })
        .collect::<Result<_>>()?;

    // Smallest index from which every point is unlocked and consecutive
    // values move in the expected direction up to 2·error_bound.
    let mut first = rows.len() - 1;
    for i in (0..rows.len()).rev() {
        let ok_here = !rows[i].1;
        let ok_step = i + 1 == rows.len() || direction * (rows[i + 1].2 - rows[i].2) >= -2.0 * eb;
        if ok_here && ok_step {
            first = i;
        } else {
            break;
        }
    }
    let mut notes = vec![format!("monotone tail checked on (R*, {:.6}] with resolution 2/n = {:.3e}", 20.0 * mu, 2.0 * eb)];
    let (lo, hi) = if first == 0 {
        notes.push("tail starts at the critical distance".into());
        critical.bracket
    } else {
        let rho_next = rows[first].2;
        bisect(rows[first - 1].0, rows[first].0, tol, |r| {
            let rho = rotation_number(curve, r, n_periods, cfg)?.value;
            if (rho - omega).abs() <= 2.0 * eb && is_locked(curve, r, cfg)? {
                return Ok(false);
            }
            Ok(direction * (rho_next - rho) >= -2.0 * eb)
        })?
    };
    let estimate = 0.5 * (lo + hi);
    let rho = rotation_number(curve, estimate, n_periods, cfg)?.value;
    if (rho - omega).abs() > 1.0 && first == 0 {
        notes.push("rotation number at the estimate is far from the index".into());
    }
    Ok(DistanceReport {
        kind: DistanceKind::Turning,
        estimate,
        bracket: (lo, hi),
        rho_at_estimate: rho,
        diagnostics: rows.iter().map(|&(r, _, rho)| DiagnosticPoint { radius: r, rho }).collect(),
        heuristic: true,
        notes,
    })
}

/// Best rational approximation `q/p` with `p ≤ max_den`, by continued fractions.
pub fn best_rational(x: f64, max_den: u64) -> (i64, u64) {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1u64, 1i64, 0u64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let (np, nq) = (a as i64 * p1 + p0, a as u64 * q1 + q0);
        if nq > max_den {
            // Best semiconvergent that still fits.
            let k = (max_den - q0) / q1;
            let (sp, sq) = (k as i64 * p1 + p0, k * q1 + q0);
            if (sp as f64 / sq as f64 - x).abs() < (p1 as f64 / q1 as f64 - x).abs() {
                return (sp, sq);
            }
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, np, nq);
        let frac = v - a;
        if frac.abs() < 1e-15 || (p1 as f64 / q1 as f64 - x).abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    (p1, q1)
}

/// Largest denominator used when converting a target rotation number.
pub const TARGET_MAX_DENOMINATOR: u64 = 512;

/// A distance at which `ρ(R)` crosses `target`, for `0 < target < ω₀`.
///
/// The target is replaced by its best rational approximation `q/p`, and the
/// bisection runs on the sign of `P^p(0) − 2πq`, which is positive exactly
/// when `ρ > q/p` and negative when `ρ < q/p`. Mode locking can make the
/// crossing an interval; the report gives the bracket, not a unique root.
pub fn find_distance_for_rotation(
    curve: &ClosedCurve,
    target: f64,
    bracket: Option<(f64, f64)>,
    tol: f64,
    cfg: &IntegrationConfig,
) -> Result<DistanceReport> {
    check_tol(tol)?;
    let omega = require_nonzero_index(curve)? as f64;
    if !(target > 0.0_f64.min(omega) && target < 0.0_f64.max(omega)) {
        return Err(Error::param("target", format!("must lie strictly between 0 and {omega}")));
    }
    // Work with ρ·sign(ω₀) so the tail always decreases.
    let s = omega.signum();
    let (q, p) = best_rational(s * target, TARGET_MAX_DENOMINATOR);
    let above = |r: f64| -> Result<f64> {
        let map = PoincareMap::new(curve, r, cfg)?;
        Ok(s * map.iterate(0.0, p as usize)? - TAU * q as f64)
    };
    let mut scanned = Vec::new();
    let (lo, hi) = match bracket {
        Some((lo, hi)) => {
            if !(lo > 0.0 && hi > lo) {
                return Err(Error::param("bracket", "need 0 < low < high"));
            }
            if above(lo)? < 0.0 || above(hi)? >= 0.0 {
                return Err(Error::Bracketing {
                    target,
                    reason: format!("rotation number does not cross {q}/{p} inside [{lo}, {hi}]"),
                });
            }
            (lo, hi)
        }
        None => {
            let mu = curve.metrics()?.mu;
            let mut r = guaranteed_plateau_radius(curve).unwrap_or(0.1 * mu);
            scanned.push(r);
            if above(r)? < 0.0 {
                return Err(Error::Bracketing {
                    target,
                    reason: format!("already below the target at R = {r}"),
                });
            }
            loop {
                let next = r * 1.25;
                if next > 50.0 * mu {
                    return Err(Error::Bracketing {
                        target,
                        reason: format!("no crossing below R = {}", 50.0 * mu),
                    });
                }
                scanned.push(next);
                if above(next)? < 0.0 {
                    break (r, next);
                }
                r = next;
            }
        }
    };
    let (lo, hi) = bisect(lo, hi, tol, |r| Ok(above(r)? < 0.0))?;
    let estimate = 0.5 * (lo + hi);
    Ok(DistanceReport {
        kind: DistanceKind::TargetRotation,
        estimate,
        bracket: (lo, hi),
        rho_at_estimate: rotation_number(curve, estimate, DEFAULT_PERIODS, cfg)?.value,
        diagnostics: diagnostics(curve, &scanned, cfg),
        heuristic: false,
        notes: vec![format!("target {target} resolved as the rational {}/{p}", s as i64 * q)],
    })
}
