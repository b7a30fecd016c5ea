//! Singular times of shadowing curves.
//!
//! The shadower's velocity is `r' = α(r₀ − r)` with `α = -(B/R) sin φ`, so it
//! stops exactly when `φ ∈ πZ`. There the acceleration has norm
//! `B|θ' − ψ'|`, and when that is nonzero the curve has an ordinary cusp
//! lying on the parallel curve at distance `±R`.

use crate::dynamics::{self, integrate_rse, IntegrationConfig, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::ClosedCurve;
use crate::ode;
use crate::rotation::{self, periodic_range, DEFAULT_PERIODS};
use crate::vec2::Vec2;
use crate::PoincareMap;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

const TIME_TOL: f64 = 1e-10;
const ORDINARY_FLOOR: f64 = 1e-6;
const FD_STEP: f64 = 1e-3;
const FD_AGREEMENT: f64 = 1e-4;
const DISTINCT_SEPARATION: f64 = 1e-6;
/// `|P^p(θ) − θ − 2πk|` below this counts as a closed orbit. Resonant
/// circle maps have zero-width tongues, so a distance known to 1e-10 only
/// closes up to roughly this level.
const CLOSURE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// On the parallel curve at `+R` along the outer normal.
    Outer,
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspEvent {
    pub time: f64,
    pub theta: f64,
    pub location: Vec2,
    pub branch: Branch,
    /// `B|θ' − ψ'|` at the event.
    pub second_derivative_norm: f64,
    /// `k` with `φ = kπ` at the event.
    pub phi_level: i64,
}

fn make_event(curve: &ClosedCurve, radius: f64, t: f64, theta: f64) -> CuspEvent {
    let jet = curve.jet(t);
    let offset = Vec2::polar(theta) * radius;
    let branch = if offset.dot(curve.outer_normal(t)) > 0.0 {
        Branch::Outer
    } else {
        Branch::Inner
    };
    let phi = theta - curve.tangent_angle(t) + FRAC_PI_2;
    let rate = jet.d1.cross(jet.d2) / jet.d1.norm_sq();
    let theta_rate = dynamics::rse_rhs(curve, radius, t, theta);
    CuspEvent {
        time: t,
        theta,
        location: jet.point + offset,
        branch,
        second_derivative_norm: jet.d1.norm() * (theta_rate - rate).abs(),
        phi_level: (phi / PI).round() as i64,
    }
}

/// All times in the trajectory's span where `α` changes sign, located by
/// bisection on the dense output to 1e-10.
pub fn detect_singular_times(curve: &ClosedCurve, trajectory: &Trajectory) -> Result<Vec<CuspEvent>> {
    if curve != trajectory.curve() {
        return Err(Error::CurveMismatch);
    }
    let radius = trajectory.radius;
    let s = &trajectory.samples;
    let floor = 1e-13 * curve.scale() / radius;
    let mut flat_run = 0usize;
    for (i, x) in s.iter().enumerate() {
        if x.alpha.abs() <= floor {
            flat_run += 1;
            if flat_run >= 3 {
                return Err(Error::DegenerateSingularity { t: s[i - 2].t });
            }
        } else {
            flat_run = 0;
        }
    }

    let alpha_at = |t: f64| {
        let th = trajectory.theta_at(t).expect("time inside the trajectory span");
        dynamics::alpha(curve, radius, t, th)
    };
    let mut events = Vec::new();
    for i in 0..s.len() {
        let a = s[i].alpha;
        if a == 0.0 {
            events.push(make_event(curve, radius, s[i].t, s[i].theta));
            continue;
        }
        let Some(next) = s.get(i + 1) else { break };
        if next.alpha == 0.0 || a.signum() == next.alpha.signum() {
            continue;
        }
        let (mut lo, mut hi) = (s[i].t, next.t);
        let mut f_lo = a;
        for _ in 0..200 {
            if hi - lo <= TIME_TOL {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = alpha_at(mid);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let th = trajectory.theta_at(t).expect("time inside the trajectory span");
        events.push(make_event(curve, radius, t, th));
    }
    Ok(events)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspClass {
    Ordinary,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: CuspClass,
    pub analytic: f64,
    pub finite_difference: f64,
}

/// θ at `t0 + dt` from θ(t0) = `theta0`, by fine RK4 substeps.
fn advance(curve: &ClosedCurve, radius: f64, t0: f64, theta0: f64, dt: f64) -> f64 {
    const SUBSTEPS: usize = 64;
    let h = dt / SUBSTEPS as f64;
    let mut field = |t: f64, y: &[f64; 1]| [dynamics::rse_rhs(curve, radius, t, y[0])];
    let mut y = [theta0];
    for i in 0..SUBSTEPS {
        y = ode::rk4_step(&mut field, t0 + i as f64 * h, &y, h);
    }
    y[0]
}

/// Confirms the acceleration at a singular time by a five-point finite
/// difference of positions from a fresh local integration.
pub fn classify_cusp(curve: &ClosedCurve, radius: f64, event: &CuspEvent) -> Result<Classification> {
    dynamics::check_radius(radius)?;
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let weights = [-1.0, 16.0, -30.0, 16.0, -1.0];
    let mut acc = Vec2::ZERO;
    for (o, w) in offsets.iter().zip(weights) {
        let dt = o * FD_STEP;
        let th = advance(curve, radius, event.time, event.theta, dt);
        acc += (curve.evaluate(event.time + dt) + Vec2::polar(th) * radius) * w;
    }
    let fd = (acc * (1.0 / (12.0 * FD_STEP * FD_STEP))).norm();
    let analytic = event.second_derivative_norm;
    if (analytic - fd).abs() > FD_AGREEMENT * analytic.max(fd).max(ORDINARY_FLOOR) {
        return Err(Error::CuspFormulaMismatch {
            analytic,
            finite_difference: fd,
        });
    }
    Ok(Classification {
        class: if analytic > ORDINARY_FLOOR {
            CuspClass::Ordinary
        } else {
            CuspClass::Degenerate
        },
        analytic,
        finite_difference: fd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountRegime {
    /// `R < r_min`: at most one cusp on the whole curve.
    SmallDistance,
    /// `R > r_max` with rational `ρ = ω₀ − q/p`: `2q` cusps per period `2pπ`.
    LargeDistance,
    /// `R` equal to `r_min` or `r_max`; nothing is asserted.
    HypothesisBoundary,
    /// Outside both ranges, non-convex curve, or irrational rotation number.
    Declined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspCountReport {
    pub regime: CountRegime,
    #[serde(rename = "R")]
    pub radius: f64,
    pub theta0: f64,
    /// `(p, q)` with `ρ = ω₀ − q/p`, when identified.
    pub period: Option<(u64, u64)>,
    pub window: (f64, f64),
    pub events: Vec<CuspEvent>,
    pub distinct: usize,
    pub outer: usize,
    pub inner: usize,
    pub expected: Option<usize>,
    pub consistent: Option<bool>,
    pub notes: Vec<String>,
}

fn distinct_points(events: &[CuspEvent]) -> Vec<CuspEvent> {
    let mut out: Vec<CuspEvent> = Vec::new();
    for e in events {
        if out.iter().all(|o| o.location.distance(e.location) > DISTINCT_SEPARATION) {
            out.push(*e);
        }
    }
    out
}

/// Identifies `ρ(R) = k/p` with `p ≤ max_p` by checking that the `p`-fold
/// period map has a point displaced by exactly `2πk`.
fn identify_rational(map: &PoincareMap, rho: f64, eb: f64, max_p: u64) -> Result<Option<(i64, u64)>> {
    for p in 1..=max_p {
        let k = (rho * p as f64).round();
        if (k / p as f64 - rho).abs() > eb {
            continue;
        }
        let closes = |th: f64| Ok(map.iterate(th, p as usize)? - th - TAU * k);
        if closes(0.0)?.abs() <= CLOSURE_TOL {
            return Ok(Some((k as i64, p)));
        }
        let (lo, hi) = periodic_range(closes)?;
        if lo <= CLOSURE_TOL && hi >= -CLOSURE_TOL {
            return Ok(Some((k as i64, p)));
        }
    }
    Ok(None)
}

/// Counts cusps against the bound for strictly convex curves: at most
/// one for `R < r_min`, and `2q` distinct ones per minimal period `2pπ` for
/// `R > r_max` with `ρ(R) = ω₀ − q/p`.
pub fn count_cusps_per_period(curve: &ClosedCurve, radius: f64, theta0: f64, cfg: &IntegrationConfig) -> Result<CuspCountReport> {
    dynamics::check_radius(radius)?;
    let (r_min, r_max) = curve.radius_of_curvature_extrema();
    let mut report = CuspCountReport {
        regime: CountRegime::Declined,
        radius,
        theta0,
        period: None,
        window: (0.0, 0.0),
        events: Vec::new(),
        distinct: 0,
        outer: 0,
        inner: 0,
        expected: None,
        consistent: None,
        notes: Vec::new(),
    };
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs().max(1.0);
    if r_max.is_infinite() {
        report.notes.push("curvature vanishes: the curve is not strictly convex".into());
        return Ok(report);
    }
    if near(radius, r_min) || near(radius, r_max) {
        report.regime = CountRegime::HypothesisBoundary;
        report.notes.push(format!("R is at the boundary r_min = {r_min} or r_max = {r_max}"));
        return Ok(report);
    }
    let fill = |report: &mut CuspCountReport, events: Vec<CuspEvent>| {
        let d = distinct_points(&events);
        report.distinct = d.len();
        report.outer = d.iter().filter(|e| e.branch == Branch::Outer).count();
        report.inner = d.len() - report.outer;
        report.events = events;
    };
    if radius < r_min {
        report.regime = CountRegime::SmallDistance;
        report.window = (-10.0 * TAU, 10.0 * TAU);
        let traj = integrate_rse(curve, radius, theta0, report.window, cfg)?;
        let events = detect_singular_times(curve, &traj)?;
        fill(&mut report, events);
        report.expected = Some(1);
        report.consistent = Some(report.events.len() <= 1);
        return Ok(report);
    }
    if radius <= r_max {
        report.notes.push(format!("r_min = {r_min} < R < r_max = {r_max}: outside the convex-curve bound"));
        return Ok(report);
    }

    let omega = curve.rotation_index() as f64;
    let est = rotation::rotation_number(curve, radius, DEFAULT_PERIODS, cfg)?;
    let map = PoincareMap::new(curve, radius, cfg)?;
    let Some((k, p)) = identify_rational(&map, est.value, est.error_bound, 64)? else {
        report.notes.push(format!("rotation number {} not identified as k/p with p <= 64", est.value));
        return Ok(report);
    };
    let q = (omega * p as f64 - k as f64).round();
    if q < 1.0 {
        report.notes.push(format!("rotation number {k}/{p} does not lie below the index"));
        return Ok(report);
    }
    let q = q as u64;
    report.regime = CountRegime::LargeDistance;
    report.period = Some((p, q));

    // Start on a periodic orbit: θ0 itself if it already closes up.
    let shift = TAU * k as f64;
    let closes = |th: f64| -> Result<f64> { Ok(map.iterate(th, p as usize)? - th - shift) };
    let mut start = theta0;
    if closes(theta0)?.abs() > CLOSURE_TOL {
        let h = TAU / 256.0;
        let mut found = None;
        let mut prev = closes(theta0)?;
        for i in 1..=256 {
            let th = theta0 + i as f64 * h;
            let cur = closes(th)?;
            if prev.signum() != cur.signum() {
                let (mut lo, mut hi, mut flo) = (th - h, th, prev);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let fm = closes(mid)?;
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                found = Some(0.5 * (lo + hi));
                break;
            }
            prev = cur;
        }
        match found {
            Some(th) => {
                start = th;
                report.notes.push(format!("theta0 is not periodic; counted on the periodic orbit through {th}"));
            }
            None => {
                report.regime = CountRegime::Declined;
                report.notes.push("no periodic orbit located".into());
                return Ok(report);
            }
        }
    }
    let period = TAU * p as f64;
    report.window = (0.0, period);
    let traj = integrate_rse(curve, radius, start, report.window, cfg)?;
    // Half-open window: an event at the closing time repeats the one at 0.
    let events: Vec<CuspEvent> = detect_singular_times(curve, &traj)?
        .into_iter()
        .filter(|e| e.time < period - TIME_TOL)
        .collect();
    fill(&mut report, events);
    let expected = 2 * q as usize;
    report.expected = Some(expected);
    report.consistent =
        Some(report.distinct == expected && report.outer == q as usize && report.inner == q as usize);
    Ok(report)
}
