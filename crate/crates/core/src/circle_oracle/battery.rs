//! Cross-validation of the integrators against the circle closed forms.

use super::{
    equilibria, phi_of_t, position_exact, rotation_number_circle, subharmonic_distance, theta_exact,
    turning_data_large_r, turning_time_r1, turning_time_small_r,
};
use crate::dynamics::{integrate_rse, integrate_se_signed, IntegrationConfig};
use crate::error::Result;
use crate::geometry::ClosedCurve;
use crate::rotation::rotation_sweep;
use crate::singularities::detect_singular_times;
use crate::vec2::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

/// Deliberate defects used to show that the battery can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Reverse the sign of the planar vector field.
    FlipSeSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryOptions {
    /// Periods per rotation-number estimate; tolerances scale as `1/n`.
    pub n_periods: usize,
    pub seed: u64,
    pub fault: Option<Fault>,
    pub cfg: IntegrationConfig,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions {
            n_periods: 512,
            seed: 0x5eed,
            fault: None,
            cfg: IntegrationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scorecard {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Scorecard {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &str, outcome: Result<(f64, String)>, tolerance: f64) -> Check {
    match outcome {
        Ok((err, detail)) => Check {
            name: name.into(),
            passed: err < tolerance,
            max_error: err,
            tolerance,
            detail,
        },
        Err(e) => Check {
            name: name.into(),
            passed: false,
            max_error: f64::NAN,
            tolerance,
            detail: format!("error: {e}"),
        },
    }
}

/// Random `(R, θ0)` spread over the three regimes.
fn random_configs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let r = match i % 3 {
                0 => rng.gen_range(0.2..0.9),
                1 => 1.0,
                _ => rng.gen_range(1.1..3.0),
            };
            // Keep clear of the constant solution at the origin for R = 1.
            let th = rng.gen_range(-3.0..3.0);
            (r, th)
        })
        .collect()
}

fn oracle_vs_integrator(circle: &ClosedCurve, opts: &BatteryOptions, rng: &mut ChaCha8Rng) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for (r, th0) in random_configs(rng, 20) {
        let traj = integrate_rse(circle, r, th0, (0.0, 10.0 * PI), &opts.cfg)?;
        for s in &traj.samples {
            worst = worst.max((s.theta - theta_exact(r, th0, s.t)?).abs());
        }
    }
    Ok((worst, "20 random (R, theta0) over t in [0, 10 pi]".into()))
}

fn rotation_law(circle: &ClosedCurve, opts: &BatteryOptions) -> Result<(f64, String)> {
    let grid: Vec<f64> = (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect();
    let pts = rotation_sweep(circle, &grid, opts.n_periods, &opts.cfg)?;
    let mut worst = 0.0f64;
    for p in pts {
        let est = p.estimate.map_err(crate::Error::Hypothesis)?;
        worst = worst.max((est.value - rotation_number_circle(p.radius)?).abs());
    }
    Ok((worst, format!("50 points in [0.1, 5], n = {}", opts.n_periods)))
}

fn equilibrium_stability(circle: &ClosedCurve, opts: &BatteryOptions) -> Result<(f64, String)> {
    let r = 0.8;
    let (plus, _) = equilibria(r)?;
    let traj = integrate_rse(circle, r, plus + 0.1, (0.0, 20.0 * PI), &opts.cfg)?;
    let gap = |t: f64, p: Vec2| -> Result<f64> { Ok(p.distance(position_exact(r, plus, t)?)) };
    let first = gap(traj.first().t, traj.first().position)?;
    let last = gap(traj.last().t, traj.last().position)?;
    let shrinking = last < 1e-3 * first;
    Ok((
        if shrinking { last } else { f64::INFINITY },
        format!("gap to the circular curve: {first:.3e} at t = 0, {last:.3e} at t = 20 pi"),
    ))
}

fn minimal_period(circle: &ClosedCurve, opts: &BatteryOptions) -> Result<(f64, String)> {
    let r = subharmonic_distance(2, 1)?;
    let traj = integrate_rse(circle, r, 0.3, (0.0, 8.0 * PI), &opts.cfg)?;
    let (mut closure, mut min_half) = (0.0f64, f64::INFINITY);
    for i in 0..40 {
        let t = 4.0 * PI * i as f64 / 40.0;
        let p = traj.position_at(t).expect("inside span");
        closure = closure.max(p.distance(traj.position_at(t + 4.0 * PI).expect("inside span")));
        min_half = min_half.min(p.distance(traj.position_at(t + TAU).expect("inside span")));
    }
    let err = if min_half > 0.1 { closure } else { f64::INFINITY };
    Ok((err, format!("max |r(t+4pi)-r(t)| = {closure:.3e}, min |r(t+2pi)-r(t)| = {min_half:.3}")))
}

fn density(circle: &ClosedCurve, opts: &BatteryOptions, rng: &mut ChaCha8Rng) -> Result<(f64, String)> {
    let r = 1.5;
    let traj = integrate_rse(circle, r, 0.0, (0.0, 500.0 * PI), &opts.cfg)?;
    let pts: Vec<Vec2> = traj.samples.iter().map(|s| s.position).collect();
    let (a, b) = (r - 1.0, r + 1.0);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        // Uniform in area.
        let rad = rng.gen_range(a * a..b * b).sqrt();
        let target = Vec2::polar(rng.gen_range(0.0..TAU)) * rad;
        let d = pts.iter().map(|p| p.distance(target)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok((worst, "R = 3/2, horizon 500 pi, 200 uniform annulus targets".into()))
}

fn distance_invariance(circle: &ClosedCurve, opts: &BatteryOptions) -> Result<(f64, String)> {
    let sign = if opts.fault == Some(Fault::FlipSeSign) { -1.0 } else { 1.0 };
    let mut worst = 0.0f64;
    for (r, th0) in [(0.5, 0.3), (0.8, -2.0), (1.5, 1.0)] {
        let start = circle.evaluate(0.0) + Vec2::polar(th0) * r;
        let path = integrate_se_signed(circle, start, (0.0, 10.0 * TAU), &opts.cfg, sign)?;
        for s in &path {
            let d = ((s.position - circle.evaluate(s.t)).norm() - r).abs() / f64::max(1.0, r);
            worst = worst.max(d);
        }
    }
    Ok((worst, "direct planar integration, 3 starts, 10 periods".into()))
}

fn turning_times(circle: &ClosedCurve, opts: &BatteryOptions) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    let mut first_event = |r: f64, th0: f64, want: f64| -> Result<f64> {
        let traj = integrate_rse(circle, r, th0, (-TAU, TAU), &opts.cfg)?;
        let ev = detect_singular_times(circle, &traj)?;
        let e = ev.first().map(|e| (e.time - want).abs()).unwrap_or(f64::INFINITY);
        worst = worst.max(e);
        Ok(e)
    };
    first_event(1.0, FRAC_PI_2, turning_time_r1(FRAC_PI_2)?)?;
    first_event(0.8, FRAC_PI_4, turning_time_small_r(0.8, FRAC_PI_4)?)?;
    let r = 2f64.sqrt();
    let traj = integrate_rse(circle, r, 0.5, (0.0, 4.0 * TAU), &opts.cfg)?;
    let ev = detect_singular_times(circle, &traj)?;
    let oracle = turning_data_large_r(r, 0.5, -4..64)?;
    if ev.len() < 4 {
        worst = f64::INFINITY;
    }
    for e in &ev {
        let o = oracle
            .iter()
            .min_by(|a, b| (a.time - e.time).abs().total_cmp(&(b.time - e.time).abs()))
            .expect("non-empty");
        worst = worst.max((e.time - o.time).abs()).max(e.location.distance(o.point));
    }
    Ok((worst, format!("R = 1, 4/5 and sqrt 2 ({} cusps)", ev.len())))
}

fn closed_form_consistency() -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for (p, q) in [(2u64, 1u64), (3, 1), (3, 2), (17, 5)] {
        let rho = rotation_number_circle(subharmonic_distance(p, q)?)?;
        worst = worst.max((rho - (p - q) as f64 / p as f64).abs());
    }
    // The stable circular angle is a fixed point of φ.
    let (plus, _) = equilibria(0.8)?;
    worst = worst.max((phi_of_t(0.8, plus, 7.0)? - plus).abs());
    Ok((worst, "subharmonic rotation numbers and equilibria".into()))
}

/// Runs every circle check and collects a scorecard. Errors inside a check
/// are recorded as failures rather than aborting the battery.
pub fn cross_validate(opts: &BatteryOptions) -> Result<Scorecard> {
    let circle = ClosedCurve::circle(1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.n_periods as f64;
    let checks = vec![
        check("oracle_vs_integrator", oracle_vs_integrator(&circle, opts, &mut rng), 1e-6),
        check("rotation_law", rotation_law(&circle, opts), 1.0 / n + 1e-6),
        check("equilibrium_stability", equilibrium_stability(&circle, opts), 1e-6),
        check("subharmonic_minimal_period", minimal_period(&circle, opts), 1e-6),
        check("ergodic_density", density(&circle, opts, &mut rng), 0.05),
        check("distance_invariance", distance_invariance(&circle, opts), 1e-7),
        check("turning_times", turning_times(&circle, opts), 1e-6),
        check("closed_form_consistency", closed_form_consistency(), 1e-12),
    ];
    Ok(Scorecard {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
