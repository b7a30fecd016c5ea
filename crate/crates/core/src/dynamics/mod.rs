//! Integrators for the shadowing equation in its three forms: the direct
//! planar system, the linear extended system and the scalar bearing-angle
//! equation `θ' = -(1/R)(-ξ' sin θ + η' cos θ)`.

mod ese;
mod se;

pub use ese::{integrate_ese, EseSample, EseTrajectory};
pub use se::{integrate_se_direct, PathSample};
pub(crate) use se::integrate_se_signed;

use crate::error::{Error, Result};
use crate::geometry::ClosedCurve;
use crate::ode::{self, AdaptiveOptions};
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Classical RK4 on a uniform grid. Bit-reproducible.
    Rk4,
    /// Dormand–Prince 5(4) with step control.
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub method: Method,
    pub steps_per_period: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            method: Method::Rk4,
            steps_per_period: 4096,
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_step: TAU / 64.0,
        }
    }
}

impl IntegrationConfig {
    pub fn rk4(steps_per_period: usize) -> Self {
        IntegrationConfig {
            steps_per_period,
            ..Default::default()
        }
    }

    pub fn adaptive(tol: f64) -> Self {
        IntegrationConfig {
            method: Method::Rk45,
            abs_tol: tol,
            rel_tol: tol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps_per_period < 64 {
            return Err(Error::param("steps_per_period", format!("must be at least 64, got {}", self.steps_per_period)));
        }
        for (name, tol) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::param(name, format!("must lie in (0, 1e-3], got {tol}")));
            }
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(Error::param("max_step", "must be positive and finite"));
        }
        Ok(())
    }

    pub(crate) fn step(&self) -> f64 {
        TAU / self.steps_per_period as f64
    }

    fn adaptive_options(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_step: self.max_step,
        }
    }

    /// Number of uniform steps covering `span`, aligned so that whole periods
    /// land on grid points.
    pub(crate) fn steps_for(&self, span: f64) -> usize {
        let n = (span.abs() / self.step() - 1e-9).ceil();
        (n as usize).max(1)
    }
}

pub(crate) fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::param("R", format!("shadowing distance must be positive, got {radius}")))
    }
}

pub(crate) fn check_span(span: (f64, f64)) -> Result<()> {
    if span.0.is_finite() && span.1.is_finite() && span.0 <= span.1 {
        Ok(())
    } else {
        Err(Error::param("t_span", format!("need finite a <= b, got {span:?}")))
    }
}

/// Fixed-step RK4 is unstable once `h·max B / R` is of order one.
fn check_resolution(curve: &ClosedCurve, radius: f64, cfg: &IntegrationConfig) -> Result<()> {
    if cfg.method == Method::Rk4 {
        let stiffness = cfg.step() * curve.scale() / radius;
        if stiffness > 1.0 {
            return Err(Error::param(
                "steps_per_period",
                format!("{} steps per period cannot resolve R = {radius}", cfg.steps_per_period),
            ));
        }
    }
    Ok(())
}

#[inline]
fn rse_field(v: Vec2, inv_r: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    (v.x * s - v.y * c) * inv_r
}

/// Right-hand side of the bearing-angle equation.
pub fn rse_rhs(curve: &ClosedCurve, radius: f64, t: f64, theta: f64) -> f64 {
    rse_field(curve.derivative(t), 1.0 / radius, theta)
}

/// `α = r₀'·(r₀ − r)/R²` at the shadower `r = r₀ + R(cos θ, sin θ)`.
/// Positive when the shadower moves toward the escaper; then `r' = α(r₀ − r)`.
pub fn alpha(curve: &ClosedCurve, radius: f64, t: f64, theta: f64) -> f64 {
    let v = curve.derivative(t);
    let offset = Vec2::polar(theta) * radius;
    v.dot(-offset) / (radius * radius)
}

/// The same quantity as [`alpha`] written as `-(B/R) cos(θ − ψ)`.
pub fn alpha_polar(curve: &ClosedCurve, radius: f64, t: f64, theta: f64) -> f64 {
    let v = curve.derivative(t);
    -(v.norm() / radius) * (theta - v.angle()).cos()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    /// Lifted bearing angle, never reduced modulo 2π.
    pub theta: f64,
    pub position: Vec2,
    pub alpha: f64,
}

/// A solution of the bearing-angle equation with reconstructed positions.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub radius: f64,
    pub theta0: f64,
    pub samples: Vec<TrajectorySample>,
    dtheta: Vec<f64>,
    curve: ClosedCurve,
}

impl Trajectory {
    pub fn curve(&self) -> &ClosedCurve {
        &self.curve
    }

    pub fn dtheta(&self) -> &[f64] {
        &self.dtheta
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// Index `i` with `t_i <= t <= t_{i+1}`, if `t` lies inside the span.
    pub(crate) fn interval_of(&self, t: f64) -> Option<usize> {
        let s = &self.samples;
        if s.len() < 2 || t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let i = s.partition_point(|x| x.t <= t);
        Some(i.saturating_sub(1).min(s.len() - 2))
    }

    /// Cubic Hermite dense output of θ.
    pub fn theta_at(&self, t: f64) -> Option<f64> {
        if self.samples.len() == 1 {
            return (t == self.samples[0].t).then_some(self.samples[0].theta);
        }
        let i = self.interval_of(t)?;
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        Some(ode::hermite(a.t, a.theta, self.dtheta[i], b.t, b.theta, self.dtheta[i + 1], t))
    }

    /// Position reconstructed from the dense-output angle.
    pub fn position_at(&self, t: f64) -> Option<Vec2> {
        self.theta_at(t)
            .map(|th| self.curve.evaluate(t) + Vec2::polar(th) * self.radius)
    }

    /// Largest `| ‖r − r₀‖ − R |` over the samples.
    pub fn max_distance_error(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| ((s.position - self.curve.evaluate(s.t)).norm() - self.radius).abs())
            .fold(0.0, f64::max)
    }
}

/// `(t, θ, θ')` nodes of one integration leg.
type Leg = Vec<(f64, f64, f64)>;

fn rk4_leg(curve: &ClosedCurve, radius: f64, t0: f64, theta0: f64, t1: f64, cfg: &IntegrationConfig) -> Leg {
    let inv_r = 1.0 / radius;
    let mut cs = Vec::new();
    let mut v0 = curve.derivative_with(t0, &mut cs);
    let k0 = rse_field(v0, inv_r, theta0);
    let mut out = vec![(t0, theta0, k0)];
    if t1 == t0 {
        return out;
    }
    let n = cfg.steps_for(t1 - t0);
    let h = (t1 - t0) / n as f64;
    let mut theta = theta0;
    let mut k1 = k0;
    for i in 0..n {
        let t = t0 + i as f64 * h;
        let tn = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
        let vm = curve.derivative_with(t + 0.5 * h, &mut cs);
        let v1 = curve.derivative_with(tn, &mut cs);
        let k2 = rse_field(vm, inv_r, theta + 0.5 * h * k1);
        let k3 = rse_field(vm, inv_r, theta + 0.5 * h * k2);
        let k4 = rse_field(v1, inv_r, theta + h * k3);
        theta += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        v0 = v1;
        k1 = rse_field(v0, inv_r, theta);
        out.push((tn, theta, k1));
    }
    out
}

fn adaptive_leg(
    curve: &ClosedCurve,
    radius: f64,
    t0: f64,
    theta0: f64,
    t1: f64,
    cfg: &IntegrationConfig,
) -> Result<Leg> {
    let inv_r = 1.0 / radius;
    let mut f = |t: f64, y: &[f64; 1]| [rse_field(curve.derivative(t), inv_r, y[0])];
    let nodes = ode::dopri45(&mut f, t0, [theta0], t1, cfg.adaptive_options())?;
    Ok(nodes.into_iter().map(|n| (n.t, n.y[0], n.dy[0])).collect())
}

/// Runs `leg` so that the result covers `[a, b]` in increasing time, with the
/// initial condition imposed at `t = 0`.
pub(crate) fn cover_span<S: Copy>(
    span: (f64, f64),
    s0: S,
    mut leg: impl FnMut(f64, S, f64) -> Result<Vec<(f64, S)>>,
) -> Result<Vec<(f64, S)>> {
    let (a, b) = span;
    let last = |v: &Vec<(f64, S)>| v.last().expect("leg is never empty").1;
    if a > 0.0 {
        let w = leg(0.0, s0, a)?;
        return leg(a, last(&w), b);
    }
    if b < 0.0 {
        let w = leg(0.0, s0, b)?;
        let mut out = leg(b, last(&w), a)?;
        out.reverse();
        return Ok(out);
    }
    let mut out = Vec::new();
    if a < 0.0 {
        let mut back = leg(0.0, s0, a)?;
        back.reverse();
        back.pop();
        out = back;
    }
    out.extend(leg(0.0, s0, b)?);
    Ok(out)
}

/// Integrates `θ' = -(1/R)(-ξ' sin θ + η' cos θ)` with `θ(0) = θ0` over `t_span`.
pub fn integrate_rse(
    curve: &ClosedCurve,
    radius: f64,
    theta0: f64,
    t_span: (f64, f64),
    cfg: &IntegrationConfig,
) -> Result<Trajectory> {
    check_radius(radius)?;
    check_span(t_span)?;
    cfg.validate()?;
    check_resolution(curve, radius, cfg)?;
    if !theta0.is_finite() {
        return Err(Error::param("theta0", "must be finite"));
    }
    let nodes = cover_span(t_span, (theta0, 0.0), |t0, s: (f64, f64), t1| {
        let leg = match cfg.method {
            Method::Rk4 => rk4_leg(curve, radius, t0, s.0, t1, cfg),
            Method::Rk45 => adaptive_leg(curve, radius, t0, s.0, t1, cfg)?,
        };
        Ok(leg.into_iter().map(|(t, th, d)| (t, (th, d))).collect())
    })?;
    let inv_r = 1.0 / radius;
    let mut samples = Vec::with_capacity(nodes.len());
    let mut dtheta = Vec::with_capacity(nodes.len());
    for (t, (theta, d)) in nodes {
        let jet = curve.jet(t);
        let u = Vec2::polar(theta);
        samples.push(TrajectorySample {
            t,
            theta,
            position: jet.point + u * radius,
            alpha: -jet.d1.dot(u) * inv_r,
        });
        dtheta.push(d);
    }
    Ok(Trajectory {
        radius,
        theta0,
        samples,
        dtheta,
        curve: curve.clone(),
    })
}

/// φ(t) = θ(t) − ψ(t) + π/2 on the trajectory's own sample times.
/// Satisfies `φ' = -(B/R) cos φ − ψ'`; singular times are exactly `φ ∈ πZ`.
pub fn phi_lift(curve: &ClosedCurve, trajectory: &Trajectory) -> Result<Vec<f64>> {
    if curve != trajectory.curve() {
        return Err(Error::CurveMismatch);
    }
    let (_, psi) = curve.speed_and_angle(&trajectory.times())?;
    Ok(trajectory
        .samples
        .iter()
        .zip(psi)
        .map(|(s, p)| s.theta - p + FRAC_PI_2)
        .collect())
}

/// The period-2π return map of the bearing-angle equation, acting on lifts.
#[derive(Debug, Clone)]
pub struct PoincareMap {
    inner: MapKind,
}

#[derive(Debug, Clone)]
enum MapKind {
    /// `r₀'` tabulated at the RK4 half-steps of one period.
    Table { inv_r: f64, h: f64, table: Vec<Vec2> },
    Adaptive { curve: ClosedCurve, radius: f64, cfg: IntegrationConfig },
}

impl PoincareMap {
    pub fn new(curve: &ClosedCurve, radius: f64, cfg: &IntegrationConfig) -> Result<Self> {
        check_radius(radius)?;
        cfg.validate()?;
        check_resolution(curve, radius, cfg)?;
        let inner = match cfg.method {
            Method::Rk4 => {
                let n = cfg.steps_per_period;
                let h = TAU / n as f64;
                let mut cs = Vec::new();
                let table = (0..=2 * n).map(|k| curve.derivative_with(0.5 * h * k as f64, &mut cs)).collect();
                MapKind::Table {
                    inv_r: 1.0 / radius,
                    h,
                    table,
                }
            }
            Method::Rk45 => MapKind::Adaptive {
                curve: curve.clone(),
                radius,
                cfg: *cfg,
            },
        };
        Ok(PoincareMap { inner })
    }

    /// θ(2π) for the solution with θ(0) = `theta`.
    pub fn apply(&self, theta: f64) -> Result<f64> {
        match &self.inner {
            MapKind::Table { inv_r, h, table } => {
                let (inv_r, h) = (*inv_r, *h);
                let mut th = theta;
                for w in table.windows(3).step_by(2) {
                    let k1 = rse_field(w[0], inv_r, th);
                    let k2 = rse_field(w[1], inv_r, th + 0.5 * h * k1);
                    let k3 = rse_field(w[1], inv_r, th + 0.5 * h * k2);
                    let k4 = rse_field(w[2], inv_r, th + h * k3);
                    th += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
                }
                Ok(th)
            }
            MapKind::Adaptive { curve, radius, cfg } => {
                let leg = adaptive_leg(curve, *radius, 0.0, theta, TAU, cfg)?;
                Ok(leg.last().expect("leg is never empty").1)
            }
        }
    }

    /// `n`-fold iterate.
    pub fn iterate(&self, theta: f64, n: usize) -> Result<f64> {
        let mut th = theta;
        for _ in 0..n {
            th = self.apply(th)?;
        }
        Ok(th)
    }

    /// `P(θ) − θ − 2π·shift`, the displacement of a lift.
    pub fn displacement(&self, theta: f64, shift: f64) -> Result<f64> {
        Ok(self.apply(theta)? - theta - TAU * shift)
    }
}

/// Wraps an angle to `(-π, π]`, for presentation only.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FourierSeries;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circle() -> ClosedCurve {
        ClosedCurve::circle(1.0).unwrap()
    }

    fn wobbly() -> ClosedCurve {
        ClosedCurve::from_fourier(
            FourierSeries::new(0.3, vec![1.0, 0.1, 0.0], vec![0.0, 0.05, 0.02]),
            FourierSeries::new(-0.2, vec![0.0, 0.0, 0.03], vec![1.4, -0.1, 0.0]),
        )
        .unwrap()
    }

    #[test]
    fn rhs_closed_forms() {
        let c = circle();
        let e = ClosedCurve::ellipse(2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (r, t, th): (f64, f64, f64) = (rng.gen_range(0.1..3.0), rng.gen_range(-10.0..10.0), rng.gen_range(-7.0..7.0));
            assert!((rse_rhs(&c, r, t, th) + (th - t).cos() / r).abs() < 1e-13);
            let want = -(t.sin() * th.sin() + 2.0 * t.cos() * th.cos()) / r;
            assert!((rse_rhs(&e, r, t, th) - want).abs() < 1e-13);
            assert!(rse_rhs(&e, r, t, th).abs() <= e.speed(t) / r + 1e-15);
        }
    }

    #[test]
    fn alpha_forms_agree() {
        let w = wobbly();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (r, t, th): (f64, f64, f64) = (rng.gen_range(0.1..3.0), rng.gen_range(-10.0..10.0), rng.gen_range(-7.0..7.0));
            let a = alpha(&w, r, t, th);
            assert!((a - alpha_polar(&w, r, t, th)).abs() < 1e-10 * (1.0 + a.abs()));
            // α > 0 means the velocity r' = α(r₀ − r) points at the escaper.
            let offset = Vec2::polar(th) * r;
            let velocity = -offset * a;
            assert!(a == 0.0 || (velocity.dot(-offset) > 0.0) == (a > 0.0));
        }
        assert!(alpha(&circle(), 0.7, 0.3, 0.3 + PI / 2.0 + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn circle_equilibrium_is_preserved() {
        let r: f64 = 0.8;
        let plus = -(FRAC_PI_2 + r.asin());
        let traj = integrate_rse(&circle(), r, plus, (0.0, 10.0 * TAU), &IntegrationConfig::default()).unwrap();
        let dev = traj.samples.iter().map(|s| (s.theta - s.t - plus).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-8, "{dev}");
    }

    #[test]
    fn circle_critical_distance_solution() {
        let traj = integrate_rse(&circle(), 1.0, 0.0, (0.0, TAU), &IntegrationConfig::default()).unwrap();
        for s in &traj.samples {
            assert!((((s.theta - s.t) / 2.0).tan() + s.t).abs() < 1e-8);
        }
    }

    #[test]
    fn empty_span_single_sample() {
        let w = wobbly();
        let traj = integrate_rse(&w, 0.5, 1.2, (0.0, 0.0), &IntegrationConfig::default()).unwrap();
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.first().theta, 1.2);
        assert_eq!(traj.theta_at(0.0), Some(1.2));
    }

    #[test]
    fn span_handling() {
        let c = circle();
        let cfg = IntegrationConfig::default();
        let full = integrate_rse(&c, 1.0, 0.0, (-2.0, 3.0), &cfg).unwrap();
        assert_eq!(full.first().t, -2.0);
        assert_eq!(full.last().t, 3.0);
        assert!(full.samples.windows(2).all(|w| w[1].t > w[0].t));
        for s in &full.samples {
            assert!((((s.theta - s.t) / 2.0).tan() + s.t).abs() < 1e-8);
        }
        let later = integrate_rse(&c, 1.0, 0.0, (1.0, 2.0), &cfg).unwrap();
        assert_eq!(later.first().t, 1.0);
        assert!((((later.last().theta - 2.0) / 2.0).tan() + 2.0).abs() < 1e-8);
        let earlier = integrate_rse(&c, 1.0, 0.0, (-3.0, -1.0), &cfg).unwrap();
        assert!((((earlier.first().theta + 3.0) / 2.0).tan() - 3.0).abs() < 1e-8);
        assert!(integrate_rse(&c, 1.0, 0.0, (1.0, 0.0), &cfg).is_err());
        assert!(integrate_rse(&c, 0.0, 0.0, (0.0, 1.0), &cfg).is_err());
    }

    #[test]
    fn adaptive_matches_fixed_step() {
        let w = wobbly();
        let a = integrate_rse(&w, 0.9, 0.4, (0.0, 3.0 * TAU), &IntegrationConfig::adaptive(1e-11)).unwrap();
        let b = integrate_rse(&w, 0.9, 0.4, (0.0, 3.0 * TAU), &IntegrationConfig::default()).unwrap();
        assert!((a.last().theta - b.last().theta).abs() < 1e-8);
        let mid = 5.0;
        // Dense output between the long adaptive steps is only cubic.
        assert!((a.theta_at(mid).unwrap() - b.theta_at(mid).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn distance_is_conserved() {
        let w = wobbly();
        let traj = integrate_rse(&w, 1.3, 2.0, (0.0, 10.0 * TAU), &IntegrationConfig::default()).unwrap();
        assert!(traj.max_distance_error() < 1e-12);
    }

    #[test]
    fn speed_bound_holds() {
        let w = wobbly();
        let traj = integrate_rse(&w, 0.7, 2.0, (0.0, TAU), &IntegrationConfig::default()).unwrap();
        for s in &traj.samples {
            let offset = s.position - w.evaluate(s.t);
            let speed = (offset * (-s.alpha)).norm();
            assert!(speed <= w.speed(s.t) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn poincare_map_properties() {
        let c = circle();
        let cfg = IntegrationConfig::default();
        let r: f64 = 0.5;
        let plus = -(FRAC_PI_2 + r.asin());
        let p = PoincareMap::new(&c, r, &cfg).unwrap();
        assert!((p.apply(plus).unwrap() - plus - TAU).abs() < 1e-9);
        let w = wobbly();
        let pw = PoincareMap::new(&w, 1.1, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a: f64 = rng.gen_range(-4.0..4.0);
            let b = a + rng.gen_range(1e-6..1.0);
            let (pa, pb) = (pw.apply(a).unwrap(), pw.apply(b).unwrap());
            assert!(pa < pb);
            assert!((pw.apply(a + TAU).unwrap() - pa - TAU).abs() < 1e-9);
        }
        // Same grid as integrate_rse over one period.
        let traj = integrate_rse(&w, 1.1, 0.3, (0.0, TAU), &cfg).unwrap();
        assert!((traj.last().theta - pw.apply(0.3).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn half_rotation_fixed_point_of_second_iterate() {
        let c = circle();
        let r = 2.0 / 3f64.sqrt();
        let p = PoincareMap::new(&c, r, &IntegrationConfig::default()).unwrap();
        // P² − 4π changes sign over a period; locate a zero by bisection.
        let g = |th: f64| p.iterate(th, 2).unwrap() - th - TAU;
        let grid: Vec<f64> = (0..=64).map(|i| TAU * i as f64 / 64.0).collect();
        let i = (0..64).find(|&i| g(grid[i]) * g(grid[i + 1]) <= 0.0).expect("sign change");
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if g(a) * g(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        assert!(g(a).abs() < 1e-8);
        // A period-two point, not a fixed point.
        assert!((p.apply(a).unwrap() - a - TAU).abs() > 0.1);
    }

    #[test]
    fn phi_lift_on_circle() {
        let c = circle();
        let r: f64 = 0.8;
        let plus = -(FRAC_PI_2 + r.asin());
        let traj = integrate_rse(&c, r, plus, (0.0, TAU), &IntegrationConfig::default()).unwrap();
        let phi = phi_lift(&c, &traj).unwrap();
        assert!(phi.iter().all(|p| (p - plus).abs() < 1e-8));
        let traj = integrate_rse(&c, 1.4, 0.2, (0.0, TAU), &IntegrationConfig::default()).unwrap();
        let phi = phi_lift(&c, &traj).unwrap();
        for (s, p) in traj.samples.iter().zip(&phi) {
            assert!((p - (s.theta - s.t)).abs() < 1e-12);
        }
        assert_eq!(phi_lift(&wobbly(), &traj), Err(Error::CurveMismatch));
    }

    #[test]
    fn phi_equation_by_finite_differences() {
        let w = wobbly();
        let r = 0.9;
        let traj = integrate_rse(&w, r, 0.1, (0.0, TAU), &IntegrationConfig::default()).unwrap();
        let phi = phi_lift(&w, &traj).unwrap();
        let s = &traj.samples;
        for i in (1..s.len() - 1).step_by(97) {
            let fd = (phi[i + 1] - phi[i - 1]) / (s[i + 1].t - s[i - 1].t);
            let t = s[i].t;
            let want = -(w.speed(t) / r) * phi[i].cos() - w.tangent_angle_rate(t);
            assert!((fd - want).abs() < 1e-4 * want.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_unresolvable_step() {
        let c = circle();
        let cfg = IntegrationConfig::rk4(64);
        assert!(integrate_rse(&c, 0.05, 0.0, (0.0, 1.0), &cfg).is_err());
        assert!(IntegrationConfig::rk4(32).validate().is_err());
        assert!(IntegrationConfig::adaptive(1e-2).validate().is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-0.5) + 0.5).abs() < 1e-15);
    }
}
