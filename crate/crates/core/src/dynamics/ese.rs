use super::{check_radius, check_span, cover_span, IntegrationConfig};
use crate::error::{Error, Result};
use crate::geometry::ClosedCurve;
use crate::ode::{self, Mat3};
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

/// State of the linear system `x' = -(1/R) r₀' y`, `y' = -(1/R) r₀'·x`.
///
/// The system is linear, so any positive multiple of a solution is again a
/// solution with the same projection `x/y`. The stored state is rescaled to
/// keep `y` near one; `log_scale` records the accumulated factor, so the raw
/// solution is `exp(log_scale)·(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EseSample {
    pub t: f64,
    pub x: Vec2,
    pub y: f64,
    pub log_scale: f64,
    /// `r₀(t) + R x / y`.
    pub position: Vec2,
}

impl EseSample {
    /// `|y² − ‖x‖²|` relative to `y²`. Zero on the cone.
    pub fn cone_residual(&self) -> f64 {
        (self.y * self.y - self.x.norm_sq()).abs() / (self.y * self.y)
    }
}

#[derive(Debug, Clone)]
pub struct EseTrajectory {
    pub radius: f64,
    pub samples: Vec<EseSample>,
}

impl EseTrajectory {
    pub fn max_cone_residual(&self) -> f64 {
        self.samples.iter().map(EseSample::cone_residual).fold(0.0, f64::max)
    }
}

fn generator(v: Vec2, inv_r: f64) -> Mat3 {
    let (a, b) = (-v.x * inv_r, -v.y * inv_r);
    [[0.0, 0.0, a], [0.0, 0.0, b], [a, b, 0.0]]
}

/// Integrates the extended system from `x(0) = (cos θ0, sin θ0)`, `y(0) = 1`
/// with a fourth-order Magnus scheme on the uniform grid of `cfg`. The
/// generators lie in the Lorentz algebra, so the cone `y² = ‖x‖²` is kept to
/// rounding error.
pub fn integrate_ese(
    curve: &ClosedCurve,
    radius: f64,
    theta0: f64,
    t_span: (f64, f64),
    cfg: &IntegrationConfig,
) -> Result<EseTrajectory> {
    check_radius(radius)?;
    check_span(t_span)?;
    cfg.validate()?;
    let inv_r = 1.0 / radius;
    let u = Vec2::polar(theta0);
    let start = ([u.x, u.y, 1.0], 0.0f64);
    let nodes = cover_span(t_span, start, |t0, (z0, s0), t1| {
        let mut out = vec![(t0, (z0, s0))];
        if t1 == t0 {
            return Ok(out);
        }
        let n = cfg.steps_for(t1 - t0);
        let h = (t1 - t0) / n as f64;
        let (mut z, mut scale) = (z0, s0);
        for i in 0..n {
            let t = t0 + i as f64 * h;
            let a1 = generator(curve.derivative(t + ode::MAGNUS_NODES[0] * h), inv_r);
            let a2 = generator(curve.derivative(t + ode::MAGNUS_NODES[1] * h), inv_r);
            z = ode::magnus4_step(&a1, &a2, h, &z);
            let tn = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
            if !(z[2] > 0.0) || !z[2].is_finite() {
                return Err(Error::ConeViolation { t: tn, y: z[2] });
            }
            if !(0.5..=2.0).contains(&z[2]) {
                let y = z[2];
                z = z.map(|c| c / y);
                scale += y.ln();
            }
            out.push((tn, (z, scale)));
        }
        Ok(out)
    })?;
    let samples = nodes
        .into_iter()
        .map(|(t, (z, log_scale))| {
            let x = Vec2::new(z[0], z[1]);
            EseSample {
                t,
                x,
                y: z[2],
                log_scale,
                position: curve.evaluate(t) + x * (radius / z[2]),
            }
        })
        .collect();
    Ok(EseTrajectory { radius, samples })
}
