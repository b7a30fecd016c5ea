use super::{check_span, cover_span, IntegrationConfig, Method};
use crate::error::{Error, Result};
use crate::geometry::ClosedCurve;
use crate::ode;
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub position: Vec2,
}

/// Integrates the planar system `r' = (r₀'·(r − r₀)) / ‖r − r₀‖² (r − r₀)`
/// directly, starting from `r(0) = r_init`.
pub fn integrate_se_direct(
    curve: &ClosedCurve,
    r_init: Vec2,
    t_span: (f64, f64),
    cfg: &IntegrationConfig,
) -> Result<Vec<PathSample>> {
    integrate_se_signed(curve, r_init, t_span, cfg, 1.0)
}

/// As [`integrate_se_direct`] with the vector field multiplied by `sign`.
/// A sign of `-1` breaks distance conservation and exists for fault-injection
/// tests of the validation battery.
pub(crate) fn integrate_se_signed(
    curve: &ClosedCurve,
    r_init: Vec2,
    t_span: (f64, f64),
    cfg: &IntegrationConfig,
    sign: f64,
) -> Result<Vec<PathSample>> {
    check_span(t_span)?;
    cfg.validate()?;
    let radius = (r_init - curve.evaluate(0.0)).norm();
    if !(radius > 1e-12 * curve.scale()) {
        return Err(Error::CoincidentStart);
    }
    let mut field = |t: f64, y: &[f64; 2]| {
        let j = curve.jet(t);
        let d = Vec2::new(y[0], y[1]) - j.point;
        let v = d * (sign * j.d1.dot(d) / d.norm_sq());
        [v.x, v.y]
    };
    let guard = |t: f64, y: &[f64; 2]| -> Result<()> {
        let distance = (Vec2::new(y[0], y[1]) - curve.evaluate(t)).norm();
        if distance < 0.5 * radius || !distance.is_finite() {
            return Err(Error::SingularApproach { t, distance });
        }
        Ok(())
    };
    let nodes = cover_span(t_span, [r_init.x, r_init.y], |t0, y0, t1| {
        let mut out = vec![(t0, y0)];
        match cfg.method {
            Method::Rk4 => {
                if t1 != t0 {
                    let n = cfg.steps_for(t1 - t0);
                    let h = (t1 - t0) / n as f64;
                    let mut y = y0;
                    for i in 0..n {
                        y = ode::rk4_step(&mut field, t0 + i as f64 * h, &y, h);
                        let t = if i + 1 == n { t1 } else { t0 + (i + 1) as f64 * h };
                        guard(t, &y)?;
                        out.push((t, y));
                    }
                }
            }
            Method::Rk45 => {
                let nodes = ode::dopri45(&mut field, t0, y0, t1, cfg.adaptive_options())?;
                for n in nodes.into_iter().skip(1) {
                    guard(n.t, &n.y)?;
                    out.push((n.t, n.y));
                }
            }
        }
        Ok(out)
    })?;
    Ok(nodes
        .into_iter()
        .map(|(t, y)| PathSample {
            t,
            position: Vec2::new(y[0], y[1]),
        })
        .collect())
}
