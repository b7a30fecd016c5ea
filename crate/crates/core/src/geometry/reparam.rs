use super::{ClosedCurve, FourierSeries};
use crate::error::{Error, Result};
use std::f64::consts::TAU;

const SPEED_TOL: f64 = 1e-6;

// 5-point Gauss–Legendre on [-1, 1].
const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

fn gauss(curve: &ClosedCurve, a: f64, b: f64) -> f64 {
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    GL_X.iter().zip(GL_W).map(|(&x, w)| w * curve.speed(m + h * x)).sum::<f64>() * h
}

/// Refits the curve at constant speed `μ = ℓ₀/2π` with `degree` harmonics.
pub(super) fn normalized_arclength(curve: &ClosedCurve, degree: usize) -> Result<ClosedCurve> {
    if degree == 0 {
        return Err(Error::param("degree", "must be at least 1"));
    }
    let m = 1024.max(8 * degree);
    let h = TAU / m as f64;
    // Cumulative arc length at the uniform t-grid.
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        cum.push(cum[i] + gauss(curve, a, b));
    }
    let length = cum[m];
    let mu = length / TAU;

    let arclength_at = |t: f64| {
        let i = ((t / h).floor() as usize).min(m - 1);
        cum[i] + gauss(curve, i as f64 * h, t)
    };

    let mut xs = Vec::with_capacity(m);
    let mut ys = Vec::with_capacity(m);
    let mut i = 0usize;
    for j in 0..m {
        let target = length * j as f64 / m as f64;
        while i + 1 < m && cum[i + 1] < target {
            i += 1;
        }
        let (s0, s1) = (cum[i], cum[i + 1]);
        let mut t = (i as f64 + (target - s0) / (s1 - s0)) * h;
        for _ in 0..20 {
            let dt = (arclength_at(t) - target) / curve.speed(t);
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        let p = curve.evaluate(t);
        xs.push(p.x);
        ys.push(p.y);
    }

    let fit = |v: &[f64]| {
        let a0 = v.iter().sum::<f64>() / m as f64;
        let mut a = Vec::with_capacity(degree);
        let mut b = Vec::with_capacity(degree);
        for k in 1..=degree {
            let (mut ca, mut cb) = (0.0, 0.0);
            for (j, &val) in v.iter().enumerate() {
                let (s, c) = (TAU * ((k * j) % m) as f64 / m as f64).sin_cos();
                ca += val * c;
                cb += val * s;
            }
            a.push(2.0 * ca / m as f64);
            b.push(2.0 * cb / m as f64);
        }
        FourierSeries::new(a0, a, b)
    };
    let out = ClosedCurve::from_fourier(fit(&xs), fit(&ys))?;

    let n = super::GEOMETRY_GRID;
    let achieved = (0..n)
        .map(|i| (out.speed(TAU * i as f64 / n as f64) / mu - 1.0).abs())
        .fold(0.0, f64::max);
    if achieved > SPEED_TOL {
        return Err(Error::RefitTooCoarse { degree, achieved });
    }
    Ok(out)
}
