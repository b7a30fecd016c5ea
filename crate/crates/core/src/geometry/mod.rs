//! Smooth closed planar curves carried by truncated Fourier series.
//!
//! A [`ClosedCurve`] is a 2π-periodic map `t ↦ (ξ(t), η(t))`. Periodicity is
//! exact by construction and every derivative is obtained term by term, so
//! the dynamics code never differentiates numerically.

mod reparam;
mod spec;

pub use spec::{CurveSpec, FourierSpec};

use crate::error::{Error, Result};
use crate::vec2::Vec2;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// Grid used for regularity checks, rotation index and curvature extrema.
pub const GEOMETRY_GRID: usize = 4096;

const SPEED_FLOOR: f64 = 1e-8;
const MAX_UNWRAP_DEPTH: u32 = 48;

/// `f(t) = a0 + Σ_k a_k cos(kt) + b_k sin(kt)`, `k = 1..=K`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FourierSeries {
    pub a0: f64,
    /// Cosine coefficients, `a[k-1]` multiplies `cos(kt)`.
    pub a: Vec<f64>,
    /// Sine coefficients, `b[k-1]` multiplies `sin(kt)`.
    pub b: Vec<f64>,
}

impl FourierSeries {
    pub fn new(a0: f64, mut a: Vec<f64>, mut b: Vec<f64>) -> Self {
        let k = a.len().max(b.len());
        a.resize(k, 0.0);
        b.resize(k, 0.0);
        FourierSeries { a0, a, b }
    }

    pub fn constant(a0: f64) -> Self {
        FourierSeries::new(a0, vec![], vec![])
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    fn is_zero(&self) -> bool {
        self.a0 == 0.0 && self.a.iter().chain(&self.b).all(|&c| c == 0.0)
    }

    fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.a.iter().chain(&self.b).all(|c| c.is_finite())
    }

    /// Value and first three derivatives, given `cos(kt)`, `sin(kt)` tables.
    #[inline]
    fn jet(&self, cs: &[(f64, f64)]) -> [f64; 4] {
        let mut out = [self.a0, 0.0, 0.0, 0.0];
        for (i, ((&a, &b), &(c, s))) in self.a.iter().zip(&self.b).zip(cs).enumerate() {
            let k = (i + 1) as f64;
            let even = a * c + b * s;
            let odd = b * c - a * s;
            out[0] += even;
            out[1] += k * odd;
            out[2] -= k * k * even;
            out[3] -= k * k * k * odd;
        }
        out
    }

    #[inline]
    fn first_derivative(&self, cs: &[(f64, f64)]) -> f64 {
        let mut d = 0.0;
        for (i, ((&a, &b), &(c, s))) in self.a.iter().zip(&self.b).zip(cs).enumerate() {
            d += (i + 1) as f64 * (b * c - a * s);
        }
        d
    }

    fn time_shifted(&self, beta: f64) -> Self {
        let (a, b) = self
            .a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(i, (&a, &b))| {
                let (s, c) = ((i + 1) as f64 * beta).sin_cos();
                (a * c + b * s, b * c - a * s)
            })
            .unzip();
        FourierSeries { a0: self.a0, a, b }
    }

    fn combine(&self, p: f64, other: &FourierSeries, q: f64) -> Self {
        let k = self.degree().max(other.degree());
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        FourierSeries {
            a0: p * self.a0 + q * other.a0,
            a: (0..k).map(|i| p * at(&self.a, i) + q * at(&other.a, i)).collect(),
            b: (0..k).map(|i| p * at(&self.b, i) + q * at(&other.b, i)).collect(),
        }
    }
}

/// `cos(kt), sin(kt)` for `k = 1..=n` by angle addition.
#[inline]
fn harmonics(t: f64, n: usize, out: &mut Vec<(f64, f64)>) {
    out.clear();
    if n == 0 {
        return;
    }
    let (s1, c1) = t.sin_cos();
    let (mut c, mut s) = (c1, s1);
    out.push((c, s));
    for k in 2..=n {
        // Re-anchor periodically to keep the recurrence from drifting.
        if k % 16 == 0 {
            let (sk, ck) = (k as f64 * t).sin_cos();
            c = ck;
            s = sk;
        } else {
            let nc = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = nc;
        }
        out.push((c, s));
    }
}

/// A regular, smooth, 2π-periodic planar curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "CurveSpec", try_from = "CurveSpec")]
pub struct ClosedCurve {
    x: FourierSeries,
    y: FourierSeries,
    rotation_index: i64,
    /// Lifted tangent angle on the uniform geometry grid over `[0, 2π]`.
    psi_grid: Arc<[f64]>,
}

impl PartialEq for ClosedCurve {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }
}

/// Local differential data of a curve at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct CurveJet {
    pub point: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
    pub d3: Vec2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    /// Length of one period, ℓ₀.
    pub perimeter: f64,
    /// Algebraic area `∮ x dy`.
    pub signed_area: f64,
    pub rotation_index: i64,
    /// `ℓ₀ / 2π`, the speed of the normalized arc-length parameterization.
    pub mu: f64,
    pub r_min: f64,
    /// `f64::INFINITY` when the curvature vanishes somewhere.
    pub r_max: f64,
}

impl CurveMetrics {
    pub fn curvature_vanishes(&self) -> bool {
        self.r_max.is_infinite()
    }
}

impl ClosedCurve {
    pub fn circle(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        Self::from_fourier(
            FourierSeries::new(0.0, vec![radius], vec![0.0]),
            FourierSeries::new(0.0, vec![0.0], vec![radius]),
        )
    }

    /// `ξ = cos t, η = b sin t`.
    pub fn ellipse(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::param("b", format!("must be positive, got {b}")));
        }
        Self::from_fourier(
            FourierSeries::new(0.0, vec![1.0], vec![0.0]),
            FourierSeries::new(0.0, vec![0.0], vec![b]),
        )
    }

    /// Builds a curve from coefficient series, rejecting degenerate and
    /// non-regular input.
    pub fn from_fourier(x: FourierSeries, y: FourierSeries) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::CurveSpec("non-finite coefficient".into()));
        }
        if x.is_zero() && y.is_zero() {
            return Err(Error::DegenerateCurve);
        }
        let k = x.degree().max(y.degree());
        let x = x.combine(1.0, &FourierSeries::new(0.0, vec![0.0; k], vec![]), 0.0);
        let y = y.combine(1.0, &FourierSeries::new(0.0, vec![0.0; k], vec![]), 0.0);
        let mut curve = ClosedCurve {
            x,
            y,
            rotation_index: 0,
            psi_grid: Arc::from(Vec::new()),
        };
        curve.check_regular()?;
        curve.build_angle_table()?;
        Ok(curve)
    }

    pub fn x_series(&self) -> &FourierSeries {
        &self.x
    }

    pub fn y_series(&self) -> &FourierSeries {
        &self.y
    }

    pub fn degree(&self) -> usize {
        self.x.degree()
    }

    fn check_regular(&self) -> Result<()> {
        let n = 2 * GEOMETRY_GRID;
        let mut cs = Vec::with_capacity(self.degree());
        let (mut min_speed, mut t_min, mut max_speed) = (f64::INFINITY, 0.0, 0.0f64);
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            harmonics(t, self.degree(), &mut cs);
            let v = Vec2::new(self.x.first_derivative(&cs), self.y.first_derivative(&cs));
            let s = v.norm();
            max_speed = max_speed.max(s);
            if s < min_speed {
                min_speed = s;
                t_min = t;
            }
        }
        if max_speed == 0.0 || min_speed <= SPEED_FLOOR * max_speed {
            return Err(Error::NotRegular {
                t: t_min,
                speed: min_speed,
            });
        }
        Ok(())
    }

    fn build_angle_table(&mut self) -> Result<()> {
        let n = GEOMETRY_GRID;
        let h = TAU / n as f64;
        let mut psi = Vec::with_capacity(n + 1);
        let mut v_prev = self.derivative(0.0);
        let mut acc = normalize_initial_angle(v_prev.angle());
        psi.push(acc);
        for i in 1..=n {
            let (t0, t1) = ((i - 1) as f64 * h, i as f64 * h);
            let v = self.derivative(t1);
            acc += self.angle_increment(t0, v_prev, t1, v, 0);
            psi.push(acc);
            v_prev = v;
        }
        let turns = (psi[n] - psi[0]) / TAU;
        let index = turns.round();
        let residual = (turns - index).abs();
        if residual > 1e-6 {
            return Err(Error::UnwrapResidual { residual });
        }
        self.rotation_index = index as i64;
        self.psi_grid = Arc::from(psi);
        Ok(())
    }

    /// Tangent-angle change from `t0` to `t1`, subdividing until every piece
    /// turns by less than π/2.
    fn angle_increment(&self, t0: f64, v0: Vec2, t1: f64, v1: Vec2, depth: u32) -> f64 {
        let d = v0.cross(v1).atan2(v0.dot(v1));
        if d.abs() < PI / 2.0 || depth >= MAX_UNWRAP_DEPTH {
            return d;
        }
        let tm = 0.5 * (t0 + t1);
        let vm = self.derivative(tm);
        self.angle_increment(t0, v0, tm, vm, depth + 1) + self.angle_increment(tm, vm, t1, v1, depth + 1)
    }

    pub fn jet(&self, t: f64) -> CurveJet {
        let mut cs = Vec::with_capacity(self.degree());
        harmonics(t, self.degree(), &mut cs);
        let jx = self.x.jet(&cs);
        let jy = self.y.jet(&cs);
        CurveJet {
            point: Vec2::new(jx[0], jy[0]),
            d1: Vec2::new(jx[1], jy[1]),
            d2: Vec2::new(jx[2], jy[2]),
            d3: Vec2::new(jx[3], jy[3]),
        }
    }

    pub fn evaluate(&self, t: f64) -> Vec2 {
        self.jet(t).point
    }

    pub fn derivative(&self, t: f64) -> Vec2 {
        let mut cs = Vec::with_capacity(self.degree());
        harmonics(t, self.degree(), &mut cs);
        Vec2::new(self.x.first_derivative(&cs), self.y.first_derivative(&cs))
    }

    pub fn second_derivative(&self, t: f64) -> Vec2 {
        self.jet(t).d2
    }

    /// Derivative with a caller-owned scratch buffer (hot integrator path).
    #[inline]
    pub(crate) fn derivative_with(&self, t: f64, cs: &mut Vec<(f64, f64)>) -> Vec2 {
        harmonics(t, self.degree(), cs);
        Vec2::new(self.x.first_derivative(cs), self.y.first_derivative(cs))
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.derivative(t).norm()
    }

    pub fn rotation_index(&self) -> i64 {
        self.rotation_index
    }

    /// Orientation used for the outer normal: `+1` unless the rotation
    /// index is negative.
    pub fn orientation(&self) -> f64 {
        if self.rotation_index < 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Continuous tangent angle ψ(t) with ψ(0) ∈ [-π, π).
    pub fn tangent_angle(&self, t: f64) -> f64 {
        let n = GEOMETRY_GRID as f64;
        let periods = (t / TAU).floor();
        let tr = t - periods * TAU;
        let j = ((tr / TAU * n).round() as usize).min(GEOMETRY_GRID);
        let tj = TAU * j as f64 / n;
        let inc = self.angle_increment(tj, self.derivative(tj), tr, self.derivative(tr), 0);
        self.psi_grid[j] + inc + TAU * self.rotation_index as f64 * periods
    }

    /// ψ'(t) = det(r₀', r₀'') / ‖r₀'‖².
    pub fn tangent_angle_rate(&self, t: f64) -> f64 {
        let j = self.jet(t);
        j.d1.cross(j.d2) / j.d1.norm_sq()
    }

    /// Speed B(tᵢ) and unwrapped tangent angle ψ(tᵢ) on a strictly
    /// increasing grid.
    pub fn speed_and_angle(&self, t_grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("t_grid", "must be strictly increasing"));
        }
        let mut speeds = Vec::with_capacity(t_grid.len());
        let mut angles = Vec::with_capacity(t_grid.len());
        let Some(&first) = t_grid.first() else {
            return Ok((speeds, angles));
        };
        let mut v_prev = self.derivative(first);
        let mut acc = self.tangent_angle(first);
        for (i, &t) in t_grid.iter().enumerate() {
            let v = self.derivative(t);
            if i > 0 {
                acc += self.angle_increment(t_grid[i - 1], v_prev, t, v, 0);
            }
            let b = v.norm();
            if b == 0.0 {
                return Err(Error::NotRegular { t, speed: b });
            }
            speeds.push(b);
            angles.push(acc);
            v_prev = v;
        }
        Ok((speeds, angles))
    }

    /// Signed curvature `det(r₀', r₀'') / ‖r₀'‖³`.
    pub fn curvature(&self, t: f64) -> f64 {
        let j = self.jet(t);
        j.d1.cross(j.d2) / j.d1.norm().powi(3)
    }

    pub fn perimeter(&self) -> Result<f64> {
        periodic_quadrature(|t| self.speed(t))
    }

    /// Algebraic area `∮ x dy`, cross-checked against `-∮ y dx`.
    pub fn enclosed_area(&self) -> Result<f64> {
        let a1 = periodic_quadrature(|t| {
            let j = self.jet(t);
            j.point.x * j.d1.y
        })?;
        let a2 = periodic_quadrature(|t| {
            let j = self.jet(t);
            -j.point.y * j.d1.x
        })?;
        let scale = self.scale().powi(2).max(1.0);
        if (a1 - a2).abs() > 1e-8 * scale {
            return Err(Error::QuadratureNonConvergence {
                estimate: a1,
                change: (a1 - a2).abs(),
            });
        }
        Ok(a1)
    }

    /// Extremes of the radius of curvature `1/|κ|`. `r_max` is infinite when
    /// κ changes sign or vanishes on the grid.
    pub fn radius_of_curvature_extrema(&self) -> (f64, f64) {
        let n = GEOMETRY_GRID;
        let h = TAU / n as f64;
        let kappa: Vec<f64> = (0..n).map(|i| self.curvature(i as f64 * h)).collect();
        let abs_k = |t: f64| self.curvature(t).abs();
        let (i_max, _) = argmax(kappa.iter().map(|k| k.abs()));
        let (i_min, k_min) = argmax(kappa.iter().map(|k| -k.abs()));
        let kmax = polish_max(&abs_k, (i_max as f64 - 1.0) * h, i_max as f64 * h, (i_max as f64 + 1.0) * h);
        let r_min = 1.0 / kmax;
        let sign_change = kappa.iter().any(|k| k.signum() != kappa[0].signum());
        if sign_change || -k_min <= 1e-12 * kmax {
            return (r_min, f64::INFINITY);
        }
        let neg = |t: f64| -abs_k(t);
        let kmin = -polish_max(&neg, (i_min as f64 - 1.0) * h, i_min as f64 * h, (i_min as f64 + 1.0) * h);
        (r_min, 1.0 / kmin)
    }

    pub fn metrics(&self) -> Result<CurveMetrics> {
        let perimeter = self.perimeter()?;
        let signed_area = self.enclosed_area()?;
        let (r_min, r_max) = self.radius_of_curvature_extrema();
        Ok(CurveMetrics {
            perimeter,
            signed_area,
            rotation_index: self.rotation_index,
            mu: perimeter / TAU,
            r_min,
            r_max,
        })
    }

    /// Unit outer normal: the unit tangent turned by -π/2 for positively
    /// oriented curves and by +π/2 otherwise.
    pub fn outer_normal(&self, t: f64) -> Vec2 {
        let v = self.derivative(t);
        let u = v * (1.0 / v.norm());
        if self.orientation() > 0.0 {
            -u.perp()
        } else {
            u.perp()
        }
    }

    /// Point of the parallel (offset) curve at signed distance `d`.
    pub fn parallel_curve_point(&self, d: f64, t: f64) -> Vec2 {
        self.evaluate(t) + self.outer_normal(t) * d
    }

    /// Rough size of the curve, used to scale absolute tolerances.
    pub fn scale(&self) -> f64 {
        let amp = |f: &FourierSeries| f.a.iter().chain(&f.b).map(|c| c.abs()).sum::<f64>();
        amp(&self.x).max(amp(&self.y)).max(f64::MIN_POSITIVE)
    }

    // Exact transformations of the coefficient representation.

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::param("c", "dilation factor must be positive"));
        }
        let zero = FourierSeries::default();
        Self::from_fourier(self.x.combine(c, &zero, 0.0), self.y.combine(c, &zero, 0.0))
    }

    pub fn translated(&self, v: Vec2) -> Result<Self> {
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        x.a0 += v.x;
        y.a0 += v.y;
        Self::from_fourier(x, y)
    }

    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        Self::from_fourier(self.x.combine(c, &self.y, -s), self.x.combine(s, &self.y, c))
    }

    /// The curve `t ↦ r₀(t + β)`.
    pub fn time_shifted(&self, beta: f64) -> Result<Self> {
        Self::from_fourier(self.x.time_shifted(beta), self.y.time_shifted(beta))
    }

    pub fn normalized_arclength_reparam(&self, degree: usize) -> Result<Self> {
        reparam::normalized_arclength(self, degree)
    }
}

fn normalize_initial_angle(a: f64) -> f64 {
    if a >= PI {
        a - TAU
    } else {
        a
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> (usize, f64) {
    values
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| if v > best.1 { (i, v) } else { best })
}

/// Trapezoid rule on a full period, doubling the node count until the
/// relative change drops below 1e-10. Converges geometrically for analytic
/// periodic integrands.
pub(crate) fn periodic_quadrature(f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut n = 64usize;
    let mut sum: f64 = (0..n).map(|i| f(TAU * i as f64 / n as f64)).sum();
    let mut est = sum * TAU / n as f64;
    while n < (1 << 20) {
        // Midpoints of the current grid.
        let mid: f64 = (0..n).map(|i| f(TAU * (i as f64 + 0.5) / n as f64)).sum();
        sum += mid;
        n *= 2;
        let next = sum * TAU / n as f64;
        let change = (next - est).abs();
        est = next;
        if change <= 1e-10 * next.abs().max(1e-300) || change < 1e-15 {
            return Ok(est);
        }
    }
    Err(Error::QuadratureNonConvergence {
        estimate: est,
        change: f64::NAN,
    })
}

/// Maximizes `f` near `b`, where `f(b)` is at least `f(a)` and `f(c)`, by
/// successive parabolic interpolation with a golden-section fallback.
pub(crate) fn polish_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut c: f64) -> f64 {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut fa, mut fb, mut fc) = (f(a), f(b), f(c));
    for _ in 0..200 {
        if c - a < 1e-13 * (1.0 + b.abs()) {
            break;
        }
        let p = (b - a) * (fb - fc);
        let q = (b - c) * (fb - fa);
        let denom = p - q;
        let mut x = if denom != 0.0 {
            b - 0.5 * ((b - a) * p - (b - c) * q) / denom
        } else {
            f64::NAN
        };
        let margin = 1e-3 * (c - a);
        if !(x > a + margin && x < c - margin) || (x - b).abs() < 1e-15 {
            x = if b - a > c - b { b - GOLD * (b - a) } else { b + GOLD * (c - b) };
        }
        let fx = f(x);
        if fx >= fb {
            if x < b {
                c = b;
                fc = fb;
            } else {
                a = b;
                fa = fb;
            }
            b = x;
            fb = fx;
        } else if x < b {
            a = x;
            fa = fx;
        } else {
            c = x;
            fc = fx;
        }
    }
    fb
}
