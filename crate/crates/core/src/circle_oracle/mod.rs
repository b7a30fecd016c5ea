//! Closed-form shadowing curves for the unit circle `r₀(t) = e^{it}`.
//!
//! With `φ = θ − t` the bearing equation becomes the autonomous
//! `φ' = -(cos φ + R)/R`, which integrates explicitly in all three regimes
//! `R < 1`, `R = 1` and `R > 1`.

mod battery;

pub use battery::{cross_validate, BatteryOptions, Check, Fault, Scorecard};

use crate::error::{Error, Result};
use crate::vec2::Vec2;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Small,
    Critical,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleRegime {
    pub radius: f64,
    pub regime: Regime,
    /// `-√(R²−1)/R`, the drift rate of φ, for `R > 1`.
    pub rho_r: Option<f64>,
}

impl CircleRegime {
    pub fn new(radius: f64) -> Result<Self> {
        crate::dynamics::check_radius(radius)?;
        let (regime, rho_r) = if radius < 1.0 {
            (Regime::Small, None)
        } else if radius == 1.0 {
            (Regime::Critical, None)
        } else {
            (Regime::Large, Some(-(radius * radius - 1.0).sqrt() / radius))
        };
        Ok(CircleRegime { radius, regime, rho_r })
    }
}

fn small(radius: f64) -> Result<()> {
    crate::dynamics::check_radius(radius)?;
    if radius >= 1.0 {
        return Err(Error::param("R", format!("needs R < 1, got {radius}")));
    }
    Ok(())
}

fn large(radius: f64) -> Result<f64> {
    crate::dynamics::check_radius(radius)?;
    if radius <= 1.0 {
        return Err(Error::param("R", format!("needs R > 1, got {radius}")));
    }
    Ok(-(radius * radius - 1.0).sqrt() / radius)
}

fn checked_artanh(x: f64) -> Result<f64> {
    if x.abs() < 1.0 {
        Ok(x.atanh())
    } else {
        Err(Error::OracleDomain(format!("artanh argument {x} outside (-1, 1)")))
    }
}

/// Circular shadowing angles `(θ_R⁺, θ_R⁻)` for `R < 1`; `θ_R⁺` is the stable one.
pub fn equilibria(radius: f64) -> Result<(f64, f64)> {
    small(radius)?;
    let plus = -(FRAC_PI_2 + radius.asin());
    Ok((plus, -plus))
}

/// Splits a lift into `2πm + φ₀` with `φ₀ ∈ [lo, lo + 2π)`.
fn reduce(phi: f64, lo: f64) -> (f64, f64) {
    let m = ((phi - lo) / TAU).floor();
    let mut r = phi - TAU * m;
    // Guard against rounding pushing r to the upper end.
    if r >= lo + TAU {
        r -= TAU;
    }
    (m, r)
}

/// Which side of the equilibria a reduced small-R angle lies on.
enum SmallCell {
    Equilibrium,
    /// `(θ⁺, θ⁻)`: φ decreases, turning point where φ crosses 0.
    Falling,
    /// `(θ⁻, θ⁺ + 2π)`: φ increases, turning point where φ crosses π.
    Rising,
}

fn small_cell(radius: f64, phi0: f64) -> SmallCell {
    let (plus, minus) = (-(FRAC_PI_2 + radius.asin()), FRAC_PI_2 + radius.asin());
    if phi0 == plus || phi0 == minus {
        SmallCell::Equilibrium
    } else if phi0 < minus {
        SmallCell::Falling
    } else {
        SmallCell::Rising
    }
}

/// Constants `c = 2R/√(1−R²)`, `k = √((1−R)/(1+R))` of the small-R solution.
fn small_constants(radius: f64) -> (f64, f64) {
    let c = 2.0 * radius / (1.0 - radius * radius).sqrt();
    let k = ((1.0 - radius) / (1.0 + radius)).sqrt();
    (c, k)
}

/// Time of the unique turning point for `R < 1` starting from `θ(0) = θ0`.
pub fn turning_time_small_r(radius: f64, theta0: f64) -> Result<f64> {
    small(radius)?;
    let (plus, _) = equilibria(radius)?;
    let (_, phi0) = reduce(theta0, plus);
    let (c, k) = small_constants(radius);
    match small_cell(radius, phi0) {
        SmallCell::Equilibrium => Err(Error::param("theta0", "circular shadowing curve has no turning point")),
        SmallCell::Falling => Ok(c * checked_artanh(k * (phi0 / 2.0).tan())?),
        SmallCell::Rising => Ok(c * checked_artanh((phi0 / 2.0).tan().recip() / k)?),
    }
}

/// The shadowing curve for `R = 1`: `r(t) = e^{it}(1 + e^{iφ(t)})` with
/// `tan(φ/2) = tan(θ0/2) − t`.
pub fn sc_at_r_equal_1(theta0: f64, t: f64) -> Result<Vec2> {
    check_open_interval(theta0)?;
    let phi = 2.0 * ((theta0 / 2.0).tan() - t).atan();
    Ok(Vec2::polar(t) + Vec2::polar(t + phi))
}

/// Turning time `tan(θ0/2)` for `R = 1`.
pub fn turning_time_r1(theta0: f64) -> Result<f64> {
    check_open_interval(theta0)?;
    Ok((theta0 / 2.0).tan())
}

fn check_open_interval(theta0: f64) -> Result<()> {
    if theta0 > -PI && theta0 < PI {
        Ok(())
    } else {
        Err(Error::param(
            "theta0",
            "needs θ0 in (-π, π); θ0 = ±π is the constant curve at the origin",
        ))
    }
}

/// `F(φ) = (2/ρ_R) atan(√((R−1)/(R+1)) tan(φ/2))` on `(-π, π)`, continued by
/// `F(φ + 2π) = F(φ) + 2π/ρ_R`. Time along the large-R solution is
/// `t = F(φ(t)) − F(φ(0))`.
pub fn large_r_f(radius: f64, phi: f64) -> Result<f64> {
    let rho = large(radius)?;
    Ok(f_unchecked(radius, rho, phi))
}

fn f_unchecked(radius: f64, rho: f64, phi: f64) -> f64 {
    let kappa = ((radius - 1.0) / (radius + 1.0)).sqrt();
    let m = (phi / TAU).round();
    let r = phi - TAU * m;
    // atan2 keeps F continuous when rounding pushes `r` just past ±π.
    let h = r / 2.0;
    2.0 / rho * (kappa * h.sin()).atan2(h.cos()) + TAU * m / rho
}

/// Inverse of [`large_r_f`].
pub fn large_r_f_inverse(radius: f64, value: f64) -> Result<f64> {
    let rho = large(radius)?;
    let kappa = ((radius - 1.0) / (radius + 1.0)).sqrt();
    let m = (value * rho / TAU).round();
    let vr = value - TAU * m / rho;
    let s = vr * rho / 2.0;
    let mut phi = 2.0 * s.sin().atan2(kappa * s.cos()) + TAU * m;
    // F' = -R/(cos φ + R) never vanishes; Newton removes the rounding left by tan.
    for _ in 0..3 {
        let err = f_unchecked(radius, rho, phi) - value;
        let slope = -radius / (phi.cos() + radius);
        let step = err / slope;
        if !step.is_finite() {
            break;
        }
        phi -= step;
        if step.abs() < 1e-16 * (1.0 + phi.abs()) {
            break;
        }
    }
    Ok(phi)
}

/// `φ(t) = θ(t) − t` for the solution with `θ(0) = θ0`, in every regime.
pub fn phi_of_t(radius: f64, theta0: f64, t: f64) -> Result<f64> {
    let regime = CircleRegime::new(radius)?;
    match regime.regime {
        Regime::Small => {
            let (plus, _) = equilibria(radius)?;
            let (m, phi0) = reduce(theta0, plus);
            let (c, k) = small_constants(radius);
            let phi = match small_cell(radius, phi0) {
                SmallCell::Equilibrium => phi0,
                SmallCell::Falling => {
                    let g = c * checked_artanh(k * (phi0 / 2.0).tan())?;
                    2.0 * (((g - t) / c).tanh() / k).atan()
                }
                SmallCell::Rising => {
                    let h = c * checked_artanh((phi0 / 2.0).tan().recip() / k)?;
                    let cot = ((h - t) / c).tanh() * k;
                    2.0 * 1f64.atan2(cot)
                }
            };
            Ok(phi + TAU * m)
        }
        Regime::Critical => {
            let (m, phi0) = reduce(theta0, -PI);
            if phi0 == -PI {
                return Ok(theta0);
            }
            Ok(2.0 * ((phi0 / 2.0).tan() - t).atan() + TAU * m)
        }
        Regime::Large => large_r_f_inverse(radius, large_r_f(radius, theta0)? + t),
    }
}

/// Lifted bearing angle `θ(t) = t + φ(t)`.
pub fn theta_exact(radius: f64, theta0: f64, t: f64) -> Result<f64> {
    Ok(t + phi_of_t(radius, theta0, t)?)
}

/// Shadower position `e^{it}(1 + R e^{iφ(t)})`.
pub fn position_exact(radius: f64, theta0: f64, t: f64) -> Result<Vec2> {
    Ok(Vec2::polar(t) + Vec2::polar(theta_exact(radius, theta0, t)?) * radius)
}

/// `1` for `R ≤ 1`, `1 − √(R²−1)/R` beyond.
pub fn rotation_number_circle(radius: f64) -> Result<f64> {
    crate::dynamics::check_radius(radius)?;
    Ok(if radius <= 1.0 {
        1.0
    } else {
        1.0 - (radius * radius - 1.0).sqrt() / radius
    })
}

/// `R_{p,q} = p/√(p²−q²)`, where the rotation number is `(p−q)/p`.
pub fn subharmonic_distance(p: u64, q: u64) -> Result<f64> {
    if q == 0 || p <= q {
        return Err(Error::param("p, q", format!("need p > q >= 1, got ({p}, {q})")));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::param("p, q", format!("({p}, {q}) are not coprime")));
    }
    let (p, q) = (p as f64, q as f64);
    Ok(p / ((p - q) * (p + q)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub k: i64,
    pub time: f64,
    pub point: Vec2,
}

/// Turning points `τ_k = τ₀ + kπ/|ρ_R|`, `r_k = (−1)^k (R + (−1)^k) e^{iτ_k}`
/// for `R > 1`. `τ₀` is the time nearest zero at which φ hits the even
/// multiple of π closest to `θ0`, so even `k` lie on the outer circle.
pub fn turning_data_large_r(radius: f64, theta0: f64, ks: std::ops::Range<i64>) -> Result<Vec<TurningPoint>> {
    let rho = large(radius)?;
    let m = (theta0 / TAU).round();
    let tau0 = f_unchecked(radius, rho, TAU * m) - f_unchecked(radius, rho, theta0);
    Ok(ks
        .map(|k| {
            let time = tau0 + k as f64 * PI / rho.abs();
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            TurningPoint {
                k,
                time,
                point: Vec2::polar(time) * (sign * (radius + sign)),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn regimes() {
        assert_eq!(CircleRegime::new(0.5).unwrap().regime, Regime::Small);
        assert_eq!(CircleRegime::new(1.0).unwrap().regime, Regime::Critical);
        let l = CircleRegime::new(2.0).unwrap();
        assert_eq!(l.regime, Regime::Large);
        let rho = l.rho_r.unwrap();
        assert!(rho > -1.0 && rho < 0.0);
        assert!(CircleRegime::new(-1.0).is_err());
    }

    #[test]
    fn equilibrium_values() {
        let (p, m) = equilibria(0.8).unwrap();
        assert_relative_eq!(p, -2.498091544796509, max_relative = 1e-14);
        assert_eq!(m, -p);
        assert!((equilibria(1e-12).unwrap().0 + FRAC_PI_2).abs() < 1e-11);
        assert!(equilibria(1.0).is_err());
        // Radius of the circular shadowing curve.
        let pos = position_exact(0.8, p, 1.3).unwrap();
        assert_relative_eq!(pos.norm(), 0.6, max_relative = 1e-14);
    }

    #[test]
    fn small_r_turning_time() {
        assert_eq!(turning_time_small_r(0.8, 0.0).unwrap(), 0.0);
        let tau = turning_time_small_r(0.8, PI / 4.0).unwrap();
        let want = 8.0 / 3.0 * ((1.0f64 / 9.0).sqrt() * (PI / 8.0).tan()).atanh();
        assert_relative_eq!(tau, want, max_relative = 1e-14);
        assert_relative_eq!(tau, 0.37055664589034, max_relative = 1e-12);
        let (p, m) = equilibria(0.8).unwrap();
        assert!(turning_time_small_r(0.8, m).is_err());
        assert!(turning_time_small_r(0.8, p).is_err());
        // φ really is 0 (resp. π) at the turning time.
        assert!(phi_of_t(0.8, PI / 4.0, tau).unwrap().abs() < 1e-14);
        let tau2 = turning_time_small_r(0.8, 3.0).unwrap();
        assert!((phi_of_t(0.8, 3.0, tau2).unwrap() - PI).abs() < 1e-13);
        let tau3 = turning_time_small_r(0.8, 3.0 + TAU).unwrap();
        assert_relative_eq!(tau2, tau3, max_relative = 1e-12);
    }

    #[test]
    fn critical_solution() {
        assert_eq!(turning_time_r1(PI / 2.0).unwrap(), (PI / 4.0).tan());
        assert!((turning_time_r1(PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        let p = sc_at_r_equal_1(0.0, 0.0).unwrap();
        assert_relative_eq!(p.x, 2.0);
        assert!(sc_at_r_equal_1(0.0, 100.0).unwrap().norm() < 0.03);
        assert!(sc_at_r_equal_1(0.0, -100.0).unwrap().norm() < 0.03);
        assert!(sc_at_r_equal_1(PI, 1.0).is_err());
        assert!(turning_time_r1(-PI).is_err());
        assert!((phi_of_t(1.0, PI, 5.0).unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn phi_satisfies_the_equation() {
        for &(r, th0) in &[(0.3, 0.5), (0.8, 3.0), (0.8, -2.9), (1.0, 1.0), (1.5, 0.2), (3.0, -7.0), (0.6, 12.0)] {
            for i in 0..40 {
                let t = -5.0 + 0.37 * i as f64;
                let h = 1e-5;
                let fd = (phi_of_t(r, th0, t + h).unwrap() - phi_of_t(r, th0, t - h).unwrap()) / (2.0 * h);
                let phi = phi_of_t(r, th0, t).unwrap();
                let want = -(phi.cos() + r) / r;
                assert!((fd - want).abs() < 1e-6, "r={r} th0={th0} t={t}: {fd} vs {want}");
            }
            assert!((phi_of_t(r, th0, 0.0).unwrap() - th0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_r_function() {
        assert_eq!(large_r_f(2.0, 0.0).unwrap(), 0.0);
        let rho = -(3.0f64).sqrt() / 2.0;
        assert_relative_eq!(large_r_f(2.0, PI - 1e-12).unwrap(), PI / rho, max_relative = 1e-9);
        assert_relative_eq!(
            large_r_f(2.0, 1.0 + TAU).unwrap(),
            large_r_f(2.0, 1.0).unwrap() + TAU / rho,
            max_relative = 1e-13
        );
        for v in [-30.0, -3.0, 0.0, 0.5, 7.0, 100.0] {
            let phi = large_r_f_inverse(2.0, v).unwrap();
            assert!((large_r_f(2.0, phi).unwrap() - v).abs() < 1e-12 * (1.0 + v.abs()));
        }
        let s2 = 2f64.sqrt();
        assert!((phi_of_t(s2, 0.0, PI * s2).unwrap() + PI).abs() < 1e-12);
        assert!(large_r_f(1.0, 0.0).is_err());
    }

    #[test]
    fn rotation_numbers() {
        assert_eq!(rotation_number_circle(0.5).unwrap(), 1.0);
        assert_eq!(rotation_number_circle(1.0).unwrap(), 1.0);
        assert_relative_eq!(rotation_number_circle(2.0 / 3f64.sqrt()).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(rotation_number_circle(2f64.sqrt()).unwrap(), 1.0 - 0.5f64.sqrt(), max_relative = 1e-14);
        assert!((rotation_number_circle(1.0 + 1e-14).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn subharmonics() {
        assert_relative_eq!(subharmonic_distance(2, 1).unwrap(), 1.1547005383792517, max_relative = 1e-15);
        assert_relative_eq!(subharmonic_distance(17, 5).unwrap(), 17.0 / 264f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(subharmonic_distance(3, 1).unwrap(), 1.0606601717798212, max_relative = 1e-15);
        for (p, q) in [(2, 1), (3, 1), (3, 2), (17, 5), (7, 3)] {
            let rho = rotation_number_circle(subharmonic_distance(p, q).unwrap()).unwrap();
            assert!((rho - (p - q) as f64 / p as f64).abs() < 1e-14);
        }
        assert!(subharmonic_distance(4, 2).is_err());
        assert!(subharmonic_distance(1, 2).is_err());
        assert!(subharmonic_distance(3, 0).is_err());
    }

    #[test]
    fn turning_points_large_r() {
        let r = 2f64.sqrt();
        let pts = turning_data_large_r(r, 0.4, -2..6).unwrap();
        for w in pts.windows(2) {
            assert_relative_eq!(w[1].time - w[0].time, PI * r, max_relative = 1e-14);
        }
        for p in &pts {
            let want = if p.k % 2 == 0 { r + 1.0 } else { r - 1.0 };
            assert_relative_eq!(p.point.norm(), want, max_relative = 1e-14);
            // The closed-form curve really passes through the point.
            assert!(position_exact(r, 0.4, p.time).unwrap().distance(p.point) < 1e-12);
            let phi = phi_of_t(r, 0.4, p.time).unwrap();
            assert!((phi / PI - (phi / PI).round()).abs() < 1e-12);
        }
        let r21 = subharmonic_distance(2, 1).unwrap();
        let pts = turning_data_large_r(r21, 0.0, 0..20).unwrap();
        let mut distinct: Vec<Vec2> = Vec::new();
        for p in pts {
            if distinct.iter().all(|q| q.distance(p.point) > 1e-6) {
                distinct.push(p.point);
            }
        }
        assert_eq!(distinct.len(), 2);
    }
}
