//! Shared fixtures for the benchmarks.

use shadowtrace::{ClosedCurve, FourierSeries};

pub fn circle() -> ClosedCurve {
    ClosedCurve::circle(1.0).expect("unit circle")
}

pub fn ellipse() -> ClosedCurve {
    ClosedCurve::ellipse(2.0).expect("ellipse")
}

/// A convex curve with eight harmonics, heavier to evaluate than the ellipse.
pub fn fourier8() -> ClosedCurve {
    let small = |k: usize| 0.02 / (k * k) as f64;
    let a: Vec<f64> = (1..=8).map(|k| if k == 1 { 1.0 } else { small(k) }).collect();
    let b: Vec<f64> = (1..=8).map(|k| if k == 1 { 0.0 } else { -small(k) }).collect();
    ClosedCurve::from_fourier(FourierSeries::new(0.0, a.clone(), b.clone()), FourierSeries::new(0.0, b, a))
        .expect("regular curve")
}
