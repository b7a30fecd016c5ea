#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowtrace::{ClosedCurve, FourierSeries};

/// A unit circle with small random harmonics 2..=4 added. The perturbation
/// of the curvature stays well below one, so the result is strictly convex.
pub fn random_convex_curve(seed: u64) -> ClosedCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = |first: f64| -> (Vec<f64>, Vec<f64>) {
        let mut a = vec![first, 0.0, 0.0, 0.0];
        let mut b = vec![0.0; 4];
        for k in 2..=4 {
            let amp = 0.04 / (k * k) as f64;
            a[k - 1] = rng.gen_range(-amp..amp);
            b[k - 1] = rng.gen_range(-amp..amp);
        }
        (a, b)
    };
    let (xa, xb) = coeffs(1.0);
    let (mut ya, mut yb) = coeffs(0.0);
    yb[0] = 1.0;
    ya[0] = 0.0;
    let c = ClosedCurve::from_fourier(FourierSeries::new(0.0, xa, xb), FourierSeries::new(0.0, ya, yb))
        .expect("perturbed circle is regular");
    assert!(!c.metrics().unwrap().curvature_vanishes());
    c
}
