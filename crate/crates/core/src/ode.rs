//! Small fixed-size ODE kernels shared by the shadowing integrators.

use crate::error::{Error, Result};

pub type State<const N: usize> = [f64; N];

#[inline]
fn axpy<const N: usize>(y: &State<N>, h: f64, k: &State<N>) -> State<N> {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// One classical Runge–Kutta step.
#[inline]
pub fn rk4_step<const N: usize>(f: &mut impl FnMut(f64, &State<N>) -> State<N>, t: f64, y: &State<N>, h: f64) -> State<N> {
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    out
}

/// Cubic Hermite interpolation on `[t0, t1]` from values and slopes.
#[inline]
pub fn hermite(t0: f64, y0: f64, d0: f64, t1: f64, y1: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_step: f64,
}

/// Accepted node of an adaptive integration: time, state and slope.
#[derive(Debug, Clone, Copy)]
pub struct Node<const N: usize> {
    pub t: f64,
    pub y: State<N>,
    pub dy: State<N>,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration from `t0` to `t1` (either direction).
/// Returns every accepted node, starting with the initial one.
pub fn dopri45<const N: usize>(
    f: &mut impl FnMut(f64, &State<N>) -> State<N>,
    t0: f64,
    y0: State<N>,
    t1: f64,
    opts: AdaptiveOptions,
) -> Result<Vec<Node<N>>> {
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut nodes = vec![Node { t: t0, y: y0, dy: f(t0, &y0) }];
    if span == 0.0 {
        return Ok(nodes);
    }
    let max_step = opts.max_step.min(span);
    let mut h = (0.01 * max_step).max(1e-6_f64.min(span));
    let (mut t, mut y) = (t0, y0);
    let mut k = [[0.0; N]; 7];
    k[0] = nodes[0].dy;
    while dir * (t1 - t) > 0.0 {
        let last = h >= (t1 - t).abs();
        if last {
            h = (t1 - t).abs();
        }
        let hs = dir * h;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += hs * A[s][j] * kj[i];
                }
            }
            k[s] = f(t + C[s] * hs, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let (mut s5, mut s4) = (0.0, 0.0);
            for s in 0..7 {
                s5 += B5[s] * k[s][i];
                s4 += B4[s] * k[s][i];
            }
            y5[i] += hs * s5;
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max((hs * (s5 - s4) / sc).abs());
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hs };
            y = y5;
            // First-same-as-last: stage 7 is the slope at the new point.
            k[0] = k[6];
            nodes.push(Node { t, y, dy: k[0] });
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).min(5.0) };
            h = (h * grow).min(max_step);
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.1);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t });
        }
    }
    Ok(nodes)
}

pub type Mat3 = [[f64; 3]; 3];

#[inline]
pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

#[inline]
pub fn mat_vec(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

/// Matrix exponential by scaling and squaring a truncated Taylor series.
pub fn expm3(a: &Mat3) -> Mat3 {
    let norm = a.iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.125 {
        scale *= 0.5;
        squarings += 1;
    }
    let m: Mat3 = a.map(|r| r.map(|x| x * scale));
    let mut result = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut term = result;
    for k in 1..=12 {
        term = mat_mul(&term, &m).map(|r| r.map(|x| x / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mat_mul(&result, &result);
    }
    result
}

/// One fourth-order Magnus step for `z' = A(t) z`, given `A` at the two
/// Gauss points of `[t, t + h]`.
pub fn magnus4_step(a1: &Mat3, a2: &Mat3, h: f64, z: &[f64; 3]) -> [f64; 3] {
    let p = mat_mul(a2, a1);
    let q = mat_mul(a1, a2);
    let c = 3f64.sqrt() / 12.0 * h * h;
    let mut omega = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            omega[i][j] = 0.5 * h * (a1[i][j] + a2[i][j]) + c * (p[i][j] - q[i][j]);
        }
    }
    mat_vec(&expm3(&omega), z)
}

/// Gauss–Legendre nodes on `[0, 1]` used by [`magnus4_step`].
pub const MAGNUS_NODES: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];
