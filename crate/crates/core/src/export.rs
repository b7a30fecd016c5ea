//! CSV and JSON writers. Floats are written with `{:.16e}` so that output is
//! byte-identical across runs and round-trips exactly.

use crate::dynamics::Trajectory;
use crate::rotation::SweepPoint;
use crate::singularities::{Branch, CuspEvent};
use serde::Serialize;
use std::io::{self, Write};

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

/// Columns `t,theta,x,y,alpha`.
pub fn write_trajectory_csv<W: Write>(trajectory: &Trajectory, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "theta", "x", "y", "alpha"]).map_err(csv_err)?;
    for s in &trajectory.samples {
        w.write_record([f(s.t), f(s.theta), f(s.position.x), f(s.position.y), f(s.alpha)])
            .map_err(csv_err)?;
    }
    w.flush()
}

/// Columns `R,rho,error_bound,n_periods`. Failed points get `NaN` values
/// and `n_periods` 0.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["R", "rho", "error_bound", "n_periods"]).map_err(csv_err)?;
    for p in points {
        let row = match &p.estimate {
            Ok(e) => [f(p.radius), f(e.value), f(e.error_bound), e.periods_used.to_string()],
            Err(_) => [f(p.radius), "NaN".into(), "NaN".into(), "0".into()],
        };
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush()
}

#[derive(Debug, Serialize)]
struct CuspRecord {
    t: f64,
    x: f64,
    y: f64,
    branch: Branch,
    d2norm: f64,
    phi_level: i64,
}

/// A JSON array of `{t, x, y, branch, d2norm, phi_level}`.
pub fn cusps_to_json(events: &[CuspEvent]) -> String {
    let recs: Vec<CuspRecord> = events
        .iter()
        .map(|e| CuspRecord {
            t: e.time,
            x: e.location.x,
            y: e.location.y,
            branch: e.branch,
            d2norm: e.second_derivative_norm,
            phi_level: e.phi_level,
        })
        .collect();
    serde_json::to_string_pretty(&recs).expect("plain records serialize")
}
