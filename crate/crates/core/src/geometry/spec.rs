//! JSON curve descriptions.
//!
//! ```json
//! {"type": "circle", "radius": 1.0}
//! {"type": "ellipse", "b": 2.0}
//! {"type": "fourier", "x": {"a0": 0, "a": [1], "b": [0]}, "y": {"a0": 0, "a": [0], "b": [1]}}
//! ```

use super::{ClosedCurve, FourierSeries};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSpec {
    #[serde(default)]
    pub a0: f64,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Circle { radius: f64 },
    Ellipse { b: f64 },
    Fourier { x: FourierSpec, y: FourierSpec },
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::CurveSpec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve spec serializes")
    }

    pub fn build(&self) -> Result<ClosedCurve> {
        match self {
            CurveSpec::Circle { radius } => ClosedCurve::circle(*radius),
            CurveSpec::Ellipse { b } => ClosedCurve::ellipse(*b),
            CurveSpec::Fourier { x, y } => ClosedCurve::from_fourier(x.clone().into(), y.clone().into()),
        }
    }
}

impl From<FourierSpec> for FourierSeries {
    fn from(s: FourierSpec) -> Self {
        FourierSeries::new(s.a0, s.a, s.b)
    }
}

impl From<FourierSeries> for FourierSpec {
    fn from(s: FourierSeries) -> Self {
        FourierSpec { a0: s.a0, a: s.a, b: s.b }
    }
}

impl From<ClosedCurve> for CurveSpec {
    fn from(c: ClosedCurve) -> Self {
        CurveSpec::Fourier {
            x: c.x.into(),
            y: c.y.into(),
        }
    }
}

impl TryFrom<CurveSpec> for ClosedCurve {
    type Error = Error;

    fn try_from(spec: CurveSpec) -> Result<Self> {
        spec.build()
    }
}
