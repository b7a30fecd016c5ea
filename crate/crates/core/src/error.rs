use std::fmt;

/// Broad category of a failure, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: malformed curve, out-of-range parameter.
    Validation,
    /// The numerics could not deliver the requested accuracy.
    Numerical,
    /// A mathematical hypothesis of the requested operation is not met.
    Hypothesis,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ErrorKind::Validation => "validation",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Hypothesis => "hypothesis",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("curve has no nonzero coefficient")]
    DegenerateCurve,

    #[error("curve is not regular: speed {speed:.3e} at t = {t:.6}")]
    NotRegular { t: f64, speed: f64 },

    #[error("malformed curve spec: {0}")]
    CurveSpec(String),

    #[error("quadrature did not converge (last estimate {estimate}, change {change:.3e})")]
    QuadratureNonConvergence { estimate: f64, change: f64 },

    #[error("tangent angle unwrap left residual {residual:.3e} from an integer rotation index")]
    UnwrapResidual { residual: f64 },

    #[error("curvature vanishes near t = {t:.6}")]
    VanishingCurvature { t: f64 },

    #[error("arc-length refit of degree {degree} reaches speed deviation {achieved:.3e}")]
    RefitTooCoarse { degree: usize, achieved: f64 },

    #[error("adaptive step size underflow at t = {t:.9}")]
    StepSizeUnderflow { t: f64 },

    #[error("initial shadowing point coincides with the escaper")]
    CoincidentStart,

    #[error("shadower came within {distance:.3e} of the escaper at t = {t:.6}")]
    SingularApproach { t: f64, distance: f64 },

    #[error("extended system left the upper cone (y = {y:.3e}) at t = {t:.6}")]
    ConeViolation { t: f64, y: f64 },

    #[error("trajectory does not belong to the given curve")]
    CurveMismatch,

    #[error("singular set is degenerate: alpha vanishes on an interval near t = {t:.6}")]
    DegenerateSingularity { t: f64 },

    #[error("cusp acceleration formula {analytic:.6e} disagrees with finite differences {finite_difference:.6e}")]
    CuspFormulaMismatch { analytic: f64, finite_difference: f64 },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("no departure from the plateau found below R = {limit}")]
    NoDeparture { limit: f64 },

    #[error("could not bracket rotation number {target}: {reason}")]
    Bracketing { target: f64, reason: String },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("closed-form evaluation left its domain: {0}")]
    OracleDomain(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidParameter { .. }
            | DegenerateCurve
            | NotRegular { .. }
            | CurveSpec(_)
            | CoincidentStart
            | CurveMismatch => ErrorKind::Validation,
            Hypothesis(_) | VanishingCurvature { .. } => ErrorKind::Hypothesis,
            _ => ErrorKind::Numerical,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
