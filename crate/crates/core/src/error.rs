use thiserror::Error;

/// Location of a Gauss point as (element, local point).
pub type GpId = Option<(usize, usize)>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiError {
    #[error("radius {radius:e} is not positive (too close to the axis)")]
    Domain { radius: f64 },

    #[error("inverted element (det = {det:e}) at {}", fmt_gp(.at))]
    Inverted { det: f64, at: GpId },

    #[error("non-positive eigenvalue {0:e} in elastic left Cauchy-Green tensor")]
    State(f64),

    #[error("return map failed after {iters} iterations, residual {residual:e}, at {}", fmt_gp(.at))]
    Constitutive { iters: usize, residual: f64, at: GpId },

    #[error("negative plastic multiplier {0:e}")]
    Consistency(f64),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("singular matrix at pivot {0}")]
    Singular(usize),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("io error: {0}")]
    Io(String),
}

fn fmt_gp(at: &GpId) -> String {
    match at {
        Some((e, g)) => format!("element {e}, gauss point {g}"),
        None => "unknown point".to_string(),
    }
}

impl AxiError {
    /// Attaches a Gauss point id to kinematic or constitutive failures.
    pub fn at(self, elem: usize, gp: usize) -> Self {
        match self {
            AxiError::Inverted { det, .. } => AxiError::Inverted { det, at: Some((elem, gp)) },
            AxiError::Constitutive { iters, residual, .. } => AxiError::Constitutive {
                iters,
                residual,
                at: Some((elem, gp)),
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for AxiError {
    fn from(e: std::io::Error) -> Self {
        AxiError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, AxiError>;
