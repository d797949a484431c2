use thiserror::Error;

/// Errors produced by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    /// An argument lies outside the domain of the operation.
    #[error("{op}: domain error: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The argument hits a pole of the function.
    #[error("{op}: pole at {detail}")]
    Pole { op: &'static str, detail: String },

    /// A series or quadrature failed to reach its tolerance.
    #[error("{op}: did not converge: {detail}")]
    NonConvergence { op: &'static str, detail: String },

    /// A parameter constraint is violated; `constraint` names it.
    #[error("constraint violated: {constraint} ({detail})")]
    Constraint {
        constraint: &'static str,
        detail: String,
    },
}

impl GreenError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        GreenError::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn pole(op: &'static str, detail: impl Into<String>) -> Self {
        GreenError::Pole {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn no_convergence(op: &'static str, detail: impl Into<String>) -> Self {
        GreenError::NonConvergence {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn constraint(constraint: &'static str, detail: impl Into<String>) -> Self {
        GreenError::Constraint {
            constraint,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, GreenError::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, GreenError>;
